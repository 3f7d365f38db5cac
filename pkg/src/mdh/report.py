"""Machine-readable run reports, plot-data export and figure rendering."""

from __future__ import annotations

import numpy as np

from .data_io import Dataset
from .geometry import project
from .kde1d import ProjectedKde, density_integral, find_local_extrema
from .optimizer import MdhResult

SCHEMA_VERSION = 1
PLOT_CURVE_POINTS = 512


def _fmt_float(x: float) -> str:
    if x != x:
        return "NaN"
    if x in (float("inf"), float("-inf")):
        return '"Infinity"' if x > 0 else '"-Infinity"'
    return format(x, ".17g")


def dumps(obj, indent: int = 0) -> str:
    """Deterministic JSON with floats at 17 significant digits."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = []
        for key in obj:
            items.append(f'{inner}"{key}": {dumps(obj[key], indent + 1)}')
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        body = ", ".join(dumps(v, indent + 1) for v in obj)
        if len(body) <= 100:
            return "[" + body + "]"
        items = ",\n".join(inner + dumps(v, indent + 1) for v in obj)
        return "[\n" + items + "\n" + pad + "]"
    if isinstance(obj, bool) or isinstance(obj, np.bool_):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        out = obj.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{out}"'
    if isinstance(obj, np.ndarray):
        return dumps(obj.tolist(), indent)
    raise TypeError(f"cannot serialize {type(obj)!r}")


def result_to_dict(res: MdhResult) -> dict:
    return {
        "hyperplane": {"v": [float(x) for x in res.hyperplane.v],
                       "b": float(res.hyperplane.b)},
        "density_integral": float(res.density_integral),
        "relative_depth": float(res.relative_depth),
        "is_density_minimizer": bool(res.is_density_minimizer),
        "partition": [int(x) for x in res.partition],
        "init_tag": res.init_tag,
        "labeled_error": res.labeled_error,
        "trace": [
            {"init_tag": r.init_tag, "alpha": r.alpha, "gamma": r.gamma,
             "phi": r.phi, "iterations": r.iterations,
             "grad_norm": r.grad_norm, "b_star": r.b_star,
             "is_density_minimizer": bool(r.is_density_minimizer),
             "status": r.status}
            for r in res.trace],
    }


def plot_data_rows(ds: Dataset, res: MdhResult, h: float):
    """Rows of the plot-data CSV: the projected density curve, the optimal
    offset and the adjacent mode locations."""
    v = res.hyperplane.v
    p = project(ds, v)
    kde = ProjectedKde(p, h)
    lo = float(p.min()) - 3.0 * h
    hi = float(p.max()) + 3.0 * h
    xs = np.linspace(lo, hi, PLOT_CURVE_POINTS)
    ys = density_integral(kde, xs)
    rows = [(float(x), float(y), "curve") for x, y in zip(xs, ys)]
    b = res.hyperplane.b
    rows.append((float(b), float(density_integral(kde, b)), "optimum"))
    maxima = [loc for loc, _, kind in find_local_extrema(kde, lo, hi, 512)
              if kind == "max"]
    left = [loc for loc in maxima if loc < b]
    right = [loc for loc in maxima if loc > b]
    if left:
        rows.append((float(max(left)),
                     float(density_integral(kde, max(left))), "mode_left"))
    if right:
        rows.append((float(min(right)),
                     float(density_integral(kde, min(right))), "mode_right"))
    return rows


def write_plot_data(path, ds: Dataset, res: MdhResult, h: float):
    rows = plot_data_rows(ds, res, h)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("b,density,flag\n")
        for b, dens, flag in rows:
            fh.write(f"{b:.17g},{dens:.17g},{flag}\n")
    return rows


def render_figure(path, rows):
    """Render the projected-density curve with the split point and adjacent
    modes marked, next to the delimited plot data."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    curve = [(b, d) for b, d, f in rows if f == "curve"]
    xs = [b for b, _ in curve]
    ys = [d for _, d in curve]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(xs, ys, color="C0", lw=1.5, label="projected density")
    for b, d, flag in rows:
        if flag == "optimum":
            ax.axvline(b, color="C3", lw=1.2, ls="--", label="split point")
        elif flag in ("mode_left", "mode_right"):
            ax.plot([b], [d], "o", color="C1", ms=6,
                    label=flag.replace("_", " "))
    ax.set_xlabel("offset along normal")
    ax.set_ylabel("density integral")
    ax.legend(loc="best", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
