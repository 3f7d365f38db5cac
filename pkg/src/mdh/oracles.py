"""Independent brute-force references used by the tests and the validation
command: the full d-dimensional KDE, line quadrature of the density along a
hyperplane, and grid search for the maximum margin hyperplane."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data_io import Dataset
from .geometry import Hyperplane
from .objective import feasible_interval


@dataclass(frozen=True)
class QuadratureSpec:
    """Trapezoid quadrature along a line.

    The integration half-width is ``half_width`` times (data radius + 6h),
    measured from the foot of the hyperplane.
    """

    half_width: float = 1.5
    nodes: int = 20001

    def __post_init__(self):
        if self.nodes % 2 == 0 or self.nodes < 1001:
            raise ValueError("nodes must be odd and >= 1001")
        if self.half_width <= 0.0:
            raise ValueError("half_width must be positive")


def full_kde(ds: Dataset, h: float, x) -> float:
    """Isotropic Gaussian KDE of the full d-dimensional data at x."""
    x = np.asarray(x, dtype=float)
    sq = ((ds.rows - x) ** 2).sum(axis=1)
    norm = ds.n * (2.0 * np.pi * h * h) ** (ds.d / 2.0)
    return float(np.exp(-sq / (2.0 * h * h)).sum() / norm)


def hyperplane_quadrature(ds: Dataset, h: float, hp: Hyperplane,
                          spec: QuadratureSpec = QuadratureSpec()) -> float:
    """Trapezoid integral of :func:`full_kde` along a line (d = 2 only)."""
    if ds.d != 2:
        raise ValueError("line quadrature requires d = 2")
    v = hp.v
    perp = np.array([-v[1], v[0]])
    foot = hp.b * v
    radius = float(np.max(np.linalg.norm(ds.rows - foot, axis=1)))
    half = spec.half_width * (radius + 6.0 * h)
    ts = np.linspace(-half, half, spec.nodes)
    pts = foot[None, :] + ts[:, None] * perp[None, :]
    sq = ((pts[:, None, :] - ds.rows[None, :, :]) ** 2).sum(axis=2)
    dens = np.exp(-sq / (2.0 * h * h)).sum(axis=1) \
        / (ds.n * (2.0 * np.pi * h * h))
    trapezoid = getattr(np, "trapezoid", None) or np.trapz
    return float(trapezoid(dens, ts))


def _best_offset_for_angle(p: np.ndarray, alpha: float):
    """Margin-maximizing offset within the feasible interval, exactly from
    the sorted projections."""
    lo, hi = feasible_interval(p, alpha)
    ps = np.sort(p)
    candidates = [lo, hi]
    mids = 0.5 * (ps[:-1] + ps[1:])
    inside = mids[(mids >= lo) & (mids <= hi)]
    candidates.extend(inside.tolist())
    best_b, best_m = lo, -np.inf
    for b in candidates:
        marg = float(np.min(np.abs(p - b)))
        if marg > best_m:
            best_b, best_m = b, marg
    return best_b, best_m


def brute_force_max_margin(ds: Dataset, alpha: float, angle_grid: int = 720,
                           b_grid: int = 0):
    """Maximum margin hyperplane by angle scan plus golden-section refinement.

    Exact in the offset for each scanned angle (the optimum lies at a gap
    midpoint or a feasible-interval endpoint); ``b_grid`` is accepted for
    interface compatibility but unused because the offset search is exact.
    Exactness of the angle scan holds for d = 2; higher d is rejected.
    Returns ``(Hyperplane, margin)``.
    """
    if ds.d != 2:
        raise ValueError("exact max-margin search requires d = 2")

    def margin_at(angle: float):
        v = np.array([np.cos(angle), np.sin(angle)])
        p = ds.rows @ v
        b, marg = _best_offset_for_angle(p, alpha)
        return v, b, marg

    angles = np.linspace(0.0, np.pi, angle_grid, endpoint=False)
    margins = np.empty(angle_grid)
    for i, a in enumerate(angles):
        margins[i] = margin_at(a)[2]
    k = int(np.argmax(margins))
    step = np.pi / angle_grid
    lo, hi = angles[k] - step, angles[k] + step

    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d_pt = a + invphi * (b - a)
    fc = margin_at(c)[2]
    fd = margin_at(d_pt)[2]
    while b - a > 1e-10:
        if fc > fd:
            b, d_pt, fd = d_pt, c, fc
            c = b - invphi * (b - a)
            fc = margin_at(c)[2]
        else:
            a, c, fc = c, d_pt, fd
            d_pt = a + invphi * (b - a)
            fd = margin_at(d_pt)[2]
    best_angle = 0.5 * (a + b)
    v, boff, marg = margin_at(best_angle)
    if marg < margins[k]:
        v, boff, marg = margin_at(angles[k])
    return Hyperplane(v, boff), marg
