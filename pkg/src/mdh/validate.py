"""Oracle-backed validation experiments: exactness of the one-dimensional
reduction, the level-set bound, penalty calibration, and convergence of the
minimum density hyperplane to the maximum margin hyperplane as the bandwidth
shrinks."""

from __future__ import annotations

import numpy as np

from .data_io import Dataset, center, default_bandwidth
from .geometry import Hyperplane, angles_to_unit_vector, partition, project
from .kde1d import ProjectedKde, density_integral, lipschitz_bound
from .objective import PenaltyParams, feasible_interval, minimize_over_b
from .optimizer import MdhConfig, mdp2_cluster
from .oracles import QuadratureSpec, brute_force_max_margin, full_kde, \
    hyperplane_quadrature


# ---------------------------------------------------------------------------
# dataset generators shared by the validation command and the test suite

def two_gaussians(n: int, seed: int, centers=((-3.0, 0.0), (3.0, 0.0)),
                  scale: float = 1.0):
    """Balanced 2-D mixture of two spherical Gaussians.

    Returns ``(Dataset, true_labels)`` with labels in {-1, +1}.
    """
    rng = np.random.default_rng(seed)
    half = n // 2
    a = rng.normal(size=(half, 2)) * scale + np.asarray(centers[0])
    b = rng.normal(size=(n - half, 2)) * scale + np.asarray(centers[1])
    rows = np.vstack([a, b])
    labels = np.concatenate([-np.ones(half, dtype=int),
                             np.ones(n - half, dtype=int)])
    perm = rng.permutation(n)
    return Dataset(rows[perm]), labels[perm]


def gaussian_mixture(n: int, seed: int, centers, scale: float = 0.7):
    """2-D mixture of spherical Gaussians with equal weights.

    Returns ``(Dataset, component_labels)``.
    """
    rng = np.random.default_rng(seed)
    centers = np.asarray(centers, dtype=float)
    k = len(centers)
    comp = rng.integers(0, k, size=n)
    rows = rng.normal(size=(n, 2)) * scale + centers[comp]
    return Dataset(rows), comp


def planted_margin_data(seed: int, n: int = 250, gap: float = 0.35,
                        angle: float = 0.96):
    """Two overlapping Gaussians with a thin slab of points deleted around a
    planted hyperplane, making that hyperplane the unique widest separator.

    Returns ``(Dataset, planted_hyperplane)``.  The planted normal is tilted
    away from the natural between-cluster valley so that at large bandwidth
    the density valley and the maximum margin disagree.
    """
    rng = np.random.default_rng(seed)
    half = n // 2
    rows = np.vstack([
        rng.normal(size=(half, 2)) + np.array([-1.2, 0.0]),
        rng.normal(size=(n - half, 2)) + np.array([1.2, 0.0]),
    ])
    v = np.array([np.cos(angle), np.sin(angle)])
    b = float(np.mean(rows @ v))
    keep = np.abs(rows @ v - b) >= gap / 2.0
    return Dataset(rows[keep]), Hyperplane(v, b)


def _random_instance(rng, n_max: int = 20):
    n = int(rng.integers(5, n_max + 1))
    rows = rng.normal(size=(n, 2)) * rng.uniform(0.5, 2.0) \
        + rng.normal(size=2) * 2.0
    return Dataset(rows)


def _random_direction(rng, d: int):
    v = rng.standard_normal(d)
    return v / np.linalg.norm(v)


# ---------------------------------------------------------------------------
# suites

def suite_eq4(seed: int = 0, n_datasets: int = 50, n_planes: int = 20,
              rtol: float = 1e-6) -> dict:
    """Exactness of the 1-D reduction against line quadrature (2-D data)."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_datasets):
        ds = _random_instance(rng)
        h = rng.uniform(0.2, 1.0)
        for _ in range(n_planes):
            v = _random_direction(rng, 2)
            p = ds.rows @ v
            b = rng.uniform(p.min(), p.max())
            direct = density_integral(ProjectedKde(p, h), b)
            quad = hyperplane_quadrature(ds, h, Hyperplane(v, b))
            gap = abs(direct - quad) / max(abs(direct), 1e-300)
            worst = max(worst, gap)
    return {"suite": "eq4", "passed": bool(worst < rtol),
            "max_relative_gap": worst, "tolerance": rtol}


def suite_lemma1(seed: int = 0, n_datasets: int = 50, n_planes: int = 20,
                 n_points: int = 1000) -> dict:
    """Level-set bound: the full KDE on a hyperplane never exceeds
    (2 pi h^2)^((1-d)/2) times the density integral."""
    rng = np.random.default_rng(seed)
    worst_slack = -np.inf
    violations = 0
    for _ in range(n_datasets):
        ds = _random_instance(rng)
        h = rng.uniform(0.2, 1.0)
        lo_box = ds.rows.min(axis=0)
        hi_box = ds.rows.max(axis=0)
        radius = float(np.linalg.norm(hi_box - lo_box)) + 1.0
        for _ in range(n_planes):
            v = _random_direction(rng, 2)
            p = ds.rows @ v
            b = rng.uniform(p.min(), p.max())
            bound = (2.0 * np.pi * h * h) ** ((1 - ds.d) / 2.0) \
                * density_integral(ProjectedKde(p, h), b)
            perp = np.array([-v[1], v[0]])
            foot = b * v
            ts = rng.uniform(-radius, radius, size=n_points)
            pts = foot[None, :] + ts[:, None] * perp[None, :]
            inside = np.all((pts >= lo_box) & (pts <= hi_box), axis=1)
            for x in pts[inside]:
                val = full_kde(ds, h, x)
                slack = val - bound
                worst_slack = max(worst_slack, slack)
                if slack > 1e-12:
                    violations += 1
    return {"suite": "lemma1", "passed": bool(violations == 0),
            "violations": violations, "worst_slack": worst_slack}


def suite_prop1(seed: int = 0, n_pairs: int = 100,
                dense_grid: int = 100_000) -> dict:
    """Penalty calibration: all minimisers of the penalised objective stay
    within eta of the feasible interval, and the constrained minimiser is
    within eta of one of them."""
    rng = np.random.default_rng(seed)
    max_overhang = 0.0
    max_displacement = 0.0
    eta = 1e-2
    for _ in range(n_pairs):
        ds = _random_instance(rng, n_max=40)
        d = int(rng.integers(2, 4))
        if d != 2:
            rows = np.hstack([ds.rows, rng.normal(size=(ds.n, d - 2))])
            ds = Dataset(rows)
        h = rng.uniform(0.15, 0.8)
        alpha = rng.uniform(0.1, 0.9)
        v = _random_direction(rng, ds.d)
        pp = PenaltyParams(alpha=alpha, eta=eta, L=lipschitz_bound(h))
        inner = minimize_over_b(v, ds, h, pp)
        p = project(ds, v)
        lo, hi = feasible_interval(p, alpha)
        for b in inner.minimizer_set:
            over = max(lo - b, b - hi, 0.0)
            max_overhang = max(max_overhang, over)
        kde = ProjectedKde(p, h)
        grid = np.linspace(lo, hi, dense_grid)
        vals = density_integral(kde, grid)
        b_con = float(grid[int(np.argmin(vals))])
        disp = min(abs(b_con - b) for b in inner.minimizer_set)
        max_displacement = max(max_displacement, disp)
    grid_slop = 1e-4  # dense-grid resolution of the constrained minimiser
    passed = max_overhang <= eta + 1e-12 \
        and max_displacement <= eta + grid_slop
    return {"suite": "prop1", "passed": bool(passed),
            "max_overhang": max_overhang,
            "max_displacement": max_displacement, "eta": eta}


def suite_convergence(seed: int = 0, n_halvings: int = 5,
                      distance_tol: float = 0.05) -> dict:
    """Convergence of the minimum density hyperplane to the maximum margin
    hyperplane as the bandwidth is halved repeatedly."""
    ds, _ = planted_margin_data(seed)
    mmh, mmh_margin = brute_force_max_margin(ds, alpha=0.9)
    mmh_part = partition(ds, mmh)
    ds_c, mean = center(ds)
    h0 = default_bandwidth(ds_c)
    table = []
    prev_v = None
    for k in range(n_halvings + 1):
        h = h0 / 2 ** k
        inits = ("pc1", "pc2") if prev_v is None \
            else ("pc1", "pc2", prev_v)
        cfg = MdhConfig(h=h, seed=seed, inits=inits)
        res = mdp2_cluster(ds, cfg)
        prev_v = res.hyperplane.v
        part = res.partition
        same = bool(np.all(part == mmh_part) or np.all(part == -mmh_part))
        vb = np.concatenate([res.hyperplane.v, [res.hyperplane.b]])
        vm = np.concatenate([mmh.v, [mmh.b]])
        dist = min(float(np.linalg.norm(vb - vm)),
                   float(np.linalg.norm(vb + vm)))
        table.append({"h": h, "partition_matches_mmh": same,
                      "distance_to_mmh": dist,
                      "relative_depth": res.relative_depth})
    matches = [row["partition_matches_mmh"] for row in table]
    first = next((i for i, ok in enumerate(matches) if ok), None)
    monotone = first is not None and all(matches[first:])
    final_dist = table[-1]["distance_to_mmh"]
    passed = monotone and final_dist < distance_tol
    return {"suite": "convergence", "passed": bool(passed),
            "mmh_margin": mmh_margin, "first_success_index": first,
            "all_matched_after_first": monotone,
            "final_distance": final_dist, "distance_tol": distance_tol,
            "table": table}


SUITES = {
    "eq4": suite_eq4,
    "lemma1": suite_lemma1,
    "prop1": suite_prop1,
    "convergence": suite_convergence,
}


def run_suites(names, seed: int = 0):
    """Run the named suites ('all' expands to every suite)."""
    if names == "all" or names == ["all"]:
        names = list(SUITES)
    elif isinstance(names, str):
        names = [names]
    results = []
    for name in names:
        if name not in SUITES:
            raise ValueError(f"unknown suite {name!r}; "
                             f"choose from {sorted(SUITES)} or 'all'")
        results.append(SUITES[name](seed=seed))
    return results
