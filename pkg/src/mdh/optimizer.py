"""Nonsmooth BFGS over the projection angles, the annealing driver for the
interval-width and label-penalty schedules, initialisation strategies, and
the top-level clustering / semi-supervised entry points."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .data_io import Dataset, LabeledSubset, DegenerateDataError, center, \
    principal_components, default_bandwidth
from .geometry import Hyperplane, angles_to_unit_vector, \
    unit_vector_to_angles, project, partition
from .kde1d import ProjectedKde, density_integral, find_local_extrema, \
    lipschitz_bound
from .objective import PenaltyParams, phi_value_and_gradient, \
    DEFAULT_ETA, DEFAULT_EPS, DEFAULT_GRID

DEFAULT_ALPHA_SCHEDULE = (0.01, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
DEFAULT_GAMMA_SCHEDULE = (0.1, 1.0, 10.0)


@dataclass(frozen=True)
class BfgsOptions:
    max_iter: int = 100
    grad_tol: float = 1e-6
    wolfe_c1: float = 1e-4
    wolfe_c2: float = 0.9
    max_linesearch: int = 40
    step_tol: float = 1e-12


@dataclass(frozen=True)
class MdhConfig:
    """All tunables of a run.  ``h=None`` selects the default bandwidth rule."""

    h: float | None = None
    alpha_schedule: tuple = DEFAULT_ALPHA_SCHEDULE
    gamma_schedule: tuple = DEFAULT_GAMMA_SCHEDULE
    eta: float = DEFAULT_ETA
    eps: float = DEFAULT_EPS
    m: int = DEFAULT_GRID
    bfgs: BfgsOptions = field(default_factory=BfgsOptions)
    inits: tuple = ("pc1", "pc2")
    seed: int = 0

    def __post_init__(self):
        a = tuple(self.alpha_schedule)
        if any(a[i + 1] <= a[i] for i in range(len(a) - 1)):
            raise ValueError("alpha schedule must be strictly increasing")
        g = tuple(self.gamma_schedule)
        if any(g[i + 1] < g[i] for i in range(len(g) - 1)):
            raise ValueError("gamma schedule must be nondecreasing")
        object.__setattr__(self, "alpha_schedule", a)
        object.__setattr__(self, "gamma_schedule", g)
        object.__setattr__(self, "inits", tuple(self.inits))

    @property
    def alpha_max(self) -> float:
        return self.alpha_schedule[-1]


@dataclass(frozen=True)
class StageRecord:
    init_tag: str
    alpha: float
    gamma: float
    phi: float
    iterations: int
    grad_norm: float
    b_star: float
    is_density_minimizer: bool
    status: str


@dataclass(frozen=True)
class MdhResult:
    hyperplane: Hyperplane
    density_integral: float
    relative_depth: float
    is_density_minimizer: bool
    partition: np.ndarray
    init_tag: str
    trace: tuple
    labeled_error: float | None = None


def bfgs_minimize(fun_grad, theta0, opts: BfgsOptions = BfgsOptions()):
    """BFGS with a weak-Wolfe bisection line search.

    ``fun_grad(theta) -> (value, grad)``.  The inverse-Hessian approximation
    is reset to the identity whenever the curvature condition fails, which
    keeps the method usable on the nonsmooth projection index.  Returns
    ``(theta_best, value_best, iterations, status)``; the returned value
    never exceeds the starting value.
    """
    x = np.atleast_1d(np.asarray(theta0, dtype=float)).copy()
    f, g = fun_grad(x)
    if not np.isfinite(f) or not np.all(np.isfinite(g)):
        return x, f, 0, "numerical_failure"
    best_x, best_f = x.copy(), f
    n = len(x)
    hinv = np.eye(n)
    status = "max_iter"
    it = 0
    for it in range(1, opts.max_iter + 1):
        gnorm = float(np.linalg.norm(g))
        if gnorm <= opts.grad_tol:
            status = "grad_tol"
            it -= 1
            break
        d = -(hinv @ g)
        dd = float(g @ d)
        if dd >= 0.0:  # not a descent direction; restart from steepest descent
            hinv = np.eye(n)
            d = -g
            dd = -gnorm * gnorm
        t, f_new, g_new, ls_ok = _weak_wolfe(fun_grad, x, f, g, d, opts)
        if not ls_ok or not np.isfinite(f_new) \
                or not np.all(np.isfinite(g_new)):
            if not np.isfinite(f_new) or not np.all(np.isfinite(g_new)):
                status = "numerical_failure"
                break
            # line search exhausted without satisfying both conditions; take
            # the best point it found if it decreases, else stop
            if f_new >= f:
                status = "linesearch_failure"
                break
        s = t * d
        if float(np.linalg.norm(s)) <= opts.step_tol:
            x = x + s
            f, g = f_new, g_new
            if f < best_f:
                best_x, best_f = x.copy(), f
            status = "step_tol"
            break
        y = g_new - g
        x = x + s
        ys = float(y @ s)
        if ys <= 1e-12 * np.linalg.norm(y) * np.linalg.norm(s):
            hinv = np.eye(n)
        else:
            rho = 1.0 / ys
            v = np.eye(n) - rho * np.outer(s, y)
            hinv = v @ hinv @ v.T + rho * np.outer(s, s)
        f, g = f_new, g_new
        if f < best_f:
            best_x, best_f = x.copy(), f
    return best_x, best_f, it, status


def _weak_wolfe(fun_grad, x, f0, g0, d, opts: BfgsOptions):
    """Bisection line search for the weak Wolfe conditions."""
    dd0 = float(g0 @ d)
    lo, hi = 0.0, np.inf
    t = 1.0
    f_t, g_t = f0, g0
    best = None
    for _ in range(opts.max_linesearch):
        f_t, g_t = fun_grad(x + t * d)
        if not np.isfinite(f_t) or not np.all(np.isfinite(g_t)):
            hi = t
            t = 0.5 * (lo + hi)
            continue
        if f_t > f0 + opts.wolfe_c1 * t * dd0:
            hi = t
        elif float(g_t @ d) < opts.wolfe_c2 * dd0:
            lo = t
            if best is None or f_t < best[1]:
                best = (t, f_t, g_t)
        else:
            return t, f_t, g_t, True
        t = 2.0 * lo if np.isinf(hi) else 0.5 * (lo + hi)
        if t == 0.0:
            break
    if best is not None:
        return best[0], best[1], best[2], False
    return t, f_t, g_t, False


def relative_depth(v, b: float, ds: Dataset, h: float,
                   m: int = DEFAULT_GRID) -> float:
    """Relative drop of the projected density at b below its adjacent modes.

    Zero when no local maximum exists strictly on each side of b, i.e. when
    the hyperplane does not separate two modes of the projected density.
    """
    p = project(ds, v)
    kde = ProjectedKde(p, h)
    lo = float(p.min()) - 3.0 * h
    hi = float(p.max()) + 3.0 * h
    maxima = [loc for loc, _, kind in find_local_extrema(kde, lo, hi, m)
              if kind == "max"]
    left = [loc for loc in maxima if loc < b]
    right = [loc for loc in maxima if loc > b]
    if not left or not right:
        return 0.0
    m_l = max(left)
    m_r = min(right)
    at_b = density_integral(kde, b)
    if at_b <= 0.0:
        return 0.0
    depth = (min(density_integral(kde, m_l), density_integral(kde, m_r))
             - at_b) / at_b
    return max(0.0, float(depth))


def _initial_directions(ds_c: Dataset, tags, rng,
                        labeled: LabeledSubset | None = None):
    """Resolve initialisation tags to unit vectors on the centered data."""
    n_pcs = 2 if any(isinstance(t, str) and t in ("pc1", "pc2")
                     for t in tags) else 0
    pcs = principal_components(ds_c, min(2, ds_c.d))[0] if n_pcs else None
    out = []
    for tag in tags:
        if isinstance(tag, np.ndarray):
            v = np.asarray(tag, dtype=float)
            out.append(("vector", v / np.linalg.norm(v)))
        elif tag == "pc1":
            out.append((tag, pcs[:, 0]))
        elif tag == "pc2":
            if pcs.shape[1] < 2:
                raise ValueError("pc2 initialisation needs d >= 2")
            out.append((tag, pcs[:, 1]))
        elif tag == "svm":
            if labeled is None:
                raise ValueError("svm initialisation needs labelled rows")
            v, fallback = _svm_direction(ds_c, labeled)
            out.append(("svm_fallback_pc1" if fallback else "svm", v))
        elif tag == "random":
            v = rng.standard_normal(ds_c.d)
            v /= np.linalg.norm(v)
            out.append((tag, v))
        else:
            raise ValueError(f"unknown initialisation tag {tag!r}")
    return out


def _run_anneal(ds_c: Dataset, h: float, cfg: MdhConfig, init_tag: str,
                theta0, stages, labeled: LabeledSubset | None):
    """Warm-started BFGS over a list of (alpha, gamma) stages.

    Returns the per-stage records and per-stage final angles.
    """
    L = lipschitz_bound(h)
    theta = np.atleast_1d(np.asarray(theta0, dtype=float)).copy()
    records = []
    thetas = []
    for alpha, gamma in stages:
        pp = PenaltyParams(alpha=alpha, eta=cfg.eta, eps=cfg.eps, L=L,
                           gamma=gamma)

        def fg(th, _pp=pp):
            value, grad, _ = phi_value_and_gradient(
                th, ds_c, h, _pp, labeled=labeled, m=cfg.m)
            return value, grad

        theta, value, iters, status = bfgs_minimize(fg, theta, cfg.bfgs)
        _, grad, inner = phi_value_and_gradient(
            theta, ds_c, h, pp, labeled=labeled, m=cfg.m)
        records.append(StageRecord(
            init_tag=init_tag, alpha=alpha, gamma=gamma, phi=value,
            iterations=iters, grad_norm=float(np.linalg.norm(grad)),
            b_star=inner.b_star,
            is_density_minimizer=inner.is_density_minimizer, status=status))
        thetas.append(theta.copy())
    return records, thetas


def _select_stage(records, thetas):
    """Last stage whose inner minimiser is a minimiser of the projected
    density; falls back to the final stage with the depth forced to zero."""
    for k in range(len(records) - 1, -1, -1):
        if records[k].is_density_minimizer:
            return k, False
    return len(records) - 1, True


def _assemble(ds: Dataset, ds_c: Dataset, mean, h, cfg, init_tag, records,
              thetas, labeled=None):
    k, forced_zero = _select_stage(records, thetas)
    theta = thetas[k]
    v = angles_to_unit_vector(theta)
    b_c = records[k].b_star
    depth = 0.0 if forced_zero else relative_depth(v, b_c, ds_c, h, cfg.m)
    hp = Hyperplane(v, b_c + float(v @ mean))
    kde = ProjectedKde(project(ds_c, v), h)
    dens = density_integral(kde, b_c)
    labels = partition(ds, hp)
    labeled_error = None
    if labeled is not None:
        pred = labels[labeled.indices]
        labeled_error = float(np.mean(pred != labeled.labels))
    return MdhResult(
        hyperplane=hp, density_integral=float(dens), relative_depth=depth,
        is_density_minimizer=records[k].is_density_minimizer,
        partition=labels, init_tag=init_tag, trace=tuple(records),
        labeled_error=labeled_error)


def _pick_best(results):
    """Max relative depth; ties go to lower density integral, then to the
    earlier initialisation."""
    best = 0
    for i in range(1, len(results)):
        a, b = results[i], results[best]
        if (a.relative_depth, -a.density_integral) \
                > (b.relative_depth, -b.density_integral):
            best = i
    return results[best]


def _check_nondegenerate(ds_c: Dataset):
    if np.all(ds_c.rows.std(axis=0) == 0.0):
        raise DegenerateDataError("dataset has zero variance")


def mdp2_cluster(ds: Dataset, cfg: MdhConfig = MdhConfig()) -> MdhResult:
    """Minimum density projection pursuit for clustering.

    Runs warm-started BFGS over the increasing alpha schedule for each
    configured initialisation, keeps the last stage whose solution is a
    minimiser of the projected density, and returns the initialisation with
    the largest relative depth.  The reported hyperplane is in the original
    (uncentered) coordinates.
    """
    if ds.n < 4:
        raise ValueError("need at least 4 rows")
    ds_c, mean = center(ds)
    _check_nondegenerate(ds_c)
    h = cfg.h if cfg.h is not None else default_bandwidth(ds_c)
    if h <= 0.0:
        raise ValueError("bandwidth must be positive")
    rng = np.random.default_rng(cfg.seed)
    stages = [(a, 0.0) for a in cfg.alpha_schedule]
    results = []
    for tag, v0 in _initial_directions(ds_c, cfg.inits, rng):
        theta0 = unit_vector_to_angles(v0)
        records, thetas = _run_anneal(ds_c, h, cfg, tag, theta0, stages, None)
        results.append(_assemble(ds, ds_c, mean, h, cfg, tag, records, thetas))
    return _pick_best(results)


_SVM_ITERS = 10_000


def train_init_svm(ds: Dataset, labeled: LabeledSubset):
    """Direction of a linear soft-margin classifier on the labelled rows.

    Deterministic full-batch subgradient descent on the hinge loss with
    L2 regularisation 1/l, zero initialisation, step 1/(lambda*(t+1)).
    Falls back to the first principal component when only one class is
    labelled.  Returns a unit vector.
    """
    v, _ = _svm_direction(ds, labeled)
    return v


def _svm_direction(ds: Dataset, labeled: LabeledSubset):
    y = labeled.labels.astype(float)
    if len(np.unique(y)) < 2:
        return principal_components(ds, 1)[0][:, 0], True
    x = ds.rows[labeled.indices]
    ell = len(y)
    lam = 1.0 / ell
    w = np.zeros(ds.d)
    bias = 0.0
    for t in range(_SVM_ITERS):
        marg = y * (x @ w + bias)
        viol = marg < 1.0
        gw = lam * w - (y[viol, None] * x[viol]).sum(axis=0) / ell
        gb = -(y[viol]).sum() / ell
        step = 1.0 / (lam * (t + 1))
        w -= step * gw
        bias -= step * gb
    norm = np.linalg.norm(w)
    if norm == 0.0:
        return principal_components(ds, 1)[0][:, 0], True
    return w / norm, False


def mdp2_ssc(ds: Dataset, labeled: LabeledSubset,
             cfg: MdhConfig = MdhConfig()) -> MdhResult:
    """Minimum density projection pursuit with partial labels.

    Candidate starts are the first two principal components and the
    labelled-only linear classifier direction; the one with the lowest
    objective at the first (gamma, alpha) stage wins.  The full alpha
    schedule runs at the smallest gamma, then the remaining gamma stages run
    at alpha_max, all warm-started.
    """
    if ds.n < 4:
        raise ValueError("need at least 4 rows")
    if labeled is None or labeled.size < 1:
        raise ValueError("semi-supervised run needs labelled rows")
    if not cfg.gamma_schedule:
        raise ValueError("gamma schedule is empty")
    if max(cfg.gamma_schedule) == 0.0:
        # all-zero label weight: identical to the clustering driver
        res = mdp2_cluster(ds, cfg)
        pred = res.partition[labeled.indices]
        return replace(res, labeled_error=float(np.mean(pred != labeled.labels)))
    ds_c, mean = center(ds)
    _check_nondegenerate(ds_c)
    h = cfg.h if cfg.h is not None else default_bandwidth(ds_c)
    labeled_c = labeled  # indices refer to rows; centering keeps them valid
    rng = np.random.default_rng(cfg.seed)
    tags = cfg.inits if cfg.inits != ("pc1", "pc2") else ("pc1", "pc2", "svm")
    candidates = _initial_directions(ds_c, tags, rng, labeled_c)
    L = lipschitz_bound(h)
    gamma0 = cfg.gamma_schedule[0]
    pp0 = PenaltyParams(alpha=cfg.alpha_schedule[0], eta=cfg.eta, eps=cfg.eps,
                        L=L, gamma=gamma0)
    scored = []
    for tag, v0 in candidates:
        theta0 = unit_vector_to_angles(v0)
        value, _, _ = phi_value_and_gradient(theta0, ds_c, h, pp0,
                                             labeled=labeled_c, m=cfg.m)
        scored.append((value, tag, theta0))
    scored.sort(key=lambda item: item[0])
    _, tag, theta0 = scored[0]
    stages = [(a, gamma0) for a in cfg.alpha_schedule]
    stages += [(cfg.alpha_max, g) for g in cfg.gamma_schedule[1:]]
    records, thetas = _run_anneal(ds_c, h, cfg, tag, theta0, stages, labeled_c)
    return _assemble(ds, ds_c, mean, h, cfg, tag, records, thetas,
                     labeled=labeled_c)
