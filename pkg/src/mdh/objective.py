"""Feasible interval, penalised objectives, the inner one-dimensional
minimisation over the hyperplane offset, and the projection index with its
gradient."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .data_io import Dataset, LabeledSubset
from .geometry import angles_to_unit_vector, spherical_jacobian, project
from .kde1d import ProjectedKde, density_integral, d_integral_db, \
    d_integral_dpoints, find_local_extrema

DEFAULT_ETA = 1e-2
DEFAULT_EPS = 1.0 - 1e-6
DEFAULT_GRID = 256

#: offset refinement stops at this fraction of the search window
TOL_B_FACTOR = 1e-8
#: near-global inner minimisers within this value gap are kept
TOL_TIE_FACTOR = 1e-9
#: b* counts as a density minimiser within this multiple of the offset tol
DENSITY_MIN_TOL_FACTOR = 10.0
#: bisection runs this far below tol_b so the offset derivative residual
#: stays negligible even where the boundary penalty makes the curvature large
REFINE_FACTOR = 1e-6


@dataclass(frozen=True)
class PenaltyParams:
    """Parameters of the penalised density integral.

    alpha scales the feasible interval half-width in units of the projected
    standard deviation; the boundary penalty L/eta^eps * excess^(1+eps) keeps
    minimisers within eta of the interval; gamma weights the label penalty
    (0 for pure clustering).
    """

    alpha: float
    eta: float = DEFAULT_ETA
    eps: float = DEFAULT_EPS
    L: float = 1.0
    gamma: float = 0.0

    def __post_init__(self):
        if self.alpha < 0.0:
            raise ValueError("alpha must be nonnegative")
        if not 0.0 < self.eta < 1.0:
            raise ValueError("eta must lie in (0, 1)")
        if not 0.0 < self.eps < 1.0:
            raise ValueError("eps must lie in (0, 1)")
        if self.L <= 0.0:
            raise ValueError("L must be positive")
        if self.gamma < 0.0:
            raise ValueError("gamma must be nonnegative")

    @property
    def boundary_coeff(self) -> float:
        return self.L / self.eta ** self.eps


@dataclass(frozen=True)
class InnerSolution:
    """Result of minimising the penalised objective over the offset b."""

    b_star: float
    value: float
    minimizer_set: tuple
    is_density_minimizer: bool


def feasible_interval(projections, alpha: float):
    """Interval [mu - alpha*sigma, mu + alpha*sigma] of allowed offsets.

    sigma is the population standard deviation of the projections.
    """
    p = np.asarray(projections, dtype=float)
    mu = float(p.mean())
    sigma = float(p.std())
    return mu - alpha * sigma, mu + alpha * sigma


def _boundary_excess(b, lo: float, hi: float):
    b = np.asarray(b, dtype=float)
    return np.maximum(0.0, np.maximum(lo - b, b - hi))


def _penalized_values(p: np.ndarray, b, h: float, pp: PenaltyParams,
                      labels: LabeledSubset | None = None):
    """Penalised objective at offset(s) b for fixed projections p."""
    kde = ProjectedKde(p, h)
    lo, hi = feasible_interval(p, pp.alpha)
    b_arr = np.asarray(b, dtype=float)
    vals = density_integral(kde, b_arr) \
        + pp.boundary_coeff * _boundary_excess(b_arr, lo, hi) ** (1.0 + pp.eps)
    if labels is not None and pp.gamma > 0.0:
        pl = p[labels.indices]
        y = labels.labels
        viol = np.maximum(0.0, -y * (pl - b_arr[..., None]))
        vals = vals + pp.gamma * (viol ** (1.0 + pp.eps)).sum(axis=-1)
    return vals


def _penalized_derivative(p: np.ndarray, b, h: float, pp: PenaltyParams,
                          labels: LabeledSubset | None = None):
    """Analytic d/db of the penalised objective."""
    kde = ProjectedKde(p, h)
    lo, hi = feasible_interval(p, pp.alpha)
    b_arr = np.asarray(b, dtype=float)
    t = _boundary_excess(b_arr, lo, hi)
    sign = np.where(b_arr > hi, 1.0, np.where(b_arr < lo, -1.0, 0.0))
    der = d_integral_db(kde, b_arr) \
        + pp.boundary_coeff * (1.0 + pp.eps) * t ** pp.eps * sign
    if labels is not None and pp.gamma > 0.0:
        pl = p[labels.indices]
        y = labels.labels
        viol = np.maximum(0.0, -y * (pl - b_arr[..., None]))
        der = der + pp.gamma * (1.0 + pp.eps) * (viol ** pp.eps * y).sum(axis=-1)
    return der


def f_cl(v, b: float, ds: Dataset, h: float, pp: PenaltyParams) -> float:
    """Clustering objective: density integral plus the boundary penalty."""
    return float(_penalized_values(project(ds, v), b, h, pp))


def f_ssc(v, b: float, ds: Dataset, labeled: LabeledSubset, h: float,
          pp: PenaltyParams) -> float:
    """Semi-supervised objective: f_cl plus hinge-style label penalties."""
    if pp.gamma <= 0.0:
        raise ValueError("f_ssc requires gamma > 0")
    return float(_penalized_values(project(ds, v), b, h, pp, labeled))


def _bisect_f_derivative(p, h, pp, labels, a, b, tol):
    fa = _penalized_derivative(p, a, h, pp, labels)
    fb = _penalized_derivative(p, b, h, pp, labels)
    if fa >= 0.0:
        return a
    if fb <= 0.0:
        return b
    while b - a > tol:
        mid = 0.5 * (a + b)
        fm = _penalized_derivative(p, mid, h, pp, labels)
        if fm == 0.0:
            return mid
        if fm < 0.0:
            a = mid
        else:
            b = mid
    return 0.5 * (a + b)


def minimize_over_b(v, ds: Dataset, h: float, pp: PenaltyParams,
                    labeled: LabeledSubset | None = None,
                    m: int = DEFAULT_GRID) -> InnerSolution:
    """Global minimum of the penalised objective over the offset b.

    The search window [min p - eta, max p + eta] contains the feasible
    interval of every direction.  The objective is scanned on an m-point
    grid, every bracketed local minimum is refined by bisection on the
    analytic derivative, near-global minimisers are collected, and the
    smallest offset among them is returned as b_star.
    """
    if m < 32:
        raise ValueError("need m >= 32")
    p = project(ds, v)
    return _minimize_over_b_proj(p, h, pp, labeled, m)


def _minimize_over_b_proj(p: np.ndarray, h: float, pp: PenaltyParams,
                          labeled: LabeledSubset | None,
                          m: int) -> InnerSolution:
    lo_w = float(p.min()) - pp.eta
    hi_w = float(p.max()) + pp.eta
    if hi_w <= lo_w:  # all projections equal and eta degenerate; cannot happen
        lo_w, hi_w = lo_w - 1.0, hi_w + 1.0
    tol_b = TOL_B_FACTOR * (hi_w - lo_w)
    xs = np.linspace(lo_w, hi_w, m)
    fs = _penalized_values(p, xs, h, pp, labeled)

    candidates = []
    if fs[0] < fs[1]:
        candidates.append((xs[0], float(fs[0])))
    if fs[-1] < fs[-2]:
        candidates.append((xs[-1], float(fs[-1])))
    for i in range(1, m - 1):
        if fs[i] < fs[i - 1] and fs[i] <= fs[i + 1]:
            b_ref = _bisect_f_derivative(p, h, pp, labeled, xs[i - 1],
                                         xs[i + 1], tol_b * REFINE_FACTOR)
            candidates.append((b_ref, float(_penalized_values(
                p, b_ref, h, pp, labeled))))
    if not candidates:  # flat objective (degenerate projections)
        b0 = float(p.mean())
        candidates.append((b0, float(_penalized_values(p, b0, h, pp, labeled))))

    gmin = min(val for _, val in candidates)
    tol_tie = TOL_TIE_FACTOR * (1.0 + abs(gmin))
    near = sorted(b for b, val in candidates if val <= gmin + tol_tie)
    # dedupe refinements that landed on the same minimiser
    dedup = [near[0]]
    for b in near[1:]:
        if b - dedup[-1] > 2.0 * tol_b:
            dedup.append(b)
    b_star = dedup[0]
    value = float(_penalized_values(p, b_star, h, pp, labeled))

    kde = ProjectedKde(p, h)
    flag_tol = DENSITY_MIN_TOL_FACTOR * tol_b
    is_min = False
    for loc, _, kind in find_local_extrema(kde, lo_w, hi_w, max(m, 16)):
        if kind == "min" and abs(loc - b_star) <= flag_tol:
            is_min = True
            break
    return InnerSolution(b_star, value, tuple(dedup), is_min)


def _dp_f(p: np.ndarray, b: float, h: float, pp: PenaltyParams,
          labels: LabeledSubset | None) -> np.ndarray:
    """Gradient of the penalised objective with respect to the projections."""
    kde = ProjectedKde(p, h)
    g = d_integral_dpoints(kde, b)
    lo, hi = feasible_interval(p, pp.alpha)
    n = len(p)
    if b > hi or b < lo:
        t = (lo - b) if b < lo else (b - hi)
        mu = p.mean()
        sigma = p.std()
        dmu = np.full(n, 1.0 / n)
        dsigma = (p - mu) / (n * sigma) if sigma > 0.0 else np.zeros(n)
        # excess depends on the interval endpoints through mu and sigma
        dt = (dmu - pp.alpha * dsigma) if b < lo else (-dmu - pp.alpha * dsigma)
        g = g + pp.boundary_coeff * (1.0 + pp.eps) * t ** pp.eps * dt
    if labels is not None and pp.gamma > 0.0:
        pl = p[labels.indices]
        y = labels.labels
        viol = np.maximum(0.0, -y * (pl - b))
        contrib = -pp.gamma * (1.0 + pp.eps) * viol ** pp.eps * y
        g = g.copy()
        np.add.at(g, labels.indices, contrib)
    return g


def phi_value_and_gradient(theta, ds: Dataset, h: float, pp: PenaltyParams,
                           labeled: LabeledSubset | None = None,
                           m: int = DEFAULT_GRID, step_dir=None):
    """Projection index and its gradient with respect to the angles.

    Returns ``(value, grad, inner)``.  The gradient follows the chain rule
    through the projections; the inner minimiser b* contributes nothing to
    first order because the offset derivative vanishes there.  With several
    near-global inner minimisers, the representative is the one minimising
    the directional derivative along ``step_dir`` when given, else the
    smallest offset.
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    v = angles_to_unit_vector(theta)
    p = project(ds, v)
    inner = _minimize_over_b_proj(p, h, pp, labeled, m)
    jac = spherical_jacobian(theta)

    def grad_at(b):
        return (_dp_f(p, b, h, pp, labeled) @ ds.rows) @ jac

    if len(inner.minimizer_set) > 1 and step_dir is not None:
        step_dir = np.asarray(step_dir, dtype=float)
        grads = [grad_at(b) for b in inner.minimizer_set]
        k = int(np.argmin([g @ step_dir for g in grads]))
        grad = grads[k]
    else:
        grad = grad_at(inner.b_star)
    return inner.value, grad, inner
