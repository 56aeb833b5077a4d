"""Vertical beta numbers: best approximation of a set by vertical planes.

The distance from a point to a vertical plane depends only on the (x, y)
part, so the plane fit is a weighted one-dimensional location problem per
normal direction: Chebyshev midpoint for the sup norm, weighted median for
L^1, weighted mean for L^2, and a convex 1-d solve otherwise.  The direction
search is a coarse grid over [0, pi) followed by local refinement; the
objective is piecewise smooth in the angle with few local minima at the
sample sizes used here.  Ties are broken towards the smallest angle, then
the smallest |offset|; only the objective value is meant for assertions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .core import Ball, VerticalPlane, as_points
from .domains import IntrinsicGraph, WeightedSample, region_for_ball, surface_sample
from .oscillation import LpPerimeter, ScaleGrid, lp_vertical_perimeter, osc
from .quadrature import Estimate, SampleConfig

__all__ = [
    "BetaResult",
    "beta_inf",
    "beta_p",
    "OscBetaComparison",
    "osc_beta_compare",
    "PerimeterBetaBound",
    "perimeter_beta_bound",
    "CarlesonScan",
    "carleson_scan",
]


@dataclass(frozen=True)
class BetaResult:
    value: float
    plane: VerticalPlane
    p_exp: float  # math.inf for the sup-based number


def _in_ball(sample: WeightedSample, ball: Ball) -> tuple[np.ndarray, np.ndarray]:
    mask = sample.in_ball(ball)
    if not np.any(mask):
        raise ValueError("no sample points in the ball")
    return sample.points[mask], sample.weights[mask]


def _thin(points: np.ndarray, weights: np.ndarray, max_points: int) -> tuple[np.ndarray, np.ndarray]:
    """Weight-preserving decimation by a fixed stride; unbiased and seed-free."""
    n = len(points)
    if n <= max_points:
        return points, weights
    stride = math.ceil(n / max_points)
    return points[::stride], weights[::stride] * (n / len(points[::stride]))


def _weighted_median(a: np.ndarray, w: np.ndarray) -> float:
    order = np.argsort(a, kind="stable")
    cw = np.cumsum(w[order])
    k = int(np.searchsorted(cw, 0.5 * cw[-1]))
    return float(a[order[min(k, len(a) - 1)]])


def _offset_solve(a: np.ndarray, w: np.ndarray, p_exp: float) -> tuple[float, float]:
    """Best offset and the attained sum(w * |a - c|^p) for one direction."""
    if math.isinf(p_exp):
        lo, hi = float(a.min()), float(a.max())
        c = 0.5 * (lo + hi)
        return c, 0.5 * (hi - lo)
    if p_exp == 1.0:
        c = _weighted_median(a, w)
    elif p_exp == 2.0:
        c = float(np.average(a, weights=w))
    else:
        lo, hi = float(a.min()), float(a.max())
        if lo == hi:
            return lo, 0.0
        res = minimize_scalar(
            lambda c: float(np.sum(w * np.abs(a - c) ** p_exp)),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-10 * max(1.0, hi - lo)},
        )
        c = float(res.x)
    return c, float(np.sum(w * np.abs(a - c) ** p_exp))


def _direction_objective(z: np.ndarray, w: np.ndarray, theta: float, p_exp: float) -> tuple[float, float]:
    a = z[:, 0] * math.cos(theta) + z[:, 1] * math.sin(theta)
    return _offset_solve(a, w, p_exp)


def _plane_search(
    z: np.ndarray, w: np.ndarray, p_exp: float, theta_nodes: int, refine: bool
) -> tuple[float, float, float]:
    """(theta, offset, raw objective) minimising the directional fit."""
    thetas = np.arange(theta_nodes) * (math.pi / theta_nodes)
    objs = np.empty(theta_nodes)
    offs = np.empty(theta_nodes)
    for i, th in enumerate(thetas):
        offs[i], objs[i] = _direction_objective(z, w, th, p_exp)
    best = int(np.argmin(objs))  # first minimum: smallest-theta tie break
    theta, offset, obj = float(thetas[best]), float(offs[best]), float(objs[best])
    if refine and theta_nodes > 2:
        step = math.pi / theta_nodes
        res = minimize_scalar(
            lambda th: _direction_objective(z, w, th, p_exp)[1],
            bounds=(theta - step, theta + step),
            method="bounded",
            options={"xatol": 1e-9},
        )
        if res.fun < obj:
            theta = float(res.x)
            offset, obj = _direction_objective(z, w, theta, p_exp)
    return theta, offset, obj


def beta_inf(
    sample: WeightedSample, ball: Ball, theta_nodes: int = 180, refine: bool = True
) -> BetaResult:
    """Sup-based vertical beta number of the sampled set inside the ball."""
    pts, w = _in_ball(sample, ball)
    theta, offset, obj = _plane_search(pts[:, :2], w, math.inf, theta_nodes, refine)
    return BetaResult(obj / ball.radius, VerticalPlane(theta, offset), math.inf)


def beta_p(
    sample: WeightedSample,
    ball: Ball,
    p_exp: float,
    normalization: str = "r3",
    theta_nodes: int = 180,
    refine: bool = True,
    max_points: int = 30_000,
) -> BetaResult:
    """L^p vertical beta number over the weighted sample inside the ball.

    normalization "r3" divides the p-th moment by r^3 (the regular-measure
    convention); "mass" divides by the total in-ball weight, which turns the
    number into a weighted power mean and makes the family exactly monotone
    in p on a fixed sample.
    """
    p_exp = float(p_exp)
    if p_exp < 1.0:
        raise ValueError("p exponent must be >= 1")
    if normalization not in ("r3", "mass"):
        raise ValueError(f"unknown normalization {normalization!r}")
    pts, w = _in_ball(sample, ball)
    if float(w.sum()) <= 0.0:
        raise ValueError("zero total weight in the ball")
    pts, w = _thin(pts, w, max_points)
    r = ball.radius
    theta, offset, obj = _plane_search(pts[:, :2], w, p_exp, theta_nodes, refine)
    den = r**3 if normalization == "r3" else float(w.sum())
    value = (obj / (r**p_exp) / den) ** (1.0 / p_exp)
    return BetaResult(value, VerticalPlane(theta, offset), p_exp)


@dataclass(frozen=True)
class OscBetaComparison:
    osc: Estimate
    beta1: BetaResult
    ratio: float


def osc_beta_compare(
    g: IntrinsicGraph,
    ball: Ball,
    cfg: SampleConfig,
    enlargement: float = 24.0,
    s_nodes: int = 16,
    beta_n: int = 200_000,
) -> OscBetaComparison:
    """Oscillation of the ball against the L^1 beta number of the enlarged ball.

    The enlargement factor defaults to the comparison constant 24 and is
    configurable.  The ratio is defined as 0 when both quantities vanish
    (flat configurations).
    """
    osc_est = osc(g, ball, cfg, s_nodes=s_nodes)
    big = Ball(ball.center, enlargement * ball.radius)
    sample = surface_sample(g, region_for_ball(big), beta_n, seed=cfg.child(7).seed)
    b1 = beta_p(sample, big, 1.0)
    if b1.value == 0.0:
        ratio = 0.0 if osc_est.value == 0.0 else math.inf
    else:
        ratio = osc_est.value / b1.value
    return OscBetaComparison(osc=osc_est, beta1=b1, ratio=ratio)


@dataclass(frozen=True)
class PerimeterBetaBound:
    lhs: LpPerimeter
    rhs: float
    bulk_term: float
    beta_term: float
    ratio: float
    inner_radii: np.ndarray


def perimeter_beta_bound(
    g: IntrinsicGraph,
    window: Ball,
    p_exp: float,
    grid: ScaleGrid,
    cfg: SampleConfig,
    enlargement: float = 24.0,
    n_outer: int = 12,
    beta_n: int = 100_000,
    inner_n: int = 20_000,
    theta_nodes: int = 60,
) -> PerimeterBetaBound:
    """L^p vertical perimeter of the window against its beta-number majorant.

    lhs integrates (v(window)(s)/s)^p over the scale grid.  rhs is
    R^3 plus the surface integral over the enlarged window of the inner
    logarithmic beta integral; the inner radii are the grid scales clipped
    to the window radius, scaled up by the enlargement inside each beta
    ball.  The outer surface integral is evaluated on a deterministic
    decimation of the sampled points.
    """
    R = window.radius
    p0 = window.center
    lhs = lp_vertical_perimeter(g, window, p_exp, grid, cfg)

    inner_radii = np.asarray([r for r in grid.scales() if r <= R * (1 + 1e-12)])
    if len(inner_radii) == 0:
        raise ValueError("scale grid has no nodes at or below the window radius")
    outer_ball = Ball(p0, enlargement * R)
    outer = surface_sample(g, region_for_ball(outer_ball), beta_n, seed=cfg.child(11).seed)
    mask = outer.in_ball(outer_ball)
    if not np.any(mask):
        raise ValueError("no surface points in the enlarged window")
    idx = np.flatnonzero(mask)
    stride = max(1, len(idx) // n_outer)
    sel = idx[::stride][:n_outer]
    # Unbiased surface quadrature: selected points stand in for the whole
    # in-ball population with their weights scaled up accordingly.
    scale_up = len(idx) / len(sel)

    beta_term = 0.0
    for j, i in enumerate(sel):
        q = outer.points[i]
        inner = 0.0
        for k, r in enumerate(inner_radii):
            # Each beta ball gets its own local sample so that small scales
            # stay resolved; seeds are derived deterministically per (q, r).
            bball = Ball(q, enlargement * r)
            local = surface_sample(
                g,
                region_for_ball(bball),
                inner_n,
                seed=cfg.child(100 + j * len(inner_radii) + k).seed,
            )
            b = beta_p(local, bball, p_exp, theta_nodes=theta_nodes, refine=False)
            inner += b.value**p_exp * grid.dlog
        beta_term += outer.weights[i] * scale_up * inner ** (1.0 / p_exp)

    bulk = R**3
    rhs = bulk + beta_term
    return PerimeterBetaBound(
        lhs=lhs,
        rhs=rhs,
        bulk_term=bulk,
        beta_term=beta_term,
        ratio=lhs.value / rhs if rhs > 0 else math.inf,
        inner_radii=inner_radii,
    )


@dataclass(frozen=True)
class CarlesonScan:
    ratio: float
    double_integral: float
    radii: np.ndarray
    n_outer: int
    coefficient: str


def carleson_scan(
    g: IntrinsicGraph,
    p0,
    R: float,
    p_exp: float,
    cfg: SampleConfig,
    coefficient: str = "beta",
    per_octave: int = 1,
    octaves: int = 6,
    n_outer: int = 12,
    outer_n: int = 100_000,
    inner_n: int = 20_000,
    theta_nodes: int = 60,
    osc_nodes: int = 12,
) -> CarlesonScan:
    """Empirical packing ratio of a scale-square double integral against R^3.

    coefficient "beta" integrates beta_1(B(q, r))^p over surface points q in
    B(p0, R) and radii r in a geometric grid up to R; "osc" integrates the
    oscillation coefficient of the super-graph instead.  Inner balls carry
    their own local surface samples so that every octave stays resolved.
    The scan reports the ratio only; no pass/fail judgement is attached,
    since admissible exponents are an open matter.
    """
    p0 = as_points(p0)
    R = float(R)
    radii = ScaleGrid(R * 2.0**-octaves, R, per_octave).scales()
    dlog = math.log(2.0) / per_octave

    window = Ball(p0, R)
    sample = surface_sample(g, region_for_ball(window), outer_n, seed=cfg.child(13).seed)
    mask = sample.in_ball(window)
    if not np.any(mask):
        raise ValueError("no surface points in the scan window")
    idx = np.flatnonzero(mask)
    stride = max(1, len(idx) // n_outer)
    sel = idx[::stride][:n_outer]
    scale_up = len(idx) / len(sel)

    total = 0.0
    for j, i in enumerate(sel):
        q = sample.points[i]
        inner = 0.0
        for k, r in enumerate(radii):
            child = cfg.child(1000 + j * len(radii) + k)
            if coefficient == "beta":
                bball = Ball(q, r)
                local = surface_sample(g, region_for_ball(bball), inner_n, seed=child.seed)
                val = beta_p(local, bball, 1.0, theta_nodes=theta_nodes, refine=False).value
            elif coefficient == "osc":
                val = osc(g, Ball(q, r), child, s_nodes=osc_nodes).value
            else:
                raise ValueError(f"unknown coefficient {coefficient!r}")
            inner += val**p_exp * dlog
        total += sample.weights[i] * scale_up * inner

    return CarlesonScan(
        ratio=total / R**3,
        double_integral=total,
        radii=radii,
        n_outer=len(sel),
        coefficient=coefficient,
    )
