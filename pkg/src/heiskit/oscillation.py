"""Vertical perimeter, vertical oscillation, and derived scale functionals.

The vertical perimeter of a set Omega relative to a window U at scale s is
the Lebesgue measure, within U, of the points whose membership in Omega
changes under the vertical shift p -> p * (0, 0, s^2).  The oscillation
coefficient of a ball averages the perimeter over shift scales s in (0, r]
and normalises by r^4, which makes it invariant under left translations and
dilations of the whole configuration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


import numpy as np

from .core import Ball, as_points
from .quadrature import Estimate, SampleConfig, integrate_ball

__all__ = [
    "ScaleGrid",
    "vertical_perimeter",
    "perimeter_profile",
    "osc",
    "LpPerimeter",
    "lp_vertical_perimeter",
    "DiniProfile",
    "dini_integral",
    "DtBoundResult",
    "dt_bound_check",
]


@dataclass(frozen=True)
class ScaleGrid:
    """Geometric grid s_k = s_min * 2^(k / per_octave), truncated at s_max.

    Discretises logarithmic integrals ds/s and dr/r with node weight
    log(2)/per_octave.
    """

    s_min: float
    s_max: float
    per_octave: int = 4

    def __post_init__(self):
        if not (0.0 < self.s_min < self.s_max):
            raise ValueError("scale grid needs 0 < s_min < s_max")
        if self.per_octave < 1:
            raise ValueError("per_octave must be >= 1")

    def scales(self) -> np.ndarray:
        n = int(math.floor(self.per_octave * math.log2(self.s_max / self.s_min) + 1e-9)) + 1
        return self.s_min * 2.0 ** (np.arange(n) / self.per_octave)

    @property
    def dlog(self) -> float:
        return math.log(2.0) / self.per_octave


def _vertical_shift(points: np.ndarray, s2: float) -> np.ndarray:
    # p * (0, 0, s^2) = (x, y, t + s^2): right translation by a vertical
    # element is a plain Euclidean shift in t.
    out = points.copy()
    out[:, 2] += s2
    return out


def vertical_perimeter(omega, window: Ball, s: float, cfg: SampleConfig) -> Estimate:
    """Measure in the window of {chi(p) != chi(p * (0, 0, s^2))}.

    The value lies in [0, vol(window)]; it vanishes identically for sets
    that are unions of vertical lines.
    """
    if s <= 0.0:
        raise ValueError("shift scale must be positive")
    s2 = s * s

    def f(pts):
        return np.abs(omega.indicator(pts) - omega.indicator(_vertical_shift(pts, s2)))

    return integrate_ball(f, window, cfg)


def perimeter_profile(
    omega, ball: Ball, cfg: SampleConfig, s_nodes: int = 32
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-scale perimeter v(ball)(s_j) / r^4 at midpoint nodes s_j in (0, r].

    One shared point sample serves every node, so the profile entries are
    correlated but each carries its own Monte-Carlo stderr.  Returns
    (s_nodes array, values, stderrs).
    """
    from .quadrature import sample_ball  # chunked deterministic stream

    r = ball.radius
    mids = (np.arange(s_nodes) + 0.5) * (r / s_nodes)
    sums = np.zeros(s_nodes)
    sqsums = np.zeros(s_nodes)
    count = 0
    # One pass over the shared chunk stream; chunks are consumed in their
    # fixed order, so the profile is deterministic for a given config.
    for pts in sample_ball(ball, cfg):
        base = omega.indicator(pts)
        for j, s in enumerate(mids):
            d = np.abs(base - omega.indicator(_vertical_shift(pts, s * s)))
            sums[j] += d.sum()
            sqsums[j] += (d * d).sum()
        count += len(pts)

    vol = ball.volume
    mean = sums / count
    var = np.maximum(sqsums - sums * sums / count, 0.0) / max(count - 1, 1)
    values = vol * mean / r**4
    stderrs = vol * np.sqrt(var / count) / r**4
    if cfg.method == "stratified-grid":
        stderrs = np.zeros_like(stderrs)
    return mids, values, stderrs


def osc(omega, ball: Ball, cfg: SampleConfig, s_nodes: int = 32) -> Estimate:
    """Oscillation coefficient: average over s in (0, r] of v(ball)(s)/r^4.

    Midpoint nodes in s (the perimeter is bounded and continuous in s for
    indicator oracles).  The estimate is bounded by pi/2 by construction,
    since the integrand never exceeds the unit indicator difference.
    """
    if s_nodes < 8:
        raise ValueError("need at least 8 scale nodes")
    r = ball.radius
    mids = (np.arange(s_nodes) + 0.5) * (r / s_nodes)

    def f(pts):
        base = omega.indicator(pts)
        acc = np.zeros(len(pts))
        for s in mids:
            acc += np.abs(base - omega.indicator(_vertical_shift(pts, s * s)))
        return acc / s_nodes

    est = integrate_ball(f, ball, cfg)
    return Estimate(est.value / r**4, est.stderr / r**4, est.n)


@dataclass(frozen=True)
class LpPerimeter:
    """Grid value of the L^p vertical perimeter plus its coarse tail bound.

    value approximates ( integral over [s_min, s_max] of (v(s)/s)^p ds/s )^(1/p);
    tail_bound bounds the missing s > s_max part using v <= vol(window).
    Per-scale perimeters (independent sub-streams per scale) are kept for
    cross-checks.
    """

    value: float
    stderr: float
    n: int
    tail_bound: float
    scales: np.ndarray
    v_values: np.ndarray
    v_stderrs: np.ndarray


def lp_vertical_perimeter(
    omega, window: Ball, p_exp: float, grid: ScaleGrid, cfg: SampleConfig
) -> LpPerimeter:
    """Discretised L^p norm (in ds/s) of s -> v(window)(s)/s over the grid."""
    p_exp = float(p_exp)
    if p_exp < 1.0:
        raise ValueError("p exponent must be >= 1")
    scales = grid.scales()
    vals = np.empty(len(scales))
    errs = np.empty(len(scales))
    for k, s in enumerate(scales):
        est = vertical_perimeter(omega, window, s, cfg.child(k))
        vals[k] = est.value
        errs[k] = est.stderr
    ratios = vals / scales
    total = float(np.sum(ratios**p_exp) * grid.dlog)
    value = total ** (1.0 / p_exp)
    # First-order error propagation through the p-norm; the per-scale
    # estimates use independent sub-streams, so add in quadrature.
    if value > 0.0:
        grads = value ** (1.0 - p_exp) * ratios ** (p_exp - 1.0) * grid.dlog / scales
        stderr = float(np.sqrt(np.sum((grads * errs) ** 2)))
    else:
        stderr = float(np.sqrt(np.sum((errs / scales) ** 2)) * grid.dlog ** (1.0 / p_exp))
    tail = window.volume * (grid.s_max ** -1.0) * p_exp ** (-1.0 / p_exp)
    return LpPerimeter(
        value=value,
        stderr=stderr,
        n=int(cfg.n) * len(scales),
        tail_bound=tail,
        scales=scales,
        v_values=vals,
        v_stderrs=errs,
    )


@dataclass(frozen=True)
class DiniProfile:
    """Truncated logarithmic integral of the oscillation over ball radii."""

    value: float
    stderr: float
    radii: np.ndarray
    osc_values: np.ndarray
    osc_stderrs: np.ndarray
    dlog: float

    def log_profile(self) -> list[tuple[float, float]]:
        """(log r, log osc) pairs, dropping non-positive entries."""
        out = []
        for r, v in zip(self.radii, self.osc_values):
            if v > 0.0:
                out.append((math.log(r), math.log(v)))
        return out


def dini_integral(
    omega, p0, grid: ScaleGrid, cfg: SampleConfig, s_nodes: int = 16
) -> DiniProfile:
    """Geometric-grid sum of osc(B(p0, r_k)) * dlog r, with the profile kept.

    The profile is what decay-slope fits consume; the sum itself is the
    truncated version of the logarithmic Dini integral and is monotone
    nondecreasing in the grid span since every term is nonnegative.
    """
    p0 = as_points(p0)
    radii = grid.scales()
    vals = np.empty(len(radii))
    errs = np.empty(len(radii))
    for k, r in enumerate(radii):
        est = osc(omega, Ball(p0, r), cfg.child(k), s_nodes=s_nodes)
        vals[k] = est.value
        errs[k] = est.stderr
    total = float(np.sum(vals) * grid.dlog)
    stderr = float(np.sqrt(np.sum(errs**2)) * grid.dlog)
    return DiniProfile(total, stderr, radii, vals, errs, grid.dlog)


@dataclass(frozen=True)
class DtBoundResult:
    lhs: Estimate
    dt_sup: float
    osc_big: Estimate
    bound: float
    ratio: float


def dt_bound_check(omega, ball: Ball, psi, cfg: SampleConfig) -> DtBoundResult:
    """Both sides of the t-derivative bound for bumps supported in the ball.

    lhs = | r^-4 * integral over Omega of dt(psi) |, rhs building blocks are
    the closed-form sup of |dt psi| and the oscillation of the ten-fold ball.
    The support of psi is probe-checked against the ball.
    """
    from . import riesz  # local import; riesz depends on domains, not on us

    if not isinstance(psi, riesz.BumpSpec):
        raise TypeError("psi must be a bump specification")
    if psi.kind != "psi_ball":
        raise ValueError("the t-derivative bound applies to interior ball bumps")
    if not np.allclose(psi.center, ball.center) or psi.radius > ball.radius * (1 + 1e-12):
        raise ValueError("bump support must sit inside the integration ball")
    # probe the sandwich: psi vanishes on a shell just outside its ball
    probe = ball.center + np.array([[1.0001 * psi.radius, 0.0, 0.0]])
    if float(riesz.bump(psi, probe)[0]) != 0.0:
        raise ValueError("bump support leaks outside its declared ball")

    r = ball.radius

    def f(pts):
        return omega.indicator(pts) * riesz.bump_dt(psi, pts)

    inner = integrate_ball(f, ball, cfg)
    lhs = Estimate(abs(inner.value) / r**4, inner.stderr / r**4, inner.n)
    dt_sup = riesz.bump_dt_sup(psi)
    big = osc(omega, Ball(ball.center, 10.0 * r), cfg.child(10), s_nodes=16)
    bound = dt_sup * big.value
    if bound == 0.0:
        # degenerate configurations: call the ratio 0 when the left side is
        # a statistical zero, infinite when it is significantly nonzero
        ratio = 0.0 if lhs.value <= 3.0 * lhs.stderr else math.inf
    else:
        ratio = lhs.value / bound
    return DtBoundResult(lhs=lhs, dt_sup=dt_sup, osc_big=big, bound=bound, ratio=ratio)
