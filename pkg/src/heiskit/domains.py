"""Measurable sets as indicator oracles and intrinsic Lipschitz graphs.

A domain oracle is just a deterministic, vectorised indicator function with a
label.  Intrinsic graphs are given by a parametrising function phi(y, t) over
the canonical vertical plane (the (y, t)-plane); their super-graphs are the
open sets {x > phi(proj_vertical(x, y, t))}.  Surface sampling realises the
graph surface measure up to one global multiplicative constant via the area
formula weight sqrt(1 + grad^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import core
from .core import Ball, as_points, box_norm, dist, embed_vertical, inv, mul, proj_vertical
from .quadrature import _mc_chunks

__all__ = [
    "DomainOracle",
    "IntrinsicGraph",
    "WeightedSample",
    "Rect",
    "graph_map",
    "intrinsic_gradient",
    "normal_nu",
    "normal_vector",
    "surface_sample",
    "region_for_ball",
    "regularity_check",
    "flat",
    "euclidean_lift",
    "vertical_holder",
    "slab",
    "parse_domain",
    "complement",
    "transform",
    "intrinsic_lipschitz_ratio",
]


@dataclass
class DomainOracle:
    """A measurable set, exposed through its indicator function.

    indicator maps an (..., 3) point array to {0, 1} values (any dtype that
    casts to float) and must be deterministic.
    """

    indicator: Callable[[np.ndarray], np.ndarray]
    label: str

    def __call__(self, p) -> np.ndarray:
        return np.asarray(self.indicator(as_points(p)), dtype=float)


def complement(omega: DomainOracle) -> DomainOracle:
    return DomainOracle(lambda p: 1.0 - np.asarray(omega.indicator(p), dtype=float),
                        label=f"complement({omega.label})")


def transform(omega: DomainOracle, q=None, lam: float = 1.0) -> DomainOracle:
    """Oracle of the transformed set dilate(lam, q * Omega)."""
    q = core.point(0.0, 0.0, 0.0) if q is None else as_points(q)
    lam = float(lam)
    if lam <= 0.0:
        raise ValueError("dilation factor must be positive")
    qi = inv(q)

    def indicator(p):
        return omega.indicator(mul(qi, core.dilate(1.0 / lam, p)))

    return DomainOracle(indicator, label=f"moved({omega.label})")


@dataclass
class IntrinsicGraph:
    """Graph data for phi: (y, t) -> x over the canonical vertical plane.

    phi must be vectorised (arrays in, array out).  lip_bound is an asserted
    metadata bound on the intrinsic Lipschitz constant, not a computed one.
    holder, when present, is a pair (H, tau) asserting vertical Hoelder
    regularity with exponent (1 + tau)/2 at small gaps and (1 - tau)/2 at
    large gaps, both with constant H.
    """

    phi: Callable[[np.ndarray, np.ndarray], np.ndarray]
    lip_bound: float = 0.0
    holder: Optional[tuple[float, float]] = None
    label: str = "graph"

    def indicator(self, p) -> np.ndarray:
        """Super-graph indicator; the graph itself (x == phi) is excluded."""
        p = as_points(p)
        w = proj_vertical(p)
        return (p[..., 0] > self.phi(w[..., 0], w[..., 1])).astype(float)

    def __call__(self, p) -> np.ndarray:
        return self.indicator(p)

    def domain(self) -> DomainOracle:
        return DomainOracle(self.indicator, label=self.label)

    def subgraph_domain(self) -> DomainOracle:
        def indicator(p):
            p = as_points(p)
            w = proj_vertical(p)
            return (p[..., 0] < self.phi(w[..., 0], w[..., 1])).astype(float)

        return DomainOracle(indicator, label=f"below({self.label})")


def graph_map(g: IntrinsicGraph, w) -> np.ndarray:
    """Graph point (0, y, t) * (phi(y, t), 0, 0) for plane coordinates w."""
    w = np.asarray(w, dtype=float)
    val = np.asarray(g.phi(w[..., 0], w[..., 1]), dtype=float)
    zeros = np.zeros_like(val)
    return mul(embed_vertical(w), np.stack((val, zeros, zeros), axis=-1))


def intrinsic_gradient(g: IntrinsicGraph, w, h: float = 1e-5) -> np.ndarray:
    """Gradient of phi along its own graph flow, d_y phi + phi * d_t phi.

    Central differences with step h in y; the t step is scaled by
    max(1, |phi|) and Richardson-extrapolated, since the flow moves in t at
    speed phi.
    """
    if h <= 0:
        raise ValueError("finite-difference step must be positive")
    w = np.asarray(w, dtype=float)
    y, t = w[..., 0], w[..., 1]
    val = np.asarray(g.phi(y, t), dtype=float)
    dy = (g.phi(y + h, t) - g.phi(y - h, t)) / (2.0 * h)
    ht = h * np.maximum(1.0, np.abs(val))
    d1 = (g.phi(y, t + ht) - g.phi(y, t - ht)) / (2.0 * ht)
    d2 = (g.phi(y, t + 0.5 * ht) - g.phi(y, t - 0.5 * ht)) / ht
    out = dy + val * (4.0 * d2 - d1) / 3.0
    if not np.all(np.isfinite(out)):
        bad = np.argwhere(~np.isfinite(np.atleast_1d(out)))[0]
        raise ValueError(f"non-finite graph values near plane point index {bad.tolist()}")
    return out


def normal_nu(g: IntrinsicGraph, w, h: float = 1e-5) -> np.ndarray:
    """Unit complex normal nu_1 + i nu_2 of the super-graph at graph points,

    nu_1 = 1/sqrt(1 + grad^2), nu_2 = -grad/sqrt(1 + grad^2).
    """
    grad = intrinsic_gradient(g, w, h)
    den = np.sqrt(1.0 + grad * grad)
    return (1.0 / den) + 1j * (-grad / den)


def normal_vector(g: IntrinsicGraph, w, h: float = 1e-5) -> np.ndarray:
    """Same normal as :func:`normal_nu` but as a real 2-vector field."""
    nu = normal_nu(g, w, h)
    return np.stack((nu.real, nu.imag), axis=-1)


@dataclass(frozen=True)
class Rect:
    """Axis-parallel rectangle in the (y, t) parameter plane."""

    y0: float
    y1: float
    t0: float
    t1: float

    def __post_init__(self):
        if not (self.y0 < self.y1 and self.t0 < self.t1):
            raise ValueError("rectangle must have positive extent")

    @property
    def area(self) -> float:
        return (self.y1 - self.y0) * (self.t1 - self.t0)

    def contains(self, other: "Rect") -> bool:
        return (
            self.y0 <= other.y0
            and other.y1 <= self.y1
            and self.t0 <= other.t0
            and other.t1 <= self.t1
        )

    def contains_w(self, w: np.ndarray) -> np.ndarray:
        """Membership mask for (..., 2) plane coordinates."""
        w = np.asarray(w, dtype=float)
        return (
            (w[..., 0] >= self.y0)
            & (w[..., 0] <= self.y1)
            & (w[..., 1] >= self.t0)
            & (w[..., 1] <= self.t1)
        )


def region_for_ball(ball: Ball, pad: float = 0.05) -> Rect:
    """Rectangle covering the vertical projections of every point of the ball.

    For q in B(c, rho) write q = c * m with box_norm(m) <= rho.  Then the
    (y, t)-plane projection satisfies |y - c_y| <= rho and

        t_w = (c_t + c_x c_y / 2) + m_t + c_x m_y + m_x m_y / 2,

    so |t_w - t_w(c)| <= rho^2/4 + |c_x| rho + rho^2/4.  The bound is exact,
    the pad only adds slack against boundary effects downstream.
    """
    cx, cy, ct = (float(v) for v in ball.center)
    rho = ball.radius
    dt = 0.5 * rho**2 + abs(cx) * rho
    wt = ct + 0.5 * cx * cy
    py = pad * rho
    pt = pad * dt
    return Rect(cy - rho - py, cy + rho + py, wt - dt - pt, wt + dt + pt)


@dataclass
class WeightedSample:
    """Monte-Carlo realisation of the graph surface measure over a region.

    points are the graph points Phi(w_i); weights are
    sqrt(1 + grad(w_i)^2) * area(region) / n, so that sums of weights
    approximate the surface measure of the sampled patch up to one global
    constant shared by all samples.
    """

    w: np.ndarray
    points: np.ndarray
    weights: np.ndarray
    region: Optional[Rect]
    seed: int

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def total_weight(self) -> float:
        return float(self.weights.sum())

    def in_ball(self, ball: Ball) -> np.ndarray:
        return dist(self.points, ball.center) <= ball.radius


def surface_sample(g: IntrinsicGraph, region: Rect, n: int, seed: int) -> WeightedSample:
    """Seeded uniform sample of the region, pushed to the graph with area weights.

    Chunked sub-streams keyed by (seed, chunk) keep the result byte-identical
    regardless of how the chunks are scheduled.
    """
    if n < 1:
        raise ValueError("sample count must be >= 1")
    if seed < 0:
        raise ValueError("seed must be a non-negative integer")
    ws, pts, wts = [], [], []
    base = n  # weights use the requested count; chunking is an implementation detail
    for i, size in _mc_chunks(n):
        rng = np.random.default_rng([seed, i])
        y = region.y0 + rng.random(size) * (region.y1 - region.y0)
        t = region.t0 + rng.random(size) * (region.t1 - region.t0)
        w = np.stack((y, t), axis=-1)
        grad = intrinsic_gradient(g, w)
        ws.append(w)
        pts.append(graph_map(g, w))
        wts.append(np.sqrt(1.0 + grad * grad) * (region.area / base))
    return WeightedSample(
        w=np.concatenate(ws),
        points=np.concatenate(pts),
        weights=np.concatenate(wts),
        region=region,
        seed=seed,
    )


def regularity_check(
    g: IntrinsicGraph,
    p,
    radii,
    sample: Optional[WeightedSample] = None,
    n: int = 200_000,
    seed: int = 0,
) -> list[tuple[float, float, float]]:
    """Surface-measure density ratios (r, mu(B(p, r))/r^3, stderr).

    The sampled region must cover the largest ball; if an explicit sample is
    passed with a region that does not, this is an error.
    """
    p = as_points(p)
    radii = sorted(float(r) for r in radii)
    if not radii:
        return []
    needed = region_for_ball(Ball(p, radii[-1]))
    if sample is None:
        sample = surface_sample(g, needed, n, seed)
    elif sample.region is not None and not sample.region.contains(
        region_for_ball(Ball(p, radii[-1]), pad=0.0)
    ):
        raise ValueError("sampled region too small for the largest radius")
    out = []
    d = dist(sample.points, p)
    m = sample.n
    for r in radii:
        inside = sample.weights * (d <= r)
        total = float(inside.sum())
        var = max(float((inside * inside).sum()) - total**2 / m, 0.0) / max(m - 1, 1)
        se_sum = math.sqrt(var * m)  # stderr of the weight sum, sum = m * mean
        out.append((r, total / r**3, se_sum / r**3))
    return out


# ---------------------------------------------------------------------------
# Built-in families


def flat(theta: float = 0.0, offset: float = 0.0) -> IntrinsicGraph:
    """Vertical half-space bounded by the plane with normal angle theta.

    Representable as a graph over the canonical frame only when the plane is
    not parallel to the x-axis; rotate the configuration otherwise.
    """
    plane = core.VerticalPlane(theta, offset)
    c = math.cos(plane.theta)
    if abs(c) < 1e-9:
        raise ValueError("plane normal orthogonal to the x-axis; rotate the frame first")
    s = math.sin(plane.theta)
    a = -s / c
    b = plane.offset / c

    def phi(y, t):
        return a * np.asarray(y, dtype=float) + b

    return IntrinsicGraph(
        phi,
        lip_bound=abs(a),
        label=f"flat:theta={plane.theta:g},offset={plane.offset:g}",
    )


_PHI0: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "zero": lambda y: np.zeros_like(np.asarray(y, dtype=float)),
    "abs": np.abs,
    "sin": np.sin,
}


def euclidean_lift(phi0, scale: float = 1.0, lip: Optional[float] = None) -> IntrinsicGraph:
    """Graph constant along vertical lines: phi(y, t) = scale * phi0(y).

    phi0 may be a vectorised callable or one of the named profiles
    {zero, abs, sin} (all 1-Lipschitz; lip metadata defaults to |scale|).
    """
    if isinstance(phi0, str):
        if phi0 not in _PHI0:
            raise ValueError(f"unknown lift profile {phi0!r}; known: {sorted(_PHI0)}")
        fn = _PHI0[phi0]
        name = phi0
    else:
        fn = phi0
        name = getattr(phi0, "__name__", "custom")
    scale = float(scale)

    def phi(y, t):
        return scale * np.asarray(fn(np.asarray(y, dtype=float)), dtype=float)

    return IntrinsicGraph(
        phi,
        lip_bound=abs(scale) if lip is None else float(lip),
        label=f"lift:phi0={name},scale={scale:g}",
    )


def vertical_holder(H: float, tau: float) -> IntrinsicGraph:
    """Odd profile in t with two-regime vertical Hoelder control.

    phi(y, t) = H * 2^(-(1+tau)/2) * sgn(t) * |t|^((1+tau)/2)  for |t| <= 1
    and exponent (1-tau)/2 for |t| > 1.  The amplitude factor makes the
    asserted Hoelder constants exact: for an odd power profile with exponent
    a, opposite-sign pairs reach 2^(1-a) times the same-sign constant, so the
    raw |t|^a profile would exceed H.  With the factor, difference quotients
    stay below H * 2^(-tau) at small gaps and exactly H at large gaps.
    """
    H = float(H)
    tau = float(tau)
    if H < 1.0:
        raise ValueError("Hoelder constant must be >= 1")
    if not (0.0 < tau <= 1.0):
        raise ValueError("Hoelder exponent offset tau must lie in (0, 1]")
    a = 0.5 * (1.0 + tau)
    b = 0.5 * (1.0 - tau)
    amp = H * 2.0 ** (-a)

    def phi(y, t):
        t = np.asarray(t, dtype=float)
        at = np.abs(t)
        small = at <= 1.0
        mag = np.where(small, at**a, at**b)
        out = amp * np.sign(t) * mag
        return np.broadcast_to(out, np.broadcast(np.asarray(y, float), t).shape).copy()

    return IntrinsicGraph(
        phi,
        lip_bound=H,
        holder=(H, tau),
        label=f"holder:H={H:g},tau={tau:g}",
    )


def slab(threshold: float = 0.0) -> DomainOracle:
    """Horizontal slab {t > threshold}; maximal vertical oscillation test set."""
    threshold = float(threshold)

    def indicator(p):
        return (as_points(p)[..., 2] > threshold).astype(float)

    return DomainOracle(indicator, label=f"slab:t>{threshold:g}")


def parse_domain(spec: str):
    """Parse the CLI domain mini-language.

    Examples: ``flat:theta=0,offset=0``; ``lift:phi0=abs,scale=0.5``;
    ``holder:H=1,tau=0.5``; ``slab:t>0``.  Returns an IntrinsicGraph for the
    graph families and a DomainOracle for slabs.
    """
    spec = spec.strip()
    name, _, rest = spec.partition(":")
    name = name.strip().lower()
    if name == "slab":
        body = rest.strip().replace(" ", "")
        if not body.startswith("t>"):
            raise ValueError(f"slab spec must look like 'slab:t>0', got {spec!r}")
        return slab(float(body[2:]) if body[2:] else 0.0)

    params: dict[str, str] = {}
    if rest.strip():
        for item in rest.split(","):
            key, eq, value = item.partition("=")
            if not eq:
                raise ValueError(f"malformed domain parameter {item!r} in {spec!r}")
            params[key.strip().lower()] = value.strip()

    def pop_float(keys: tuple[str, ...], default: float) -> float:
        for k in keys:
            if k in params:
                return float(params.pop(k))
        return default

    if name == "flat":
        theta = pop_float(("theta", "θ"), 0.0)
        offset = pop_float(("offset",), 0.0)
    elif name == "lift":
        profile = params.pop("phi0", "abs")
        scale = pop_float(("scale",), 1.0)
    elif name == "holder":
        H = pop_float(("h",), 1.0)
        tau = pop_float(("tau",), 0.5)
    else:
        raise ValueError(f"unknown domain family {name!r} in {spec!r}")
    if params:
        raise ValueError(f"unknown domain parameters {sorted(params)} in {spec!r}")

    if name == "flat":
        return flat(theta, offset)
    if name == "lift":
        return euclidean_lift(profile, scale=scale)
    return vertical_holder(H, tau)


def intrinsic_lipschitz_ratio(
    g: IntrinsicGraph, region: Rect, n_pairs: int = 10_000, seed: int = 0
) -> float:
    """Empirical intrinsic Lipschitz ratio over random pairs in the region.

    Reports max |x-part| / box_norm(vertical part) of Phi(w')^-1 * Phi(w);
    a finite stable value is evidence (not proof) of intrinsic Lipschitz
    regularity.
    """
    rng = np.random.default_rng([seed, 0])
    span_y = region.y1 - region.y0
    span_t = region.t1 - region.t0
    w1 = np.stack(
        (region.y0 + rng.random(n_pairs) * span_y, region.t0 + rng.random(n_pairs) * span_t),
        axis=-1,
    )
    w2 = np.stack(
        (region.y0 + rng.random(n_pairs) * span_y, region.t0 + rng.random(n_pairs) * span_t),
        axis=-1,
    )
    m = mul(inv(graph_map(g, w2)), graph_map(g, w1))
    num = np.abs(m[..., 0])
    den = box_norm(embed_vertical(proj_vertical(m)))
    ok = den > 1e-12
    if not np.any(ok):
        return 0.0
    return float(np.max(num[ok] / den[ok]))
