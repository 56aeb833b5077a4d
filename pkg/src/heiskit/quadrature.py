"""Seeded Monte-Carlo and stratified-grid integration over metric balls and boxes.

Determinism contract: every estimate is a pure function of (region, integrand,
SampleConfig).  Samples are generated in fixed-size chunks, chunk i drawing
from an independent stream seeded by (seed, i), and partial results are
reduced in chunk order.  Running chunks in parallel therefore reproduces the
serial result bit for bit; the worker count comes from the HEISKIT_WORKERS
environment variable (default 1).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Iterator

import numpy as np

from .core import Ball, mul

__all__ = [
    "SampleConfig",
    "Estimate",
    "NonFiniteIntegrandError",
    "sample_ball",
    "integrate_ball",
    "integrate_box",
    "integrate_1d",
]

CHUNK = 1 << 16

_MASK63 = (1 << 63) - 1


def _mix(seed: int, k: int) -> int:
    """Derive a child stream seed from (seed, k); splitmix-style hash."""
    h = ((seed + 1) * 0x9E3779B97F4A7C15 + (k + 1) * 0xBF58476D1CE4E5B9) & _MASK63
    h ^= h >> 31
    return (h * 0x94D049BB133111EB) & _MASK63


class NonFiniteIntegrandError(ValueError):
    """Integrand returned nan/inf; carries a diagnostic point."""

    def __init__(self, point: np.ndarray, value: float):
        self.point = point
        self.value = value
        super().__init__(f"non-finite integrand value {value!r} at point {point.tolist()}")


@dataclass(frozen=True)
class SampleConfig:
    """How to draw integration nodes.

    n:      requested sample count (>= 1); stratified-grid mode rounds up
            to the nearest cube.
    seed:   non-negative integer; fully determines the node stream.
    method: "monte-carlo" or "stratified-grid".
    """

    n: int = 200_000
    seed: int = 0
    method: str = "monte-carlo"

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("sample count must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")
        if self.method not in ("monte-carlo", "stratified-grid"):
            raise ValueError(f"unknown sampling method {self.method!r}")

    def child(self, k: int) -> "SampleConfig":
        """Independent sub-stream config for the k-th nested estimate."""
        return replace(self, seed=_mix(self.seed, k))


@dataclass(frozen=True)
class Estimate:
    """A numerical integral with its statistical error.

    stderr is sample standard deviation of the integrand divided by sqrt(n)
    (times the volume normalisation) in monte-carlo mode, and 0 for
    deterministic grid evaluations.
    """

    value: float
    stderr: float
    n: int

    def __post_init__(self):
        if self.stderr < 0.0:
            raise ValueError("stderr must be >= 0")


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("HEISKIT_WORKERS", "1")))
    except ValueError:
        return 1


def _mc_chunks(n: int) -> list[tuple[int, int]]:
    """(chunk index, chunk size) pairs covering n samples."""
    out = []
    i = 0
    remaining = n
    while remaining > 0:
        size = min(CHUNK, remaining)
        out.append((i, size))
        remaining -= size
        i += 1
    return out


def _cylinder_chunk(rng: np.random.Generator, m: int, radius: float) -> np.ndarray:
    """m points uniform w.r.t. Lebesgue measure on B(0, radius).

    The ball is the cylinder {|z| <= r} x {|t| <= r^2/4}, so no rejection is
    needed: draw the disc part in polar coordinates (radius r*sqrt(u) makes
    the areal density uniform) and the t part uniformly on the slab.   Draw
    order (u, angle, t) is fixed; changing it would silently change every
    seeded result.
    """
    u = rng.random(m)
    ang = rng.random(m) * (2.0 * math.pi)
    tt = (rng.random(m) - 0.5) * (0.5 * radius**2)
    rad = radius * np.sqrt(u)
    return np.stack((rad * np.cos(ang), rad * np.sin(ang), tt), axis=-1)


def _grid_axes(n: int) -> int:
    return max(1, math.ceil(round(n ** (1.0 / 3.0), 9)))


def _cylinder_grid(k: int, radius: float) -> np.ndarray:
    """Midpoint grid with k^3 nodes, equidistributed in ball measure.

    The map (u, a, v) -> (r sqrt(u) cos a, r sqrt(u) sin a, v) pushes the
    uniform measure on [0,1] x [0,2pi] x [-r^2/4, r^2/4] to the uniform
    measure on the cylinder, so equal box cells get equal ball measure.
    """
    mid = (np.arange(k) + 0.5) / k
    u, a, v = np.meshgrid(mid, mid * 2.0 * math.pi, (mid - 0.5) * 0.5 * radius**2, indexing="ij")
    rad = radius * np.sqrt(u.ravel())
    return np.stack((rad * np.cos(a.ravel()), rad * np.sin(a.ravel()), v.ravel()), axis=-1)


def sample_ball(ball: Ball, cfg: SampleConfig) -> Iterator[np.ndarray]:
    """Stream of point chunks, uniform on the ball, left-translated to its center.

    Left translations have unit Jacobian, so translating a uniform sample of
    B(0, r) by the center yields a uniform sample of B(center, r).
    """
    if cfg.method == "stratified-grid":
        pts = _cylinder_grid(_grid_axes(cfg.n), ball.radius)
        for i, size in _mc_chunks(len(pts)):
            yield mul(ball.center, pts[i * CHUNK : i * CHUNK + size])
    else:
        for i, size in _mc_chunks(cfg.n):
            rng = np.random.default_rng([cfg.seed, i])
            yield mul(ball.center, _cylinder_chunk(rng, size, ball.radius))


def _reduce_uniform(
    make_chunk: Callable[[int, int], np.ndarray],
    chunks: list[tuple[int, int]],
    f: Callable[[np.ndarray], np.ndarray],
) -> tuple[float, float, int]:
    """Evaluate f over chunks (possibly in parallel) and reduce in chunk order."""

    def one(job: tuple[int, int]) -> tuple[float, float, int]:
        i, size = job
        pts = make_chunk(i, size)
        vals = np.asarray(f(pts), dtype=float)
        if vals.shape != (len(pts),):
            raise ValueError("integrand must map (m, 3) points to (m,) values")
        if not np.all(np.isfinite(vals)):
            bad = int(np.argmax(~np.isfinite(vals)))
            raise NonFiniteIntegrandError(pts[bad], float(vals[bad]))
        return float(vals.sum()), float((vals * vals).sum()), len(pts)

    workers = _workers()
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(one, chunks))
    else:
        parts = [one(c) for c in chunks]

    s = q = 0.0
    n = 0
    for ps, pq, pn in parts:  # fixed order regardless of worker count
        s += ps
        q += pq
        n += pn
    return s, q, n


def _estimate_from_sums(s: float, q: float, n: int, volume: float, deterministic: bool) -> Estimate:
    mean = s / n
    if deterministic or n < 2:
        return Estimate(volume * mean, 0.0, n)
    var = max(q - s * s / n, 0.0) / (n - 1)
    return Estimate(volume * mean, volume * math.sqrt(var / n), n)


def integrate_ball(f: Callable[[np.ndarray], np.ndarray], ball: Ball, cfg: SampleConfig) -> Estimate:
    """Estimate of the Lebesgue integral of f over the ball.

    f must be bounded on the ball and vectorised: it receives an (m, 3)
    array of points and returns (m,) real values.  Normalisation uses the
    exact volume (pi/2) r^4.  Non-finite integrand values abort with the
    offending point.
    """
    if cfg.method == "stratified-grid":
        grid = _cylinder_grid(_grid_axes(cfg.n), ball.radius)
        chunks = _mc_chunks(len(grid))
        make = lambda i, size: mul(ball.center, grid[i * CHUNK : i * CHUNK + size])
        s, q, n = _reduce_uniform(make, chunks, f)
        return _estimate_from_sums(s, q, n, ball.volume, deterministic=True)

    def make(i: int, size: int) -> np.ndarray:
        rng = np.random.default_rng([cfg.seed, i])
        return mul(ball.center, _cylinder_chunk(rng, size, ball.radius))

    s, q, n = _reduce_uniform(make, _mc_chunks(cfg.n), f)
    return _estimate_from_sums(s, q, n, ball.volume, deterministic=False)


def integrate_box(
    f: Callable[[np.ndarray], np.ndarray],
    bounds: tuple[tuple[float, float], tuple[float, float], tuple[float, float]],
    cfg: SampleConfig,
) -> Estimate:
    """Estimate of the integral of f over a coordinate box.

    bounds is ((x0, x1), (y0, y1), (t0, t1)).
    """
    (x0, x1), (y0, y1), (t0, t1) = [(float(a), float(b)) for a, b in bounds]
    if not (x0 < x1 and y0 < y1 and t0 < t1):
        raise ValueError("box bounds must be increasing in every coordinate")
    lo = np.array([x0, y0, t0])
    span = np.array([x1 - x0, y1 - y0, t1 - t0])
    volume = float(np.prod(span))

    if cfg.method == "stratified-grid":
        k = _grid_axes(cfg.n)
        mid = (np.arange(k) + 0.5) / k
        g = np.stack([m.ravel() for m in np.meshgrid(mid, mid, mid, indexing="ij")], axis=-1)
        grid = lo + g * span
        chunks = _mc_chunks(len(grid))
        make = lambda i, size: grid[i * CHUNK : i * CHUNK + size]
        s, q, n = _reduce_uniform(make, chunks, f)
        return _estimate_from_sums(s, q, n, volume, deterministic=True)

    def make(i: int, size: int) -> np.ndarray:
        rng = np.random.default_rng([cfg.seed, i])
        return lo + rng.random((size, 3)) * span

    s, q, n = _reduce_uniform(make, _mc_chunks(cfg.n), f)
    return _estimate_from_sums(s, q, n, volume, deterministic=False)


def integrate_1d(g: Callable[[np.ndarray], np.ndarray], a: float, b: float, nodes: int) -> float:
    """Composite midpoint rule on [a, b]; exact for affine g, O(nodes^-2) for smooth g."""
    if not (a < b):
        raise ValueError("integration interval must satisfy a < b")
    if nodes < 1:
        raise ValueError("need at least one node")
    h = (b - a) / nodes
    x = a + (np.arange(nodes) + 0.5) * h
    return float(np.sum(np.asarray(g(x), dtype=float)) * h)
