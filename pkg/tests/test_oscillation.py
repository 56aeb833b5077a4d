import math

import numpy as np
import pytest

from heiskit import core, domains, riesz
from heiskit.oscillation import (
    ScaleGrid,
    dini_integral,
    dt_bound_check,
    lp_vertical_perimeter,
    osc,
    perimeter_profile,
    vertical_perimeter,
)
from heiskit.quadrature import SampleConfig, integrate_1d

BALL = core.Ball(core.point(0, 0, 0), 1.0)
SLAB = domains.slab(0.0)
FLAT = domains.flat(0.0, 0.0)
CFG = SampleConfig(n=100_000, seed=21)


def test_scale_grid():
    g = ScaleGrid(0.25, 2.0, 1)
    np.testing.assert_allclose(g.scales(), [0.25, 0.5, 1.0, 2.0])
    assert g.dlog == pytest.approx(math.log(2))
    with pytest.raises(ValueError):
        ScaleGrid(1.0, 0.5, 1)
    with pytest.raises(ValueError):
        ScaleGrid(0.1, 1.0, 0)


def test_vertical_perimeter_flat_vanishes():
    est = vertical_perimeter(FLAT, BALL, 0.3, CFG)
    assert est.value == 0.0 and est.stderr == 0.0


def test_vertical_perimeter_slab_value():
    est = vertical_perimeter(SLAB, BALL, 0.25, CFG)
    assert abs(est.value - math.pi / 16) <= 3 * est.stderr
    assert 0.0 <= est.value <= BALL.volume


def test_vertical_perimeter_monotone_in_window():
    s = 0.3
    small = vertical_perimeter(SLAB, core.Ball(BALL.center, 0.5), s, CFG)
    big = vertical_perimeter(SLAB, BALL, s, CFG.child(1))
    assert small.value <= big.value + 3 * math.hypot(small.stderr, big.stderr)


def test_vertical_perimeter_validation():
    with pytest.raises(ValueError):
        vertical_perimeter(SLAB, BALL, 0.0, CFG)


def test_osc_values():
    assert osc(FLAT, BALL, CFG).value == 0.0
    est = osc(SLAB, BALL, CFG, s_nodes=32)
    assert abs(est.value - math.pi / 6) <= max(3 * est.stderr, 1e-2)
    with pytest.raises(ValueError):
        osc(SLAB, BALL, CFG, s_nodes=4)


def test_osc_uniform_bound():
    for dom in (SLAB, domains.vertical_holder(3.0, 0.5).domain()):
        for r in (0.25, 1.0, 4.0):
            est = osc(dom, core.Ball(core.point(0.1, -0.2, 0.05), r), SampleConfig(n=20_000, seed=5))
            assert 0.0 <= est.value <= math.pi / 2


def test_osc_complement_symmetry():
    dom = domains.vertical_holder(1.0, 0.5).domain()
    a = osc(dom, BALL, SampleConfig(n=100_000, seed=8), s_nodes=16)
    b = osc(domains.complement(dom), BALL, SampleConfig(n=100_000, seed=9), s_nodes=16)
    assert abs(a.value - b.value) <= 3 * math.hypot(a.stderr, b.stderr)
    # pointwise the integrands coincide, so equal seeds give equal bits
    c = osc(domains.complement(dom), BALL, SampleConfig(n=100_000, seed=8), s_nodes=16)
    assert a == c


def test_osc_invariance_under_dilation_and_translation():
    dom = SLAB
    q = core.point(0.4, -0.3, 0.2)
    lam = 1.7
    a = osc(dom, BALL, SampleConfig(n=150_000, seed=10), s_nodes=16)
    moved = domains.transform(dom, q, lam)
    center = core.dilate(lam, core.mul(q, BALL.center))
    b = osc(moved, core.Ball(center, lam * BALL.radius), SampleConfig(n=150_000, seed=11), s_nodes=16)
    assert abs(a.value - b.value) <= 3 * math.hypot(a.stderr, b.stderr)


def test_osc_approximate_monotonicity():
    # B(p, r) inside B(p, 2r): the scale factor 2 costs at most 2^5 = 32
    dom = domains.vertical_holder(1.0, 1.0).domain()
    for seed, r in ((1, 0.5), (2, 1.0)):
        small = osc(dom, core.Ball(core.point(0, 0, 0), r), SampleConfig(n=60_000, seed=seed), s_nodes=16)
        big = osc(dom, core.Ball(core.point(0, 0, 0), 2 * r), SampleConfig(n=60_000, seed=seed + 50), s_nodes=16)
        assert small.value <= 32.0 * big.value + 6 * math.hypot(small.stderr, big.stderr)


def test_perimeter_profile_matches_single_scale():
    mids, vals, errs = perimeter_profile(SLAB, BALL, CFG, s_nodes=8)
    k = 3
    single = vertical_perimeter(SLAB, BALL, mids[k], SampleConfig(n=100_000, seed=77))
    assert abs(vals[k] - single.value / BALL.radius**4) <= 3 * math.hypot(errs[k], single.stderr)


def test_lp_vertical_perimeter():
    grid = ScaleGrid(0.0625, 1.0, 2)
    flat = lp_vertical_perimeter(FLAT, BALL, 1.0, grid, CFG)
    assert flat.value == 0.0

    res = lp_vertical_perimeter(SLAB, BALL, 1.0, grid, CFG)
    direct = float(np.sum(res.v_values / res.scales) * grid.dlog)
    assert res.value == pytest.approx(direct, rel=1e-12)
    assert res.tail_bound == pytest.approx(BALL.volume / grid.s_max)

    small = lp_vertical_perimeter(SLAB, core.Ball(BALL.center, 0.5), 1.0, grid, CFG.child(2))
    assert small.value <= res.value + 3 * math.hypot(small.stderr, res.stderr)

    with pytest.raises(ValueError):
        lp_vertical_perimeter(SLAB, BALL, 0.5, grid, CFG)


def test_dini_integral():
    grid = ScaleGrid(0.25, 4.0, 1)
    flat = dini_integral(FLAT, core.point(0, 0, 0), grid, CFG)
    assert flat.value == 0.0

    dom = domains.vertical_holder(1.0, 1.0).domain()
    cfg = SampleConfig(n=40_000, seed=3)
    short = dini_integral(dom, core.point(0, 0, 0), ScaleGrid(0.5, 2.0, 1), cfg)
    long = dini_integral(dom, core.point(0, 0, 0), ScaleGrid(0.25, 4.0, 1), cfg)
    assert short.value <= long.value + 3 * math.hypot(short.stderr, long.stderr)
    assert np.all(long.osc_values >= 0.0)


def test_dt_bound_flat():
    psi = riesz.BumpSpec(center=(0, 0, 0), radius=1.0, kind="psi_ball")
    res = dt_bound_check(FLAT, BALL, psi, CFG)
    assert res.lhs.value <= 3 * res.lhs.stderr
    assert res.bound == 0.0
    assert res.ratio == 0.0


def test_dt_bound_slab_matches_line_integration():
    # along each vertical line the t-derivative integrates to -psi at the
    # crossing, so the slab integral is minus the t = 0 slice integral
    psi = riesz.BumpSpec(center=(0, 0, 0), radius=1.0, kind="psi_ball")
    res = dt_bound_check(SLAB, BALL, psi, SampleConfig(n=400_000, seed=13))
    slice_integral = 2 * math.pi * integrate_1d(
        lambda u: riesz._profile(psi, u) * u, 0.0, 1.0, 4096
    )
    assert abs(res.lhs.value - slice_integral) <= 3 * res.lhs.stderr
    assert res.ratio <= 50.0


def test_dt_bound_ratio_bound_on_families():
    psi = riesz.BumpSpec(center=(0, 0, 0), radius=0.5, kind="psi_ball")
    ball = core.Ball(core.point(0, 0, 0), 0.5)
    for dom in (SLAB, domains.vertical_holder(1.0, 0.5).domain()):
        res = dt_bound_check(dom, ball, psi, SampleConfig(n=100_000, seed=17))
        assert res.ratio <= 50.0


def test_dt_bound_support_guard():
    psi = riesz.BumpSpec(center=(0, 0, 0), radius=2.0, kind="psi_ball")
    with pytest.raises(ValueError):
        dt_bound_check(SLAB, BALL, psi, CFG)
    with pytest.raises(ValueError):
        dt_bound_check(SLAB, BALL, riesz.BumpSpec(radius=1.0, kind="phi_eps_exterior"), CFG)
