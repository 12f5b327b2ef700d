import math

import numpy as np
import pytest
from scipy.special import dawsn

from anomal import special as sf
from anomal.errors import BreakpointCapError, NumericalFailure
from anomal.oracle import integrate_barenblatt
from anomal.profile import (BuildOptions, ProblemParams, TailKind, build_profile,
                            classify_asymptotics, default_eta_max, evaluate, first_root,
                            reduced_root_equation, segment_values, tail_coefficients,
                            zero_crossings)

GRID = [(g, n, al) for g in (-0.5, 0.0, 0.5) for n in (1, 3) for al in (0.8, 2.2, 4.5)]


@pytest.mark.parametrize("bad", [dict(gamma=1.0, dim=1, alpha=1.0), dict(gamma=-1.0, dim=1, alpha=1.0),
                                 dict(gamma=0.0, dim=0, alpha=1.0), dict(gamma=0.0, dim=1, alpha=0.0)])
def test_params_validation(bad):
    with pytest.raises(ValueError):
        ProblemParams(**bad)


def test_branch_constants_alternate():
    p = ProblemParams(0.3, 2, 1.0)
    assert p.branch_c(1) == pytest.approx(0.7)
    assert p.branch_c(2) == pytest.approx(1.3)
    assert p.branch_c(3) == pytest.approx(0.7)


def test_default_horizon():
    assert default_eta_max(0.0) == pytest.approx(24.0)
    assert default_eta_max(0.5) == pytest.approx(12.0 / math.sqrt(0.125))


def test_first_root_absent_below_threshold():
    assert first_root(ProblemParams(0.3, 3, 0.9)) is None


@pytest.mark.parametrize("g, n", [(0.3, 1), (-0.4, 2), (0.7, 3), (0.0, 5)])
def test_first_root_alpha_equals_dim(g, n):
    assert first_root(ProblemParams(g, n, float(n))) == pytest.approx(math.sqrt(2 * n / (1 - g)), rel=1e-12)


def test_first_root_gaussian():
    assert first_root(ProblemParams(0.0, 1, 1.0)) == pytest.approx(math.sqrt(2.0), rel=1e-12)


def test_first_root_matches_first_breakpoint():
    for g, n, al in GRID:
        prof = build_profile(ProblemParams(g, n, al))
        r = first_root(prof.params)
        if r is None:
            assert prof.n_breakpoints == 0
        else:
            assert r == pytest.approx(prof.breakpoints[0], rel=1e-11)


def test_single_segment_positive():
    p = ProblemParams(0.4, 3, 0.5)
    prof = build_profile(p)
    assert prof.n_breakpoints == 0 and len(prof.segments) == 1
    etas = np.linspace(0, 20, 201)
    f, _ = evaluate(prof, etas)
    ref = [sf.kummer_m(0.25, 1.5, -0.15 * e * e) for e in etas]
    assert np.allclose(f, ref, rtol=1e-14, atol=0)
    assert np.all(f > 0)


def test_gaussian_profile_two_segments():
    prof = build_profile(ProblemParams(0.0, 1, 1.0))
    assert prof.breakpoints == pytest.approx((math.sqrt(2.0),), rel=1e-12)
    etas = np.linspace(0, 6, 301)
    f, fp = evaluate(prof, etas)
    assert np.max(np.abs(f - np.exp(-etas ** 2 / 4))) < 1e-10
    assert np.max(np.abs(fp + etas / 2 * np.exp(-etas ** 2 / 4))) < 1e-10


def test_evaluate_origin_and_known_point():
    prof = build_profile(ProblemParams(0.0, 1, 1.0))
    assert evaluate(prof, 0.0) == (1.0, 0.0)
    f, fp = evaluate(prof, 2.0)
    assert f == pytest.approx(math.exp(-1), rel=1e-12)
    assert fp == pytest.approx(-math.exp(-1), rel=1e-12)
    for g, n, al in GRID[::4]:
        assert evaluate(build_profile(ProblemParams(g, n, al)), 0.0) == (1.0, 0.0)


def test_evaluate_at_breakpoint_uses_right_segment():
    prof = build_profile(ProblemParams(0.5, 1, 2.0))
    eta = prof.breakpoints[0]
    assert prof.segment_for(eta).index_m == 2
    assert prof.segment_for(eta * (1 - 1e-12)).index_m == 1


@pytest.mark.parametrize("g, n, al", [(0.5, 1, 2.0), (-0.5, 3, 4.5), (0.2, 2, 3.3)])
def test_matches_oracle(g, n, al):
    p = ProblemParams(g, n, al)
    etas = np.linspace(0, 8, 161)
    f, _ = evaluate(build_profile(p), etas)
    tr = integrate_barenblatt(p, 8.0, 1e-12, samples=etas)
    dev = np.max(np.abs(f - tr.f_values) / np.maximum(np.abs(tr.f_values), 1e-3))
    assert dev <= 1e-6


def test_value_at_three_against_oracle():
    p = ProblemParams(0.5, 1, 2.0)
    f, _ = evaluate(build_profile(p), 3.0)
    tr = integrate_barenblatt(p, 3.0, 1e-12, samples=np.array([0.0, 3.0]))
    assert abs(f - tr.f_values[-1]) <= 1e-6


@pytest.mark.parametrize("g, n, al", GRID)
def test_c1_continuity_and_sign_pattern(g, n, al):
    prof = build_profile(ProblemParams(g, n, al))
    p = prof.params
    assert list(prof.breakpoints) == sorted(prof.breakpoints)
    for m, eta in enumerate(prof.breakpoints, start=1):
        fl, fpl = segment_values(prof.segments[m - 1], p, eta)
        fr, fpr = segment_values(prof.segments[m], p, eta)
        scale = max(abs(fl), abs(fpl))
        assert abs(fl - fr) <= 1e-9 * scale and abs(fpl - fpr) <= 1e-9 * scale
        assert math.copysign(1, prof.f_at_breakpoints[m - 1]) == (-1) ** (m + 1)
    first = prof.segments[0]
    assert (first.coeff_a, first.coeff_b, first.lo) == (1.0, 0.0, 0.0)
    for seg in prof.segments:
        assert seg.branch_c == pytest.approx(p.branch_c(seg.index_m))
        hi = seg.hi if math.isfinite(seg.hi) else prof.eta_max
        mid = 0.5 * (seg.lo + hi)
        f, fp = evaluate(prof, mid)
        assert math.copysign(1, al * f + mid * fp) == (-1) ** (seg.index_m + 1)


@pytest.mark.parametrize("g, n, al", GRID)
def test_zero_placement(g, n, al):
    prof = build_profile(ProblemParams(g, n, al))
    zeros = zero_crossings(prof)
    edges = (0.0,) + prof.breakpoints + (math.inf,)
    for i in range(len(edges) - 1):
        inside = sum(edges[i] < r < edges[i + 1] for r in zeros)
        assert inside == (1 if 0 < i < len(edges) - 2 else 0)


@pytest.mark.parametrize("g, n, al", GRID)
def test_ode_residual(g, n, al):
    prof = build_profile(ProblemParams(g, n, al))
    for seg in prof.segments:
        hi = seg.hi if math.isfinite(seg.hi) else prof.eta_max
        lo = max(seg.lo, 1e-2)
        c = seg.branch_c
        for eta in np.linspace(lo, hi, 52)[1:-1]:
            h = 1e-3 * min(1.0, eta)
            f0, fp0 = segment_values(seg, prof.params, eta)
            vals = [segment_values(seg, prof.params, eta + j * h)[0] for j in (-2, -1, 1, 2)]
            # fourth-order central second difference
            fpp = (-vals[0] + 16 * vals[1] - 30 * f0 + 16 * vals[2] - vals[3]) / (12 * h * h)
            res = fpp + (n - 1) / eta * fp0 + 0.5 * c * (al * f0 + eta * fp0)
            scale = max(abs(fpp), abs(fp0), abs(f0))
            assert abs(res) <= 1e-6 * scale


@pytest.mark.parametrize("n, al", [(1, 0.7), (1, 3.3), (2, 2.5), (3, 5.1), (3, 6.0)])
def test_gamma_zero_merged_profile(n, al):
    prof = build_profile(ProblemParams(0.0, n, al))
    etas = np.linspace(0, 10, 201)
    f, _ = evaluate(prof, etas)
    ref = np.array([sf.kummer_m(al / 2, n / 2, -e * e / 4) for e in etas])
    assert np.max(np.abs(f - ref)) <= 1e-9


def test_reduced_root_equation_at_breakpoints():
    for g, n, al in GRID:
        prof = build_profile(ProblemParams(g, n, al))
        for m, eta in enumerate(prof.breakpoints, start=1):
            seg = prof.segments[m - 1]
            f, fp = segment_values(seg, prof.params, eta)
            scale = max(abs(seg.coeff_a), abs(seg.coeff_b) * abs(sf.v_solution(al / 2, n / 2, -seg.branch_c * eta * eta / 4)), abs(f))
            assert abs(reduced_root_equation(seg, prof.params, eta)) <= 1e-8 * max(scale, 1.0)


def test_reduced_root_equation_closed_form_roots():
    for g, n in ((0.3, 1), (-0.2, 3)):
        p = ProblemParams(g, n, float(n))
        seg = build_profile(p).segments[0]
        assert abs(reduced_root_equation(seg, p, math.sqrt(2 * n / (1 - g)))) <= 1e-10
    p = ProblemParams(0.0, 1, 1.0)
    assert abs(reduced_root_equation(build_profile(p).segments[0], p, math.sqrt(2.0))) <= 1e-10


def test_reduced_root_equation_tracks_f_equation():
    p = ProblemParams(0.5, 1, 4.2)
    prof = build_profile(p)
    seg = prof.segments[1]
    etas = np.linspace(seg.lo, seg.hi, 40)[1:-1]
    direct = []
    for e in etas:
        f, fp = segment_values(seg, p, e)
        direct.append(p.alpha * f + e * fp)
    reduced = [reduced_root_equation(seg, p, e) for e in etas]
    assert np.all(np.sign(direct) == np.sign(reduced))


def test_classify_gaussian_case():
    d = classify_asymptotics(build_profile(ProblemParams(0.0, 1, 1.0)))
    assert d.kind is TailKind.GAUSSIAN
    assert d.rate == pytest.approx(0.25)


def test_classify_power_law_dawson():
    prof = build_profile(ProblemParams(0.0, 1, 2.0))
    d = classify_asymptotics(prof)
    assert d.kind is TailKind.POWER_LAW and d.rate == 2.0
    c, _ = tail_coefficients(prof)
    # M(1, 1/2; -x^2) = 1 - 2x D(x) with the Dawson integral D; the tail is -2 eta^-2
    assert c == pytest.approx(-2.0, rel=1e-12)
    etas = np.linspace(0, 30, 301)
    f, _ = evaluate(prof, etas)
    assert np.max(np.abs(f - (1 - etas * dawsn(etas / 2)))) < 1e-11
    # next asymptotic term: f eta^2 = -2 - 12 eta^-2 + O(eta^-4)
    assert f[-1] * 30.0 ** 2 == pytest.approx(-2.0 - 12.0 / 900.0, rel=1e-4)


def test_gaussian_rate_is_a_branch_rate():
    for g, n, al in GRID:
        d = classify_asymptotics(build_profile(ProblemParams(g, n, al)))
        if d.kind.value == "Gaussian":
            assert d.rate in (pytest.approx((1 - g) / 4), pytest.approx((1 + g) / 4))
        else:
            assert d.rate == al


def test_gaussian_when_reciprocal_gamma_vanishes():
    # N - alpha = -2l makes rgamma((N-alpha)/2) vanish on the first segment at gamma = 0
    for n, al in ((1, 3.0), (2, 6.0)):
        d = classify_asymptotics(build_profile(ProblemParams(0.0, n, al)))
        assert d.kind.value == "Gaussian"


def test_breakpoint_cap():
    with pytest.raises(BreakpointCapError):
        build_profile(ProblemParams(0.3, 1, 12.0), BuildOptions(max_breakpoints=2))


def test_second_segment_coefficients_closed_form():
    # Cramer's rule with the analytic Wronskian of {M, V} checks the matching solve at m = 2
    p = ProblemParams(0.5, 1, 2.0)
    prof = build_profile(p)
    eta = prof.breakpoints[0]
    f1, fp1 = segment_values(prof.segments[0], p, eta)
    c2 = p.branch_c(2)
    z = -c2 * eta * eta / 4
    g = fp1 / (-c2 * eta / 2)
    bp = sf.basis_pair(p.a, p.b, z)
    w = sf.real_wronskian(p.a, p.b, z)
    a2 = (f1 * bp.deriv_v - g * bp.value_v) / w
    b2 = (bp.value_m * g - bp.deriv_m * f1) / w
    seg = prof.segments[1]
    assert seg.coeff_a == pytest.approx(a2, rel=1e-10)
    assert seg.coeff_b == pytest.approx(b2, rel=1e-10)


@pytest.mark.parametrize("g, n", [(0.3, 1), (-0.3, 2), (0.5, 3), (0.3, 4)])
def test_continuity_through_alpha_equal_dim(g, n):
    etas = np.linspace(0, 8, 81)
    exact = integrate_barenblatt(ProblemParams(g, n, float(n)), 8.0, 1e-12, samples=etas).f_values
    for d in (-1e-6, 1e-6):
        f, _ = evaluate(build_profile(ProblemParams(g, n, n + d)), etas)
        assert np.max(np.abs(f - exact)) < 1e-6
    if n % 2:
        f, _ = evaluate(build_profile(ProblemParams(g, n, float(n))), etas)
        assert np.max(np.abs(f - exact)) < 1e-9


@pytest.mark.parametrize("n", [2, 4])
def test_even_dim_degenerate_basis_raises(n):
    # b - a = 0 with integer b: M and V are both e^z, the real basis is singular
    with pytest.raises(NumericalFailure):
        build_profile(ProblemParams(-0.3, n, float(n)))
