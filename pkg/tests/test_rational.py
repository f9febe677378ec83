"""Periodic structures, tau functions, shreds, and the universal bound.

The closed-form oracle iterates t -> t^2 / sqrt(t) (and the arcsin
counterpart) directly and re-derives m-tilde, the overlap interval, and the
shred by its own bisections, independent of the library's orbit machinery.
"""

import math

import numpy as np
import pytest

from circle_displace import (ClassificationError, compute_shred, find_m_tilde,
                             find_periodic_points, lift_from_callable,
                             make_arnold, make_rotation, make_sine_perturb,
                             make_unit_graph, tau_minus, tau_plus,
                             u_minus_boundary, u_plus_boundary, universal_N,
                             verify_asymptotic_periodicity,
                             verify_forward_backward, displacement_sequence,
                             make_conjugated)
from circle_displace.util import GOLDEN_MEAN, TWO_PI

SQ_FWD = lambda t: t * t
SQ_BWD = math.sqrt
ASN_FWD = lambda t: (2.0 / math.pi) * math.asin(t)
ASN_BWD = lambda t: math.sin(0.5 * math.pi * t)


def shred_oracle(fwd, bwd, eps):
    """Independent m-tilde / overlap / shred computation for a map on (0, 1)
    with 0 attracting and 1 repelling."""

    def tau_p(z, m):
        for _ in range(m):
            z = fwd(z)
        return z

    def tau_m(z, m):
        for _ in range(m):
            z = bwd(z)
        return 1.0 - z

    def solve(f, lo, hi, increasing):
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if (f(mid) < eps) == increasing:
                lo = mid
            else:
                hi = mid
            if hi - lo < 1e-16:
                break
        return 0.5 * (lo + hi)

    m = 0
    while True:
        a = solve(lambda z: tau_p(z, m), 0.0, 1.0, True)     # U+ = [0, a)
        b = solve(lambda z: tau_m(z, m), 0.0, 1.0, False)    # U- = (b, 1]
        if b < a:
            break
        m += 1
    lo, hi = b, a
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if tau_p(mid, m) - tau_m(mid, m) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-16:
            break
    return m, b, a, 0.5 * (lo + hi)


@pytest.fixture(scope="module")
def squaring():
    L = make_unit_graph("x_squared")
    return L, find_periodic_points(L, 1, 0)


@pytest.fixture(scope="module")
def arcsin_map():
    L = make_unit_graph("arcsin_scaled")
    return L, find_periodic_points(L, 1, 0)


@pytest.fixture(scope="module")
def sym_sine():
    L = lift_from_callable(
        lambda x: np.asarray(x, dtype=float) - (0.5 / TWO_PI) * np.sin(TWO_PI * np.asarray(x)),
        deriv=lambda x: 1.0 - 0.5 * np.cos(TWO_PI * np.asarray(x)),
        family="sym_sine")
    return L, find_periodic_points(L, 1, 0)


# -- periodic points --------------------------------------------------------------


def test_squaring_fixed_points(squaring):
    L, P = squaring
    assert np.allclose(P.points, [0.0], atol=1e-12)
    assert np.max(np.abs(L(P.points) - P.points)) <= 1e-10  # listed points are periodic
    assert P.stability(0) == ("repelling", "attracting")  # left of 1, right of 0
    assert P.intervals[0].attracting == "lo"


def test_rotation_half_degenerate():
    P = find_periodic_points(make_rotation(0.5), 2, 1)
    assert P.degenerate


def test_sym_sine_fixed_points(sym_sine):
    L, P = sym_sine
    assert np.allclose(P.points, [0.0, 0.5], atol=1e-10)
    assert np.max(np.abs(L(P.points) - P.points)) <= 1e-10
    # Phi'(0) = 0.5 < 1 attracting, Phi'(0.5) = 1.5 > 1 repelling
    assert P.stability(0) == ("attracting", "attracting")
    assert P.stability(1) == ("repelling", "repelling")


def test_no_periodic_points_is_an_error():
    with pytest.raises(ClassificationError):
        find_periodic_points(make_rotation(GOLDEN_MEAN), 1, 0)


# -- tau functions ------------------------------------------------------------------


def test_tau_endpoint_values(squaring):
    L, P = squaring
    iv = P.intervals[0]
    for m in (0, 1, 3):
        assert tau_plus(L, P, iv, m, iv.attractor) == 0.0
        assert tau_minus(L, P, iv, m, iv.repeller) == 0.0


def test_tau_closed_form_example(squaring):
    L, P = squaring
    iv = P.intervals[0]
    assert tau_plus(L, P, iv, 2, 0.5) == pytest.approx(0.0625, abs=1e-12)
    assert tau_minus(L, P, iv, 2, 0.5) == pytest.approx(1.0 - 0.5 ** 0.25, abs=1e-12)


def test_tau_monotone_in_m(squaring):
    L, P = squaring
    iv = P.intervals[0]
    for z in (0.2, 0.5, 0.8):
        tp = [tau_plus(L, P, iv, m, z) for m in range(4)]
        tm = [tau_minus(L, P, iv, m, z) for m in range(4)]
        assert all(a > b for a, b in zip(tp, tp[1:]))
        assert all(a > b for a, b in zip(tm, tm[1:]))


def test_tau_strictly_monotone_in_z(arcsin_map):
    L, P = arcsin_map
    iv = P.intervals[0]
    zs = np.linspace(0.05, 0.95, 19)
    tp = [tau_plus(L, P, iv, 2, z) for z in zs]
    tm = [tau_minus(L, P, iv, 2, z) for z in zs]
    assert all(a < b for a, b in zip(tp, tp[1:]))  # increases toward repeller at 1
    assert all(a > b for a, b in zip(tm, tm[1:]))


def test_tau_outside_interval_rejected(sym_sine):
    L, P = sym_sine
    with pytest.raises(ValueError):
        tau_plus(L, P, P.intervals[0], 1, 0.7)  # interval is (0, 0.5)


# -- m-tilde and shreds ----------------------------------------------------------------


def test_m_tilde_trivial_when_eps_covers_gap(squaring):
    L, P = squaring
    iv = P.intervals[0]
    assert find_m_tilde(L, P, iv, 1.5) == (0, iv.lo, iv.hi)


@pytest.mark.parametrize("eps", [0.5, 0.1, 0.01, 0.001])
def test_squaring_shreds_match_oracle(squaring, eps):
    L, P = squaring
    m, b, a, z = shred_oracle(SQ_FWD, SQ_BWD, eps)
    r = compute_shred(L, P, P.intervals[0], eps)
    assert r.m_tilde == m
    assert r.a == pytest.approx(b, abs=1e-9)
    assert r.b == pytest.approx(a, abs=1e-9)
    assert r.shred == pytest.approx(z, abs=1e-9)
    assert abs(r.tau_plus_at_shred - r.tau_minus_at_shred) <= 1e-10


@pytest.mark.parametrize("eps", [0.5, 0.1, 0.01, 0.001])
def test_arcsin_shreds_match_oracle(arcsin_map, eps):
    L, P = arcsin_map
    m, b, a, z = shred_oracle(ASN_FWD, ASN_BWD, eps)
    r = compute_shred(L, P, P.intervals[0], eps)
    assert r.m_tilde == m
    assert r.shred == pytest.approx(z, abs=1e-9)


def test_sym_sine_shred_against_direct_oracle(sym_sine):
    # interval (0, 0.5): 0 attracting, 0.5 repelling; direct formula iteration
    L, P = sym_sine
    iv = P.intervals[0]
    eps = 0.1
    phi = lambda x: x - (0.5 / TWO_PI) * math.sin(TWO_PI * x)

    def phi_inv(y):
        lo, hi = 0.0, 0.5
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if phi(mid) < y:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def tau_p(z, m):
        for _ in range(m):
            z = phi(z)
        return z                  # distance to the attracting endpoint 0

    def tau_m(z, m):
        for _ in range(m):
            z = phi_inv(z)
        return 0.5 - z            # distance to the repelling endpoint 0.5

    def solve(f, increasing):
        lo, hi = 0.0, 0.5
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if (f(mid) < eps) == increasing:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    m = 0
    while True:
        a = solve(lambda z: tau_p(z, m), True)    # U+ = [0, a)
        b = solve(lambda z: tau_m(z, m), False)   # U- = (b, 0.5]
        if b < a:
            break
        m += 1
    lo, hi = b, a
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if tau_p(mid, m) - tau_m(mid, m) < 0.0:
            lo = mid
        else:
            hi = mid
    z_oracle = 0.5 * (lo + hi)

    r = compute_shred(L, P, iv, eps)
    assert r.m_tilde == m
    assert r.shred == pytest.approx(z_oracle, abs=1e-9)


def test_m_tilde_is_minimal(squaring):
    L, P = squaring
    iv = P.intervals[0]
    for eps in (0.1, 0.01):
        m, _, _ = find_m_tilde(L, P, iv, eps)
        assert m >= 1
        bp = u_plus_boundary(L, P, iv, m - 1, eps)
        bm = u_minus_boundary(L, P, iv, m - 1, eps)
        # attracting endpoint is lo: U+ = [lo, bp), U- = (bm, hi]: disjoint
        assert bp <= bm + 1e-12


def test_shred_sign_change_is_unique(squaring):
    L, P = squaring
    iv = P.intervals[0]
    r = compute_shred(L, P, iv, 0.1)
    zs = np.linspace(r.a + 1e-9, r.b - 1e-9, 101)
    h = np.array([tau_plus(L, P, iv, r.m_tilde, z)
                  - tau_minus(L, P, iv, r.m_tilde, z) for z in zs])
    assert int(np.sum(np.sign(h[:-1]) != np.sign(h[1:]))) == 1


def test_shred_trend_squaring_vs_arcsin(squaring, arcsin_map):
    eps_grid = (0.5, 0.1, 0.01, 0.001)
    Ls, Ps = squaring
    shreds_sq = [compute_shred(Ls, Ps, Ps.intervals[0], e).shred for e in eps_grid]
    assert all(a < b for a, b in zip(shreds_sq, shreds_sq[1:]))  # toward repelling 1
    La, Pa = arcsin_map
    shreds_as = [compute_shred(La, Pa, Pa.intervals[0], e).shred for e in eps_grid]
    assert all(a > b for a, b in zip(shreds_as, shreds_as[1:]))  # toward attracting 0


# -- universal N -------------------------------------------------------------------------


def test_universal_n_degenerate_rotation():
    P = find_periodic_points(make_rotation(0.5), 2, 1)
    assert universal_N(make_rotation(0.5), 0.1, structure=P) == 0


def test_universal_n_squaring(squaring):
    L, P = squaring
    m, _, _, _ = shred_oracle(SQ_FWD, SQ_BWD, 0.1)
    assert universal_N(L, 0.1, structure=P) == m


def test_universal_n_sweep(squaring):
    L, P = squaring
    N = universal_N(L, 0.1, structure=P)
    for z in np.linspace(0.002, 0.998, 100):
        verify_forward_backward(L, float(z), 0.1, N, 1, structure=P)


# -- asymptotic periodicity ----------------------------------------------------------------


def test_rotation_is_exactly_q_periodic():
    series = displacement_sequence(make_rotation(0.4), 0.0, 500)
    assert verify_asymptotic_periodicity(series, 5, 1e-15, 0)


def test_squaring_periodicity():
    series = displacement_sequence(make_unit_graph("x_squared"), 0.5, 2000)
    assert verify_asymptotic_periodicity(series, 1, 1e-6, 100)


def test_irrational_fails_periodicity():
    C = make_conjugated(make_sine_perturb(0.5), GOLDEN_MEAN)
    series = displacement_sequence(C, 0.2, 2000)
    assert not verify_asymptotic_periodicity(series, 1, 1e-3, 100)


def test_locked_arnold_periodicity():
    L = make_arnold(0.5, 0.9)
    series = displacement_sequence(L, 0.17, 2 * 10 ** 4)
    assert verify_asymptotic_periodicity(series, 2, 1e-8, 5000)


def test_periodicity_needs_length():
    series = displacement_sequence(make_rotation(0.4), 0.0, 30)
    with pytest.raises(ValueError):
        verify_asymptotic_periodicity(series, 5, 1e-6, 10)


# -- forward/backward split -----------------------------------------------------------------


def test_verify_sides_squaring(squaring):
    L, P = squaring
    r = compute_shred(L, P, P.intervals[0], 0.1)
    # attracting endpoint is 0 (lo): forward-fast basin hugs it
    assert verify_forward_backward(L, 0.2, 0.1, r.m_tilde, 1, structure=P) == "forward"
    assert verify_forward_backward(L, 0.95, 0.1, r.m_tilde, 1, structure=P) == "backward"
    assert verify_forward_backward(L, r.shred, 0.1, r.m_tilde, 1, structure=P) == "both"


def test_verify_periodic_point_is_both(squaring):
    L, P = squaring
    assert verify_forward_backward(L, 0.0, 0.1, 3, 1, structure=P) == "both"


def test_displacement_conditions_follow(squaring):
    # the (derated) displacement version of the forward/backward split:
    # intra-forward and intra-backward eta closeness past N blocks
    from circle_displace.util import circle_dist
    L, P = squaring
    N = universal_N(L, 0.1, structure=P)
    for z in (0.2, 0.5, 0.9):
        which = verify_forward_backward(L, z, 0.1, N, 1, structure=P)
        fwd = displacement_sequence(L, z, N + 60).values[N:]
        bwd = displacement_sequence(L, z, N + 60, "backward").values[N:]
        ok_f = float(np.max(circle_dist(fwd, fwd[0]))) < 4 * 0.1
        ok_b = float(np.max(circle_dist(bwd, bwd[0]))) < 4 * 0.1
        assert (ok_f if which in ("forward", "both") else True)
        assert (ok_b if which in ("backward", "both") else True)
