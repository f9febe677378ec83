"""Lift construction, evaluation, and inversion."""

import math

import numpy as np
import pytest

from circle_displace import (InvalidMapError, MapSpec, lift_from_callable,
                             lift_inverse, make_arnold, make_conjugated,
                             make_rotation, make_sine_perturb, make_unit_graph,
                             perturb_lift)
from circle_displace.util import GOLDEN_MEAN, TWO_PI

RNG = np.random.RandomState(0)


def all_test_lifts():
    return [
        make_rotation(0.3),
        make_rotation(GOLDEN_MEAN),
        make_arnold(0.25, 0.9),
        make_arnold(0.618, 0.5),
        make_unit_graph("x_squared"),
        make_unit_graph("arcsin_scaled"),
        make_sine_perturb(0.5),
        make_conjugated(make_sine_perturb(0.5), GOLDEN_MEAN),
    ]


# -- rotation ------------------------------------------------------------------


def test_rotation_values():
    L = make_rotation(0.3)
    assert L(0.1) == pytest.approx(0.4, abs=1e-15)
    assert L(1.1) == pytest.approx(1.4, abs=1e-15)  # degree one


def test_rotation_identity():
    L = make_rotation(0.0)
    xs = RNG.uniform(-2, 3, 50)
    assert np.allclose(L(xs), xs, atol=0)


# -- arnold ---------------------------------------------------------------------


def test_arnold_value():
    L = make_arnold(0.0, 0.5)
    assert L(0.25) == pytest.approx(0.25 + 0.5 / TWO_PI, abs=1e-15)


def test_arnold_reduces_to_rotation():
    L = make_arnold(0.25, 0.0)
    R = make_rotation(0.25)
    xs = RNG.uniform(-1, 2, 200)
    assert np.max(np.abs(L(xs) - R(xs))) <= 1e-12


def test_arnold_admissibility():
    make_arnold(0.25, 0.9)  # accepted
    with pytest.raises(InvalidMapError):
        make_arnold(0.25, 1.0)
    with pytest.raises(InvalidMapError):
        make_arnold(0.25, -0.1)


# -- unit graphs ------------------------------------------------------------------


def test_unit_graph_values():
    U = make_unit_graph("x_squared")
    assert U(0.5) == 0.25
    assert U(1.5) == 1.25
    A = make_unit_graph("arcsin_scaled")
    assert A(0.5) == pytest.approx(1.0 / 3.0, abs=1e-15)


def test_unit_graph_rejects_bad_endpoints():
    with pytest.raises(InvalidMapError):
        make_unit_graph(lambda r: 0.5 * np.square(r))  # f(1) != 1


def test_unit_graph_rejects_nonmonotone():
    with pytest.raises(InvalidMapError):
        make_unit_graph(lambda r: r + 0.3 * np.sin(TWO_PI * r))  # dips


# -- conjugated ------------------------------------------------------------------


def test_conjugated_identity_gamma_is_rotation():
    C = make_conjugated(make_rotation(0.0), 0.3)
    R = make_rotation(0.3)
    xs = RNG.uniform(-1, 2, 200)
    assert np.max(np.abs(C(xs) - R(xs))) <= 1e-12


def test_conjugated_value_against_grid_inversion_oracle():
    # independent high-resolution monotone-grid inversion of Gamma
    a = 0.5
    grid = np.linspace(0.0, 1.0, 2 ** 22 + 1)
    gamma_vals = grid + (a / TWO_PI) * np.sin(TWO_PI * grid)

    def gamma_inv_oracle(v):
        m = math.floor(v)  # Gamma(0) = 0, so Gamma maps [m, m+1] onto itself
        return m + float(np.interp(v - m, gamma_vals, grid))

    C = make_conjugated(make_sine_perturb(a), GOLDEN_MEAN)
    assert C(0.0) == pytest.approx(gamma_inv_oracle(GOLDEN_MEAN), abs=1e-10)
    for x in (0.2, 0.55, 0.9):
        want = gamma_inv_oracle((x + (a / TWO_PI) * math.sin(TWO_PI * x)) + GOLDEN_MEAN)
        assert C(x) == pytest.approx(want, abs=1e-10)


def test_conjugated_rotation_number_is_rho():
    from circle_displace import rotation_number_weighted
    C = make_conjugated(make_sine_perturb(0.5), GOLDEN_MEAN)
    assert rotation_number_weighted(C, 0.2, 2 * 10 ** 4) == pytest.approx(GOLDEN_MEAN, abs=1e-9)


def test_conjugated_rejects_bad_rho():
    with pytest.raises(InvalidMapError):
        make_conjugated(make_sine_perturb(0.5), 1.3)


# -- inversion --------------------------------------------------------------------


def test_lift_inverse_examples():
    assert lift_inverse(make_rotation(0.3), 0.4) == pytest.approx(0.1, abs=1e-13)
    A = make_arnold(0.0, 0.5)
    assert lift_inverse(A, A(0.3)) == pytest.approx(0.3, abs=1e-12)
    assert lift_inverse(make_unit_graph("x_squared"), 0.25) == pytest.approx(0.5, abs=1e-13)


def test_inverse_round_trip_randomized():
    xs = RNG.uniform(0.0, 2.0, 1000)
    for L in all_test_lifts():
        back = L.inverse(L(xs))
        assert np.max(np.abs(back - xs)) <= 1e-11, L.family


def test_inverse_degree_one():
    for L in all_test_lifts():
        ys = RNG.uniform(0.0, 1.0, 50)
        assert np.max(np.abs(L.inverse(ys + 1.0) - L.inverse(ys) - 1.0)) <= 1e-11


# -- invariants ---------------------------------------------------------------------


def test_monotonicity_certificate_recorded():
    for L in all_test_lifts():
        assert L.monotonicity_certificate >= 4096


def test_degree_one_randomized():
    xs = RNG.uniform(-3.0, 3.0, 1000)
    for L in all_test_lifts():
        assert np.max(np.abs(L(xs + 1.0) - L(xs) - 1.0)) <= 1e-12, L.family


def test_scalar_matches_vectorized():
    xs = RNG.uniform(-1.0, 2.0, 100)
    for L in all_test_lifts():
        vec = L(xs)
        sca = np.array([L.eval_scalar(float(x)) for x in xs])
        assert np.max(np.abs(vec - sca)) <= 1e-12, L.family


def test_deriv_matches_finite_differences():
    h = 1e-6
    xs = RNG.uniform(0.05, 0.95, 40)
    for L in (make_rotation(0.3), make_arnold(0.25, 0.9),
              make_sine_perturb(0.5),
              make_conjugated(make_sine_perturb(0.5), GOLDEN_MEAN)):
        fd = (L(xs + h) - L(xs - h)) / (2 * h)
        assert np.max(np.abs(fd - L.deriv(xs))) <= 1e-7, L.family


def test_normalization_and_lift_choice_independence():
    # a raw lift shifted by a whole turn normalizes to the same base map
    L0 = lift_from_callable(lambda x: np.asarray(x) + 0.3)
    L1 = lift_from_callable(lambda x: np.asarray(x) + 1.3)
    xs = RNG.uniform(0.0, 1.0, 100)
    assert np.allclose(L0(xs), L1(xs), atol=0)
    assert 0.0 <= L0.phi0 < 1.0 and 0.0 <= L1.phi0 < 1.0


def test_raw_callable_must_be_degree_one():
    with pytest.raises(InvalidMapError):
        lift_from_callable(lambda x: 2.0 * np.asarray(x))


def test_perturb_lift_accuracy_and_supnorm():
    C = make_conjugated(make_sine_perturb(0.5), GOLDEN_MEAN)
    xs = np.linspace(0.0, 1.0, 1001)
    for delta in (1e-2, 1e-4):
        P = perturb_lift(C, delta)
        gap = np.abs(P(xs) - C(xs) - delta * np.sin(2 * TWO_PI * xs))
        assert np.max(gap) <= 1e-10  # table replay error far below delta


# -- MapSpec -----------------------------------------------------------------------


def test_mapspec_json_round_trip():
    spec = MapSpec.from_json(
        '{"family":"conjugated","rho":0.6180339887,"gamma":{"family":"sine_perturb","a":0.5}}')
    again = MapSpec.from_json(spec.to_json())
    assert again == spec
    L = spec.build()
    assert L.family == "conjugated"
    assert L.meta["rho"] == pytest.approx(0.6180339887)


def test_mapspec_families_build():
    for text in ('{"family":"arnold","omega":0.25,"k":0.9}',
                 '{"family":"unit_graph","f":"x_squared"}',
                 '{"family":"unit_graph","f":"arcsin_scaled"}',
                 '{"family":"rotation","rho":0.3}'):
        spec = MapSpec.from_json(text)
        spec.build()


def test_mapspec_firing_family():
    spec = MapSpec.from_json(
        '{"family":"firing","kind":"perfect_integrator","I":2.0,"A":0.0,'
        '"x_r":0.0,"x_theta":1.0}')
    L = spec.build()
    assert L.family == "firing"
    assert L(0.4) == pytest.approx(0.9, abs=1e-10)


def test_mapspec_rejects_unknown():
    with pytest.raises(InvalidMapError):
        MapSpec.from_json('{"family":"nope"}').build()
