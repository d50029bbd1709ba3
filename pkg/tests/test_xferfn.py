import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ozfcheck.errors import DegeneratePlant, EmptyInterval, ZeroResponse
from ozfcheck.xferfn import (DelayedRational, FrequencyGrid, ShiftedPlant, evaluate,
                             modulo_interval, phase_profile, plant_from_dict, plant_to_dict,
                             principal_phase)

from conftest import poly_at


def test_constant_plant_value(unity):
    assert evaluate(unity, 7.0) == 1 + 0j


def test_integrator_quarter_turn():
    g = DelayedRational([1.0], [1.0, 0.0])
    assert abs(evaluate(g, 1.0) - (-1j)) < 1e-15
    assert principal_phase(g, 1.0) == pytest.approx(-90.0)


def test_resonant_plant_matches_power_sum(resonant):
    s = 1j
    expected = poly_at(resonant.num, s) / poly_at(resonant.den, s)
    got = complex(evaluate(resonant, 1.0))
    assert abs(got - expected) <= 1e-12 * abs(expected)


def test_delay_and_offset_are_applied(delayed):
    w = 0.7
    base = poly_at(delayed.num, 1j * w) / poly_at(delayed.den, 1j * w) * cmath.exp(-1j * w)
    plant = ShiftedPlant(delayed, 0.5, -1)
    assert abs(complex(evaluate(plant, w)) - (0.5 - base)) < 1e-13


def test_vanishing_denominator_raises():
    with pytest.raises(DegeneratePlant):
        evaluate(DelayedRational([1.0], [1.0, 0.0, 1.0]), 1.0)


def test_zero_response_has_no_phase():
    with pytest.raises(ZeroResponse):
        principal_phase(DelayedRational([1.0, 0.0, 1.0], [1.0, 1.0, 1.0]), 1.0)


def test_invalid_construction():
    with pytest.raises(ValueError):
        DelayedRational([1.0], [0.0, 1.0])
    with pytest.raises(ValueError):
        DelayedRational([1.0], [1.0], delay=-1.0)
    with pytest.raises(ValueError):
        ShiftedPlant(DelayedRational([1.0], [1.0]), 0.0, 2)


def test_phase_of_shifted_double_resonance(double_res):
    plant = ShiftedPlant.from_slope(double_res, 32.61, 1)
    assert principal_phase(plant, 0.3938) == pytest.approx(149.42, abs=0.05)


def test_negative_real_axis_is_plus_180():
    g = ShiftedPlant(DelayedRational([1.0], [1.0]), 0.0, -1)
    assert principal_phase(g, 1.0) == 180.0
    # -1 - 0j carries a negative-zero imaginary part
    assert principal_phase(ShiftedPlant(DelayedRational([-1.0], [1.0])), 3.0) == 180.0


def test_profile_of_constant(unity):
    prof = phase_profile(unity, 1e-2, 1e2, 50)
    assert np.all(prof.phases == 0)
    assert prof.phi_min == 180 and prof.theta_max == 180


def test_profile_of_first_order_lag():
    prof = phase_profile(DelayedRational([1.0], [1.0, 1.0]), 0.01, 100, 400)
    np.testing.assert_allclose(prof.phases, -np.degrees(np.arctan(prof.omegas)), atol=1e-12)
    assert np.all((prof.phases > -90) & (prof.phases < 0))
    assert prof.phi_min > 90 and prof.theta_max > 90


def test_profile_peak_of_double_resonance(double_res):
    prof = phase_profile(double_res, 1e-3, 1e3, 4001)
    i = int(np.argmax(prof.phases))
    assert prof.phases[i] > 177.98
    inside = (prof.omegas >= 0.02249) & (prof.omegas <= 0.03511)
    assert prof.phases[inside].max() > 177.98


def test_profile_errors_name_the_frequency():
    g = DelayedRational([1.0], [1.0, 0.0, 1.0])
    with pytest.raises(DegeneratePlant, match="omega"):
        phase_profile(g, 0.5, 1.5, 3, spacing="linear", resolve_resonances=False)


def test_profile_grid_refinement_converges(double_res):
    coarse = phase_profile(double_res, 1e-3, 1e3, 2001)
    fine = phase_profile(double_res, 1e-3, 1e3, 4001)
    finer = phase_profile(double_res, 1e-3, 1e3, 8001)
    d1 = abs(coarse.phi_min - fine.phi_min) + abs(coarse.theta_max - fine.theta_max)
    d2 = abs(fine.phi_min - finer.phi_min) + abs(fine.theta_max - finer.theta_max)
    assert d2 <= d1 + 1e-12 and d2 < 0.05


@pytest.mark.parametrize("y,z,w,expected", [
    (5 * math.pi / 2, 0.0, 2 * math.pi, math.pi / 2),
    (-0.5, 0.0, 2 * math.pi, 2 * math.pi - 0.5),
    (math.pi, -math.pi / 2, math.pi / 2, 0.0),
])
def test_modulo_interval(y, z, w, expected):
    assert modulo_interval(y, z, w) == pytest.approx(expected, abs=1e-12)


def test_modulo_interval_empty():
    with pytest.raises(EmptyInterval):
        modulo_interval(1.0, 2.0, 2.0)


def test_resonance_clusters_cover_narrow_peaks(resonant):
    grid = FrequencyGrid()
    w = grid.omegas([ShiftedPlant.from_slope(resonant, 0.006, -1)])
    near = w[np.abs(w - 1.0) < 1e-3]
    assert near.size > 100
    assert np.all(np.diff(w) > 0)


def test_plant_json_round_trip(delayed):
    plant = ShiftedPlant(delayed, 0.25, -1)
    back = plant_from_dict(plant_to_dict(plant))
    assert back == plant


@pytest.mark.parametrize("record,path", [
    ({"den": [1]}, "plant.num"),
    ({"num": [1], "den": "x"}, "plant.den"),
    ({"num": [1], "den": [1], "sign": 3}, "plant.sign"),
])
def test_plant_json_errors(record, path):
    with pytest.raises(ValueError, match=path):
        plant_from_dict(record)


coeff = st.floats(-5, 5, allow_nan=False).filter(lambda c: abs(c) > 1e-3)


@settings(max_examples=100, deadline=None)
@given(num=st.lists(coeff, min_size=1, max_size=3), den=st.lists(coeff, min_size=1, max_size=3),
       delay=st.floats(0, 3), w=st.floats(0.01, 50))
def test_conjugate_symmetry(num, den, delay, w):
    g = DelayedRational(num, [1.0] + den, delay)
    s = -1j * w
    mirrored = poly_at(g.num, s) / poly_at(g.den, s) * cmath.exp(-delay * s)
    assert abs(complex(evaluate(g, w)) - mirrored.conjugate()) <= 1e-9 * max(1.0, abs(mirrored))


@settings(max_examples=100, deadline=None)
@given(num=st.lists(coeff, min_size=1, max_size=4), delay=st.floats(0, 5),
       w=st.lists(st.floats(1e-3, 1e3), min_size=1, max_size=20))
def test_phase_range(num, delay, w):
    g = DelayedRational(num, [1.0, 1.0, 2.0], delay)
    try:
        ph = np.atleast_1d(principal_phase(g, np.array(w)))
    except ZeroResponse:
        return
    assert np.all((ph > -180) & (ph <= 180))


@settings(max_examples=50, deadline=None)
@given(c=st.lists(coeff, min_size=1, max_size=4))
def test_identical_num_den_has_zero_phase(c):
    g = DelayedRational(c, c)
    # complex division of equal values can leave a phase of order 1e-16
    assert np.all(np.abs(principal_phase(g, np.logspace(-2, 2, 30))) < 1e-12)
