import math

import numpy as np
import pytest
from scipy import signal

from ozfcheck.errors import ImproperTransferFunction, WindowTooShort
from ozfcheck.luryesim import (LuryeConfig, SimTrace, nyquist_crossings, nyquist_gain,
                               periodicity_estimate, realize, simulate)
from ozfcheck.plants import delayed_third_order
from ozfcheck.xferfn import DelayedRational

from conftest import poly_at


@pytest.fixture(scope="module")
def limit_cycle():
    return simulate(LuryeConfig(delayed_third_order(), 2.0, step_amplitude=2.0))


def synthetic(y, dt=1e-2):
    t = np.arange(len(y)) * dt
    return SimTrace(t, np.asarray(y, dtype=float), np.zeros(len(y)), np.zeros(len(y), bool))


def test_first_order_realisation():
    ss = realize(DelayedRational([1.0], [1.0, 1.0]))
    assert ss.A.tolist() == [[-1.0]] and ss.B.tolist() == [1.0]
    assert ss.C.tolist() == [1.0] and ss.D == 0.0


def test_constant_realisation():
    ss = realize(DelayedRational([1.0], [1.0]))
    assert ss.order == 0 and ss.D == 1.0
    assert ss.freqresp(3.0) == pytest.approx(1.0)


def test_improper_rejected():
    with pytest.raises(ImproperTransferFunction):
        realize(DelayedRational([1.0, 0.0, 0.0], [1.0, 1.0]))


def test_delayed_plant_realisation(delayed):
    ss = realize(delayed)
    assert ss.order == 3 and ss.delay == 1.0
    for w in (0.1, 1.0, 10.0):
        s = 1j * w
        direct = np.exp(-s) * poly_at([1, 0.8, 1.5], s) / poly_at([1, 1.2, 1.12, 0.32], s)
        assert ss.freqresp(w) == pytest.approx(direct, rel=1e-12)


@pytest.mark.parametrize("num,den", [([2.0, 1.0, 3.0], [1.0, 0.4, 2.0]),
                                     ([1.0, 0.8, 1.5], [1.0, 1.2, 1.12, 0.32]),
                                     ([5.0], [2.0, 1.0, 1.0, 1.0, 0.2])])
def test_realisation_round_trip(num, den):
    tf = DelayedRational(num, den, delay=0.3)
    w = np.logspace(-2, 2, 100)
    np.testing.assert_allclose(realize(tf).freqresp(w), tf.freqresp(w), rtol=1e-9)


def test_zero_gain_gives_open_loop_step(delayed):
    tr = simulate(LuryeConfig(delayed, 0.0, t_final=20.0, dt=1e-2))
    sys = signal.lti([1.0, 0.8, 1.5], [1.0, 1.2, 1.12, 0.32])
    t_shift = tr.t - 1.0
    mask = t_shift > 0
    _, y = signal.step(sys, T=np.concatenate([[0.0], t_shift[mask]]))
    np.testing.assert_allclose(tr.y1[mask], y[1:], atol=1e-9)
    assert np.all(tr.y1[~mask] == 0)


def test_delay_free_loop_matches_linear_closed_loop():
    G = DelayedRational([1.0], [1.0, 1.0])
    tr = simulate(LuryeConfig(G, 3.0, nonlinearity="none", t_final=5.0, dt=1e-3))
    # y' = -y + (1 - 3 y) gives y = (1 - exp(-4 t)) / 4
    np.testing.assert_allclose(tr.y1, (1 - np.exp(-4 * tr.t)) / 4, atol=1e-10)


def test_trace_shapes(limit_cycle):
    tr = limit_cycle
    assert len(tr.t) == len(tr.y1) == len(tr.u1) == len(tr.saturated)
    assert np.allclose(np.diff(tr.t), 1e-3)


def test_dt_must_resolve_delay(delayed):
    with pytest.raises(ValueError):
        LuryeConfig(delayed, 2.0, dt=0.2)


def test_linear_loop_settles(delayed):
    tr = simulate(LuryeConfig(delayed, 2.0, nonlinearity="none"))
    n = len(tr.y1) // 10
    assert np.max(np.abs(tr.y1[-n:] - tr.y1[-1])) < np.max(np.abs(tr.y1[:n]))
    assert periodicity_estimate(tr).verdict == "convergent"


def test_saturated_loop_oscillates(limit_cycle):
    est = periodicity_estimate(limit_cycle, step=2.0)
    assert est.verdict == "periodic"
    assert est.period == pytest.approx(6.163, abs=0.01)
    assert est.peak_to_peak == pytest.approx(0.771, abs=0.01)


def test_saturation_sector(limit_cycle):
    tr = limit_cycle
    phi = 2.0 - tr.u1
    y = tr.y1
    nz = np.abs(y) > 1e-9
    ratio = phi[nz] / y[nz]
    assert np.all(ratio >= -1e-12) and np.all(ratio <= 2.0 + 1e-12)
    assert tr.saturated.any()
    assert np.all(np.abs(phi) <= 2.0 + 1e-12)


def test_tail_amplitude_is_grid_converged(limit_cycle, delayed):
    fine = simulate(LuryeConfig(delayed, 2.0, step_amplitude=2.0, dt=5e-4))
    coarse = periodicity_estimate(limit_cycle, step=2.0).peak_to_peak
    assert abs(periodicity_estimate(fine, step=2.0).peak_to_peak - coarse) < 0.01 * coarse


def test_divergence_flag():
    G = DelayedRational([1.0], [1.0, -1.0])
    tr = simulate(LuryeConfig(G, 0.0, t_final=50.0, dt=1e-2))
    assert tr.diverged
    assert periodicity_estimate(tr).verdict == "divergent"


def test_sine_tail_is_periodic():
    dt = 1e-2
    t = np.arange(20000) * dt
    est = periodicity_estimate(synthetic(np.sin(2 * np.pi * t / 3.7), dt))
    assert est.verdict == "periodic"
    assert abs(est.period - 3.7) <= dt


def test_decaying_tail_is_convergent():
    t = np.arange(20000) * 1e-2
    assert periodicity_estimate(synthetic(np.exp(-t))).verdict == "convergent"


def test_slowly_decaying_oscillation_is_convergent():
    t = np.arange(20000) * 1e-2
    y = np.exp(-0.02 * t) * np.sin(t)
    assert periodicity_estimate(synthetic(y)).verdict == "convergent"


def test_short_window_rejected():
    with pytest.raises(WindowTooShort):
        periodicity_estimate(synthetic(np.sin(np.arange(100))))


def test_nyquist_first_order():
    assert nyquist_gain(DelayedRational([-1.0], [1.0, 1.0])) == pytest.approx(1.0)
    assert nyquist_gain(DelayedRational([1.0], [1.0, 1.0])) == math.inf


def test_nyquist_third_order_closed_form():
    # 1/(s+1)^3 crosses at w = sqrt(3) with Re = -1/8
    k, w = nyquist_gain(DelayedRational([1.0], [1.0, 3.0, 3.0, 1.0]), return_omega=True)
    assert k == pytest.approx(8.0, rel=1e-9)
    assert w == pytest.approx(math.sqrt(3), rel=1e-9)


def test_nyquist_delayed_plant(delayed):
    k, w = nyquist_gain(delayed, return_omega=True)
    assert k == pytest.approx(2.0931, abs=1e-3)
    assert np.imag(delayed.freqresp(w)) == pytest.approx(0.0, abs=1e-9)
    for wc, re in nyquist_crossings(delayed):
        assert -1 / re >= k - 1e-12


def test_feedthrough_without_delay_is_rejected():
    from ozfcheck.errors import AlgebraicLoop
    with pytest.raises(AlgebraicLoop):
        simulate(LuryeConfig(DelayedRational([1.0, 2.0], [1.0, 1.0]), 1.0, t_final=1.0, dt=1e-2))
