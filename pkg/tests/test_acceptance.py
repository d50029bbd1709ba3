"""Acceptance checks, one test per criterion.

A summary line per criterion is printed at the end of the pytest run.
"""

import math
import time

import numpy as np
import pytest

from ozfcheck.criterion import CoprimePair, MultiplierClass, check_plant, critical_slope, scan_pair
from ozfcheck.duality import f_pair_minus, f_pair_plus
from ozfcheck.interval import (IntervalProblem, equivalence_probe, interval_slope_threshold,
                               phase_thresholds, rho_bar, rho_bar_odd, rho_c, shrinking_problem)
from ozfcheck.luryesim import LuryeConfig, nyquist_gain, periodicity_estimate, simulate
from ozfcheck.multiplier import (DelayCombo, Membership, class_membership, delay_multiplier,
                                 is_suitable, phase_bound_check, tight_tau_window)
from ozfcheck.plants import (delayed_third_order, double_resonance, lightly_damped_pair,
                             rational_double_pole_multiplier, single_delay_multiplier)
from ozfcheck.xferfn import FrequencyGrid, ShiftedPlant

GRID = FrequencyGrid(1e-3, 1e3, 8001)
KERNEL_GRID = np.linspace(0.0, 2 * np.pi, 20001)


def coprime_pairs(limit, ordered=False):
    out = []
    for a in range(1, limit + 1):
        for b in range(1, limit + 1):
            if math.gcd(a, b) == 1 and (a, b) != (1, 1) and (not ordered or a < b):
                out.append((a, b))
    return out


@pytest.fixture(scope="module")
def example1():
    return lightly_damped_pair()


@pytest.fixture(scope="module")
def example2():
    return double_resonance(0.25)


@pytest.fixture(scope="module")
def example3():
    return delayed_third_order()


@pytest.mark.criterion(1, "rational multiplier suitable at k = 0.0048")
def test_rational_multiplier(example1):
    start = time.perf_counter()
    rep = is_suitable(rational_double_pole_multiplier(),
                      ShiftedPlant.from_slope(example1, 0.0048, sign=-1), GRID)
    elapsed = time.perf_counter() - start
    assert rep.verdict and rep.min_re > 0
    assert elapsed < 1.0


@pytest.mark.criterion(2, "(1,3) certificate at k = 0.0061 near w = 1")
def test_pair_scan(example1):
    start = time.perf_counter()
    cert = scan_pair(ShiftedPlant.from_slope(example1, 0.0061, sign=-1), CoprimePair(1, 3),
                     MultiplierClass.MONOTONE)
    elapsed = time.perf_counter() - start
    assert cert is not None and cert.gap > 180
    assert 0.8 <= cert.omega0 <= 1.2
    assert elapsed < 5.0


@pytest.mark.criterion(3, "critical slope of the lightly damped plant")
def test_critical_slope_example1(example1):
    start = time.perf_counter()
    res = critical_slope(example1, -1, MultiplierClass.MONOTONE, 0.0048, 0.0061, 1e-7)
    elapsed = time.perf_counter() - start
    assert 0.0058920 <= res.k_star <= 0.0058930
    assert elapsed < 60.0


@pytest.mark.criterion(4, "delay multiplier suitable below, certificate and failure above")
def test_delay_multiplier(example1):
    M = single_delay_multiplier()
    assert is_suitable(M, ShiftedPlant.from_slope(example1, 0.0058924, sign=-1), GRID).verdict
    above = ShiftedPlant.from_slope(example1, 0.0058926, sign=-1)
    assert check_plant(above, MultiplierClass.MONOTONE) is not None
    assert not is_suitable(M, above, GRID).verdict


@pytest.mark.criterion(5, "double-resonance slope thresholds for both classes")
def test_thresholds_example2(example2):
    start = time.perf_counter()
    mono = critical_slope(example2, 1, MultiplierClass.MONOTONE, 1.0, 100.0, 1e-4)
    odd = critical_slope(example2, 1, MultiplierClass.ODD, 1.0, 100.0, 1e-4)
    assert mono.k_star == pytest.approx(32.61, abs=0.05)
    assert tuple(mono.certificate.pair) == (4, 1)
    assert odd.k_star == pytest.approx(39.93, abs=0.05)
    assert tuple(odd.certificate.pair) == (3, 1)
    cert = scan_pair(ShiftedPlant.from_slope(example2, 32.61), CoprimePair(4, 1),
                     MultiplierClass.MONOTONE)
    assert cert.omega0 == pytest.approx(0.3938, abs=0.002)
    assert cert.phase_b == pytest.approx(149.42, abs=0.1)
    assert time.perf_counter() - start < 120.0


@pytest.mark.criterion(6, "interval-approach slope threshold 269336.3")
def test_interval_threshold(example2):
    first = (0.02249, 0.03511)
    second = (1 / first[1], 1 / first[0])
    problem = IntervalProblem(first[0], first[1], second[0], second[1])
    upper, lower = phase_thresholds(problem)
    # the published 177.98 degree level is at least as strict as the computed one
    assert upper <= 177.98 and lower <= 177.98
    k = interval_slope_threshold(example2, 1, first, second, 177.98, 177.98, k_lo=10.0, k_hi=1e8)
    assert k == pytest.approx(269336.3, rel=5e-3)


@pytest.mark.criterion(7, "delayed plant: Nyquist gain, certificate and simulation")
def test_delayed_example(example3):
    assert nyquist_gain(example3) == pytest.approx(2.0931, abs=1e-3)
    cert = check_plant(ShiftedPlant.from_slope(example3, 2.0), MultiplierClass.MONOTONE)
    assert cert is not None and sorted(cert.pair) == [1, 2]
    # step 2 with unit saturation level; see README for the normalisation
    sat = simulate(LuryeConfig(example3, 2.0, sat_level=1.0, step_amplitude=2.0))
    lin = simulate(LuryeConfig(example3, 2.0, step_amplitude=2.0, nonlinearity="none"))
    assert periodicity_estimate(sat, step=2.0).verdict == "periodic"
    assert periodicity_estimate(lin, step=2.0).verdict == "convergent"


def kernel_trials(rng, factor, n=500):
    pairs = coprime_pairs(9)
    out = []
    while len(out) < n:
        a, b = pairs[int(rng.integers(len(pairs)))]
        odd = bool(rng.integers(2))
        p = 1.0 if not odd or (a % 2 and b % 2) else 0.5
        target = factor * p * math.pi
        theta = rng.uniform(0.0, min(math.pi, target / a))
        phi = (target - a * theta) / b
        if not 0.0 < phi < math.pi or theta <= 0.0:
            continue
        out.append((CoprimePair(a, b), theta, phi, odd))
    return out


def kernel_max(pair, theta, phi, odd):
    fn = f_pair_plus if odd else f_pair_minus
    u, v = fn(KERNEL_GRID, pair, theta, phi)
    return float(np.max(u + v))


@pytest.mark.criterion(8, "two-frequency kernel sums stay nonpositive below and fail above the bound")
def test_two_frequency_kernels():
    rng = np.random.default_rng(8)
    for trial in kernel_trials(rng, 0.99):
        assert kernel_max(*trial) <= 1e-9
    above = kernel_trials(rng, 1.05)
    hits = sum(kernel_max(*trial) > 0 for trial in above)
    assert hits >= 0.95 * len(above)


@pytest.mark.criterion(9, "limit suprema match their closed forms")
def test_equivalence_suite():
    for a, b in coprime_pairs(7, ordered=True):
        for kappa in (0.2, 1.0, 5.0):
            equivalence_probe(CoprimePair(a, b), kappa, tol=1e-6)
    assert rho_bar((1, 3), 1.0) == pytest.approx(1.0, abs=1e-6)
    assert rho_bar((2, 3), 1.0) == pytest.approx(1.37638, abs=1e-4)
    assert rho_bar_odd((1, 2), 1.0) == pytest.approx(1.73205, abs=1e-4)


def random_combo(rng, odd):
    n = int(rng.integers(1, 7))
    h = rng.dirichlet(np.ones(n)) * rng.uniform(0.0, 1.0)
    if odd:
        h = h * rng.choice([-1.0, 1.0], n)
    t = rng.uniform(0.01, 10.0, n) * rng.choice([-1.0, 1.0], n)
    return DelayCombo(1.0, tuple(zip(h, t)))


@pytest.mark.criterion(10, "multiplier phase bound and its tightness")
def test_multiplier_phase_bound():
    rng = np.random.default_rng(10)
    pairs = coprime_pairs(9)
    for odd in (False, True):
        mclass = MultiplierClass.ODD if odd else MultiplierClass.MONOTONE
        for _ in range(1000):
            M = random_combo(rng, odd)
            expected = Membership.IN_M if not odd else None
            if expected:
                assert class_membership(M) is expected
            else:
                assert class_membership(M) is not Membership.NEITHER
            for _ in range(20):
                pair = CoprimePair(*pairs[int(rng.integers(len(pairs)))])
                w = np.array([rng.uniform(1e-3, 20.0)])
                assert phase_bound_check(M, pair, mclass, w) <= 180.0 + 1e-9
    for pair in ((2, 3), (1, 2), (3, 4)):
        lo, hi = tight_tau_window(pair, 1.0, "Mminus")[0]
        M = delay_multiplier("Mminus", 0.5 * (lo + hi))
        gap = phase_bound_check(M, CoprimePair(*pair), MultiplierClass.MONOTONE, np.array([1.0]))
        assert gap == pytest.approx(180.0, abs=0.01)


@pytest.mark.criterion(11, "shrinking intervals converge to the limit threshold")
def test_interval_limit():
    for pair in ((1, 3), (2, 3)):
        problem = shrinking_problem(CoprimePair(*pair), 1.0, 1e-4)
        assert abs(rho_c(problem) - rho_bar(pair, 1.0)) <= 1e-3
