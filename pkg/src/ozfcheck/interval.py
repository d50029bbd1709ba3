"""Frequency-interval phase limitations and their zero-width limit.

If the phase of a multiplier is above ``arctan(rho)`` on ``[alpha, beta]`` and
below ``-arctan(kappa*rho)`` on ``[gamma, delta]`` (or the mirror image) then
``rho < rho_c`` for every monotone-class multiplier, and ``rho < rho_c_odd``
for every odd-class one.  Shrinking both intervals onto ``a*w0`` and ``b*w0``
gives the thresholds :func:`rho_bar` and :func:`rho_bar_odd`, built from the
periodic functions :func:`q_minus` and :func:`q_plus`.

The remaining functions (``r_*``, ``m_*``, ``n_*``, ``d_*`` and the dagger
quantities) expose the turning-point structure of ``b*arctan(q) +
a*arctan(kappa*q)`` so that its extremes can be compared with the integer
multiples of ``pi/2`` that make the interval limit coincide with the
two-frequency phase criterion.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from ._numerics import golden_max, grid_max, one_minus_sinc, sinc
from .criterion import CoprimePair
from .errors import EquivalenceMismatch, NonpositiveDenominator
from .xferfn import as_plant, modulo_interval, principal_phase

__all__ = [
    "IntervalProblem", "EquivalenceProbe", "sup_ratio", "rho_c", "rho_c_odd",
    "q_minus", "q_plus", "r_minus", "r_plus", "m_minus", "n_minus", "d_minus",
    "m_plus", "n_plus", "d_plus", "q_dagger_minus", "q_dagger_plus",
    "r_dagger_minus", "r_dagger_plus", "qbar_dagger", "rbar_dagger",
    "drbar_dkappa", "rho_bar", "rho_bar_odd", "limit_sup", "r_bounds", "equivalence_probe",
    "shrinking_problem", "phase_thresholds", "interval_margin",
    "interval_slope_threshold",
]

T_GRID = 200_000
CHUNK = 1_000_000
BRANCH_TOL = 1e-12
DEN_TOL = 1e-10


@dataclass(frozen=True)
class IntervalProblem:
    """Two frequency intervals ``[alpha, beta]``, ``[gamma, delta]`` and weights.

    When ``lam``/``mu`` are omitted they are set to ``delta^2 - gamma^2`` and
    ``beta^2 - alpha^2`` so that their ratio satisfies the required constraint.
    """

    alpha: float
    beta: float
    gamma: float
    delta: float
    kappa: float = 1.0
    lam: float = None
    mu: float = None

    def __post_init__(self):
        if not 0 < self.alpha < self.beta < self.gamma < self.delta:
            raise ValueError("need 0 < alpha < beta < gamma < delta")
        if not self.kappa > 0:
            raise ValueError("kappa must be positive")
        ratio = (self.delta ** 2 - self.gamma ** 2) / (self.beta ** 2 - self.alpha ** 2)
        lam, mu = self.lam, self.mu
        if lam is None and mu is None:
            lam, mu = self.delta ** 2 - self.gamma ** 2, self.beta ** 2 - self.alpha ** 2
        elif lam is None:
            lam = ratio * mu
        elif mu is None:
            mu = lam / ratio
        elif not math.isclose(lam / mu, ratio, rel_tol=1e-9):
            raise ValueError(f"lam/mu must equal {ratio!r}, got {lam / mu!r}")
        if not (lam > 0 and mu > 0):
            raise ValueError("lam and mu must be positive")
        object.__setattr__(self, "lam", float(lam))
        object.__setattr__(self, "mu", float(mu))

    # centres and half-widths of the two intervals
    def _cw(self):
        return ((self.alpha + self.beta) / 2, (self.beta - self.alpha) / 2,
                (self.gamma + self.delta) / 2, (self.delta - self.gamma) / 2)

    def psi(self, t):
        c1, h1, c2, h2 = self._cw()
        t = np.asarray(t, dtype=float)
        return (2 * h1 * self.lam * np.sin(c1 * t) * sinc(h1 * t)
                - 2 * h2 * self.mu * np.sin(c2 * t) * sinc(h2 * t))

    def phi1(self, t):
        c1, h1, c2, h2 = self._cw()
        t = np.asarray(t, dtype=float)
        return (-2 * h1 * self.lam * np.cos(c1 * t) * sinc(h1 * t)
                - 2 * h2 * self.kappa * self.mu * np.cos(c2 * t) * sinc(h2 * t))

    @property
    def phi_const(self):
        return self.lam * (self.beta - self.alpha) + self.kappa * self.mu * (self.delta - self.gamma)

    def phi(self, t):
        # lam*(beta-alpha) + kappa*mu*(delta-gamma) + phi1(t), arranged so that
        # the O(t^2) behaviour at t -> 0 is computed without cancellation
        c1, h1, c2, h2 = self._cw()
        t = np.asarray(t, dtype=float)

        def part(c, h):
            return 2 * np.sin(c * t / 2) ** 2 + np.cos(c * t) * one_minus_sinc(h * t)

        return 2 * h1 * self.lam * part(c1, h1) + 2 * h2 * self.kappa * self.mu * part(c2, h2)

    def phi_tilde(self, t):
        phi1 = self.phi1(t)
        base = self.phi(t)
        # phi_const - |phi1| equals phi when phi1 <= 0, else phi - 2*phi1
        return np.where(phi1 <= 0, base, base - 2 * phi1)

    def default_t_grid(self):
        """``(0, T]`` with ``T = 100*2*pi/alpha`` sampled 40 points per period of ``delta``."""
        T = 100 * 2 * np.pi / self.alpha
        step = 2 * np.pi / self.delta / 40
        n = max(T_GRID, int(math.ceil(T / step)))
        return np.linspace(T / n, T, n)


def sup_ratio(problem, odd=False, t_grid=None):
    """``sup_t |psi(t)| / phi(t)`` (or ``/ phi_tilde(t)``) with its maximiser."""
    t_grid = problem.default_t_grid() if t_grid is None else np.asarray(t_grid, dtype=float)
    den_fn = problem.phi_tilde if odd else problem.phi

    def ratio(t):
        den = den_fn(t)
        if np.any(den <= 0):
            bad = np.atleast_1d(t)[np.atleast_1d(den <= 0)][0]
            raise NonpositiveDenominator(f"denominator {'phi_tilde' if odd else 'phi'} <= 0 at t = {bad!r}")
        return np.abs(problem.psi(t)) / den

    best_v, best_i = -np.inf, 0
    for start in range(0, len(t_grid), CHUNK):
        chunk = t_grid[start:start + CHUNK]
        v = ratio(chunk)
        i = int(np.argmax(v))
        if v[i] > best_v:
            best_v, best_i = float(v[i]), start + i
    lo = t_grid[max(best_i - 1, 0)]
    hi = t_grid[min(best_i + 1, len(t_grid) - 1)]
    t_star, v_star = golden_max(lambda s: float(ratio(np.array([s]))[0]), lo, hi, 40)
    if v_star < best_v:
        return best_v, float(t_grid[best_i])
    return v_star, t_star


def rho_c(problem, t_grid=None):
    return sup_ratio(problem, False, t_grid)[0]


def rho_c_odd(problem, t_grid=None):
    return sup_ratio(problem, True, t_grid)[0]


def shrinking_problem(pair, kappa, eps, omega0=1.0):
    """Intervals of half-width ``eps`` centred on ``a*w0`` and ``b*w0`` (``a < b``)."""
    a, b = sorted(pair)
    return IntervalProblem(a * omega0 - eps, a * omega0 + eps,
                           b * omega0 - eps, b * omega0 + eps, kappa)


def _q(t, pair, kappa, plus):
    a, b = pair
    t = np.asarray(t, dtype=float)
    s = 1.0 if plus else -1.0
    num = b * np.sin(a * t) - a * np.sin(b * t)
    den = b + kappa * a + s * (b * np.cos(a * t) + kappa * a * np.cos(b * t))
    branch = modulo_interval(t, 0.0, np.pi)
    branch = np.minimum(branch, np.pi - branch) < BRANCH_TOL
    near = np.abs(den) < DEN_TOL
    # near a removable singularity q ~ (b^2 - a^2) h / (3 (a + kappa b)) up to sign,
    # h being the offset from the nearest multiple of pi
    h = t - np.pi * np.round(t / np.pi)
    lead = (b * b - a * a) * h / (3 * (a + kappa * b))
    if plus:
        lead = -lead
    with np.errstate(divide="ignore", invalid="ignore"):
        val = np.where(near, lead, num / np.where(near, 1.0, den))
    val = np.where(branch, 0.0, val)
    return float(val) if val.ndim == 0 else val


def q_minus(t, pair, kappa):
    """``(b sin(at) - a sin(bt)) / (b + kappa a - b cos(at) - kappa a cos(bt))``, 0 at multiples of pi."""
    return _q(t, pair, kappa, plus=False)


def q_plus(t, pair, kappa):
    """``(b sin(at) - a sin(bt)) / (b + kappa a + b cos(at) + kappa a cos(bt))``, 0 at multiples of pi."""
    return _q(t, pair, kappa, plus=True)


def _r(q, pair, kappa):
    a, b = pair
    return b * np.arctan(q) + a * np.arctan(kappa * q)


def r_minus(t, pair, kappa):
    return _r(q_minus(t, pair, kappa), pair, kappa)


def r_plus(t, pair, kappa):
    return _r(q_plus(t, pair, kappa), pair, kappa)


def m_minus(t, pair, kappa):
    a, b = pair
    return np.sin(a * t / 2) * np.cos(b * t / 2) + kappa * np.sin(b * t / 2) * np.cos(a * t / 2)


def n_minus(t, pair):
    a, b = pair
    return b * np.sin(a * t / 2) * np.cos(b * t / 2) - a * np.sin(b * t / 2) * np.cos(a * t / 2)


def d_minus(t, pair, kappa):
    a, b = pair
    return b * np.sin(a * t / 2) ** 2 + kappa * a * np.sin(b * t / 2) ** 2


def m_plus(t, pair, kappa):
    a, b = pair
    return kappa * np.sin(a * t / 2) * np.cos(b * t / 2) + np.sin(b * t / 2) * np.cos(a * t / 2)


def n_plus(t, pair):
    a, b = pair
    return b * np.sin(b * t / 2) * np.cos(a * t / 2) - a * np.sin(a * t / 2) * np.cos(b * t / 2)


def d_plus(t, pair, kappa):
    a, b = pair
    return b * np.cos(a * t / 2) ** 2 + kappa * a * np.cos(b * t / 2) ** 2


def _q_dagger(t, pair, kappa, sign):
    a, b = pair
    t = np.asarray(t, dtype=float)
    return ((b * b - a * a) * np.sin(a * t)
            / (a * a + b * b + 2 * kappa * a * b + sign * (b * b - a * a) * np.cos(a * t)))


def q_dagger_minus(t, pair, kappa):
    """Value of ``q_minus`` at zeros of ``n_minus`` written as a function of ``a*t`` alone."""
    return _q_dagger(t, pair, kappa, -1.0)


def q_dagger_plus(t, pair, kappa):
    return _q_dagger(t, pair, kappa, 1.0)


def r_dagger_minus(t, pair, kappa):
    return _r(q_dagger_minus(t, pair, kappa), pair, kappa)


def r_dagger_plus(t, pair, kappa):
    return _r(q_dagger_plus(t, pair, kappa), pair, kappa)


def qbar_dagger(pair, kappa):
    a, b = pair
    return (b * b - a * a) / (2 * math.sqrt(a * b * (a + kappa * b) * (b + kappa * a)))


def rbar_dagger(pair, kappa):
    a, b = pair
    q = qbar_dagger(pair, kappa)
    return b * math.atan(q) + a * math.atan(kappa * q)


def drbar_dkappa(pair, kappa):
    a, b = pair
    return (-(a + b * kappa) * (a * a - b * b) ** 2
            / ((2 * a * b + (a * a + b * b) * kappa) * (2 * a * b * kappa + a * a + b * b))
            * math.sqrt(a * b / ((a + b * kappa) * (a * kappa + b))))


def _period_grid(n=T_GRID):
    return np.linspace(2 * np.pi / n, 2 * np.pi, n)


def _sup(func, n=T_GRID):
    return grid_max(func, _period_grid(n), iterations=40)


def limit_sup(pair, kappa, odd=False):
    """``(rho, t)``: supremum of ``|q_minus|`` (and ``|q_plus|`` when ``odd``) with its maximiser."""
    t, v = _sup(lambda s: np.abs(q_minus(s, pair, kappa)))
    if odd:
        tp, vp = _sup(lambda s: np.abs(q_plus(s, pair, kappa)))
        if vp > v:
            t, v = tp, vp
    return float(v), float(t)


def rho_bar(pair, kappa):
    """``sup_t |q_minus(t)|`` over one period."""
    return limit_sup(pair, kappa)[0]


def rho_bar_odd(pair, kappa):
    """``max(sup |q_minus|, sup |q_plus|)``."""
    return limit_sup(pair, kappa, odd=True)[0]


@dataclass(frozen=True)
class EquivalenceProbe:
    pair: CoprimePair
    kappa: float
    rho_bar: float
    rho_bar_odd: float
    r_minus_sup: float
    r_plus_sup: float
    r_dagger_bar: float
    q_dagger_bar: float

    def to_dict(self):
        return {
            "pair": [self.pair.a, self.pair.b], "kappa": self.kappa,
            "rho_bar": self.rho_bar, "rho_bar_odd": self.rho_bar_odd,
            "r_minus_sup_deg": math.degrees(self.r_minus_sup),
            "r_plus_sup_deg": math.degrees(self.r_plus_sup),
            "r_dagger_bar_deg": math.degrees(self.r_dagger_bar),
            "q_dagger_bar": self.q_dagger_bar,
        }


def r_bounds(pair):
    """Closed-form suprema of ``r_minus`` and ``r_plus`` in radians."""
    a, b = pair
    minus = (a + b - 2) * math.pi / 2
    plus = minus if (a % 2 and b % 2) else (a + b - 1) * math.pi / 2
    return minus, plus


def equivalence_probe(pair, kappa, tol=1e-6):
    """Compute the suprema of ``r_minus``/``r_plus`` and compare with their closed forms.

    Raises
    ------
    EquivalenceMismatch
        If either supremum is more than ``tol`` radians from its closed form.
    """
    if pair.a > pair.b:
        pair = pair.swapped()
    _, rm = _sup(lambda t: r_minus(t, pair, kappa))
    _, rp = _sup(lambda t: r_plus(t, pair, kappa))
    bm, bp = r_bounds(pair)
    if abs(rm - bm) > tol:
        raise EquivalenceMismatch(f"sup r_minus = {rm!r}, expected {bm!r} for {pair}, kappa={kappa}")
    if abs(rp - bp) > tol:
        raise EquivalenceMismatch(f"sup r_plus = {rp!r}, expected {bp!r} for {pair}, kappa={kappa}")
    return EquivalenceProbe(pair, float(kappa), rho_bar(pair, kappa), rho_bar_odd(pair, kappa),
                            rm, rp, rbar_dagger(pair, kappa), qbar_dagger(pair, kappa))


def phase_thresholds(problem, odd=False):
    """Plant phase levels (degrees) above/below which the interval result fires.

    Returns ``(upper, lower)``: no suitable multiplier exists if the plant phase
    is at least ``upper`` on ``[alpha, beta]`` and at most ``-lower`` on
    ``[gamma, delta]`` (or the mirror image).
    """
    rho = rho_c_odd(problem) if odd else rho_c(problem)
    return (90.0 + math.degrees(math.atan(rho)),
            90.0 + math.degrees(math.atan(problem.kappa * rho)))


def interval_margin(plant, first, second, upper, lower, n=2001):
    """Smallest slack of ``phase >= upper`` on ``first`` and ``phase <= -lower`` on ``second``.

    Positive exactly when both phase conditions hold on the sampled intervals.
    """
    plant = as_plant(plant)
    w1 = np.linspace(first[0], first[1], n)
    w2 = np.linspace(second[0], second[1], n)
    p1 = principal_phase(plant, w1)
    p2 = principal_phase(plant, w2)
    return min(float(p1.min()) - upper, -lower - float(p2.max()))


def interval_slope_threshold(base, sign, first, second, upper, lower,
                             k_lo=1.0, k_hi=1e9, rtol=1e-9, n=2001):
    """Smallest slope ``k`` for which ``1/k + sign*G`` meets the interval phase conditions.

    Solved by a root search on ``log k`` between ``k_lo`` and ``k_hi``.
    """
    from .xferfn import ShiftedPlant

    def f(logk):
        plant = ShiftedPlant.from_slope(base, math.exp(logk), sign)
        return interval_margin(plant, first, second, upper, lower, n)

    lo, hi = math.log(k_lo), math.log(k_hi)
    if f(lo) > 0 or f(hi) <= 0:
        raise ValueError("interval conditions must fail at k_lo and hold at k_hi")
    return math.exp(brentq(f, lo, hi, xtol=rtol))
