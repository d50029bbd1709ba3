"""Candidate multipliers: representation, class membership and suitability.

Two concrete forms are supported.  :class:`DelayCombo` is a finite sum of
delays ``m0 - sum_i h_i exp(-j w t_i)`` and :class:`RationalMultiplier` a
proper rational function.  Membership in the monotone class requires a
nonnegative kernel whose mass does not exceed the direct term; the odd class
only bounds the absolute mass.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid
from scipy.linalg import expm

from ._numerics import golden_max
from .criterion import MultiplierClass, p_value
from .duality import DelayFamily
from .errors import NotBiproper, ParityError, ZeroResponse
from .xferfn import FrequencyGrid, as_plant, modulo_interval

__all__ = [
    "Membership", "DelayFamily", "DelayCombo", "RationalMultiplier",
    "SuitabilityReport", "MembershipReport", "is_suitable", "class_membership",
    "rational_membership", "phase_bound_check", "tight_tau_window",
    "delay_multiplier_phase", "delay_multiplier", "multiplier_from_dict",
    "multiplier_to_dict",
]

ZERO_TOL = 1e-12


class Membership(str, enum.Enum):
    IN_M = "InM"
    IN_MODD_ONLY = "InModdOnly"
    NEITHER = "Neither"


@dataclass(frozen=True)
class DelayCombo:
    """``m0 - sum_i h_i exp(-s t_i)``; ``taps`` is a sequence of ``(h_i, t_i)``."""

    m0: float
    taps: tuple = ()

    def __post_init__(self):
        if not self.m0 > 0:
            raise ValueError(f"m0 must be positive, got {self.m0!r}")
        taps = tuple((float(h), float(t)) for h, t in self.taps)
        if any(t == 0.0 for _, t in taps):
            raise ValueError("tap delays must be nonzero")
        object.__setattr__(self, "m0", float(self.m0))
        object.__setattr__(self, "taps", taps)

    def freqresp(self, omega):
        w = np.asarray(omega, dtype=float)
        out = np.full(w.shape, self.m0, dtype=complex)
        for h, t in self.taps:
            out = out - h * np.exp(-1j * w * t)
        return out


@dataclass(frozen=True)
class RationalMultiplier:
    num: tuple
    den: tuple

    def __post_init__(self):
        num = np.trim_zeros(np.atleast_1d(np.asarray(self.num, dtype=float)), "f")
        den = np.trim_zeros(np.atleast_1d(np.asarray(self.den, dtype=float)), "f")
        if den.size == 0:
            raise ValueError("den must have a nonzero coefficient")
        if num.size == 0:
            num = np.array([0.0])
        if num.size > den.size:
            raise ValueError("multiplier must be proper")
        object.__setattr__(self, "num", tuple(num.tolist()))
        object.__setattr__(self, "den", tuple(den.tolist()))

    def freqresp(self, omega):
        s = 1j * np.asarray(omega, dtype=float)
        return np.polyval(self.num, s) / np.polyval(self.den, s)


def delay_multiplier(family, tau):
    """``1 - exp(-tau s)`` for ``Mminus``, ``1 + exp(-tau s)`` for ``Mplus``."""
    family = DelayFamily(family)
    h = 1.0 if family is DelayFamily.MMINUS else -1.0
    return DelayCombo(1.0, ((h, tau),))


@dataclass(frozen=True)
class SuitabilityReport:
    min_re: float
    argmin_omega: float
    epsilon: float
    verdict: bool

    def to_dict(self):
        return {"min_re": self.min_re, "argmin_omega": self.argmin_omega,
                "epsilon": self.epsilon, "verdict": self.verdict}

    @classmethod
    def from_dict(cls, d):
        return cls(float(d["min_re"]), float(d["argmin_omega"]), float(d["epsilon"]),
                   bool(d["verdict"]))


def is_suitable(M, plant, grid=None, epsilon=0.0):
    """Smallest ``Re{M(jw) H(jw)}`` over the grid, polished at the minimiser.

    The verdict is ``min_re > epsilon``.
    """
    plant = as_plant(plant)
    grid = grid or FrequencyGrid()
    w = grid.omegas([plant])

    def re(x):
        return (M.freqresp(x) * plant.freqresp(x)).real

    vals = re(w)
    i = int(np.argmin(vals))
    w_best, v_best = float(w[i]), float(vals[i])
    lo, hi = w[max(i - 1, 0)], w[min(i + 1, len(w) - 1)]
    if hi > lo:
        x, neg = golden_max(lambda s: -float(re(np.array([s]))[0]), lo, hi, 40)
        if -neg < v_best:
            w_best, v_best = float(x), float(-neg)
    return SuitabilityReport(v_best, w_best, float(epsilon), bool(v_best > epsilon))


def class_membership(M):
    """Classify a :class:`DelayCombo` by the sign and mass of its taps."""
    h = np.array([t[0] for t in M.taps])
    if np.all(h >= 0) and h.sum() <= M.m0:
        return Membership.IN_M
    if np.abs(h).sum() <= M.m0:
        return Membership.IN_MODD_ONLY
    return Membership.NEITHER


@dataclass(frozen=True)
class MembershipReport:
    verdict: Membership
    m0: float
    mass: float
    min_kernel: float
    max_kernel: float
    tail_bound: float

    def to_dict(self):
        return {"verdict": self.verdict.value, "m0": self.m0, "mass": self.mass,
                "min_kernel": self.min_kernel, "max_kernel": self.max_kernel,
                "tail_bound": self.tail_bound}


def _companion(num, den):
    """Controllable canonical realisation of a strictly proper ``num/den``."""
    den = np.asarray(den, dtype=float)
    num = np.asarray(num, dtype=float) / den[0]
    den = den / den[0]
    n = den.size - 1
    num = np.concatenate([np.zeros(n - num.size), num])
    A = np.zeros((n, n))
    A[0, :] = -den[1:]
    A[1:, :-1] = np.eye(n - 1)
    B = np.zeros(n)
    B[0] = 1.0
    return A, B, num


def rational_membership(M, horizon=None, dt=None, tol=1e-6):
    """Classify a biproper :class:`RationalMultiplier` through its kernel.

    ``M = m0 - H(s)`` with ``H`` strictly proper; the kernel ``h`` is the
    impulse response of ``H`` sampled by exact matrix-exponential stepping on
    ``[0, horizon]`` and integrated with the trapezoidal rule.  Masses within
    ``tol * m0`` of ``m0`` count as inside the class.

    Raises
    ------
    NotBiproper
        If ``M`` has no direct term.
    """
    num, den = np.asarray(M.num), np.asarray(M.den)
    if num.size != den.size or num[0] == 0.0:
        raise NotBiproper("multiplier has no direct feedthrough term")
    m0 = num[0] / den[0]
    if den.size == 1:
        return MembershipReport(Membership.IN_M if m0 > 0 else Membership.NEITHER,
                                float(m0), 0.0, 0.0, 0.0, 0.0)
    h_num = np.trim_zeros(m0 * den - num, "f")
    if h_num.size == 0 or np.all(h_num == 0):
        return MembershipReport(Membership.IN_M if m0 > 0 else Membership.NEITHER,
                                float(m0), 0.0, 0.0, 0.0, 0.0)
    poles = np.roots(den)
    if np.any(poles.real >= 0):
        raise ValueError("multiplier kernel must be stable")
    slow = float(np.min(-poles.real))
    fast = float(np.max(np.abs(poles)))
    horizon = 40.0 / slow if horizon is None else float(horizon)
    dt = min(1e-3, 2e-3 / fast) if dt is None else float(dt)
    A, B, C = _companion(h_num, den)
    steps = int(math.ceil(horizon / dt))
    Phi = expm(A * dt)
    x = B.copy()
    h = np.empty(steps + 1)
    for i in range(steps + 1):
        h[i] = C @ x
        x = Phi @ x
    mass = float(trapezoid(np.abs(h), dx=dt))
    # remaining mass of a decaying mode is at most |state| / slowest rate
    tail = float(np.linalg.norm(C) * np.linalg.norm(x) / slow)
    hmin, hmax = float(h.min()), float(h.max())
    scale = max(abs(hmin), abs(hmax), 1.0)
    inside = mass <= m0 * (1.0 + tol)
    if m0 > 0 and hmin >= -tol * scale and inside:
        verdict = Membership.IN_M
    elif m0 > 0 and inside:
        verdict = Membership.IN_MODD_ONLY
    else:
        verdict = Membership.NEITHER
    return MembershipReport(verdict, float(m0), mass, hmin, hmax, tail)


def _phase_deg(values):
    ph = np.degrees(np.angle(values))
    return np.where(ph <= -180.0, 180.0, ph)


def phase_bound_check(M, pair, mclass, omega_grid):
    """``max_w |b phase(M(j a w)) - a phase(M(j b w))| / (a/2 + b/2 - p)`` in degrees.

    Class members never exceed 180.  A zero normaliser (pair ``(1, 1)`` with
    ``p = 1``) returns 0 when the numerator vanishes and ``inf`` otherwise.
    """
    w = np.asarray(omega_grid, dtype=float)
    p = p_value(pair, MultiplierClass(mclass))
    pa = _phase_deg(M.freqresp(pair.a * w))
    pb = _phase_deg(M.freqresp(pair.b * w))
    num = np.abs(pair.b * pa - pair.a * pb)
    den = pair.a / 2 + pair.b / 2 - p
    if den == 0:
        return 0.0 if np.all(num < 1e-9) else math.inf
    return float(np.max(num) / den)


def _lift(lo, hi, n):
    """Solutions of ``[n x]_{[0, 2pi)} in (lo, hi)`` for ``x in [0, 2pi)``."""
    return [((lo + 2 * np.pi * m) / n, (hi + 2 * np.pi * m) / n) for m in range(n)]


def _intersect(xs, ys):
    out = []
    for a0, a1 in xs:
        for b0, b1 in ys:
            lo, hi = max(a0, b0), min(a1, b1)
            if hi > lo:
                out.append((lo, hi))
    return sorted(out)


def tight_tau_window(pair, omega0, family):
    """Delays ``tau`` in ``[0, 2 pi / w0)`` where the delay multiplier meets the phase bound.

    For ``Mminus`` the conditions are ``[a w0 tau] > 2pi - 2pi/b`` and
    ``[b w0 tau] < 2pi/a``; for ``Mplus`` they are ``pi - pi/b < [a w0 tau] < pi``
    and ``pi < [b w0 tau] < pi + pi/a``, with ``[.]`` reduced to ``[0, 2pi)``.
    Returns a sorted list of open intervals.

    Raises
    ------
    ParityError
        For ``Mplus`` when ``a`` and ``b`` are both odd.
    """
    family = DelayFamily(family)
    a, b = pair
    if family is DelayFamily.MMINUS:
        ca, cb = (2 * np.pi - 2 * np.pi / b, 2 * np.pi), (0.0, 2 * np.pi / a)
    else:
        if a % 2 and b % 2:
            raise ParityError(f"Mplus tightness needs a or b even, got ({a}, {b})")
        ca, cb = (np.pi - np.pi / b, np.pi), (np.pi, np.pi + np.pi / a)
    xs = _intersect(_lift(*ca, a), _lift(*cb, b))
    return [(lo / omega0, hi / omega0) for lo, hi in xs]


def delay_multiplier_phase(family, tau, omega):
    """Principal phase (degrees) of ``1 -+ exp(-j w tau)``.

    ``Mminus`` uses the closed form ``90 - (180/pi) [w tau / 2]_{[0, pi)}``.

    Raises
    ------
    ZeroResponse
        Where the response vanishes.
    """
    family = DelayFamily(family)
    x = np.asarray(omega, dtype=float) * tau
    r = modulo_interval(x, 0.0, 2 * np.pi)
    if family is DelayFamily.MMINUS:
        if np.any(np.minimum(r, 2 * np.pi - r) < ZERO_TOL):
            raise ZeroResponse("1 - exp(-j w tau) vanishes at w tau = 0 mod 2 pi")
        out = 90.0 - np.degrees(modulo_interval(x / 2, 0.0, np.pi))
    else:
        if np.any(np.abs(r - np.pi) < ZERO_TOL):
            raise ZeroResponse("1 + exp(-j w tau) vanishes at w tau = pi mod 2 pi")
        out = _phase_deg(1.0 + np.exp(-1j * x))
    return float(out) if np.ndim(out) == 0 else out


def multiplier_from_dict(d):
    """Parse ``{"type": "delay_combo", "m0", "taps"}`` or ``{"type": "rational", "num", "den"}``."""
    if not isinstance(d, dict):
        raise ValueError("multiplier record must be a JSON object")
    kind = d.get("type")
    if kind == "delay_combo":
        if "m0" not in d:
            raise ValueError("multiplier.m0: missing")
        taps = d.get("taps", [])
        if not isinstance(taps, list) or not all(isinstance(t, list) and len(t) == 2 for t in taps):
            raise ValueError("multiplier.taps: expected a list of [h, t] pairs")
        return DelayCombo(float(d["m0"]), tuple(tuple(t) for t in taps))
    if kind == "rational":
        for key in ("num", "den"):
            if not isinstance(d.get(key), list):
                raise ValueError(f"multiplier.{key}: expected a list of numbers")
        return RationalMultiplier(tuple(d["num"]), tuple(d["den"]))
    raise ValueError(f"multiplier.type: expected 'delay_combo' or 'rational', got {kind!r}")


def multiplier_to_dict(M):
    if isinstance(M, DelayCombo):
        return {"type": "delay_combo", "m0": M.m0, "taps": [list(t) for t in M.taps]}
    return {"type": "rational", "num": list(M.num), "den": list(M.den)}
