"""Duality certificates behind the two-frequency criterion.

A set of frequencies ``w_r`` and nonnegative weights ``lambda_r`` rule out
every multiplier in the monotone class when

    sum_r lambda_r Re{(1 - exp(-j w_r tau)) G(j w_r)} <= 0   for all tau,

and every odd-class multiplier when the same holds with ``1 + exp(-j w_r tau)``
as well.  For two frequencies ``a w0, b w0`` with the plant written in polar
form ``G(j a w0) = g_a exp(j(pi - phi))``, ``G(j b w0) = g_b exp(j(-pi + theta))``
the weights ``lambda_a = g_b b sin(theta)``, ``lambda_b = g_a a sin(phi)`` reduce
the condition to the trigonometric functions :func:`f_pair_minus` and
:func:`f_pair_plus`.
"""

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._numerics import grid_max
from .criterion import CoprimePair, MultiplierClass, p_value
from .errors import IneqViolation, PhaseSectorViolation
from .xferfn import as_plant, evaluate, principal_phase

__all__ = [
    "DelayFamily", "DualityCertificate", "GeneralDualityInstance",
    "f_pair_minus", "f_pair_plus", "dual_weights", "build_certificate", "verify_general",
    "common_period",
]

SUP_GRID = 100_000


class DelayFamily(str, enum.Enum):
    MMINUS = "Mminus"
    MPLUS = "Mplus"


def f_pair_minus(omega, pair, theta, phi):
    """``f1 = -b sin(theta)(cos(phi) - cos(phi - a w))``, ``f2 = -a sin(phi)(cos(theta) - cos(theta + b w))``."""
    w = np.asarray(omega, dtype=float)
    a, b = pair
    f1 = -b * math.sin(theta) * (math.cos(phi) - np.cos(phi - a * w))
    f2 = -a * math.sin(phi) * (math.cos(theta) - np.cos(theta + b * w))
    return f1, f2


def f_pair_plus(omega, pair, theta, phi):
    """``f3 = -b sin(theta)(cos(phi) + cos(phi - a w))``, ``f4 = -a sin(phi)(cos(theta) + cos(theta + b w))``."""
    w = np.asarray(omega, dtype=float)
    a, b = pair
    f3 = -b * math.sin(theta) * (math.cos(phi) + np.cos(phi - a * w))
    f4 = -a * math.sin(phi) * (math.cos(theta) + np.cos(theta + b * w))
    return f3, f4


def dual_weights(pair, g_a, g_b, theta, phi):
    """``(lambda_a, lambda_b) = (g_b b sin(theta), g_a a sin(phi))``."""
    return g_b * pair.b * math.sin(theta), g_a * pair.a * math.sin(phi)


def _sup_periodic(func, n=SUP_GRID):
    """Supremum of a ``2*pi``-periodic function, grid plus golden polish."""
    grid = np.linspace(0.0, 2.0 * np.pi, n + 1)
    return grid_max(func, grid, iterations=40)


@dataclass(frozen=True)
class DualityCertificate:
    """Two-frequency dual certificate.

    Angles ``theta`` and ``phi`` are in radians.  ``sup_f_plus`` is only
    computed for the odd class.
    """

    pair: CoprimePair
    omega0: float
    g_a: float
    g_b: float
    theta: float
    phi: float
    lambda_a: float
    lambda_b: float
    p: float
    mclass: MultiplierClass
    sup_f_minus: float
    sup_f_plus: float = None

    def holds(self, slack=1e-9):
        ok = self.sup_f_minus <= slack
        if self.mclass is MultiplierClass.ODD:
            ok = ok and self.sup_f_plus <= slack
        return ok

    def f(self, omega, family=DelayFamily.MMINUS):
        """Scaled dual function ``g_a g_b (f1 + f2)`` (or ``f3 + f4``).

        Its value at ``-tau*w0`` equals the delay-``tau`` summand of
        :func:`verify_general` for :meth:`instance`.
        """
        fn = f_pair_minus if DelayFamily(family) is DelayFamily.MMINUS else f_pair_plus
        u, v = fn(omega, self.pair, self.theta, self.phi)
        return self.g_a * self.g_b * (u + v)

    def instance(self, plant):
        """The equivalent general instance at frequencies ``a w0`` and ``b w0``."""
        terms = sorted([(self.pair.a * self.omega0, self.lambda_a),
                        (self.pair.b * self.omega0, self.lambda_b)])
        if terms[0][0] == terms[1][0]:
            terms = [(terms[0][0], terms[0][1] + terms[1][1])]
        return GeneralDualityInstance(tuple(t[0] for t in terms),
                                      tuple(t[1] for t in terms), plant)

    def to_dict(self):
        return {
            "pair": [self.pair.a, self.pair.b],
            "omega0": self.omega0,
            "g_a": self.g_a,
            "g_b": self.g_b,
            "theta_deg": math.degrees(self.theta),
            "phi_deg": math.degrees(self.phi),
            "lambda_a": self.lambda_a,
            "lambda_b": self.lambda_b,
            "p": self.p,
            "class": self.mclass.value,
            "sup_f_minus": self.sup_f_minus,
            "sup_f_plus": self.sup_f_plus,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(CoprimePair(*d["pair"]), float(d["omega0"]), float(d["g_a"]),
                   float(d["g_b"]), math.radians(d["theta_deg"]),
                   math.radians(d["phi_deg"]), float(d["lambda_a"]),
                   float(d["lambda_b"]), float(d["p"]), MultiplierClass(d["class"]),
                   float(d["sup_f_minus"]),
                   None if d.get("sup_f_plus") is None else float(d["sup_f_plus"]))


def build_certificate(plant, pair, omega0, mclass, n_grid=SUP_GRID):
    """Construct the dual weights for ``pair`` at ``omega0`` and check them.

    The pair is reoriented if necessary so that the phase at ``a w0`` lies in
    the upper half plane and the phase at ``b w0`` in the lower one.

    Raises
    ------
    PhaseSectorViolation
        If neither orientation puts the two phases in opposite half planes.
    IneqViolation
        If ``a*theta + b*phi >= p*pi``, i.e. the phase gap does not exceed 180.
    """
    plant = as_plant(plant)
    mclass = MultiplierClass(mclass)
    pa = principal_phase(plant, pair.a * omega0)
    pb = principal_phase(plant, pair.b * omega0)
    if pair.b * pa - pair.a * pb < 0:
        pair = pair.swapped()
        pa, pb = pb, pa
    if not (0.0 < pa <= 180.0 and -180.0 < pb <= 0.0):
        raise PhaseSectorViolation(
            f"phases {pa:.6g} at a*w0 and {pb:.6g} at b*w0 are not in opposite half planes")
    ga = abs(complex(evaluate(plant, pair.a * omega0)))
    gb = abs(complex(evaluate(plant, pair.b * omega0)))
    phi = math.pi - math.radians(pa)
    theta = math.pi + math.radians(pb)
    p = p_value(pair, mclass)
    if not pair.a * theta + pair.b * phi < p * math.pi:
        raise IneqViolation(
            f"a*theta + b*phi = {pair.a * theta + pair.b * phi:.12g} >= p*pi = {p * math.pi:.12g}")
    lam_a, lam_b = dual_weights(pair, ga, gb, theta, phi)

    def fm(w):
        u, v = f_pair_minus(w, pair, theta, phi)
        return ga * gb * (u + v)

    _, sup_m = _sup_periodic(fm, n_grid)
    sup_p = None
    if mclass is MultiplierClass.ODD:
        def fp(w):
            u, v = f_pair_plus(w, pair, theta, phi)
            return ga * gb * (u + v)
        _, sup_p = _sup_periodic(fp, n_grid)
    return DualityCertificate(pair, float(omega0), ga, gb, theta, phi, lam_a, lam_b,
                              p, mclass, sup_m, sup_p)


@dataclass(frozen=True)
class GeneralDualityInstance:
    omegas: tuple
    lambdas: tuple
    plant: object

    def __post_init__(self):
        w = tuple(float(x) for x in self.omegas)
        lam = tuple(float(x) for x in self.lambdas)
        if len(w) < 1 or len(w) != len(lam):
            raise ValueError("need N >= 1 frequencies with matching weights")
        if w[0] <= 0 or any(x2 <= x1 for x1, x2 in zip(w, w[1:])):
            raise ValueError("frequencies must be positive and strictly increasing")
        if any(x < 0 for x in lam) or sum(lam) <= 0:
            raise ValueError("weights must be nonnegative with positive sum")
        object.__setattr__(self, "omegas", w)
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "plant", as_plant(self.plant))


def common_period(omegas, max_den=1000, rtol=1e-9):
    """Common period ``2*pi/w0`` when all ratios ``w_r/w_1`` are rational, else ``None``."""
    w1 = omegas[0]
    fracs = []
    for w in omegas:
        fr = Fraction(w / w1).limit_denominator(max_den)
        if abs(float(fr) * w1 - w) > rtol * w:
            return None
        fracs.append(fr)
    den = math.lcm(*(f.denominator for f in fracs))
    nums = [int(f * den) for f in fracs]
    g = math.gcd(*nums)
    w0 = w1 * g / den
    return 2.0 * math.pi / w0


def verify_general(instance, family=DelayFamily.MMINUS, tau_grid=None):
    """Supremum over ``tau`` of ``sum_r lambda_r Re{M_tau(j w_r) G(j w_r)}``.

    ``M_tau = 1 - exp(-j w tau)`` for ``Mminus`` and ``1 + exp(-j w tau)`` for
    ``Mplus``.  A supremum ``<= 0`` certifies that no suitable multiplier
    exists in the corresponding class.  Without an explicit ``tau_grid`` the
    scan covers one common period when the frequency ratios are rational and
    ``[0, 200 * 2*pi / w_1]`` otherwise.

    Returns
    -------
    (sup, tau_star)
    """
    family = DelayFamily(family)
    w = np.array(instance.omegas)
    lam = np.array(instance.lambdas)
    vals = np.atleast_1d(evaluate(instance.plant, w))
    sgn = -1.0 if family is DelayFamily.MMINUS else 1.0

    def summand(tau):
        tau = np.atleast_1d(np.asarray(tau, dtype=float))
        rot = np.exp(-1j * np.outer(tau, w))
        return ((1.0 + sgn * rot) * vals).real @ lam

    if tau_grid is None:
        period = common_period(instance.omegas)
        if period is None:
            period = 200.0 * 2.0 * np.pi / w[0]
            n = min(2_000_000, max(SUP_GRID, int(200 * 64 * w[-1] / w[0])))
        else:
            n = min(2_000_000, max(SUP_GRID, int(64 * period * w[-1] / (2 * np.pi))))
        tau_grid = np.linspace(0.0, period, n + 1)
    tau_star, sup = grid_max(summand, np.asarray(tau_grid, dtype=float), iterations=40)
    return sup, tau_star
