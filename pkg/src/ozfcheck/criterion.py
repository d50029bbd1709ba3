"""Two-frequency phase criterion ruling out Zames-Falb multipliers.

For coprime integers ``a, b`` and a frequency ``w0`` the criterion fires when

    |b * phase(G(j a w0)) - a * phase(G(j b w0))| / (a + b - p) > 180 deg

with ``p = 1`` for monotone nonlinearities and, for odd monotone ones,
``p = 1`` when ``a`` and ``b`` are both odd and ``p = 1/2`` otherwise.  Each
phase is the principal value taken separately at its own frequency.
"""

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from ._numerics import grid_max
from .errors import BracketInvalid, OutOfRange
from .xferfn import FrequencyGrid, ShiftedPlant, as_plant, principal_phase

__all__ = [
    "MultiplierClass", "CoprimePair", "ViolationCertificate", "CriterionConfig",
    "SlopeResult", "p_value", "phase_gap", "enumerate_pairs", "max_gap",
    "scan_pair", "check_plant", "critical_slope", "forbidden_band",
]


class MultiplierClass(str, enum.Enum):
    MONOTONE = "monotone"
    ODD = "odd"


@dataclass(frozen=True, order=True)
class CoprimePair:
    a: int
    b: int

    def __post_init__(self):
        if int(self.a) != self.a or int(self.b) != self.b:
            raise ValueError("pair entries must be integers")
        object.__setattr__(self, "a", int(self.a))
        object.__setattr__(self, "b", int(self.b))
        if self.a < 1 or self.b < 1:
            raise ValueError(f"pair entries must be positive, got {self}")
        if math.gcd(self.a, self.b) != 1:
            raise ValueError(f"pair ({self.a}, {self.b}) is not coprime")

    def swapped(self):
        return CoprimePair(self.b, self.a)

    def __iter__(self):
        return iter((self.a, self.b))


def p_value(pair, mclass):
    mclass = MultiplierClass(mclass)
    if mclass is MultiplierClass.MONOTONE:
        return 1.0
    return 1.0 if (pair.a % 2 == 1 and pair.b % 2 == 1) else 0.5


def phase_gap(plant, pair, omega0):
    """Signed ``b*phase(a w0) - a*phase(b w0)`` in degrees (vectorised in ``omega0``)."""
    w = np.asarray(omega0, dtype=float)
    pa = principal_phase(plant, pair.a * w)
    pb = principal_phase(plant, pair.b * w)
    return pair.b * pa - pair.a * pb


@dataclass(frozen=True)
class ViolationCertificate:
    """Witness that no suitable multiplier exists in ``mclass``.

    The pair is oriented so that the signed phase gap is negative; ``gap`` is
    the normalised magnitude ``|b*phase_a - a*phase_b| / (a + b - p)``.
    """

    pair: CoprimePair
    omega0: float
    p: float
    gap: float
    phase_a: float
    phase_b: float
    mclass: MultiplierClass

    @property
    def valid(self):
        return self.gap > 180.0

    def to_dict(self):
        return {
            "pair": [self.pair.a, self.pair.b],
            "omega0": self.omega0,
            "p": self.p,
            "gap_deg": self.gap,
            "phase_a_deg": self.phase_a,
            "phase_b_deg": self.phase_b,
            "class": self.mclass.value,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(CoprimePair(*d["pair"]), float(d["omega0"]), float(d["p"]),
                   float(d["gap_deg"]), float(d["phase_a_deg"]),
                   float(d["phase_b_deg"]), MultiplierClass(d["class"]))


@dataclass(frozen=True)
class CriterionConfig:
    grid: FrequencyGrid = field(default_factory=FrequencyGrid)
    a_cap: int = 20
    b_cap: int = 20
    refine: bool = True
    margin: float = 0.0
    threads: int = 0

    def with_threads_from_env(self):
        if self.threads:
            return self
        return replace(self, threads=int(os.environ.get("OZF_THREADS", "0") or 0))


def _bound(cap, p, extreme):
    if extreme <= 0.0:
        return cap
    # strict inequality n * extreme < p * 180
    n = math.ceil(p * 180.0 / extreme) - 1
    return max(0, min(cap, n))


def enumerate_pairs(profile, mclass, a_cap=20, b_cap=20):
    """Coprime pairs allowed by the phase extremes of the plant.

    A pair can only fire when ``a*theta_max < p*180`` and ``b*phi_min < p*180``.
    Both orderings of a pair are returned whenever each satisfies the bounds.
    """
    mclass = MultiplierClass(mclass)
    pairs = []
    for a in range(1, a_cap + 1):
        for b in range(1, b_cap + 1):
            if math.gcd(a, b) != 1:
                continue
            pair = CoprimePair(a, b)
            p = p_value(pair, mclass)
            if a <= _bound(a_cap, p, profile.theta_max) and b <= _bound(b_cap, p, profile.phi_min):
                pairs.append(pair)
    return pairs


def max_gap(plant, pair, mclass, grid=None, refine=True):
    """Largest normalised phase gap over ``w0`` on the grid.

    Returns ``(gap, omega0, signed)`` where ``signed`` is the unnormalised
    signed gap at the maximiser.
    """
    plant = as_plant(plant)
    grid = grid or FrequencyGrid()
    p = p_value(pair, mclass)
    denom = pair.a + pair.b - p
    omegas = grid.omegas([plant], scales=(pair.a, pair.b))

    def objective(w):
        return np.abs(phase_gap(plant, pair, w)) / denom

    if refine:
        w0, g = grid_max(objective, omegas, iterations=20)
    else:
        w0, g = grid_max(objective, omegas, iterations=0)
    return g, w0, float(phase_gap(plant, pair, w0))


def _certificate(plant, pair, mclass, w0, signed):
    if signed > 0:
        pair = pair.swapped()
    p = p_value(pair, mclass)
    pa = float(principal_phase(plant, pair.a * w0))
    pb = float(principal_phase(plant, pair.b * w0))
    gap = abs(pair.b * pa - pair.a * pb) / (pair.a + pair.b - p)
    return ViolationCertificate(pair, float(w0), p, gap, pa, pb, MultiplierClass(mclass))


def scan_pair(plant, pair, mclass, grid=None, refine=True, margin=0.0):
    """Certificate for one pair, or ``None`` if the gap never exceeds ``180 + margin``."""
    mclass = MultiplierClass(mclass)
    gap, w0, signed = max_gap(plant, pair, mclass, grid, refine)
    if not gap > 180.0 + margin:
        return None
    return _certificate(as_plant(plant), pair, mclass, w0, signed)


def _rank(cert):
    return (-cert.gap, cert.pair.a + cert.pair.b, cert.pair.a)


def check_plant(plant, mclass, config=None):
    """Search all admissible pairs; return the largest-gap certificate or ``None``."""
    from .xferfn import phase_profile

    plant = as_plant(plant)
    mclass = MultiplierClass(mclass)
    config = (config or CriterionConfig()).with_threads_from_env()
    g = config.grid
    profile = phase_profile(plant, g.wmin, g.wmax, g.n, g.spacing, g.resolve_resonances)
    pairs = enumerate_pairs(profile, mclass, config.a_cap, config.b_cap)
    # (a, b) and (b, a) share |gap|; scan each unordered pair once
    unique = sorted({(min(p.a, p.b), max(p.a, p.b)) for p in pairs})
    todo = [CoprimePair(a, b) for a, b in unique]

    def run(pair):
        return scan_pair(plant, pair, mclass, g, config.refine, config.margin)

    if config.threads and config.threads > 1:
        with ThreadPoolExecutor(config.threads) as pool:
            results = list(pool.map(run, todo))
    else:
        results = [run(pair) for pair in todo]
    certs = [c for c in results if c is not None]
    if not certs:
        return None
    return min(certs, key=_rank)


@dataclass(frozen=True)
class SlopeResult:
    k_star: float
    k_lo: float
    k_hi: float
    certificate: ViolationCertificate

    def to_dict(self):
        return {
            "k_star": self.k_star,
            "k_lo": self.k_lo,
            "k_hi": self.k_hi,
            "pair": [self.certificate.pair.a, self.certificate.pair.b],
            "omega0": self.certificate.omega0,
            "certificate": self.certificate.to_dict(),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(float(d["k_star"]), float(d["k_lo"]), float(d["k_hi"]),
                   ViolationCertificate.from_dict(d["certificate"]))


def critical_slope(base, sign, mclass, k_lo, k_hi, tol, config=None):
    """Bisect on the slope ``k`` for the onset of the criterion on ``1/k + sign*G``.

    The criterion must be silent at ``k_lo`` and fire at ``k_hi``.  Returns a
    :class:`SlopeResult` whose certificate is the one found at the final upper
    bracket end.
    """
    if not (0 < k_lo < k_hi) or not tol > 0:
        raise BracketInvalid(f"need 0 < k_lo < k_hi and tol > 0, got [{k_lo}, {k_hi}], tol={tol}")

    def test(k):
        return check_plant(ShiftedPlant.from_slope(base, k, sign), mclass, config)

    if test(k_lo) is not None:
        raise BracketInvalid(f"criterion already fires at k_lo = {k_lo}")
    cert = test(k_hi)
    if cert is None:
        raise BracketInvalid(f"criterion does not fire at k_hi = {k_hi}")
    lo, hi = k_lo, k_hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        c = test(mid)
        if c is None:
            lo = mid
        else:
            hi, cert = mid, c
    return SlopeResult(0.5 * (lo + hi), lo, hi, cert)


def forbidden_band(phase_at_wa, pair, mclass):
    """Forbidden phases at ``(b/a)*w_a`` given the phase at ``w_a``.

    With ``phi = 180 - phase_at_wa`` the phase ``-180 + theta`` is forbidden for
    every ``theta > 0`` with ``a*theta + b*phi < p*180``.  Returns the open
    interval ``(lo, hi)`` in degrees, or ``None`` when it is empty.
    """
    if not 90.0 < phase_at_wa <= 180.0:
        raise OutOfRange(f"phase at w_a must lie in (90, 180], got {phase_at_wa}")
    phi = 180.0 - phase_at_wa
    room = p_value(pair, mclass) * 180.0 - pair.b * phi
    if room <= 0.0:
        return None
    return (-180.0, -180.0 + room / pair.a)
