"""Delayed rational transfer functions, their frequency response and phase.

Plants are represented by :class:`DelayedRational` (a rational function with
an optional dead time) wrapped in :class:`ShiftedPlant`, which adds the
loop-transformation offset ``1/k`` and the feedback sign.  All phases leaving
this module are principal values in degrees on ``(-180, 180]``; they are
never unwrapped across frequencies.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DegeneratePlant, EmptyInterval, ZeroResponse

__all__ = [
    "DelayedRational", "ShiftedPlant", "PhaseProfile", "FrequencyGrid",
    "as_plant", "evaluate", "principal_phase", "phase_profile",
    "modulo_interval", "plant_from_dict", "plant_to_dict",
]

DEN_FLOOR = 1e-300


def _coeffs(seq, name):
    arr = np.atleast_1d(np.asarray(seq, dtype=float))
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{name} must be a nonempty sequence of reals")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite coefficients")
    nz = np.flatnonzero(arr)
    if nz.size == 0:
        return (0.0,)
    return tuple(float(c) for c in arr[nz[0]:])


def _horner(coeffs, s):
    out = np.zeros_like(s, dtype=complex)
    for c in coeffs:
        out = out * s + c
    return out


@dataclass(frozen=True)
class DelayedRational:
    """Rational transfer function with dead time, ``exp(-delay*s) num(s)/den(s)``.

    Coefficients are given in descending powers of ``s``.
    """

    num: tuple
    den: tuple
    delay: float = 0.0

    def __post_init__(self):
        num = _coeffs(self.num, "num")
        den = np.atleast_1d(np.asarray(self.den, dtype=float))
        if den.size == 0 or den[0] == 0.0:
            raise ValueError("den must be nonempty with nonzero leading coefficient")
        if not np.all(np.isfinite(den)):
            raise ValueError("den contains non-finite coefficients")
        delay = float(self.delay)
        if not delay >= 0.0:
            raise ValueError(f"delay must be >= 0, got {self.delay!r}")
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", tuple(float(c) for c in den))
        object.__setattr__(self, "delay", delay)

    @property
    def order(self):
        return len(self.den) - 1

    @property
    def is_proper(self):
        return len(self.num) <= len(self.den)

    def poles(self):
        return np.roots(self.den)

    def __call__(self, s):
        """Evaluate at complex ``s`` (scalar or array)."""
        s = np.asarray(s, dtype=complex)
        n = _horner(self.num, s)
        d = _horner(self.den, s)
        if np.any(np.abs(d) < DEN_FLOOR):
            bad = np.atleast_1d(s)[np.atleast_1d(np.abs(d) < DEN_FLOOR)][0]
            raise DegeneratePlant(f"denominator vanishes at s = {bad}")
        val = n / d
        if self.delay:
            val = val * np.exp(-self.delay * s)
        return val

    def freqresp(self, omega):
        return self(1j * np.asarray(omega, dtype=float))


@dataclass(frozen=True)
class ShiftedPlant:
    """Affine plant expression ``offset + sign * base``.

    With ``offset = 1/k`` this is the loop-transformed plant ``1/k + sign G``
    whose multipliers certify stability for slope restrictions in ``[0, k]``.
    """

    base: DelayedRational
    offset: float = 0.0
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign!r}")
        object.__setattr__(self, "offset", float(self.offset))
        object.__setattr__(self, "sign", int(self.sign))

    @classmethod
    def from_slope(cls, base, k, sign=1):
        """Build ``1/k + sign*base``; ``k = inf`` gives the bare plant."""
        k = float(k)
        if not k > 0:
            raise ValueError(f"slope k must be positive, got {k!r}")
        return cls(base, 0.0 if np.isinf(k) else 1.0 / k, sign)

    def __call__(self, s):
        return self.offset + self.sign * self.base(s)

    def freqresp(self, omega):
        return self(1j * np.asarray(omega, dtype=float))

    def critical_roots(self):
        """Poles, plus zeros when the plant is delay free.

        These locate the lightly damped features where the phase moves fast.
        """
        roots = [self.base.poles()]
        if self.base.delay == 0.0:
            num = np.polyadd(self.offset * np.asarray(self.base.den),
                             self.sign * np.asarray(self.base.num))
            num = np.trim_zeros(num, "f")
            if num.size > 1:
                roots.append(np.roots(num))
        return np.concatenate(roots) if roots else np.array([], dtype=complex)


def as_plant(plant):
    """Accept either a :class:`ShiftedPlant` or a bare :class:`DelayedRational`."""
    if isinstance(plant, ShiftedPlant):
        return plant
    if isinstance(plant, DelayedRational):
        return ShiftedPlant(plant)
    raise TypeError(f"expected ShiftedPlant or DelayedRational, got {type(plant).__name__}")


def evaluate(plant, omega):
    """Frequency response ``offset + sign * exp(-j w tau) num(jw)/den(jw)``."""
    return as_plant(plant).freqresp(omega)


def _angle_deg(values):
    ph = np.degrees(np.angle(values))
    # np.angle returns -pi for negative reals with a -0.0 imaginary part
    return np.where(ph <= -180.0, 180.0, ph)


def principal_phase(plant, omega):
    """Principal phase in degrees on ``(-180, 180]``.

    Raises
    ------
    ZeroResponse
        If the response magnitude is below ``1e-300``.
    """
    val = evaluate(plant, omega)
    if np.any(np.abs(val) < DEN_FLOOR):
        raise ZeroResponse("phase undefined where the response is zero")
    ph = _angle_deg(val)
    return float(ph) if np.ndim(ph) == 0 else ph


def modulo_interval(y, z, w):
    """Reduce ``y`` modulo the interval ``[z, w)``."""
    if not w > z:
        raise EmptyInterval(f"need w > z, got [{z}, {w})")
    width = w - z
    x = z + np.mod(np.asarray(y, dtype=float) - z, width)
    x = np.where(x >= w, z, x)
    return float(x) if np.ndim(x) == 0 else x


@dataclass(frozen=True)
class FrequencyGrid:
    """Frequency grid specification for "for all omega" scans.

    The base grid covers ``[wmin, wmax]`` with ``n`` points.  When
    ``resolve_resonances`` is set, dense linear clusters are added around every
    lightly damped pole or zero of the plant, spanning ``cluster_halfwidths``
    times the root's real part on each side; without them, resonances as
    narrow as 1e-4 rad/s fall between grid points.
    """

    wmin: float = 1e-3
    wmax: float = 1e3
    n: int = 4001
    spacing: str = "log"
    resolve_resonances: bool = True
    cluster_halfwidths: float = 40.0
    cluster_points: int = 401
    damping_cutoff: float = 0.05

    def __post_init__(self):
        if not 0 < self.wmin < self.wmax:
            raise ValueError("need 0 < wmin < wmax")
        if self.n < 2:
            raise ValueError("need at least two grid points")
        if self.spacing not in ("log", "linear"):
            raise ValueError("spacing must be 'log' or 'linear'")

    def base(self):
        if self.spacing == "log":
            return np.logspace(np.log10(self.wmin), np.log10(self.wmax), self.n)
        return np.linspace(self.wmin, self.wmax, self.n)

    def clusters(self, plants=()):
        pts = []
        for plant in plants:
            for r in plant.critical_roots():
                mag = abs(r)
                if r.imag <= 0 or mag == 0:
                    continue
                if abs(r.real) / mag > self.damping_cutoff:
                    continue
                half = max(abs(r.real), 1e-12 * mag)
                span = self.cluster_halfwidths * half
                pts.append(np.linspace(r.imag - span, r.imag + span, self.cluster_points))
        return np.concatenate(pts) if pts else np.array([])

    def omegas(self, plants=(), scales=(1,)):
        """Grid of ``w0`` values such that ``s*w0`` resolves each plant for each scale ``s``."""
        parts = [self.base()]
        if self.resolve_resonances and plants:
            c = self.clusters([as_plant(p) for p in plants])
            if c.size:
                for s in scales:
                    parts.append(c / s)
        w = np.unique(np.concatenate(parts))
        return w[(w >= self.wmin) & (w <= self.wmax)]


@dataclass(frozen=True)
class PhaseProfile:
    omegas: np.ndarray = field(repr=False)
    phases: np.ndarray = field(repr=False)
    phi_min: float
    theta_max: float


def phase_profile(plant, omega_min=1e-3, omega_max=1e3, n_grid=4001,
                  spacing="log", resolve_resonances=True):
    """Principal phase on a grid and the distances of its extremes from +-180.

    ``phi_min = 180 - max(phase)`` and ``theta_max = 180 + min(phase)``, both
    clamped below at zero.
    """
    plant = as_plant(plant)
    grid = FrequencyGrid(omega_min, omega_max, n_grid, spacing, resolve_resonances)
    omegas = grid.omegas([plant])
    try:
        phases = principal_phase(plant, omegas)
    except (DegeneratePlant, ZeroResponse):
        for w in omegas:
            try:
                principal_phase(plant, w)
            except (DegeneratePlant, ZeroResponse) as exc:
                raise type(exc)(f"{exc} (omega = {w!r})") from exc
        raise
    phases = np.atleast_1d(phases)
    phi_min = max(180.0 - float(phases.max()), 0.0)
    theta_max = max(180.0 + float(phases.min()), 0.0)
    return PhaseProfile(omegas, phases, phi_min, theta_max)


def plant_from_dict(d):
    """Parse the plant JSON record.

    ``{"num": [...], "den": [...], "delay": 0, "offset": 0, "sign": 1}``; only
    ``num`` and ``den`` are required.
    """
    if not isinstance(d, dict):
        raise ValueError("plant record must be a JSON object")
    for key in ("num", "den"):
        if key not in d:
            raise ValueError(f"plant.{key}: missing")
        if not isinstance(d[key], list) or not all(
                isinstance(c, (int, float)) and not isinstance(c, bool) for c in d[key]):
            raise ValueError(f"plant.{key}: expected a list of numbers")
    base = DelayedRational(d["num"], d["den"], d.get("delay", 0.0))
    sign = d.get("sign", 1)
    if sign not in (1, -1):
        raise ValueError("plant.sign: must be 1 or -1")
    return ShiftedPlant(base, d.get("offset", 0.0), sign)


def plant_to_dict(plant):
    plant = as_plant(plant)
    return {
        "num": list(plant.base.num),
        "den": list(plant.base.den),
        "delay": plant.base.delay,
        "offset": plant.offset,
        "sign": plant.sign,
    }
