"""Time-domain simulation of a Lurye loop with dead time and saturation.

The loop is ``u1 = r1 - phi(y1)``, ``y1 = G u1`` with a step reference ``r1``
and ``phi(u) = clamp(k u, -k L, k L)`` (or ``k u`` without saturation).  The
dead time of ``G`` is applied at the output through a history buffer, which
keeps the state equation delay free.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import AlgebraicLoop, ImproperTransferFunction, WindowTooShort
from .xferfn import DelayedRational

__all__ = [
    "StateSpaceWithDelay", "LuryeConfig", "SimTrace", "Periodicity", "realize",
    "simulate", "periodicity_estimate", "nyquist_crossings", "nyquist_gain",
]

DIVERGENCE = 1e6


@dataclass(frozen=True)
class StateSpaceWithDelay:
    A: np.ndarray = field(repr=False)
    B: np.ndarray = field(repr=False)
    C: np.ndarray = field(repr=False)
    D: float = 0.0
    delay: float = 0.0

    @property
    def order(self):
        return self.A.shape[0]

    def freqresp(self, omega):
        w = np.atleast_1d(np.asarray(omega, dtype=float))
        n = self.order
        out = np.empty(w.shape, dtype=complex)
        for i, wi in enumerate(w):
            val = self.D
            if n:
                val = val + self.C @ np.linalg.solve(1j * wi * np.eye(n) - self.A, self.B)
            out[i] = val * np.exp(-1j * wi * self.delay)
        return out if np.ndim(omega) else out[0]


def realize(tf):
    """Controllable canonical realisation of a proper :class:`DelayedRational`.

    Raises
    ------
    ImproperTransferFunction
        If the numerator degree exceeds the denominator degree.
    """
    if not tf.is_proper:
        raise ImproperTransferFunction(
            f"numerator degree {len(tf.num) - 1} exceeds denominator degree {tf.order}")
    den = np.asarray(tf.den) / tf.den[0]
    num = np.asarray(tf.num) / tf.den[0]
    n = den.size - 1
    num = np.concatenate([np.zeros(n + 1 - num.size), num])
    D = float(num[0])
    rem = num[1:] - D * den[1:]
    A = np.zeros((n, n))
    if n:
        A[0, :] = -den[1:]
        A[1:, :-1] = np.eye(n - 1)
    B = np.zeros(n)
    if n:
        B[0] = 1.0
    return StateSpaceWithDelay(A, B, rem.astype(float), D, tf.delay)


@dataclass(frozen=True)
class LuryeConfig:
    """Loop parameters; ``nonlinearity`` is ``"saturation"`` or ``"none"``."""

    plant: StateSpaceWithDelay
    gain: float
    sat_level: float = 1.0
    step_amplitude: float = 1.0
    dt: float = 1e-3
    t_final: float = 200.0
    nonlinearity: str = "saturation"

    def __post_init__(self):
        if isinstance(self.plant, DelayedRational):
            object.__setattr__(self, "plant", realize(self.plant))
        if not self.gain >= 0:
            raise ValueError("gain must be >= 0")
        if not self.sat_level > 0:
            raise ValueError("sat_level must be positive")
        if not (self.dt > 0 and self.t_final > 0):
            raise ValueError("dt and t_final must be positive")
        if self.nonlinearity not in ("saturation", "none"):
            raise ValueError("nonlinearity must be 'saturation' or 'none'")
        if self.plant.delay > 0 and self.dt > self.plant.delay / 10:
            raise ValueError(f"dt must be <= delay/10 = {self.plant.delay / 10}")


@dataclass(frozen=True)
class SimTrace:
    t: np.ndarray = field(repr=False)
    y1: np.ndarray = field(repr=False)
    u1: np.ndarray = field(repr=False)
    saturated: np.ndarray = field(repr=False)
    diverged: bool = False

    @property
    def dt(self):
        return float(self.t[1] - self.t[0]) if len(self.t) > 1 else 0.0


def _nonlinearity(cfg):
    k, lim = cfg.gain, cfg.gain * cfg.sat_level
    if cfg.nonlinearity == "none":
        return lambda y: k * y
    return lambda y: min(max(k * y, -lim), lim)


def _rk4_input_maps(A, B, h):
    """RK4 step of ``x' = A x + B u`` as ``Phi x + g0 u(t) + gm u(t+h/2) + g1 u(t+h)``."""
    n = A.shape[0]
    eye = np.eye(n)
    A2, A3 = A @ A, A @ A @ A
    Phi = eye + h * A + h * h / 2 * A2 + h ** 3 / 6 * A3 + h ** 4 / 24 * A2 @ A2
    g0 = h / 6 * (B + h * A @ B + h * h / 2 * A2 @ B + h ** 3 / 4 * A3 @ B)
    gm = h / 6 * (4 * B + 2 * h * A @ B + h * h / 2 * A2 @ B)
    g1 = h / 6 * B
    return Phi, g0, gm, g1


def simulate(cfg):
    """Fixed-step RK4 simulation of the loop from rest with a step in ``r1`` at ``t = 0``.

    Stops early, flagging ``diverged``, once ``|y1|`` exceeds 1e6.

    Raises
    ------
    AlgebraicLoop
        For a delay-free plant with direct feedthrough.
    """
    ss, dt = cfg.plant, cfg.dt
    if ss.delay == 0 and ss.D != 0 and cfg.gain != 0:
        raise AlgebraicLoop("delay-free plant with feedthrough closes an algebraic loop")
    phi = _nonlinearity(cfg)
    r = cfg.step_amplitude
    steps = int(round(cfg.t_final / dt))
    n = ss.order
    x = np.zeros(n)
    z = np.zeros(steps + 1)  # undelayed output history
    y1 = np.zeros(steps + 1)
    u1 = np.zeros(steps + 1)
    sat = np.zeros(steps + 1, dtype=bool)
    lag = ss.delay / dt
    diverged = False

    def delayed(k, frac):
        # output at t_k + frac*dt - delay, linear interpolation in the history
        s = k + frac - lag
        if s < 0:
            return 0.0
        i = int(math.floor(s))
        w = s - i
        return z[i] if w == 0 else (1 - w) * z[i] + w * z[i + 1]

    def loop_input(y):
        return r - phi(y)

    if ss.delay > 0:
        Phi, g0, gm, g1 = _rk4_input_maps(ss.A, ss.B, dt) if n else (None,) * 4
        for k in range(steps + 1):
            y = delayed(k, 0.0)
            u = loop_input(y)
            y1[k], u1[k] = y, u
            sat[k] = cfg.nonlinearity == "saturation" and abs(y) > cfg.sat_level
            z[k] = (ss.C @ x if n else 0.0) + ss.D * u
            if abs(y) > DIVERGENCE:
                diverged = True
                break
            if k == steps:
                break
            if n:
                um = loop_input(delayed(k, 0.5))
                up = loop_input(delayed(k, 1.0))
                x = Phi @ x + g0 * u + gm * um + g1 * up
    else:
        def f(xs):
            return ss.A @ xs + ss.B * loop_input(ss.C @ xs if n else 0.0)

        for k in range(steps + 1):
            y = float(ss.C @ x) if n else 0.0
            u = loop_input(y)
            y1[k], u1[k] = y, u
            sat[k] = cfg.nonlinearity == "saturation" and abs(y) > cfg.sat_level
            if n == 0 and ss.D:
                # gain 0: y1 = D r
                y1[k] = ss.D * u
            if abs(y1[k]) > DIVERGENCE:
                diverged = True
                break
            if k == steps or not n:
                continue
            k1 = f(x)
            k2 = f(x + dt / 2 * k1)
            k3 = f(x + dt / 2 * k2)
            k4 = f(x + dt * k3)
            x = x + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    m = k + 1
    t = np.arange(m) * dt
    return SimTrace(t, y1[:m].copy(), u1[:m].copy(), sat[:m].copy(), diverged)


@dataclass(frozen=True)
class Periodicity:
    period: float
    peak_to_peak: float
    verdict: str
    correlation: float = float("nan")

    def to_dict(self):
        return {"period": self.period, "peak_to_peak": self.peak_to_peak,
                "verdict": self.verdict, "correlation": self.correlation}


def _lag_correlation(x, lag):
    a, b = x[:-lag], x[lag:]
    a = a - a.mean()
    b = b - b.mean()
    den = math.sqrt(float(a @ a) * float(b @ b))
    return float(a @ b) / den if den > 0 else 0.0


def periodicity_estimate(trace, tail_fraction=0.25, step=1.0, min_samples=64,
                         decay_ratio=0.8):
    """Classify the tail of ``y1``: periodic, convergent, divergent or indeterminate.

    Periodic: peak-to-peak above ``1e-3 * step``, the autocorrelation of the
    mean-removed tail has a secondary peak of at least 0.95, and the
    oscillation does not shrink across the two halves of the tail; the period
    is the lag of that peak, refined by parabolic interpolation.  Convergent:
    peak-to-peak below ``1e-6 * step``, or an envelope that decays by more than
    ``decay_ratio`` between the two halves.  Divergent: the simulation blew up
    or the envelope more than doubles.

    Raises
    ------
    WindowTooShort
        If the tail holds fewer than ``min_samples`` samples.
    """
    if trace.diverged:
        return Periodicity(float("nan"), float("inf"), "divergent")
    y = np.asarray(trace.y1)
    n = int(len(y) * tail_fraction)
    if n < min_samples:
        raise WindowTooShort(f"tail window has {n} samples, need {min_samples}")
    tail = y[-n:]
    ptp = float(np.ptp(tail))
    scale = abs(step)
    if ptp < 1e-6 * scale:
        return Periodicity(float("nan"), ptp, "convergent")
    first, second = float(np.ptp(tail[: n // 2])), float(np.ptp(tail[n // 2:]))
    if second < decay_ratio * first:
        return Periodicity(float("nan"), ptp, "convergent")
    if second > 2 * first and second > 1e-3 * scale:
        return Periodicity(float("nan"), ptp, "divergent")
    x = tail - tail.mean()
    # unbiased autocorrelation through the FFT
    m = 1 << (2 * n - 1).bit_length()
    spec = np.fft.rfft(x, m)
    acf = np.fft.irfft(spec * np.conj(spec), m)[:n]
    acf = acf / (n - np.arange(n))
    acf = acf / acf[0]
    half = n // 2
    neg = np.flatnonzero(acf[:half] < 0)
    verdict, period, corr = "indeterminate", float("nan"), float("nan")
    if neg.size:
        start = int(neg[0])
        seg = acf[start:half]
        peaks = np.flatnonzero((seg[1:-1] >= seg[:-2]) & (seg[1:-1] >= seg[2:])) + 1
        if peaks.size:
            lag = start + int(peaks[0])
            corr = _lag_correlation(tail, lag)
            y0, y1_, y2 = acf[lag - 1], acf[lag], acf[lag + 1]
            curv = y0 - 2 * y1_ + y2
            shift = 0.5 * (y0 - y2) / curv if curv != 0 else 0.0
            period = (lag + shift) * trace.dt
            if ptp > 1e-3 * scale and corr >= 0.95:
                verdict = "periodic"
    return Periodicity(float(period), ptp, verdict, corr)


def nyquist_crossings(tf, omega_grid=None):
    """Frequencies where ``G(jw)`` meets the negative real axis, with the real part there.

    Crossings are bracketed by sign changes of ``Im G`` on the grid and refined by
    bisection to 1e-10; ``w = 0`` counts when ``G(0) < 0``.
    """
    w = np.logspace(-3, 3, 20001) if omega_grid is None else np.asarray(omega_grid, dtype=float)
    w = w[w > 0]
    out = []
    g0 = complex(tf(0.0))
    if g0.real < 0:
        out.append((0.0, g0.real))

    def im(x):
        return float(np.imag(tf.freqresp(x)))

    vals = np.imag(tf.freqresp(w))
    for i in np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) <= 0):
        lo, hi = w[i], w[i + 1]
        if vals[i] == 0:
            wc = lo
        elif vals[i + 1] == 0:
            continue
        else:
            wc = brentq(im, lo, hi, xtol=1e-10, rtol=4 * np.finfo(float).eps)
        re = float(np.real(tf.freqresp(wc)))
        if re < 0:
            out.append((float(wc), re))
    return out


def nyquist_gain(tf, omega_grid=None, return_omega=False):
    """``min(-1/Re G(jw))`` over negative-real-axis crossings, ``inf`` when there are none."""
    best, wbest = math.inf, None
    for wc, re in nyquist_crossings(tf, omega_grid):
        k = -1.0 / re
        if k < best:
            best, wbest = k, wc
    return (best, wbest) if return_omega else best
