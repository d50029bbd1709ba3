"""Benchmark plants and multipliers used throughout the examples and tests."""

import numpy as np

from .multiplier import DelayCombo, RationalMultiplier
from .xferfn import DelayedRational

__all__ = [
    "lightly_damped_pair", "double_resonance", "delayed_third_order",
    "rational_double_pole_multiplier", "single_delay_multiplier",
]


def lightly_damped_pair(alpha=0.9997, beta=9.0039, coupling=1e-4):
    """``s^2 / ((s^2 + alpha)(s^2 + beta) + coupling (14 s^3 + 21 s))``.

    Two resonances near 1 and 3 rad/s with damping of order 1e-4.  Used with
    positive feedback, i.e. ``sign=-1`` in ``1/k - G``.
    """
    den = np.polyadd(np.polymul([1.0, 0.0, alpha], [1.0, 0.0, beta]),
                     coupling * np.array([14.0, 0.0, 21.0, 0.0]))
    return DelayedRational([1.0, 0.0, 0.0], den)


def double_resonance(xi=0.25):
    """``s^2 / (s^2 + 2 xi s + 1)^2``, used with ``sign=+1``."""
    f = [1.0, 2.0 * xi, 1.0]
    return DelayedRational([1.0, 0.0, 0.0], np.polymul(f, f))


def delayed_third_order():
    """``exp(-s) (s^2 + 0.8 s + 1.5) / (s^3 + 1.2 s^2 + 1.12 s + 0.32)``."""
    return DelayedRational([1.0, 0.8, 1.5], [1.0, 1.2, 1.12, 0.32], delay=1.0)


def rational_double_pole_multiplier(pole=2.5):
    """``1 - (p / (s + p))^2``, a boundary member of the monotone class."""
    return RationalMultiplier([1.0, 2.0 * pole, 0.0], [1.0, 2.0 * pole, pole * pole])


def single_delay_multiplier(h=0.99999, tau=0.93287):
    """``1 - h exp(-tau s)``."""
    return DelayCombo(1.0, ((h, tau),))
