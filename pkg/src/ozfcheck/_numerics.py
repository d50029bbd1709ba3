"""Small numerical helpers shared by the analysis modules."""

import math

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_max(f, lo, hi, iterations=20):
    """Golden-section maximisation of a scalar function on ``[lo, hi]``.

    Returns ``(x, f(x))`` for the best point visited, which always includes
    both end points so the result is never worse than the bracket ends.
    """
    best_x, best_f = lo, f(lo)
    fh = f(hi)
    if fh > best_f:
        best_x, best_f = hi, fh
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iterations):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    for x, fx in ((c, fc), (d, fd)):
        if fx > best_f:
            best_x, best_f = x, fx
    return best_x, best_f


def grid_max(f, x, iterations=20):
    """Maximise ``f`` on the sorted grid ``x`` then polish around the best point.

    ``f`` must accept arrays.  The polish runs a golden-section search on the
    bracket formed by the neighbours of the best grid point.
    """
    x = np.asarray(x, dtype=float)
    y = f(x)
    y = np.where(np.isnan(y), -np.inf, y)
    i = int(np.argmax(y))
    lo = x[max(i - 1, 0)]
    hi = x[min(i + 1, len(x) - 1)]
    if iterations <= 0 or lo == hi:
        return float(x[i]), float(y[i])
    xs, fs = golden_max(lambda s: float(f(np.array([s]))[0]), lo, hi, iterations)
    if fs >= y[i]:
        return float(xs), float(fs)
    return float(x[i]), float(y[i])


def sinc(x):
    """Unnormalised sinc, ``sin(x)/x`` with the removable point filled in."""
    return np.sinc(np.asarray(x, dtype=float) / np.pi)


def one_minus_sinc(x):
    """``1 - sin(x)/x`` without cancellation for small ``x``."""
    x = np.asarray(x, dtype=float)
    x2 = x * x
    small = np.abs(x) < 1e-2
    series = x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0))
    with np.errstate(invalid="ignore", divide="ignore"):
        direct = 1.0 - np.sin(x) / np.where(small, 1.0, x)
    return np.where(small, series, direct)
