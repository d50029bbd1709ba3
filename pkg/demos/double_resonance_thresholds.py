"""
Slope thresholds for a repeated resonance
=========================================

For ``s^2 / (s^2 + 2 xi s + 1)^2`` in negative feedback we find the smallest
slope at which the phase test rules out monotone and odd multipliers, then
compare with the weaker bound obtained from phase conditions on two whole
frequency intervals.
"""

from ozfcheck.criterion import critical_slope
from ozfcheck.interval import IntervalProblem, interval_slope_threshold, phase_thresholds
from ozfcheck.plants import double_resonance

G = double_resonance(0.25)

# %%
# Point-frequency test, both multiplier classes.
for mclass in ("monotone", "odd"):
    res = critical_slope(G, 1, mclass, 1.0, 100.0, 1e-5)
    c = res.certificate
    print(f"{mclass:8s} k* = {res.k_star:.4f}  pair {tuple(c.pair)}  w0 = {c.omega0:.4f}  "
          f"phase at b w0 = {c.phase_b:.2f} deg")

# %%
# Interval test: phase above a level on [0.02249, 0.03511] and below minus
# that level on the reciprocal interval.  The level that follows from the
# interval widths is a little under 178 degrees.
first = (0.02249, 0.03511)
second = (1 / first[1], 1 / first[0])
upper, lower = phase_thresholds(IntervalProblem(*first, *second))
print(f"interval phase level {upper:.3f} deg")
for level in (upper, 177.98):
    k = interval_slope_threshold(G, 1, first, second, level, level, k_lo=10.0, k_hi=1e8)
    print(f"level {level:.3f} deg -> slope {k:.1f}")

# %%
# Heavier damping pushes the point-frequency threshold up quickly.
for xi in (0.25, 0.3, 0.4):
    try:
        res = critical_slope(double_resonance(xi), 1, "monotone", 1.0, 1000.0, 1e-3)
        print(f"xi = {xi}: k* = {res.k_star:.1f}, pair {tuple(res.certificate.pair)}")
    except ValueError as exc:
        print(f"xi = {xi}: no certificate below k = 1000 ({exc})")
