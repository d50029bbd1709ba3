"""
How far a multiplier's phase can swing between two frequencies
==============================================================

Every monotone multiplier keeps ``|b arg M(j a w) - a arg M(j b w)|`` below
``(a + b - 2) 90`` degrees.  Random delay combinations stay inside the bound
and a single delay placed in the right window reaches it exactly.
"""

import numpy as np

from ozfcheck.criterion import CoprimePair
from ozfcheck.interval import equivalence_probe, rho_bar
from ozfcheck.multiplier import DelayCombo, delay_multiplier, phase_bound_check, tight_tau_window

rng = np.random.default_rng(0)
pair = CoprimePair(2, 3)
w = np.geomspace(1e-2, 1e2, 4001)

worst = 0.0
for _ in range(200):
    n = rng.integers(1, 6)
    h = rng.dirichlet(np.ones(n)) * rng.uniform(0.2, 1.0)
    t = rng.uniform(0.1, 8.0, n)
    worst = max(worst, phase_bound_check(DelayCombo(1.0, tuple(zip(h, t))), pair, "monotone", w))
print(f"largest normalised gap over 200 random combinations: {worst:.2f} deg")

# %%
# The window for (2, 3) at w0 = 1 is (2 pi / 3, pi).
for lo, hi in tight_tau_window(pair, 1.0, "Mminus"):
    tau = 0.5 * (lo + hi)
    gap = phase_bound_check(delay_multiplier("Mminus", tau), pair, "monotone", np.array([1.0]))
    print(f"tau in ({lo:.4f}, {hi:.4f}); tau = {tau:.4f} gives {gap:.6f} deg")

# %%
# Limits of the interval test reproduce the same bound.
for a, b in [(1, 2), (2, 3), (3, 4), (2, 5)]:
    probe = equivalence_probe(CoprimePair(a, b), 1.0)
    print(f"({a},{b}) rho = {rho_bar((a, b), 1.0):.5f}  "
          f"sup r- = {np.degrees(probe.r_minus_sup):.4f} deg")
