"""
Multipliers for a plant with two lightly damped resonances
==========================================================

The plant ``s^2 / ((s^2 + a)(s^2 + b) + small coupling)`` sits in positive
feedback with a slope-restricted nonlinearity.  We check two candidate
multipliers, then locate the slope where the two-frequency phase test proves
that no monotone multiplier can exist.
"""

from ozfcheck.criterion import CoprimePair, check_plant, critical_slope, scan_pair
from ozfcheck.duality import build_certificate
from ozfcheck.multiplier import is_suitable, rational_membership
from ozfcheck.plants import (lightly_damped_pair, rational_double_pole_multiplier,
                             single_delay_multiplier)
from ozfcheck.xferfn import FrequencyGrid, ShiftedPlant

G = lightly_damped_pair()
grid = FrequencyGrid(1e-3, 1e3, 8001)

# %%
# A rational multiplier with a double pole works at a modest slope.  Its
# kernel is 6.25 t exp(-2.5 t), nonnegative with unit mass.
M_rat = rational_double_pole_multiplier()
print("kernel:", rational_membership(M_rat))
rep = is_suitable(M_rat, ShiftedPlant.from_slope(G, 0.0048, sign=-1), grid)
print(f"k = 0.0048  min Re(M H) = {rep.min_re:.3e} at w = {rep.argmin_omega:.4f}")

# %%
# A single delay tap pushes the certified slope close to the limit.
M_del = single_delay_multiplier()
for k in (0.0058924, 0.0058926):
    rep = is_suitable(M_del, ShiftedPlant.from_slope(G, k, sign=-1), grid)
    print(f"k = {k:.7f}  suitable = {rep.verdict}  min Re = {rep.min_re:+.3e}")

# %%
# The phase test pairs w0 with 3 w0.  Just above the slope where the delay
# multiplier stops working, a certificate appears near w = 1.
plant = ShiftedPlant.from_slope(G, 0.0061, sign=-1)
cert = scan_pair(plant, CoprimePair(1, 3), "monotone")
print(f"(1,3) gap {cert.gap:.2f} deg at w0 = {cert.omega0:.5f}")

res = critical_slope(G, -1, "monotone", 0.0048, 0.0061, 1e-8)
print(f"critical slope k* = {res.k_star:.8f} with pair {tuple(res.certificate.pair)}")

# %%
# Dual weights turn the certificate into an explicit inequality that every
# monotone multiplier violates.
above = ShiftedPlant.from_slope(G, 0.0058926, sign=-1)
cert = check_plant(above, "monotone")
dual = build_certificate(above, cert.pair, cert.omega0, "monotone")
print(f"dual weights {dual.lambda_a:.4e}, {dual.lambda_b:.4e}; "
      f"sup of the kernel test {dual.sup_f_minus:.1e}")
