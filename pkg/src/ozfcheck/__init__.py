"""Frequency-domain phase tests for the existence of Zames-Falb multipliers."""

__version__ = "0.1.0"

from .criterion import (CoprimePair, CriterionConfig, MultiplierClass, SlopeResult,
                        ViolationCertificate, check_plant, critical_slope, enumerate_pairs,
                        forbidden_band, p_value, phase_gap, scan_pair)
from .duality import (DelayFamily, DualityCertificate, GeneralDualityInstance,
                      build_certificate, f_pair_minus, f_pair_plus, verify_general)
from .errors import *  # noqa: F401,F403
from .interval import (EquivalenceProbe, IntervalProblem, equivalence_probe, q_minus, q_plus,
                       rho_bar, rho_bar_odd, rho_c, rho_c_odd)
from .luryesim import (LuryeConfig, SimTrace, StateSpaceWithDelay, nyquist_gain,
                       periodicity_estimate, realize, simulate)
from .multiplier import (DelayCombo, Membership, RationalMultiplier, SuitabilityReport,
                         class_membership, delay_multiplier_phase, is_suitable,
                         phase_bound_check, rational_membership, tight_tau_window)
from .xferfn import (DelayedRational, FrequencyGrid, ShiftedPlant, evaluate, modulo_interval,
                     phase_profile, principal_phase)
