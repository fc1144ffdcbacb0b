"""Schrodinger operators on [0, 1] and their de Branges functions."""
from .functions import ClosedFormDB, DeBrangesFunction, SchrodingerDB, free_db
from .potential import Potential, PotentialError, as_potential
from .schrodinger import (ShootingError, ShootingResult, count_below, evaluate_AB,
                          positivity_shift, solve_shooting)
from .spectra import (AsymptoticFit, PhaseData, SpectrumError, SpectrumPair, asymptotic_fit,
                      compute_spectra, phase, spectra_from_phase, sqrt_transform, theta,
                      weyl_m)
from .products import (CanonicalProduct, ProductDB, ZeroSequence, canonical_products,
                       derivative_at_zeros, eval_product, leading_constant, ratio_to_trig,
                       value_and_derivative_at_zeros)
from .paley_wiener import (BandlimitedSamples, MembershipReport, cardinal_eval,
                           pw_membership_test, riesz_expand, sample)
from .characterization import (ConstructedDB, PairingFunction, Verdict, check_pair,
                               check_schrodinger_L2, construct_from_f, pairing_eval,
                               perturbed_zero_solve)
from .resonances import (ResonanceSet, certify_strip, count_zeros_rect, find_resonances,
                         remark5_fixture)

__version__ = "0.1.0"
