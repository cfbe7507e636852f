"""Geometry of smooth strictly convex normed planes and the associated
Sturm-Liouville/Hill spectral problems."""

__version__ = "0.1.0"

from .profiles import (EllipseProfile, LpProfile, NotRadonError, NormProfile,
                       ProfileError, RadialFourierProfile, RadonGluedProfile,
                       ReconstructedProfile, STANDARD_FORM, SymplecticForm,
                       validate_profile)
from .normcore import (antinorm, birkhoff_tangent, calibrate_radon_scale,
                       gauge, is_birkhoff, minkowski_cosine, minkowski_sine)
from .curves import (ClosedCurve, ScalarPeriodic, antinorm_arclength_param,
                     arclength_param, boundary_curve, circle_length,
                     dual_param, minkowski_curvature_antinorm,
                     radius_of_curvature)
from .cycloid import (ClosureVerdict, SLCoefficients, SLSolution, bi_evolute,
                      closure_check, cycloid_from_radius, evolute,
                      integrate_sl, radon_trig_check, sl_coefficients,
                      support_function)
from .spectral import (ANTIPERIODIC, Monodromy, PERIODIC, Spectrum,
                       discriminant, eigenfunction, eigenvalue_gap_sweep,
                       find_eigenvalues, monodromy)
from .hill import (DiagnosticsReport, HillCoefficient, ReconstructionReport,
                   curvature_identity_check, diagnostics,
                   hill_closed_form_solutions, hill_from_geometry,
                   integrate_hill, reconstruct_geometry, reparam_probe,
                   tangent_advance, wronskian)

__all__ = [name for name in dir() if not name.startswith("_")]
