"""Contact equivalence of hyperbolic equations ``u_xy = f(x, y, u, ux, uy)``."""
from .catalog import CatalogEntry, get
from .classifier import ClassificationReport, check_Hx, check_Hxy, check_Hy, classify
from .darboux import (
    DarbouxDatum,
    build_Hy_admissible,
    f_from_g,
    f_from_h,
    f_from_theta,
    gauge_g,
    gauge_h,
    induced_target,
    reconstruct_theta,
    verify_determining_system,
)
from .expr import Expr, diff, is_zero, normalize, parse, render
from .jets import JetPoint2, characteristic_apply, total_derivative2, truncated_total_derivative
from .oracle import VerificationReport, check_admissible_numeric, prolong2_numeric, sample_on_equation
from .transforms import (
    AdmissibleTransformation,
    ContactTransform,
    PointEquivalenceTransform,
    apply_point_equivalence,
    check_contact_condition,
    compose,
    invert_point,
    jacobian_nondegenerate,
    prolong_point,
)
from .wave_symmetry import build_wave_symmetry, discrete_catalog, verify_wave_symmetry

__version__ = "0.1.0"
