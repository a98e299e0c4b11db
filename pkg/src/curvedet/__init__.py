"""Space curves through the determinants det(a^(k), a^(k+1), a^(k+2)).

Truncated Taylor jets, curve specifications, Frenet apparatus, determinant
classification, intrinsic generation and geometric estimators.
"""

from .analyze import AxisEstimate, DegenerateError, SphereFit, estimate_axis, fit_sphere
from .classify import ClassificationReport, KappaTauMatrix, classify_curve, det_family
from .curves import CurveSpec, SampledCurve, SpecError, eval_curve_jets
from .expr import ExprError, parse_expression
from .frenet import FrenetData, frenet_apparatus, reparametrize_by_arclength
from .generate import SalkowskiParams, integrate_frenet, salkowski_curve, tangent_indicatrix
from .jets import Jet, JetDomainError, VecJet

__version__ = "0.1.0"

__all__ = [
    "AxisEstimate", "ClassificationReport", "CurveSpec", "DegenerateError", "ExprError",
    "FrenetData", "Jet", "JetDomainError", "KappaTauMatrix", "SalkowskiParams",
    "SampledCurve", "SpecError", "SphereFit", "VecJet", "classify_curve", "det_family",
    "estimate_axis", "eval_curve_jets", "fit_sphere", "frenet_apparatus",
    "integrate_frenet", "parse_expression", "reparametrize_by_arclength",
    "salkowski_curve", "tangent_indicatrix",
]
