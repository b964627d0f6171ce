"""Weyl tensors of 4-manifolds, annihilating vectors and Petrov types across the signature bridge."""

from .annihilator import (
    AnnihilatorSolution,
    NormalFormParams,
    exclusion_certificate,
    solve_frame_tensor,
    solve_lorentzian,
    solve_riemannian,
    ten_equation_residual,
)
from .chart import MetricChart, bridge_metric, conformal_rescale, load_chart, metric_jets, parse_metric
from .curvature import Curvature4Tensor, curvature_at, orthonormal_frame
from .errors import ChartSyntaxError, ContractViolation, EvaluationDomainError, WeylBridgeError
from .expr import parse_expr
from .petrov import ComplexWeyl3, canonical_eigenplanes, classify, normal_form_fixture
from .quadform import (
    BergerThorpeForm,
    CriticalPoint,
    berger_thorpe_normal_form,
    count_spacelike_critical_points,
    lorentz_form,
    lorentz_weyl_via_riemann_bridge,
    riemannian_form,
)
from .registry import builtin
from .weylop import WeylOperator6, annihilates, bridge_operator, build_operator, commutes_with_star

__version__ = "0.1.0"

__all__ = [
    "AnnihilatorSolution", "BergerThorpeForm", "ChartSyntaxError", "ComplexWeyl3", "ContractViolation",
    "CriticalPoint", "Curvature4Tensor", "EvaluationDomainError", "MetricChart", "NormalFormParams",
    "WeylBridgeError", "WeylOperator6", "annihilates", "berger_thorpe_normal_form", "bridge_metric",
    "bridge_operator", "build_operator", "builtin", "canonical_eigenplanes", "classify", "commutes_with_star",
    "conformal_rescale", "count_spacelike_critical_points", "curvature_at", "exclusion_certificate",
    "load_chart", "lorentz_form", "lorentz_weyl_via_riemann_bridge", "metric_jets", "normal_form_fixture",
    "orthonormal_frame", "parse_expr", "parse_metric", "riemannian_form", "solve_frame_tensor",
    "solve_lorentzian", "solve_riemannian", "ten_equation_residual",
]
