"""Exact normal-ordered exponential flows on the Weyl-Heisenberg algebra.

The engine computes, order by order in a formal deformation vector k and
with exact rational arithmetic, the flowed momenta J, their deformation
exponents, and the scalar phase series attached to an exponential of a
first-order operator; an independent operator-algebra oracle multiplies the
actual exponentials and checks the normal-ordered result term by term.
"""

__version__ = "0.1.0"

from .expressions import (
    ExpressionError,
    TruncationWarning,
    lower_to_series,
    parse_expression,
    parse_to_series,
    series_to_expression,
)
from .flows import (
    ConsistencyError,
    FlowResult,
    LinearRealization,
    Realization,
    apply_generator,
    compose_momenta,
    compute_flow,
    exponents_from_momenta,
    exponents_via_combinator,
    flow_exponents,
    flow_momenta,
    flow_pde_residual,
    flow_phase,
    flow_third_order,
    generator_flow,
    linear_closed_form,
    phase_pde_residual,
    recover_generator,
)
from .planewaves import (
    CompositionReport,
    NamedRealization,
    PlaneWaveImage,
    act_on_plane_wave,
    builtin_realizations,
    composition_report,
    evaluate_flow,
    power_law_family,
)
from .scalars import GaussianRational
from .schemas import RealizationSpecModel, SpecError
from .series import GradedSeries
from .specfile import load_spec_file, parse_spec_text, spec_to_toml
from .weyl import (
    AlgebraSignature,
    WeylElement,
    bch_reference,
    commutator_tower,
    conjugated_momentum,
    coordinate_exponent,
    exponent_element,
    flow_normal_form,
    scalar_exponent,
    verify_normal_ordering,
)

__all__ = [
    "__version__",
    "AlgebraSignature",
    "CompositionReport",
    "ConsistencyError",
    "ExpressionError",
    "FlowResult",
    "GaussianRational",
    "GradedSeries",
    "LinearRealization",
    "NamedRealization",
    "PlaneWaveImage",
    "Realization",
    "RealizationSpecModel",
    "SpecError",
    "TruncationWarning",
    "WeylElement",
    "act_on_plane_wave",
    "apply_generator",
    "bch_reference",
    "builtin_realizations",
    "commutator_tower",
    "compose_momenta",
    "composition_report",
    "compute_flow",
    "conjugated_momentum",
    "coordinate_exponent",
    "evaluate_flow",
    "exponent_element",
    "exponents_from_momenta",
    "exponents_via_combinator",
    "flow_exponents",
    "flow_momenta",
    "flow_normal_form",
    "flow_pde_residual",
    "flow_phase",
    "flow_third_order",
    "generator_flow",
    "linear_closed_form",
    "load_spec_file",
    "lower_to_series",
    "parse_expression",
    "parse_spec_text",
    "parse_to_series",
    "phase_pde_residual",
    "power_law_family",
    "recover_generator",
    "scalar_exponent",
    "series_to_expression",
    "spec_to_toml",
    "verify_normal_ordering",
]
