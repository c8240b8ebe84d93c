"""Steady-state parametrization of reaction networks with mixed kinetics."""

from .decomposition import Decomposition, finest_independent_decomposition, restrict_kinetics
from .dsl import Model, parse_model, parse_network, render_expr, render_network
from .errors import (ConfigurationError, CRNError, EvaluationError, MergeContradiction, MethodInapplicable,
                     ParseError, StructuralError)
from .kinetics import KineticAssignment, mass_action_kinetics
from .merge import acr_report, merge_parametrizations
from .mixed import clear_denominators, solve_by_elimination
from .network import Network, Reaction, deficiency
from .parametrization import Parametrization, parametrize, tree_constants
from .pipeline import run_pipeline
from .translation import check_translation, search_translation, translate
from .verify import parametrization_from_expressions, residual_harness

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError", "CRNError", "Decomposition", "EvaluationError", "KineticAssignment", "MergeContradiction",
    "MethodInapplicable", "Model", "Network", "Parametrization", "ParseError", "Reaction", "StructuralError",
    "acr_report", "check_translation", "clear_denominators", "deficiency", "finest_independent_decomposition",
    "mass_action_kinetics", "merge_parametrizations", "parametrization_from_expressions", "parametrize",
    "parse_model", "parse_network", "render_expr", "render_network", "residual_harness", "restrict_kinetics",
    "run_pipeline", "search_translation", "translate", "tree_constants",
]
