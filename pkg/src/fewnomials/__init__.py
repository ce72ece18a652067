"""Connected components of real zero sets of fewnomials on the positive orthant."""
from .bounds import (BoundEngine, BoundResult, RuleTable, SpecialCase, anexo_bounds, bound,
                     cuenta_final_bound, descartes_bound, dimcorr_dispatch, khovanski_kprime,
                     kprime_best, p_bound, p_comp_bound, p_non_bound, replay)
from .census import (Census, GridSpec, census_1d, census_grid, census_stabilized,
                     critical_zero_search, isolate_roots_1d, noncompact_census_3d)
from .core import Fewnomial, Term, build, evaluate, evaluate_log, sign_changes
from .errors import FewnomialError
from .estimators import (BoundPredictor, NewtonFeatures, StandardFormNormalizer,
                         ZeroSetCensus, check_fewnomial, check_fewnomials)
from .geometry import hull_and_classify, newton_dimension
from .io import format_fewnomial, parse_fewnomial, parse_fewnomial_file
from .transform import (ChangeOfVariables, apply_change, normalize_to_standard_form,
                        restrict_to_curve, slice_reduction)

__version__ = "0.1.0"

__all__ = [
    "BoundEngine", "anexo_bounds", "cuenta_final_bound", "khovanski_kprime", "kprime_best",
    "p_bound", "p_comp_bound", "p_non_bound", "BoundPredictor", "BoundResult", "Census", "ChangeOfVariables",
    "Fewnomial", "FewnomialError", "GridSpec", "NewtonFeatures", "RuleTable", "SpecialCase",
    "StandardFormNormalizer", "Term", "ZeroSetCensus", "apply_change", "bound", "build",
    "census_1d", "census_grid", "census_stabilized", "check_fewnomial",
    "check_fewnomials", "critical_zero_search", "descartes_bound", "dimcorr_dispatch",
    "evaluate", "evaluate_log", "format_fewnomial", "hull_and_classify", "isolate_roots_1d",
    "newton_dimension", "noncompact_census_3d", "normalize_to_standard_form",
    "parse_fewnomial", "parse_fewnomial_file", "replay", "restrict_to_curve", "sign_changes",
    "slice_reduction",
]
