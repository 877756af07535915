"""ALC reasoning by tableau and by categorical saturation, linked by certificates."""
from .category import (
    FULL, WEAK_CONJUNCTION, WEAK_NEGATION, OntologyCategory, UniverseConfig, build_universe,
    category_of, decide_cat_unsat, enable_rules, export_dot, has_arrow, saturate,
)
from .certificate import (
    Certificate, CheckResult, NoCertificate, check_certificate, extract_certificate,
)
from .semantics import BudgetExceeded, Interpretation, eval_concept, find_model, satisfies
from .syntax import (
    BOT, TOP, GCI, And, Concept, Exists, Forall, Name, Not, Ontology, Or, ParseError,
    Signature, canonicalize, nnf, parse_concept, parse_ontology, print_concept,
)
from .tableau import decide_sat, entails

__all__ = [
    "FULL", "WEAK_CONJUNCTION", "WEAK_NEGATION", "OntologyCategory", "UniverseConfig",
    "build_universe", "category_of", "decide_cat_unsat", "enable_rules", "export_dot",
    "has_arrow", "saturate", "Certificate", "CheckResult", "NoCertificate",
    "check_certificate", "extract_certificate", "BudgetExceeded", "Interpretation",
    "eval_concept", "find_model", "satisfies", "BOT", "TOP", "GCI", "And", "Concept",
    "Exists", "Forall", "Name", "Not", "Ontology", "Or", "ParseError", "Signature",
    "canonicalize", "nnf", "parse_concept", "parse_ontology", "print_concept", "decide_sat",
    "entails",
]
