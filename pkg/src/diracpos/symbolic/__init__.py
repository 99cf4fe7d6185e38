from .expr import EngineError, Expression, Monomial, to_text
from .parser import ExpressionSyntaxError, UnknownSymbolError, parse, parse_corpus
from .rules import canonical_equal, canonicalize, normal_order
from .materialize import materialize
from .derive import check_against_target, derive_position

__all__ = [
    "EngineError",
    "Expression",
    "ExpressionSyntaxError",
    "Monomial",
    "UnknownSymbolError",
    "canonical_equal",
    "canonicalize",
    "check_against_target",
    "derive_position",
    "materialize",
    "normal_order",
    "parse",
    "parse_corpus",
    "to_text",
]
