"""Text grammar for likelihood kernels.

    product  :: factor ( ['*' | '/'] factor )*
    factor   :: base [ ('^' | '**') number ]
    base     :: ion | '(' ion ('+' ion)+ ')' | '(' product ')'

A ``/`` negates the exponent of the single factor that follows it. Ions are
registered in order of first appearance.
"""
import logging
from typing import Dict, List, Tuple

import pyparsing as pp

from models.count_models import CountModel
from models.ingest_models import AstFactor, ExpressionAst
from services.core import canonicalize
from services.error_handler import ParseError
from services.formatting import format_count
from services.sanitization_service import sanitization_service

logger = logging.getLogger(__name__)


class _Factors:
    """(ion names, exponent) pairs produced by one piece of the grammar."""

    __slots__ = ("items",)

    def __init__(self, items):
        self.items: List[Tuple[Tuple[str, ...], float]] = list(items)

    def powered(self, k: float) -> "_Factors":
        return _Factors((names, exponent * k) for names, exponent in self.items)


def _ion_action(tokens):
    return _Factors([((tokens[0],), 1.0)])


def _sum_action(s, loc, tokens):
    names = tuple(tokens)
    if len(set(names)) != len(names):
        raise pp.ParseFatalException(s, loc, f"ion repeated inside the sum ({' + '.join(names)})")
    return _Factors([(names, 1.0)])


def _factor_action(tokens):
    base = tokens[0]
    if len(tokens) > 1:
        return base.powered(float(tokens[1]))
    return base


def _product_action(tokens):
    items = list(tokens[0].items)
    for k in range(1, len(tokens), 2):
        op, factor = tokens[k], tokens[k + 1]
        items.extend(factor.items if op == "*" else factor.powered(-1.0).items)
    return _Factors(items)


def _build_grammar() -> pp.ParserElement:
    ion = pp.Regex(r"[A-Za-z_][A-Za-z0-9_]*")
    number = pp.Regex(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")
    lpar, rpar = pp.Suppress("("), pp.Suppress(")")
    caret = pp.Suppress(pp.Literal("**") | pp.Literal("^"))
    exponent = caret + (number | lpar + number + rpar)

    product = pp.Forward()
    sum_form = (lpar + ion + pp.OneOrMore(pp.Suppress("+") + ion) + rpar).set_parse_action(_sum_action)
    group = lpar + product + rpar
    ion_ref = ion.copy().set_parse_action(_ion_action)

    factor = ((sum_form | group | ion_ref) + pp.Optional(exponent)).set_parse_action(_factor_action)
    op = pp.Optional(pp.Literal("*") | pp.Literal("/"), default="*")
    product <<= (factor + pp.ZeroOrMore(op + factor)).set_parse_action(_product_action)
    return product + pp.StringEnd()


_GRAMMAR = _build_grammar()


def parse_ast(text: str) -> ExpressionAst:
    text = sanitization_service.sanitize_expression(text)
    if not text:
        raise ParseError("empty expression", position=0)

    try:
        parsed = _GRAMMAR.parse_string(text)
    except pp.ParseBaseException as e:
        raise ParseError(f"cannot parse expression at column {e.col}: {e.msg}", position=e.loc)

    ions: Dict[str, int] = {}
    merged: Dict[Tuple[int, ...], float] = {}
    for names, exponent in parsed[0].items:
        indices = tuple(sorted(ions.setdefault(name, len(ions)) for name in names))
        if exponent == 0:
            logger.warning(f"Dropping factor ({' + '.join(names)}) with exponent 0")
            continue
        merged[indices] = merged.get(indices, 0.0) + exponent

    factors = []
    for indices, exponent in merged.items():
        if exponent == 0:
            logger.info(f"Factor over ions {indices} cancels out")
            continue
        factors.append(AstFactor(ions=indices, exponent=exponent))
    if not factors:
        raise ParseError("expression has no factors with a non-zero exponent", position=0)

    return ExpressionAst(ions=tuple(ions), factors=tuple(factors))


def parse_expression(text: str) -> CountModel:
    ast = parse_ast(text)
    model = canonicalize(ast.terms(), ions=ast.ions)
    logger.info(f"Parsed expression into a model with n={model.n}, q={model.q}")
    return model


def render(model: CountModel) -> str:
    """Print a model back in the grammar; every ion is written first, zero counts as ``^0``."""
    parts = [f"{name}^{format_count(count)}" for name, count in zip(model.ions, model.a)]
    for j in range(model.q):
        members = [name for name, bit in zip(model.ions, model.pattern(j)) if bit]
        parts.append(f"({'+'.join(members)})^{format_count(model.b[j])}")
    return "*".join(parts)
