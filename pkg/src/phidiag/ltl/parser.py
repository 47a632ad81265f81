from typing import Collection, Optional

from lark import Lark, Transformer
from lark.exceptions import UnexpectedEOF, UnexpectedInput, UnexpectedToken
from zuper_commons.types import ZValueError

from .formula import (
    Always,
    And,
    Atom,
    Eventually,
    FALSE,
    Implies,
    LtlFormula,
    Next,
    Not,
    Or,
    TRUE,
    Until,
    atoms,
)

__all__ = ["LtlSyntaxError", "parse_ltl", "IDENTIFIER_PATTERN"]

IDENTIFIER_PATTERN = r"[A-Za-z_](?:[A-Za-z0-9_^]|\{[A-Za-z0-9_^(),]*\})*"
""" Atom names. Parentheses and commas are only allowed inside braces, as in `m_1^{(q,sigma)}`. """

GRAMMAR = r"""
?start: implication

?implication: disjunction
    | disjunction "->" implication -> implies

?disjunction: conjunction
    | disjunction "|" conjunction -> or_

?conjunction: until
    | conjunction "&" until -> and_

?until: unary
    | unary "U" until -> until

?unary: primary
    | "!" unary -> not_
    | "X" unary -> next_
    | "F" unary -> eventually
    | "G" unary -> always

?primary: "true" -> true
    | "false" -> false
    | IDENT -> atom
    | "(" implication ")"

IDENT: /%s/

%%import common.WS
%%ignore WS
""" % IDENTIFIER_PATTERN


class LtlSyntaxError(ZValueError):
    def __init__(self, msg: str, position: int, **kwargs):
        super().__init__(msg, position=position, **kwargs)
        self.position = position


class _ToTree(Transformer):
    def true(self, _):
        return TRUE

    def false(self, _):
        return FALSE

    def atom(self, items):
        return Atom(str(items[0]))

    def not_(self, items):
        return Not(items[0])

    def next_(self, items):
        return Next(items[0])

    def eventually(self, items):
        return Eventually(items[0])

    def always(self, items):
        return Always(items[0])

    def until(self, items):
        return Until(items[0], items[1])

    def and_(self, items):
        return And(items[0], items[1])

    def or_(self, items):
        return Or(items[0], items[1])

    def implies(self, items):
        return Implies(items[0], items[1])


_PARSER = Lark(GRAMMAR, parser="lalr", start="start")


def _describe(e: UnexpectedInput, text: str) -> tuple[str, int]:
    at_end = isinstance(e, UnexpectedEOF) or (isinstance(e, UnexpectedToken) and e.token.type == "$END")
    if at_end:
        return "Syntax error at end of input", len(text)
    pos = getattr(e, "pos_in_stream", None)
    pos = len(text) if pos is None else pos
    return f"Syntax error at position {pos} (line {e.line}, column {e.column})", pos


def parse_ltl(text: str, ap_universe: Optional[Collection[str]] = None) -> LtlFormula:
    """
    Parses the concrete syntax `true|false|<ident>|!f|f&f|f|f|f->f|X f|F f|G f|f U f|(f)`.
    Precedence from tightest: `!` and the unary temporal operators, `U`, `&`, `|`, `->`;
    `->` and `U` associate to the right.
    :param text: the formula
    :param ap_universe: declared atoms; None declares exactly the atoms that occur
    :return: the formula
    """
    try:
        tree = _ToTree().transform(_PARSER.parse(text))
    except UnexpectedInput as e:
        msg, pos = _describe(e, text)
        raise LtlSyntaxError(msg, position=pos, text=text) from e
    ap = atoms(tree) if ap_universe is None else frozenset(ap_universe)
    return LtlFormula(tree, ap)
