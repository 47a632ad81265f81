from typing import Callable, Collection, FrozenSet, Union

from zuper_commons.types import ZValueError

from phidiag.models import Lasso
from .formula import (
    Always,
    And,
    Atom,
    Eventually,
    Implies,
    Ltl,
    LtlFalse,
    LtlFormula,
    LtlTrue,
    Next,
    Not,
    Or,
    Release,
    Until,
)

__all__ = ["Letter", "Word", "eval_lasso", "letter"]

Letter = FrozenSet[str]
""" A set of atomic propositions holding at one position. """
Word = Lasso[Letter]
""" An ultimately periodic word over sets of atomic propositions. """


def letter(*names: str) -> Letter:
    return frozenset(names)


def _fixpoint(n: int, succ: list[int], step: Callable[[int, bool], bool], start: bool) -> list[bool]:
    """Iterates `vals[i] = step(i, vals[succ[i]])` from the constant `start` until stable."""
    vals = [start] * n
    changed = True
    while changed:
        changed = False
        for i in reversed(range(n)):
            v = step(i, vals[succ[i]])
            if v != vals[i]:
                vals[i] = v
                changed = True
    return vals


def eval_lasso(word: Word, formula: Union[LtlFormula, Ltl]) -> bool:
    """
    Decides `prefix . cycle^omega |= formula`.

    The word is evaluated on its folded representation: position `|prefix|+|cycle|-1` is followed
    by position `|prefix|`. Every subformula gets one truth value per folded position; until
    and eventually are least fixpoints, release and always greatest fixpoints, over that graph.
    """
    word.require_infinite()
    tree = formula.tree if isinstance(formula, LtlFormula) else formula
    n = len(word)
    succ = [word.successor(i) for i in range(n)]
    letters: list[Collection[str]] = [word[i] for i in range(n)]
    memo: dict[Ltl, list[bool]] = {}

    def ev(f: Ltl) -> list[bool]:
        if f in memo:
            return memo[f]
        if isinstance(f, LtlTrue):
            res = [True] * n
        elif isinstance(f, LtlFalse):
            res = [False] * n
        elif isinstance(f, Atom):
            res = [f.name in a for a in letters]
        elif isinstance(f, Not):
            res = [not v for v in ev(f.operand)]
        elif isinstance(f, And):
            res = [a and b for a, b in zip(ev(f.left), ev(f.right))]
        elif isinstance(f, Or):
            res = [a or b for a, b in zip(ev(f.left), ev(f.right))]
        elif isinstance(f, Implies):
            res = [(not a) or b for a, b in zip(ev(f.left), ev(f.right))]
        elif isinstance(f, Next):
            sub = ev(f.operand)
            res = [sub[succ[i]] for i in range(n)]
        elif isinstance(f, Until):
            a, b = ev(f.left), ev(f.right)
            res = _fixpoint(n, succ, lambda i, nxt: b[i] or (a[i] and nxt), start=False)
        elif isinstance(f, Eventually):
            b = ev(f.operand)
            res = _fixpoint(n, succ, lambda i, nxt: b[i] or nxt, start=False)
        elif isinstance(f, Release):
            a, b = ev(f.left), ev(f.right)
            res = _fixpoint(n, succ, lambda i, nxt: b[i] and (a[i] or nxt), start=True)
        elif isinstance(f, Always):
            b = ev(f.operand)
            res = _fixpoint(n, succ, lambda i, nxt: b[i] and nxt, start=True)
        else:
            raise ZValueError("Unsupported LTL construct", formula=f)
        memo[f] = res
        return res

    return ev(tree)[0]
