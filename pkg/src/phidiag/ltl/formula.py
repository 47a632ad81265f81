from dataclasses import dataclass
from functools import reduce
from typing import FrozenSet, Iterable, Iterator

from zuper_commons.types import ZValueError

from phidiag import PhiDiagConstants

__all__ = [
    "Ltl",
    "LtlTrue",
    "LtlFalse",
    "Atom",
    "Not",
    "And",
    "Or",
    "Implies",
    "Next",
    "Until",
    "Eventually",
    "Always",
    "Release",
    "TRUE",
    "FALSE",
    "LtlFormula",
    "UndeclaredAtomError",
    "conj",
    "disj",
    "children",
    "subformulas",
    "atoms",
    "formula_size",
    "temporal_depth",
    "to_string",
    "to_nnf",
]


@dataclass(frozen=True)
class Ltl:
    pass


@dataclass(frozen=True)
class LtlTrue(Ltl):
    pass


@dataclass(frozen=True)
class LtlFalse(Ltl):
    pass


@dataclass(frozen=True)
class Atom(Ltl):
    name: str


@dataclass(frozen=True)
class Not(Ltl):
    operand: Ltl


@dataclass(frozen=True)
class Next(Ltl):
    operand: Ltl


@dataclass(frozen=True)
class Eventually(Ltl):
    operand: Ltl


@dataclass(frozen=True)
class Always(Ltl):
    operand: Ltl


@dataclass(frozen=True)
class And(Ltl):
    left: Ltl
    right: Ltl


@dataclass(frozen=True)
class Or(Ltl):
    left: Ltl
    right: Ltl


@dataclass(frozen=True)
class Implies(Ltl):
    left: Ltl
    right: Ltl


@dataclass(frozen=True)
class Until(Ltl):
    left: Ltl
    right: Ltl


@dataclass(frozen=True)
class Release(Ltl):
    """Dual of Until. Only produced by `to_nnf`, the concrete syntax has no release operator."""

    left: Ltl
    right: Ltl


TRUE = LtlTrue()
FALSE = LtlFalse()

_UNARY = (Not, Next, Eventually, Always)
_BINARY = (And, Or, Implies, Until, Release)


class UndeclaredAtomError(ZValueError):
    pass


@dataclass(frozen=True)
class LtlFormula:
    """A formula together with the atomic propositions it is declared over."""

    tree: Ltl
    ap: FrozenSet[str]
    """Declared atomic propositions, a superset of the atoms in the tree"""

    def __post_init__(self):
        object.__setattr__(self, "ap", frozenset(self.ap))
        if PhiDiagConstants.checks:
            undeclared = atoms(self.tree) - self.ap
            if undeclared:
                raise UndeclaredAtomError("Undeclared atoms", undeclared=sorted(undeclared), ap=sorted(self.ap))

    def __str__(self) -> str:
        return to_string(self.tree)


def conj(items: Iterable[Ltl]) -> Ltl:
    """Left-nested conjunction, `true` when empty."""
    items = list(items)
    return reduce(And, items) if items else TRUE


def disj(items: Iterable[Ltl]) -> Ltl:
    """Left-nested disjunction, `false` when empty."""
    items = list(items)
    return reduce(Or, items) if items else FALSE


def children(f: Ltl) -> tuple[Ltl, ...]:
    if isinstance(f, _UNARY):
        return (f.operand,)
    if isinstance(f, _BINARY):
        return f.left, f.right
    return ()


def subformulas(f: Ltl) -> Iterator[Ltl]:
    """Pre-order traversal, duplicates included."""
    yield f
    for c in children(f):
        yield from subformulas(c)


def atoms(f: Ltl) -> FrozenSet[str]:
    return frozenset(g.name for g in subformulas(f) if isinstance(g, Atom))


def formula_size(f: Ltl) -> int:
    """Number of nodes of the syntax tree, constants and atoms included."""
    # counting operators alone gives `X p` a size of 1 and a bound of 2, yet its automaton needs 3 states
    return 1 + sum(formula_size(c) for c in children(f))


def temporal_depth(f: Ltl) -> int:
    own = 1 if isinstance(f, (Next, Eventually, Always, Until, Release)) else 0
    return own + max((temporal_depth(c) for c in children(f)), default=0)


_SYMBOLS = {And: "&", Or: "|", Implies: "->", Until: "U", Release: "R"}
_PREFIX = {Not: "!", Next: "X ", Eventually: "F ", Always: "G "}


def to_string(f: Ltl) -> str:
    """Concrete syntax with every binary operator parenthesized.
    Parsing the result gives back the same tree (Release excepted)."""
    if isinstance(f, LtlTrue):
        return "true"
    if isinstance(f, LtlFalse):
        return "false"
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, _UNARY):
        return _PREFIX[type(f)] + to_string(f.operand)
    if isinstance(f, _BINARY):
        return f"({to_string(f.left)} {_SYMBOLS[type(f)]} {to_string(f.right)})"
    raise ZValueError("Unsupported LTL construct", formula=f)


def to_nnf(f: Ltl) -> Ltl:
    """Negation normal form over true, false, literals, &, |, X, U and Release.
    Implications and the F/G abbreviations are expanded on the way."""
    if isinstance(f, (LtlTrue, LtlFalse, Atom)):
        return f
    if isinstance(f, And):
        return And(to_nnf(f.left), to_nnf(f.right))
    if isinstance(f, Or):
        return Or(to_nnf(f.left), to_nnf(f.right))
    if isinstance(f, Implies):
        return Or(_negated_nnf(f.left), to_nnf(f.right))
    if isinstance(f, Next):
        return Next(to_nnf(f.operand))
    if isinstance(f, Until):
        return Until(to_nnf(f.left), to_nnf(f.right))
    if isinstance(f, Release):
        return Release(to_nnf(f.left), to_nnf(f.right))
    if isinstance(f, Eventually):
        return Until(TRUE, to_nnf(f.operand))
    if isinstance(f, Always):
        return Release(FALSE, to_nnf(f.operand))
    if isinstance(f, Not):
        return _negated_nnf(f.operand)
    raise ZValueError("Unsupported LTL construct", formula=f)


def _negated_nnf(f: Ltl) -> Ltl:
    """NNF of the negation of `f`."""
    if isinstance(f, LtlTrue):
        return FALSE
    if isinstance(f, LtlFalse):
        return TRUE
    if isinstance(f, Atom):
        return Not(f)
    if isinstance(f, Not):
        return to_nnf(f.operand)
    if isinstance(f, And):
        return Or(_negated_nnf(f.left), _negated_nnf(f.right))
    if isinstance(f, Or):
        return And(_negated_nnf(f.left), _negated_nnf(f.right))
    if isinstance(f, Implies):
        return And(to_nnf(f.left), _negated_nnf(f.right))
    if isinstance(f, Next):
        return Next(_negated_nnf(f.operand))
    if isinstance(f, Until):
        return Release(_negated_nnf(f.left), _negated_nnf(f.right))
    if isinstance(f, Release):
        return Until(_negated_nnf(f.left), _negated_nnf(f.right))
    if isinstance(f, Eventually):
        return Release(FALSE, _negated_nnf(f.operand))
    if isinstance(f, Always):
        return Until(TRUE, _negated_nnf(f.operand))
    raise ZValueError("Unsupported LTL construct", formula=f)
