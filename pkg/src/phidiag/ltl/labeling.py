from dataclasses import dataclass
from typing import Collection, FrozenSet, Mapping, Optional

from frozendict import frozendict
from zuper_commons.types import ZValueError

from phidiag import PhiDiagConstants
from phidiag.models import ExtendedEvent, Output, Transition
from phidiag.utils_toolz import fs, fvalmap
from .formula import LtlFormula, TRUE

__all__ = ["LabelingFunction", "SensorConstraint"]

_EMPTY: FrozenSet[str] = frozenset()


@dataclass(frozen=True)
class LabelingFunction:
    """Maps extended events to the atomic propositions they make true.
    Extended events missing from the table are labeled with the empty set."""

    table: Mapping[ExtendedEvent, FrozenSet[str]]
    ap: FrozenSet[str]

    def __post_init__(self):
        table = fvalmap(fs, {e: v for e, v in self.table.items() if v})
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "ap", fs(self.ap))
        if PhiDiagConstants.checks:
            for e, atoms in table.items():
                if not atoms <= self.ap:
                    raise ZValueError("Label outside the declared atoms", event=e, undeclared=sorted(atoms - self.ap))

    @classmethod
    def empty(cls, ap: Collection[str] = ()) -> "LabelingFunction":
        return cls(frozendict(), frozenset(ap))

    def __call__(self, e: ExtendedEvent) -> FrozenSet[str]:
        return self.table.get(e, _EMPTY)

    def union(self, other: "LabelingFunction") -> "LabelingFunction":
        """Pointwise union of two labelings."""
        table = dict(self.table)
        for e, atoms in other.table.items():
            table[e] = table.get(e, _EMPTY) | atoms
        return LabelingFunction(table, self.ap | other.ap)


@dataclass(frozen=True)
class SensorConstraint:
    """The atoms, labeling and formula describing what the sensors may do.
    Templates may also reshape the observation sets of the plant (`overlay`)."""

    ap: FrozenSet[str]
    labeling: LabelingFunction
    formula: LtlFormula
    overlay: Optional[Mapping[Transition, FrozenSet[Output]]] = None
    """Replacement observation sets, applied to the plant before any construction"""

    def __post_init__(self):
        object.__setattr__(self, "ap", frozenset(self.ap))
        if self.overlay is not None:
            object.__setattr__(self, "overlay", fvalmap(fs, self.overlay))
        if PhiDiagConstants.checks:
            if not self.formula.ap <= self.ap or not self.labeling.ap <= self.ap:
                raise ZValueError(
                    "Formula and labeling must be declared over the constraint atoms",
                    ap=sorted(self.ap),
                    formula_ap=sorted(self.formula.ap),
                    labeling_ap=sorted(self.labeling.ap),
                )

    @classmethod
    def trivial(cls) -> "SensorConstraint":
        """The constraint `true`: every sensor behavior allowed by the observation sets is possible."""
        return cls(frozenset(), LabelingFunction.empty(), LtlFormula(TRUE, frozenset()))
