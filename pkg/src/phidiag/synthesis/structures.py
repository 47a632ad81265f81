from dataclasses import dataclass
from functools import cached_property
from typing import FrozenSet, Generic, Mapping, NewType, Optional, TypeVar

import networkx as nx
from zuper_commons.types import ZValueError

from phidiag import PhiDiagConstants
from phidiag.graphs import backward_closure, cyclic_nodes
from phidiag.ltl import BuchiAutomaton, LabelingFunction
from phidiag.models import EventPair, ExtendedEvent, PlantModel, State
from phidiag.utils_toolz import fvalmap

__all__ = [
    "FaultLabel",
    "NORMAL",
    "FAULTY",
    "AugState",
    "TState",
    "VState",
    "AugmentedSystem",
    "ConstrainedSystem",
    "VerificationSystem",
]

FaultLabel = NewType("FaultLabel", str)
NORMAL = FaultLabel("N")
FAULTY = FaultLabel("F")

S = TypeVar("S")
E = TypeVar("E")


@dataclass(frozen=True, order=True)
class AugState:
    """A plant state with the label telling whether a fault already occurred."""

    q: State
    label: FaultLabel

    @property
    def faulty(self) -> bool:
        return self.label == FAULTY

    def __str__(self) -> str:
        return f"{self.q}{self.label}"


@dataclass(frozen=True, order=True)
class TState:
    """A state of the observation constrained system: augmented state and NBA state."""

    aug: AugState
    x: str

    @property
    def faulty(self) -> bool:
        return self.aug.faulty

    def __str__(self) -> str:
        return f"({self.aug},{self.x})"


@dataclass(frozen=True, order=True)
class VState:
    """A state of the verification system, one constrained state per copy."""

    first: TState
    second: TState

    def __str__(self) -> str:
        return f"({self.first},{self.second})"


class _System(Generic[S, E]):
    states: FrozenSet[S]
    transitions: Mapping[S, tuple[tuple[E, S], ...]]

    def successors(self, s: S) -> tuple[tuple[E, S], ...]:
        """Outgoing `(event, successor)` moves, sorted."""
        return self.transitions.get(s, ())

    @cached_property
    def n_edges(self) -> int:
        return sum(len(v) for v in self.transitions.values())

    def as_graph(self) -> nx.MultiDiGraph:
        """The transition structure, one edge per event with the event stored under `event`."""
        g = nx.MultiDiGraph()
        g.add_nodes_from(sorted(self.states))
        for s in sorted(self.transitions):
            for ev, s_next in self.transitions[s]:
                g.add_edge(s, s_next, event=ev)
        return g


def _freeze(transitions: Mapping) -> Mapping:
    return fvalmap(tuple, transitions)


def _check_closed(states: FrozenSet, transitions: Mapping, what: str) -> None:
    for s, moves in transitions.items():
        if s not in states or any(s_next not in states for _, s_next in moves):
            raise ZValueError(f"The transitions of the {what} leave its state set", state=s)


@dataclass(frozen=True)
class AugmentedSystem(_System[AugState, ExtendedEvent]):
    """The plant over extended events, tracking fault occurrence in the state label."""

    model: PlantModel
    """The plant (observation sets already reshaped by the constraint)"""
    states: FrozenSet[AugState]
    initial: AugState
    transitions: Mapping[AugState, tuple[tuple[ExtendedEvent, AugState], ...]]

    def __post_init__(self):
        object.__setattr__(self, "transitions", _freeze(self.transitions))
        if PhiDiagConstants.checks:
            _check_closed(self.states, self.transitions, "augmented system")

    def stats(self) -> dict[str, int]:
        return {"states": len(self.states), "edges": self.n_edges}


@dataclass(frozen=True)
class ConstrainedSystem(_System[TState, ExtendedEvent]):
    """Product of the augmented system with the constraint NBA."""

    augmented: AugmentedSystem
    nba: BuchiAutomaton
    labeling: LabelingFunction
    states: FrozenSet[TState]
    initial: FrozenSet[TState]
    transitions: Mapping[TState, tuple[tuple[ExtendedEvent, TState], ...]]

    def __post_init__(self):
        object.__setattr__(self, "transitions", _freeze(self.transitions))
        if PhiDiagConstants.checks:
            _check_closed(self.states, self.transitions, "constrained system")

    @property
    def model(self) -> PlantModel:
        return self.augmented.model

    @cached_property
    def accepting(self) -> FrozenSet[TState]:
        return frozenset(s for s in self.states if s.x in self.nba.accepting)

    @cached_property
    def feasible(self) -> FrozenSet[TState]:
        """States from which an accepting run exists: they reach an accepting state lying on a cycle."""
        g = self.as_graph()
        seeds = self.accepting & cyclic_nodes(g)
        return backward_closure(g, seeds)

    @cached_property
    def faulty_states(self) -> FrozenSet[TState]:
        return frozenset(s for s in self.states if s.faulty)

    @cached_property
    def normal_states(self) -> FrozenSet[TState]:
        return self.states - self.faulty_states

    def stats(self) -> dict[str, int]:
        return {
            "states": len(self.states),
            "edges": self.n_edges,
            "accepting": len(self.accepting),
            "feasible": len(self.feasible),
        }


@dataclass(frozen=True)
class VerificationSystem(_System[VState, EventPair]):
    """Twin copy of the constrained system synchronized on equal visible outputs."""

    constrained: ConstrainedSystem
    states: FrozenSet[VState]
    initial: FrozenSet[VState]
    transitions: Mapping[VState, tuple[tuple[EventPair, VState], ...]]
    accepting: FrozenSet[VState]
    """Faulty accepting first copy, feasible normal second copy"""

    def __post_init__(self):
        object.__setattr__(self, "transitions", _freeze(self.transitions))
        if PhiDiagConstants.checks:
            _check_closed(self.states, self.transitions, "verification system")
            if not self.accepting <= self.states:
                raise ZValueError("Accepting states must be states of the verification system")

    def find(self, name: str) -> Optional[VState]:
        """Looks a state up by its rendering, e.g. `((3F,B),(7N,A))`."""
        for s in self.states:
            if str(s) == name:
                return s
        return None

    def stats(self) -> dict[str, int]:
        return {"states": len(self.states), "edges": self.n_edges, "accepting": len(self.accepting)}
