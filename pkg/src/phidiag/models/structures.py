from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import FrozenSet, Generic, Iterable, Mapping, Optional, TypeVar, Union

from frozendict import frozendict
from zuper_commons.types import ZValueError

from phidiag import PhiDiagConstants

__all__ = [
    "State",
    "Event",
    "Output",
    "Transition",
    "EPSILON",
    "RESERVED_OUTPUTS",
    "render_output",
    "ExtendedEvent",
    "ExtendedString",
    "EventPair",
    "Lasso",
    "AnyString",
    "Axis",
    "PlantModel",
]

State = str
""" Opaque identifier of a plant state. """
Event = str
""" Opaque identifier of an internal event. """
Output = str
""" A sensor output symbol; the empty string is the silent output. """
Transition = tuple[State, Event]
""" A (state, event) pair on which the transition function is defined. """

EPSILON: Output = ""
""" The silent output. Also its concrete spelling in the JSON files. """
RESERVED_OUTPUTS: FrozenSet[str] = frozenset({EPSILON, "~", "eps", "ε"})
""" Spellings that would collide with the silent output in one of the supported formats. """

X = TypeVar("X")


def render_output(o: Output, silent: str = "ε") -> str:
    return silent if o == EPSILON else o


@dataclass(frozen=True, order=True)
class ExtendedEvent:
    """An internal transition bundled with one concrete sensor reading."""

    q: State
    """Source state"""
    sigma: Event
    """Internal event"""
    o: Output
    """Output produced, EPSILON when nothing is observed"""

    @property
    def silent(self) -> bool:
        return self.o == EPSILON

    @property
    def transition(self) -> Transition:
        return self.q, self.sigma

    def short(self, silent: str = "ε") -> str:
        """Compact rendering `σq/o`, e.g. `b3/ε`."""
        return f"{self.sigma}{self.q}/{render_output(self.o, silent)}"

    def __str__(self) -> str:
        return f"({self.q},{self.sigma},{render_output(self.o)})"


ExtendedString = tuple[ExtendedEvent, ...]
""" A finite extended string. """


@dataclass(frozen=True)
class EventPair:
    """An event of the verification system: one extended event per copy, None standing for the silent side."""

    first: Optional[ExtendedEvent]
    second: Optional[ExtendedEvent]

    def __post_init__(self):
        if PhiDiagConstants.checks:
            if self.first is None and self.second is None:
                raise ZValueError("An event pair needs at least one side")
            if self.first is not None and self.second is not None:
                if self.first.silent or self.first.o != self.second.o:
                    raise ZValueError("Joint moves must share a visible output", pair=self)
            else:
                present = self.first if self.first is not None else self.second
                if not present.silent:
                    raise ZValueError("One-sided moves must be silent", pair=self)

    @property
    def observed(self) -> Output:
        present = self.first if self.first is not None else self.second
        return present.o

    @property
    def sort_key(self) -> tuple:
        def side(e: Optional[ExtendedEvent]) -> tuple:
            return (0, "", "", "") if e is None else (1, e.q, e.sigma, e.o)

        return side(self.first), side(self.second)

    def short(self, silent: str = "ε") -> str:
        a = silent if self.first is None else self.first.short(silent)
        b = silent if self.second is None else self.second.short(silent)
        return f"({a},{b})"

    def __str__(self) -> str:
        return self.short()


@dataclass(frozen=True)
class Lasso(Generic[X]):
    """An ultimately periodic word `prefix . cycle^omega`.
    An empty cycle denotes the finite word `prefix`; routines over infinite words reject it."""

    prefix: tuple[X, ...] = ()
    cycle: tuple[X, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))
        object.__setattr__(self, "cycle", tuple(self.cycle))

    @property
    def is_finite(self) -> bool:
        return len(self.cycle) == 0

    def require_infinite(self) -> None:
        if self.is_finite:
            raise ZValueError("An infinite word needs a non-empty cycle", lasso=self)

    def unroll(self, repetitions: int) -> tuple[X, ...]:
        """The finite word `prefix . cycle^repetitions`."""
        return self.prefix + self.cycle * repetitions

    def successor(self, i: int) -> int:
        """Index of the position following `i` in the folded representation."""
        n = len(self.prefix) + len(self.cycle)
        return len(self.prefix) if i + 1 == n else i + 1

    def __len__(self) -> int:
        return len(self.prefix) + len(self.cycle)

    def __getitem__(self, i: int) -> X:
        lp = len(self.prefix)
        return self.prefix[i] if i < lp else self.cycle[i - lp]


AnyString = Union[tuple, Lasso]


class Axis(str, Enum):
    """The three projections of an extended string."""

    STATE = "state"
    EVENT = "event"
    OUTPUT = "output"


@dataclass(frozen=True)
class PlantModel:
    """A finite deterministic partial automaton with fault events and a
    transition-based non-deterministic observation mapping.

    Invariants are not enforced here (see `validate_plant`) so that broken models
    can still be built, inspected and reported on.
    """

    states: FrozenSet[State]
    events: FrozenSet[Event]
    outputs: FrozenSet[Output]
    initial: State
    transitions: Mapping[Transition, State]
    """Partial transition function"""
    fault_events: FrozenSet[Event]
    obs_map: Mapping[Transition, FrozenSet[Output]]
    """Possible outputs of each transition, EPSILON included when the transition may go unobserved"""

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "events", frozenset(self.events))
        object.__setattr__(self, "outputs", frozenset(self.outputs))
        object.__setattr__(self, "fault_events", frozenset(self.fault_events))
        object.__setattr__(self, "transitions", frozendict({tuple(k): v for k, v in self.transitions.items()}))
        object.__setattr__(self, "obs_map", frozendict({tuple(k): frozenset(v) for k, v in self.obs_map.items()}))
        if PhiDiagConstants.checks:
            for name in ("states", "events", "outputs", "fault_events"):
                for item in getattr(self, name):
                    if not isinstance(item, str):
                        raise ZValueError(f"Identifiers in {name} must be strings", item=item)
            if not isinstance(self.initial, str):
                raise ZValueError("The initial state must be a string", initial=self.initial)

    @classmethod
    def from_transitions(
        cls,
        transitions: Iterable[tuple[State, Event, State, Iterable[Output]]],
        initial: State,
        fault_events: Iterable[Event],
        states: Optional[Iterable[State]] = None,
        events: Optional[Iterable[Event]] = None,
        outputs: Optional[Iterable[Output]] = None,
    ) -> "PlantModel":
        """Builds a model from `(source, event, target, outputs)` rows.
        Missing state, event and output sets are inferred from the rows."""
        rows = list(transitions)
        delta = {}
        obs = {}
        for q, sigma, q_next, outs in rows:
            if (q, sigma) in delta and delta[(q, sigma)] != q_next:
                raise ZValueError("Non deterministic transition", state=q, event=sigma)
            delta[(q, sigma)] = q_next
            obs[(q, sigma)] = frozenset(outs)
        if states is None:
            states = {initial} | {q for q, _ in delta} | set(delta.values())
        if events is None:
            events = {sigma for _, sigma in delta} | set(fault_events)
        if outputs is None:
            outputs = {o for outs in obs.values() for o in outs if o != EPSILON}
        return cls(
            states=frozenset(states),
            events=frozenset(events),
            outputs=frozenset(outputs),
            initial=initial,
            transitions=delta,
            fault_events=frozenset(fault_events),
            obs_map=obs,
        )

    @cached_property
    def _outgoing(self) -> Mapping[State, tuple[tuple[Event, State], ...]]:
        out: dict[State, list[tuple[Event, State]]] = {}
        for (q, sigma), q_next in self.transitions.items():
            out.setdefault(q, []).append((sigma, q_next))
        return frozendict({q: tuple(sorted(edges)) for q, edges in out.items()})

    def outgoing(self, q: State) -> tuple[tuple[Event, State], ...]:
        """Defined `(event, successor)` pairs leaving `q`, sorted by event."""
        return self._outgoing.get(q, ())

    def observations(self, q: State, sigma: Event) -> FrozenSet[Output]:
        return self.obs_map.get((q, sigma), frozenset())

    @property
    def observable_outputs(self) -> FrozenSet[Output]:
        """Visible outputs actually produced by some transition."""
        return frozenset(o for outs in self.obs_map.values() for o in outs if o != EPSILON)
