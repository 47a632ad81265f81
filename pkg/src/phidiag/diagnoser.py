from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, Iterator

from zuper_commons.types import ZException, ZValueError

from phidiag.models import EPSILON, Output
from phidiag.synthesis import ConstrainedSystem, TState

__all__ = [
    "UnknownSymbolError",
    "InfeasibleObservation",
    "ObserverState",
    "init_diagnoser",
    "step",
    "replay",
    "diagnose",
]


class UnknownSymbolError(ZValueError):
    pass


class InfeasibleObservation(ZException):
    """The observation cannot be produced by any behavior satisfying the constraint."""

    def __init__(self, msg: str, index: int, **kwargs):
        super().__init__(msg, index=index, **kwargs)
        self.index = index


@dataclass(frozen=True)
class ObserverState:
    """Belief of the online diagnoser after `steps` observed symbols."""

    belief: FrozenSet[TState]
    """Feasible constrained states consistent with the observation so far"""
    steps: int
    system: ConstrainedSystem = field(repr=False, compare=False)

    @property
    def alarm(self) -> bool:
        """Raised once every consistent state is faulty."""
        return bool(self.belief) and all(s.faulty for s in self.belief)


def _silent_closure(t: ConstrainedSystem, states: Iterable[TState]) -> FrozenSet[TState]:
    closure = set(states)
    todo = list(closure)
    while todo:
        s = todo.pop()
        for e, s_next in t.successors(s):
            if e.silent and s_next not in closure:
                closure.add(s_next)
                todo.append(s_next)
    return frozenset(closure) & t.feasible


def init_diagnoser(t: ConstrainedSystem) -> ObserverState:
    """The belief before anything is observed. An empty belief means the constraint is unsatisfiable on the plant."""
    return ObserverState(_silent_closure(t, t.initial), 0, t)


def step(state: ObserverState, symbol: Output) -> ObserverState:
    """
    Consumes one observed output.
    :raises UnknownSymbolError: the symbol is not an output of the plant
    :raises InfeasibleObservation: no constrained behavior shows this observation
    """
    t = state.system
    if symbol == EPSILON or symbol not in t.model.outputs:
        raise UnknownSymbolError("Unknown output symbol", symbol=symbol, outputs=sorted(t.model.outputs))
    reached = {s_next for s in state.belief for e, s_next in t.successors(s) if e.o == symbol}
    belief = _silent_closure(t, reached)
    if not belief:
        index = state.steps + 1
        raise InfeasibleObservation(f"Observation infeasible at step {index}", index=index, symbol=symbol)
    return ObserverState(belief, state.steps + 1, t)


def replay(t: ConstrainedSystem, stream: Iterable[Output]) -> Iterator[ObserverState]:
    """The initial observer state, then the state after each symbol of the stream."""
    current = init_diagnoser(t)
    if not current.belief:
        raise InfeasibleObservation("No behavior satisfies the constraint", index=0)
    yield current
    for symbol in stream:
        current = step(current, symbol)
        yield current


def diagnose(t: ConstrainedSystem, stream: Iterable[Output]) -> bool:
    """The alarm bit after the whole stream."""
    last = None
    for last in replay(t, stream):
        pass
    return last.alarm
