from dataclasses import dataclass, replace
from typing import Collection, FrozenSet, Mapping, NewType, Optional, Sequence

from zuper_commons.types import ZValueError

from .structures import (
    AnyString,
    Axis,
    EPSILON,
    Event,
    ExtendedEvent,
    Lasso,
    Output,
    PlantModel,
    RESERVED_OUTPUTS,
    State,
    Transition,
)

__all__ = [
    "ViolationKind",
    "UNKNOWN_INITIAL",
    "UNKNOWN_STATE",
    "UNKNOWN_EVENT",
    "UNKNOWN_FAULT",
    "NOT_LIVE",
    "MISSING_OBSERVATION",
    "EXTRA_OBSERVATION",
    "EMPTY_OBSERVATION",
    "UNKNOWN_OUTPUT",
    "RESERVED_OUTPUT",
    "PlantViolation",
    "validate_plant",
    "extended_successors",
    "project",
    "is_faulty",
    "first_fault_index",
    "is_generated",
    "apply_overlay",
    "natural_observation",
    "intermittent_observation",
]

ViolationKind = NewType("ViolationKind", str)
UNKNOWN_INITIAL = ViolationKind("unknown_initial")
UNKNOWN_STATE = ViolationKind("unknown_state")
UNKNOWN_EVENT = ViolationKind("unknown_event")
UNKNOWN_FAULT = ViolationKind("unknown_fault")
NOT_LIVE = ViolationKind("not_live")
MISSING_OBSERVATION = ViolationKind("missing_observation")
EXTRA_OBSERVATION = ViolationKind("extra_observation")
EMPTY_OBSERVATION = ViolationKind("empty_observation")
UNKNOWN_OUTPUT = ViolationKind("unknown_output")
RESERVED_OUTPUT = ViolationKind("reserved_output")


@dataclass(frozen=True)
class PlantViolation:
    kind: ViolationKind
    where: str
    """The offending state, event or transition"""
    message: str

    def __str__(self) -> str:
        return f"[{self.kind}] {self.where}: {self.message}"


def _tr(t: Transition) -> str:
    return f"({t[0]},{t[1]})"


def validate_plant(model: PlantModel) -> list[PlantViolation]:
    """
    Checks every structural assumption on a plant.
    :return: the violations found, empty iff the model is valid.
    """
    found: list[PlantViolation] = []
    if model.initial not in model.states:
        found.append(PlantViolation(UNKNOWN_INITIAL, model.initial, "initial state is not declared"))
    for f in sorted(model.fault_events - model.events):
        found.append(PlantViolation(UNKNOWN_FAULT, f, "fault event is not declared among the events"))
    for o in sorted(model.outputs & RESERVED_OUTPUTS):
        found.append(PlantViolation(RESERVED_OUTPUT, repr(o), "output collides with the silent symbol spelling"))
    for t in sorted(model.transitions):
        q, sigma = t
        q_next = model.transitions[t]
        if q not in model.states:
            found.append(PlantViolation(UNKNOWN_STATE, _tr(t), f"source {q!r} is not declared"))
        if q_next not in model.states:
            found.append(PlantViolation(UNKNOWN_STATE, _tr(t), f"target {q_next!r} is not declared"))
        if sigma not in model.events:
            found.append(PlantViolation(UNKNOWN_EVENT, _tr(t), f"event {sigma!r} is not declared"))
        if t not in model.obs_map:
            found.append(PlantViolation(MISSING_OBSERVATION, _tr(t), "transition has no observation set"))
            continue
        outs = model.obs_map[t]
        if not outs:
            found.append(PlantViolation(EMPTY_OBSERVATION, _tr(t), "observation set is empty"))
        for o in sorted(outs - model.outputs - {EPSILON}):
            found.append(PlantViolation(UNKNOWN_OUTPUT, _tr(t), f"output {o!r} is not declared"))
    for t in sorted(set(model.obs_map) - set(model.transitions)):
        found.append(PlantViolation(EXTRA_OBSERVATION, _tr(t), "observation set given for an undefined transition"))
    for q in sorted(model.states):
        if not model.outgoing(q):
            found.append(PlantViolation(NOT_LIVE, q, "state has no outgoing transition"))
    return found


def extended_successors(model: PlantModel, state: State) -> tuple[tuple[ExtendedEvent, State], ...]:
    """
    Every valid extended event leaving `state`, paired with its successor.
    One entry per (event, output) pair, sorted lexicographically.
    """
    if state not in model.states:
        raise ZValueError("Unknown state", state=state, states=sorted(model.states))
    res = []
    for sigma, q_next in model.outgoing(state):
        for o in sorted(model.observations(state, sigma)):
            res.append((ExtendedEvent(state, sigma, o), q_next))
    return tuple(res)


def _project_seq(seq: Sequence[ExtendedEvent], axis: Axis, raw: bool) -> tuple:
    if axis == Axis.STATE:
        return tuple(e.q for e in seq)
    if axis == Axis.EVENT:
        return tuple(e.sigma for e in seq)
    if axis == Axis.OUTPUT:
        return tuple(e.o for e in seq if raw or e.o != EPSILON)
    raise ZValueError("Unknown axis", axis=axis)


def project(string: AnyString, axis: Axis, raw: bool = False) -> AnyString:
    """
    State, event or output projection of an extended string.
    The output projection drops silent entries unless `raw` is set (debugging only).
    Lassos project to lassos; a silent cycle projects to an empty cycle.
    """
    axis = Axis(axis)
    if isinstance(string, Lasso):
        return Lasso(_project_seq(string.prefix, axis, raw), _project_seq(string.cycle, axis, raw))
    return _project_seq(string, axis, raw)


def first_fault_index(string: AnyString, model: PlantModel) -> Optional[int]:
    """Position of the first fault event, None for normal strings."""
    events = string.prefix + string.cycle if isinstance(string, Lasso) else tuple(string)
    for i, e in enumerate(events):
        if e.sigma in model.fault_events:
            return i
    return None


def is_faulty(string: AnyString, model: PlantModel) -> bool:
    return first_fault_index(string, model) is not None


def _chain(model: PlantModel, seq: Sequence[ExtendedEvent], q: State) -> Optional[State]:
    for e in seq:
        if e.q != q:
            return None
        q_next = model.transitions.get(e.transition)
        if q_next is None or e.o not in model.observations(e.q, e.sigma):
            return None
        q = q_next
    return q


def is_generated(model: PlantModel, string: AnyString, start: Optional[State] = None) -> bool:
    """True iff the string chains through the transition function from `start` (default: the
    initial state) with every output allowed; a lasso's cycle must also close on itself."""
    q = model.initial if start is None else start
    if isinstance(string, Lasso):
        q_loop = _chain(model, string.prefix, q)
        if q_loop is None:
            return False
        return _chain(model, string.cycle, q_loop) == q_loop
    return _chain(model, tuple(string), q) is not None


def apply_overlay(model: PlantModel, overlay: Optional[Mapping[Transition, Collection[Output]]]) -> PlantModel:
    """Replaces the observation sets of the given transitions, declaring any new visible output."""
    if not overlay:
        return model
    for t in overlay:
        if t not in model.transitions:
            raise ZValueError("Observation overlay on an undefined transition", transition=t)
    obs_map = dict(model.obs_map)
    obs_map.update({t: frozenset(v) for t, v in overlay.items()})
    new_outputs = {o for outs in overlay.values() for o in outs if o != EPSILON}
    return replace(model, obs_map=obs_map, outputs=model.outputs | new_outputs)


def natural_observation(model: PlantModel, observable: Collection[Event]) -> Mapping[Transition, FrozenSet[Output]]:
    """Observation sets of the natural projection: observable events are seen as themselves."""
    observable = frozenset(observable)
    return {
        t: frozenset({t[1]}) if t[1] in observable else frozenset({EPSILON}) for t in sorted(model.transitions)
    }


def intermittent_observation(
    model: PlantModel,
    reliable: Collection[Event],
    unreliable: Collection[Event],
    unobservable: Collection[Event],
) -> Mapping[Transition, FrozenSet[Output]]:
    """Observation sets for intermittent loss of observations, from a partition of the events."""
    reliable, unreliable, unobservable = frozenset(reliable), frozenset(unreliable), frozenset(unobservable)
    if (reliable & unreliable) or (reliable & unobservable) or (unreliable & unobservable):
        raise ZValueError(
            "Event classes overlap", reliable=reliable, unreliable=unreliable, unobservable=unobservable
        )
    if reliable | unreliable | unobservable != model.events:
        missing = sorted(model.events - reliable - unreliable - unobservable)
        raise ZValueError("Event classes do not cover the events", missing=missing)
    res = {}
    for t in sorted(model.transitions):
        sigma = t[1]
        if sigma in reliable:
            res[t] = frozenset({sigma})
        elif sigma in unreliable:
            res[t] = frozenset({sigma, EPSILON})
        else:
            res[t] = frozenset({EPSILON})
    return res
