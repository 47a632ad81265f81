from collections import deque
from typing import Iterable

from phidiag.models import EventPair, ExtendedEvent, ExtendedString
from phidiag.utils_toolz import fgroupby
from . import logger
from .structures import ConstrainedSystem, TState, VState, VerificationSystem

__all__ = ["build_verifier", "project_pair"]


def _visible_by_output(t: ConstrainedSystem, s: TState):
    return fgroupby(lambda m: m[0].o, (m for m in t.successors(s) if not m[0].silent))


def build_verifier(t: ConstrainedSystem) -> VerificationSystem:
    """
    Twin product of `t` with itself. Visible moves are taken jointly when both copies show the same
    output; a silent move is taken by one copy while the other stays put. Both copies never move
    silently at the same time. Only the part reachable from the initial pairs is built.
    """
    initial = frozenset(VState(a, b) for a in t.initial for b in t.initial)
    feasible = t.feasible
    states = set(initial)
    transitions: dict[VState, list] = {}
    queue = deque(sorted(initial))
    while queue:
        v = queue.popleft()
        moves: list[tuple[EventPair, VState]] = []
        second_visible = _visible_by_output(t, v.second)
        for e1, s1 in t.successors(v.first):
            if e1.silent:
                moves.append((EventPair(e1, None), VState(s1, v.second)))
                continue
            for e2, s2 in second_visible.get(e1.o, ()):
                moves.append((EventPair(e1, e2), VState(s1, s2)))
        for e2, s2 in t.successors(v.second):
            if e2.silent:
                moves.append((EventPair(None, e2), VState(v.first, s2)))
        moves.sort(key=lambda m: (m[0].sort_key, m[1]))
        for _, v_next in moves:
            if v_next not in states:
                states.add(v_next)
                queue.append(v_next)
        transitions[v] = moves

    accepting = frozenset(
        v
        for v in states
        if v.first.faulty and v.first in t.accepting and not v.second.faulty and v.second in feasible
    )
    vs = VerificationSystem(
        constrained=t, states=frozenset(states), initial=initial, transitions=transitions, accepting=accepting
    )
    logger.info(f"Verification system: {vs.stats()}")
    return vs


def project_pair(string: Iterable[EventPair]) -> tuple[ExtendedString, ExtendedString]:
    """The two extended strings run by the copies, silent sides dropped."""
    first: list[ExtendedEvent] = []
    second: list[ExtendedEvent] = []
    for pair in string:
        if pair.first is not None:
            first.append(pair.first)
        if pair.second is not None:
            second.append(pair.second)
    return tuple(first), tuple(second)
