from collections import deque
from typing import FrozenSet

from phidiag.ltl import BuchiAutomaton, LabelingFunction
from . import logger
from .structures import AugmentedSystem, ConstrainedSystem, TState

__all__ = ["constrain", "feasible_states"]


def constrain(aug: AugmentedSystem, nba: BuchiAutomaton, labeling: LabelingFunction) -> ConstrainedSystem:
    """
    Synchronous product of the augmented system with the NBA: an extended event `e` moves the NBA
    along the edges whose guard holds on `labeling(e)`. Only the reachable part is built.
    """
    initial = frozenset(TState(aug.initial, x) for x in nba.initial)
    states = set(initial)
    transitions: dict[TState, list] = {}
    queue = deque(sorted(initial))
    while queue:
        s = queue.popleft()
        moves = []
        for e, aug_next in aug.successors(s.aug):
            letter = labeling(e)
            for y in sorted(nba.successors(s.x, letter)):
                s_next = TState(aug_next, y)
                moves.append((e, s_next))
                if s_next not in states:
                    states.add(s_next)
                    queue.append(s_next)
        transitions[s] = moves
    t = ConstrainedSystem(
        augmented=aug,
        nba=nba,
        labeling=labeling,
        states=frozenset(states),
        initial=initial,
        transitions=transitions,
    )
    logger.info(f"Observation constrained system: {t.stats()}")
    return t


def feasible_states(t: ConstrainedSystem) -> FrozenSet[TState]:
    """States of `t` from which some accepting run starts."""
    return t.feasible
