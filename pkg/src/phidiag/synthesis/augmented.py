from collections import deque

from phidiag.models import ExtendedEvent, PlantModel
from . import logger
from .structures import AugState, AugmentedSystem, FAULTY, NORMAL

__all__ = ["augment"]


def augment(model: PlantModel) -> AugmentedSystem:
    """
    Unfolds the plant over extended events, labeling states N until a fault event fires and F afterwards.
    Only the part reachable from `(q0, N)` is built.
    """
    initial = AugState(model.initial, NORMAL)
    states = {initial}
    transitions: dict[AugState, list] = {}
    queue = deque([initial])
    while queue:
        s = queue.popleft()
        moves = []
        for sigma, q_next in model.outgoing(s.q):
            label = FAULTY if s.faulty or sigma in model.fault_events else NORMAL
            s_next = AugState(q_next, label)
            for o in sorted(model.observations(s.q, sigma)):
                moves.append((ExtendedEvent(s.q, sigma, o), s_next))
            if s_next not in states:
                states.add(s_next)
                queue.append(s_next)
        transitions[s] = moves
    aug = AugmentedSystem(model=model, states=frozenset(states), initial=initial, transitions=transitions)
    logger.info(f"Augmented system: {aug.stats()}")
    return aug
