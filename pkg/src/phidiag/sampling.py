from typing import Optional, Sequence

import numpy as np

from phidiag.ltl import (
    Always,
    And,
    Atom,
    Eventually,
    FALSE,
    Implies,
    Letter,
    Ltl,
    Next,
    Not,
    Or,
    SensorConstraint,
    TRUE,
    Until,
    Word,
)
from phidiag.models import EPSILON, Lasso, PlantModel
from phidiag.templates import (
    DwellTimeSpec,
    IntermittentPermanentSpec,
    KLossSpec,
    OutputFairnessSpec,
    ScenarioSpec,
    build_scenario,
)

__all__ = [
    "random_plant",
    "random_scenario",
    "random_constraint",
    "random_formula",
    "random_word",
]

_EVENTS = ("f", "a", "b", "c", "d", "e")
_OUTPUTS = ("o1", "o2", "o3")


def _pick(rng: np.random.Generator, items: Sequence, k: int) -> list:
    idx = rng.choice(len(items), size=k, replace=False)
    return [items[i] for i in sorted(idx)]


def random_plant(
    rng: np.random.Generator, max_states: int = 5, max_events: int = 4, max_outputs: int = 2
) -> PlantModel:
    """A live plant with fault event `f`; every transition gets a random non-empty observation set."""
    n = int(rng.integers(2, max_states + 1))
    states = [str(i) for i in range(1, n + 1)]
    events = list(_EVENTS[: int(rng.integers(2, max_events + 1))])
    outputs = list(_OUTPUTS[: int(rng.integers(1, max_outputs + 1))])
    choices = outputs + [EPSILON]
    rows = []
    for q in states:
        for sigma in _pick(rng, events, int(rng.integers(1, len(events) + 1))):
            target = states[int(rng.integers(n))]
            outs = _pick(rng, choices, int(rng.integers(1, len(choices) + 1)))
            rows.append((q, sigma, target, outs))
    return PlantModel.from_transitions(rows, initial="1", fault_events=["f"], states=states, events=events)


def random_scenario(rng: np.random.Generator, model: PlantModel) -> Optional[ScenarioSpec]:
    """A small template instance on the plant, or None for the constraint `true`."""
    kind = int(rng.integers(5))
    transitions = sorted(model.transitions)
    events = sorted(model.events)
    if kind == 0:
        return None
    if kind == 1:
        order = [transitions[i] for i in rng.permutation(len(transitions))]
        n_per = int(rng.integers(0, min(2, len(order)) + 1))
        per, rest = order[:n_per], order[n_per:]
        classes: list[list] = [[], [], []]
        for t in rest:
            classes[int(rng.integers(3))].append(t)
        return IntermittentPermanentSpec(
            t_uo=frozenset(classes[0]),
            t_o=frozenset(classes[1]),
            t_int=frozenset(classes[2]),
            t_per=frozenset(per),
            per_event=bool(rng.integers(2)),
        )
    if kind == 2:
        slots: list[list] = [[], [], []]
        for sigma in events:
            slots[int(rng.integers(3))].append(sigma)
        channels = [frozenset(c) for c in slots[1:] if c]
        if not channels:
            channels = [frozenset(slots[0][:1])]
            slots[0] = slots[0][1:]
        bounds = tuple(None if rng.random() < 0.2 else int(rng.integers(2)) for _ in channels)
        return KLossSpec(sigma_uo=frozenset(slots[0]), channels=tuple(channels), bounds=bounds)
    if kind == 3:
        slots = [[], [], []]
        for sigma in events:
            slots[int(rng.integers(3))].append(sigma)
        return DwellTimeSpec(
            sigma_o=frozenset(slots[0]),
            sigma_uo=frozenset(slots[1]),
            sigma_ur=frozenset(slots[2]),
            k_n=int(rng.integers(1, 3)),
            k_f=int(rng.integers(1, 3)),
        )
    fair = _pick(rng, transitions, int(rng.integers(1, min(2, len(transitions)) + 1)))
    return OutputFairnessSpec(t_fair=frozenset(fair))


def random_constraint(rng: np.random.Generator, model: PlantModel) -> SensorConstraint:
    spec = random_scenario(rng, model)
    return SensorConstraint.trivial() if spec is None else build_scenario(model, spec)


def random_formula(rng: np.random.Generator, atoms: Sequence[str], depth: int = 4) -> Ltl:
    """A random formula of temporal depth at most `depth` over the given atoms."""
    if depth == 0 or rng.random() < 0.25:
        r = rng.random()
        if r < 0.05:
            return TRUE
        if r < 0.1:
            return FALSE
        return Atom(atoms[int(rng.integers(len(atoms)))])
    op = int(rng.integers(9))
    if op < 5:
        unary = (Not, Next, Eventually, Always, Not)[op]
        return unary(random_formula(rng, atoms, depth - 1))
    binary = (And, Or, Implies, Until)[op - 5]
    return binary(random_formula(rng, atoms, depth - 1), random_formula(rng, atoms, depth - 1))


def _random_letter(rng: np.random.Generator, atoms: Sequence[str]) -> Letter:
    return frozenset(a for a in atoms if rng.random() < 0.5)


def random_word(rng: np.random.Generator, atoms: Sequence[str], max_len: int = 6) -> Word:
    """A lasso word with prefix and cycle of at most `max_len` letters (non-empty cycle)."""
    prefix = tuple(_random_letter(rng, atoms) for _ in range(int(rng.integers(0, max_len + 1))))
    cycle = tuple(_random_letter(rng, atoms) for _ in range(int(rng.integers(1, max_len + 1))))
    return Lasso(prefix, cycle)
