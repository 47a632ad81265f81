from dataclasses import dataclass
from typing import Optional

import networkx as nx

from phidiag.graphs import bfs_path, nontrivial_sccs
from phidiag.ltl import BuchiAutomaton, SensorConstraint, ltl_to_nba
from phidiag.models import ExtendedEvent, Lasso, PlantModel, apply_overlay, render_output
from phidiag.synthesis import (
    AugmentedSystem,
    ConstrainedSystem,
    VState,
    VerificationSystem,
    augment,
    build_verifier,
    constrain,
)
from phidiag.time import time_function
from . import logger
from .verdict import Verdict, Witness, render_lasso

__all__ = ["Systems", "build_systems", "decide", "check", "explain"]


@dataclass(frozen=True)
class Systems:
    """Every construction of the pipeline for one plant and constraint."""

    model: PlantModel
    """The plant with the constraint's observation overlay applied"""
    nba: BuchiAutomaton
    augmented: AugmentedSystem
    constrained: ConstrainedSystem
    verifier: VerificationSystem

    def stats(self) -> dict[str, dict[str, int]]:
        return {
            "nba": self.nba.stats(),
            "augmented": self.augmented.stats(),
            "constrained": self.constrained.stats(),
            "verifier": self.verifier.stats(),
        }


def build_systems(model: PlantModel, constraint: SensorConstraint, nba: Optional[BuchiAutomaton] = None) -> Systems:
    """
    Runs the constructions: overlay, translation (skipped when `nba` is given), augmentation,
    product with the NBA and twin verifier.
    """
    shaped = apply_overlay(model, constraint.overlay)
    if nba is None:
        nba = ltl_to_nba(constraint.formula)
    aug = augment(shaped)
    t = constrain(aug, nba, constraint.labeling)
    v = build_verifier(t)
    return Systems(shaped, nba, aug, t, v)


def _moves_faulty_copy(v: VerificationSystem, s: VState, scc) -> bool:
    return any(p.first is not None and s_next in scc for p, s_next in v.successors(s))


def _sources(steps: list, start: VState) -> tuple[str, ...]:
    """Rendered source state of each step."""
    nodes = [start] + [s for _, s in steps[:-1]]
    return tuple(str(s) for s in nodes)


def decide(v: VerificationSystem) -> Optional[Witness]:
    """
    Looks for a reachable cycle through an accepting state that moves the faulty copy.
    Inside a strongly connected component such a cycle exists as soon as the component holds an
    accepting state and an internal edge moving the faulty copy.
    :return: a witness lasso, or None when the system is diagnosable
    """
    g = v.as_graph()
    candidates = {}
    for scc in nontrivial_sccs(g):
        if not (scc & v.accepting):
            continue
        if any(_moves_faulty_copy(v, s, scc) for s in scc):
            for s in scc & v.accepting:
                candidates[s] = scc
    if not candidates:
        return None

    # closest to the initial states, ties lexicographic
    dist = nx.multi_source_dijkstra_path_length(g, set(v.initial))
    anchor = min(candidates, key=lambda s: (dist[s], s))
    found = bfs_path(v.successors, sorted(v.initial), lambda s: s == anchor)
    assert found is not None
    start, prefix = found
    scc = candidates[anchor]
    logger.debug(f"Accepting state {anchor} lies on a cycle moving the faulty copy")

    to_edge = bfs_path(v.successors, [anchor], lambda s: _moves_faulty_copy(v, s, scc), allowed=scc)
    assert to_edge is not None
    _, steps = to_edge
    u = steps[-1][1] if steps else anchor
    edge = next((p, s_next) for p, s_next in v.successors(u) if p.first is not None and s_next in scc)
    back = bfs_path(v.successors, [edge[1]], lambda s: s == anchor, allowed=scc)
    assert back is not None
    cycle = steps + [edge] + back[1]

    word = Lasso(tuple(p for p, _ in prefix), tuple(p for p, _ in cycle))
    states = Lasso(_sources(prefix, start) if prefix else (), _sources(cycle, anchor))
    return Witness(word, states)


@time_function
def check(model: PlantModel, constraint: SensorConstraint, nba: Optional[BuchiAutomaton] = None) -> Verdict:
    """
    Decides whether every fault is eventually detected along the behaviors whose sensor readings
    satisfy the constraint.
    :param model: the plant
    :param constraint: atoms, labeling and formula (and possibly an observation overlay)
    :param nba: an automaton for the formula, bypassing the translation
    :return: the verdict, with a witness when not diagnosable
    """
    systems = build_systems(model, constraint, nba)
    witness = decide(systems.verifier)
    return Verdict(witness is None, witness, systems.stats())


def _stats_lines(verdict: Verdict) -> list[str]:
    return [f"  {name}: " + ", ".join(f"{k}={n}" for k, n in sorted(s.items())) for name, s in verdict.stats.items()]


def explain(verdict: Verdict) -> str:
    """A human readable report of a verdict."""
    if verdict.diagnosable:
        return "\n".join(["Diagnosable.", "Sizes:"] + _stats_lines(verdict)) + "\n"
    w = verdict.witness
    theta1, theta2 = w.theta1, w.theta2
    start = "from initial state" if not w.word.prefix else f"from {w.states.prefix[0]}"
    lines = [
        "Not diagnosable.",
        f"  cycle through {w.states.cycle[0]}, reached {start}",
        f"  faulty run:                   {render_lasso(theta1, ExtendedEvent.short)}",
        f"  indistinguishable normal run: {render_lasso(theta2, ExtendedEvent.short) or '(no move)'}",
        f"  shared observation:           {render_lasso(w.observation, render_output) or '(nothing)'}",
        "Sizes:",
    ]
    return "\n".join(lines + _stats_lines(verdict)) + "\n"
