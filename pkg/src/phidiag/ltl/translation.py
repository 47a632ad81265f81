from collections import deque
from dataclasses import dataclass, replace
from typing import FrozenSet, Hashable, Iterable

import networkx as nx

from phidiag import logger
from phidiag.graphs import backward_closure, cyclic_nodes
from .buchi import BuchiAutomaton, Guard
from .formula import (
    And,
    Atom,
    Ltl,
    LtlFalse,
    LtlFormula,
    LtlTrue,
    Next,
    Not,
    Or,
    Release,
    Until,
    subformulas,
    to_nnf,
    to_string,
)

__all__ = ["ltl_to_nba"]

# obligations left for the current position; LtlTrue never appears in one
_Obligations = FrozenSet[Ltl]
# (obligations, acceptance counter)
_State = tuple[_Obligations, int]
_Edge = tuple[Guard, Hashable]


@dataclass(frozen=True)
class _Cover:
    """One way of meeting a set of obligations at the current position."""

    positive: FrozenSet[str] = frozenset()
    negative: FrozenSet[str] = frozenset()
    next: _Obligations = frozenset()
    """What remains to hold from the next position on"""
    postponed: FrozenSet[Until] = frozenset()
    """Untils whose right side was deferred"""

    def weaker_than(self, other: "_Cover") -> bool:
        return (
            self.positive <= other.positive
            and self.negative <= other.negative
            and self.next <= other.next
            and self.postponed <= other.postponed
        )

    @property
    def guard(self) -> Guard:
        return Guard(self.positive, self.negative)


def _key(obligations: Iterable[Ltl]) -> tuple[str, ...]:
    return tuple(sorted(to_string(f) for f in obligations))


def _later(cover: _Cover, f: Ltl) -> _Cover:
    return cover if isinstance(f, LtlTrue) else replace(cover, next=cover.next | {f})


def _covers(obligations: _Obligations) -> list[_Cover]:
    """The minimal covers of a conjunction of NNF formulas; subsumed covers are dropped."""
    found: set[_Cover] = set()
    stack = [(obligations, frozenset(), _Cover())]
    while stack:
        todo, done, cover = stack.pop()
        if not todo:
            found.add(cover)
            continue
        eta = min(todo, key=to_string)
        todo = todo - {eta}
        if eta in done or isinstance(eta, LtlTrue):
            stack.append((todo, done, cover))
            continue
        done = done | {eta}
        if isinstance(eta, LtlFalse):
            continue
        if isinstance(eta, Atom):
            if eta.name not in cover.negative:
                stack.append((todo, done, replace(cover, positive=cover.positive | {eta.name})))
        elif isinstance(eta, Not):
            if eta.operand.name not in cover.positive:
                stack.append((todo, done, replace(cover, negative=cover.negative | {eta.operand.name})))
        elif isinstance(eta, And):
            stack.append((todo | {eta.left, eta.right}, done, cover))
        elif isinstance(eta, Or):
            stack.append((todo | {eta.left}, done, cover))
            stack.append((todo | {eta.right}, done, cover))
        elif isinstance(eta, Next):
            stack.append((todo, done, _later(cover, eta.operand)))
        elif isinstance(eta, Until):
            stack.append((todo | {eta.right}, done, cover))
            deferred = replace(_later(cover, eta), postponed=cover.postponed | {eta})
            stack.append((todo | {eta.left}, done, deferred))
        elif isinstance(eta, Release):
            stack.append((todo | {eta.left, eta.right}, done, cover))
            stack.append((todo | {eta.right}, done, _later(cover, eta)))
        else:
            raise AssertionError(eta)
    minimal = [c for c in found if not any(d != c and d.weaker_than(c) for d in found)]
    return sorted(
        minimal,
        key=lambda c: (sorted(c.positive), sorted(c.negative), _key(c.next), _key(c.postponed)),
    )


def _untils(phi: Ltl) -> list[Until]:
    """Until subformulas in textual order, without repetitions."""
    seen: list[Until] = []
    for f in subformulas(phi):
        if isinstance(f, Until) and f not in seen:
            seen.append(f)
    return seen


def _drop_subsumed(edges: Iterable[_Edge]) -> list[_Edge]:
    """Removes duplicates and edges whose guard implies another guard to the same target."""
    edges = list(dict.fromkeys(edges))

    def implies(g: Guard, h: Guard) -> bool:
        return h.positive <= g.positive and h.negative <= g.negative

    return [(g, d) for g, d in edges if not any(d2 == d and h != g and implies(g, h) for h, d2 in edges)]


def _bisimulation(order: list, accepting: set, moves: dict) -> dict:
    """Coarsest partition of the states into blocks with equal acceptance and equal guarded moves."""
    block = {s: int(s in accepting) for s in order}
    n_blocks = len(set(block.values()))
    while True:
        signature = {s: (block[s], frozenset((g, block[d]) for g, d in moves[s])) for s in order}
        ids: dict = {}
        block = {s: ids.setdefault(signature[s], len(ids)) for s in order}
        if len(ids) == n_blocks:
            return block
        n_blocks = len(ids)


def ltl_to_nba(formula: LtlFormula) -> BuchiAutomaton:
    """
    Translates a formula into a Büchi automaton accepting exactly its models.

    States of the intermediate automaton are the sets of obligations still to meet. Each minimal way of
    meeting them gives an edge guarded by its literals, accepting for every until it did not postpone.
    A counter visiting the untils in textual order merges the acceptance sets. States that cannot reach
    an accepting cycle are dropped and bisimilar states are merged.
    """
    phi = to_nnf(formula.tree)
    untils = _untils(phi)
    k = len(untils)
    start: _Obligations = frozenset() if isinstance(phi, LtlTrue) else frozenset({phi})

    covers: dict[_Obligations, list[_Cover]] = {}
    todo = deque([start])
    while todo:
        obligations = todo.popleft()
        if obligations in covers:
            continue
        covers[obligations] = _covers(obligations)
        todo.extend(c.next for c in covers[obligations] if c.next not in covers)

    def moves(state: _State) -> list[tuple[Guard, _State]]:
        obligations, c = state
        out = []
        for cover in covers[obligations]:
            c_next = 0 if c == k else c
            while c_next < k and untils[c_next] not in cover.postponed:
                c_next += 1
            out.append((cover.guard, (cover.next, c_next)))
        return out

    initial: _State = (start, 0)
    graph = nx.DiGraph()
    graph.add_node(initial)
    order = [initial]
    queue = deque([initial])
    out_edges: dict[_State, list[tuple[Guard, _State]]] = {}
    while queue:
        s = queue.popleft()
        out_edges[s] = moves(s)
        for _, t in out_edges[s]:
            if t not in graph:
                order.append(t)
                queue.append(t)
            graph.add_edge(s, t)

    accepting = {s for s in order if s[1] == k}
    useful = backward_closure(graph, accepting & cyclic_nodes(graph))
    kept = [s for s in order if s in useful]
    kept_moves = {s: _drop_subsumed((g, t) for g, t in out_edges[s] if t in useful) for s in kept}
    block = _bisimulation(kept, accepting, kept_moves)

    label: dict[int, str] = {}
    for s in kept:
        label.setdefault(block[s], f"x{len(label)}")
    edges = []
    for b, name in label.items():
        rep = next(s for s in kept if block[s] == b)
        targets = _drop_subsumed((g, block[t]) for g, t in kept_moves[rep])
        edges.extend((name, g, label[b2]) for g, b2 in targets)
    nba = BuchiAutomaton.build(
        edges=edges,
        initial=[label[block[initial]]] if initial in useful else [],
        accepting=[label[block[s]] for s in kept if s in accepting],
        ap=formula.ap,
        states=label.values(),
    )
    logger.debug(f"Translated {formula} into an NBA with {len(nba.states)} states and {len(nba.edges)} edges")
    return nba
