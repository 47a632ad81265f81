from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Collection, FrozenSet, Iterable, Mapping

import networkx as nx
from frozendict import frozendict
from zuper_commons.types import ZValueError

from phidiag import PhiDiagConstants
from phidiag.graphs import cyclic_nodes
from .semantics import Word

__all__ = ["Guard", "TRUE_GUARD", "BuchiEdge", "BuchiAutomaton", "nba_accepts_lasso", "nba_to_dot"]


@dataclass(frozen=True)
class Guard:
    """A conjunction of literals over atomic propositions."""

    positive: FrozenSet[str] = frozenset()
    negative: FrozenSet[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "positive", frozenset(self.positive))
        object.__setattr__(self, "negative", frozenset(self.negative))
        if PhiDiagConstants.checks and self.positive & self.negative:
            raise ZValueError("Contradictory guard", both=sorted(self.positive & self.negative))

    def holds(self, letter: Collection[str]) -> bool:
        return self.positive.issubset(letter) and self.negative.isdisjoint(letter)

    @property
    def atoms(self) -> FrozenSet[str]:
        return self.positive | self.negative

    def __str__(self) -> str:
        lits = [(a, a) for a in self.positive] + [(a, "!" + a) for a in self.negative]
        return " & ".join(s for _, s in sorted(lits)) if lits else "true"


TRUE_GUARD = Guard()


@dataclass(frozen=True)
class BuchiEdge:
    src: str
    guard: Guard
    dst: str


@dataclass(frozen=True)
class BuchiAutomaton:
    """A non-deterministic Büchi automaton over sets of atomic propositions, with guarded edges."""

    states: FrozenSet[str]
    initial: FrozenSet[str]
    accepting: FrozenSet[str]
    edges: tuple[BuchiEdge, ...]
    ap: FrozenSet[str]

    def __post_init__(self):
        for name in ("states", "initial", "accepting", "ap"):
            object.__setattr__(self, name, frozenset(getattr(self, name)))
        object.__setattr__(self, "edges", tuple(self.edges))
        if PhiDiagConstants.checks:
            if not self.initial <= self.states or not self.accepting <= self.states:
                raise ZValueError("Initial and accepting states must be states", nba=self)
            for e in self.edges:
                if e.src not in self.states or e.dst not in self.states:
                    raise ZValueError("Edge between unknown states", edge=e)
                if not e.guard.atoms <= self.ap:
                    raise ZValueError("Guard mentions undeclared atoms", edge=e, ap=sorted(self.ap))

    @classmethod
    def build(
        cls,
        edges: Iterable[tuple[str, Guard, str]],
        initial: Iterable[str],
        accepting: Iterable[str],
        ap: Iterable[str],
        states: Iterable[str] = (),
    ) -> "BuchiAutomaton":
        edges = tuple(BuchiEdge(s, g, d) for s, g, d in edges)
        initial, accepting = frozenset(initial), frozenset(accepting)
        all_states = set(states) | initial | accepting | {e.src for e in edges} | {e.dst for e in edges}
        return cls(frozenset(all_states), initial, accepting, edges, frozenset(ap))

    @cached_property
    def _out(self) -> Mapping[str, tuple[BuchiEdge, ...]]:
        out: dict[str, list[BuchiEdge]] = {}
        for e in self.edges:
            out.setdefault(e.src, []).append(e)
        return frozendict({x: tuple(sorted(es, key=lambda e: (e.dst, str(e.guard)))) for x, es in out.items()})

    def out_edges(self, x: str) -> tuple[BuchiEdge, ...]:
        return self._out.get(x, ())

    def successors(self, x: str, letter: Collection[str]) -> FrozenSet[str]:
        """States reachable from `x` reading `letter`."""
        return frozenset(e.dst for e in self.out_edges(x) if e.guard.holds(letter))

    def stats(self) -> dict[str, int]:
        return {"states": len(self.states), "edges": len(self.edges)}


def nba_accepts_lasso(nba: BuchiAutomaton, word: Word) -> bool:
    """
    Decides whether some run over the word visits accepting states infinitely often.
    The word is read as a single-cycle automaton; the product with the NBA is searched for
    an accepting node lying on a cycle.
    """
    word.require_infinite()
    if not nba.accepting or not nba.initial:
        return False
    graph = nx.DiGraph()
    start = [(0, x) for x in sorted(nba.initial)]
    graph.add_nodes_from(start)
    queue = deque(start)
    while queue:
        i, x = queue.popleft()
        j = word.successor(i)
        for y in sorted(nba.successors(x, word[i])):
            if (j, y) not in graph:
                queue.append((j, y))
            graph.add_edge((i, x), (j, y))
    return any(x in nba.accepting for _, x in cyclic_nodes(graph))


def nba_to_dot(nba: BuchiAutomaton, name: str = "NBA") -> str:
    lines = [f"digraph {name} {{", "  rankdir=LR;", '  __init [shape=point, label=""];']
    for x in sorted(nba.states):
        shape = "doublecircle" if x in nba.accepting else "circle"
        lines.append(f'  "{x}" [shape={shape}];')
    for x in sorted(nba.initial):
        lines.append(f'  __init -> "{x}";')
    for x in sorted(nba.states):
        for e in nba.out_edges(x):
            lines.append(f'  "{e.src}" -> "{e.dst}" [label="{e.guard}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
