"""
Brute-force procedures cross-checking the main pipeline on small instances.

Nothing here uses the synthesis or checker constructions: the constrained system and its twin are
rebuilt with plain tuples and dictionaries, and confusing cycles are assembled from an explicit
enumeration of simple cycles.
"""
from collections import deque
from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, Hashable, Iterable, Iterator, Optional, Sequence, Union

import networkx as nx

from phidiag.checker.verdict import Verdict, Witness
from phidiag.ltl import BuchiAutomaton, SensorConstraint, ltl_to_nba
from phidiag.models import EPSILON, EventPair, ExtendedEvent, ExtendedString, Lasso, Output, PlantModel, apply_overlay
from phidiag.time import time_function

__all__ = [
    "OracleParameters",
    "BoundExceeded",
    "CompatibleStrings",
    "brute_check",
    "enumerate_compatible",
    "twin_plant_check",
]

# (plant state, faulty, NBA state)
_T = tuple[str, bool, str]
_Moves = Dict[Hashable, list]


@dataclass(frozen=True)
class OracleParameters:
    depth_bound: int = 200
    """Maximal breadth-first depth explored in the twin system, also bounding the length of enumerated cycles"""
    max_states: int = 200_000
    """Maximal number of states of any explored system"""
    max_cycles: int = 100_000
    """Maximal number of simple cycles enumerated in the twin system"""
    max_steps: int = 2_000_000
    """Maximal number of depth-first extensions spent enumerating cycles"""
    eps_budget: Optional[int] = None
    """Silent moves allowed between two observed symbols; None means twice the constrained states"""
    max_strings: int = 20_000
    """Maximal number of strings returned by `enumerate_compatible`"""


@dataclass(frozen=True)
class BoundExceeded:
    """The oracle gave up: a resource bound was hit before an answer was found."""

    reason: str
    explored: int


@dataclass(frozen=True)
class CompatibleStrings:
    strings: FrozenSet[ExtendedString]
    truncated: bool
    """Some silent run or the number of strings exceeded its budget"""


class _Bound(Exception):
    def __init__(self, reason: str, explored: int):
        super().__init__(reason)
        self.reason = reason
        self.explored = explored


def _explore(initial: Iterable, succ: Callable[[Hashable], list], max_states: int, depth_bound: Optional[int] = None):
    """Breadth first exploration returning the adjacency of the reachable part."""
    moves: _Moves = {}
    layer = sorted(set(initial))
    seen = set(layer)
    depth = 0
    while layer:
        if depth_bound is not None and depth >= depth_bound:
            raise _Bound("depth bound reached", len(seen))
        nxt = []
        for s in layer:
            moves[s] = succ(s)
            for _, s2 in moves[s]:
                if s2 not in seen:
                    seen.add(s2)
                    nxt.append(s2)
                    if len(seen) > max_states:
                        raise _Bound("state bound reached", len(seen))
        layer = nxt
        depth += 1
    return moves


def _reach(moves: _Moves, sources: Iterable) -> set:
    """Nodes reachable from the sources with zero or more moves."""
    seen = set(sources)
    todo = list(seen)
    while todo:
        s = todo.pop()
        for _, s2 in moves.get(s, ()):
            if s2 not in seen:
                seen.add(s2)
                todo.append(s2)
    return seen


def _reverse(moves: _Moves) -> _Moves:
    rev: _Moves = {s: [] for s in moves}
    for s, out in moves.items():
        for ev, s2 in out:
            rev.setdefault(s2, []).append((ev, s))
    return rev


def _path(moves: _Moves, src, dst) -> Optional[list]:
    """Shortest list of `(event, node)` moves from src to dst (empty when equal)."""
    if src == dst:
        return []
    parent = {src: None}
    queue = deque([src])
    while queue:
        s = queue.popleft()
        for ev, s2 in moves.get(s, ()):
            if s2 not in parent:
                parent[s2] = (s, ev)
                if s2 == dst:
                    out = []
                    node = s2
                    while parent[node] is not None:
                        prev, e = parent[node]
                        out.append((e, node))
                        node = prev
                    return out[::-1]
                queue.append(s2)
    return None


def _t_successors(model: PlantModel, nba: BuchiAutomaton, constraint: SensorConstraint):
    def succ(s: _T) -> list:
        q, faulty, x = s
        out = []
        for (q0, sigma), q1 in sorted(model.transitions.items()):
            if q0 != q:
                continue
            f1 = faulty or sigma in model.fault_events
            for o in sorted(model.obs_map[(q0, sigma)]):
                e = ExtendedEvent(q, sigma, o)
                letter = constraint.labeling(e)
                for edge in nba.edges:
                    if edge.src == x and edge.guard.holds(letter):
                        out.append((e, (q1, f1, edge.dst)))
        return sorted(set(out))

    return succ


def _feasible(moves: _Moves, accepting: Callable[[Hashable], bool]) -> set:
    """Nodes reaching an accepting node that can reach itself in at least one move."""
    looping = set()
    for a in moves:
        if accepting(a) and a in _reach(moves, (s2 for _, s2 in moves[a])):
            looping.add(a)
    return _reach(_reverse(moves), looping)


def _twin(initial: Sequence, succ: Callable[[Hashable], list], params: OracleParameters) -> tuple[list, _Moves]:
    """Twin product: joint moves on equal visible outputs, one silent side at a time."""

    def twin_succ(v) -> list:
        s1, s2 = v
        out = []
        right = succ(s2)
        for e1, n1 in succ(s1):
            if e1.o == EPSILON:
                out.append(((e1, None), (n1, s2)))
            else:
                out.extend(((e1, e2), (n1, n2)) for e2, n2 in right if e2.o == e1.o)
        out.extend(((None, e2), (s1, n2)) for e2, n2 in right if e2.o == EPSILON)
        return out

    pairs = [(a, b) for a in initial for b in initial]
    return pairs, _explore(pairs, twin_succ, params.max_states, params.depth_bound)


def _moves_first(ev) -> bool:
    return ev[0] is not None


def _simple_cycles(moves: _Moves, order: Sequence, params: OracleParameters, steps: list[int]) -> Iterator[list]:
    """
    Simple cycles of the graph induced by `order`, each produced once, from its earliest node in `order`,
    as a list of `(source, event, target)` edges. Parallel edges count once, preferring one that moves the
    first copy.
    """
    rank = {s: i for i, s in enumerate(order)}
    for i, root in enumerate(order):
        sub: _Moves = {}
        for s in order[i:]:
            best: dict = {}
            for ev, s2 in moves[s]:
                if rank.get(s2, -1) >= i and (s2 not in best or (_moves_first(ev) and not _moves_first(best[s2]))):
                    best[s2] = ev
            sub[s] = [(ev, s2) for s2, ev in sorted(best.items(), key=lambda kv: rank[kv[0]])]
        back = _reach(_reverse(sub), [root])
        path = [root]
        on_path = {root}
        edges: list = []
        stack = [iter(sub[root])]
        while stack:
            for ev, s2 in stack[-1]:
                if s2 == root:
                    yield edges + [(path[-1], ev, root)]
                elif s2 not in on_path and s2 in back:
                    if len(path) >= params.depth_bound:
                        raise _Bound("cycle length bound reached", len(path))
                    steps[0] += 1
                    if steps[0] > params.max_steps:
                        raise _Bound("search step bound reached", steps[0])
                    edges.append((path[-1], ev, s2))
                    path.append(s2)
                    on_path.add(s2)
                    stack.append(iter(sub[s2]))
                    break
            else:
                stack.pop()
                on_path.discard(path.pop())
                if edges:
                    edges.pop()


def _confusing_cycle(moves: _Moves, accepting: Iterable, params: OracleParameters):
    """
    Searches the simple cycles around each accepting node, merging cycles that share a node, until one merged
    group holds an accepting node and an edge moving the first copy. Such a group is strongly connected, so it
    carries a closed walk through both.
    :return: the accepting node, the moving edge and the edges of the group, or None
    """
    accepting = set(accepting)
    rev = _reverse(moves)
    covered: set = set()
    count = 0
    steps = [0]
    for a in sorted(accepting):
        if a in covered:
            continue
        region = _reach(moves, [a]) & _reach(rev, [a])
        covered |= region & accepting
        order = [a] + sorted(region - {a})
        groups = nx.utils.UnionFind()
        # root -> (edges, first moving edge, accepting nodes)
        members: Dict[Hashable, tuple] = {}
        for cycle in _simple_cycles(moves, order, params, steps):
            count += 1
            if count > params.max_cycles:
                raise _Bound("cycle bound reached", count)
            nodes = [s for s, _, _ in cycle]
            merged = [members.pop(r) for r in {groups[s] for s in nodes} if r in members]
            groups.union(*nodes)
            edges = [e for m in merged for e in m[0]] + cycle
            moving = next((m[1] for m in merged if m[1] is not None), None)
            if moving is None:
                moving = next((e for e in cycle if _moves_first(e[1])), None)
            acc = set(accepting.intersection(nodes)).union(*(m[2] for m in merged))
            members[groups[nodes[0]]] = (edges, moving, acc)
            if moving is not None and acc:
                return min(acc), moving, edges
    return None


def _render_t(s: _T) -> str:
    q, faulty, x = s
    return f"({q}{'F' if faulty else 'N'},{x})"


def _render_v(v) -> str:
    return f"({_render_t(v[0])},{_render_t(v[1])})"


def _witness(moves: _Moves, initial: Sequence, found) -> Witness:
    a, (u, ev, w), edges = found
    prefix = None
    start = None
    for s in sorted(initial):
        p = _path(moves, s, a)
        if p is not None and (prefix is None or len(p) < len(prefix)):
            prefix, start = p, s
    inside: _Moves = {}
    for s, e, s2 in edges:
        inside.setdefault(s, []).append((e, s2))
    cycle = _path(inside, a, u) + [(ev, w)] + _path(inside, w, a)

    def events(steps):
        return tuple(EventPair(e[0], e[1]) for e, _ in steps)

    def sources(steps, first):
        return tuple(_render_v(s) for s in [first] + [n for _, n in steps[:-1]]) if steps else ()

    return Witness(Lasso(events(prefix), events(cycle)), Lasso(sources(prefix, start), sources(cycle, a)))


@time_function
def brute_check(
    model: PlantModel,
    constraint: SensorConstraint,
    params: OracleParameters = OracleParameters(),
    nba: Optional[BuchiAutomaton] = None,
) -> Union[Verdict, BoundExceeded]:
    """
    Decides diagnosability under the constraint by exhaustive enumeration of the constrained
    system and of its twin.
    :return: a verdict, or the bound that stopped the search
    """
    model = apply_overlay(model, constraint.overlay)
    if nba is None:
        nba = ltl_to_nba(constraint.formula)
    initial = [(model.initial, False, x) for x in sorted(nba.initial)]
    try:
        t_moves = _explore(initial, _t_successors(model, nba, constraint), params.max_states)
        feasible = _feasible(t_moves, lambda s: s[2] in nba.accepting)
        pairs, v_moves = _twin(initial, lambda s: t_moves[s], params)
        accepting = [
            v for v in v_moves if v[0][1] and v[0][2] in nba.accepting and not v[1][1] and v[1] in feasible
        ]
        found = _confusing_cycle(v_moves, accepting, params)
    except _Bound as e:
        return BoundExceeded(e.reason, e.explored)
    stats = {"oracle": {"constrained": len(t_moves), "twin": len(v_moves), "accepting": len(accepting)}}
    if found is None:
        return Verdict(True, None, stats)
    return Verdict(False, _witness(v_moves, pairs, found), stats)


def enumerate_compatible(
    model: PlantModel,
    constraint: SensorConstraint,
    observation: Sequence[Output],
    params: OracleParameters = OracleParameters(),
    nba: Optional[BuchiAutomaton] = None,
) -> CompatibleStrings:
    """
    Every finite extended string that extends to a constrained infinite behavior and shows exactly
    `observation`. Silent moves are bounded between consecutive symbols and after the last one.
    """
    model = apply_overlay(model, constraint.overlay)
    if nba is None:
        nba = ltl_to_nba(constraint.formula)
    initial = [(model.initial, False, x) for x in sorted(nba.initial)]
    try:
        t_moves = _explore(initial, _t_successors(model, nba, constraint), params.max_states)
    except _Bound:
        return CompatibleStrings(frozenset(), True)
    feasible = _feasible(t_moves, lambda s: s[2] in nba.accepting)
    budget = 2 * len(t_moves) if params.eps_budget is None else params.eps_budget
    observation = tuple(observation)

    found = set()
    truncated = False
    todo = [((), frozenset(initial) & feasible, 0, 0)]
    while todo:
        string, belief, pos, silent_run = todo.pop()
        if not belief:
            continue
        if pos == len(observation):
            found.add(string)
            if len(found) >= params.max_strings:
                truncated = True
                break
        by_event: dict[ExtendedEvent, set] = {}
        for s in belief:
            for e, s2 in t_moves[s]:
                if s2 in feasible:
                    by_event.setdefault(e, set()).add(s2)
        for e in sorted(by_event, reverse=True):
            if e.o == EPSILON:
                if silent_run >= budget:
                    truncated = True
                    continue
                todo.append((string + (e,), frozenset(by_event[e]), pos, silent_run + 1))
            elif pos < len(observation) and e.o == observation[pos]:
                todo.append((string + (e,), frozenset(by_event[e]), pos + 1, 0))
    return CompatibleStrings(frozenset(found), truncated)


def twin_plant_check(model: PlantModel, params: OracleParameters = OracleParameters()) -> Union[bool, BoundExceeded]:
    """
    Classic diagnosability (no sensor constraint) on the twin plant of the fault-labeled plant:
    a confusing cycle pairs a faulty run moving forever with a normal run that can still go on.
    """

    def succ(s) -> list:
        q, faulty = s
        out = []
        for sigma, q1 in model.outgoing(q):
            for o in sorted(model.observations(q, sigma)):
                out.append((ExtendedEvent(q, sigma, o), (q1, faulty or sigma in model.fault_events)))
        return out

    initial = [(model.initial, False)]
    try:
        moves = _explore(initial, succ, params.max_states)
        _, v_moves = _twin(initial, lambda s: moves[s], params)
        alive = _feasible(moves, lambda s: True)
        accepting = [v for v in v_moves if v[0][1] and not v[1][1] and v[1] in alive]
        return _confusing_cycle(v_moves, accepting, params) is None
    except _Bound as e:
        return BoundExceeded(e.reason, e.explored)
