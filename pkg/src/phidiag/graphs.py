from collections import deque
from typing import Callable, Collection, FrozenSet, Hashable, Iterable, Optional, TypeVar

import networkx as nx

__all__ = ["cyclic_nodes", "nontrivial_sccs", "backward_closure", "bfs_path", "Step"]

N = TypeVar("N", bound=Hashable)
E = TypeVar("E")

Step = tuple[E, N]
""" One move of a path: the event taken and the node reached. """


def nontrivial_sccs(graph: nx.DiGraph) -> list[FrozenSet[N]]:
    """Strongly connected components holding at least one edge (a self-loop counts)."""
    res = []
    for scc in nx.strongly_connected_components(graph):
        if len(scc) > 1:
            res.append(frozenset(scc))
        else:
            (v,) = scc
            if graph.has_edge(v, v):
                res.append(frozenset(scc))
    return res


def cyclic_nodes(graph: nx.DiGraph) -> FrozenSet[N]:
    """Nodes lying on some non-empty cycle."""
    return frozenset().union(*nontrivial_sccs(graph))


def backward_closure(graph: nx.DiGraph, seeds: Iterable[N]) -> FrozenSet[N]:
    """The seeds together with every node that can reach one of them."""
    seeds = set(seeds)
    return frozenset(seeds.union(*(nx.ancestors(graph, v) for v in seeds)))


def bfs_path(
    successors: Callable[[N], Iterable[Step]],
    sources: Iterable[N],
    is_target: Callable[[N], bool],
    allowed: Optional[Collection[N]] = None,
    first_step: bool = False,
) -> Optional[tuple[N, list[Step]]]:
    """
    Breadth first search for a shortest path.
    Ties are broken by the order of `sources` and of `successors`, which callers keep lexicographic.
    :param successors: ordered outgoing moves of a node
    :param sources: start nodes
    :param is_target: goal test
    :param allowed: if given, the path stays inside these nodes
    :param first_step: require at least one move (used to close cycles)
    :return: the start node and the moves, or None if no target is reachable
    """
    parent: dict[N, Optional[tuple[N, E]]] = {}
    queue: deque = deque()
    for s in sources:
        if allowed is not None and s not in allowed:
            continue
        if not first_step and is_target(s):
            return s, []
        if s not in parent:
            parent[s] = None
            queue.append(s)
    while queue:
        u = queue.popleft()
        for ev, v in successors(u):
            if allowed is not None and v not in allowed:
                continue
            if is_target(v):
                steps = [(ev, v)]
                w = u
                while parent[w] is not None:
                    w_prev, ev_prev = parent[w]
                    steps.append((ev_prev, w))
                    w = w_prev
                steps.reverse()
                return w, steps
            if v not in parent:
                parent[v] = (u, ev)
                queue.append(v)
    return None
