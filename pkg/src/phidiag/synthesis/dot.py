from typing import Callable, Collection, Iterable, Mapping

from phidiag.models import EventPair, ExtendedEvent, render_output
from .structures import AugmentedSystem, ConstrainedSystem, VerificationSystem

__all__ = ["augmented_to_dot", "constrained_to_dot", "verifier_to_dot"]

SILENT = "~"


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _event_label(e: ExtendedEvent) -> str:
    return f"{e.sigma}/{render_output(e.o, SILENT)}"


def _pair_label(p: EventPair) -> str:
    a = SILENT if p.first is None else _event_label(p.first)
    b = SILENT if p.second is None else _event_label(p.second)
    return f"({a},{b})"


def _to_dot(
    name: str,
    states: Iterable,
    initial: Collection,
    accepting: Collection,
    transitions: Mapping,
    edge_label: Callable[[object], str],
) -> str:
    lines = [f"digraph {name} {{", "  rankdir=LR;", '  __init [shape=point, label=""];']
    for s in sorted(states):
        extra = ", peripheries=2" if s in accepting else ""
        lines.append(f"  {_quote(str(s))} [shape=ellipse{extra}];")
    for s in sorted(initial):
        lines.append(f"  __init -> {_quote(str(s))};")
    for s in sorted(transitions):
        for ev, s_next in transitions[s]:
            lines.append(f"  {_quote(str(s))} -> {_quote(str(s_next))} [label={_quote(edge_label(ev))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def augmented_to_dot(aug: AugmentedSystem) -> str:
    return _to_dot("Augmented", aug.states, [aug.initial], (), aug.transitions, _event_label)


def constrained_to_dot(t: ConstrainedSystem) -> str:
    return _to_dot("Constrained", t.states, t.initial, t.accepting, t.transitions, _event_label)


def verifier_to_dot(v: VerificationSystem) -> str:
    """Accepting pairs are drawn with a double border; silent sides and outputs are rendered `~`."""
    return _to_dot("Verifier", v.states, v.initial, v.accepting, v.transitions, _pair_label)
