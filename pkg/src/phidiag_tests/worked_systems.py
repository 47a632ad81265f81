"""The three worked plants, their constraints and two hand-drawn automata."""
from phidiag.ltl import BuchiAutomaton, Guard, LabelingFunction, SensorConstraint, parse_ltl
from phidiag.models import EPSILON, ExtendedEvent, PlantModel
from phidiag.templates import IntermittentPermanentSpec, KLossSpec, OutputFairnessSpec

__all__ = [
    "g1",
    "g2",
    "g3",
    "g1_per_spec",
    "g1_per_constraint",
    "g2_kloss_spec",
    "g3_fair_spec",
    "permanent_failure_nba",
    "kloss_nba",
    "true_constraint",
]


def _plant(rows, outputs) -> PlantModel:
    return PlantModel.from_transitions(rows, initial="1", fault_events=["f"], outputs=outputs)


def g1() -> PlantModel:
    """Permanent failure example: the b sensor may lose readings."""
    rows = [
        ("1", "f", "2", [EPSILON]),
        ("1", "u", "5", [EPSILON]),
        ("2", "a", "3", ["a"]),
        ("3", "b", "4", ["b", EPSILON]),
        ("4", "c", "2", ["c"]),
        ("5", "a", "6", ["a"]),
        ("6", "b", "7", ["b", EPSILON]),
        ("7", "c", "8", ["c"]),
        ("8", "a", "7", ["a"]),
    ]
    return _plant(rows, ["a", "b", "c"])


def g2() -> PlantModel:
    """G1's shape with every observable transition possibly lost."""
    rows = [
        ("1", "f", "2", [EPSILON]),
        ("1", "u", "5", [EPSILON]),
        ("2", "a", "3", ["a", EPSILON]),
        ("3", "b", "4", ["b", EPSILON]),
        ("4", "c", "2", ["c", EPSILON]),
        ("5", "a", "6", ["a", EPSILON]),
        ("6", "b", "7", ["b", EPSILON]),
        ("7", "c", "8", ["c", EPSILON]),
        ("8", "a", "7", ["a", EPSILON]),
    ]
    return _plant(rows, ["a", "b", "c"])


def g3() -> PlantModel:
    rows = [
        ("1", "f", "2", ["o1"]),
        ("1", "u", "4", ["o1"]),
        ("2", "a", "3", ["o1", "o2"]),
        ("3", "b", "2", ["o2"]),
        ("4", "a", "5", ["o1"]),
        ("5", "b", "4", ["o2"]),
    ]
    return _plant(rows, ["o1", "o2"])


def g1_per_spec(per_event: bool = True) -> IntermittentPermanentSpec:
    return IntermittentPermanentSpec(
        t_uo=frozenset({("1", "f"), ("1", "u")}),
        t_o=frozenset({("2", "a"), ("4", "c"), ("5", "a"), ("7", "c"), ("8", "a")}),
        t_int=frozenset(),
        t_per=frozenset({("3", "b"), ("6", "b")}),
        per_event=per_event,
    )


def g1_per_constraint() -> SensorConstraint:
    """One sensor for b: a visible b labels m0, a lost b labels m1."""
    ap = frozenset({"m0", "m1"})
    table = {}
    for q in ("3", "6"):
        table[ExtendedEvent(q, "b", "b")] = frozenset({"m0"})
        table[ExtendedEvent(q, "b", EPSILON)] = frozenset({"m1"})
    return SensorConstraint(ap, LabelingFunction(table, ap), parse_ltl("G (m1 -> G !m0)", ap))


def g2_kloss_spec() -> KLossSpec:
    return KLossSpec(
        sigma_uo=frozenset({"f", "u"}),
        channels=(frozenset({"a", "c"}), frozenset({"b"})),
        bounds=(0, 1),
    )


def g3_fair_spec() -> OutputFairnessSpec:
    return OutputFairnessSpec(t_fair=frozenset({("2", "a")}))


def permanent_failure_nba(m0: str = "m0", m1: str = "m1") -> BuchiAutomaton:
    """Two states: A until the sensor fails, B afterwards where it never works again."""
    edges = [
        ("A", Guard(negative={m1}), "A"),
        ("A", Guard(positive={m1}, negative={m0}), "B"),
        ("B", Guard(negative={m0}), "B"),
    ]
    return BuchiAutomaton.build(edges, initial=["A"], accepting=["A", "B"], ap=[m0, m1])


def kloss_nba() -> BuchiAutomaton:
    """No loss on channel 1, at most one consecutive loss on channel 2."""
    a1, b0, b1 = "m1_ch1", "m0_ch2", "m1_ch2"
    edges = [
        ("A", Guard(negative={a1, b1}), "A"),
        ("A", Guard(positive={b1}, negative={a1}), "B"),
        ("B", Guard(negative={a1, b1, b0}), "B"),
        ("B", Guard(positive={b0}, negative={a1, b1}), "A"),
    ]
    return BuchiAutomaton.build(edges, initial=["A"], accepting=["A", "B"], ap=["m0_ch1", a1, b0, b1])


def true_constraint() -> SensorConstraint:
    return SensorConstraint.trivial()
