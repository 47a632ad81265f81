import re
from typing import Callable, FrozenSet, Iterable, Mapping, Optional

from phidiag.ltl import (
    Always,
    And,
    Atom,
    Eventually,
    Implies,
    LabelingFunction,
    Ltl,
    LtlFormula,
    Next,
    Not,
    SensorConstraint,
    Until,
    conj,
    disj,
)
from phidiag.models import EPSILON, Event, ExtendedEvent, Output, PlantModel, Transition, apply_overlay
from phidiag.utils_toolz import fkeyfilter
from . import logger
from .structures import (
    DwellTimeSpec,
    IntermittentPermanentSpec,
    KLossSpec,
    MixedSpec,
    OutputFairnessSpec,
    ScenarioError,
    ScenarioSpec,
)

__all__ = [
    "transition_atom",
    "channel_atom",
    "event_atom",
    "output_atom",
    "build_intermittent_permanent",
    "build_k_loss",
    "build_dwell_time",
    "build_output_fairness",
    "build_mixed",
    "build_scenario",
]

_NOT_IDENT = re.compile(r"[^A-Za-z0-9_]")


def _ident(s: str) -> str:
    return _NOT_IDENT.sub("_", s)


def transition_atom(mode: int, t: Transition) -> str:
    """`m1_q3_b`: sensor of transition (3, b) is in mode 1 (failed)."""
    return f"m{mode}_q{_ident(t[0])}_{_ident(t[1])}"


def channel_atom(mode: int, channel: int) -> str:
    return f"m{mode}_ch{channel}"


def event_atom(mode: int, sigma: Event) -> str:
    return f"m{mode}_ev_{_ident(sigma)}"


def output_atom(o: Output, t: Transition) -> str:
    """`m_o1_q2_a`: transition (2, a) fired with output o1."""
    name = "eps" if o == EPSILON else _ident(o)
    return f"m_{name}_q{_ident(t[0])}_{_ident(t[1])}"


def _distinct(names: Iterable[tuple[str, object]]) -> None:
    seen: dict[str, object] = {}
    for name, owner in names:
        if name in seen and seen[name] != owner:
            raise ScenarioError(
                "Two sensors map to the same atom name; rename states or events", atom=name, a=seen[name], b=owner
            )
        seen[name] = owner


def _sensor_labeling(
    model: PlantModel, ts: Iterable[Transition], atom: Callable[[int, Transition], str]
) -> dict[ExtendedEvent, FrozenSet[str]]:
    """Visible output labels mode 0 (working), the silent one mode 1 (failed)."""
    table = {}
    for t in sorted(ts):
        for o in model.observations(*t):
            mode = 1 if o == EPSILON else 0
            table[ExtendedEvent(t[0], t[1], o)] = frozenset({atom(mode, t)})
    return table


def _event_sensor(mode: int, t: Transition) -> str:
    return event_atom(mode, t[1])


def _mode_atoms(m0: str, m1: str) -> tuple[Atom, Atom]:
    return Atom(m0), Atom(m1)


def _check_partition(parts: Mapping[str, FrozenSet], universe: FrozenSet, what: str) -> None:
    names = list(parts)
    for i, a in enumerate(names):
        for b in names[i + 1 :]:
            common = parts[a] & parts[b]
            if common:
                raise ScenarioError(f"The {what} classes overlap", first=a, second=b, common=sorted(common))
    covered = frozenset().union(*parts.values())
    if covered != universe:
        raise ScenarioError(
            f"The {what} classes must partition the plant {what}s",
            missing=sorted(universe - covered),
            unknown=sorted(covered - universe),
        )


def build_intermittent_permanent(model: PlantModel, spec: IntermittentPermanentSpec) -> SensorConstraint:
    """Sensors on T_int may fail and recover at will; sensors on T_per never recover once failed."""
    parts = {"t_uo": spec.t_uo, "t_o": spec.t_o, "t_int": spec.t_int, "t_per": spec.t_per}
    _check_partition(parts, frozenset(model.transitions), "transition")
    overlay: dict[Transition, FrozenSet[Output]] = {}
    for t in spec.t_uo:
        overlay[t] = frozenset({EPSILON})
    for t in spec.t_o:
        overlay[t] = frozenset({t[1]})
    for t in spec.t_int | spec.t_per:
        overlay[t] = frozenset({t[1], EPSILON})
    shaped = apply_overlay(model, overlay)

    if spec.per_event:
        sensors = sorted({t[1] for t in spec.t_per})
        _distinct((event_atom(0, s), s) for s in sensors)
        atom = _event_sensor
        pairs = [(event_atom(0, s), event_atom(1, s)) for s in sensors]
    else:
        sensors = sorted(spec.t_per)
        _distinct((transition_atom(0, t), t) for t in sensors)
        atom = transition_atom
        pairs = [(transition_atom(0, t), transition_atom(1, t)) for t in sensors]

    table = _sensor_labeling(shaped, spec.t_per, atom)
    clauses = []
    for m0_name, m1_name in pairs:
        m0, m1 = _mode_atoms(m0_name, m1_name)
        clauses.append(Always(Implies(m1, Always(Not(m0)))))
    ap = frozenset(n for pair in pairs for n in pair)
    logger.debug(f"Intermittent/permanent scenario with {len(pairs)} permanent sensors")
    return SensorConstraint(ap, LabelingFunction(table, ap), LtlFormula(conj(clauses), ap), overlay)


def _k_losses(k: int, m0: Atom, m1: Atom) -> Ltl:
    """k+1 consecutive uses of the channel that all lost the observation."""
    phi: Ltl = m1
    for _ in range(k):
        phi = And(m1, Next(Until(Not(m0), phi)))
    return phi


def build_k_loss(model: PlantModel, spec: KLossSpec) -> SensorConstraint:
    """Each channel j loses at most K_j consecutive observations of the events it carries."""
    if len(spec.bounds) != len(spec.channels):
        raise ScenarioError("One bound per channel is needed", channels=len(spec.channels), bounds=len(spec.bounds))
    if not spec.channels:
        raise ScenarioError("At least one channel is needed")
    parts = {"sigma_uo": spec.sigma_uo}
    parts.update({f"channel {j}": c for j, c in enumerate(spec.channels, start=1)})
    _check_partition(parts, model.events, "event")

    channel_of = {sigma: j for j, c in enumerate(spec.channels, start=1) for sigma in c}
    overlay: dict[Transition, FrozenSet[Output]] = {}
    for t in model.transitions:
        overlay[t] = frozenset({t[1], EPSILON}) if t[1] in channel_of else frozenset({EPSILON})
    shaped = apply_overlay(model, overlay)

    def channel_sensor(mode: int, t: Transition) -> str:
        return channel_atom(mode, channel_of[t[1]])

    table = _sensor_labeling(shaped, (t for t in model.transitions if t[1] in channel_of), channel_sensor)
    clauses = []
    for j, k in enumerate(spec.bounds, start=1):
        if k is None:
            continue
        m0, m1 = _mode_atoms(channel_atom(0, j), channel_atom(1, j))
        clauses.append(Always(Not(_k_losses(k, m0, m1))))
    ap = frozenset(channel_atom(mode, j) for j in range(1, len(spec.channels) + 1) for mode in (0, 1))
    return SensorConstraint(ap, LabelingFunction(table, ap), LtlFormula(conj(clauses), ap), overlay)


def _run(k: int, mode: Atom, other: Atom) -> Ltl:
    """Sensor enters `mode` and leaves it after exactly k uses."""
    phi: Ltl = And(mode, Next(Until(Not(mode), other)))
    for _ in range(k - 1):
        phi = And(mode, Next(Until(And(Not(mode), Not(other)), phi)))
    return phi


def build_dwell_time(model: PlantModel, spec: DwellTimeSpec) -> SensorConstraint:
    """Once entered, the normal mode lasts at least k_N uses and the failure mode at least k_F uses."""
    parts = {"sigma_o": spec.sigma_o, "sigma_uo": spec.sigma_uo, "sigma_ur": spec.sigma_ur}
    _check_partition(parts, model.events, "event")
    overlay: dict[Transition, FrozenSet[Output]] = {}
    for t in model.transitions:
        sigma = t[1]
        if sigma in spec.sigma_ur:
            overlay[t] = frozenset({sigma, EPSILON})
        elif sigma in spec.sigma_o:
            overlay[t] = frozenset({sigma})
        else:
            overlay[t] = frozenset({EPSILON})
    shaped = apply_overlay(model, overlay)

    sensors = sorted(spec.sigma_ur)
    _distinct((event_atom(0, s), s) for s in sensors)
    table = _sensor_labeling(shaped, (t for t in model.transitions if t[1] in spec.sigma_ur), _event_sensor)
    normal, failed = [], []
    for sigma in sensors:
        m0, m1 = _mode_atoms(event_atom(0, sigma), event_atom(1, sigma))
        # a repair followed by a normal run shorter than k_N
        for k in range(1, spec.k_n):
            normal.append(Always(Not(And(m1, Next(Until(Not(m0), _run(k, m0, m1)))))))
        for k in range(1, spec.k_f):
            failed.append(Always(Not(And(m0, Next(Until(Not(m1), _run(k, m1, m0)))))))
    ap = frozenset(event_atom(mode, s) for s in sensors for mode in (0, 1))
    return SensorConstraint(ap, LabelingFunction(table, ap), LtlFormula(conj(normal + failed), ap), overlay)


def build_output_fairness(model: PlantModel, spec: OutputFairnessSpec) -> SensorConstraint:
    """A transition of T_fair fired infinitely often shows each of its outputs infinitely often."""
    unknown = spec.t_fair - frozenset(model.transitions)
    if unknown:
        raise ScenarioError("Fair transitions must be plant transitions", unknown=sorted(unknown))
    table: dict[ExtendedEvent, FrozenSet[str]] = {}
    clauses = []
    names = []
    for t in sorted(spec.t_fair):
        outs = sorted(model.observations(*t))
        ms = []
        for o in outs:
            name = output_atom(o, t)
            names.append((name, (t, o)))
            table[ExtendedEvent(t[0], t[1], o)] = frozenset({name})
            ms.append(Atom(name))
        clauses.append(Implies(Always(Eventually(disj(ms))), conj(Always(Eventually(m)) for m in ms)))
    _distinct(names)
    ap = frozenset(n for n, _ in names)
    return SensorConstraint(ap, LabelingFunction(table, ap), LtlFormula(conj(clauses), ap))


def _merge_overlays(
    parts: list[tuple[FrozenSet[Transition], Optional[Mapping[Transition, FrozenSet[Output]]]]]
) -> dict[Transition, FrozenSet[Output]]:
    """Entries inside a scenario's scope win; out-of-scope entries must agree with each other."""
    inside: dict[Transition, FrozenSet[Output]] = {}
    outside: dict[Transition, FrozenSet[Output]] = {}
    for scope, overlay in parts:
        overlay = overlay or {}
        inside.update(fkeyfilter(scope.__contains__, overlay))
        for t, outs in fkeyfilter(lambda t: t not in scope, overlay).items():
            if t in outside and outside[t] != outs:
                raise ScenarioError(
                    "Scenarios disagree on the observations of a transition none of them owns",
                    transition=t,
                    first=sorted(outside[t]),
                    second=sorted(outs),
                )
            outside[t] = outs
    outside.update(inside)
    return outside


def build_mixed(model: PlantModel, spec: MixedSpec) -> SensorConstraint:
    """Conjunction of scenarios acting on pairwise disjoint sets of sensors."""
    if not spec.specs:
        raise ScenarioError("A mixed scenario needs at least one component")
    scopes = [s.scope(model) for s in spec.specs]
    for i in range(len(scopes)):
        for j in range(i + 1, len(scopes)):
            common = scopes[i] & scopes[j]
            if common:
                raise ScenarioError(
                    "Mixed scenarios must act on disjoint sensors",
                    first=spec.specs[i].tag,
                    second=spec.specs[j].tag,
                    common=sorted(common),
                )
    built: dict[int, SensorConstraint] = {}
    for i, s in enumerate(spec.specs):
        if not isinstance(s, OutputFairnessSpec):
            built[i] = build_scenario(model, s)
    overlay = _merge_overlays([(scopes[i], c.overlay) for i, c in built.items()])
    shaped = apply_overlay(model, overlay)
    for i, s in enumerate(spec.specs):
        if i not in built:
            built[i] = build_scenario(shaped, s)

    parts = [built[i] for i in range(len(spec.specs))]
    ap = frozenset().union(*(c.ap for c in parts))
    labeling = LabelingFunction.empty(ap)
    for c in parts:
        labeling = labeling.union(c.labeling)
    formula = LtlFormula(conj(c.formula.tree for c in parts), ap)
    return SensorConstraint(ap, labeling, formula, overlay or None)


_BUILDERS: Mapping[type, Callable[[PlantModel, ScenarioSpec], SensorConstraint]] = {
    IntermittentPermanentSpec: build_intermittent_permanent,
    KLossSpec: build_k_loss,
    DwellTimeSpec: build_dwell_time,
    OutputFairnessSpec: build_output_fairness,
    MixedSpec: build_mixed,
}


def build_scenario(model: PlantModel, spec: ScenarioSpec) -> SensorConstraint:
    """Instantiates a scenario on a plant."""
    try:
        builder = _BUILDERS[type(spec)]
    except KeyError:
        raise ScenarioError("Unknown scenario", spec=spec) from None
    return builder(model, spec)
