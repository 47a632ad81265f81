from dataclasses import dataclass, field
from typing import Any, Mapping, Optional

from frozendict import frozendict
from zuper_commons.types import ZValueError

from phidiag import PhiDiagConstants
from phidiag.models import Axis, EventPair, ExtendedEvent, Lasso, Output, project, render_output
from phidiag.utils_toolz import fd, fvalmap

__all__ = ["Witness", "Verdict", "render_lasso", "verdict_to_dict", "verdict_from_dict"]


@dataclass(frozen=True)
class Witness:
    """A lasso of the verification system realizing a confusing pair of runs."""

    word: Lasso[EventPair]
    """Events taken, from an initial state into the cycle"""
    states: Lasso[str]
    """Source state of each event of `word`, rendered; the cycle starts at an accepting state"""

    def __post_init__(self):
        if PhiDiagConstants.checks:
            if len(self.word.prefix) != len(self.states.prefix) or len(self.word.cycle) != len(self.states.cycle):
                raise ZValueError("Witness events and states must align", word=self.word, states=self.states)
            if not any(p.first is not None for p in self.word.cycle):
                raise ZValueError("The witness cycle must move the faulty copy", cycle=self.word.cycle)

    @property
    def theta1(self) -> Lasso[ExtendedEvent]:
        """The faulty run, an infinite extended string."""
        return Lasso(
            tuple(p.first for p in self.word.prefix if p.first is not None),
            tuple(p.first for p in self.word.cycle if p.first is not None),
        )

    @property
    def theta2(self) -> Lasso[ExtendedEvent]:
        """The normal run; its cycle is empty when the normal copy stops moving."""
        return Lasso(
            tuple(p.second for p in self.word.prefix if p.second is not None),
            tuple(p.second for p in self.word.cycle if p.second is not None),
        )

    @property
    def observation(self) -> Lasso[Output]:
        """Visible outputs shared by both runs."""
        return project(self.theta1, Axis.OUTPUT)


@dataclass(frozen=True)
class Verdict:
    diagnosable: bool
    witness: Optional[Witness] = None
    """Present exactly when the system is not diagnosable"""
    stats: Mapping[str, Mapping[str, int]] = field(default_factory=frozendict)
    """Sizes of the intermediate constructions"""

    def __post_init__(self):
        object.__setattr__(self, "stats", fvalmap(fd, self.stats))
        if PhiDiagConstants.checks and self.diagnosable != (self.witness is None):
            raise ZValueError("A witness is given exactly for negative verdicts", verdict=self)


def render_lasso(lasso: Lasso, render=str, sep: str = " ") -> str:
    """`u (v)^ω` with `u` omitted when empty, `u` alone when the cycle is empty."""
    prefix = sep.join(render(x) for x in lasso.prefix)
    if lasso.is_finite:
        return prefix
    cycle = f"({sep.join(render(x) for x in lasso.cycle)})^ω"
    return f"{prefix} {cycle}" if prefix else cycle


def _event_to_dict(e: Optional[ExtendedEvent]) -> Optional[dict]:
    return None if e is None else {"q": e.q, "sigma": e.sigma, "o": e.o}


def _event_from_dict(d: Any) -> Optional[ExtendedEvent]:
    if d is None:
        return None
    if not isinstance(d, dict) or set(d) != {"q", "sigma", "o"}:
        raise ZValueError("An extended event is an object with keys q, sigma, o", value=d)
    return ExtendedEvent(d["q"], d["sigma"], d["o"])


def _pair_to_dict(p: EventPair) -> dict:
    return {"first": _event_to_dict(p.first), "second": _event_to_dict(p.second)}


def _lasso_to_dict(lasso: Lasso, f) -> dict:
    return {"prefix": [f(x) for x in lasso.prefix], "cycle": [f(x) for x in lasso.cycle]}


def verdict_to_dict(v: Verdict) -> dict:
    res: dict[str, Any] = {"diagnosable": v.diagnosable, "witness": None, "projections": None}
    if v.witness is not None:
        w = v.witness
        res["witness"] = _lasso_to_dict(w.word, _pair_to_dict)
        res["witness"]["states"] = _lasso_to_dict(w.states, str)
        res["projections"] = {
            "faulty": _lasso_to_dict(w.theta1, _event_to_dict),
            "normal": _lasso_to_dict(w.theta2, _event_to_dict),
            "observation": _lasso_to_dict(w.observation, str),
            "rendered": {
                "faulty": render_lasso(w.theta1, ExtendedEvent.short),
                "normal": render_lasso(w.theta2, ExtendedEvent.short),
                "observation": render_lasso(w.observation, render_output),
            },
        }
    res["stats"] = {k: dict(s) for k, s in v.stats.items()}
    return res


def verdict_from_dict(d: Any) -> Verdict:
    """Reads back `verdict_to_dict`; projections are recomputed from the witness."""
    if not isinstance(d, dict) or "diagnosable" not in d:
        raise ZValueError("Not a verdict", value=d)
    witness = None
    wd = d.get("witness")
    if wd is not None:
        word = Lasso(
            tuple(EventPair(_event_from_dict(p["first"]), _event_from_dict(p["second"])) for p in wd["prefix"]),
            tuple(EventPair(_event_from_dict(p["first"]), _event_from_dict(p["second"])) for p in wd["cycle"]),
        )
        states = Lasso(tuple(wd["states"]["prefix"]), tuple(wd["states"]["cycle"]))
        witness = Witness(word, states)
    return Verdict(bool(d["diagnosable"]), witness, d.get("stats", {}))
