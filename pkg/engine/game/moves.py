"""
Game Configuration and Moves
============================
Every move a player can submit, with a JSON form for transcripts. Values in
JSON keep their Python type: element ids are strings, numbers are integers.
"""
from dataclasses import dataclass, field
from typing import Mapping

from engine.core.injections import PartialInjection
from engine.core.structures import Structure, is_element, is_number
from engine.errors import ConfigError, TranscriptError
from engine.eval.budget import Budget
from engine.logic.formulas import Formula, Sort, Var, Vocabulary
from engine.logic.parser import parse_formula
from engine.logic.printer import print_formula

# ============================================================
# Configuration
# ============================================================

MAX_MATCH_TURNS = 256


@dataclass(frozen=True)
class GameConfig:
    """The k-step, q-degree game on two structures over one universe."""
    a: Structure
    b: Structure
    k: int
    q: int
    budget: Budget = field(default_factory=Budget)

    __hash__ = None

    def __post_init__(self):
        if self.k < 0 or self.q < 0:
            raise ConfigError(f"k and q must be non-negative, got k={self.k}, q={self.q}")
        if self.a.universe != self.b.universe:
            raise ConfigError("the two structures must share one universe")
        if Vocabulary.from_structure(self.a) != Vocabulary.from_structure(self.b):
            raise ConfigError("the two structures must share one vocabulary")

    @property
    def universe(self) -> tuple:
        return self.a.universe

    @property
    def n(self) -> int:
        return self.a.size

    @property
    def max_level(self) -> int:
        """Largest opening counter: n^q, or ⟨r̄⟩ of the all-n tuple if that is larger."""
        return max(self.n ** self.q, (self.n + 1) ** self.q - 1)


# ============================================================
# Value encoding
# ============================================================

def value_to_json(value):
    return value


def value_from_json(value):
    if is_element(value) or is_number(value):
        return value
    raise TranscriptError(f"not an element or number: {value!r}")


def node_from_json(values) -> tuple:
    return tuple(value_from_json(v) for v in values)


def var_to_json(var: Var) -> str:
    return str(var)


def var_from_json(text: str) -> Var:
    if text.startswith("%"):
        return Var(text[1:], Sort.NUMBER)
    return Var(text, Sort.ELEMENT)


# ============================================================
# Moves
# ============================================================

@dataclass(frozen=True)
class ExtensionRequest:
    kind = "extension"

    def to_json(self) -> dict:
        return {"type": self.kind}


@dataclass(frozen=True)
class Bijection:
    """Duplicator's bijection g for an extension move."""
    g: PartialInjection
    kind = "bijection"

    __hash__ = None

    def to_json(self) -> dict:
        return {"type": self.kind, "g": self.g.to_json()}


@dataclass(frozen=True)
class Pick:
    element: str
    kind = "pick"

    def to_json(self) -> dict:
        return {"type": self.kind, "a": self.element}


@dataclass(frozen=True)
class GraphOpen:
    """
    Spoiler's graph move: dimension c, the node variables xs and ys, φ_E and
    φ_∼ over them, parameter bindings (A-side values), start node ā_0 and
    counter ℓ_0.
    """
    c: int
    xs: tuple
    ys: tuple
    edge: Formula
    sim: Formula
    start: tuple
    level: int
    params: tuple = ()
    kind = "graph-open"

    @property
    def bindings(self) -> dict:
        return dict(self.params)

    def to_json(self) -> dict:
        return {
            "type": self.kind,
            "c": self.c,
            "xs": [var_to_json(x) for x in self.xs],
            "ys": [var_to_json(y) for y in self.ys],
            "edge": print_formula(self.edge),
            "sim": print_formula(self.sim),
            "start": [value_to_json(v) for v in self.start],
            "level": self.level,
            "params": [[var_to_json(v), value_to_json(value)] for v, value in self.params],
        }


@dataclass(frozen=True)
class GraphResponse:
    """Duplicator's round maps: g_i and h_Y for every Y it is asked about."""
    g: PartialInjection
    h_family: Mapping[frozenset, PartialInjection]
    kind = "graph-response"

    __hash__ = None

    def to_json(self) -> dict:
        family = sorted(([sorted(y), h.to_json()] for y, h in self.h_family.items()),
                        key=lambda entry: (len(entry[0]), entry[0]))
        return {"type": self.kind, "g": self.g.to_json(), "h": family}


@dataclass(frozen=True)
class GraphStep:
    node: tuple
    kind = "graph-step"

    def to_json(self) -> dict:
        return {"type": self.kind, "node": [value_to_json(v) for v in self.node]}


@dataclass(frozen=True)
class GraphExit:
    kind = "graph-exit"

    def to_json(self) -> dict:
        return {"type": self.kind}


@dataclass(frozen=True)
class Forfeit:
    reason: str
    kind = "forfeit"

    def to_json(self) -> dict:
        return {"type": self.kind, "reason": self.reason}


Move = ExtensionRequest | Bijection | Pick | GraphOpen | GraphResponse | GraphStep | GraphExit | Forfeit


def move_from_json(data: Mapping, vocab: Vocabulary) -> Move:
    """
    Raises:
        TranscriptError: unknown move type or malformed fields
    """
    try:
        match data["type"]:
            case "extension":
                return ExtensionRequest()
            case "bijection":
                return Bijection(PartialInjection.from_json(data["g"]))
            case "pick":
                return Pick(value_from_json(data["a"]))
            case "graph-open":
                xs = tuple(var_from_json(x) for x in data["xs"])
                ys = tuple(var_from_json(y) for y in data["ys"])
                return GraphOpen(
                    c=int(data["c"]),
                    xs=xs,
                    ys=ys,
                    edge=parse_formula(data["edge"], vocab),
                    sim=parse_formula(data["sim"], vocab),
                    start=node_from_json(data["start"]),
                    level=int(data["level"]),
                    params=tuple((var_from_json(v), value_from_json(value)) for v, value in data["params"]),
                )
            case "graph-response":
                family = {frozenset(y): PartialInjection.from_json(pairs) for y, pairs in data["h"]}
                return GraphResponse(PartialInjection.from_json(data["g"]), family)
            case "graph-step":
                return GraphStep(node_from_json(data["node"]))
            case "graph-exit":
                return GraphExit()
            case "forfeit":
                return Forfeit(str(data["reason"]))
            case other:
                raise TranscriptError(f"unknown move type {other!r}")
    except (KeyError, TypeError, ValueError) as exc:
        raise TranscriptError(f"malformed move {data!r}: {exc}") from exc
