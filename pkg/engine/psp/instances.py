"""
Path-Systems Instances
======================
The tree × Z_p family: a complete binary tree of height h, every node paired
with each residue mod p. R combines the two children of a node by addition,
S marks each leaf with its residue σ(l), and the constant t sits at the root.

Tree nodes use heap ids (root = 1, children 2v and 2v+1); element ids are
"n<node>_r<residue>".
"""
import re
from dataclasses import dataclass

from pydantic import BaseModel, Field, field_validator, model_validator

from engine.core.structures import Relation, Structure
from engine.errors import StructureError
from engine.logic.formulas import Vocabulary

LFP_SENTENCE = "lfp[X, u](S(u) | exists v. exists w. (X(v) & X(w) & R(v, w, u)))(t)"

_ELEMENT = re.compile(r"^n(\d+)_r(\d+)$")


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, int(p ** 0.5) + 1))


# ============================================================
# Schema
# ============================================================

class TreeGroupSpec(BaseModel):
    """Parameters of one tree × Z_p instance. sigma lists leaf residues left to right."""
    h: int = Field(..., ge=1, description="Height of the complete binary tree")
    p: int = Field(..., description="Prime modulus")
    sigma: list[int] = Field(..., description="Residue of each leaf, in leaf order")
    t: int = Field(..., description="Residue paired with the root in the constant t")

    model_config = {
        "frozen": True,
        "json_schema_extra": {"examples": [{"h": 2, "p": 3, "sigma": [1, 0, 2, 1], "t": 1}]},
    }

    @field_validator("p")
    @classmethod
    def validate_prime(cls, v):
        if not is_prime(v):
            raise ValueError(f"p must be prime, got {v}")
        return v

    @model_validator(mode="after")
    def validate_residues(self):
        if len(self.sigma) != 2 ** self.h:
            raise ValueError(f"sigma needs {2 ** self.h} leaf values, got {len(self.sigma)}")
        for value in list(self.sigma) + [self.t]:
            if not 0 <= value < self.p:
                raise ValueError(f"residue {value} outside Z_{self.p}")
        return self

    # ==========================================
    # TREE SHAPE
    # ==========================================
    @property
    def node_count(self) -> int:
        return 2 ** (self.h + 1) - 1

    @property
    def leaves(self) -> range:
        return range(2 ** self.h, 2 ** (self.h + 1))

    def leaf_value(self, leaf: int) -> int:
        return self.sigma[leaf - 2 ** self.h]


def shifted(spec: TreeGroupSpec, delta: int = 1) -> TreeGroupSpec:
    """The same tree and leaves with target t + delta."""
    return spec.model_copy(update={"t": (spec.t + delta) % spec.p})


def element_id(node: int, residue: int) -> str:
    return f"n{node}_r{residue}"


def parse_element(element: str) -> tuple[int, int]:
    """(node, residue) of an element id."""
    match = _ELEMENT.match(element)
    if match is None:
        raise StructureError([f"not a tree x Z_p element: {element!r}"])
    return int(match.group(1)), int(match.group(2))


def psp_vocabulary() -> Vocabulary:
    return Vocabulary({"R": 3, "S": 1}, frozenset({"t"}))


@dataclass(frozen=True)
class PspInstance:
    structure: Structure

    __hash__ = None

    def __post_init__(self):
        s = self.structure
        arities = {name: rel.arity for name, rel in s.relations.items()}
        if arities != {"R": 3, "S": 1} or set(s.constants) != {"t"}:
            raise StructureError([f"not a path-systems vocabulary: relations {arities}, "
                                  f"constants {sorted(s.constants)}"])


def generate_instance(spec: TreeGroupSpec, distinct_children: bool = True) -> PspInstance:
    """
    Build P(h, p, σ, t). With distinct_children=False a node may also be
    combined with itself, which breaks the one-residue-per-node property of
    the upward closure.
    """
    p = spec.p
    universe = [element_id(v, a) for v in range(1, spec.node_count + 1) for a in range(p)]
    r_tuples = set()
    for w in range(1, 2 ** spec.h):
        left, right = 2 * w, 2 * w + 1
        pairs = [(left, right), (right, left)]
        if not distinct_children:
            pairs += [(left, left), (right, right)]
        for u, v in pairs:
            for a in range(p):
                for b in range(p):
                    r_tuples.add((element_id(u, a), element_id(v, b), element_id(w, (a + b) % p)))
    s_tuples = {(element_id(leaf, spec.leaf_value(leaf)),) for leaf in spec.leaves}
    structure = Structure.build(
        universe,
        {"R": Relation(3, frozenset(r_tuples)), "S": Relation(1, frozenset(s_tuples))},
        {"t": element_id(1, spec.t)},
    )
    return PspInstance(structure)


def expected_positivity(spec: TreeGroupSpec) -> bool:
    return spec.t == sum(spec.sigma) % spec.p
