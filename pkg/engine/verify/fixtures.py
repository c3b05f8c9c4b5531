"""
Curated fixtures behind the game and strategy suites.

    SENTENCES          low-rank LREC= sentences over the path-systems vocabulary
                       that must evaluate identically on P(h,p,σ,t) and P(h,p,σ,t+1)
    distinguishing_fixtures()
                       (A, B, φ) triples where φ separates A from B; the formula
                       Spoiler has to win every one of them
    oracle_pairs()     tiny structure pairs with a hand-classified outcome of the
                       bijection game
"""
from dataclasses import dataclass
from functools import lru_cache

from engine.core.structures import Structure
from engine.logic.formulas import Formula, Vocabulary
from engine.logic.measures import iteration_degree, rank
from engine.logic.parser import parse_formula
from engine.psp.instances import TreeGroupSpec, generate_instance, psp_vocabulary, shifted

# ============================================================
# Low-rank sentences on the path-systems pair
# ============================================================

SENTENCES = (
    "S(t)",
    "exists u. exists v. R(u, v, t)",
    "exists u. exists v. S(u) & S(v) & R(u, v, t)",
    "forall u. !(R(u, u, t))",
    "exists u. R(t, u, u) | R(u, t, u)",
    "count{u : exists v. R(u, v, t)} = 10",
    "count{u : R(u, u, u)} = 0",
    "forall u. (exists v. exists w. R(v, w, u)) | (exists v. exists w. R(u, v, w))",
    "exists u. S(u) & (exists v. exists w. R(u, v, w))",
    "exists u. exists v. R(u, v, t) & (exists w. R(w, u, v))",
    "exists u. count{v : exists w. R(v, w, u)} = 10",
    "lrec[x;y;%p](exists z. R(y, z, x);false;%p = 0)(t;1)",
    "lrec[x;y;%p](exists z. R(y, z, x);false;%p = 0)(t;0)",
    "lrec[x;y;%p](exists z. R(y, z, x);x = y;%p = 10)(t;1)",
    "exists u. lrec[x;y;%p](R(x, y, t);false;%p = 1)(u;2)",
    "forall u. lrec[x;y;%p](R(x, y, t);false;%p = 0 | %p = 1)(u;1)",
    "!(lrec[x;y;%p](exists z. R(z, y, x) | R(y, z, x);false;S(x) & %p = 0)(t;1))",
)

SENTENCE_SPEC = {"h": 6, "p": 5}


@lru_cache(maxsize=None)
def sentence_suite() -> tuple[Formula, ...]:
    vocab = psp_vocabulary()
    return tuple(parse_formula(text, vocab) for text in SENTENCES)


# ============================================================
# Distinguishing fixtures
# ============================================================

@dataclass(frozen=True)
class Fixture:
    name: str
    a: Structure
    b: Structure
    formula: str
    spec: TreeGroupSpec | None = None

    __hash__ = None

    @property
    def phi(self) -> Formula:
        return parse_formula(self.formula, Vocabulary.from_structure(self.a))

    @property
    def k(self) -> int:
        # constants are pebbled before the first move
        return rank(self.phi) + len(set(self.a.constants.values()))

    @property
    def q(self) -> int:
        return iteration_degree(self.phi)


def _universe(n: int) -> list[str]:
    return [f"u{i}" for i in range(n)]


def _graph(n: int, edges, constants=None, **unary) -> Structure:
    relations = {"E": (2, [(f"u{a}", f"u{b}") for a, b in edges])}
    for name, members in unary.items():
        relations[name] = (1, [(f"u{i}",) for i in members])
    return Structure.build(_universe(n), relations, {c: f"u{i}" for c, i in (constants or {}).items()})


def _cycle(n: int, start: int = 0) -> list:
    return [(start + i, start + (i + 1) % n) for i in range(n)]


def _symmetric(pairs):
    return [(a, b) for a, b in pairs] + [(b, a) for a, b in pairs]


def _unary(n: int, constants=None, **unary) -> Structure:
    return _graph(n, [], constants, **unary)


def _psp_fixture(name: str, sigma: list[int], p: int, t: int) -> Fixture:
    spec = TreeGroupSpec(h=1, p=p, sigma=sigma, t=t)
    return Fixture(
        name,
        generate_instance(spec).structure,
        generate_instance(shifted(spec)).structure,
        "exists u. exists v. S(u) & S(v) & R(u, v, t)",
        spec,
    )


def distinguishing_fixtures() -> list[Fixture]:
    ternary_a = Structure.build(_universe(3), {"T": (3, [("u0", "u1", "u0")])})
    ternary_b = Structure.build(_universe(3), {"T": (3, [("u0", "u1", "u2")])})
    return [
        Fixture("unary_count", _unary(4, P=[0]), _unary(4, P=[0, 1]), "count{x : P(x)} = 1"),
        Fixture("unary_count_two", _unary(4, P=[0, 1]), _unary(4, P=[0, 1, 2]), "count{x : P(x)} = 2"),
        Fixture("loop", _graph(3, [(0, 0)]), _graph(3, [(0, 1)]), "exists x. E(x, x)"),
        Fixture("no_loops", _graph(3, [(0, 1)]), _graph(3, [(0, 1), (2, 2)]), "count{x : E(x, x)} = 0"),
        Fixture("in_edges", _graph(3, _cycle(3)), _graph(3, [(0, 1), (1, 2), (2, 1)]),
                "forall x. exists y. E(y, x)"),
        Fixture("functional", _graph(3, _cycle(3)), _graph(3, [(0, 1), (0, 2), (1, 0)]),
                "forall x. count{y : E(x, y)} = 1"),
        Fixture("two_cycles", _graph(4, _cycle(4)), _graph(4, _symmetric([(0, 1), (2, 3)])),
                "forall x. exists y. E(x, y) & E(y, x)"),
        Fixture("triangles", _graph(6, _cycle(6)), _graph(6, _cycle(3) + _cycle(3, 3)),
                "exists x. exists y. E(x, y) & (exists z. E(y, z) & E(z, x))"),
        Fixture("star", _graph(4, _symmetric([(0, 1), (1, 2), (2, 3)])), _graph(4, _symmetric([(0, 1), (0, 2), (0, 3)])),
                "exists x. count{y : E(x, y)} = 3"),
        Fixture("path_two", _graph(3, [(0, 1), (1, 2)]), _graph(3, [(0, 1), (2, 1)]),
                "exists x. exists y. exists z. E(x, y) & E(y, z)"),
        Fixture("symmetric", _graph(3, _symmetric([(0, 1)])), _graph(3, [(0, 1)]),
                "forall x. forall y. E(x, y) | !(E(y, x))"),
        Fixture("ternary", ternary_a, ternary_b, "exists x. exists y. T(x, y, x)"),
        Fixture("disjoint_colours", _unary(3, P=[0], Q=[1]), _unary(3, P=[0], Q=[0]),
                "!(exists x. P(x) & Q(x))"),
        Fixture("some_colour", _unary(3, P=[], Q=[]), _unary(3, P=[], Q=[1]), "exists x. P(x) | Q(x)"),
        Fixture("equal_counts", _unary(4, P=[0], Q=[1]), _unary(4, P=[0], Q=[1, 2]),
                "exists %n. count{x : P(x)} = %n & count{x : Q(x)} = %n"),
        Fixture("constant_colour", _unary(3, {"c": 0}, P=[0]), _unary(3, {"c": 0}, P=[1]), "P(c)"),
        Fixture("constant_edge", _graph(3, [(0, 1)], {"c": 0}), _graph(3, [(1, 2)], {"c": 0}),
                "exists x. E(c, x)"),
        Fixture("constant_path", _graph(3, [(0, 1), (1, 2)], {"c": 0, "d": 2}),
                _graph(3, [(0, 1), (2, 1)], {"c": 0, "d": 2}), "exists x. E(c, x) & E(x, d)"),
        Fixture("lrec_sink", _graph(3, [(0, 1)], {"c": 0}), _graph(3, [(1, 2)], {"c": 0}),
                "lrec[x;y;%p](E(x, y);false;%p = 0)(c;1)"),
        Fixture("lrec_fanout", _graph(3, [(0, 1), (0, 2)], {"c": 0}), _graph(3, [(0, 1)], {"c": 0}),
                "lrec[x;y;%p](E(x, y);false;%p = 0 | (x = c & %p = 2))(c;1)"),
        Fixture("lrec_everywhere", _graph(3, [(0, 1)]), _graph(3, []),
                "forall z. lrec[x;y;%p](E(x, y);false;%p = 0)(z;1)"),
        _psp_fixture("psp_p2_positive", [0, 1], 2, 1),
        _psp_fixture("psp_p2_negative", [0, 1], 2, 0),
        _psp_fixture("psp_p2_double", [1, 1], 2, 0),
        _psp_fixture("psp_p3_positive", [1, 2], 3, 0),
        _psp_fixture("psp_p3_high", [2, 2], 3, 1),
        _psp_fixture("psp_p3_zero", [0, 0], 3, 0),
    ]


# ============================================================
# Bijection-game oracle pairs: (name, A, B, rounds, duplicator wins)
# ============================================================

def _oracle_graph(n: int, edges, constants=None, **unary) -> Structure:
    relations = {"E": (2, [(f"e{a}", f"e{b}") for a, b in edges])}
    for name, members in unary.items():
        relations[name] = (1, [(f"e{i}",) for i in members])
    return Structure.build([f"e{i}" for i in range(n)], relations,
                           {c: f"e{i}" for c, i in (constants or {}).items()})


def oracle_pairs() -> list[tuple]:
    triangle = [(0, 1), (1, 2), (2, 0)]
    square = [(0, 1), (1, 2), (2, 3), (3, 0)]
    hexagon = [(i, (i + 1) % 6) for i in range(6)]
    two_triangles = [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]
    digons = _symmetric([(0, 1), (2, 3)])
    path = _symmetric([(0, 1), (1, 2), (2, 3)])
    star = _symmetric([(0, 1), (0, 2), (0, 3)])
    return [
        ("identical_triangles", _oracle_graph(3, triangle), _oracle_graph(3, triangle), 3, True),
        ("colour_counts", _oracle_graph(3, [], P=[0]), _oracle_graph(3, [], P=[0, 1]), 1, False),
        ("isomorphic_colours", _oracle_graph(3, [], P=[0]), _oracle_graph(3, [], P=[2]), 3, True),
        ("no_rounds", _oracle_graph(3, [], P=[0]), _oracle_graph(3, [], P=[]), 0, True),
        ("constant_clash", _oracle_graph(3, [], {"c": 0}, P=[0]), _oracle_graph(3, [], {"c": 0}, P=[1]), 0, False),
        ("square_vs_digons_1", _oracle_graph(4, square), _oracle_graph(4, digons), 1, True),
        ("square_vs_digons_2", _oracle_graph(4, square), _oracle_graph(4, digons), 2, False),
        ("hexagon_vs_triangles_2", _oracle_graph(6, hexagon), _oracle_graph(6, two_triangles), 2, True),
        ("hexagon_vs_triangles_3", _oracle_graph(6, hexagon), _oracle_graph(6, two_triangles), 3, False),
        ("path_vs_star", _oracle_graph(4, path), _oracle_graph(4, star), 2, False),
    ]
