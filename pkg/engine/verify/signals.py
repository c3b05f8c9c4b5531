"""
Verify Signals
==============
Case generators for the property suites. Every suite draws its cases from
one np.random.default_rng(seed) and yields one row per checked case:

    check_id   the property being checked
    case       case index or fixture name
    passed     whether the engine agreed with the reference
    value      a numeric reading for the case (count, margin, seconds)
    detail     the counterexample, filled only when the case fails
"""
import logging
import time
from itertools import product

import numpy as np
import pandas as pd

from Backend.session_engine import GameSession
from Backend.states import Actor, Outcome
from engine.core.injections import PartialInjection, compose_injection, is_partial_isomorphism
from engine.core.structures import Structure, decode_number_tuple, encode_number_tuple, structure_to_json
from engine.errors import WorkbenchError
from engine.eval.evaluator import Evaluator
from engine.eval.semigraphs import LabelledGraph, LabelledSemiGraph, chi, chi_hat, quotient
from engine.game.agents import IdentityDuplicator, RandomDuplicator
from engine.game.match import config_from_header, replay, run_match
from engine.game.moves import GameConfig, GraphOpen, GraphStep, move_from_json
from engine.game.oracle import bijection_game_oracle
from engine.game.transcript import Transcript, canonical_json
from engine.logic.formulas import Vocabulary
from engine.logic.measures import iteration_degree, rank
from engine.psp.instances import TreeGroupSpec, expected_positivity, generate_instance, parse_element, shifted
from engine.psp.solvers import solve_direct, solve_via_lfp, upward_closure
from engine.strategy.harness import run_harness
from engine.strategy.offsets import offset_bijection
from engine.strategy.registry import make_duplicator
from engine.strategy.spoiler import FormulaSpoiler, GreedySpoiler, RandomSpoiler
from engine.treecomb.closures import closure, components
from engine.treecomb.consistency import OffsetFn, is_consistent
from engine.treecomb.lifts import check_lift_conditions, forced_extension, lift_sequence
from engine.treecomb.trees import BinTree, min_height
from engine.verify.fixtures import SENTENCE_SPEC, SENTENCES, distinguishing_fixtures, oracle_pairs, sentence_suite
from engine.verify.oracles import consistent_table, extends_to_total, naive_chi, union_find_quotient

logger = logging.getLogger("lrec.verify")

# ============================================================
# Configuration
# ============================================================

SUITE_CASES = {
    "core": 200,
    "chi": 500,
    "quotient": 500,
    "psp": 200,
    "treecomb": 500,
    "game": 100,
    "strategy": 500,
}
SUITES = tuple(SUITE_CASES)

# psp_self_pairs: let R combine a node with itself
MUTATIONS = ("psp_self_pairs",)

MATCH_SECONDS = 5.0


def _row(check_id: str, case, passed: bool, value=None, detail: str = "") -> dict:
    return {
        "check_id": check_id,
        "case": case,
        "passed": bool(passed),
        "value": value,
        "detail": "" if passed else detail,
    }


def _subset(rng: np.random.Generator, items, low: int, high: int) -> list:
    items = list(items)
    size = int(rng.integers(low, min(high, len(items)) + 1))
    return sorted(items[i] for i in rng.choice(len(items), size=size, replace=False))


# ============================================================
# Random inputs
# ============================================================

def random_structure(rng: np.random.Generator, n: int, density: float = 0.3) -> Structure:
    universe = [f"u{i}" for i in range(n)]
    edges = [(a, b) for a in universe for b in universe if rng.random() < density]
    marked = [(a,) for a in universe if rng.random() < 0.5]
    return Structure.build(universe, {"E": (2, edges), "P": (1, marked)})


def perturbed(rng: np.random.Generator, s: Structure) -> Structure:
    """s with one E pair flipped."""
    a, b = (s.universe[int(i)] for i in rng.integers(s.size, size=2))
    edges = set(s.relation("E").tuples) ^ {(a, b)}
    return Structure.build(s.universe, {"E": (2, edges), "P": s.relations["P"]})


def random_injection(rng: np.random.Generator, universe) -> PartialInjection:
    universe = list(universe)
    domain = _subset(rng, universe, 0, len(universe))
    image = [universe[i] for i in rng.permutation(len(universe))[:len(domain)]]
    return PartialInjection(dict(zip(domain, image)))


def random_labelled_graph(rng: np.random.Generator, max_vertices: int = 8, max_label: int = 8) -> LabelledGraph:
    n = int(rng.integers(1, max_vertices + 1))
    vertices = tuple(f"v{i}" for i in range(n))
    edges = frozenset((a, b) for a in vertices for b in vertices if rng.random() < 0.3)
    labels = {v: frozenset(int(x) for x in np.flatnonzero(rng.random(max_label + 1) < 0.3)) for v in vertices}
    return LabelledGraph(vertices, edges, labels)


def random_semigraph(rng: np.random.Generator, max_vertices: int = 10, max_label: int = 6) -> LabelledSemiGraph:
    n = int(rng.integers(1, max_vertices + 1))
    vertices = tuple(f"v{i}" for i in range(n))
    edges = frozenset((a, b) for a in vertices for b in vertices if rng.random() < 0.2)
    sim = frozenset((a, b) for a in vertices for b in vertices if rng.random() < 0.1)
    labels = {v: frozenset(int(x) for x in np.flatnonzero(rng.random(max_label + 1) < 0.25)) for v in vertices}
    return LabelledSemiGraph(vertices, edges, sim, labels)


def random_total_offsets(rng: np.random.Generator, t: BinTree, p: int) -> OffsetFn:
    """A consistent function on the whole tree from random leaf values."""
    values = {leaf: int(rng.integers(p)) for leaf in t.leaves()}
    for v in sorted(t.internal(), reverse=True):
        values[v] = (values[2 * v] + values[2 * v + 1]) % p
    return OffsetFn(p, values)


def random_spec(rng: np.random.Generator, h: int, p: int) -> TreeGroupSpec:
    return TreeGroupSpec(h=h, p=p, sigma=[int(x) for x in rng.integers(p, size=2 ** h)], t=int(rng.integers(p)))


# ============================================================
# Suites
# ============================================================

def core_signals(rng: np.random.Generator, cases: int, mutation=None) -> list[dict]:
    rows = []
    for i in range(cases):
        n = int(rng.integers(2, 6))
        a, b = random_structure(rng, n), random_structure(rng, n)
        f = random_injection(rng, a.universe)

        forward = is_partial_isomorphism(f, a, b)
        backward = is_partial_isomorphism(f.inverse(), b, a)
        rows.append(_row("partial_iso_symmetry", i, forward == backward,
                         detail=f"f={f.to_json()}: {forward} forward, {backward} backward"))

        rows.append(_row("identity_partial_iso", i,
                         is_partial_isomorphism(PartialInjection.identity(f.domain), a, a),
                         detail=f"identity on {sorted(f.domain)} rejected"))

        left, right = _subset(rng, f.domain, 0, len(f)), _subset(rng, f.domain, 0, len(f))
        joined = compose_injection(f.restrict(left), f.restrict(right))
        rows.append(_row("compose_restrictions", i, joined == f.restrict(set(left) | set(right)),
                         detail=f"{joined.to_json()} vs {f.restrict(set(left) | set(right)).to_json()}"))

    for n, length in product(range(1, 5), range(1, 4)):
        tuples = list(product(range(n + 1), repeat=length))
        codes = [encode_number_tuple(r, n) for r in tuples]
        bad = [r for r, code in zip(tuples, codes) if decode_number_tuple(code, n, length) != r]
        ok = sorted(codes) == list(range((n + 1) ** length)) and not bad
        rows.append(_row("number_encoding_bijective", f"n={n},len={length}", ok, len(codes),
                         detail=f"first bad tuple {bad[:1]}"))
    return rows


def chi_signals(rng: np.random.Generator, cases: int, mutation=None) -> list[dict]:
    rows = []
    started = time.perf_counter()
    for i in range(cases):
        g = random_labelled_graph(rng)
        level = int(rng.integers(-1, 21))
        mismatch = next((u for u in g.vertices if chi(g, u, level) != naive_chi(g, u, level)), None)
        rows.append(_row("chi_matches_recursion", i, mismatch is None, level,
                         detail=f"vertex {mismatch} at level {level}, |V|={len(g.vertices)}"))
    elapsed = time.perf_counter() - started
    rows.append(_row("chi_total_time", "all", elapsed < 10.0, round(elapsed, 3),
                     detail=f"{elapsed:.2f}s for {cases} graphs"))
    return rows


def quotient_signals(rng: np.random.Generator, cases: int, mutation=None) -> list[dict]:
    rows = []
    for i in range(cases):
        g = random_semigraph(rng)
        q = quotient(g)
        blocks = [frozenset(m) for m in q.classes]
        classes, edges, labels = union_find_quotient(g)

        got_edges = {(blocks[a], blocks[b]) for a, b in q.edges}
        got_labels = {blocks[c]: frozenset(values) for c, values in q.labels.items() if values}
        problems = []
        if set(blocks) != classes:
            problems.append("classes")
        if got_edges != edges:
            problems.append("edges")
        if got_labels != labels:
            problems.append("labels")
        rows.append(_row("quotient_matches_union_find", i, not problems, len(classes),
                         detail=f"{', '.join(problems)} differ on |V|={len(g.vertices)}"))

        ordered = tuple(sorted(classes, key=sorted))
        reference = LabelledGraph(ordered, frozenset(edges), labels)
        u = g.vertices[int(rng.integers(len(g.vertices)))]
        level = int(rng.integers(0, 21))
        block = next(c for c in ordered if u in c)
        expected = naive_chi(reference, block, level)
        rows.append(_row("chi_hat_on_quotient", i, chi_hat(g, u, level) == expected, level,
                         detail=f"vertex {u} at level {level}"))
    return rows


def psp_signals(rng: np.random.Generator, cases: int, mutation=None) -> list[dict]:
    distinct = mutation != "psp_self_pairs"
    rows = []
    for i in range(cases):
        spec = random_spec(rng, int(rng.integers(1, 4)), int(rng.choice([2, 3, 5])))
        inst = generate_instance(spec, distinct_children=distinct)
        direct, via_lfp, expected = solve_direct(inst), solve_via_lfp(inst), expected_positivity(spec)
        rows.append(_row("three_way_agreement", i, direct == via_lfp == expected, int(expected),
                         detail=f"{spec.model_dump()}: direct={direct}, lfp={via_lfp}, sum rule={expected}"))

        residues: dict = {}
        for element in upward_closure(inst):
            node, residue = parse_element(element)
            residues.setdefault(node, set()).add(residue)
        crowded = sorted(v for v, rs in residues.items() if len(rs) != 1)
        complete = len(residues) == spec.node_count
        rows.append(_row("closure_one_residue_per_node", i, complete and not crowded, len(crowded),
                         detail=f"{spec.model_dump()}: nodes {crowded[:5]} carry several residues"))

        again = generate_instance(spec, distinct_children=distinct)
        same = canonical_json(structure_to_json(inst.structure)) == canonical_json(structure_to_json(again.structure))
        rows.append(_row("generation_canonical", i, same, detail=f"{spec.model_dump()} generated twice differs"))
    return rows


def treecomb_signals(rng: np.random.Generator, cases: int, mutation=None) -> list[dict]:
    rows = []
    tables = {(h, p): consistent_table(BinTree(h), p) for h in (1, 2, 3) for p in (2, 3)}
    for i in range(cases):
        h, p = int(rng.integers(1, 4)), int(rng.choice([2, 3]))
        t, table = BinTree(h), tables[(h, p)]
        x = _subset(rng, t.nodes(), 1, 6)
        cl = closure(t, x)

        rows.append(_row("closure_min_height", i, min_height(t, cl) == min_height(t, x), h,
                         detail=f"h={h}, X={x}: min-h(cl X)={min_height(t, cl)}, min-h(X)={min_height(t, x)}"))

        margins = [len(c.frontier) - c.height for c in components(t, cl)]
        rows.append(_row("frontier_exceeds_height", i, min(margins) > 0, min(margins),
                         detail=f"h={h}, X={x}: |F| - height = {margins}"))

        if rng.random() < 0.5:
            rho = random_total_offsets(rng, t, p).restrict(x)
        else:
            rho = OffsetFn(p, {v: int(rng.integers(p)) for v in x})
        criterion, exhaustive = is_consistent(t, rho), extends_to_total(table, rho)
        rows.append(_row("consistency_oracle", i, criterion == exhaustive, int(exhaustive),
                         detail=f"h={h}, p={p}, ρ={rho.values}: criterion {criterion}, exhaustive {exhaustive}"))

        rho = random_total_offsets(rng, t, p).restrict(x)
        y = _subset(rng, t.nodes(), 1, 6)
        try:
            extended = forced_extension(t, x, y, rho)
            ok, detail = extends_to_total(table, extended), f"h={h}, p={p}, ρ={rho.values}, Y={y}: {extended.values}"
        except WorkbenchError as exc:
            ok, detail = False, f"h={h}, p={p}, ρ={rho.values}, Y={y}: {exc}"
        rows.append(_row("forced_extension_consistent", i, ok, detail=detail))

        rows.append(_lift_row(rng, i))
    return rows


def _lift_row(rng: np.random.Generator, case: int) -> dict:
    h, p, s = int(rng.integers(3, 7)), int(rng.choice([3, 5])), 3
    t = BinTree(h)
    x = _subset(rng, t.nodes(), 1, 4)
    rho = random_total_offsets(rng, t, p).restrict(x)
    ys = [_subset(rng, t.nodes(), 1, s) for _ in range(int(rng.integers(1, 4)))]
    try:
        sigmas = lift_sequence(t, x, rho, ys, s)
        problems = check_lift_conditions(t, rho, ys, sigmas, s)
    except WorkbenchError as exc:
        problems = [f"{type(exc).__name__}: {exc}"]
    return _row("lift_conditions", case, not problems, len(ys),
                detail=f"h={h}, p={p}, ρ={rho.values}, Y={ys}: {problems[:2]}")


def graph_levels(transcript: Transcript) -> list[list[int]]:
    """The counter ℓ after each step of every graph move, replayed from the header."""
    config, f0 = config_from_header(transcript.header)
    vocab = Vocabulary.from_structure(config.a)
    session = GameSession.start(config, f0)
    moves: list[list[int]] = []
    for line in transcript.lines:
        move = move_from_json(line.move, vocab)
        session.apply(Actor(line.actor), move)
        if isinstance(move, GraphOpen):
            moves.append([move.level])
        elif isinstance(move, GraphStep):
            moves[-1].append(session.graph.level if session.graph is not None else 0)
    return moves


def game_signals(rng: np.random.Generator, cases: int, mutation=None) -> list[dict]:
    rows = []
    for i in range(cases):
        a = random_structure(rng, int(rng.integers(3, 6)))
        b = a if rng.random() < 0.3 else perturbed(rng, a)
        config = GameConfig(a, b, 3, 1)
        seed = int(rng.integers(2 ** 31))

        def play():
            spoiler = RandomSpoiler() if i % 2 == 0 else GreedySpoiler()
            duplicator = IdentityDuplicator() if i % 3 == 0 else RandomDuplicator()
            return run_match(config, spoiler, duplicator, seed)

        first, second = play(), play()
        text = first.transcript.to_jsonl()
        try:
            replayed = replay(Transcript.from_jsonl(text))
            ok = (text == second.transcript.to_jsonl()
                  and replayed.outcome is first.outcome
                  and replayed.state_hash() == first.session.state_hash())
            detail = f"seed {seed}: outcomes {first.outcome.name}/{second.outcome.name}/{replayed.outcome.name}"
        except WorkbenchError as exc:
            ok, detail = False, f"seed {seed}: {exc}"
        rows.append(_row("replay_determinism", i, ok, len(first.transcript), detail=detail))

        levels = graph_levels(first.transcript)
        rising = [seq for seq in levels if any(later >= earlier for earlier, later in zip(seq, seq[1:]))]
        rows.append(_row("graph_levels_decrease", i, not rising, len(levels),
                         detail=f"seed {seed}: level sequences {rising[:2]}"))

    for i in range(max(1, cases // 4)):
        a = random_structure(rng, int(rng.integers(3, 6)))
        seed = int(rng.integers(2 ** 31))
        result = run_match(GameConfig(a, a, 3, 1), RandomSpoiler(), IdentityDuplicator(), seed)
        rows.append(_row("identity_on_identical", i, result.outcome is not Outcome.SPOILER_WINS,
                         len(result.transcript), detail=f"seed {seed}: {result.reason}"))

    for name, a, b, r, expected in oracle_pairs():
        got = bijection_game_oracle(a, b, r)
        rows.append(_row("oracle_fixtures", name, got == expected, r,
                         detail=f"{name}: oracle says duplicator wins={got}, expected {expected}"))
    return rows


def strategy_signals(rng: np.random.Generator, cases: int, mutation=None) -> list[dict]:
    rows = []
    for fixture in distinguishing_fixtures():
        phi = fixture.phi
        differs = Evaluator(fixture.a).holds(phi) != Evaluator(fixture.b).holds(phi)
        bounded = rank(phi) <= 3 and iteration_degree(phi) <= 1 and fixture.a.size <= 12
        rows.append(_row("fixture_distinguishes", fixture.name, differs and bounded, rank(phi),
                         detail=f"{fixture.name}: differs={differs}, rank={rank(phi)}, "
                                f"degree={iteration_degree(phi)}, |U|={fixture.a.size}"))

        duplicators = ["identity", "random"] + (["paper"] if fixture.spec is not None else [])
        config = GameConfig(fixture.a, fixture.b, fixture.k, fixture.q)
        for name in duplicators:
            seed = int(rng.integers(2 ** 31))
            result = run_match(config, FormulaSpoiler(phi), make_duplicator(name, fixture.spec), seed)
            rows.append(_row("formula_spoiler_wins", f"{fixture.name}/{name}", result.spoiler_won,
                             len(result.transcript), detail=f"{fixture.name} vs {name}, seed {seed}: {result.reason}"))

    spec = random_spec(rng, SENTENCE_SPEC["h"], SENTENCE_SPEC["p"])
    ev_a = Evaluator(generate_instance(spec).structure)
    ev_b = Evaluator(generate_instance(shifted(spec)).structure)
    for text, phi in zip(SENTENCES, sentence_suite()):
        bounded = rank(phi) <= 3 and iteration_degree(phi) <= 1
        try:
            on_a, on_b = ev_a.holds(phi), ev_b.holds(phi)
            ok, detail = bounded and on_a == on_b, f"{text}: A={on_a}, B={on_b}, rank={rank(phi)}"
        except WorkbenchError as exc:
            ok, detail = False, f"{text}: {exc}"
        rows.append(_row("sentence_agreement", text, ok, rank(phi), detail=detail))

    for i in range(max(1, cases // 10)):
        t = BinTree(int(rng.integers(1, 5)))
        p = int(rng.choice([3, 5, 7]))
        rho, sigma = random_total_offsets(rng, t, p), random_total_offsets(rng, t, p)
        both = OffsetFn(p, {v: rho[v] + sigma[v] for v in t.nodes()})
        first, second = offset_bijection(rho, t.nodes()), offset_bijection(sigma, t.nodes())
        joined = offset_bijection(both, t.nodes())
        ok = all(second(first(e)) == joined(e) for e in joined.domain)
        rows.append(_row("offset_composition", i, ok, p, detail=f"h={t.n}, p={p}"))

    harness_spec = random_spec(rng, SENTENCE_SPEC["h"], SENTENCE_SPEC["p"])
    result = run_harness(harness_spec, k=3, q=1, matches=max(1, cases // 2), seed=int(rng.integers(2 ** 31)))
    for record in result.rows.to_dict("records"):
        case = f"{record['spoiler']}/{record['seed']}"
        held = record["outcome"] == Outcome.DUPLICATOR_WINS.name and not record["forfeit"]
        rows.append(_row("offset_duplicator_holds", case, held, record["moves"],
                         detail=f"{case}: {record['outcome']} ({record['reason']})"))
        rows.append(_row("match_time", case, record["seconds"] < MATCH_SECONDS, round(record["seconds"], 3),
                         detail=f"{case}: {record['seconds']:.2f}s"))
    return rows


_GENERATORS = {
    "core": core_signals,
    "chi": chi_signals,
    "quotient": quotient_signals,
    "psp": psp_signals,
    "treecomb": treecomb_signals,
    "game": game_signals,
    "strategy": strategy_signals,
}


def run_signals_extraction(suite: str, seed: int, cases: int | None = None, mutation: str | None = None) -> pd.DataFrame:
    """One row per checked case of the suite."""
    rng = np.random.default_rng(seed)
    count = SUITE_CASES[suite] if cases is None else cases
    logger.info("[Verify] suite %s: %d cases, seed %d%s", suite, count, seed,
                f", mutation {mutation}" if mutation else "")
    rows = _GENERATORS[suite](rng, count, mutation)
    return pd.DataFrame(rows, columns=["check_id", "case", "passed", "value", "detail"])
