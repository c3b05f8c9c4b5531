"""
Command-line surface of the workbench.

Exit codes: 0 success or true, 1 false or negative, 2 usage or input error,
3 evaluation budget exceeded.
"""
import functools
import json
import logging
import sys

import click
import numpy as np
import pandas as pd
from pydantic import ValidationError

from Backend.file_support_check import (
    dump_spec, dump_structure, load_semigraph, load_spec, load_structure, load_transcript, parse_bindings,
    read_formula_text,
)
from Backend.session_engine import GameSession
from Backend.states import Actor, GamePhase, Outcome, Pending
from engine.errors import BudgetExceededError, ConfigError, IllegalMoveError, TranscriptError, WorkbenchError
from engine.eval.budget import DEFAULT_MAX_NODES, DEFAULT_MAX_PAIRS, Budget
from engine.eval.evaluator import Evaluator
from engine.eval.semigraphs import chi_hat, quotient
from engine.game.match import MoveRecorder, make_header, replay, run_match
from engine.game.moves import (
    Bijection, ExtensionRequest, Forfeit, GameConfig, GraphExit, GraphStep, Pick, move_from_json,
)
from engine.game.transcript import Transcript, write_transcript
from engine.logic.formulas import Vocabulary
from engine.logic.measures import iteration_degree, rank
from engine.logic.parser import parse_formula
from engine.main_engine import start_engine
from engine.psp.instances import PspInstance, TreeGroupSpec, generate_instance, psp_vocabulary, shifted
from engine.psp.solvers import solve_direct, solve_via_lfp
from engine.strategy.harness import run_harness
from engine.strategy.registry import DUPLICATORS, SPOILERS, make_duplicator, make_spoiler
from engine.verify.report import print_verify_report
from engine.verify.signals import MUTATIONS, SUITES

logger = logging.getLogger("lrec.cli")

# ============================================================
# Configuration
# ============================================================

DEFAULT_SEED = 20240917

EXIT_TRUE = 0
EXIT_FALSE = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


def _workbench_errors(command):
    """Map engine failures onto the exit codes."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except BudgetExceededError as exc:
            click.echo(f"budget exceeded: {exc}", err=True)
            sys.exit(EXIT_BUDGET)
        except WorkbenchError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_USAGE)

    return wrapper


def _budget_options(command):
    command = click.option("--max-pairs", type=int, default=DEFAULT_MAX_PAIRS, show_default=True,
                           help="Largest semi-graph edge or ∼ pair count.")(command)
    return click.option("--max-nodes", type=int, default=DEFAULT_MAX_NODES, show_default=True,
                        help="Largest semi-graph node count.")(command)


def _seed_option(command):
    return click.option("--seed", type=int, default=None, help=f"Generator seed (default {DEFAULT_SEED}).")(command)


def _resolve_seed(seed: int | None) -> int:
    seed = DEFAULT_SEED if seed is None else seed
    click.echo(f"seed: {seed}", err=True)
    return seed


def _verdict(value: bool):
    click.echo("true" if value else "false")
    sys.exit(EXIT_TRUE if value else EXIT_FALSE)


def _game_pair(a_path, b_path, spec_path, delta: int):
    """(A, B, spec) from two structure files or from one tree spec and its shift."""
    if spec_path:
        spec = load_spec(spec_path)
        return generate_instance(spec).structure, generate_instance(shifted(spec, delta)).structure, spec
    if not (a_path and b_path):
        raise ConfigError("give either --spec or both --a and --b")
    return load_structure(a_path), load_structure(b_path), None


# ============================================================
# Group
# ============================================================

@click.group()
@click.option("--verbose", is_flag=True, help="Log engine decisions at DEBUG level.")
def cli(verbose: bool):
    """LREC= workbench: evaluation, path systems, games and property suites."""
    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter("[%(name)s] %(message)s"))
    root = logging.getLogger("lrec")
    root.handlers[:] = [handler]
    root.setLevel(logging.DEBUG if verbose else logging.WARNING)


# ============================================================
# Logic and evaluation
# ============================================================

@cli.command("eval")
@click.argument("structure", type=click.Path(exists=True, dir_okay=False))
@click.argument("formula")
@click.option("--bind", "bindings", multiple=True, help="Free variable binding, x=a or %n=3.")
@_budget_options
@_workbench_errors
def eval_command(structure, formula, bindings, max_nodes, max_pairs):
    """Evaluate FORMULA (text or @file) on STRUCTURE."""
    s = load_structure(structure)
    phi = parse_formula(read_formula_text(formula), Vocabulary.from_structure(s))
    env = parse_bindings(bindings)
    evaluator = Evaluator(s, Budget(max_nodes, max_pairs))
    evaluator.check_env(phi, env)
    _verdict(evaluator.holds(phi, env))


@cli.command("rank")
@click.argument("formula")
@click.option("--structure", type=click.Path(exists=True, dir_okay=False),
              help="Structure whose vocabulary the formula uses (default: path systems).")
@_workbench_errors
def rank_command(formula, structure):
    """Print the rank and iteration degree of FORMULA."""
    vocab = Vocabulary.from_structure(load_structure(structure)) if structure else psp_vocabulary()
    phi = parse_formula(read_formula_text(formula), vocab)
    click.echo(f"rank: {rank(phi)}")
    click.echo(f"degree: {iteration_degree(phi)}")


@cli.command("quotient")
@click.argument("semigraph", type=click.Path(exists=True, dir_okay=False))
@_workbench_errors
def quotient_command(semigraph):
    """Print the ∼-quotient of a semi-graph document (relations E, SIM, C)."""
    g = load_semigraph(semigraph)
    q = quotient(g)
    frame = pd.DataFrame([
        {
            "class": cid,
            "members": " ".join(map(str, members)),
            "labels": " ".join(map(str, sorted(q.labels.get(cid, ())))) or "-",
            "successors": " ".join(map(str, q.successors(cid))) or "-",
            "in_degree": q.in_degree(cid),
        }
        for cid, members in enumerate(q.classes)
    ])
    click.echo(frame.to_string(index=False) if not frame.empty else "(empty semi-graph)")


@cli.command("chi")
@click.argument("semigraph", type=click.Path(exists=True, dir_okay=False))
@click.argument("vertex")
@click.argument("level", type=int)
@_workbench_errors
def chi_command(semigraph, vertex, level):
    """Decide (VERTEX, LEVEL) ∈ χ̂ of a semi-graph document."""
    g = load_semigraph(semigraph)
    if vertex not in g.vertices:
        raise ConfigError(f"unknown vertex {vertex!r}")
    _verdict(chi_hat(g, vertex, level))


# ============================================================
# Path systems
# ============================================================

@cli.command("psp-gen")
@click.option("--spec", "spec_path", type=click.Path(exists=True, dir_okay=False), help="Tree spec JSON.")
@click.option("--h", type=int, help="Tree height (random leaves when no spec is given).")
@click.option("--p", type=int, help="Prime modulus.")
@click.option("--negative", is_flag=True, help="Pick t so that the instance is negative.")
@click.option("--out", type=click.Path(dir_okay=False), required=True, help="Structure JSON to write.")
@click.option("--spec-out", type=click.Path(dir_okay=False), help="Also write the tree spec.")
@_seed_option
@_workbench_errors
def psp_gen_command(spec_path, h, p, negative, out, spec_out, seed):
    """Generate P(h, p, σ, t) from a spec, or with seeded random leaves."""
    if spec_path:
        spec = load_spec(spec_path)
    else:
        if h is None or p is None:
            raise ConfigError("give --spec, or --h and --p")
        if h < 1 or p < 2:
            raise ConfigError(f"need h >= 1 and a prime p, got h={h}, p={p}")
        rng = np.random.default_rng(_resolve_seed(seed))
        sigma = [int(x) for x in rng.integers(p, size=2 ** h)]
        try:
            spec = TreeGroupSpec(h=h, p=p, sigma=sigma, t=sum(sigma) % p)
        except ValidationError as exc:
            raise ConfigError(f"invalid tree spec: {exc.errors()[0]['msg']}") from exc
        if negative:
            spec = shifted(spec, int(rng.integers(1, p)))
    inst = generate_instance(spec)
    dump_structure(inst.structure, out)
    if spec_out:
        dump_spec(spec, spec_out)
    click.echo(f"wrote {inst.structure.size} elements to {out} (t = {spec.t}, sum = {sum(spec.sigma) % spec.p})")


@cli.command("psp-solve")
@click.argument("structure", type=click.Path(exists=True, dir_okay=False))
@click.option("--method", type=click.Choice(["direct", "lfp", "both"]), default="direct", show_default=True)
@_budget_options
@_workbench_errors
def psp_solve_command(structure, method, max_nodes, max_pairs):
    """Decide whether t lies in the upward closure of S."""
    inst = PspInstance(load_structure(structure))
    budget = Budget(max_nodes, max_pairs)
    match method:
        case "direct":
            _verdict(solve_direct(inst))
        case "lfp":
            _verdict(solve_via_lfp(inst, budget))
        case "both":
            direct, via_lfp = solve_direct(inst), solve_via_lfp(inst, budget)
            if direct != via_lfp:
                raise WorkbenchError(f"solvers disagree: direct={direct}, lfp={via_lfp}")
            _verdict(direct)


# ============================================================
# Games
# ============================================================

def _game_options(command):
    for option in reversed([
        click.option("--a", "a_path", type=click.Path(exists=True, dir_okay=False), help="Structure A."),
        click.option("--b", "b_path", type=click.Path(exists=True, dir_okay=False), help="Structure B."),
        click.option("--spec", "spec_path", type=click.Path(exists=True, dir_okay=False),
                     help="Tree spec; plays P(h,p,σ,t) against P(h,p,σ,t+delta)."),
        click.option("--delta", type=int, default=1, show_default=True),
        click.option("--k", type=int, required=True, help="Pebble bound."),
        click.option("--q", type=int, default=1, show_default=True, help="Iteration degree bound."),
        click.option("--duplicator", type=click.Choice(DUPLICATORS), default="identity", show_default=True),
    ]):
        command = option(command)
    return command


def split_spoiler(spoiler: str, formula: str | None) -> tuple[str, str | None]:
    """
    "formula:<path>" names the formula Spoiler and the file holding its formula.

    Raises:
        ConfigError: unknown Spoiler, or a formula given twice
    """
    name, sep, path = spoiler.partition(":")
    if name not in SPOILERS or (sep and name != "formula"):
        raise ConfigError(f"unknown spoiler {spoiler!r}; choose from {', '.join(SPOILERS)} or formula:<path>")
    if sep:
        if not path:
            raise ConfigError("formula:<path> needs a path")
        if formula is not None:
            raise ConfigError("give the formula either as formula:<path> or with --formula, not both")
        formula = f"@{path}"
    return name, formula


@cli.command("game-run")
@_game_options
@click.option("--spoiler", default="random", show_default=True,
              help=f"One of {', '.join(SPOILERS)}, or formula:<path> to read the formula from a file.")
@click.option("--formula", help="Formula (text or @file) for the formula Spoiler.")
@click.option("--matches", type=int, default=1, show_default=True,
              help="With --spec and the paper Duplicator, run a seeded batch and print its summary.")
@click.option("--out", type=click.Path(dir_okay=False), help="Transcript JSONL to write.")
@_seed_option
@_budget_options
@_workbench_errors
def game_run_command(a_path, b_path, spec_path, delta, k, q, duplicator, spoiler, formula, matches, out, seed,
                     max_nodes, max_pairs):
    """Play seeded matches between two built-in agents."""
    seed = _resolve_seed(seed)
    budget = Budget(max_nodes, max_pairs)
    a, b, spec = _game_pair(a_path, b_path, spec_path, delta)
    spoiler, formula = split_spoiler(spoiler, formula)

    if matches > 1:
        if spec is None or duplicator not in ("paper", "offset"):
            raise ConfigError("batches need --spec and --duplicator paper")
        result = run_harness(spec, k, q, spoilers=(spoiler,), matches=matches, seed=seed, delta=delta, budget=budget)
        click.echo(result.summary.to_string())
        return

    phi = parse_formula(read_formula_text(formula), Vocabulary.from_structure(a)) if formula else None
    config = GameConfig(a, b, k, q, budget)
    result = run_match(config, make_spoiler(spoiler, phi), make_duplicator(duplicator, spec), seed)
    if out:
        write_transcript(result.transcript, out)
    click.echo(f"{result.outcome.name} after {len(result.transcript)} moves: {result.reason}")


@cli.command("game-replay")
@click.argument("transcript", type=click.Path(exists=True, dir_okay=False))
@_workbench_errors
def game_replay_command(transcript):
    """Re-apply a transcript and check every state hash."""
    session = replay(load_transcript(transcript))
    click.echo(f"{session.outcome.name}: {session.reason}" if session.is_finished else "UNDECIDED")


@cli.command("game-interactive")
@_game_options
@click.option("--out", type=click.Path(dir_okay=False), help="Transcript JSONL to write at the end.")
@_seed_option
@_budget_options
@_workbench_errors
def game_interactive_command(a_path, b_path, spec_path, delta, k, q, duplicator, out, seed, max_nodes, max_pairs):
    """Play Spoiler yourself against a built-in Duplicator."""
    seed = _resolve_seed(seed)
    a, b, spec = _game_pair(a_path, b_path, spec_path, delta)
    config = GameConfig(a, b, k, q, Budget(max_nodes, max_pairs))
    agent = make_duplicator(duplicator, spec)
    agent.begin(config, np.random.default_rng(seed).spawn(2)[1])

    session = GameSession.start(config)
    transcript = Transcript(make_header(config, seed, {"spoiler": "human", "duplicator": agent.name}))
    interactive_loop(session, agent, MoveRecorder(session, transcript))
    if out:
        write_transcript(transcript, out)


def legal_moves(session: GameSession) -> list[str]:
    """The move forms Spoiler may enter in the current state."""
    config = session.config
    if session.pending is Pending.BIJECTION_OFFERED:
        free = [x for x in config.universe if x not in session.f]
        return [f"pick <element>   one of: {' '.join(free)}", "forfeit"]
    if session.phase is GamePhase.GRAPH_ROUND:
        successors = [",".join(map(str, v)) for v in session.graph.successors()]
        return [f"step <v1,...>    one of: {' '.join(successors) or '(none)'}", "exit", "forfeit"]
    moves = ["extend"]
    if config.k - len(session.f) >= 2:
        moves.append('graph {"c": 1, "xs": ["x"], "ys": ["y"], "edge": "...", "sim": "false", '
                     '"start": [...], "level": 1, "params": []}')
    return moves + ["forfeit"]


def _value(text: str):
    text = text.strip()
    return int(text) if text.isdigit() else text


def parse_spoiler_input(line: str, vocab: Vocabulary):
    """
    Raises:
        TranscriptError: unknown command or malformed graph move
    """
    command, _, rest = line.strip().partition(" ")
    match command:
        case "extend":
            return ExtensionRequest()
        case "pick":
            return Pick(rest.strip())
        case "step":
            return GraphStep(tuple(_value(v) for v in rest.split(",")))
        case "exit":
            return GraphExit()
        case "forfeit":
            return Forfeit("spoiler gives up")
        case "graph":
            try:
                data = json.loads(rest)
            except json.JSONDecodeError as exc:
                raise TranscriptError(f"graph move is not JSON: {exc}") from exc
            return move_from_json({"type": "graph-open", "params": [], **data}, vocab)
    raise TranscriptError(f"unknown command {command!r}")


def interactive_loop(session: GameSession, duplicator, recorder: MoveRecorder,
                     prompt=click.prompt, echo=click.echo) -> Outcome:
    vocab = Vocabulary.from_structure(session.config.a)
    while not session.is_finished:
        if session.pending is Pending.EXTENSION_REQUESTED:
            recorder.turn(Actor.DUPLICATOR, lambda: Bijection(duplicator.extension_response(session)))
            continue
        if session.pending is Pending.ROUND_OPEN:
            recorder.turn(Actor.DUPLICATOR, lambda: duplicator.graph_response(session))
            continue

        echo(f"\nf = {session.f.to_json()}")
        if session.graph is not None:
            echo(f"graph move: node {session.graph.node}, ℓ = {session.graph.level}")
        if session.offer is not None and session.pending is Pending.BIJECTION_OFFERED:
            echo(f"Duplicator offers g = {session.offer.to_json()}")
        echo("legal moves:\n  " + "\n  ".join(legal_moves(session)))
        try:
            recorder.play(Actor.SPOILER, parse_spoiler_input(prompt("spoiler"), vocab))
        except IllegalMoveError as exc:
            echo(f"illegal move: {exc.reason}")
        except WorkbenchError as exc:
            echo(f"cannot read move: {exc}")

    winner = "Spoiler" if session.outcome is Outcome.SPOILER_WINS else "Duplicator"
    echo("\n" + "=" * 60)
    echo(f"  {winner} wins: {session.reason}")
    echo("=" * 60)
    return session.outcome


# ============================================================
# Property suites
# ============================================================

@cli.command("verify")
@click.argument("suite", type=click.Choice(SUITES + ("all",)))
@click.option("--cases", type=int, help="Override the suite's case count.")
@click.option("--mutation", type=click.Choice(MUTATIONS), help="Run against a deliberately broken build.")
@click.option("--json", "as_json", is_flag=True, help="Print the machine-readable summary.")
@_seed_option
def verify_command(suite, cases, mutation, as_json, seed):
    """Run a property suite; exit 0 when every check passes."""
    seed = _resolve_seed(seed)
    result = start_engine(suite, seed, cases, mutation)
    outputs = result["suites"].values() if suite == "all" else [result]
    if as_json:
        click.echo(json.dumps(result, indent=2, default=str))
    else:
        for output in outputs:
            if output["status"] == "error":
                click.echo(f"suite {output.get('suite')} crashed: {output['message']}", err=True)
            else:
                print_verify_report(output)
    match result["status"]:
        case "PASS":
            sys.exit(EXIT_TRUE)
        case "FAIL":
            sys.exit(EXIT_FALSE)
    sys.exit(EXIT_USAGE)
