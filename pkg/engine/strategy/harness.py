"""
Seeded batches of matches on the pair P(h, p, σ, t) / P(h, p, σ, t + δ),
with the offset Duplicator against the built-in Spoilers.
"""
import logging
import time
from dataclasses import dataclass

import pandas as pd

from Backend.states import Outcome
from engine.eval.budget import Budget
from engine.game.match import run_match
from engine.game.moves import GameConfig
from engine.psp.instances import TreeGroupSpec, generate_instance, shifted
from engine.strategy.offsets import guarantee_size
from engine.strategy.registry import make_duplicator, make_spoiler

logger = logging.getLogger("lrec.strategy")


@dataclass
class HarnessResult:
    rows: pd.DataFrame
    summary: pd.DataFrame

    @property
    def duplicator_losses(self) -> int:
        return int((self.rows["outcome"] != Outcome.DUPLICATOR_WINS.name).sum())


def run_harness(spec: TreeGroupSpec, k: int, q: int, spoilers=("random", "greedy"), matches: int = 10,
                seed: int = 0, delta: int = 1, budget: Budget | None = None) -> HarnessResult:
    """One row per match; the summary aggregates outcomes per Spoiler."""
    bound = guarantee_size(k, q)
    if spec.h < bound or spec.p < bound:
        logger.warning("[Harness] h=%d, p=%d are below the proven size %d for k=%d, q=%d",
                       spec.h, spec.p, bound, k, q)

    a = generate_instance(spec).structure
    b = generate_instance(shifted(spec, delta)).structure
    config = GameConfig(a, b, k, q, budget or Budget())

    rows = []
    for name in spoilers:
        for i in range(matches):
            duplicator = make_duplicator("paper", spec)
            started = time.perf_counter()
            result = run_match(config, make_spoiler(name), duplicator, seed + i)
            rows.append({
                "spoiler": name,
                "seed": seed + i,
                "outcome": result.outcome.name,
                "reason": result.reason,
                "forfeit": result.reason.startswith("duplicator forfeits"),
                "moves": len(result.transcript),
                "seconds": time.perf_counter() - started,
                "fallbacks": duplicator.state.fallbacks,
                "min_null_height": duplicator.min_null_height,
            })
            logger.debug("[Harness] %s seed %d: %s", name, seed + i, result.outcome.name)

    frame = pd.DataFrame(rows)
    summary = frame.groupby("spoiler").agg(
        matches=("seed", "count"),
        duplicator_wins=("outcome", lambda s: int((s == Outcome.DUPLICATOR_WINS.name).sum())),
        spoiler_wins=("outcome", lambda s: int((s == Outcome.SPOILER_WINS.name).sum())),
        duplicator_forfeits=("forfeit", "sum"),
        max_seconds=("seconds", "max"),
    )
    return HarnessResult(frame, summary)
