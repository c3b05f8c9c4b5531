import logging
import traceback

import numpy as np

from engine.verify import logic, signals
from engine.verify.formatter import format_final_output

logger = logging.getLogger("lrec.verify")


def convert_numpy_types(obj):
    """numpy scalars and arrays inside `obj` become plain Python values, so the summary is JSON-ready."""
    match obj:
        case np.generic():
            return obj.item()
        case np.ndarray():
            return obj.tolist()
        case dict():
            return {k: convert_numpy_types(v) for k, v in obj.items()}
        case list() | tuple():
            return type(obj)(convert_numpy_types(item) for item in obj)
    return obj


def run_suite(name: str, seed: int, mutation: str | None = None, cases: int | None = None) -> dict:
    """
    Run one property suite through signals -> logic -> formatter.

    Args:
        name: one of signals.SUITES
        seed: seed of the suite's generator
        mutation: one of signals.MUTATIONS, or None for the clean build
        cases: override of the suite's default case count

    Returns:
        {"status", "suite", "tests", "summary"}, or {"status": "error", "message"}
        when the suite itself crashed
    """
    results = {"suite": name, "seed": seed, "mutation": mutation}

    try:
        # 1. Raw per-case rows
        frame = signals.run_signals_extraction(name, seed, cases, mutation)

        # 2. PASS/FAIL per check
        results["logic"] = convert_numpy_types(logic.run_logic_extraction(frame))

        # 3. Summary
        output = format_final_output(results)
        logger.info("[Verify] suite %s: %s (%d/%d checks)", name, output["status"],
                    output["summary"]["passed"], output["summary"]["total_checks"])
        return output

    except Exception as e:
        traceback.print_exc()
        return {"status": "error", "suite": name, "message": str(e)}
