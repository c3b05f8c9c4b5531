from engine.verify.pipeline import run_suite
from engine.verify.signals import SUITES


def start_engine(suite: str, seed: int, cases: int | None = None, mutation: str | None = None) -> dict:
    """
    Run one verify suite, or every suite for "all".

    Returns:
        the suite's summary, or {"status", "suites": {name: summary}} for "all"
    """
    if suite != "all":
        return run_suite(suite, seed, mutation, cases)

    results = {name: run_suite(name, seed, mutation, cases) for name in SUITES}
    statuses = {r["status"] for r in results.values()}
    status = "PASS" if statuses == {"PASS"} else ("error" if "error" in statuses else "FAIL")
    return {"status": status, "suites": results}
