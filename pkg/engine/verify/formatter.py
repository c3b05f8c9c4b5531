"""
Verify Output Formatter
=======================
Turns the raw pipeline output into the machine-readable suite summary.

Final output structure:
    - status: PASS when every check passed, FAIL otherwise
    - suite: the suite name, seed and mutation
    - summary: check and case counts
    - tests: failed checks first, each with its first counterexample
"""

# Human-readable titles for each check_id
CHECK_TITLES = {
    "partial_iso_symmetry": "Partial Isomorphism Symmetry",
    "identity_partial_iso": "Identity Maps",
    "compose_restrictions": "Union of Restrictions",
    "number_encoding_bijective": "Number Tuple Encoding",
    "chi_matches_recursion": "χ Recursion",
    "chi_total_time": "χ Batch Time",
    "quotient_matches_union_find": "∼-Quotient",
    "chi_hat_on_quotient": "χ̂ on the Quotient",
    "three_way_agreement": "PSP Solver Agreement",
    "closure_one_residue_per_node": "One Residue per Node",
    "generation_canonical": "Canonical Generation",
    "closure_min_height": "Closure Height",
    "frontier_exceeds_height": "|F| > height(X)",
    "consistency_oracle": "Offset Consistency",
    "forced_extension_consistent": "Forced Extension",
    "lift_conditions": "Lift Conditions",
    "replay_determinism": "Replay Determinism",
    "graph_levels_decrease": "Decreasing ℓ",
    "identity_on_identical": "Identity Duplicator",
    "oracle_fixtures": "Bijection-Game Oracle",
    "fixture_distinguishes": "Distinguishing Fixtures",
    "formula_spoiler_wins": "Formula Spoiler",
    "sentence_agreement": "Low-Rank Sentences",
    "offset_composition": "Offset Composition",
    "offset_duplicator_holds": "Offset Duplicator",
    "match_time": "Match Time",
}


def _format_test(check_id: str, test_data: dict) -> dict:
    entry = {
        "id": check_id,
        "title": test_data.get("verdict"),
        "check_name": CHECK_TITLES.get(check_id, check_id),
        "metric": test_data.get("metric"),
        "status": test_data.get("status"),
        "cases": test_data.get("cases"),
        "failures": test_data.get("failures"),
    }
    if test_data.get("first_counterexample"):
        entry["first_counterexample"] = test_data["first_counterexample"]
    return entry


def format_final_output(raw_pipeline: dict) -> dict:
    """
    Args:
        raw_pipeline: run_suite() results with keys suite, seed, mutation, logic

    Returns:
        {"status", "suite", "summary", "tests"}
    """
    logic = raw_pipeline.get("logic", {})
    tests = logic.get("tests", {})
    counts = logic.get("facts", {}).get("counts", {})

    failed = [_format_test(c, t) for c, t in tests.items() if t.get("status") != "PASS"]
    passed = [_format_test(c, t) for c, t in tests.items() if t.get("status") == "PASS"]

    return {
        "status": "FAIL" if failed or not tests else "PASS",
        "suite": {
            "name": raw_pipeline.get("suite"),
            "seed": raw_pipeline.get("seed"),
            "mutation": raw_pipeline.get("mutation"),
        },
        "summary": {
            "total_checks": len(tests),
            "passed": len(passed),
            "failed": len(failed),
            "cases": counts.get("cases", 0),
            "failing_cases": counts.get("failures", 0),
            "values": logic.get("facts", {}).get("values", {}),
        },
        "tests": failed + passed,
    }
