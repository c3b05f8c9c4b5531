import pandas as pd

from Backend.states import CheckStatus

# Verdict text per check, keyed by status
VERDICTS = {
    "partial_iso_symmetry": "Partial isomorphisms are symmetric under inversion.",
    "identity_partial_iso": "Identity maps are partial isomorphisms.",
    "compose_restrictions": "Unions of restrictions rebuild the restricted injection.",
    "number_encoding_bijective": "Number tuple codes form a bijection onto 0..(n+1)^len - 1.",
    "chi_matches_recursion": "χ agrees with the defining recursion.",
    "chi_total_time": "χ over the random graph batch finished in time.",
    "quotient_matches_union_find": "Quotient classes, edges and labels match union-find.",
    "chi_hat_on_quotient": "χ̂ equals χ on the quotient graph.",
    "three_way_agreement": "Direct closure, LFP sentence and the sum rule agree.",
    "closure_one_residue_per_node": "The upward closure holds exactly one residue per node.",
    "generation_canonical": "Instance generation is canonical.",
    "closure_min_height": "Closure keeps the minimum height.",
    "frontier_exceeds_height": "Every closed component has |F| > height(X).",
    "consistency_oracle": "The consistency criterion matches exhaustive search.",
    "forced_extension_consistent": "Forced extensions stay consistent.",
    "lift_conditions": "Lift sequences satisfy both lift conditions.",
    "replay_determinism": "Seeded matches are reproducible and replay cleanly.",
    "graph_levels_decrease": "The graph-move counter strictly decreases.",
    "identity_on_identical": "Identity Duplicator never loses on identical structures.",
    "oracle_fixtures": "The exhaustive bijection-game oracle matches every fixture.",
    "fixture_distinguishes": "Every fixture formula separates its pair within the bounds.",
    "formula_spoiler_wins": "The formula Spoiler wins every fixture.",
    "sentence_agreement": "Low-rank sentences agree on the shifted instance pair.",
    "offset_composition": "Offset bijections compose additively.",
    "offset_duplicator_holds": "The offset Duplicator survives every match.",
    "match_time": "Every harness match finished in time.",
}


#^ key facts
def extract_suite_facts(frame: pd.DataFrame) -> dict:
    return {
        "checks": int(frame["check_id"].nunique()),
        "cases": int(len(frame)),
        "failures": int((~frame["passed"]).sum()),
    }


#^ value readings per check, where the check records one
def extract_value_ranges(frame: pd.DataFrame) -> dict:
    values = frame.dropna(subset=["value"])
    if values.empty:
        return {}
    values = values.assign(value=pd.to_numeric(values["value"], errors="coerce")).dropna(subset=["value"])
    ranges = values.groupby("check_id")["value"].agg(["min", "max", "mean"])
    return {
        check_id: {"min": row["min"], "max": row["max"], "mean": round(float(row["mean"]), 3)}
        for check_id, row in ranges.iterrows()
    }


#^ pass/fail per check
def analyze_checks(frame: pd.DataFrame) -> dict:
    summary = frame.groupby("check_id", sort=False).agg(
        cases=("passed", "size"),
        passes=("passed", "sum"),
    )
    tests = {}
    for check_id, row in summary.iterrows():
        failed = frame[(frame["check_id"] == check_id) & ~frame["passed"]]
        status = CheckStatus.PASS if failed.empty else CheckStatus.FAIL
        first = None
        if not failed.empty:
            record = failed.iloc[0]
            first = {"case": record["case"], "detail": record["detail"]}
        tests[check_id] = {
            "check_id": check_id,
            "metric": round(float(row["passes"]) / float(row["cases"]), 4),
            "status": status.name,
            "cases": int(row["cases"]),
            "failures": int(len(failed)),
            "first_counterexample": first,
            "verdict": VERDICTS.get(check_id, check_id) if failed.empty else f"FAILED: {VERDICTS.get(check_id, check_id)}",
        }
    return tests


#~ combined function
def run_logic_extraction(frame: pd.DataFrame) -> dict:
    """
    Returns:
        {"facts": {...}, "tests": {check_id: {check_id, metric, status, cases,
        failures, first_counterexample, verdict}}}
    """
    result = {"facts": {}, "tests": {}}
    if frame.empty:
        return result
    result["facts"]["counts"] = extract_suite_facts(frame)
    result["facts"]["values"] = extract_value_ranges(frame)
    result["tests"] = analyze_checks(frame)
    return result
