"""
Verify Report Generator
=======================
Prints the summary from formatter.format_final_output().
"""


def print_verify_report(output: dict) -> None:
    """
    Args:
        output: {"status", "suite", "summary", "tests"} from format_final_output()
    """
    suite = output.get("suite", {})
    title = f"VERIFY: {str(suite.get('name', '?')).upper()}"
    print("\n" + "=" * 60)
    print(f"           {title}")
    print("=" * 60)

    print("\n[SUITE]")
    print("-" * 40)
    print(f"  Seed:        {suite.get('seed', 'N/A')}")
    print(f"  Mutation:    {suite.get('mutation') or 'none'}")

    # ============================================================
    # Checks
    # ============================================================
    status_symbols = {"PASS": "[OK]", "FAIL": "[X]", "ERROR": "[X]"}
    values = output.get("summary", {}).get("values", {})

    for test in output.get("tests", []):
        status = test.get("status", "unknown")
        symbol = status_symbols.get(status, "[?]")
        print(f"\n{symbol} {test.get('check_name', test.get('id'))}")
        print(f"   Check ID:   {test.get('id', 'N/A')}")
        print(f"   Cases:      {test.get('cases', 'N/A')} ({test.get('failures', 0)} failing)")

        metric = test.get("metric", "N/A")
        if isinstance(metric, float):
            print(f"   Pass rate:  {metric:.4f}")
        else:
            print(f"   Pass rate:  {metric}")

        reading = values.get(test.get("id"))
        if reading:
            print(f"   Values:     min {reading['min']}, max {reading['max']}, mean {reading['mean']}")
        print(f"   Verdict:    {test.get('title', 'N/A')}")

        first = test.get("first_counterexample")
        if first:
            print(f"   Case:       {first['case']}")
            print(f"   Detail:     {first['detail']}")

    # ============================================================
    # Summary
    # ============================================================
    summary = output.get("summary", {})
    print("\n" + "=" * 60)
    print("           SUMMARY")
    print("=" * 60)
    print(f"\n  Status:  {output.get('status', 'N/A')}")
    print(f"  Checks:  {summary.get('passed', 0)} PASS, {summary.get('failed', 0)} FAIL")
    print(f"  Cases:   {summary.get('cases', 0)} ({summary.get('failing_cases', 0)} failing)")
    print("\n" + "=" * 60 + "\n")


def get_report_string(output: dict) -> str:
    """The report as a string instead of printing."""
    import io
    from contextlib import redirect_stdout

    f = io.StringIO()
    with redirect_stdout(f):
        print_verify_report(output)
    return f.getvalue()
