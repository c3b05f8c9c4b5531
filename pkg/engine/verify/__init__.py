from engine.verify.signals import MUTATIONS, SUITE_CASES, SUITES, run_signals_extraction
from engine.verify.pipeline import run_suite
from engine.verify.report import get_report_string, print_verify_report
