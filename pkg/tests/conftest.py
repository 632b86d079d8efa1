import os
import sys

from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    report = getattr(mod, "REPORT", None)
    if not report:
        return
    from stressfree.acceptance import format_rows

    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(report):
        rows = report[k]
        tr.write_line(f"criterion {k:>2}: {'PASS' if all(r.passed for r in rows) else 'FAIL'}")
    tr.write_line("")
    for k in sorted(report):
        tr.write(format_rows(report[k]))
