import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion."""
    lines = []
    for key in ("passed", "failed"):
        for rep in terminalreporter.stats.get(key, []):
            if getattr(rep, "when", None) != "call":
                continue
            props = dict(rep.user_properties)
            if "criterion" in props:
                status = "PASS" if rep.passed else "FAIL"
                detail = props.get("detail", "")
                lines.append((props["criterion"][0],
                              f"{status} criterion {props['criterion'][0]}: {props['criterion'][1]}"
                              + (f" ({detail})" if detail else "")))
    if lines:
        terminalreporter.section("acceptance")
        for _, text in sorted(lines):
            terminalreporter.write_line(text)
