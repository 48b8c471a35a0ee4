import re

import pytest

CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)")


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("VBCENSUS_CACHE_DIR", str(tmp_path / "cache"))


def pytest_terminal_summary(terminalreporter):
    seen = {}
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            m = CRITERION.search(getattr(rep, "nodeid", ""))
            if not m or rep.when not in ("call", "setup"):
                continue
            key = int(m.group(1))
            ok = outcome == "passed"
            prev = seen.get(key)
            seen[key] = (m.group(2), ok if prev is None else prev[1] and ok)
    if not seen:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(seen):
        name, ok = seen[key]
        terminalreporter.write_line(f"criterion {key:>2} {name}: {'PASS' if ok else 'FAIL'}")
