import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

ROOT = Path(__file__).resolve().parents[1]
GOLDEN = ROOT / "golden"

_criteria: dict[str, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(code, title): an acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    code, title = mark.args
    entry = _criteria.setdefault(code, {"title": title, "ok": True, "seen": False, "notes": []})
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        entry["seen"] = True
        if rep.failed:
            entry["ok"] = False
            entry["notes"].append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for code in sorted(_criteria, key=lambda c: int(c[2:])):
        e = _criteria[code]
        if not e["seen"]:
            continue
        status = "PASS" if e["ok"] else "FAIL"
        tail = f"  ({', '.join(e['notes'])})" if e["notes"] else ""
        terminalreporter.write_line(f"{status} {code}: {e['title']}{tail}")


@pytest.fixture
def golden():
    return GOLDEN
