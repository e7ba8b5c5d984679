import pytest

from parhodge import FieldCtx


@pytest.fixture
def f3u():
    # u^2 = u + 1
    return FieldCtx(3, 2, (2, 2, 1))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(results):
        parts = results[k]
        failed = [line for ok, line in parts if not ok]
        terminalreporter.write_line(failed[0] if failed else parts[-1][1])
