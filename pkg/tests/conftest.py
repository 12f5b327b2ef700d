import pytest

_LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LINES] = []


@pytest.fixture
def report(request):
    """Record one acceptance line; the lines are printed in the terminal summary."""
    lines = request.config.stash[_LINES]

    def _report(number, name, ok, detail):
        lines.append(f"criterion {number} {'PASS' if ok else 'FAIL'} {name}: {detail}")
        return ok

    return _report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
