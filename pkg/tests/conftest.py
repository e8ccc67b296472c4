import pytest

_LINES = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Run one acceptance check and record a PASS/FAIL line for the summary."""
    lines = request.config.stash.setdefault(_LINES, [])

    def run(name, check):
        try:
            ok, detail = check()
        except Exception as exc:
            lines.append(f"{name}: FAIL ({type(exc).__name__}: {exc})")
            print(lines[-1])
            raise
        lines.append(f"{name}: {'PASS' if ok else 'FAIL'} ({detail})")
        print(lines[-1])
        assert ok, detail

    return run


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
