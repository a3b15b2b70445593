import pytest

_LINES = pytest.StashKey[list]()
_DONE = pytest.StashKey[set]()


def pytest_configure(config):
    config.stash[_LINES] = []
    config.stash[_DONE] = set()


@pytest.fixture
def criterion(request):
    """Record one acceptance line, then assert it."""

    def record(num: int, ok: bool, detail: str) -> None:
        line = f"criterion {num:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        request.config.stash[_LINES].append(line)
        request.config.stash[_DONE].add(request.node.nodeid)
        assert ok, line

    return record


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call" and rep.failed and "criterion" in getattr(item, "fixturenames", ()):
        if item.nodeid not in item.config.stash[_DONE]:
            item.config.stash[_LINES].append(f"criterion {item.name}: FAIL  raised before reporting")


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash[_LINES]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
