import pytest

from support import gallery_session


@pytest.fixture
def A2():
    return gallery_session("A2")


@pytest.fixture
def node():
    return gallery_session("node")


@pytest.fixture
def embedded():
    return gallery_session("embedded")


@pytest.fixture(scope="session")
def glued():
    return gallery_session("glued")


def pytest_terminal_summary(terminalreporter):
    from support import ACCEPTANCE_LINES

    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
