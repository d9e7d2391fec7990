import pytest

from rpnet import example_path, load
from rpnet.corpus import corpus


@pytest.fixture(scope="session")
def fig1b():
    return load(example_path())


@pytest.fixture(scope="session")
def nets():
    return corpus(1000, seed=7)


def pytest_terminal_summary(terminalreporter):
    from acceptance_report import lines

    out = lines()
    if out:
        terminalreporter.section("acceptance criteria")
        for line in out:
            terminalreporter.write_line(line)
