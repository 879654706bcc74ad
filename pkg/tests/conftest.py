import pytest

from skewlat import gen_corpus, gen_xn


@pytest.fixture(scope="session")
def corpus():
    return gen_corpus(seed=0)


@pytest.fixture(scope="session")
def x2():
    return gen_xn(2)


def ix(alg, *names):
    return tuple(alg.index(n) for n in names)


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[number])
