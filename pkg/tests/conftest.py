import pytest

from matula_asym.primes import build_prime_table, default_table

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def small_table():
    """Eager 10^7 sieve: enough for p_{2^19} and every small example."""
    return build_prime_table(10**7)


@pytest.fixture(scope="session")
def table():
    """The default lazily grown 2^30 table shared with the library."""
    return default_table()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
