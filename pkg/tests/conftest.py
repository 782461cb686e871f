import pytest

from subshift.generators import (
    FIBONACCI, THUE_MORSE, block_doubling_word, periodic_word, sturmian_word,
    substitution_fixed_point,
)
from subshift.index import FactorIndex
from subshift.words import Alphabet

AB = Alphabet.of("ab")
ABC = Alphabet.of("abc")
BIN = Alphabet.of("01")


def fib_string(n):
    """Fibonacci word by string rewriting; independent of the generator module."""
    s = "a"
    while len(s) < n:
        s = "".join("ab" if c == "a" else "a" for c in s)
    return s[:n]


def tm_string(n):
    return "".join(str(bin(i).count("1") % 2) for i in range(n))


@pytest.fixture(scope="session")
def fib_1m():
    return substitution_fixed_point(FIBONACCI, 10**6)


@pytest.fixture(scope="session")
def fib_1m_index(fib_1m):
    return FactorIndex(fib_1m)


@pytest.fixture(scope="session")
def tm_1m():
    return substitution_fixed_point(THUE_MORSE, 10**6)


@pytest.fixture(scope="session")
def tm_1m_index(tm_1m):
    return FactorIndex(tm_1m)


@pytest.fixture(scope="session")
def fib_1e4_index():
    return FactorIndex(substitution_fixed_point(FIBONACCI, 10**4))


@pytest.fixture(scope="session")
def block_doubling_index():
    return FactorIndex(block_doubling_word(1 << 20))


@pytest.fixture(scope="session")
def small_samples():
    """Four generated samples of length 3000 for randomized identity checks."""
    return {
        "fibonacci": substitution_fixed_point(FIBONACCI, 3000),
        "thue-morse": substitution_fixed_point(THUE_MORSE, 3000),
        "sturmian": sturmian_word("0.4142135623730950488016887242096980785696", "0.3", 3000),
        "periodic": periodic_word(ABC.word("abcab"), 3000),
    }


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
