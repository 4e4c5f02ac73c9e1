from fractions import Fraction

import pytest

from simpcert.qadic import QRational

ACCEPTANCE_LINES: list[str] = []


def frac(x: QRational) -> Fraction:
    return Fraction(x.m, x.q**x.k)


def Q(text: str, q: int) -> QRational:
    """Shorthand: Q("3/4", 2) is 3/4 in Z[1/2]; the denominator must be a power of q."""
    f = Fraction(text)
    k = 0
    while f.denominator != 1:
        f *= q
        k += 1
        assert k < 200, f"{text} is not in Z[1/{q}]"
    return QRational(int(f), k, q)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES
