"""Exact checks of integral solution lists, plus a brute-force box search."""

from __future__ import annotations

import math
from typing import Callable, Iterable

HYPER = "Y^2 - Y = X^5 - X"
BINOMIAL = "binom(Y,2) = binom(X,5)"

LISTED = {
    HYPER: [(-1, 0), (-1, 1), (0, 0), (0, 1), (1, 0), (1, 1), (2, -5), (2, 6), (3, -15), (3, 16),
            (30, -4929), (30, 4930)],
    BINOMIAL: [(0, 0), (0, 1), (1, 0), (1, 1), (2, 0), (2, 1), (3, 0), (3, 1), (4, 0), (4, 1), (5, -1),
               (5, 2), (6, -3), (6, 4), (7, -6), (7, 7), (15, -77), (15, 78), (19, -152), (19, 153)],
}


def _binom_poly(n: int, k: int) -> int:
    """n(n-1)...(n-k+1)/k! for any integer n."""
    num = 1
    for i in range(k):
        num *= n - i
    return num // math.factorial(k)


EQUATIONS: dict[str, Callable[[int, int], bool]] = {
    HYPER: lambda X, Y: Y * Y - Y == X**5 - X,
    BINOMIAL: lambda X, Y: _binom_poly(Y, 2) == _binom_poly(X, 5),
}

# A Y^2 + B Y = F(X) forms
FORMS = {
    HYPER: (1, -1, [0, -1, 0, 0, 0, 1]),
    BINOMIAL: (60, -60, [0, 24, -50, 35, -10, 1]),
}


def check_solutions(equation: str, pairs: Iterable[tuple[int, int]]) -> list[tuple[int, int]]:
    """The pairs that do not satisfy the equation (empty means all verified)."""
    test = EQUATIONS[equation]
    return [(X, Y) for X, Y in pairs if not test(int(X), int(Y))]


def search_box(equation: str, x_max: int) -> list[tuple[int, int]]:
    """All integral solutions with |X| <= x_max, by exact square-root tests."""
    A, B, F = FORMS[equation]
    out = []
    for X in range(-x_max, x_max + 1):
        rhs = sum(c * X**i for i, c in enumerate(F))
        # A Y^2 + B Y - rhs = 0  =>  (2AY + B)^2 = B^2 + 4 A rhs
        disc = B * B + 4 * A * rhs
        if disc < 0:
            continue
        s = math.isqrt(disc)
        if s * s != disc:
            continue
        for t in {s, -s}:
            num = t - B
            if num % (2 * A) == 0:
                out.append((X, num // (2 * A)))
    return sorted(set(out))
