import pytest

import recovsys as rs

BINARY_FORBIDDEN = frozenset({(0, 0, 0), (1, 1, 1), (1, 1, 0), (0, 1, 1)})


@pytest.fixture(scope="session")
def binary_system() -> rs.RecoverableSystem:
    """The unique binary (1,1) system of maximum capacity."""
    F = rs.ForbiddenSet(2, 1, 1, BINARY_FORBIDDEN)
    G = rs.presentation_from_forbidden(F)
    res = rs.verify_recoverable(G, 1, 1)
    assert res.ok
    return rs.RecoverableSystem(2, 1, 1, G, dict(res.table), "binary_max_capacity")


@pytest.fixture(scope="session")
def edge4_system() -> rs.RecoverableSystem:
    return rs.edge_cover_system(2, "square", l=1)


@pytest.fixture(scope="session")
def trunc8_system() -> rs.RecoverableSystem:
    return rs.truncated_debruijn_system(8)


@pytest.fixture(scope="session")
def construction_suite(binary_system, edge4_system, trunc8_system):
    return {
        "binary_max_capacity": binary_system,
        "edge_cover_q4": edge4_system,
        "truncated_q8": trunc8_system,
    }


def brute_force_word_count(q: int, n: int, forbidden: frozenset) -> int:
    """Independent oracle: scan every q**n word for forbidden subwords."""
    from itertools import product

    if not forbidden:
        return q**n
    L = len(next(iter(forbidden)))
    count = 0
    for w in product(range(q), repeat=n):
        if n < L or not any(w[i : i + L] in forbidden for i in range(n - L + 1)):
            count += 1
    return count


def plastic_number() -> float:
    """Real root of x**3 - x - 1 by bisection on [1, 2]."""
    lo, hi = 1.0, 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid**3 - mid - 1 < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
