"""Periodic points of recoverable systems and the cycle codes they induce.

The words read around closed paths of a (1, 1)-recoverable presentation form
a storage code on the cycle graph: every symbol is reproducible from its two
neighbors through the one shared recovery rule of the system.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .graphs import LabeledDigraph, Word, adjacency, log_base, trace_power
from .systems import RecoverableSystem

WORD_ENUMERATION_CAP = 1_000_000


@dataclass(frozen=True)
class PeriodicPoints:
    """Exact count of closed label paths, plus the words when enumerated."""

    count: int
    words: frozenset[Word] | None


@dataclass(frozen=True)
class CycleStorageCode:
    """Cyclic-shift-closed word set repaired by one shared neighbor rule."""

    n: int
    q: int
    codewords: frozenset[Word]
    recovery_table: Mapping[tuple[Word, Word], Word]

    def rate(self) -> float:
        """(1/n) log_q of the code size; empty codes rate -inf."""
        if not self.codewords:
            return float("-inf")
        return log_base(len(self.codewords), self.q) / self.n


@dataclass(frozen=True)
class StorageVerification:
    ok: bool
    violation: tuple[Word, int] | None = None


def perrin_count(n: int) -> int:
    """n-th term of z_n = z_{n-2} + z_{n-3} from z_0=3, z_1=0, z_2=2."""
    if n < 0:
        raise ValueError("the sequence starts at n = 0")
    z = [3, 0, 2]
    if n < 3:
        return z[n]
    for _ in range(n - 2):
        z = [z[1], z[2], z[0] + z[1]]
    return z[2]


def periodic_points(
    G: LabeledDigraph, n: int, *, word_cap: int = WORD_ENUMERATION_CAP
) -> PeriodicPoints:
    """Period-n points of the system presented by `G`.

    The exact count is the trace of the n-th adjacency power.  The explicit
    word set is enumerated by closed-path traversal when the count is within
    `word_cap` and the edges emit single symbols; deterministic presentations
    spell distinct words on distinct closed paths, so the set size matches
    the count there.
    """
    if n < 1:
        raise ValueError("the period must be at least 1")
    A = adjacency(G)
    count = trace_power(A, n)
    # The traversal visits every length-n path, not just the closed ones, so
    # the cap guards the total path count.
    totals = [1] * G.n_vertices
    for _ in range(n):
        totals = [sum(int(A[u, v]) * totals[v] for v in range(len(totals))) for u in range(len(totals))]
    words: frozenset[Word] | None = None
    if sum(totals) <= word_cap and (not G.edges or G.edge_label_len == 1):
        found: set[Word] = set()
        succ = G.successors()
        for start in range(G.n_vertices):
            stack: list[tuple[int, tuple[int, ...]]] = [(start, ())]
            while stack:
                v, labs = stack.pop()
                if len(labs) == n:
                    if v == start:
                        found.add(labs)
                    continue
                for w, lab in succ[v]:
                    stack.append((w, labs + lab))
        words = frozenset(found)
    return PeriodicPoints(count, words)


def storage_code_for_cycle(
    S: RecoverableSystem, n: int, *, word_cap: int = WORD_ENUMERATION_CAP
) -> CycleStorageCode:
    """Storage code on the n-cycle from the period-n points of `S`.

    Needs a (1, 1)-recoverable system and n >= 3 (each position must have
    two distinct neighbors); the recovery table is shared with `S`.
    """
    if S.k != 1 or S.l != 1:
        raise ValueError("cycle codes come from (1, 1)-recoverable systems")
    if n < 3:
        raise ValueError("a cycle needs length at least 3")
    pts = periodic_points(S.presentation, n, word_cap=word_cap)
    if pts.words is None:
        raise ValueError(
            f"{pts.count} periodic points exceed the enumeration cap of {word_cap}"
        )
    return CycleStorageCode(n, S.q, pts.words, S.recovery_table)


def verify_storage_code(C: CycleStorageCode) -> StorageVerification:
    """Check that every codeword position is repaired by the shared table.

    Returns the first violating (codeword, position) in sorted order when a
    neighbor pair is missing from the table or decodes to the wrong symbol.
    """
    for w in sorted(C.codewords):
        for i in range(C.n):
            left = (w[(i - 1) % C.n],)
            right = (w[(i + 1) % C.n],)
            repaired = C.recovery_table.get((left, right))
            if repaired != (w[i],):
                return StorageVerification(False, (w, i))
    return StorageVerification(True)
