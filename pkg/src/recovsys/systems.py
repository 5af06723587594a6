"""Window-recoverable constrained systems and their explicit constructions.

A system over ``[q]`` is (k, l)-recoverable when every block of k consecutive
symbols is a deterministic function of the l symbols on each side.  Such a
system sits inside the constrained system of a forbidden set of words of
length ``2l + k``, and all constructions here hand back a presentation graph
together with the induced recovery table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterator, Mapping

import numpy as np

from .graphs import (
    LabeledDigraph,
    Word,
    adjacency,
    de_bruijn,
    essential_subgraph,
    is_strongly_connected,
    log_base,
    perron_eigenvalue,
    word_to_int,
    words_of_length,
)

SEARCH_CANDIDATE_CAP = 10_000_000


@dataclass(frozen=True)
class ForbiddenSet:
    """Alphabet size, window parameters, and forbidden words of length 2l+k."""

    q: int
    k: int
    l: int
    words: frozenset[Word]

    def __post_init__(self) -> None:
        if self.q < 1 or self.k < 1 or self.l < 1:
            raise ValueError("q, k, l must all be at least 1")
        w_len = 2 * self.l + self.k
        for w in self.words:
            if len(w) != w_len:
                raise ValueError(f"forbidden word {w} must have length {w_len}")
            if any(c < 0 or c >= self.q for c in w):
                raise ValueError(f"forbidden word {w} is not over [{self.q}]")

    @property
    def word_len(self) -> int:
        return 2 * self.l + self.k


@dataclass(frozen=True)
class RecoverableSystem:
    """A verified (k, l)-recoverable system.

    `recovery_table` maps each occurring boundary pair (left l-word,
    right l-word) to the unique middle k-word between them; `provenance`
    names the construction that produced the system.
    """

    q: int
    k: int
    l: int
    presentation: LabeledDigraph
    recovery_table: Mapping[tuple[Word, Word], Word]
    provenance: str

    def __post_init__(self) -> None:
        if self.q < 1 or self.k < 1 or self.l < 1:
            raise ValueError("q, k, l must all be at least 1")
        if self.presentation.q != self.q:
            raise ValueError("presentation alphabet differs from system alphabet")


@dataclass(frozen=True)
class VerificationResult:
    """Outcome of a recoverability check.

    On failure `conflict` holds the first clash in boundary-pair order:
    (alpha, beta, middle1, middle2).
    """

    ok: bool
    table: Mapping[tuple[Word, Word], Word]
    conflict: tuple[Word, Word, Word, Word] | None = None


def is_admissible(F: ForbiddenSet) -> bool:
    """True iff every boundary pair forbids at least ``q**k - 1`` middles."""
    middles = list(product(range(F.q), repeat=F.k))
    need = F.q**F.k - 1
    for u in product(range(F.q), repeat=F.l):
        for v in product(range(F.q), repeat=F.l):
            hits = sum(1 for w in middles if u + w + v in F.words)
            if hits < need:
                return False
    return True


def presentation_from_forbidden(F: ForbiddenSet) -> LabeledDigraph:
    """Standard presentation of the constrained system avoiding `F`.

    Vertices are all words of length ``2l + k - 1``; an edge joins u to v
    when they overlap by one shift and the spelled word avoids `F`.  Dead
    vertices are kept.
    """
    n = F.word_len
    labels = tuple(product(range(F.q), repeat=n - 1))
    edges = []
    for u, w in enumerate(labels):
        tail = w[1:]
        for a in range(F.q):
            if w + (a,) in F.words:
                continue
            v = word_to_int(tail + (a,), F.q)
            edges.append((u, v, (a,)))
    return LabeledDigraph(F.q, labels, tuple(edges))


def forbidden_from_graph(G: LabeledDigraph, k: int, l: int) -> ForbiddenSet:
    """Forbidden set of a presented system: the complement of its words."""
    n = 2 * l + k
    allowed = words_of_length(G, n)
    words = frozenset(w for w in product(range(G.q), repeat=n) if w not in allowed)
    return ForbiddenSet(G.q, k, l, words)


def verify_recoverable(G: LabeledDigraph, k: int, l: int) -> VerificationResult:
    """Check that `G` presents a (k, l)-recoverable system.

    Enumerates the occurring words of length ``2l + k`` and demands at most
    one middle k-word per boundary pair, collecting the recovery table.
    """
    if k < 1 or l < 1:
        raise ValueError("k and l must be at least 1")
    table: dict[tuple[Word, Word], Word] = {}
    for w in sorted(words_of_length(G, 2 * l + k)):
        key = (w[:l], w[l + k :])
        mid = w[l : l + k]
        prev = table.get(key)
        if prev is not None and prev != mid:
            return VerificationResult(False, {}, (key[0], key[1], prev, mid))
        table[key] = mid
    return VerificationResult(True, table)


def system_capacity(G: LabeledDigraph) -> float:
    """Growth rate (base q) of the word counts of the system `G` presents.

    Equals ``log_q`` of the spectral radius of the adjacency matrix; a
    presentation with no bi-infinite paths at all reports ``-inf``.
    """
    lam = perron_eigenvalue(adjacency(G))
    if lam == 0.0:
        return float("-inf")
    return log_base(lam, G.q)


def capacity(S: RecoverableSystem) -> float:
    return system_capacity(S.presentation)


def upper_bound(k: int, l: int) -> Fraction:
    """Every (k, l)-recoverable system has capacity at most l / (k + l)."""
    if k < 1 or l < 1:
        raise ValueError("k and l must be at least 1")
    return Fraction(l, k + l)


def _verified_system(
    q: int, k: int, l: int, G: LabeledDigraph, provenance: str
) -> RecoverableSystem:
    res = verify_recoverable(G, k, l)
    if not res.ok:
        raise AssertionError(
            f"construction {provenance!r} produced a non-recoverable system: "
            f"conflict {res.conflict}"
        )
    return RecoverableSystem(q, k, l, G, dict(res.table), provenance)


def _relabel_to_letters(A: np.ndarray, q: int) -> LabeledDigraph:
    """Wrap a 0/1 adjacency matrix as a presentation over single letters.

    Vertex i becomes letter i; each edge is labeled with its target letter.
    """
    labels = tuple((i,) for i in range(A.shape[0]))
    edges = tuple(
        (u, v, (v,))
        for u in range(A.shape[0])
        for v in range(A.shape[1])
        if A[u, v]
    )
    return LabeledDigraph(q, labels, edges)


def truncation_params(q: int) -> tuple[int, int]:
    """(t, r) with ``q = t**2 - r``, ``t = ceil(sqrt(q))``; rejects r > t."""
    if q < 2:
        raise ValueError("truncation needs an alphabet of size at least 2")
    t = math.isqrt(q)
    if t * t < q:
        t += 1
    r = t * t - q
    if r > t:
        raise ValueError(
            f"q={q} gives t={t}, r={r}: only 0 <= r <= t is constructible"
        )
    return t, r


def truncated_matrix(q: int) -> np.ndarray:
    """Adjacency matrix of the truncated order-2 de Bruijn graph for `q`.

    For ``r < t`` the last r rows and columns of the de Bruijn matrix over
    [t] are deleted; for ``r = t`` the rows and columns at positions
    ``{i*t + t - 1}`` are deleted instead (deleting the last t would strand
    incoming edges on rows that are not last).
    """
    t, r = truncation_params(q)
    A = adjacency(de_bruijn(t, 2))
    if r < t:
        keep = list(range(t * t - r))
    else:
        keep = [i for i in range(t * t) if i % t != t - 1]
    return A[np.ix_(keep, keep)]


def truncated_debruijn_system(q: int) -> RecoverableSystem:
    """(1, 1)-recoverable system over `q` letters from de Bruijn truncation.

    Vertices of the truncated graph are renamed to single letters of [q];
    when ``r = t`` only ``(t-1)**2`` of them can actually occur, which the
    provenance records (the declared alphabet size stays q).
    """
    t, r = truncation_params(q)
    A = truncated_matrix(q)
    G = _relabel_to_letters(A, q)
    effective = (t - 1) ** 2 if r == t else q
    prov = f"truncated_debruijn(q={q}, t={t}, r={r}, effective_alphabet={effective})"
    return _verified_system(q, 1, 1, G, prov)


def capacity_formula(q: int) -> float:
    """Closed-form capacity of the truncated de Bruijn system over `q`."""
    t, r = truncation_params(q)
    lam = 0.5 * (t - 1 + math.sqrt((t - 1) ** 2 + 4 * (t - r)))
    return log_base(lam, q)


def edge_cover_system(t: int, mode: str, *, k: int = 1, l: int = 1) -> RecoverableSystem:
    """Recoverable system by sharing line-graph edge symbols between vertices.

    square mode: symbols are pairs ``(a_i, a_{i+l})`` of an arbitrary stream
    over [t], giving an (l, l)-recoverable system over ``q = t**2`` with
    capacity exactly 1/2.  power mode: symbols are ``(k+1)``-windows of the
    stream, giving a (k, 1)-recoverable system over ``q = t**(k+1)`` with
    capacity ``1/(k+1)``.
    """
    if t < 2:
        raise ValueError("edge covering needs t >= 2")
    if mode == "square":
        if l < 1:
            raise ValueError("square mode needs l >= 1")
        k_sys, l_sys, q = l, l, t * t
        # a window of 3l pair-symbols reads 4l stream symbols
        span = 4 * l

        def encode(stream: Word) -> Word:
            return tuple(
                stream[i] * t + stream[i + l] for i in range(len(stream) - l)
            )

    elif mode == "power":
        if k < 1:
            raise ValueError("power mode needs k >= 1")
        k_sys, l_sys, q = k, 1, t ** (k + 1)
        span = (2 + k) + k

        def encode(stream: Word) -> Word:
            return tuple(
                word_to_int(stream[i : i + k + 1], t)
                for i in range(len(stream) - k)
            )

    else:
        raise ValueError(f"unknown edge-cover mode {mode!r}")

    window = 2 * l_sys + k_sys
    allowed = {encode(s) for s in product(range(t), repeat=span)}
    words = frozenset(
        w for w in product(range(q), repeat=window) if w not in allowed
    )
    F = ForbiddenSet(q, k_sys, l_sys, words)
    G = presentation_from_forbidden(F)
    prov = f"edge_cover(t={t}, mode={mode}, k={k_sys}, l={l_sys})"
    return _verified_system(q, k_sys, l_sys, G, prov)


def marker_system(q: int, k: int) -> RecoverableSystem:
    """(k, k+1)-recoverable system from periodic marker blocks.

    Sequences are free concatenations of the blocks ``2 1^(k+1)`` and
    ``2 0^(k+1)`` inside the alphabet [q]; the lone marker in every window
    locates the block boundary, so the middle k-word is always determined.
    Capacity is ``log_q(2) / (k + 2)``.
    """
    if q < 3:
        raise ValueError("marker construction needs q >= 3")
    if k < 1:
        raise ValueError("marker construction needs k >= 1")
    l = k + 1
    window = 2 * l + k
    period = k + 2
    blocks = [(2,) + (1,) * (k + 1), (2,) + (0,) * (k + 1)]
    allowed: set[Word] = set()
    # 4 blocks cover every window phase: 4(k+2) >= (k+1) + (3k+2)
    for choice in product(blocks, repeat=4):
        run = sum(choice, ())
        for off in range(period):
            allowed.add(run[off : off + window])
    words = frozenset(
        w for w in product(range(q), repeat=window) if w not in allowed
    )
    F = ForbiddenSet(q, k, l, words)
    G = presentation_from_forbidden(F)
    return _verified_system(q, k, l, G, f"marker(q={q}, k={k})")


def pair_presentation(G: LabeledDigraph) -> LabeledDigraph:
    """Re-present a (1, 1) system on its occurring pairs of letters.

    Vertices are the occurring 2-words, with an edge per occurring 3-word;
    the result is the essential part of the standard length-3 presentation.
    """
    triples = words_of_length(G, 3)
    pairs = sorted({w[:2] for w in triples} | {w[1:] for w in triples})
    index = {p: i for i, p in enumerate(pairs)}
    edges = tuple(
        sorted((index[w[:2]], index[w[1:]], (w[2],)) for w in triples)
    )
    return essential_subgraph(LabeledDigraph(G.q, tuple(pairs), edges))


def recursive_extend(S: RecoverableSystem) -> RecoverableSystem:
    """Grow a (1, 1) system by two letters via a length-four detour loop.

    Picks the vertex of maximum stationary mass under the max-entropy
    measure of the pair presentation (ties to the lowest vertex id; the
    maximum is automatically >= 1/q**2), attaches a 4-cycle through three
    fresh vertices spelling the two new letters, and re-verifies.  The
    capacity of the result is at least
    ``cap(S) * log_{q+2}(q) + (1/q**2) * log_{q+2}(1 + 1/q**2)``.
    """
    from .measures import max_entropy_measure

    if S.k != 1 or S.l != 1:
        raise ValueError("the loop extension applies to (1, 1) systems only")
    core = pair_presentation(S.presentation)
    if core.n_vertices == 0 or not is_strongly_connected(core):
        raise ValueError("the loop extension needs a strongly connected core")
    q = S.q
    mu = max_entropy_measure(core)
    v = int(np.argmax(mu.p))
    a, b = core.labels[v]
    alpha, beta = q, q + 1
    new_labels = list(core.labels) + [(b, alpha), (alpha, beta), (beta, a)]
    old_edges = list(core.edges)
    loop = [
        (core.labels[v], (b, alpha), (alpha,)),
        ((b, alpha), (alpha, beta), (beta,)),
        ((alpha, beta), (beta, a), (a,)),
        ((beta, a), core.labels[v], (b,)),
    ]
    order = sorted(range(len(new_labels)), key=lambda i: new_labels[i])
    remap = {new_labels[i]: rank for rank, i in enumerate(order)}
    labels = tuple(new_labels[i] for i in order)
    edges = [
        (remap[core.labels[u]], remap[core.labels[w]], lab)
        for u, w, lab in old_edges
    ]
    edges += [(remap[x], remap[y], lab) for x, y, lab in loop]
    G = LabeledDigraph(q + 2, labels, tuple(sorted(edges)))
    prov = f"recursive_extend(from={S.provenance}, loop_at={(a, b)})"
    return _verified_system(q + 2, 1, 1, G, prov)


def recursive_bound(cap_q: float, q: int) -> float:
    """Capacity bound for q+2 letters given a capacity value at q letters."""
    return cap_q * log_base(q, q + 2) + (1.0 / q**2) * log_base(
        1.0 + 1.0 / q**2, q + 2
    )


def recursive_chain_bound(q: int) -> float | None:
    """Loop-extension bound at `q`, seeded at the largest reachable square.

    The extension adds two letters at a time, so the seed is the largest
    perfect square of the same parity below q (capacity exactly 1/2 there).
    Returns None when no square >= 4 of matching parity exists.
    """
    seed = None
    for s in range(2, math.isqrt(q) + 1):
        if s * s <= q and (q - s * s) % 2 == 0:
            seed = s * s
    if seed is None:
        return None
    value = 0.5
    for step in range(seed, q, 2):
        value = recursive_bound(value, step)
    return value


def _boundary_pairs(q: int, l: int) -> list[tuple[Word, Word]]:
    sides = list(product(range(q), repeat=l))
    return [(u, v) for u in sides for v in sides]


def exhaustive_max_capacity(
    q: int, k: int, l: int, *, candidate_cap: int = SEARCH_CANDIDATE_CAP
) -> tuple[float, RecoverableSystem]:
    """Best capacity over all recovery functions, with a witness system.

    Iterates every function from boundary pairs to middle words (maximal
    systems keep exactly one middle per pair; larger forbidden sets only
    shrink capacity), scoring each induced forbidden set by the spectral
    radius of its presentation.  Ties keep the earliest function in
    enumeration order.
    """
    if q < 1 or k < 1 or l < 1:
        raise ValueError("q, k, l must all be at least 1")
    if q == 1:
        F = ForbiddenSet(1, k, l, frozenset())
        G = presentation_from_forbidden(F)
        return 0.0, _verified_system(1, k, l, G, "exhaustive(q=1)")
    pairs = _boundary_pairs(q, l)
    middles = list(product(range(q), repeat=k))
    n_candidates = len(middles) ** len(pairs)
    if n_candidates > candidate_cap:
        raise ValueError(
            f"search space of {n_candidates} recovery functions exceeds the "
            f"cap of {candidate_cap}"
        )
    word_len = 2 * l + k
    n_vertices = q ** (word_len - 1)
    best_lam = -1.0
    best_choice: tuple[Word, ...] | None = None
    for choice in product(middles, repeat=len(pairs)):
        A = np.zeros((n_vertices, n_vertices), dtype=np.int64)
        for (u, v), keep in zip(pairs, choice):
            w = u + keep + v
            A[word_to_int(w[:-1], q), word_to_int(w[1:], q)] = 1
        lam = perron_eigenvalue(A)
        if lam > best_lam + 1e-12:
            best_lam = lam
            best_choice = choice
    assert best_choice is not None
    words = frozenset(
        u + w + v
        for (u, v), keep in zip(pairs, best_choice)
        for w in middles
        if w != keep
    )
    F = ForbiddenSet(q, k, l, words)
    G = presentation_from_forbidden(F)
    system = _verified_system(q, k, l, G, f"exhaustive(q={q}, k={k}, l={l})")
    value = float("-inf") if best_lam == 0.0 else log_base(best_lam, q)
    return value, system
