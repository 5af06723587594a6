"""Word-labeled directed multigraphs and exact path/word counting.

Vertices carry equal-length words over the alphabet ``[q] = {0, ..., q-1}``
and are kept in base-q numeric (equivalently lexicographic) order, so vertex
ids double as ranks.  Edges carry word labels: presentations emit one symbol
per edge, while graph powers emit whole vertex words.  Everything here is
immutable and every function is pure, so concurrent use is safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Mapping, Sequence

import numpy as np

Word = tuple[int, ...]
Edge = tuple[int, int, Word]

PERRON_REL_TOL = 1e-14
PERRON_MAX_ITER = 100_000
ENUM_WORD_CAP = 2_000_000


def word_from_int(value: int, q: int, length: int) -> Word:
    """Base-q digits of `value`, most significant first, padded to `length`."""
    if value < 0 or (q == 1 and value > 0) or (q > 1 and value >= q**length):
        raise ValueError(f"{value} does not fit in {length} base-{q} digits")
    digits = [0] * length
    for i in range(length - 1, -1, -1):
        value, digits[i] = divmod(value, q)
    return tuple(digits)


def word_to_int(word: Word, q: int) -> int:
    value = 0
    for digit in word:
        value = value * q + digit
    return value


@dataclass(frozen=True)
class LabeledDigraph:
    """Directed multigraph with word labels on vertices and edges.

    Parameters
    ----------
    q : alphabet size, at least 1.
    labels : vertex words, equal length, strictly increasing numerically;
        the position of a word is its vertex id.
    edges : (from_id, to_id, label_word) triples.  Repeating an identical
        triple encodes edge multiplicity (graph powers do this); otherwise
        parallel edges carry distinct labels.
    """

    q: int
    labels: tuple[Word, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self) -> None:
        if self.q < 1:
            raise ValueError("alphabet size must be at least 1")
        lengths = {len(w) for w in self.labels}
        if len(lengths) > 1:
            raise ValueError("vertex labels must have equal length")
        for w in self.labels:
            if not w:
                raise ValueError("vertex labels must be nonempty words")
            if any(c < 0 or c >= self.q for c in w):
                raise ValueError(f"label {w} is not a word over [{self.q}]")
        for prev, cur in zip(self.labels, self.labels[1:]):
            if prev >= cur:
                raise ValueError("vertex labels must be strictly increasing")
        n = len(self.labels)
        elens = set()
        for u, v, lab in self.edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) references a missing vertex")
            if not lab or any(c < 0 or c >= self.q for c in lab):
                raise ValueError(f"edge label {lab} is not a word over [{self.q}]")
            elens.add(len(lab))
        if len(elens) > 1:
            raise ValueError("edge labels must have uniform length")

    @property
    def n_vertices(self) -> int:
        return len(self.labels)

    @property
    def label_len(self) -> int:
        return len(self.labels[0]) if self.labels else 0

    @property
    def edge_label_len(self) -> int:
        return len(self.edges[0][2]) if self.edges else 0

    def vertex_id(self, label: Word) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"no vertex labeled {label}") from None

    def out_edges(self, u: int) -> list[Edge]:
        return [e for e in self.edges if e[0] == u]

    def successors(self) -> list[list[tuple[int, Word]]]:
        """Adjacency lists: for each vertex the (target, edge label) pairs."""
        succ: list[list[tuple[int, Word]]] = [[] for _ in self.labels]
        for u, v, lab in self.edges:
            succ[u].append((v, lab))
        return succ


def make_graph(q: int, labels: Iterable[Word], edges: Iterable[Edge]) -> LabeledDigraph:
    """Build a graph from unsorted vertex labels, remapping edge endpoints."""
    lab_list = list(labels)
    order = sorted(range(len(lab_list)), key=lambda i: lab_list[i])
    remap = {old: new for new, old in enumerate(order)}
    sorted_labels = tuple(lab_list[i] for i in order)
    remapped = tuple(sorted((remap[u], remap[v], lab) for u, v, lab in edges))
    return LabeledDigraph(q, sorted_labels, remapped)


def de_bruijn(q: int, d: int) -> LabeledDigraph:
    """De Bruijn graph of order `d` over ``[q]``.

    Vertices are all ``q**d`` words of length `d`; there is an edge from `u`
    to `v` exactly when `v` is the tail of `u` extended by one symbol, and
    the edge is labeled with that symbol.
    """
    if q < 1 or d < 1:
        raise ValueError("de Bruijn graphs need q >= 1 and d >= 1")
    labels = tuple(product(range(q), repeat=d))
    edges = []
    for u, w in enumerate(labels):
        tail = w[1:]
        for a in range(q):
            v = word_to_int(tail + (a,), q)
            edges.append((u, v, (a,)))
    return LabeledDigraph(q, labels, tuple(edges))


def adjacency(G: LabeledDigraph) -> np.ndarray:
    """Integer adjacency matrix; entry (u, v) counts edges from u to v."""
    n = G.n_vertices
    A = np.zeros((n, n), dtype=np.int64)
    for u, v, _ in G.edges:
        A[u, v] += 1
    return A


def higher_power(G: LabeledDigraph, m: int) -> LabeledDigraph:
    """Graph on the same vertices with one edge per length-`m` path.

    The edge for a path ending at `v` is labeled with the word of `v`, so
    each transition emits a whole vertex word.  The adjacency matrix of the
    result equals ``adjacency(G) ** m`` entrywise.
    """
    if m < 1:
        raise ValueError("path length m must be at least 1")
    A = _exact_matrix(adjacency(G))
    P = _exact_matrix_power(A, m)
    edges = []
    for u in range(G.n_vertices):
        for v in range(G.n_vertices):
            edges.extend([(u, v, G.labels[v])] * P[u][v])
    return LabeledDigraph(G.q, G.labels, tuple(edges))


def scc_decompose(G: LabeledDigraph) -> list[tuple[int, ...]]:
    """Strongly connected components as sorted vertex-id tuples.

    Components are returned ordered by their smallest vertex id.
    """
    succ = [[v for v, _ in adj] for adj in G.successors()]
    comps = _tarjan(succ)
    return sorted((tuple(sorted(c)) for c in comps), key=lambda c: c[0])


def is_strongly_connected(G: LabeledDigraph) -> bool:
    """True iff every ordered vertex pair is joined by a directed path."""
    if G.n_vertices <= 1:
        return True
    return len(scc_decompose(G)) == 1


def essential_subgraph(G: LabeledDigraph) -> LabeledDigraph:
    """Induced subgraph on vertices with bi-infinite paths through them.

    Iteratively drops vertices of in-degree or out-degree zero.  This is the
    explicit pruning operation: no other function ever removes vertices from
    a graph it returns.
    """
    keep = set(range(G.n_vertices))
    changed = True
    while changed and keep:
        changed = False
        outd = {u: 0 for u in keep}
        ind = {u: 0 for u in keep}
        for u, v, _ in G.edges:
            if u in keep and v in keep:
                outd[u] += 1
                ind[v] += 1
        for u in list(keep):
            if outd[u] == 0 or ind[u] == 0:
                keep.remove(u)
                changed = True
    order = sorted(keep)
    remap = {old: new for new, old in enumerate(order)}
    labels = tuple(G.labels[i] for i in order)
    edges = tuple(
        (remap[u], remap[v], lab)
        for u, v, lab in G.edges
        if u in keep and v in keep
    )
    return LabeledDigraph(G.q, labels, edges)


def perron_eigenvalue(A: np.ndarray | Sequence[Sequence[float]]) -> float:
    """Spectral radius of a nonnegative matrix, exact to ~1e-12.

    Computed per strongly connected component by power iteration on the
    component submatrix shifted by the identity; the shift makes irreducible
    blocks primitive, so periodic structure cannot stall convergence.
    Degenerate matrices (no cycles at all) give 0.
    """
    M = np.asarray(A, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("adjacency matrix must be square")
    if M.size and M.min() < 0:
        raise ValueError("adjacency matrix must be nonnegative")
    best = 0.0
    for comp in _matrix_sccs(M):
        sub = M[np.ix_(comp, comp)]
        if sub.shape[0] == 1 and sub[0, 0] == 0.0:
            continue
        lam, _ = perron_pair(sub)
        best = max(best, lam)
    return best


def perron_pair(A: np.ndarray) -> tuple[float, np.ndarray]:
    """Perron eigenvalue and right eigenvector of an irreducible matrix.

    The eigenvalue estimate is bracketed by min/max Rayleigh-like ratios
    (valid for irreducible nonnegative matrices with a positive iterate),
    iterating until the bracket is ~1e-14 wide relative or stalls.
    """
    M = np.asarray(A, dtype=float) + np.eye(A.shape[0])
    v = np.full(M.shape[0], 1.0 / M.shape[0])
    lo_best, hi_best = 0.0, math.inf
    stall = 0
    for _ in range(PERRON_MAX_ITER):
        w = M @ v
        ratios = w / v
        lo, hi = float(ratios.min()), float(ratios.max())
        improved = lo > lo_best or hi < hi_best
        lo_best = max(lo_best, lo)
        hi_best = min(hi_best, hi)
        v = w / w.max()
        if hi_best - lo_best <= PERRON_REL_TOL * hi_best:
            break
        stall = 0 if improved else stall + 1
        if stall > 64:
            break
    lam = 0.5 * (lo_best + hi_best) - 1.0
    return lam, v / v.sum()


def trace_power(A: np.ndarray | Sequence[Sequence[int]], n: int) -> int:
    """Exact trace of ``A**n`` over the integers (``A**0`` is the identity)."""
    if n < 0:
        raise ValueError("exponent must be nonnegative")
    M = _exact_matrix(A)
    P = _exact_matrix_power(M, n)
    return sum(P[i][i] for i in range(len(P)))


def words_of_length(G: LabeledDigraph, n: int) -> frozenset[Word]:
    """All length-`n` words of the system presented by `G`.

    Words of the system are the words spelled inside bi-infinite label paths,
    so enumeration runs on the essential subgraph: a path there spells its
    start-vertex word followed by its edge labels.  Requires single-symbol
    edge labels.
    """
    if n < 1:
        raise ValueError("word length must be at least 1")
    if G.edges and G.edge_label_len != 1:
        raise ValueError("word enumeration needs single-symbol edge labels")
    E = essential_subgraph(G)
    if not E.labels:
        return frozenset()
    L = E.label_len
    if n <= L:
        return frozenset(w[:n] for w in E.labels)
    succ = E.successors()
    frontier: dict[Word, set[int]] = {w: {u} for u, w in enumerate(E.labels)}
    for _ in range(n - L):
        nxt: dict[Word, set[int]] = {}
        for word, ends in frontier.items():
            for u in ends:
                for v, lab in succ[u]:
                    nxt.setdefault(word + lab, set()).add(v)
        frontier = nxt
        if len(frontier) > ENUM_WORD_CAP:
            raise ValueError("word enumeration exceeded the configured cap")
    return frozenset(frontier)


def count_words(
    G: LabeledDigraph,
    n: int,
    *,
    fallback_max_n: int = 20,
    fallback_max_q: int = 4,
) -> int:
    """Exact number of length-`n` words of the system presented by `G`.

    When every vertex emits distinctly labeled edges the presentation is
    deterministic, paths biject with words, and the count is a big-integer
    path count; otherwise the word set is enumerated explicitly, which is
    capped at ``n <= fallback_max_n`` and ``q <= fallback_max_q``.
    """
    if n < 1:
        raise ValueError("word length must be at least 1")
    if G.edges and G.edge_label_len != 1:
        raise ValueError("word counting needs single-symbol edge labels")
    E = essential_subgraph(G)
    if not E.labels:
        return 0
    L = E.label_len
    if n <= L:
        return len({w[:n] for w in E.labels})
    if _is_deterministic(E):
        counts = [1] * E.n_vertices
        A = _exact_matrix(adjacency(E))
        for _ in range(n - L):
            counts = [
                sum(row[v] * counts[v] for v in range(len(counts)) if row[v])
                for row in A
            ]
        return sum(counts)
    if n > fallback_max_n or G.q > fallback_max_q:
        raise ValueError(
            "nondeterministic presentation: explicit enumeration capped at "
            f"n <= {fallback_max_n}, q <= {fallback_max_q}"
        )
    return len(words_of_length(G, n))


def log_base(x: float, q: int) -> float:
    """log_q(x); alphabets of size 1 carry zero information per symbol."""
    if q == 1:
        return 0.0
    return math.log(x) / math.log(q)


def _is_deterministic(G: LabeledDigraph) -> bool:
    seen: set[tuple[int, Word]] = set()
    for u, _, lab in G.edges:
        if (u, lab) in seen:
            return False
        seen.add((u, lab))
    return True


def _exact_matrix(A: np.ndarray | Sequence[Sequence[int]]) -> list[list[int]]:
    M = np.asarray(A)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("matrix must be square")
    out = [[int(x) for x in row] for row in M.tolist()]
    if any(x < 0 for row in out for x in row):
        raise ValueError("matrix must be nonnegative")
    return out


def _exact_matrix_mul(X: list[list[int]], Y: list[list[int]]) -> list[list[int]]:
    n = len(X)
    cols = list(zip(*Y))
    return [[sum(a * b for a, b in zip(row, col)) for col in cols] for row in X]


def _exact_matrix_power(A: list[list[int]], e: int) -> list[list[int]]:
    n = len(A)
    result = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    base = [row[:] for row in A]
    while e:
        if e & 1:
            result = _exact_matrix_mul(result, base)
        e >>= 1
        if e:
            base = _exact_matrix_mul(base, base)
    return result


def _matrix_sccs(A: np.ndarray) -> list[list[int]]:
    n = A.shape[0]
    succ = [list(np.nonzero(A[u] > 0)[0]) for u in range(n)]
    return [sorted(c) for c in _tarjan(succ)]


def _tarjan(succ: Sequence[Sequence[int]]) -> list[list[int]]:
    # Iterative Tarjan; recursion would overflow on multi-thousand-vertex
    # presentations.
    n = len(succ)
    index = [-1] * n
    lowlink = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, iter(succ[root]))]
        index[root] = lowlink[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if index[w] == -1:
                    index[w] = lowlink[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, iter(succ[w])))
                    advanced = True
                    break
                if on_stack[w]:
                    lowlink[v] = min(lowlink[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[v])
            if lowlink[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(comp)
    return comps
