"""Markov measures on presentations and their entropy-relaxed perturbations.

Two kinds of chains appear.  Sliding chains emit one symbol per transition
(states are words overlapping by all but one symbol), while block chains emit
their whole state word per transition; the entropy unit adapts through
``log_base = q ** emit`` so that rates are always per-symbol in base q and
directly comparable across the two kinds.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from itertools import product
from typing import Mapping, Sequence

import numpy as np

from .graphs import (
    LabeledDigraph,
    Word,
    adjacency,
    higher_power,
    is_strongly_connected,
    perron_pair,
    words_of_length,
)
from .systems import RecoverableSystem

STOCHASTIC_TOL = 1e-12
DELTA_BISECT_STEPS = 200


@dataclass(frozen=True)
class MarkovMeasure:
    """Stationary Markov chain over word-labeled states.

    Parameters
    ----------
    q : symbol alphabet size.
    states : state words, strictly increasing numerically.
    P : row-stochastic transition matrix.
    p : stationary row vector (``p @ P == p``).
    emit : symbols emitted per transition; entropies use base ``q**emit``.
    """

    q: int
    states: tuple[Word, ...]
    P: np.ndarray
    p: np.ndarray
    emit: int

    def __post_init__(self) -> None:
        P = np.array(self.P, dtype=float)
        p = np.array(self.p, dtype=float)
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "p", p)
        n = len(self.states)
        if P.shape != (n, n) or p.shape != (n,):
            raise ValueError("matrix and vector shapes must match the state count")
        for prev, cur in zip(self.states, self.states[1:]):
            if prev >= cur:
                raise ValueError("states must be strictly increasing words")
        if n and P.min() < 0:
            raise ValueError("transition probabilities must be nonnegative")
        if n and np.abs(P.sum(axis=1) - 1.0).max() > STOCHASTIC_TOL:
            raise ValueError("every transition row must sum to 1")
        if n and abs(p.sum() - 1.0) > STOCHASTIC_TOL:
            raise ValueError("the stationary vector must sum to 1")
        if n and np.abs(p @ P - p).max() > STOCHASTIC_TOL:
            raise ValueError("the vector is not stationary for the matrix")
        P.setflags(write=False)
        p.setflags(write=False)

    @property
    def log_base(self) -> int:
        return self.q**self.emit

    @property
    def state_len(self) -> int:
        return len(self.states[0]) if self.states else 0

    def state_index(self) -> dict[Word, int]:
        return {w: i for i, w in enumerate(self.states)}


class InconsistentMarginalError(ValueError):
    """A word distribution whose two sub-marginals disagree."""

    def __init__(self, word: Word, prefix_mass: float, suffix_mass: float):
        self.word = word
        super().__init__(
            f"marginal is not shift consistent at {word}: "
            f"prefix mass {prefix_mass!r} vs suffix mass {suffix_mass!r}"
        )


@dataclass(frozen=True)
class EpsilonParams:
    """Entropy budget and the perturbation rate it induces."""

    epsilon: float
    q: int
    k: int
    l: int
    delta: float


@dataclass(frozen=True)
class WindowEntropyReport:
    """Conditional middle-window entropies per boundary pair (base q).

    Pairs of zero probability are excluded from `entries` and listed in
    `zero_pairs`; `max_entropy` is 0 when no pair is populated.
    """

    entries: Mapping[tuple[Word, Word], float]
    zero_pairs: tuple[tuple[Word, Word], ...]
    max_entropy: float
    argmax_pair: tuple[Word, Word] | None


@dataclass(frozen=True)
class EpsilonConstruction:
    """Perturbed presentation and measure, with its ingredients."""

    graph: LabeledDigraph
    measure: MarkovMeasure
    base_measure: MarkovMeasure
    params: EpsilonParams


def _xlogx(x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    mask = x > 0
    out[mask] = x[mask] * np.log(x[mask])
    return out


def binary_entropy(x: float) -> float:
    """H_2(x) in bits, with 0 log 0 = 0."""
    return _hq(x, 2)


def _hq(x: float, q: int) -> float:
    if x < 0 or x > 1:
        raise ValueError("entropy argument must lie in [0, 1]")
    total = 0.0
    for t in (x, 1.0 - x):
        if t > 0:
            total -= t * math.log(t)
    return total / math.log(q)


def max_entropy_measure(G: LabeledDigraph) -> MarkovMeasure:
    """The unique entropy-maximizing Markov measure on presentation `G`.

    Left and right Perron vectors x, y are normalized to ``x . y = 1``; the
    chain has ``P[u, v] = A[u, v] * y[v] / (lam * y[u])`` and stationary
    vector ``p = x * y``, and its entropy rate equals the capacity of the
    presented system.  Requires a strongly connected graph with edges.
    """
    if not is_strongly_connected(G):
        raise ValueError("the max-entropy measure needs a strongly connected graph")
    if not G.edges:
        raise ValueError("the max-entropy measure needs at least one edge")
    A = adjacency(G).astype(float)
    lam, y = perron_pair(A)
    _, x = perron_pair(A.T)
    x = x / float(x @ y)
    p = x * y
    P = A * y[None, :] / (lam * y[:, None])
    P = P / P.sum(axis=1, keepdims=True)
    emit = G.edge_label_len
    return MarkovMeasure(G.q, G.labels, P, p, emit)


def entropy_rate(M: MarkovMeasure) -> float:
    """Per-transition Shannon entropy in base ``q**emit`` (per-symbol, base q)."""
    rows = -_xlogx(M.P).sum(axis=1)
    return float(M.p @ rows) / math.log(M.log_base)


def cylinder_probability(M: MarkovMeasure, path: Sequence[Word]) -> float:
    """Probability of observing the given state sequence."""
    if not path:
        raise ValueError("the state sequence must be nonempty")
    index = M.state_index()
    try:
        ids = [index[w] for w in path]
    except KeyError as exc:
        raise KeyError(f"unknown state label {exc.args[0]}") from None
    prob = float(M.p[ids[0]])
    for u, v in zip(ids, ids[1:]):
        prob *= float(M.P[u, v])
    return prob


def window_marginal(M: MarkovMeasure, n: int) -> dict[Word, float]:
    """Distribution of length-`n` symbol windows under the measure.

    A window the size of the state word is the state marginal itself.
    Longer windows require a sliding single-symbol chain and multiply
    transition probabilities along the unique state path; shorter windows
    marginalize the state distribution onto prefixes.
    """
    sl = M.state_len
    if n < 1:
        raise ValueError("window length must be at least 1")
    if n == sl:
        return {w: float(pr) for w, pr in zip(M.states, M.p)}
    if n < sl:
        out: dict[Word, float] = {}
        for w, pr in zip(M.states, M.p):
            out[w[:n]] = out.get(w[:n], 0.0) + float(pr)
        return out
    if M.emit != 1:
        raise ValueError(
            "windows longer than the state word need a single-symbol chain"
        )
    _check_sliding(M)
    frontier: dict[Word, tuple[int, float]] = {
        w: (i, float(pr)) for i, (w, pr) in enumerate(zip(M.states, M.p)) if pr > 0
    }
    index = M.state_index()
    for _ in range(n - sl):
        nxt: dict[Word, tuple[int, float]] = {}
        for word, (u, pr) in frontier.items():
            for v in np.nonzero(M.P[u] > 0)[0]:
                nw = word + (M.states[v][-1],)
                prev = nxt.get(nw)
                mass = pr * float(M.P[u, v])
                nxt[nw] = (int(v), prev[1] + mass if prev else mass)
        frontier = nxt
    return {w: pr for w, (_, pr) in frontier.items()}


def _check_sliding(M: MarkovMeasure) -> None:
    if M.state_len < 2:
        return
    for u in range(len(M.states)):
        for v in np.nonzero(M.P[u] > 0)[0]:
            if M.states[u][1:] != M.states[int(v)][:-1]:
                raise ValueError(
                    "positive transition between non-overlapping states; "
                    "this chain has no symbol-level reading"
                )


def symbol_marginal(M: MarkovMeasure, n: int) -> dict[Word, float]:
    """Phase-averaged length-`n` window distribution of the symbol stream.

    For a block chain the emitted symbol stream is only block-stationary;
    averaging the window over all ``emit`` phases gives the marginal of the
    stationary symbol process, which is shift consistent by construction.
    """
    if M.emit == 1:
        return window_marginal(M, n)
    W = M.state_len
    if n > W:
        raise ValueError("phase-averaged windows are supported up to the block size")
    acc: dict[Word, float] = {}
    for i in range(M.emit):
        if i + n <= W:
            for w, pr in zip(M.states, M.p):
                if pr > 0:
                    key = w[i : i + n]
                    acc[key] = acc.get(key, 0.0) + float(pr) / M.emit
        else:
            j = i + n - W
            for u, pu in enumerate(M.p):
                if pu <= 0:
                    continue
                for v in np.nonzero(M.P[u] > 0)[0]:
                    key = M.states[u][i:] + M.states[int(v)][:j]
                    mass = float(pu) * float(M.P[u, int(v)]) / M.emit
                    acc[key] = acc.get(key, 0.0) + mass
    return acc


def window_conditional_entropy(M: MarkovMeasure, k: int, l: int) -> WindowEntropyReport:
    """Entropy of the middle k-word given each boundary pair, base q.

    Boundary pairs are all (left l-word, right l-word) combinations; pairs
    carrying zero probability are reported separately, mirroring the
    positive-mass hypothesis of the recovery guarantee.
    """
    if k < 1 or l < 1:
        raise ValueError("k and l must be at least 1")
    marg = window_marginal(M, 2 * l + k)
    grouped: dict[tuple[Word, Word], dict[Word, float]] = {}
    for w, pr in marg.items():
        if pr <= 0:
            continue
        key = (w[:l], w[l + k :])
        grouped.setdefault(key, {})[w[l : l + k]] = pr
    entries: dict[tuple[Word, Word], float] = {}
    zero: list[tuple[Word, Word]] = []
    for u in product(range(M.q), repeat=l):
        for v in product(range(M.q), repeat=l):
            mids = grouped.get((u, v))
            if not mids:
                zero.append((u, v))
                continue
            total = sum(mids.values())
            probs = np.array([m / total for m in mids.values()])
            entries[(u, v)] = float(-_xlogx(probs).sum()) / math.log(M.q)
    if entries:
        argmax = max(entries, key=lambda key: (entries[key], key))
        max_ent = entries[argmax]
    else:
        argmax, max_ent = None, 0.0
    return WindowEntropyReport(entries, tuple(zero), max_ent, argmax)


def is_epsilon_recoverable(
    M: MarkovMeasure, epsilon: float, k: int, l: int, *, tol: float = 1e-10
) -> bool:
    """True iff every populated boundary pair has middle entropy <= epsilon."""
    report = window_conditional_entropy(M, k, l)
    return report.max_entropy <= epsilon + tol


def delta_from_epsilon(epsilon: float, q: int, k: int) -> float:
    """Perturbation rate whose entropy cost equals `epsilon`.

    Solves ``H_q(delta) + delta * log_q(q**k - 1) = epsilon`` by bisection on
    ``[0, (q**k - 1) / q**k]``, where the left side increases strictly from 0
    to its maximum k.
    """
    if q < 2 or k < 1:
        raise ValueError("the rate equation needs q >= 2 and k >= 1")
    if epsilon < 0 or epsilon > k + 1e-12:
        raise ValueError(f"epsilon must lie in [0, {k}]")
    if epsilon == 0:
        return 0.0
    spread = q**k - 1
    shift = math.log(spread) / math.log(q) if spread > 1 else 0.0

    def cost(d: float) -> float:
        return _hq(d, q) + d * shift

    lo, hi = 0.0, spread / q**k
    if epsilon >= cost(hi):
        delta = hi
    else:
        for _ in range(DELTA_BISECT_STEPS):
            mid = 0.5 * (lo + hi)
            if cost(mid) < epsilon:
                lo = mid
            else:
                hi = mid
        delta = 0.5 * (lo + hi)
    if k > 1 and delta > (q - 1) / q:
        warnings.warn(
            f"delta={delta:.6f} exceeds (q-1)/q; the k=1 rate range does not "
            "cover this regime",
            stacklevel=2,
        )
    return delta


def higher_block_presentation(S: RecoverableSystem) -> LabeledDigraph:
    """Presentation of `S` on its occurring windows of length ``2l + k``.

    Vertices are the occurring window words; edges follow one-symbol overlap
    and carry the emitted symbol, as in the standard presentation.
    """
    W = 2 * S.l + S.k
    allowed = sorted(words_of_length(S.presentation, W))
    if not allowed:
        raise ValueError("the system has no occurring windows")
    index = {w: i for i, w in enumerate(allowed)}
    edges = []
    for u, w in enumerate(allowed):
        for a in range(S.q):
            v = index.get(w[1:] + (a,))
            if v is not None:
                edges.append((u, v, (a,)))
    return LabeledDigraph(S.q, tuple(allowed), tuple(edges))


def epsilon_construction(S: RecoverableSystem, epsilon: float) -> EpsilonConstruction:
    """Perturb a recoverable system into an entropy-epsilon measure.

    The system is re-presented on its length-``2l+k`` windows, raised to the
    ``2l+k`` power so each transition emits a whole window, and given its
    max-entropy measure.  Every window then gains ``q**k - 1`` ghost variants
    with the middle word replaced; transitions route mass delta to ghosts
    (split evenly) and keep 1 - delta on real targets.  The returned measure
    is stationary by construction and its entropy rate exceeds the base
    measure's by exactly ``epsilon / (2l + k)``.
    """
    W = 2 * S.l + S.k
    params = EpsilonParams(
        epsilon, S.q, S.k, S.l, delta_from_epsilon(epsilon, S.q, S.k)
    )
    G = higher_block_presentation(S)
    if not is_strongly_connected(G):
        raise ValueError("the construction needs a strongly connected window graph")
    Gm = higher_power(G, W)
    mu = max_entropy_measure(Gm)
    real = list(Gm.labels)
    real_set = set(real)
    ghost_parent: dict[Word, Word] = {}
    variants: dict[Word, list[Word]] = {w: [w] for w in real}
    for w in real:
        for a in product(range(S.q), repeat=S.k):
            g = w[: S.l] + a + w[S.l + S.k :]
            if g == w:
                continue
            if g in ghost_parent or g in real_set:
                raise AssertionError(
                    f"window {g} has two parents; the input is not recoverable"
                )
            ghost_parent[g] = w
            variants[w].append(g)
    states = tuple(sorted(real + list(ghost_parent)))
    idx = {w: i for i, w in enumerate(states)}
    mu_idx = {w: i for i, w in enumerate(real)}
    n = len(states)
    delta, spread = params.delta, S.q**S.k - 1
    P = np.zeros((n, n))
    p = np.zeros(n)
    for w in states:
        src = mu_idx[ghost_parent.get(w, w)]
        is_real = w not in ghost_parent
        p[idx[w]] = (1 - delta) * mu.p[src] if is_real else delta / spread * mu.p[src]
        for tgt_word, tgt in mu_idx.items():
            mass = float(mu.P[src, tgt])
            if mass == 0.0:
                continue
            P[idx[w], idx[tgt_word]] = (1 - delta) * mass
            for g in variants[tgt_word][1:]:
                P[idx[w], idx[g]] = delta / spread * mass
    nu = MarkovMeasure(S.q, states, P, p, W)
    edges = []
    for u, v, _ in Gm.edges:
        for uw in variants[Gm.labels[u]]:
            for vw in variants[Gm.labels[v]]:
                edges.append((idx[uw], idx[vw], vw))
    D = LabeledDigraph(S.q, states, tuple(sorted(edges)))
    return EpsilonConstruction(D, nu, mu, params)


def markov_approximation(
    marginal: Mapping[Word, float],
    m: int,
    q: int,
    *,
    tol: float = 1e-12,
) -> MarkovMeasure:
    """Sliding chain of memory ``m - 1`` matching a length-`m` marginal.

    The marginal must be shift consistent (its two length-``m-1`` marginals
    agree within `tol`), which makes the derived chain stationary; among all
    shift-invariant measures with this marginal the result maximizes the
    entropy rate, and the construction is the identity on chains that are
    already Markov of memory ``m - 1``.
    """
    if m < 2:
        raise ValueError("the approximation needs windows of length at least 2")
    total = 0.0
    prefix: dict[Word, float] = {}
    suffix: dict[Word, float] = {}
    for w, pr in marginal.items():
        if len(w) != m:
            raise ValueError(f"marginal word {w} does not have length {m}")
        if pr < -tol:
            raise ValueError("marginal probabilities must be nonnegative")
        total += pr
        prefix[w[:-1]] = prefix.get(w[:-1], 0.0) + pr
        suffix[w[1:]] = suffix.get(w[1:], 0.0) + pr
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"marginal masses sum to {total!r}, not 1")
    for w in sorted(set(prefix) | set(suffix)):
        a, b = prefix.get(w, 0.0), suffix.get(w, 0.0)
        if abs(a - b) > tol:
            raise InconsistentMarginalError(w, a, b)
    states = tuple(sorted(w for w, pr in prefix.items() if pr > 0))
    idx = {w: i for i, w in enumerate(states)}
    n = len(states)
    P = np.zeros((n, n))
    p = np.array([prefix[w] for w in states])
    p = p / p.sum()
    for w, i in idx.items():
        for a in range(q):
            pr = marginal.get(w + (a,), 0.0)
            if pr <= 0:
                continue
            j = idx.get(w[1:] + (a,))
            if j is None:
                raise InconsistentMarginalError(w[1:] + (a,), 0.0, pr)
            P[i, j] = pr / prefix[w]
    P = P / P.sum(axis=1, keepdims=True)
    return MarkovMeasure(q, states, P, p, 1)


def map_decoder(
    M: MarkovMeasure, k: int, l: int, alpha: Word, beta: Word
) -> tuple[Word, float]:
    """Most probable middle k-word given the boundary pair, with its probability.

    Ties break toward the numerically smallest middle word.  When the measure
    is epsilon-recoverable with ``epsilon < 2 / q**k`` the returned
    probability is at least ``1 - epsilon / 2``.
    """
    if len(alpha) != l or len(beta) != l:
        raise ValueError("boundary words must have length l")
    marg = window_marginal(M, 2 * l + k)
    best: Word | None = None
    best_pr = 0.0
    total = 0.0
    for w in sorted(product(range(M.q), repeat=k)):
        pr = marg.get(alpha + w + beta, 0.0)
        total += pr
        if pr > best_pr:
            best, best_pr = w, pr
    if total <= 0.0 or best is None:
        raise ValueError(f"boundary pair ({alpha}, {beta}) has zero probability")
    return best, best_pr / total
