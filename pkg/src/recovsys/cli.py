"""Command-line front end for constructions, verification, measures, reports.

Exit codes: 0 on success or PASS, 1 on verification FAIL, 2 on usage or
domain errors.  All numeric output is printed with 17 significant digits and
entropy values name their logarithm base, so identical inputs produce
byte-identical output.
"""

from __future__ import annotations

import functools
import sys
from pathlib import Path

import click

from . import measures, serialization, storage, systems
from .graphs import adjacency, de_bruijn, essential_subgraph, is_strongly_connected
from .serialization import fmt


def _domain_guard(f):
    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except (ValueError, KeyError, OSError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)

    return wrapper


_threads_option = click.option(
    "--threads",
    type=click.IntRange(min=1),
    default=1,
    show_default=True,
    help="Worker bound; computations are deterministic regardless.",
)


@click.group()
def main() -> None:
    """Recoverable-system constructions, verification, and measures."""


@main.group()
def construct() -> None:
    """Build presentations and recovery tables."""


def _emit_system(S: systems.RecoverableSystem, out_graph, out_table) -> None:
    cap = systems.capacity(S)
    click.echo(f"provenance {S.provenance}")
    click.echo(f"capacity {fmt(cap)} (log base {S.q})")
    if out_graph:
        serialization.save_graph(S.presentation, out_graph)
        click.echo(f"wrote graph {out_graph}")
    if out_table:
        Path(out_table).write_text(
            serialization.recovery_table_to_text(S.recovery_table) + "\n"
        )
        click.echo(f"wrote recovery table {out_table}")


@construct.command("debruijn")
@click.option("--q", type=int, required=True)
@click.option("--d", type=int, default=2, show_default=True)
@click.option("--out", type=click.Path(), default=None, help="Graph file.")
@click.option("--matrix", type=click.Path(), default=None, help="Adjacency CSV.")
@_threads_option
@_domain_guard
def construct_debruijn(q, d, out, matrix, threads):
    """De Bruijn graph of order d over [q] (presents the full shift)."""
    G = de_bruijn(q, d)
    click.echo(f"vertices {G.n_vertices} edges {len(G.edges)}")
    click.echo(f"capacity {fmt(systems.system_capacity(G))} (log base {q})")
    if out:
        serialization.save_graph(G, out)
        click.echo(f"wrote graph {out}")
    if matrix:
        serialization.save_matrix_csv(adjacency(G), matrix)
        click.echo(f"wrote matrix {matrix}")


@construct.command("truncated")
@click.option("--q", type=int, required=True)
@click.option("--r", type=int, default=None, help="Expected deletion count; cross-checked.")
@click.option("--out-graph", type=click.Path(), default=None)
@click.option("--out-table", type=click.Path(), default=None)
@_threads_option
@_domain_guard
def construct_truncated(q, r, out_graph, out_table, threads):
    """(1,1)-recoverable system over q letters by de Bruijn truncation."""
    t, derived_r = systems.truncation_params(q)
    if r is not None and r != derived_r:
        raise ValueError(f"q={q} implies r={derived_r} (t={t}), not r={r}")
    _emit_system(systems.truncated_debruijn_system(q), out_graph, out_table)


@construct.command("marker")
@click.option("--q", type=int, required=True)
@click.option("--k", type=int, default=1, show_default=True)
@click.option("--out-graph", type=click.Path(), default=None)
@click.option("--out-table", type=click.Path(), default=None)
@_threads_option
@_domain_guard
def construct_marker(q, k, out_graph, out_table, threads):
    """(k, k+1)-recoverable marker-block system over [q]."""
    _emit_system(systems.marker_system(q, k), out_graph, out_table)


@construct.command("edgecover")
@click.option("--t", type=int, required=True)
@click.option("--mode", type=click.Choice(["square", "power"]), required=True)
@click.option("--k", type=int, default=1, show_default=True)
@click.option("--l", type=int, default=1, show_default=True)
@click.option("--out-graph", type=click.Path(), default=None)
@click.option("--out-table", type=click.Path(), default=None)
@_threads_option
@_domain_guard
def construct_edgecover(t, mode, k, l, out_graph, out_table, threads):
    """Edge-covering system: (l,l) over t^2 letters or (k,1) over t^(k+1)."""
    _emit_system(systems.edge_cover_system(t, mode, k=k, l=l), out_graph, out_table)


@construct.command("recursive")
@click.option("--q", type=int, required=True, help="Target alphabet size.")
@click.option("--out-graph", type=click.Path(), default=None)
@click.option("--out-table", type=click.Path(), default=None)
@_threads_option
@_domain_guard
def construct_recursive(q, out_graph, out_table, threads):
    """Chain loop extensions from the largest same-parity square below q."""
    seed = None
    for s in range(2, q + 1):
        if s * s <= q and (q - s * s) % 2 == 0:
            seed = s
    if seed is None:
        raise ValueError(f"no perfect square of matching parity below q={q}")
    S = systems.edge_cover_system(seed, "square", l=1)
    while S.q < q:
        S = systems.recursive_extend(S)
    _emit_system(S, out_graph, out_table)


@main.group()
def verify() -> None:
    """Check recoverability of systems and repairability of cycle codes."""


@verify.command("system")
@click.option("--graph", "graph_path", type=click.Path(exists=True), required=True)
@click.option("--k", type=int, required=True)
@click.option("--l", type=int, required=True)
@click.option("--out-table", type=click.Path(), default=None)
@_threads_option
def verify_system(graph_path, k, l, out_table, threads):
    """PASS iff the graph presents a (k, l)-recoverable system."""
    try:
        G = serialization.load_graph(graph_path)
        res = systems.verify_recoverable(G, k, l)
    except (ValueError, KeyError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    if not res.ok:
        a, b, w1, w2 = res.conflict
        click.echo(
            "FAIL boundary "
            f"({serialization.word_to_text(a)}, {serialization.word_to_text(b)}) "
            f"keeps middles {serialization.word_to_text(w1)} and "
            f"{serialization.word_to_text(w2)}"
        )
        sys.exit(1)
    click.echo(f"PASS {len(res.table)} boundary pairs")
    if out_table:
        Path(out_table).write_text(
            serialization.recovery_table_to_text(res.table) + "\n"
        )


@verify.command("storage")
@click.option("--code", "code_path", type=click.Path(exists=True), required=True)
@click.option("--table", "table_path", type=click.Path(exists=True), required=True)
@click.option("--q", type=int, required=True)
@click.option("--n", type=int, required=True)
@_threads_option
def verify_storage(code_path, table_path, q, n, threads):
    """PASS iff every codeword symbol is repaired by the shared table."""
    try:
        words = serialization.codewords_from_text(Path(code_path).read_text())
        table = serialization.recovery_table_from_text(Path(table_path).read_text())
        code = storage.CycleStorageCode(n, q, words, table)
    except (ValueError, KeyError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    res = storage.verify_storage_code(code)
    if not res.ok:
        w, i = res.violation
        click.echo(f"FAIL codeword {serialization.word_to_text(w)} position {i}")
        sys.exit(1)
    click.echo(f"PASS {len(words)} codewords, rate {fmt(code.rate())} (log base {q})")


@main.group()
def measure() -> None:
    """Max-entropy and entropy-relaxed Markov measures."""


@measure.command("maxent")
@click.option("--graph", "graph_path", type=click.Path(exists=True), required=True)
@click.option("--out", type=click.Path(), default=None)
@_threads_option
@_domain_guard
def measure_maxent(graph_path, out, threads):
    """Max-entropy measure of the essential part of a presentation."""
    G = essential_subgraph(serialization.load_graph(graph_path))
    if not is_strongly_connected(G) or not G.edges:
        raise ValueError("the essential subgraph must be strongly connected")
    M = measures.max_entropy_measure(G)
    click.echo(f"h {fmt(measures.entropy_rate(M))} (log base {M.log_base})")
    if out:
        serialization.save_measure(M, out)
        click.echo(f"wrote measure {out}")


@measure.command("epsilon")
@click.option("--q", type=int, required=True)
@click.option("--k", type=int, default=1, show_default=True)
@click.option("--l", type=int, default=1, show_default=True)
@click.option("--eps", type=float, required=True)
@click.option(
    "--graph",
    "graph_path",
    type=click.Path(exists=True),
    default=None,
    help="Presentation of the base system; defaults to the max-capacity search.",
)
@click.option("--out-measure", type=click.Path(), default=None)
@click.option("--out-graph", type=click.Path(), default=None)
@click.option("--tol", type=float, default=1e-10, show_default=True)
@_threads_option
@_domain_guard
def measure_epsilon(q, k, l, eps, graph_path, out_measure, out_graph, tol, threads):
    """Entropy-epsilon measure built from a recoverable system."""
    if graph_path:
        G = serialization.load_graph(graph_path)
        res = systems.verify_recoverable(G, k, l)
        if not res.ok:
            raise ValueError(f"input graph is not (k={k}, l={l})-recoverable")
        S = systems.RecoverableSystem(q, k, l, G, dict(res.table), f"file:{graph_path}")
    else:
        _, S = systems.exhaustive_max_capacity(q, k, l)
    built = measures.epsilon_construction(S, eps)
    h_mu = measures.entropy_rate(built.base_measure)
    h_nu = measures.entropy_rate(built.measure)
    report = measures.window_conditional_entropy(built.measure, k, l)
    base = built.measure.log_base
    click.echo(f"delta {fmt(built.params.delta)}")
    click.echo(f"h_mu {fmt(h_mu)} (log base {base})")
    click.echo(f"h_nu {fmt(h_nu)} (log base {base})")
    click.echo(f"gain {fmt(h_nu - h_mu)} (log base {base})")
    click.echo(f"max_window_entropy {fmt(report.max_entropy)} (log base {q})")
    click.echo(
        f"epsilon_recoverable {measures.is_epsilon_recoverable(built.measure, eps, k, l, tol=tol)}"
    )
    if out_measure:
        serialization.save_measure(built.measure, out_measure)
        click.echo(f"wrote measure {out_measure}")
    if out_graph:
        serialization.save_graph(built.graph, out_graph)
        click.echo(f"wrote graph {out_graph}")


@main.group()
def report() -> None:
    """Capacity-bound tables."""


def _parse_q_range(qrange: str) -> tuple[int, int]:
    if ".." in qrange:
        lo_s, hi_s = qrange.split("..", 1)
        lo, hi = int(lo_s), int(hi_s)
    else:
        lo = hi = int(qrange)
    if lo > hi or lo < 2:
        raise ValueError(f"bad alphabet range {qrange!r}")
    return lo, hi


def bounds_rows(lo: int, hi: int) -> list[tuple[int, float | None, float | None, float]]:
    rows = []
    for q in range(lo, hi + 1):
        try:
            eq11 = systems.capacity_formula(q)
        except ValueError:
            eq11 = None
        rec = systems.recursive_chain_bound(q)
        rows.append((q, eq11, rec, 0.5))
    return rows


def bounds_csv(rows) -> str:
    lines = ["q,eq11_bound,recursive_bound,upper_bound"]
    for q, eq11, rec, upper in rows:
        cells = [
            str(q),
            fmt(eq11) if eq11 is not None else "",
            fmt(rec) if rec is not None else "",
            fmt(upper),
        ]
        lines.append(",".join(cells))
    return "\n".join(lines)


@report.command("bounds")
@click.option("--q", "q_spec", type=str, required=True, help="Single q or a..b range.")
@click.option("--out", type=click.Path(), default=None)
@click.option(
    "--format",
    "fmt_kind",
    type=click.Choice(["csv", "table"]),
    default="csv",
    show_default=True,
)
@click.option("--seed-table", is_flag=True, help="Force the CSV bound table.")
@_threads_option
@_domain_guard
def report_bounds(q_spec, out, fmt_kind, seed_table, threads):
    """Lower bounds on (1,1) capacity per alphabet size, against the 1/2 cap."""
    lo, hi = _parse_q_range(q_spec)
    rows = bounds_rows(lo, hi)
    if seed_table:
        fmt_kind = "csv"
    if fmt_kind == "csv":
        text = bounds_csv(rows)
    else:
        lines = [f"{'q':>4} {'eq11_bound':>22} {'recursive_bound':>22} {'upper':>6}"]
        for q, eq11, rec, upper in rows:
            lines.append(
                f"{q:>4} "
                f"{(fmt(eq11) if eq11 is not None else '-'):>22} "
                f"{(fmt(rec) if rec is not None else '-'):>22} "
                f"{fmt(upper):>6}"
            )
        text = "\n".join(lines)
    if out:
        Path(out).write_text(text + "\n")
        click.echo(f"wrote {out}")
    else:
        click.echo(text)


if __name__ == "__main__":
    main()
