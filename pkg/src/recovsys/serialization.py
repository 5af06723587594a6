"""File formats: graphs, matrices, forbidden sets, measures, and codes.

Words are written as digit strings with digits beyond 9 encoded as lowercase
letters (alphabets up to size 36).  Floating-point values are written with 17
significant digits, which round-trips doubles bit-identically.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .graphs import LabeledDigraph, Word
from .measures import MarkovMeasure
from .systems import ForbiddenSet, RecoverableSystem

DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"


def word_to_text(w: Word) -> str:
    if any(c >= len(DIGITS) for c in w):
        raise ValueError("text encoding supports alphabets up to size 36")
    return "".join(DIGITS[c] for c in w)


def text_to_word(s: str) -> Word:
    try:
        return tuple(DIGITS.index(c) for c in s)
    except ValueError:
        raise ValueError(f"{s!r} is not a digit-string word") from None


def fmt(x: float) -> str:
    return format(x, ".17g")


def graph_to_json(G: LabeledDigraph) -> str:
    doc = {
        "q": G.q,
        "label_len": G.label_len,
        "vertices": [
            {"id": i, "label": word_to_text(w)} for i, w in enumerate(G.labels)
        ],
        "edges": [
            {"from": u, "to": v, "label": word_to_text(lab)}
            for u, v, lab in G.edges
        ],
    }
    return json.dumps(doc, indent=1)


def graph_from_json(text: str) -> LabeledDigraph:
    doc = json.loads(text)
    labels_by_id = {int(v["id"]): text_to_word(v["label"]) for v in doc["vertices"]}
    labels = tuple(labels_by_id[i] for i in range(len(labels_by_id)))
    edges = tuple(
        (int(e["from"]), int(e["to"]), text_to_word(e["label"]))
        for e in doc["edges"]
    )
    G = LabeledDigraph(int(doc["q"]), labels, edges)
    if G.label_len != int(doc["label_len"]):
        raise ValueError("label_len field disagrees with the vertex labels")
    return G


def save_graph(G: LabeledDigraph, path: str | Path) -> None:
    Path(path).write_text(graph_to_json(G) + "\n")


def load_graph(path: str | Path) -> LabeledDigraph:
    return graph_from_json(Path(path).read_text())


def matrix_to_csv(A: np.ndarray) -> str:
    return "\n".join(",".join(str(int(x)) for x in row) for row in np.asarray(A))


def save_matrix_csv(A: np.ndarray, path: str | Path) -> None:
    Path(path).write_text(matrix_to_csv(A) + "\n")


def forbidden_to_text(F: ForbiddenSet) -> str:
    lines = [f"{F.q} {F.k} {F.l}"]
    lines.extend(word_to_text(w) for w in sorted(F.words))
    return "\n".join(lines)


def forbidden_from_text(text: str) -> ForbiddenSet:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    q, k, l = (int(x) for x in lines[0].split())
    words = frozenset(text_to_word(ln.strip()) for ln in lines[1:])
    return ForbiddenSet(q, k, l, words)


def save_forbidden(F: ForbiddenSet, path: str | Path) -> None:
    Path(path).write_text(forbidden_to_text(F) + "\n")


def load_forbidden(path: str | Path) -> ForbiddenSet:
    return forbidden_from_text(Path(path).read_text())


def recovery_table_to_text(table: Mapping[tuple[Word, Word], Word]) -> str:
    lines = []
    for (alpha, beta), w in sorted(table.items()):
        lines.append(f"{word_to_text(alpha)} {word_to_text(beta)} -> {word_to_text(w)}")
    return "\n".join(lines)


def recovery_table_from_text(text: str) -> dict[tuple[Word, Word], Word]:
    table: dict[tuple[Word, Word], Word] = {}
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln:
            continue
        lhs, rhs = ln.split("->")
        alpha_s, beta_s = lhs.split()
        table[(text_to_word(alpha_s), text_to_word(beta_s))] = text_to_word(rhs.strip())
    return table


def save_system(S: RecoverableSystem, graph_path: str | Path, table_path: str | Path) -> None:
    save_graph(S.presentation, graph_path)
    Path(table_path).write_text(recovery_table_to_text(S.recovery_table) + "\n")


def measure_to_text(M: MarkovMeasure) -> str:
    lines = [
        f"q {M.q}",
        f"emit {M.emit}",
        f"log_base {M.log_base}",
        f"states {len(M.states)}",
    ]
    lines.extend(word_to_text(w) for w in M.states)
    lines.append("P")
    for row in M.P:
        lines.append(",".join(fmt(x) for x in row))
    lines.append("p")
    lines.append(",".join(fmt(x) for x in M.p))
    return "\n".join(lines)


def measure_from_text(text: str) -> MarkovMeasure:
    lines = text.splitlines()
    header = {}
    pos = 0
    for _ in range(4):
        key, value = lines[pos].split()
        header[key] = int(value)
        pos += 1
    n = header["states"]
    states = tuple(text_to_word(lines[pos + i].strip()) for i in range(n))
    pos += n
    if lines[pos].strip() != "P":
        raise ValueError("malformed measure file: missing P block")
    pos += 1
    P = np.array(
        [[float(x) for x in lines[pos + i].split(",")] for i in range(n)]
    )
    pos += n
    if lines[pos].strip() != "p":
        raise ValueError("malformed measure file: missing p row")
    p = np.array([float(x) for x in lines[pos + 1].split(",")])
    return MarkovMeasure(header["q"], states, P, p, header["emit"])


def save_measure(M: MarkovMeasure, path: str | Path) -> None:
    Path(path).write_text(measure_to_text(M) + "\n")


def load_measure(path: str | Path) -> MarkovMeasure:
    return measure_from_text(Path(path).read_text())


def codewords_to_text(words: Iterable[Word]) -> str:
    return "\n".join(word_to_text(w) for w in sorted(words))


def codewords_from_text(text: str) -> frozenset[Word]:
    return frozenset(
        text_to_word(ln.strip()) for ln in text.splitlines() if ln.strip()
    )
