"""Word-vector tables: text-format parsing, serialization, lookup and cosine distance.

The on-disk format is the plain text layout shared by the GloVe/FastText
distributions: one word per line followed by its vector components, with an
optional ``count dim`` header line. Only this text format is supported; the
binary Word2Vec format must be converted externally.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator

import numpy as np

COSINE_EPS = 1e-12


class EmbeddingParseError(ValueError):
    """Raised when a vector stream cannot be parsed at all."""


@dataclass
class EmbeddingTable:
    """Immutable word -> dense vector table of fixed dimension.

    Vectors are stored row-wise in a single float64 matrix; ``words[i]``
    owns ``matrix[i]``. Lookup is exact and case-sensitive.
    """

    dimension: int
    words: list[str]
    matrix: np.ndarray
    source_label: str = ""
    duplicate_warnings: int = 0
    skipped_rows: int = 0
    _index: dict[str, int] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if not self._index:
            self._index = {w: i for i, w in enumerate(self.words)}

    @classmethod
    def from_entries(cls, entries: Iterable[tuple[str, np.ndarray]],
                     source_label: str = "") -> "EmbeddingTable":
        words = []
        rows = []
        for word, vec in entries:
            words.append(word)
            rows.append(np.asarray(vec, dtype=np.float64))
        if not rows:
            raise EmbeddingParseError("no vectors")
        matrix = np.vstack(rows)
        return cls(dimension=matrix.shape[1], words=words, matrix=matrix,
                   source_label=source_label)

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self._index

    def __iter__(self) -> Iterator[str]:
        return iter(self.words)

    def lookup(self, word: str) -> np.ndarray | None:
        """Exact-match vector for ``word``, or None if absent."""
        i = self._index.get(word)
        if i is None:
            return None
        return self.matrix[i]

    def items(self) -> Iterator[tuple[str, np.ndarray]]:
        for i, w in enumerate(self.words):
            yield w, self.matrix[i]


def _as_lines(stream: str | IO[str] | Iterable[str]) -> Iterable[str]:
    if isinstance(stream, str):
        return io.StringIO(stream)
    return stream


def _is_header(tokens: list[str]) -> bool:
    if len(tokens) != 2:
        return False
    return all(t.isdigit() for t in tokens)


def parse_embedding_text(stream: str | IO[str] | Iterable[str],
                         source_label: str = "") -> EmbeddingTable:
    """Parse a text vector stream into an :class:`EmbeddingTable`.

    An optional first line ``count dim`` (two bare integers) is skipped.
    The dimension is inferred from the first content line. Rows with wrong
    arity, non-finite values or zero norm are skipped and counted; duplicate
    words keep the first occurrence and bump ``duplicate_warnings``.
    """
    words: list[str] = []
    rows: list[np.ndarray] = []
    index: dict[str, int] = {}
    duplicates = 0
    skipped = 0
    dim: int | None = None
    first_line = True

    for raw_line in _as_lines(stream):
        line = raw_line.rstrip("\r\n")
        tokens = line.split()
        if first_line and _is_header(tokens):
            first_line = False
            continue
        first_line = False
        if not tokens:
            continue
        if dim is None:
            if len(tokens) < 2:
                raise EmbeddingParseError("bad format")
            try:
                vec = np.array([float(t) for t in tokens[1:]], dtype=np.float64)
            except ValueError as exc:
                raise EmbeddingParseError("bad format") from exc
            dim = len(tokens) - 1
            if not np.all(np.isfinite(vec)) or not np.any(vec):
                skipped += 1
                dim = None  # first row rejected; keep inferring on next row
                continue
            word = tokens[0]
            index[word] = len(words)
            words.append(word)
            rows.append(vec)
            continue
        if len(tokens) != dim + 1:
            skipped += 1
            continue
        try:
            vec = np.array([float(t) for t in tokens[1:]], dtype=np.float64)
        except ValueError:
            skipped += 1
            continue
        if not np.all(np.isfinite(vec)) or np.linalg.norm(vec) == 0.0:
            skipped += 1
            continue
        word = tokens[0]
        if word in index:
            duplicates += 1
            continue
        index[word] = len(words)
        words.append(word)
        rows.append(vec)

    if not rows:
        raise EmbeddingParseError("no vectors")
    table = EmbeddingTable(dimension=dim, words=words, matrix=np.vstack(rows),
                           source_label=source_label,
                           duplicate_warnings=duplicates, skipped_rows=skipped)
    return table


def _render_value(v: float) -> str:
    # repr() is the shortest round-trip representation in Python 3;
    # strip a trailing ".0" so integral values print as plain integers.
    s = repr(float(v))
    if s.endswith(".0"):
        s = s[:-2]
    return s


def write_embedding_text(table: EmbeddingTable, stream: IO[str]) -> int:
    """Write ``table`` in the text format with a ``count dim`` header.

    Returns the number of characters written. Values round-trip exactly
    through :func:`parse_embedding_text`.
    """
    written = 0
    header = f"{len(table)} {table.dimension}\n"
    stream.write(header)
    written += len(header)
    for word, vec in table.items():
        line = word + " " + " ".join(_render_value(v) for v in vec) + "\n"
        stream.write(line)
        written += len(line)
    return written


def cosine_distance(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine distance 1 - cos(u, v), in [0, 2].

    Raises for zero-norm inputs ("degenerate vector") and dimension
    mismatch; this is the exact metric, with no epsilon guard.
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ValueError("degenerate vector")
    d = 1.0 - float(np.dot(u, v)) / (nu * nv)
    return min(max(d, 0.0), 2.0)


def pairwise_cosine_distances(U: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Row-wise cosine distances between two aligned (n, d) matrices."""
    U = np.asarray(U, dtype=np.float64)
    V = np.asarray(V, dtype=np.float64)
    nu = np.linalg.norm(U, axis=1)
    nv = np.linalg.norm(V, axis=1)
    if np.any(nu == 0.0) or np.any(nv == 0.0):
        raise ValueError("degenerate vector")
    d = 1.0 - np.sum(U * V, axis=1) / (nu * nv)
    return np.clip(d, 0.0, 2.0)
