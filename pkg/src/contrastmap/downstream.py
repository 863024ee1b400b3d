"""Downstream text-classification harness: mean-of-embeddings documents,
one logistic regression per embedding arm, shared split."""
from __future__ import annotations

import csv
import hashlib
import io
import re
from importlib import resources
from dataclasses import dataclass
from typing import IO, Iterable

import numpy as np

from .embeddings import EmbeddingTable
from .evaluation import predict_proba, train_linear

_TOKEN_SPLIT = re.compile(r"[^0-9a-z]+")


@dataclass
class TextDataset:
    records: list[tuple[str, int]]
    name: str = ""
    skipped_rows: int = 0

    def __len__(self) -> int:
        return len(self.records)


@dataclass
class DownstreamResult:
    dataset_name: str
    accuracy_raw: float
    accuracy_concat: float
    relative_gain: float
    train_size: int
    test_size: int
    oov_rate: float
    split_hash: str

    def to_dict(self) -> dict:
        return {"dataset": self.dataset_name,
                "accuracy_raw": self.accuracy_raw,
                "accuracy_concat": self.accuracy_concat,
                "relative_gain": self.relative_gain,
                "train_size": self.train_size,
                "test_size": self.test_size,
                "oov_rate": self.oov_rate,
                "split_hash": self.split_hash}


def load_text_csv(stream: str | IO[str], name: str = "") -> TextDataset:
    """Load a `text,label` CSV with standard double-quote escaping."""
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise ValueError("missing header") from None
    if [c.strip().lower() for c in header] != ["text", "label"]:
        raise ValueError("missing header: expected 'text,label'")
    records: list[tuple[str, int]] = []
    skipped = 0
    for row in reader:
        if len(row) != 2 or row[1].strip() not in ("0", "1"):
            skipped += 1
            continue
        records.append((row[0], int(row[1].strip())))
    labels = {y for _, y in records}
    if labels != {0, 1}:
        raise ValueError("dataset must contain both labels")
    return TextDataset(records=records, name=name, skipped_rows=skipped)


def load_bundled_corpus() -> TextDataset:
    """The 200-document synthetic sentiment corpus shipped with the package."""
    text = resources.files("contrastmap").joinpath(
        "data/sentiment_corpus.csv").read_text(encoding="utf-8")
    return load_text_csv(text, name="bundled-sentiment")


def tokenize(text: str) -> list[str]:
    """Lowercase, split on every non-alphanumeric character, drop empties."""
    return [t for t in _TOKEN_SPLIT.split(text.lower()) if t]


def embed_document(table: EmbeddingTable, tokens: Iterable[str]) -> tuple[np.ndarray, bool]:
    """Mean of in-vocabulary token vectors; (zero vector, True) when all OOV."""
    rows = []
    for tok in tokens:
        v = table.lookup(tok)
        if v is not None:
            rows.append(v)
    if not rows:
        return np.zeros(table.dimension), True
    return np.mean(rows, axis=0), False


def _stratified_split(labels: np.ndarray, test_fraction: float,
                      seed: int) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed)
    train_idx: list[int] = []
    test_idx: list[int] = []
    for cls in (0, 1):
        idx = np.nonzero(labels == cls)[0]
        perm = idx[rng.permutation(len(idx))]
        n_test = int(round(len(idx) * test_fraction))
        test_idx.extend(perm[:n_test].tolist())
        train_idx.extend(perm[n_test:].tolist())
    return np.array(sorted(train_idx)), np.array(sorted(test_idx))


def run_downstream(raw: EmbeddingTable, concat: EmbeddingTable,
                   data: TextDataset, test_fraction: float = 0.25,
                   seed: int = 0,
                   linear_config: dict | None = None) -> DownstreamResult:
    """Train one linear classifier per arm on the same stratified split."""
    if not (0.0 < test_fraction < 0.5):
        raise ValueError("test_fraction must be in (0, 0.5)")
    labels = np.array([y for _, y in data.records])
    token_lists = [tokenize(text) for text, _ in data.records]
    total_tokens = sum(len(t) for t in token_lists)
    oov_tokens = sum(1 for toks in token_lists for t in toks if t not in raw)
    oov_rate = oov_tokens / total_tokens if total_tokens else 0.0

    train_idx, test_idx = _stratified_split(labels, test_fraction, seed)
    for side in (train_idx, test_idx):
        if len(set(labels[side].tolist())) < 2:
            raise ValueError("degenerate split: one side is single-class")
    split_hash = hashlib.sha256(
        (",".join(map(str, train_idx)) + "|" + ",".join(map(str, test_idx))).encode()
    ).hexdigest()

    accuracies = {}
    for arm, table in (("raw", raw), ("concat", concat)):
        X = np.array([embed_document(table, toks)[0] for toks in token_lists])
        model = train_linear(X[train_idx], labels[train_idx], linear_config)
        p = predict_proba(model, X[test_idx])
        pred = (p >= 0.5).astype(int)
        accuracies[arm] = float(np.mean(pred == labels[test_idx]))

    acc_raw = accuracies["raw"]
    acc_concat = accuracies["concat"]
    gain = (acc_concat - acc_raw) / acc_raw if acc_raw > 0 else 0.0
    return DownstreamResult(dataset_name=data.name,
                            accuracy_raw=acc_raw, accuracy_concat=acc_concat,
                            relative_gain=gain,
                            train_size=len(train_idx), test_size=len(test_idx),
                            oov_rate=oov_rate, split_hash=split_hash)
