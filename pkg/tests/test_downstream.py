"""Tests for the downstream text-classification harness."""
import numpy as np
import pytest

from contrastmap.downstream import (TextDataset, embed_document,
                                    load_bundled_corpus, load_text_csv,
                                    run_downstream, tokenize)
from contrastmap.embeddings import EmbeddingTable
from contrastmap.synthetic import planted_world, sentiment_corpus
from contrastmap.training import concat_embeddings


def _table(entries):
    return EmbeddingTable.from_entries(
        [(w, np.asarray(v, dtype=float)) for w, v in entries])


def test_load_text_csv_basic():
    data = load_text_csv('text,label\n"good movie",1\n"bad movie",0\n')
    assert len(data) == 2
    assert data.records[0] == ("good movie", 1)


def test_load_text_csv_quoting():
    data = load_text_csv('text,label\n"says ""hi"", then leaves",1\nplain,0\n')
    assert data.records[0][0] == 'says "hi", then leaves'


def test_load_text_csv_missing_header():
    with pytest.raises(ValueError, match="header"):
        load_text_csv('body,sentiment\nx,1\n')
    with pytest.raises(ValueError, match="header"):
        load_text_csv("")


def test_load_text_csv_single_class():
    with pytest.raises(ValueError, match="both labels"):
        load_text_csv('text,label\na,1\nb,1\n')


def test_load_text_csv_skips_malformed():
    data = load_text_csv('text,label\na,1\nb,2\nc,0\n')
    assert len(data) == 2
    assert data.skipped_rows == 1


def test_tokenize():
    assert tokenize("It's FAST!") == ["it", "s", "fast"]
    assert tokenize("") == []
    assert tokenize("co-operate 2x") == ["co", "operate", "2x"]


def test_embed_document_mean():
    table = _table([("a", [2, 4]), ("b", [2, 0])])
    vec, oov = embed_document(table, ["a", "a"])
    assert np.allclose(vec, [2, 4]) and not oov
    table2 = _table([("a", [0, 2]), ("b", [2, 0])])
    vec, _ = embed_document(table2, ["a", "b"])
    assert np.allclose(vec, [1, 1])


def test_embed_document_all_oov():
    table = _table([("a", [1, 0])])
    vec, oov = embed_document(table, ["x", "y"])
    assert np.all(vec == 0.0) and oov


def test_embed_document_permutation_invariant():
    table = _table([("a", [1, 0]), ("b", [0, 1]), ("c", [2, 2])])
    v1, _ = embed_document(table, ["a", "b", "c"])
    v2, _ = embed_document(table, ["c", "a", "b"])
    assert np.array_equal(v1, v2)


@pytest.fixture(scope="module")
def corpus_setup():
    world = planted_world(n_words=200, dim=20, seed=1)
    docs = sentiment_corpus(world, n_documents=80, seed=2)
    data = TextDataset(records=docs, name="toy")
    dup = EmbeddingTable(dimension=world.table.dimension,
                         words=list(world.table.words),
                         matrix=world.table.matrix.copy(), source_label="dup")
    rawraw = concat_embeddings(world.table, dup)
    return world.table, rawraw, data


def test_run_downstream_deterministic(corpus_setup):
    raw, rawraw, data = corpus_setup
    r1 = run_downstream(raw, rawraw, data, seed=3)
    r2 = run_downstream(raw, rawraw, data, seed=3)
    assert r1 == r2
    assert r1.split_hash == r2.split_hash


def test_run_downstream_redundant_control(corpus_setup):
    raw, rawraw, data = corpus_setup
    result = run_downstream(raw, rawraw, data, seed=3)
    assert abs(result.accuracy_concat - result.accuracy_raw) <= 0.02 + 1e-9
    assert result.train_size + result.test_size == len(data)


def test_run_downstream_gain_recomputable(corpus_setup):
    raw, rawraw, data = corpus_setup
    result = run_downstream(raw, rawraw, data, seed=3)
    if result.accuracy_raw > 0:
        expected = (result.accuracy_concat - result.accuracy_raw) / result.accuracy_raw
        assert result.relative_gain == pytest.approx(expected)


def test_run_downstream_test_fraction_validated(corpus_setup):
    raw, rawraw, data = corpus_setup
    with pytest.raises(ValueError, match="test_fraction"):
        run_downstream(raw, rawraw, data, test_fraction=0.7)


def test_bundled_corpus_loads():
    data = load_bundled_corpus()
    assert len(data) == 200
    labels = {y for _, y in data.records}
    assert labels == {0, 1}
    # bundled corpus vocabulary matches the generator's word scheme
    tokens = tokenize(data.records[0][0])
    assert all(t.startswith("w") for t in tokens)
