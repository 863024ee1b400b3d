"""Tests for pair loading, the relation graph, the leakage-free split,
and triplet assembly."""
import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from contrastmap.pairs import (ANTONYM, SYNONYM, LabeledPair, PairParseError,
                               PairSet, build_graph, build_triplets,
                               component_stats, load_pairs, split_pairs,
                               write_pairs)


def _syn(a, b):
    return LabeledPair(a, b, SYNONYM)


def _ant(a, b):
    return LabeledPair(a, b, ANTONYM)


def test_load_unordered_dedup():
    ps = load_pairs("a\tb\tsynonym\nb\ta\tsynonym")
    assert len(ps) == 1
    assert ps.dropped_duplicates == 1


def test_load_conflict_drops_both():
    ps = load_pairs("a\tb\tsynonym\na\tb\tantonym")
    assert len(ps) == 0
    assert ps.dropped_conflicts == 2


def test_load_comments_and_malformed():
    stream = "# header comment\na\tb\tsynonym\nbadline\nc\td\tANTONYM\nx\tx\tsynonym\n"
    ps = load_pairs(stream)
    assert [p.relation for p in ps] == [SYNONYM, ANTONYM]
    assert ps.skipped_lines == 2  # bad arity + self-pair


def test_load_empty_errors():
    with pytest.raises(PairParseError, match="no pairs"):
        load_pairs("# nothing here\n")


def test_write_round_trip():
    ps = load_pairs("a\tb\tsynonym\nc\td\tantonym")
    out = io.StringIO()
    write_pairs(ps, out)
    again = load_pairs(out.getvalue())
    assert list(again) == list(ps)


def test_build_graph_components():
    ps = PairSet(pairs=[_syn("a", "b"), _syn("b", "c"), _syn("d", "e")])
    graph = build_graph(ps)
    assign = graph.component_assignment
    assert graph.component_count == 2
    assert assign["a"] == assign["b"] == assign["c"]
    assert assign["d"] == assign["e"] != assign["a"]


def test_build_graph_disjoint_edges():
    graph = build_graph(PairSet(pairs=[_syn("a", "b"), _syn("c", "d")]))
    assert graph.component_count == 2
    sizes = {}
    for cid in graph.component_assignment.values():
        sizes[cid] = sizes.get(cid, 0) + 1
    assert sorted(sizes.values()) == [2, 2]


def test_component_stats():
    graph = build_graph(PairSet(pairs=[_syn("a", "b"), _syn("b", "c"), _syn("d", "e")]))
    stats = component_stats(graph)
    assert stats["component_count"] == 2
    assert stats["giant_share_of_pairs"] == pytest.approx(2 / 3)


def test_component_stats_single_edge():
    stats = component_stats(build_graph(PairSet(pairs=[_syn("a", "b")])))
    assert stats == {"component_count": 1, "giant_share_of_pairs": 1.0}


def test_split_hand_fixture_cycle():
    ps = PairSet(pairs=[_syn("a", "b"), _syn("c", "d"), _syn("e", "f"),
                        _syn("g", "h"), _syn("a", "x"), _syn("g", "y")])
    result = split_pairs(ps)
    assert [(p.left, p.right) for p in result.train] == [
        ("a", "b"), ("c", "d"), ("e", "f"), ("a", "x")]
    assert [(p.left, p.right) for p in result.test] == [("g", "h"), ("g", "y")]
    assert result.dropped_spanning == 0


def test_split_hand_fixture_spanning_drop():
    ps = PairSet(pairs=[_syn("a", "b"), _syn("c", "d"), _syn("e", "f"),
                        _syn("g", "h"), _syn("a", "g")])
    result = split_pairs(ps)
    assert result.dropped_spanning == 1
    assert ("a", "g", "dropped") in result.trace
    assert "a" in result.train.vocabulary()
    assert "g" in result.test.vocabulary()


def test_split_determinism():
    ps = PairSet(pairs=[_syn(f"w{i}", f"w{i + 100}") for i in range(50)])
    r1 = split_pairs(ps)
    r2 = split_pairs(ps)
    assert r1.trace == r2.trace
    assert list(r1.train) == list(r2.train)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 31 - 1), st.integers(100, 600), st.integers(30, 400))
def test_split_invariants_random(seed, n_pairs, vocab_size):
    rng = np.random.default_rng(seed)
    pairs = []
    seen = set()
    for _ in range(n_pairs):
        i, j = rng.integers(0, vocab_size, size=2)
        if i == j:
            continue
        key = (min(i, j), max(i, j))
        if key in seen:
            continue
        seen.add(key)
        rel = SYNONYM if rng.random() < 0.5 else ANTONYM
        pairs.append(LabeledPair(f"w{i}", f"w{j}", rel))
    if not pairs:
        return
    ps = PairSet(pairs=pairs)
    result = split_pairs(ps)
    assert not (result.train.vocabulary() & result.test.vocabulary())
    assert len(result.train) + len(result.test) + result.dropped_spanning == len(ps)


def test_split_independent_pairs_exact_ratio():
    ps = PairSet(pairs=[_syn(f"a{i}", f"b{i}") for i in range(400)])
    result = split_pairs(ps)
    assert len(result.train) == 300
    assert len(result.test) == 100


def test_build_triplets_cross_product():
    train = PairSet(pairs=[_syn("w", "s1"), _syn("w", "s2"), _ant("w", "a1")])
    triplets = build_triplets(train, seed=0)
    got = {(t.anchor, t.synonym, t.antonym) for t in triplets}
    assert got == {("w", "s1", "a1"), ("w", "s2", "a1")}


def test_build_triplets_cap_and_determinism():
    train = PairSet(pairs=[_syn("w", f"s{i}") for i in range(5)]
                    + [_ant("w", f"a{i}") for i in range(5)])
    t1 = build_triplets(train, cap_per_anchor=20, seed=3)
    t2 = build_triplets(train, cap_per_anchor=20, seed=3)
    anchored_w = [t for t in t1 if t.anchor == "w"]
    assert len(anchored_w) == 20  # 25 combinations sampled down to the cap
    assert t1 == t2


def test_build_triplets_no_antonyms():
    with pytest.raises(ValueError, match="no triplets"):
        build_triplets(PairSet(pairs=[_syn("a", "b"), _syn("b", "c")]), seed=0)


def test_build_triplets_membership():
    rng = np.random.default_rng(5)
    pairs = []
    for i in range(60):
        a, b = rng.integers(0, 30, size=2)
        if a == b:
            continue
        rel = SYNONYM if rng.random() < 0.5 else ANTONYM
        pairs.append(LabeledPair(f"w{a}", f"w{b}", rel))
    train = split_pairs(load_pairs(
        "".join(f"{p.left}\t{p.right}\t{p.relation}\n" for p in pairs))).train
    syn_keys = {p.key() for p in train.by_relation(SYNONYM)}
    ant_keys = {p.key() for p in train.by_relation(ANTONYM)}
    for t in build_triplets(train, seed=0):
        assert LabeledPair(t.anchor, t.synonym, SYNONYM).key() in syn_keys
        assert LabeledPair(t.anchor, t.antonym, ANTONYM).key() in ant_keys


def test_both_orientations_anchor():
    # s has a synonym (w) and an antonym (z), so s must anchor a triplet too
    train = PairSet(pairs=[_syn("w", "s"), _ant("w", "a"), _ant("s", "z")])
    anchors = {t.anchor for t in build_triplets(train, seed=0)}
    assert anchors == {"w", "s"}
