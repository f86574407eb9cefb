import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from fedscan.alignment import AlignmentMap, pair_count, q_score, threshold_matrix
from fedscan.errors import InputError
from fedscan.graph import Subgraph


def sub(nid, nodes):
    return Subgraph(nid, frozenset(nodes), frozenset())


def test_threshold_inclusive():
    amap = AlignmentMap("o", {("a", "w1"): 0.80, ("b", "w2"): 0.79}, sigma=0.8)
    assert threshold_matrix(amap) == [("a", "w1")]
    assert threshold_matrix(AlignmentMap("o", {})) == []


def test_probability_range_checked():
    with pytest.raises(InputError):
        AlignmentMap("o", {("a", "w"): 1.2})
    with pytest.raises(InputError):
        AlignmentMap("o", {}, sigma=0.0)


def test_q_examples():
    amap = AlignmentMap("o", {("a", "w1"): 0.9, ("b", "w2"): 0.95, ("c", "w9"): 0.1})
    s = sub("o", ["a", "b", "c"])
    u = sub("public", ["w1", "w2", "w3", "w4"])
    assert q_score(s, u, amap) == pytest.approx(2 / 3 + 2 / 4)
    assert q_score(s, u, amap) == pytest.approx(1.166667, abs=1e-6)
    assert q_score(s, sub("public", ["w9"]), amap) == 0.0
    assert q_score(sub("o", []), u, amap) == 0.0
    perfect = AlignmentMap("o", {(f"p{i}", f"w{i}"): 1.0 for i in range(5)})
    assert q_score(sub("o", [f"p{i}" for i in range(5)]), sub("public", [f"w{i}" for i in range(5)]),
                   perfect) == pytest.approx(2.0)


def test_pairs_counted_raw():
    # one private node aligned to two public nodes contributes two pairs
    amap = AlignmentMap("o", {("a", "w1"): 0.9, ("a", "w2"): 0.9})
    assert pair_count(["a"], ["w1", "w2"], amap) == 2


@st.composite
def instances(draw):
    ns = draw(st.integers(1, 6))
    nu = draw(st.integers(1, 6))
    priv = [f"p{i}" for i in range(ns)]
    pub = [f"w{i}" for i in range(nu)]
    probs = draw(st.lists(st.floats(0, 1), min_size=ns * nu, max_size=ns * nu))
    entries = {(a, b): p for (a, b), p in zip([(a, b) for a in priv for b in pub], probs)}
    sigma = draw(st.floats(0.05, 1.0))
    return entries, priv, pub, sigma


@settings(max_examples=300, deadline=None)
@given(instances())
def test_q_matches_oracle_and_transpose(inst):
    entries, priv, pub, sigma = inst
    amap = AlignmentMap("o", entries, sigma)
    s, u = sub("o", priv), sub("public", pub)
    q = q_score(s, u, amap)
    assert q == pytest.approx(oracles.q(entries, priv, pub, sigma), rel=1e-12)
    assert q_score(sub("public", pub), sub("o", priv), amap.transpose()) == pytest.approx(q, rel=1e-12)


@settings(max_examples=300, deadline=None)
@given(instances(), st.data())
def test_p3_raising_entry_increases_q(inst, data):
    entries, priv, pub, sigma = inst
    below = [k for k, p in entries.items() if p < sigma]
    if not below:
        return
    key = data.draw(st.sampled_from(sorted(below)))
    before = q_score(sub("o", priv), sub("public", pub), AlignmentMap("o", entries, sigma))
    raised = dict(entries)
    raised[key] = sigma
    after = q_score(sub("o", priv), sub("public", pub), AlignmentMap("o", raised, sigma))
    assert after > before


@settings(max_examples=300, deadline=None)
@given(instances(), st.booleans())
def test_p4_unaligned_node_decreases_q(inst, grow_u):
    entries, priv, pub, sigma = inst
    amap = AlignmentMap("o", entries, sigma)
    s, u = sub("o", priv), sub("public", pub)
    q = q_score(s, u, amap)
    if q == 0.0:
        return
    if grow_u:
        bigger = q_score(s, sub("public", pub + ["w_new"]), amap)
    else:
        bigger = q_score(sub("o", priv + ["p_new"]), u, amap)
    assert bigger < q


def test_threshold_size_monotone_in_sigma():
    rng = np.random.default_rng(0)
    entries = {(f"p{i}", f"w{j}"): float(rng.random()) for i in range(10) for j in range(10)}
    sizes = [len(threshold_matrix(AlignmentMap("o", entries, s))) for s in np.linspace(0.01, 1.0, 40)]
    assert all(b <= a for a, b in zip(sizes, sizes[1:]))
