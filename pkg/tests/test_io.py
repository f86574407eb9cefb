import logging

import pytest

from fedscan import io
from fedscan.alignment import AlignmentMap
from fedscan.errors import InputError
from fedscan.graph import AttributedNetwork


def test_edge_list_round_trip(tmp_path):
    net = AttributedNetwork.build("g", [("b", "a"), ("c", "b"), ("a", "d")],
                                  {"a": 0.1, "b": 0.25, "c": 1.0, "d": 0.3333333333333333})
    io.write_edge_list(net, tmp_path / "e.tsv")
    io.write_pvalues(net.pvalues, tmp_path / "p.tsv")
    again = io.load_network("g", tmp_path / "e.tsv", tmp_path / "p.tsv")
    assert again == net
    io.write_edge_list(again, tmp_path / "e2.tsv")
    io.write_pvalues(again.pvalues, tmp_path / "p2.tsv")
    assert (tmp_path / "e.tsv").read_bytes() == (tmp_path / "e2.tsv").read_bytes()
    assert (tmp_path / "p.tsv").read_bytes() == (tmp_path / "p2.tsv").read_bytes()


def test_comments_and_defaults(tmp_path):
    (tmp_path / "e.tsv").write_text("# header\na\tb\n\nb\tc  # trailing\n")
    (tmp_path / "p.tsv").write_text("a\t0.01\n")
    net = io.load_network("g", tmp_path / "e.tsv", tmp_path / "p.tsv")
    assert net.nodes == {"a", "b", "c"}
    assert net.pvalues == {"a": 0.01, "b": 1.0, "c": 1.0}


def test_directed_input_symmetrized(tmp_path, caplog):
    (tmp_path / "e.tsv").write_text("a\tb\nb\ta\n")
    with caplog.at_level(logging.WARNING):
        nodes, edges = io.read_edge_list(tmp_path / "e.tsv")
    assert edges == {("a", "b")}
    assert "symmetrized" in caplog.text


@pytest.mark.parametrize("text,fname", [
    ("a\tb\tc\n", "e.tsv"),
    ("a\ta\n", "e.tsv"),
])
def test_bad_edge_lists(tmp_path, text, fname):
    (tmp_path / fname).write_text(text)
    with pytest.raises(InputError, match=":1:"):
        io.read_edge_list(tmp_path / fname)


@pytest.mark.parametrize("text", ["a\t0\n", "a\tx\n", "a\t1.5\n", "a\n", "a\t0.1\na\t0.2\n"])
def test_bad_pvalues(tmp_path, text):
    (tmp_path / "p.tsv").write_text(text)
    with pytest.raises(InputError):
        io.read_pvalues(tmp_path / "p.tsv")


def test_missing_file(tmp_path):
    with pytest.raises(InputError, match="not found"):
        io.read_edge_list(tmp_path / "none.tsv")


def test_alignment_round_trip(tmp_path):
    amap = AlignmentMap("o", {("a", "w1"): 0.95, ("b", "w2"): 0.05, ("a", "w3"): 0.8})
    io.write_alignment(amap, tmp_path / "al.tsv")
    assert io.read_alignment(tmp_path / "al.tsv", "o", 0.8) == amap
    (tmp_path / "bad.tsv").write_text("a\tw1\t1.3\n")
    with pytest.raises(InputError, match="outside"):
        io.read_alignment(tmp_path / "bad.tsv", "o", 0.8)


def test_history_round_trip(tmp_path):
    hist = {"a": [1.0, 2.0, 3.5], "b": [0.0, 0.0, 4.0]}
    io.write_history(hist, tmp_path / "h.csv")
    assert (tmp_path / "h.csv").read_text().splitlines()[0] == "node,t1,t2,t3"
    assert io.read_history(tmp_path / "h.csv") == hist
    (tmp_path / "bad.csv").write_text("node,t1,t2\na,1\n")
    with pytest.raises(InputError, match=":2:"):
        io.read_history(tmp_path / "bad.csv")
    (tmp_path / "nohead.csv").write_text("x,1,2\n")
    with pytest.raises(InputError):
        io.read_history(tmp_path / "nohead.csv")
