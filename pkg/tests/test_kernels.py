"""The compiled and pure kernel lanes must be indistinguishable."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from deidpipe import _pure

try:
    from deidpipe import _speedups
except ImportError:
    _speedups = None

needs_ext = pytest.mark.skipif(_speedups is None, reason="compiled extension not built")

texts = st.text(
    alphabet=st.characters(codec="utf-8", exclude_categories=("Cs",)), max_size=200
)


def test_tokenize_spans_basic():
    assert _pure.tokenize_spans("") == []
    assert _pure.tokenize_spans("   \n\t") == []
    spans = _pure.tokenize_spans("48-year-old")
    assert [(s, e) for s, e in spans] == [(0, 2), (2, 3), (3, 7), (7, 8), (8, 11)]


def test_levenshtein_known_values():
    assert _pure.levenshtein("", "") == 0
    assert _pure.levenshtein("abc", "") == 3
    assert _pure.levenshtein("kitten", "sitting") == 3
    assert _pure.levenshtein("Memphis", "Fresno") == 7


def test_scan_token_trie_longest_match():
    trie = {"a": {"": True, "b": {"": True, "c": {"": True}}}}
    assert _pure.scan_token_trie(["a", "b", "c"], trie) == [(0, 3)]
    assert _pure.scan_token_trie(["a", "b", "x", "a"], trie) == [(0, 2), (3, 1)]
    assert _pure.scan_token_trie(["x", "y"], trie) == []


@needs_ext
@given(texts)
def test_tokenize_spans_lanes_agree(text):
    assert _pure.tokenize_spans(text) == _speedups.tokenize_spans(text)


@needs_ext
@given(texts, texts)
def test_levenshtein_lanes_agree(a, b):
    assert _pure.levenshtein(a, b) == _speedups.levenshtein(a, b)


@needs_ext
@given(
    st.lists(st.sampled_from(["a", "b", "c", "d", "'", "."]), max_size=30),
    st.lists(
        st.lists(st.sampled_from(["a", "b", "c", "d"]), min_size=1, max_size=3),
        min_size=1,
        max_size=6,
    ),
)
def test_scan_lanes_agree(tokens, entries):
    trie = {}
    for entry in entries:
        node = trie
        for part in entry:
            node = node.setdefault(part, {})
        node[""] = True
    assert _pure.scan_token_trie(tokens, trie) == _speedups.scan_token_trie(tokens, trie)


@given(texts, st.text(max_size=40), st.text(max_size=40))
def test_levenshtein_is_a_metric(c, a, b):
    d = _pure.levenshtein
    assert d(a, b) == d(b, a)
    assert (d(a, b) == 0) == (a == b)
    assert d(a, b) <= d(a, c[:40]) + d(c[:40], b)
