"""Pure-Python implementations of the hot kernels.

Behavioral twin of ``_speedups.pyx``; both lanes must produce identical
results on identical inputs (enforced by tests). Keep the two files in sync.
"""

from __future__ import annotations

BACKEND = "pure"


def tokenize_spans(text: str) -> list[tuple[int, int]]:
    """Split text into (start, end) spans: maximal alphanumeric runs,
    single-character spans for every other non-whitespace character."""
    spans = []
    n = len(text)
    i = 0
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isalnum():
            j = i + 1
            while j < n and text[j].isalnum():
                j += 1
            spans.append((i, j))
            i = j
        else:
            spans.append((i, i + 1))
            i += 1
    return spans


def levenshtein(a: str, b: str) -> int:
    """Classic edit distance (insert/delete/substitute, unit costs)."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    cur = [0] * (len(b) + 1)
    for i in range(1, len(a) + 1):
        cur[0] = i
        ca = a[i - 1]
        for j in range(1, len(b) + 1):
            cost = 0 if ca == b[j - 1] else 1
            d = prev[j - 1] + cost
            if prev[j] + 1 < d:
                d = prev[j] + 1
            if cur[j - 1] + 1 < d:
                d = cur[j - 1] + 1
            cur[j] = d
        prev, cur = cur, prev
    return prev[len(b)]


def scan_token_trie(tokens: list[str], trie: dict) -> list[tuple[int, int]]:
    """Greedy longest-match of token sequences against a nested-dict trie.

    ``trie`` maps token → subtrie; the empty-string key marks entry ends.
    Returns (start_index, token_count) pairs; after a match the scan resumes
    past it, so matches from one trie never overlap each other.
    """
    matches = []
    n = len(tokens)
    i = 0
    while i < n:
        node = trie
        best = 0
        j = i
        while j < n:
            node = node.get(tokens[j])
            if node is None:
                break
            j += 1
            if "" in node:
                best = j - i
        if best > 0:
            matches.append((i, best))
            i += best
        else:
            i += 1
    return matches
