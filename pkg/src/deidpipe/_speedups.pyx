# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twin of ``_pure.py``; same functions, typed inner loops.

Any behavioral change here must be mirrored in ``_pure.py`` — the test suite
diffs the two lanes on random inputs.
"""

BACKEND = "compiled"


def tokenize_spans(str text):
    """Split text into (start, end) spans: maximal alphanumeric runs,
    single-character spans for every other non-whitespace character."""
    cdef Py_ssize_t i = 0, j, n = len(text)
    cdef Py_UCS4 ch
    spans = []
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isalnum():
            j = i + 1
            while j < n and (<Py_UCS4>text[j]).isalnum():
                j += 1
            spans.append((i, j))
            i = j
        else:
            spans.append((i, i + 1))
            i += 1
    return spans


def levenshtein(str a, str b):
    """Classic edit distance (insert/delete/substitute, unit costs)."""
    cdef Py_ssize_t la = len(a), lb = len(b)
    cdef Py_ssize_t i, j, d, tmp
    cdef Py_UCS4 ca
    if a == b:
        return 0
    if la == 0:
        return lb
    if lb == 0:
        return la
    if la < lb:
        a, b = b, a
        la, lb = lb, la
    cdef list prev = list(range(lb + 1))
    cdef list cur = [0] * (lb + 1)
    for i in range(1, la + 1):
        cur[0] = i
        ca = a[i - 1]
        for j in range(1, lb + 1):
            d = <Py_ssize_t>prev[j - 1] + (0 if ca == <Py_UCS4>b[j - 1] else 1)
            tmp = <Py_ssize_t>prev[j] + 1
            if tmp < d:
                d = tmp
            tmp = <Py_ssize_t>cur[j - 1] + 1
            if tmp < d:
                d = tmp
            cur[j] = d
        prev, cur = cur, prev
    return prev[lb]


def scan_token_trie(list tokens, dict trie):
    """Greedy longest-match of token sequences against a nested-dict trie.

    ``trie`` maps token → subtrie; the empty-string key marks entry ends.
    Returns (start_index, token_count) pairs; after a match the scan resumes
    past it, so matches from one trie never overlap each other.
    """
    cdef Py_ssize_t i = 0, j, best, n = len(tokens)
    matches = []
    while i < n:
        node = trie
        best = 0
        j = i
        while j < n:
            node = (<dict>node).get(<str>tokens[j])
            if node is None:
                break
            j += 1
            if "" in <dict>node:
                best = j - i
        if best > 0:
            matches.append((i, best))
            i += best
        else:
            i += 1
    return matches
