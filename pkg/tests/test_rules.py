import re

import pytest
from hypothesis import given
from hypothesis import strategies as st

from deidpipe.model import Document, EntityLabel
from deidpipe.rules import (
    ContextualRule,
    RuleParseError,
    RuleSet,
    apply_rules,
    compile_ruleset,
)


def _doc(text):
    return Document(id="d", text=text)


def _age_rule(window=15):
    return ContextualRule.build(
        "age", EntityLabel.AGE, r"\d{1,3}",
        suffix_terms=("year", "yr", "y.o.", "month"), context_window=window,
    )


def test_age_suffix_rule_fires_on_unit():
    chunks = apply_rules(_doc("a 48-year-old nurse"), RuleSet(rules=(_age_rule(),)))
    assert [(c.label, c.text) for c in chunks] == [(EntityLabel.AGE, "48")]
    assert chunks[0].source == "rule:age"
    assert chunks[0].confidence == 1.0


def test_age_rule_silent_without_unit():
    assert apply_rules(_doc("Room 48 is ready"), RuleSet(rules=(_age_rule(),))) == []


def test_unconstrained_rule_is_plain_regex():
    ssn = ContextualRule.build("ssn", EntityLabel.ID, r"\d{3}-\d{2}-\d{4}")
    chunks = apply_rules(_doc("SSN 123-45-6789"), RuleSet(rules=(ssn,)))
    assert [(c.label, c.text) for c in chunks] == [(EntityLabel.ID, "123-45-6789")]


def test_prefix_terms_and_window():
    mrn = ContextualRule.build(
        "mrn", EntityLabel.ID, r"\d{6,8}", prefix_terms=("mrn",), context_window=6
    )
    rs = RuleSet(rules=(mrn,))
    assert [c.text for c in apply_rules(_doc("MRN: 1234567"), rs)] == ["1234567"]
    # term present but outside the window
    assert apply_rules(_doc("MRN registered as 1234567"), rs) == []


def test_window_measured_to_nearer_edge():
    rule = ContextualRule.build(
        "r", EntityLabel.ID, r"\d+", prefix_terms=("id",), context_window=2
    )
    # "id" ends 2 chars before the match: distance == window, still valid
    assert [c.text for c in apply_rules(_doc("id: 99"), RuleSet(rules=(rule,)))] == ["99"]
    assert apply_rules(_doc("id   :99x"), RuleSet(rules=(ContextualRule.build(
        "r2", EntityLabel.ID, r"99", prefix_terms=("id",), context_window=2
    ),))) == []


def test_word_boundary_on_alnum_term_edges():
    rule = ContextualRule.build(
        "age", EntityLabel.AGE, r"\d{1,3}", prefix_terms=("age",), context_window=8
    )
    assert apply_rules(_doc("page 48"), RuleSet(rules=(rule,))) == []
    assert [c.text for c in apply_rules(_doc("age 48"), RuleSet(rules=(rule,)))] == ["48"]


def test_context_length_limit_disqualifies_long_terms():
    rule = ContextualRule.build(
        "r", EntityLabel.ID, r"\d+",
        prefix_terms=("identifier",), context_window=15, context_length_limit=5,
    )
    # the only prefix term is longer than the limit, so it can never satisfy
    assert apply_rules(_doc("identifier 99"), RuleSet(rules=(rule,))) == []


def test_case_insensitive_terms():
    rule = ContextualRule.build(
        "r", EntityLabel.ID, r"\d+", prefix_terms=("MRN",), context_window=6
    )
    assert [c.text for c in apply_rules(_doc("mrn 123456"), RuleSet(rules=(rule,)))] == [
        "123456"
    ]


def test_monotonicity_removing_terms_never_shrinks_matches():
    texts = [
        "a 48-year-old nurse", "Room 48 is ready", "aged 82", "82 today",
        "id 5 and 9 years", "nothing here",
    ]
    constrained = _age_rule()
    free = ContextualRule.build("age", EntityLabel.AGE, r"\d{1,3}")
    for text in texts:
        with_ctx = {c.span for c in apply_rules(_doc(text), RuleSet(rules=(constrained,)))}
        without = {c.span for c in apply_rules(_doc(text), RuleSet(rules=(free,)))}
        assert with_ctx <= without


@given(st.text(alphabet=list("ab 123yearmonth.\n"), max_size=120), st.integers(0, 20))
def test_window_soundness(text, window):
    rule = ContextualRule.build(
        "r", EntityLabel.AGE, r"\d+", suffix_terms=("year", "month"),
        context_window=window,
    )
    chunks = apply_rules(_doc(text), RuleSet(rules=(rule,)))
    for chunk in chunks:
        tail = text[chunk.span.end :]
        hits = []
        for term in ("year", "month"):
            for m in re.finditer(re.escape(term), tail, re.IGNORECASE):
                before = tail[: m.start()]
                boundary_ok = not (before and before[-1].isalnum())
                if boundary_ok and m.start() <= window:
                    hits.append(term)
        assert hits, f"no satisfying term within {window} after {chunk.text!r}"


def test_rule_order_does_not_change_output():
    rules = (
        _age_rule(),
        ContextualRule.build("ssn", EntityLabel.ID, r"\d{3}-\d{2}-\d{4}"),
        ContextualRule.build("num", EntityLabel.ID, r"\d+"),
    )
    doc = _doc("48 years old, SSN 123-45-6789")
    a = apply_rules(doc, RuleSet(rules=rules))
    b = apply_rules(doc, RuleSet(rules=tuple(reversed(rules))))
    assert set(a) == set(b)
    assert a == sorted(a, key=lambda c: (c.span.start, c.span.end, c.source))


def test_invalid_regex_names_rule_id():
    with pytest.raises(RuleParseError, match="badrule"):
        ContextualRule.build("badrule", EntityLabel.ID, r"([")


def test_duplicate_ids_rejected():
    rule = ContextualRule.build("dup", EntityLabel.ID, r"\d+")
    with pytest.raises(RuleParseError, match="dup"):
        RuleSet(rules=(rule, rule))


# ---- rule file parsing

def test_empty_file_gives_empty_ruleset(tmp_path):
    p = tmp_path / "rules.txt"
    p.write_text("# nothing here\n\n", encoding="utf-8")
    assert compile_ruleset(p).rules == ()


def test_parse_full_rule_line(tmp_path):
    p = tmp_path / "rules.txt"
    p.write_text(
        "rule age label=Age core=/\\d{1,3}/ suffix=[year,yr,y.o.] window=15 phi=true\n"
        "rule path label=ID core=/a\\/b/ phi=false\n",
        encoding="utf-8",
    )
    rs = compile_ruleset(p)
    assert [r.rule_id for r in rs.rules] == ["age", "path"]
    age = rs.rules[0]
    assert age.label is EntityLabel.AGE
    assert age.suffix_terms == ("year", "yr", "y.o.")
    assert age.context_window == 15
    assert age.is_phi
    path = rs.rules[1]
    assert path.core.pattern == "a/b"  # escaped slash unwrapped
    assert not path.is_phi


def test_parse_errors_carry_line_numbers(tmp_path):
    cases = [
        ("rule\n", "expected"),
        ("rule x core=/\\d+/\n", "label"),
        ("rule x label=Age\n", "core"),
        ("rule x label=Nope core=/\\d+/\n", "Nope"),
        ("rule x label=Age core=/\\d+/ window=abc\n", "window"),
        ("rule x label=Age core=/\\d+\n", "unterminated"),
        ("rule a label=Age core=/\\d+/\nrule a label=Age core=/\\d+/\n", "duplicate"),
    ]
    for content, needle in cases:
        p = tmp_path / "r.txt"
        p.write_text(content, encoding="utf-8")
        with pytest.raises(RuleParseError, match=needle):
            compile_ruleset(p)


def test_shipped_english_pack_compiles(en_pack):
    labels = {r.label for r in en_pack.ruleset.rules}
    assert {
        EntityLabel.AGE, EntityLabel.DATE, EntityLabel.ID,
        EntityLabel.PHONE, EntityLabel.ZIP,
    } <= labels
