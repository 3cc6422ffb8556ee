"""Entity-level evaluation: span matching, per-label P/R/F1, micro/macro
averages, and binary PHI scoring.

Matching modes: coverage (a prediction counts when it covers at least the
threshold fraction of the gold span, default 60%) and token-overlap (any
shared character counts). Predictions are assigned to golds by maximum
bipartite matching — seeded and tie-broken by descending coverage then
earlier start, so results are deterministic, lowering the threshold never
loses matches, and collapsing labels (binary PHI) never loses matches
either.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .model import Span

BINARY_LABEL = "PHI"


@dataclass(frozen=True)
class Annotation:
    doc_id: str
    span: Span
    label: str


GoldAnnotation = Annotation


@dataclass(frozen=True)
class MatchSpec:
    mode: str = "coverage"  # "coverage" | "token"
    threshold: float = 0.6
    label_mapping: dict = field(default_factory=dict)
    excluded_labels: frozenset = frozenset()
    # optional pred-side guard: minimum |p∩g|/|p|, off by default (a very
    # wide prediction still "covers" a narrow gold, as in the paper's rule)
    pred_coverage_min: float | None = None

    def __post_init__(self):
        if self.mode not in ("coverage", "token"):
            raise ValueError(f"unknown match mode {self.mode!r}")
        if not (0.0 < self.threshold <= 1.0):
            raise ValueError("threshold must be in (0, 1]")

    def map_label(self, label: str) -> str:
        return self.label_mapping.get(label, label)


def load_annotations(path) -> list[Annotation]:
    """``doc_id<TAB>start<TAB>end<TAB>label`` rows, ``#`` comments."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise ValueError(
                    f"{path}:{lineno}: expected doc_id<TAB>start<TAB>end<TAB>label"
                )
            doc_id, start, end, label = parts
            out.append(Annotation(doc_id=doc_id, span=Span(int(start), int(end)), label=label))
    return out


def _coverage(pred: Annotation, gold: Annotation) -> float:
    return pred.span.intersection_length(gold.span) / len(gold.span)


def _edge_ok(pred: Annotation, gold: Annotation, spec: MatchSpec, binary: bool) -> bool:
    if not binary and spec.map_label(pred.label) != spec.map_label(gold.label):
        return False
    inter = pred.span.intersection_length(gold.span)
    if inter == 0:
        return False
    if spec.mode == "token":
        return True
    if inter / len(gold.span) < spec.threshold:
        return False
    if spec.pred_coverage_min is not None and inter / len(pred.span) < spec.pred_coverage_min:
        return False
    return True


def match_chunks(
    pred: list[Annotation],
    gold: list[Annotation],
    spec: MatchSpec,
    binary: bool = False,
) -> list[tuple[Annotation, Annotation | None]]:
    """Assign predictions to golds within one document.

    Returns one (gold, matched-pred-or-None) pair per gold, in gold order;
    each prediction matches at most one gold. The assignment maximizes the
    number of matches (augmenting paths over the valid-pair graph), with
    candidate preds tried by descending coverage then earlier start.
    """
    pred = [p for p in pred if spec.map_label(p.label) not in spec.excluded_labels]
    gold = [g for g in gold if spec.map_label(g.label) not in spec.excluded_labels]
    gold_order = sorted(range(len(gold)), key=lambda i: (gold[i].span.start, gold[i].span.end))

    candidates: dict[int, list[int]] = {}
    for gi in gold_order:
        cands = [
            pi for pi, p in enumerate(pred) if _edge_ok(p, gold[gi], spec, binary)
        ]
        cands.sort(key=lambda pi: (-_coverage(pred[pi], gold[gi]), pred[pi].span.start, pred[pi].span.end))
        candidates[gi] = cands

    pred_to_gold: dict[int, int] = {}

    def try_assign(gi: int, visited: set) -> bool:
        for pi in candidates[gi]:
            if pi in visited:
                continue
            visited.add(pi)
            if pi not in pred_to_gold or try_assign(pred_to_gold[pi], visited):
                pred_to_gold[pi] = gi
                return True
        return False

    for gi in gold_order:
        try_assign(gi, set())

    gold_to_pred = {gi: pi for pi, gi in pred_to_gold.items()}
    return [
        (gold[gi], pred[gold_to_pred[gi]] if gi in gold_to_pred else None)
        for gi in gold_order
    ]


@dataclass(frozen=True)
class LabelMetrics:
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f1: float
    support: int
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class MetricsReport:
    per_label: dict  # label -> LabelMetrics
    micro: LabelMetrics
    macro_f1: float
    binary: LabelMetrics


def _metrics_from_counts(tp: int, fp: int, fn: int) -> LabelMetrics:
    flags = []
    if tp + fp == 0:
        precision = 0.0
        flags.append("precision_zero_division")
    else:
        precision = tp / (tp + fp)
    if tp + fn == 0:
        recall = 0.0
        flags.append("recall_zero_division")
    else:
        recall = tp / (tp + fn)
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return LabelMetrics(
        tp=tp, fp=fp, fn=fn, precision=precision, recall=recall, f1=f1,
        support=tp + fn, flags=tuple(flags),
    )


def _count_corpus(
    preds_by_doc: dict, golds_by_doc: dict, spec: MatchSpec, binary: bool
) -> dict:
    """Pool TP/FP/FN per label across documents."""
    counts: dict[str, list[int]] = {}

    def bucket(label: str) -> list[int]:
        return counts.setdefault(label, [0, 0, 0])

    for doc_id in sorted(set(preds_by_doc) | set(golds_by_doc)):
        pred = preds_by_doc.get(doc_id, [])
        gold = golds_by_doc.get(doc_id, [])
        pairs = match_chunks(pred, gold, spec, binary=binary)
        matched_preds = set()
        for g, p in pairs:
            label = BINARY_LABEL if binary else spec.map_label(g.label)
            if p is None:
                bucket(label)[2] += 1  # FN
            else:
                bucket(label)[0] += 1  # TP
                matched_preds.add(id(p))
        for p in pred:
            label = spec.map_label(p.label)
            if label in spec.excluded_labels:
                continue
            if id(p) not in matched_preds:
                bucket(BINARY_LABEL if binary else label)[1] += 1  # FP
    return counts


def compute_metrics(preds_by_doc: dict, golds_by_doc: dict, spec: MatchSpec) -> MetricsReport:
    """Entity-level report: per-label, micro (pooled counts), macro
    (mean F1 over labels with support), and binary-PHI scores."""
    labeled = _count_corpus(preds_by_doc, golds_by_doc, spec, binary=False)
    per_label = {
        label: _metrics_from_counts(tp, fp, fn)
        for label, (tp, fp, fn) in sorted(labeled.items())
    }
    micro = _metrics_from_counts(
        sum(m.tp for m in per_label.values()),
        sum(m.fp for m in per_label.values()),
        sum(m.fn for m in per_label.values()),
    )
    with_support = [m.f1 for m in per_label.values() if m.support > 0]
    macro_f1 = sum(with_support) / len(with_support) if with_support else 0.0

    binary_counts = _count_corpus(preds_by_doc, golds_by_doc, spec, binary=True)
    tp, fp, fn = binary_counts.get(BINARY_LABEL, [0, 0, 0])
    binary = _metrics_from_counts(tp, fp, fn)
    return MetricsReport(per_label=per_label, micro=micro, macro_f1=macro_f1, binary=binary)


def binary_phi_metrics(preds_by_doc: dict, golds_by_doc: dict, spec: MatchSpec) -> LabelMetrics:
    counts = _count_corpus(preds_by_doc, golds_by_doc, spec, binary=True)
    tp, fp, fn = counts.get(BINARY_LABEL, [0, 0, 0])
    return _metrics_from_counts(tp, fp, fn)


def group_by_doc(annotations: list[Annotation]) -> dict:
    out: dict[str, list[Annotation]] = {}
    for ann in annotations:
        out.setdefault(ann.doc_id, []).append(ann)
    return out


def format_report(report: MetricsReport) -> str:
    """Aligned text table followed by machine-readable lines."""
    rows = [("Entity", "Precision", "Recall", "F1", "Support")]
    for label, m in report.per_label.items():
        rows.append((label, f"{m.precision:.3f}", f"{m.recall:.3f}", f"{m.f1:.3f}", str(m.support)))
    rows.append(("Micro-Avg.", f"{report.micro.precision:.3f}", f"{report.micro.recall:.3f}", f"{report.micro.f1:.3f}", str(report.micro.support)))
    rows.append(("Macro-Avg.", "", "", f"{report.macro_f1:.3f}", ""))
    b = report.binary
    rows.append(("Binary-PHI", f"{b.precision:.3f}", f"{b.recall:.3f}", f"{b.f1:.3f}", str(b.support)))
    widths = [max(len(r[i]) for r in rows) for i in range(5)]
    lines = [
        "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip()
        for row in rows
    ]
    lines.append("")
    for label, m in report.per_label.items():
        lines.append(
            f"metrics label={label} tp={m.tp} fp={m.fp} fn={m.fn} "
            f"precision={m.precision:.6f} recall={m.recall:.6f} f1={m.f1:.6f}"
            + (f" flags={','.join(m.flags)}" if m.flags else "")
        )
    lines.append(
        f"metrics label=__micro__ tp={report.micro.tp} fp={report.micro.fp} "
        f"fn={report.micro.fn} precision={report.micro.precision:.6f} "
        f"recall={report.micro.recall:.6f} f1={report.micro.f1:.6f}"
    )
    lines.append(f"metrics label=__macro__ f1={report.macro_f1:.6f}")
    lines.append(
        f"metrics label=__binary__ tp={b.tp} fp={b.fp} fn={b.fn} "
        f"precision={b.precision:.6f} recall={b.recall:.6f} f1={b.f1:.6f}"
    )
    return "\n".join(lines)
