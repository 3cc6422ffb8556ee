"""Re-identification vault: the protected original↔surrogate record.

One newline-delimited UTF-8 JSON object per line. The first line is a
header carrying the format version and a hash of the run seed; after that,
one ``doc`` marker per processed document (so re-identifying a PHI-free
document is distinguishable from an unknown one) and one ``rec`` entry per
replacement. Append-only by construction; nothing ever rewrites history.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

from .model import Document, EntityLabel, Span, parse_label
from .rewrite import RewriteResult

FORMAT_VERSION = 1


class VaultError(RuntimeError):
    pass


class VaultNotFound(VaultError):
    """No vault entry for the requested document."""


class VaultIntegrityError(VaultError):
    """The de-identified text does not match the vault records (edited?)."""


@dataclass(frozen=True)
class VaultRecord:
    doc_id: str
    patient_id: str | None
    input_span: Span
    label: EntityLabel
    original: str
    replacement: str
    output_span: Span

    def __post_init__(self):
        if not self.original or not self.replacement:
            raise VaultError("vault records require non-empty original and replacement")

    def to_json(self) -> str:
        return json.dumps(
            {
                "kind": "rec",
                "doc_id": self.doc_id,
                "patient_id": self.patient_id,
                "input_span": [self.input_span.start, self.input_span.end],
                "label": self.label.value,
                "original": self.original,
                "replacement": self.replacement,
                "output_span": [self.output_span.start, self.output_span.end],
            },
            ensure_ascii=False,
            sort_keys=True,
        )

    @classmethod
    def from_dict(cls, obj: dict) -> "VaultRecord":
        return cls(
            doc_id=obj["doc_id"],
            patient_id=obj.get("patient_id"),
            input_span=Span(*obj["input_span"]),
            label=parse_label(obj["label"]),
            original=obj["original"],
            replacement=obj["replacement"],
            output_span=Span(*obj["output_span"]),
        )


def seed_digest(seed: int | None) -> str:
    return hashlib.sha256(str(seed).encode("utf-8")).hexdigest()


class VaultWriter:
    """Single writer per vault file; appends are flushed per document so a
    clean shutdown never leaves a partial record."""

    def __init__(self, path, seed: int | None = None):
        self.path = Path(path)
        self._seen: set[tuple[str, int, int]] = set()
        self._fh = open(self.path, "w", encoding="utf-8", newline="\n")
        header = {
            "kind": "header",
            "format_version": FORMAT_VERSION,
            "seed_sha256": seed_digest(seed),
        }
        self._fh.write(json.dumps(header, sort_keys=True) + "\n")
        self._fh.flush()

    def append(self, result: RewriteResult, doc: Document) -> int:
        """Write one marker for the document plus one record per replacement;
        returns the record count. Duplicate (doc_id, input_span) rejected."""
        records = []
        for r in result.replacements:
            key = (doc.id, r.chunk.span.start, r.chunk.span.end)
            if key in self._seen:
                raise VaultError(
                    f"duplicate vault record for {doc.id} at {r.chunk.span}"
                )
            records.append(
                VaultRecord(
                    doc_id=doc.id,
                    patient_id=doc.patient_id,
                    input_span=r.chunk.span,
                    label=r.chunk.label,
                    original=r.chunk.text,
                    replacement=r.replacement,
                    output_span=r.output_span,
                )
            )
        lines = [json.dumps({"kind": "doc", "doc_id": doc.id}, sort_keys=True)]
        lines.extend(rec.to_json() for rec in records)
        self._fh.write("\n".join(lines) + "\n")
        self._fh.flush()
        for rec in records:
            self._seen.add((rec.doc_id, rec.input_span.start, rec.input_span.end))
        return len(records)

    def close(self) -> None:
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


@dataclass
class Vault:
    header: dict
    docs: set
    records: dict  # doc_id -> list[VaultRecord]

    def records_for(self, doc_id: str) -> list[VaultRecord]:
        if doc_id not in self.docs:
            raise VaultNotFound(f"no vault entry for document {doc_id!r}")
        return self.records.get(doc_id, [])


def load_vault(path) -> Vault:
    docs: set = set()
    records: dict = {}
    seen: set = set()
    with open(path, encoding="utf-8") as fh:
        header_line = fh.readline()
        if not header_line:
            raise VaultError(f"{path}: empty vault file")
        header = json.loads(header_line)
        if header.get("kind") != "header":
            raise VaultError(f"{path}: missing vault header")
        if header.get("format_version") != FORMAT_VERSION:
            raise VaultError(
                f"{path}: unsupported vault format {header.get('format_version')!r}"
            )
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            kind = obj.get("kind")
            if kind == "doc":
                docs.add(obj["doc_id"])
            elif kind == "rec":
                rec = VaultRecord.from_dict(obj)
                key = (rec.doc_id, rec.input_span.start, rec.input_span.end)
                if key in seen:
                    raise VaultError(f"{path}:{lineno}: duplicate record {key}")
                seen.add(key)
                records.setdefault(rec.doc_id, []).append(rec)
            else:
                raise VaultError(f"{path}:{lineno}: unknown line kind {kind!r}")
    for doc_id in records:
        if doc_id not in docs:
            raise VaultError(f"{path}: records for unmarked document {doc_id!r}")
    return Vault(header=header, docs=docs, records=records)


def vault_append(result: RewriteResult, doc: Document, store: VaultWriter) -> int:
    return store.append(result, doc)


def reidentify(deidentified_text: str, doc_id: str, store: Vault) -> str:
    """Restore the original text, byte-exact.

    Every record's replacement must sit untouched at its output span; the
    first mismatch (in document order) raises an integrity error naming it.
    """
    records = sorted(store.records_for(doc_id), key=lambda r: r.output_span.start)
    for rec in records:
        found = deidentified_text[rec.output_span.start : rec.output_span.end]
        if found != rec.replacement:
            raise VaultIntegrityError(
                f"{doc_id}: output at {rec.output_span} is {found!r}, "
                f"vault expected {rec.replacement!r}"
            )
    text = deidentified_text
    for rec in reversed(records):
        text = (
            text[: rec.output_span.start]
            + rec.original
            + text[rec.output_span.end :]
        )
    return text
