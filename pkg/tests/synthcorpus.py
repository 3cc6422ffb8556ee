"""Deterministic synthetic clinical-note corpus with planted PHI.

Every planted entity is recorded as a gold annotation at generation time, so
the corpus doubles as an evaluation fixture. Name/city/hospital/profession
plants come from the shipped gazetteers; ages, dates, and identifiers are
formatted the way the shipped rules expect. The generator never calls the
detection code, keeping the fixture independent of what it tests.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path

DEFAULT_SEED = 20240501

FIRST_NAMES = [
    "Jane", "John", "Mary", "Robert", "Emily", "Michael", "Sarah", "David",
    "Linda", "Thomas", "Anna", "Henry", "Grace", "Oliver", "Lucy", "Daniel",
]
FULL_NAMES = [
    "Jane Doe", "John Smith", "Mary Johnson", "Robert Brown", "Emily Davis",
    "Michael Wilson", "Sarah Taylor", "David Clark", "Linda Lewis",
    "Thomas Walker", "Anna Young", "Henry King", "Grace Scott",
    "Oliver Green", "Lucy Adams", "Daniel Carter",
]
SURNAMES = [
    "Hopkins", "Miller", "Davis", "Wilson", "Taylor", "Clark", "Lewis",
    "Walker", "Young", "King", "Wright", "Scott", "Green", "Adams",
]
CITIES = [
    "Memphis", "Boston", "Chicago", "Houston", "Phoenix", "Seattle",
    "Denver", "Atlanta", "Dallas", "Portland", "Oakland", "Omaha",
]
HOSPITALS = [
    "John Hopkins Hospital", "Boston Children's Hospital",
    "St. Mary's Medical Center", "Memorial Hospital", "Mercy Hospital",
    "Regional Medical Center", "Valley Medical Center", "Riverside Hospital",
]
PROFESSIONS = [
    "nurse", "teacher", "engineer", "lawyer", "farmer", "pilot", "coach",
    "chef", "painter", "cashier", "writer", "mechanic",
]
DISEASES = [
    "diabetes", "asthma", "hypertension", "pneumonia", "arthritis",
    "migraine", "epilepsy", "anemia",
]
MONTH_FULL = [
    "January", "February", "March", "April", "May", "June", "July",
    "August", "September", "October", "November", "December",
]
MONTH_ABBR = [
    "Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct",
    "Nov", "Dec",
]
DISTRACTORS = [
    "BP 120/80, HR 72.",
    "Plan: continue current medication.",
    "Labs reviewed, no acute findings.",
    "Patient tolerated the procedure well.",
    "Denies fever, chills, or weight loss.",
    "Wound healing as expected.",
]


@dataclass
class SynthDoc:
    relpath: str
    text: str
    patient_id: str | None
    annotations: list = field(default_factory=list)  # (start, end, label)


def _format_date(rng: random.Random) -> str:
    y = rng.randrange(1995, 2024)
    m = rng.randrange(1, 13)
    d = rng.randrange(1, 29)
    style = rng.randrange(5)
    if style == 0:
        return f"{m:02d}/{d:02d}/{y}"
    if style == 1:
        return f"{d:02d}{MONTH_ABBR[m - 1]}{y}"
    if style == 2:
        return f"{MONTH_FULL[m - 1]} {y}"
    if style == 3:
        return f"{MONTH_FULL[m - 1]} {d}, {y}"
    return f"{y}-{m:02d}-{d:02d}"


def _format_phone(rng: random.Random) -> str:
    a, b, c = rng.randrange(200, 999), rng.randrange(100, 999), rng.randrange(1000, 9999)
    return f"({a}) {b}-{c}" if rng.randrange(2) else f"{a}-{b}-{c}"


class _NoteBuilder:
    def __init__(self):
        self.parts: list[str] = []
        self.pos = 0
        self.annotations: list = []

    def lit(self, text: str) -> "_NoteBuilder":
        self.parts.append(text)
        self.pos += len(text)
        return self

    def ent(self, text: str, label: str) -> "_NoteBuilder":
        self.annotations.append((self.pos, self.pos + len(text), label))
        return self.lit(text)

    def build(self) -> tuple[str, list]:
        return "".join(self.parts), self.annotations


def _sentence(rng: random.Random, b: _NoteBuilder, patient_name: str) -> None:
    kind = rng.randrange(9)
    if kind == 0:
        age = rng.randrange(18, 96)
        b.ent(patient_name, "Patient").lit(" is a ")
        b.ent(f"{age}-year-old", "Age").lit(" ")
        b.ent(rng.choice(PROFESSIONS), "Profession").lit(" from ")
        b.ent(rng.choice(CITIES), "City").lit(".")
    elif kind == 1:
        b.lit("Admitted to ").ent(rng.choice(HOSPITALS), "Hospital")
        b.lit(" on ").ent(_format_date(rng), "Date").lit(".")
    elif kind == 2:
        b.lit("Dr. ").ent(rng.choice(SURNAMES), "Doctor")
        b.lit(" reviewed the results on ").ent(_format_date(rng), "Date").lit(".")
    elif kind == 3:
        mrn = str(rng.randrange(1000000, 9999999))
        b.lit("MRN: ").ent(mrn, "ID").lit(".")
    elif kind == 4:
        ssn = f"{rng.randrange(100, 999)}-{rng.randrange(10, 99)}-{rng.randrange(1000, 9999)}"
        b.lit("SSN ").ent(ssn, "ID").lit(" on file.")
    elif kind == 5:
        b.lit("Contact: ").ent(_format_phone(rng), "Phone").lit(".")
    elif kind == 6:
        b.lit("Home: ").ent(rng.choice(CITIES), "City")
        b.lit(". Zip: ").ent(str(rng.randrange(10000, 99999)), "Zip").lit(".")
    elif kind == 7:
        b.lit(f"History of {rng.choice(DISEASES)}.")  # non-PHI, not annotated
    else:
        b.lit(rng.choice(DISTRACTORS))


def make_note(rng: random.Random, patient_name: str, target_bytes: int = 0) -> tuple[str, list]:
    b = _NoteBuilder()
    n_sentences = rng.randrange(3, 7)
    for i in range(n_sentences):
        if i:
            b.lit("\n" if rng.randrange(3) else " ")
        _sentence(rng, b, patient_name)
    while target_bytes and b.pos < target_bytes:
        b.lit(" " if rng.randrange(4) else "\n")
        _sentence(rng, b, patient_name)
    return b.build()


def generate_corpus(
    n_docs: int = 220,
    seed: int = DEFAULT_SEED,
    docs_per_patient: int = 2,
    target_bytes: int = 0,
) -> list[SynthDoc]:
    rng = random.Random(seed)
    docs = []
    for i in range(n_docs):
        patient_num = i // docs_per_patient
        patient_id = f"patient-{patient_num:04d}"
        # stable per-patient name so cross-document consistency is testable
        name_rng = random.Random(seed * 1000003 + patient_num)
        patient_name = (
            name_rng.choice(FULL_NAMES)
            if name_rng.randrange(2)
            else name_rng.choice(FIRST_NAMES)
        )
        text, annotations = make_note(rng, patient_name, target_bytes)
        docs.append(
            SynthDoc(
                relpath=f"notes/doc-{i:04d}.txt",
                text=text,
                patient_id=patient_id,
                annotations=annotations,
            )
        )
    return docs


def write_corpus(
    docs: list[SynthDoc],
    root: Path,
    sidecars: bool = True,
    gold_path: Path | None = None,
) -> None:
    for doc in docs:
        path = root / doc.relpath
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(doc.text, encoding="utf-8")
        if sidecars and doc.patient_id:
            (root / (doc.relpath + ".patient")).write_text(
                doc.patient_id + "\n", encoding="utf-8"
            )
    if gold_path is not None:
        gold_path.parent.mkdir(parents=True, exist_ok=True)
        lines = [
            f"{doc.relpath}\t{start}\t{end}\t{label}"
            for doc in docs
            for start, end, label in doc.annotations
        ]
        gold_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
