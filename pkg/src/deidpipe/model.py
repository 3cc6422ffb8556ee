"""Core domain types: entity labels, spans, chunks, and documents.

Every pipeline stage exchanges ``EntityChunk`` values; everything here is
immutable and safe to share across workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class EntityLabel(str, Enum):
    # coarse taxonomy (7 labels)
    NAME = "Name"
    DATE = "Date"
    ORGANIZATION = "Organization"
    LOCATION = "Location"
    AGE = "Age"
    CONTACT = "Contact"
    ID = "ID"
    # granular-only labels (Date/Age/Organization appear in both taxonomies)
    PATIENT = "Patient"
    DOCTOR = "Doctor"
    HOSPITAL = "Hospital"
    PROFESSION = "Profession"
    STREET = "Street"
    CITY = "City"
    COUNTRY = "Country"
    PHONE = "Phone"
    USERNAME = "Username"
    ZIP = "Zip"
    # auxiliary non-PHI label used to suppress overlapping false positives
    # (clinical terms that must survive de-identification verbatim)
    DISEASE = "Disease"

    def __str__(self) -> str:
        return self.value


COARSE_LABELS = frozenset(
    {
        EntityLabel.NAME,
        EntityLabel.DATE,
        EntityLabel.ORGANIZATION,
        EntityLabel.LOCATION,
        EntityLabel.AGE,
        EntityLabel.CONTACT,
        EntityLabel.ID,
    }
)

GRANULAR_LABELS = frozenset(
    {
        EntityLabel.PATIENT,
        EntityLabel.DOCTOR,
        EntityLabel.HOSPITAL,
        EntityLabel.DATE,
        EntityLabel.AGE,
        EntityLabel.PROFESSION,
        EntityLabel.ORGANIZATION,
        EntityLabel.STREET,
        EntityLabel.CITY,
        EntityLabel.COUNTRY,
        EntityLabel.PHONE,
        EntityLabel.USERNAME,
        EntityLabel.ZIP,
    }
)

NON_PHI_LABELS = frozenset({EntityLabel.DISEASE})

# Default granular→coarse parents. Profession→Organization is a documented
# assumption (no natural parent in the coarse set); language packs may
# override any row via `label.coarse.<Granular> = <Coarse>` manifest keys.
DEFAULT_COARSE_MAP: dict[EntityLabel, EntityLabel] = {
    EntityLabel.PATIENT: EntityLabel.NAME,
    EntityLabel.DOCTOR: EntityLabel.NAME,
    EntityLabel.HOSPITAL: EntityLabel.ORGANIZATION,
    EntityLabel.DATE: EntityLabel.DATE,
    EntityLabel.AGE: EntityLabel.AGE,
    EntityLabel.PROFESSION: EntityLabel.ORGANIZATION,
    EntityLabel.ORGANIZATION: EntityLabel.ORGANIZATION,
    EntityLabel.STREET: EntityLabel.LOCATION,
    EntityLabel.CITY: EntityLabel.LOCATION,
    EntityLabel.COUNTRY: EntityLabel.LOCATION,
    EntityLabel.PHONE: EntityLabel.CONTACT,
    EntityLabel.USERNAME: EntityLabel.CONTACT,
    EntityLabel.ZIP: EntityLabel.LOCATION,
}


def parse_label(name: str) -> EntityLabel:
    """Resolve a label by its display name, e.g. ``"Patient"``."""
    try:
        return EntityLabel(name)
    except ValueError:
        raise ValueError(f"unknown entity label: {name!r}") from None


def is_phi_label(label: EntityLabel) -> bool:
    return label not in NON_PHI_LABELS


def to_coarse(
    label: EntityLabel,
    overrides: dict[EntityLabel, EntityLabel] | None = None,
) -> EntityLabel:
    """Map a granular label to its coarse parent.

    Total over the granular set; ``overrides`` substitutes individual rows
    (loaded from a language pack manifest).
    """
    if label not in GRANULAR_LABELS:
        raise ValueError(f"{label} is not a granular label")
    if overrides and label in overrides:
        return overrides[label]
    return DEFAULT_COARSE_MAP[label]


@dataclass(frozen=True, order=True)
class Span:
    """Half-open character interval [start, end) in Unicode scalar values."""

    start: int
    end: int

    def __post_init__(self):
        if not (0 <= self.start < self.end):
            raise ValueError(f"invalid span [{self.start}, {self.end})")

    def __len__(self) -> int:
        return self.end - self.start

    def overlaps(self, other: "Span") -> bool:
        return self.start < other.end and other.start < self.end

    def intersection_length(self, other: "Span") -> int:
        return max(0, min(self.end, other.end) - max(self.start, other.start))

    def contains(self, other: "Span") -> bool:
        return self.start <= other.start and other.end <= self.end


@dataclass(frozen=True)
class EntityChunk:
    """A labeled span with source attribution, the unit flowing through the pipeline.

    ``source`` is ``<class>:<id>`` (e.g. ``gazetteer:cities``, ``rule:ssn``);
    the class prefix is what merge policies key on.
    """

    span: Span
    label: EntityLabel
    text: str
    source: str
    confidence: float = 1.0
    is_phi: bool = True

    def __post_init__(self):
        if len(self.text) != len(self.span):
            raise ValueError(
                f"chunk text {self.text!r} does not cover span {self.span}"
            )
        if not (0.0 <= self.confidence <= 1.0):
            raise ValueError(f"confidence {self.confidence} outside [0, 1]")

    @property
    def source_class(self) -> str:
        return self.source.split(":", 1)[0]


@dataclass(frozen=True)
class Document:
    id: str
    text: str
    patient_id: str | None = None
    language: str = "en"

    def __post_init__(self):
        if not self.id:
            raise ValueError("document id must be non-empty")

    def chunk_key(self) -> str:
        """Consistency scope for obfuscation: patient when known, else the doc."""
        return self.patient_id if self.patient_id else f"doc:{self.id}"
