"""Date parsing, day shifting, and format-preserving re-rendering.

A date chunk is parsed into (year, month, day) plus a format descriptor that
records exactly how the surface string was written ("MM/DD/YYYY",
"DDMonYYYY", "Month YYYY", ...). Shifting moves the canonical date by whole
days and re-rendering with the original descriptor reproduces the original
style, so "April 2020" shifted back two weeks comes out "March 2020", never
"3/3/2020".

Day-absent dates anchor on day 1 for arithmetic; the anchor day is carried
internally (but never rendered) so shifting by k then -k is always the
identity.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from datetime import date as _date, timedelta

from .seeding import keyed_int


class NotADate(ValueError):
    """Raised when a Date-labeled chunk cannot be normalized; callers fall
    back to masking or fully random obfuscation."""


@dataclass(frozen=True)
class MonthTable:
    full: tuple[str, ...]
    abbr: tuple[str, ...]

    def lookup(self, name: str) -> tuple[int, str] | None:
        """Return (month number, 'Month'|'Mon') for a month name, any case."""
        folded = name.casefold()
        for i, n in enumerate(self.full):
            if n.casefold() == folded:
                return i + 1, "Month"
        for i, n in enumerate(self.abbr):
            if n.casefold() == folded:
                return i + 1, "Mon"
        return None


EN_MONTHS = MonthTable(
    full=(
        "January", "February", "March", "April", "May", "June",
        "July", "August", "September", "October", "November", "December",
    ),
    abbr=(
        "Jan", "Feb", "Mar", "Apr", "May", "Jun",
        "Jul", "Aug", "Sep", "Oct", "Nov", "Dec",
    ),
)


def load_month_table(path) -> MonthTable:
    """Rows of ``<n><TAB><full><TAB><abbr>``, one per month."""
    full = [""] * 12
    abbr = [""] * 12
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            num, full_name, abbr_name = line.split("\t")
            idx = int(num) - 1
            full[idx] = full_name
            abbr[idx] = abbr_name
    if any(not n for n in full) or any(not n for n in abbr):
        raise ValueError(f"{path}: month table must cover all 12 months")
    return MonthTable(full=tuple(full), abbr=tuple(abbr))


@dataclass(frozen=True)
class ParsedDate:
    year: int
    month: int
    day: int  # anchor day 1 when day_present is False; never rendered then
    day_present: bool
    descriptor: str
    locale: str = "en"

    def __post_init__(self):
        _date(self.year, self.month, self.day)  # calendar validity

    def as_date(self) -> _date:
        return _date(self.year, self.month, self.day)


# descriptor tokens, longest-match first
_TOKENS = ("YYYY", "Month", "Mon", "YY", "MM", "DD", "M", "D")


def _descriptor_tokens(descriptor: str) -> list[str]:
    out = []
    i = 0
    while i < len(descriptor):
        for tok in _TOKENS:
            if descriptor.startswith(tok, i):
                out.append(tok)
                i += len(tok)
                break
        else:
            out.append(descriptor[i])  # literal separator
            i += 1
    return out


def descriptor_needs_day(descriptor: str) -> bool:
    return any(t in ("D", "DD") for t in _descriptor_tokens(descriptor))


_NUMERIC_TRIPLE_RE = re.compile(r"(\d{1,2})([/.\-])(\d{1,2})\2(\d{4}|\d{2})$")
_ISO_RE = re.compile(r"(\d{4})-(\d{1,2})-(\d{1,2})$")
_COMPACT_RE = re.compile(r"(\d{1,2})([A-Za-z]{3,9})(\d{4})$")
_MONTH_DAY_YEAR_RE = re.compile(r"([A-Za-z]{3,9}) (\d{1,2}), (\d{4})$")
_MONTH_YEAR_RE = re.compile(r"([A-Za-z]{3,9}) (\d{4})$")
_DAY_MONTH_YEAR_RE = re.compile(r"(\d{1,2}) ([A-Za-z]{3,9}) (\d{4})$")


def _num_token(part: str, kind: str) -> str:
    return {"m": ("M", "MM"), "d": ("D", "DD")}[kind][len(part) == 2]


def _expand_year(part: str, pivot: int) -> tuple[int, str]:
    if len(part) == 4:
        return int(part), "YYYY"
    yy = int(part)
    return (2000 + yy if yy <= pivot else 1900 + yy), "YY"


def parse_date(
    text: str,
    locale: str = "en",
    month_table: MonthTable | None = None,
    date_order: str = "MDY",
    year_pivot: int = 50,
) -> ParsedDate:
    """Parse a date surface form; NotADate when no supported pattern fits.

    Numeric day/month order follows ``date_order`` ("MDY" or "DMY"), with an
    automatic flip when the preferred reading is impossible (month > 12).
    Missing days anchor to 1 with the absence recorded.
    """
    table = month_table or EN_MONTHS
    s = text.strip()

    def build(year, month, day, day_present, descriptor):
        try:
            return ParsedDate(
                year=year, month=month, day=day if day_present else 1,
                day_present=day_present, descriptor=descriptor, locale=locale,
            )
        except ValueError:
            raise NotADate(f"invalid calendar date: {text!r}") from None

    if m := _ISO_RE.fullmatch(s):
        y, mo, d = m.groups()
        return build(
            int(y), int(mo), int(d), True,
            f"YYYY-{_num_token(mo, 'm')}-{_num_token(d, 'd')}",
        )
    if m := _NUMERIC_TRIPLE_RE.fullmatch(s):
        a, sep, b, ytext = m.group(1), m.group(2), m.group(3), m.group(4)
        year, ytok = _expand_year(ytext, year_pivot)
        first_is_month = date_order == "MDY"
        if first_is_month and int(a) > 12 and int(b) <= 12:
            first_is_month = False
        elif not first_is_month and int(b) > 12 and int(a) <= 12:
            first_is_month = True
        if first_is_month:
            month, day = int(a), int(b)
            desc = f"{_num_token(a, 'm')}{sep}{_num_token(b, 'd')}{sep}{ytok}"
        else:
            day, month = int(a), int(b)
            desc = f"{_num_token(a, 'd')}{sep}{_num_token(b, 'm')}{sep}{ytok}"
        if month > 12:
            raise NotADate(f"no valid month reading: {text!r}")
        return build(year, month, day, True, desc)
    if m := _COMPACT_RE.fullmatch(s):
        d, name, y = m.groups()
        hit = table.lookup(name)
        if hit is None:
            raise NotADate(f"unknown month name: {name!r}")
        month, mtok = hit
        return build(int(y), month, int(d), True, f"{_num_token(d, 'd')}{mtok}YYYY")
    if m := _MONTH_DAY_YEAR_RE.fullmatch(s):
        name, d, y = m.groups()
        hit = table.lookup(name)
        if hit is None:
            raise NotADate(f"unknown month name: {name!r}")
        month, mtok = hit
        return build(int(y), month, int(d), True, f"{mtok} {_num_token(d, 'd')}, YYYY")
    if m := _DAY_MONTH_YEAR_RE.fullmatch(s):
        d, name, y = m.groups()
        hit = table.lookup(name)
        if hit is None:
            raise NotADate(f"unknown month name: {name!r}")
        month, mtok = hit
        return build(int(y), month, int(d), True, f"{_num_token(d, 'd')} {mtok} YYYY")
    if m := _MONTH_YEAR_RE.fullmatch(s):
        name, y = m.groups()
        hit = table.lookup(name)
        if hit is None:
            raise NotADate(f"unknown month name: {name!r}")
        month, mtok = hit
        return build(int(y), month, 1, False, f"{mtok} YYYY")
    raise NotADate(f"unrecognized date format: {text!r}")


def shift_date(d: ParsedDate, days: int) -> ParsedDate:
    """Calendar-correct day shift; the format descriptor never changes."""
    shifted = d.as_date() + timedelta(days=days)
    return replace(
        d, year=shifted.year, month=shifted.month, day=shifted.day
    )


def render_date(
    d: ParsedDate,
    descriptor: str | None = None,
    month_table: MonthTable | None = None,
    date_order: str = "MDY",
) -> str:
    """Render in the requested surface pattern. A descriptor that needs a
    day while the date has none falls back to the canonical form."""
    table = month_table or EN_MONTHS
    desc = descriptor or d.descriptor
    if not d.day_present and descriptor_needs_day(desc):
        return canonical_render(d, date_order)
    out = []
    for tok in _descriptor_tokens(desc):
        if tok == "YYYY":
            out.append(f"{d.year:04d}")
        elif tok == "YY":
            out.append(f"{d.year % 100:02d}")
        elif tok == "MM":
            out.append(f"{d.month:02d}")
        elif tok == "M":
            out.append(str(d.month))
        elif tok == "DD":
            out.append(f"{d.day:02d}")
        elif tok == "D":
            out.append(str(d.day))
        elif tok == "Month":
            out.append(table.full[d.month - 1])
        elif tok == "Mon":
            out.append(table.abbr[d.month - 1])
        else:
            out.append(tok)
    return "".join(out)


def canonical_render(d: ParsedDate, date_order: str = "MDY") -> str:
    """Normalized form: MM/DD/YYYY (or DD/MM/YYYY). A day-absent date keeps
    its anchor day unpadded, e.g. "04/1/2020", marking the absence."""
    day = f"{d.day:02d}" if d.day_present else str(d.day)
    if date_order == "DMY":
        return f"{day}/{d.month:02d}/{d.year:04d}"
    return f"{d.month:02d}/{day}/{d.year:04d}"


# ------------------------------------------------------------- day shifts

@dataclass(frozen=True)
class DayShiftPolicy:
    """Per-patient day offsets: an explicit table, or seeded draws from a
    range. The same patient always receives the same shift for a given
    policy, no matter how many documents arrive or in what order."""

    mode: str = "range"  # "fixed" | "range"
    per_patient: dict = field(default_factory=dict)
    range_days: tuple[int, int] = (-365, 365)
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("fixed", "range"):
            raise ValueError(f"unknown day-shift mode {self.mode!r}")
        lo, hi = self.range_days
        if lo > hi:
            raise ValueError(f"invalid shift range [{lo}, {hi}]")


def shift_for_patient(patient_id: str, policy: DayShiftPolicy) -> int:
    """Fixed mode returns the table entry when present; otherwise (and in
    range mode) the shift is a pure function of (seed, patient_id)."""
    if policy.mode == "fixed" and patient_id in policy.per_patient:
        return policy.per_patient[patient_id]
    lo, hi = policy.range_days
    if policy.mode == "fixed":
        # unmapped patient under a fixed table: deterministic nonzero draw
        # so real dates never leak through a silent zero shift
        magnitude = 1 + keyed_int(policy.seed, "shift-mag", patient_id) % 365
        sign = 1 if keyed_int(policy.seed, "shift-sign", patient_id) % 2 else -1
        return sign * magnitude
    return lo + keyed_int(policy.seed, "shift", patient_id) % (hi - lo + 1)


def load_shift_table(path) -> dict:
    """``patient_id<TAB>days`` rows for fixed-mode policies."""
    table = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            pid, _, days = line.partition("\t")
            table[pid] = int(days)
    return table
