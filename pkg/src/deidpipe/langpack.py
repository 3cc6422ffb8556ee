"""Language packs: self-contained resource bundles per language.

A pack directory holds a ``manifest.conf`` of ``key = value`` lines pointing
at gazetteers, a ruleset, abbreviation/title lists, month tables, and
surrogate vocabularies. Swapping packs is the only language switch the
pipeline has; everything else is pack-neutral.

Manifest keys::

    pack.language = en
    pack.version = 1
    option.date_order = MDY            # or DMY
    resource.abbreviations.main = abbreviations.txt
    resource.titles.main = titles.txt
    resource.months.main = months.txt
    resource.ruleset.main = rules.txt
    resource.gazetteer.<name> = gazetteers/<file>
    resource.vocab.first_name = vocab/first_names.tsv
    resource.vocab.last_name = vocab/last_names.tsv
    resource.vocab.<Label> = vocab/<file>
    label.coarse.<Granular> = <Coarse>  # optional taxonomy overrides
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .dates import MonthTable, load_month_table
from .model import EntityLabel, parse_label
from .preprocess import load_abbreviations
from .recognize import Gazetteer, load_gazetteer
from .rules import RuleSet, compile_ruleset
from .surrogates import NameVocabulary, SurrogateVocabulary, load_vocabulary

MANIFEST_NAME = "manifest.conf"


class PackError(ValueError):
    def __init__(self, path, problems: list[str]):
        self.problems = list(problems)
        super().__init__(
            f"language pack {path} failed to load:\n  "
            + "\n  ".join(self.problems)
        )


@dataclass(frozen=True)
class LanguagePack:
    """Read-only after load; share freely across workers."""

    language: str
    version: str
    path: Path
    abbreviations: frozenset[str] = frozenset()
    titles: tuple[str, ...] = ()
    month_table: MonthTable | None = None
    date_order: str = "MDY"
    gazetteers: dict = field(default_factory=dict)   # name -> Gazetteer
    ruleset: RuleSet | None = None
    vocabs: dict = field(default_factory=dict)       # EntityLabel -> SurrogateVocabulary
    name_vocab: NameVocabulary | None = None
    coarse_overrides: dict = field(default_factory=dict)


def _load_titles(path) -> tuple[str, ...]:
    titles = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                titles.append(line)
    return tuple(titles)


def _parse_manifest(manifest_path: Path) -> dict:
    entries = {}
    with open(manifest_path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise PackError(
                    manifest_path.parent, [f"{manifest_path}:{lineno}: expected key = value"]
                )
            key, _, value = line.partition("=")
            entries[key.strip()] = value.strip()
    return entries


def load_pack(path) -> LanguagePack:
    """Load and validate every resource; all broken resources are reported
    together, not just the first."""
    pack_dir = Path(path)
    manifest_path = pack_dir / MANIFEST_NAME
    if not manifest_path.is_file():
        raise PackError(pack_dir, [f"missing {MANIFEST_NAME}"])
    entries = _parse_manifest(manifest_path)

    problems: list[str] = []
    language = entries.get("pack.language")
    if not language:
        problems.append("manifest missing pack.language")
        language = "?"
    version = entries.get("pack.version", "0")
    date_order = entries.get("option.date_order", "MDY")
    if date_order not in ("MDY", "DMY"):
        problems.append(f"option.date_order must be MDY or DMY, got {date_order!r}")
        date_order = "MDY"

    def resolve(relpath: str, key: str) -> Path | None:
        resource = pack_dir / relpath
        if not resource.is_file():
            problems.append(f"{key}: missing resource {relpath}")
            return None
        return resource

    abbreviations: frozenset[str] = frozenset()
    titles: tuple[str, ...] = ()
    month_table = None
    ruleset = None
    gazetteers: dict = {}
    vocabs: dict = {}
    first_vocab = last_vocab = None
    coarse_overrides: dict = {}

    for key, value in sorted(entries.items()):
        try:
            if key.startswith("pack.") or key.startswith("option."):
                continue
            elif key == "resource.abbreviations.main":
                if p := resolve(value, key):
                    abbreviations = load_abbreviations(p)
            elif key == "resource.titles.main":
                if p := resolve(value, key):
                    titles = _load_titles(p)
            elif key == "resource.months.main":
                if p := resolve(value, key):
                    month_table = load_month_table(p)
            elif key == "resource.ruleset.main":
                if p := resolve(value, key):
                    ruleset = compile_ruleset(p, language=language)
            elif key.startswith("resource.gazetteer."):
                name = key[len("resource.gazetteer."):]
                if p := resolve(value, key):
                    gazetteers[name] = load_gazetteer(p)
            elif key.startswith("resource.vocab."):
                name = key[len("resource.vocab."):]
                if p := resolve(value, key):
                    vocab = load_vocabulary(p, name)
                    if name == "first_name":
                        first_vocab = vocab
                    elif name == "last_name":
                        last_vocab = vocab
                    else:
                        vocabs[parse_label(name)] = vocab
            elif key.startswith("label.coarse."):
                granular = parse_label(key[len("label.coarse."):])
                coarse_overrides[granular] = parse_label(value)
            else:
                problems.append(f"unrecognized manifest key {key!r}")
        except Exception as exc:
            problems.append(f"{key}: {exc}")

    name_vocab = None
    if first_vocab and last_vocab:
        name_vocab = NameVocabulary(first=first_vocab, last=last_vocab)
    elif bool(first_vocab) != bool(last_vocab):
        problems.append("name vocabularies must ship both first_name and last_name")

    if problems:
        raise PackError(pack_dir, problems)
    return LanguagePack(
        language=language,
        version=version,
        path=pack_dir,
        abbreviations=abbreviations,
        titles=titles,
        month_table=month_table,
        date_order=date_order,
        gazetteers=gazetteers,
        ruleset=ruleset,
        vocabs=vocabs,
        name_vocab=name_vocab,
        coarse_overrides=coarse_overrides,
    )


def default_packs_dir() -> Path:
    return Path(__file__).resolve().parent / "packs"


def list_supported(packs_dir=None) -> list[str]:
    """Language codes of the packs discovered under packs_dir, sorted."""
    root = Path(packs_dir) if packs_dir else default_packs_dir()
    if not root.is_dir():
        return []
    return sorted(
        d.name for d in root.iterdir() if (d / MANIFEST_NAME).is_file()
    )
