"""Command-line surface: deidentify, reidentify, evaluate, validate-pack.

Documents are one-per-file UTF-8 text; document id is the path relative to
the input root. Patient ids come from a ``<file>.patient`` sidecar or a
``--patient-id-from`` regex over the relative path; documents without one
fall back to per-document consistency scopes.

Parallel runs partition work by patient so per-patient state never crosses
workers; outputs, the vault, and the summary are byte-identical for any
``--jobs`` value.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import os
import re
import sys
import time
from pathlib import Path

from .dates import DayShiftPolicy, load_shift_table
from .evaluate import (
    Annotation,
    MatchSpec,
    compute_metrics,
    format_report,
    group_by_doc,
    load_annotations,
)
from .langpack import PackError, default_packs_dir, list_supported, load_pack
from .merge import MergePolicy, load_policy
from .model import Document, parse_label
from .pipeline import ConfigError, Pipeline, PipelineConfig
from .rewrite import OBFUSCATE, RewriteResult, normalize_mode
from .vault import (
    VaultError,
    VaultWriter,
    load_vault,
    reidentify,
    vault_append,
)


def _parse_whitelist(value: str | None) -> frozenset:
    if not value:
        return frozenset()
    return frozenset(parse_label(name.strip()) for name in value.split(",") if name.strip())


def _parse_shift(value: str | None, seed: int | None) -> DayShiftPolicy | None:
    if not value:
        return None
    if value.startswith("fixed:"):
        table = load_shift_table(value[len("fixed:"):])
        return DayShiftPolicy(mode="fixed", per_patient=table, seed=seed or 0)
    if value.startswith("range:"):
        lo, _, hi = value[len("range:"):].partition(",")
        try:
            return DayShiftPolicy(
                mode="range", range_days=(int(lo), int(hi)), seed=seed or 0
            )
        except ValueError as exc:
            raise ConfigError(f"bad --shift range: {exc}") from None
    raise ConfigError(f"--shift must be fixed:<file> or range:<lo>,<hi>, got {value!r}")


def _parse_match(value: str | None) -> MatchSpec:
    if not value or value == "coverage":
        return MatchSpec()
    if value == "token":
        return MatchSpec(mode="token")
    if value.startswith("coverage:"):
        return MatchSpec(mode="coverage", threshold=float(value[len("coverage:"):]))
    raise ConfigError(f"--match must be coverage[:<t>] or token, got {value!r}")


def _discover_documents(input_dir: Path) -> list[str]:
    return sorted(
        p.relative_to(input_dir).as_posix()
        for p in input_dir.rglob("*.txt")
        if p.is_file()
    )


def _patient_id_for(input_dir: Path, relpath: str, pattern: re.Pattern | None) -> str | None:
    sidecar = input_dir / (relpath + ".patient")
    if sidecar.is_file():
        pid = sidecar.read_text(encoding="utf-8").strip()
        if pid:
            return pid
    if pattern is not None:
        m = pattern.search(relpath)
        if m:
            return m.group(1) if m.groups() else m.group(0)
    return None


def _load_document(input_dir: Path, relpath: str, pattern: re.Pattern | None) -> Document:
    text = (input_dir / relpath).read_text(encoding="utf-8")
    return Document(
        id=relpath,
        text=text,
        patient_id=_patient_id_for(input_dir, relpath, pattern),
    )


def _write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    try:
        tmp.write_text(text, encoding="utf-8")
        os.replace(tmp, path)
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise


# one pipeline per worker process, built lazily from the submitted config
_worker_pipeline: Pipeline | None = None


def _worker_init(pack_path: str, config: PipelineConfig) -> None:
    global _worker_pipeline
    _worker_pipeline = Pipeline(load_pack(pack_path), config)


def _worker_run(batch):
    """Process one patient group: (relpath, text, patient_id) triples."""
    out = []
    for relpath, text, patient_id in batch:
        doc = Document(id=relpath, text=text, patient_id=patient_id)
        try:
            outcome = _worker_pipeline.process(doc)
            out.append((relpath, patient_id, outcome.result, outcome.label_counts(), None))
        except Exception as exc:
            out.append((relpath, patient_id, None, {}, f"{type(exc).__name__}: {exc}"))
    return out


def _run_parallel(groups, pack_path: str, config: PipelineConfig, jobs: int):
    results = {}
    if jobs <= 1:
        _worker_init(pack_path, config)
        for batch in groups:
            for row in _worker_run(batch):
                results[row[0]] = row
        return results
    with concurrent.futures.ProcessPoolExecutor(
        max_workers=jobs, initializer=_worker_init, initargs=(pack_path, config)
    ) as pool:
        for rows in pool.map(_worker_run, groups):
            for row in rows:
                results[row[0]] = row
    return results


def _resolve_pack_path(args) -> Path:
    packs_dir = Path(args.packs) if args.packs else default_packs_dir()
    pack_path = packs_dir / args.lang
    if not pack_path.is_dir():
        known = ", ".join(list_supported(packs_dir)) or "none"
        raise ConfigError(f"no language pack {args.lang!r} under {packs_dir} (found: {known})")
    return pack_path


def cmd_deidentify(args) -> int:
    started = time.monotonic()
    input_dir = Path(args.input)
    output_dir = Path(args.output)
    if not input_dir.is_dir():
        print(f"error: input directory {input_dir} does not exist", file=sys.stderr)
        return 2
    pack_path = _resolve_pack_path(args)

    vault_path = Path(args.vault) if args.vault else None
    if vault_path is not None and not args.force_same_dir:
        out_resolved = output_dir.resolve()
        vault_parent = vault_path.resolve().parent
        if vault_parent == out_resolved or out_resolved in vault_parent.parents:
            print(
                "error: refusing to write the vault into the de-identified "
                "output directory (use --force-same-dir to override)",
                file=sys.stderr,
            )
            return 2

    mode = normalize_mode(args.mode)
    if mode == OBFUSCATE and args.seed is None:
        print("error: --mode obfuscate requires --seed", file=sys.stderr)
        return 2
    config = PipelineConfig(
        language=args.lang,
        mode=mode,
        fixed_mask_width=args.width,
        whitelist=_parse_whitelist(args.whitelist),
        length_mode="same-length" if args.same_length else "free",
        date_fallback=args.date_fallback,
        seed=args.seed,
        shift_policy=_parse_shift(args.shift, args.seed),
        merge_policy=load_policy(args.policy) if args.policy else None,
    )
    # fail fast on a broken pack or config before any worker spins up
    Pipeline(load_pack(pack_path), config)

    pattern = re.compile(args.patient_id_from) if args.patient_id_from else None
    relpaths = _discover_documents(input_dir)

    # partition by patient so per-patient state stays inside one worker
    groups_by_key: dict[str, list] = {}
    for relpath in relpaths:
        doc = _load_document(input_dir, relpath, pattern)
        key = doc.chunk_key()
        groups_by_key.setdefault(key, []).append((relpath, doc.text, doc.patient_id))
    groups = [groups_by_key[k] for k in sorted(groups_by_key)]

    results = _run_parallel(groups, str(pack_path), config, max(1, args.jobs))

    failures = []
    label_totals: dict[str, int] = {}
    writer = VaultWriter(vault_path, seed=args.seed) if vault_path else None
    try:
        for relpath in relpaths:
            _, patient_id, result, counts, error = results[relpath]
            if error is not None:
                failures.append((relpath, error))
                continue
            if writer is not None:
                try:
                    vault_append(
                        result,
                        Document(id=relpath, text=result.text, patient_id=patient_id),
                        writer,
                    )
                except VaultError as exc:
                    # no de-identified output without its vault entry
                    failures.append((relpath, f"vault: {exc}"))
                    continue
            _write_atomic(output_dir / relpath, result.text)
            for label, n in counts.items():
                label_totals[label] = label_totals.get(label, 0) + n
    finally:
        if writer is not None:
            writer.close()

    elapsed = time.monotonic() - started
    processed = len(relpaths) - len(failures)
    print(f"documents processed: {processed}/{len(relpaths)}")
    for label in sorted(label_totals):
        print(f"chunks {label}: {label_totals[label]}")
    print(f"wall time: {elapsed:.2f}s")
    for relpath, error in failures:
        print(f"failed {relpath}: {error}", file=sys.stderr)
    return 0 if not failures else 1


def cmd_reidentify(args) -> int:
    input_dir = Path(args.input)
    output_dir = Path(args.output)
    if not input_dir.is_dir():
        print(f"error: input directory {input_dir} does not exist", file=sys.stderr)
        return 2
    try:
        store = load_vault(args.vault)
    except (OSError, VaultError) as exc:
        print(f"error: cannot load vault: {exc}", file=sys.stderr)
        return 2
    failures = []
    restored = 0
    for relpath in _discover_documents(input_dir):
        text = (input_dir / relpath).read_text(encoding="utf-8")
        try:
            original = reidentify(text, relpath, store)
        except VaultError as exc:
            failures.append((relpath, str(exc)))
            continue
        _write_atomic(output_dir / relpath, original)
        restored += 1
    print(f"documents restored: {restored}")
    for relpath, error in failures:
        print(f"failed {relpath}: {error}", file=sys.stderr)
    return 0 if not failures else 1


def cmd_evaluate(args) -> int:
    spec = _parse_match(args.match)
    if args.exclude:
        spec = MatchSpec(
            mode=spec.mode,
            threshold=spec.threshold,
            excluded_labels=frozenset(
                name.strip() for name in args.exclude.split(",") if name.strip()
            ),
        )
    golds = group_by_doc(load_annotations(args.gold))
    if args.pred:
        preds = group_by_doc(load_annotations(args.pred))
    elif args.input:
        input_dir = Path(args.input)
        pack_path = _resolve_pack_path(args)
        pipeline = Pipeline(load_pack(pack_path), PipelineConfig(language=args.lang))
        pattern = re.compile(args.patient_id_from) if args.patient_id_from else None
        preds = {}
        for relpath in _discover_documents(input_dir):
            doc = _load_document(input_dir, relpath, pattern)
            merged = pipeline.detect(doc)
            preds[relpath] = [
                Annotation(doc_id=relpath, span=c.span, label=c.label.value)
                for c in merged.chunks
            ]
    else:
        print("error: evaluate needs --pred or --input", file=sys.stderr)
        return 2
    report = compute_metrics(preds, golds, spec)
    print(format_report(report))
    return 0


def cmd_validate_pack(args) -> int:
    try:
        pack = load_pack(args.pack)
    except PackError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    print(
        f"pack {pack.language} v{pack.version}: OK "
        f"({len(pack.gazetteers)} gazetteers, "
        f"{len(pack.ruleset.rules) if pack.ruleset else 0} rules, "
        f"{len(pack.vocabs) + (2 if pack.name_vocab else 0)} vocabularies)"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="deidpipe",
        description="De-identify free-text clinical notes (and undo it, with the vault).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("deidentify", help="mask or obfuscate a document corpus")
    p.add_argument("--input", required=True, help="input directory of .txt documents")
    p.add_argument("--output", required=True, help="output directory (mirrors input)")
    p.add_argument("--lang", default="en")
    p.add_argument("--packs", help="language packs directory (default: shipped packs)")
    p.add_argument(
        "--mode",
        default="mask-entity",
        choices=["mask-entity", "mask-fixed", "mask-length", "mask-same-length", "obfuscate"],
    )
    p.add_argument("--width", type=int, default=3, help="mask width for mask-fixed")
    p.add_argument("--whitelist", help="comma-separated labels left untouched")
    p.add_argument("--seed", type=int, help="run seed (required for obfuscate)")
    p.add_argument("--shift", help="day shift: fixed:<file> or range:<lo>,<hi>")
    p.add_argument("--same-length", action="store_true", help="length-preserving obfuscation")
    p.add_argument("--date-fallback", default="mask", choices=["mask", "random"])
    p.add_argument("--vault", help="write re-identification vault to this file")
    p.add_argument("--policy", help="merge priority policy file")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--patient-id-from", help="regex over the relative path; group 1 is the patient id")
    p.add_argument("--force-same-dir", action="store_true")
    p.set_defaults(func=cmd_deidentify)

    p = sub.add_parser("reidentify", help="restore originals from a vault")
    p.add_argument("--input", required=True, help="directory of de-identified .txt documents")
    p.add_argument("--output", required=True)
    p.add_argument("--vault", required=True)
    p.set_defaults(func=cmd_reidentify)

    p = sub.add_parser("evaluate", help="score predictions against gold annotations")
    p.add_argument("--gold", required=True, help="gold file: doc_id<TAB>start<TAB>end<TAB>label")
    p.add_argument("--pred", help="prediction file in the same format")
    p.add_argument("--input", help="or: detect over this corpus with the loaded pack")
    p.add_argument("--lang", default="en")
    p.add_argument("--packs")
    p.add_argument("--match", default="coverage:0.6", help="coverage[:<t>] or token")
    p.add_argument("--exclude", help="comma-separated labels excluded from scoring")
    p.add_argument("--patient-id-from")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("validate-pack", help="load a language pack and report problems")
    p.add_argument("--pack", required=True, help="pack directory")
    p.set_defaults(func=cmd_validate_pack)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, PackError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
