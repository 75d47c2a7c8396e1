"""Command-line entry points.

Subcommands: parse, eval, export-training, derive-actions, report-relations.
A JSON config file can preload any flag (flags win); `parse` leaves a run
manifest next to its outputs so a run can be audited and reproduced.

Exit codes: 0 success, 2 configuration or I/O problems, 3 oracle transport
failure, 4 validation failure (malformed input, missing predictions,
replay divergence).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .bottomup import parse_bottom_up
from .core import (
    MalformedTree,
    Reduce,
    Shift,
    derive_shift_reduce_sequence,
    derive_split_sequence,
)
from .corpus import (
    ConfigError,
    DisSyntaxError,
    Document,
    MissingDocument,
    UnknownRelation,
    builtin_inventory,
    builtin_relation_map,
    load_inventory,
    load_relation_map,
    load_split_manifest,
    read_dis,
    read_tree,
    resolve_document_path,
    write_tree,
)
from .engine import EmptyDocument, ParsePolicy, ParseResult, trace_to_jsonl
from .metrics import (
    EmptyCorpus,
    ParsevalCounts,
    SegmentationMismatch,
    gold_relation_frequencies,
    micro_scores,
    per_relation_rows,
    score_document,
)
from .oracle import (
    CachedOracle,
    HttpOracle,
    KindMismatch,
    OracleFailure,
    ReplayExhausted,
    ScriptedOracle,
)
from .topdown import parse_top_down
from .training import (
    BOTTOM_UP,
    STRATEGIES,
    example_to_json,
    export_metadata,
    gold_walk,
    replay_oracle,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ORACLE = 3
EXIT_VALIDATION = 4

_VALIDATION_ERRORS = (
    MalformedTree,
    DisSyntaxError,
    SegmentationMismatch,
    EmptyCorpus,
    EmptyDocument,
    ReplayExhausted,
    KindMismatch,
    MissingDocument,
    UnknownRelation,
)


def write_text_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(f".{path.name}.{os.getpid()}.tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


# ---------------------------------------------------------------------------
# Shared option handling


def _add_corpus_options(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--corpus-dir", required=True, help="directory of .dis files")
    sub.add_argument("--manifest", help="split manifest (split<TAB>doc_id rows)")
    sub.add_argument("--split", help="only this split from the manifest")
    sub.add_argument(
        "--relation-map",
        help="relation map: bundled name (rst-dt-coarse, gum-rstdt) or file path",
    )


def _add_policy_options(sub: argparse.ArgumentParser) -> None:
    sub.add_argument(
        "--inventory",
        default="rst-dt",
        help="label inventory: bundled name (rst-dt, instr-dt) or file path",
    )
    sub.add_argument(
        "--query-forced",
        action="store_true",
        help="consult the oracle even on forced moves",
    )
    sub.add_argument(
        "--truncate",
        type=int,
        default=None,
        metavar="CHARS",
        help="center-elide span texts beyond this many characters",
    )


def _load_inventory(spec: str):
    if Path(spec).is_file():
        return load_inventory(spec)
    try:
        return builtin_inventory(spec)
    except FileNotFoundError:
        raise ConfigError(f"no bundled inventory or file named {spec!r}") from None


def _load_relation_map(spec: str | None):
    if spec is None:
        return None
    if Path(spec).is_file():
        return load_relation_map(spec)
    try:
        return builtin_relation_map(spec)
    except FileNotFoundError:
        raise ConfigError(f"no bundled relation map or file named {spec!r}") from None


def _policy(args: argparse.Namespace) -> ParsePolicy:
    return ParsePolicy(
        skip_forced=not args.query_forced, truncate_chars=args.truncate
    )


def _document_ids(args: argparse.Namespace) -> list[str]:
    corpus_dir = Path(args.corpus_dir)
    if not corpus_dir.is_dir():
        raise ConfigError(f"corpus directory {corpus_dir} does not exist")
    if args.manifest:
        splits = load_split_manifest(args.manifest)
        if args.split:
            if args.split not in splits:
                raise ConfigError(
                    f"manifest has no split {args.split!r}; "
                    f"found {sorted(splits)}"
                )
            return splits[args.split]
        return [doc_id for ids in splits.values() for doc_id in ids]
    if args.split:
        raise ConfigError("--split needs --manifest")
    names = sorted(p.name for p in corpus_dir.iterdir() if p.suffix == ".dis")
    if not names:
        raise ConfigError(f"no .dis files under {corpus_dir}")
    return names


def _load_documents(args: argparse.Namespace) -> list[Document]:
    relation_map = _load_relation_map(args.relation_map)
    docs = []
    for doc_id in _document_ids(args):
        path = resolve_document_path(args.corpus_dir, doc_id)
        docs.append(read_dis(path, relation_map))
    return docs


# ---------------------------------------------------------------------------
# parse


def _make_shared_oracle(args: argparse.Namespace):
    """Oracle shared across documents, or None when replay (per-document)."""
    if args.oracle == "replay":
        return None
    if args.oracle == "scripted":
        if not args.script:
            raise ConfigError("--oracle scripted needs --script FILE")
        answers = Path(args.script).read_text().splitlines()
        return ScriptedOracle(answers, cycle=args.cycle_script)
    if args.oracle == "http":
        if not args.endpoint or not args.model:
            raise ConfigError("--oracle http needs --endpoint and --model")
        oracle = HttpOracle(
            endpoint=args.endpoint,
            model=args.model,
            max_tokens=args.max_tokens,
            timeout=args.timeout,
            retries=args.retries,
            backoff=args.backoff,
        )
        if args.cache_dir:
            return CachedOracle(oracle, args.cache_dir)
        return oracle
    raise ConfigError(f"unknown oracle type {args.oracle!r}")


def cmd_parse(args: argparse.Namespace) -> int:
    started = time.time()
    inventory = _load_inventory(args.inventory)
    policy = _policy(args)
    documents = _load_documents(args)
    engine = parse_bottom_up if args.strategy == BOTTOM_UP else parse_top_down
    shared = _make_shared_oracle(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    def run_one(doc: Document) -> tuple[str, ParseResult]:
        oracle = shared
        if oracle is None:
            oracle = replay_oracle(doc, inventory, args.strategy, policy)
        result = engine(doc.edus, oracle, inventory, policy)
        write_text_atomic(out_dir / f"{doc.doc_id}.tree", write_tree(result.tree) + "\n")
        write_text_atomic(out_dir / f"{doc.doc_id}.trace.jsonl", trace_to_jsonl(result.trace))
        return doc.doc_id, result

    if args.workers > 1:
        with ThreadPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(run_one, documents))
    else:
        results = [run_one(doc) for doc in documents]

    doc_rows = []
    total_queries = total_corrected = 0
    for (doc_id, result), doc in zip(results, documents):
        total_queries += result.query_count
        total_corrected += result.corrected_count
        doc_rows.append(
            {
                "doc_id": doc_id,
                "edus": len(doc.edus),
                "decisions": len(result.trace),
                "queries": result.query_count,
                "corrected": result.corrected_count,
            }
        )

    config = _resolved_config(args)
    manifest = {
        "config": config,
        "config_hash": hashlib.sha256(
            json.dumps(config, sort_keys=True).encode()
        ).hexdigest(),
        "documents": doc_rows,
        "totals": {
            "documents": len(doc_rows),
            "queries": total_queries,
            "corrected": total_corrected,
        },
        "cache": shared.stats() if isinstance(shared, CachedOracle) else None,
        "elapsed_seconds": round(time.time() - started, 3),
    }
    write_text_atomic(
        out_dir / "run_manifest.json", json.dumps(manifest, indent=2) + "\n"
    )
    print(
        f"parsed {len(doc_rows)} documents with {args.strategy}: "
        f"{total_queries} queries, {total_corrected} corrected -> {out_dir}"
    )
    return EXIT_OK


def _resolved_config(args: argparse.Namespace) -> dict:
    config = {
        key: value
        for key, value in sorted(vars(args).items())
        if key not in ("func", "config") and not key.startswith("_")
    }
    return {k: str(v) if isinstance(v, Path) else v for k, v in config.items()}


# ---------------------------------------------------------------------------
# eval


def cmd_eval(args: argparse.Namespace) -> int:
    gold_args = argparse.Namespace(
        corpus_dir=args.gold_dir,
        manifest=args.manifest,
        split=args.split,
        relation_map=args.relation_map,
    )
    documents = _load_documents(gold_args)
    pred_dir = Path(args.pred_dir)
    include_root = not args.exclude_root
    total = ParsevalCounts()
    per_doc = {}
    for doc in documents:
        pred_path = pred_dir / f"{doc.doc_id}.tree"
        if not pred_path.is_file():
            raise MissingDocument(f"no prediction {pred_path}")
        predicted = read_tree(pred_path.read_text().strip(), doc.edus)
        assert doc.tree is not None
        counts = score_document(predicted, doc.tree, include_root)
        per_doc[doc.doc_id] = counts
        total = total + counts
    scores = micro_scores(total)
    print("level\tprecision\trecall\tf1")
    for level, score in scores.items():
        print(f"{level}\t{score.precision}\t{score.recall}\t{score.f1}")
    if args.out:
        payload = {
            "documents": len(per_doc),
            "counts": {
                "predicted": total.predicted,
                "gold": total.gold,
                "matched_span": total.matched_span,
                "matched_nuclearity": total.matched_nuclearity,
                "matched_relation": total.matched_relation,
                "matched_full": total.matched_full,
            },
            "scores": {
                level: {
                    "precision": score.precision,
                    "recall": score.recall,
                    "f1": score.f1,
                }
                for level, score in scores.items()
            },
        }
        write_text_atomic(Path(args.out), json.dumps(payload, indent=2) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# export-training


def cmd_export_training(args: argparse.Namespace) -> int:
    inventory = _load_inventory(args.inventory)
    policy = _policy(args)
    documents = _load_documents(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    kinds = (
        ("action", "nuclearity", "relation")
        if args.strategy == BOTTOM_UP
        else ("split", "nuclearity", "relation")
    )
    buffers: dict[str, list[str]] = {kind: [] for kind in kinds}
    for doc in documents:
        for example in gold_walk(doc, inventory, args.strategy, policy):
            buffers[example.kind].append(example_to_json(example))
    counts = {kind: len(lines) for kind, lines in buffers.items()}
    for kind, lines in buffers.items():
        path = out_dir / f"{args.strategy}.{kind}.jsonl"
        write_text_atomic(path, "\n".join(lines) + ("\n" if lines else ""))
    meta = export_metadata(inventory, args.strategy, policy, counts)
    meta["documents"] = len(documents)
    write_text_atomic(
        out_dir / f"{args.strategy}.meta.json", json.dumps(meta, indent=2) + "\n"
    )
    summary = ", ".join(f"{kind}={count}" for kind, count in counts.items())
    print(f"exported {summary} from {len(documents)} documents -> {out_dir}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# derive-actions


def cmd_derive_actions(args: argparse.Namespace) -> int:
    relation_map = _load_relation_map(args.relation_map)
    doc = read_dis(args.file, relation_map)
    assert doc.tree is not None
    if args.strategy == BOTTOM_UP:
        for action in derive_shift_reduce_sequence(doc.tree):
            if isinstance(action, Shift):
                print("shift")
            else:
                assert isinstance(action, Reduce)
                print(f"reduce\t{action.nuclearity}\t{action.relation}")
    else:
        for step in derive_split_sequence(doc.tree):
            first, last = step.span
            print(f"{first}\t{last}\t{step.k}\t{step.nuclearity}\t{step.relation}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# report-relations


def cmd_report_relations(args: argparse.Namespace) -> int:
    gold_args = argparse.Namespace(
        corpus_dir=args.gold_dir,
        manifest=args.manifest,
        split=args.split,
        relation_map=args.relation_map,
    )
    documents = _load_documents(gold_args)
    include_root = not args.exclude_root
    inventory = _load_inventory(args.inventory) if args.inventory else None
    seed = inventory.relations if inventory else ()

    if args.pred_dir:
        pred_dir = Path(args.pred_dir)
        pairs = []
        for doc in documents:
            pred_path = pred_dir / f"{doc.doc_id}.tree"
            if not pred_path.is_file():
                raise MissingDocument(f"no prediction {pred_path}")
            assert doc.tree is not None
            pairs.append((read_tree(pred_path.read_text().strip(), doc.edus), doc.tree))
        rows = per_relation_rows(pairs, seed, include_root)
        header = ("relation", "predicted", "gold", "matched", "f1")
        table = [
            (row.relation, row.predicted, row.gold, row.matched, row.f1)
            for row in rows
        ]
    else:
        frequencies = gold_relation_frequencies(
            (doc.tree for doc in documents if doc.tree is not None), include_root
        )
        for rel in seed:
            frequencies.setdefault(rel, 0)
        header = ("relation", "gold")
        table = sorted(frequencies.items(), key=lambda kv: (-kv[1], kv[0]))

    widths = [
        max(len(str(header[col])), *(len(str(row[col])) for row in table))
        if table
        else len(str(header[col]))
        for col in range(len(header))
    ]
    print("  ".join(str(h).ljust(w) for h, w in zip(header, widths)).rstrip())
    for row in table:
        print("  ".join(str(c).ljust(w) for c, w in zip(row, widths)).rstrip())

    if args.csv:
        with open(args.csv, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(header)
            writer.writerows(table)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser wiring


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rstkit",
        description="RST discourse parsing over a pluggable decision oracle",
    )
    parser.add_argument(
        "--config", help="JSON file preloading any flag (flags still win)"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("parse", help="parse documents to trees and traces")
    _add_corpus_options(sub)
    _add_policy_options(sub)
    sub.add_argument(
        "--strategy", choices=STRATEGIES, default=BOTTOM_UP
    )
    sub.add_argument(
        "--oracle", choices=("replay", "scripted", "http"), default="replay"
    )
    sub.add_argument("--script", help="answers file for --oracle scripted")
    sub.add_argument(
        "--cycle-script", action="store_true",
        help="repeat the scripted answers instead of failing at the end",
    )
    sub.add_argument("--endpoint", help="completion endpoint URL for --oracle http")
    sub.add_argument("--model", help="model id for --oracle http")
    sub.add_argument("--max-tokens", type=int, default=16)
    sub.add_argument("--timeout", type=float, default=60.0)
    sub.add_argument("--retries", type=int, default=3)
    sub.add_argument("--backoff", type=float, default=1.0)
    sub.add_argument("--cache-dir", help="persistent answer cache directory")
    sub.add_argument("--workers", type=int, default=1)
    sub.add_argument("--out", required=True, help="output directory")
    sub.set_defaults(func=cmd_parse)

    sub = commands.add_parser("eval", help="score predictions against gold trees")
    sub.add_argument("--gold-dir", required=True, help="directory of gold .dis files")
    sub.add_argument("--pred-dir", required=True, help="directory of .tree files")
    sub.add_argument("--manifest")
    sub.add_argument("--split")
    sub.add_argument("--relation-map")
    sub.add_argument(
        "--exclude-root", action="store_true",
        help="drop the whole-document tuple from both sides",
    )
    sub.add_argument("--out", help="also write scores as JSON here")
    sub.set_defaults(func=cmd_eval)

    sub = commands.add_parser(
        "export-training", help="emit prompt/completion training pairs"
    )
    _add_corpus_options(sub)
    _add_policy_options(sub)
    sub.add_argument("--strategy", choices=STRATEGIES, default=BOTTOM_UP)
    sub.add_argument("--out", required=True, help="output directory")
    sub.set_defaults(func=cmd_export_training)

    sub = commands.add_parser(
        "derive-actions", help="print the gold derivation of one document"
    )
    sub.add_argument("--file", required=True, help="a .dis file")
    sub.add_argument("--strategy", choices=STRATEGIES, default=BOTTOM_UP)
    sub.add_argument("--relation-map")
    sub.set_defaults(func=cmd_derive_actions)

    sub = commands.add_parser(
        "report-relations", help="per-relation frequencies and F1"
    )
    sub.add_argument("--gold-dir", required=True, help="directory of gold .dis files")
    sub.add_argument("--pred-dir", help="directory of .tree files (optional)")
    sub.add_argument("--manifest")
    sub.add_argument("--split")
    sub.add_argument("--relation-map")
    sub.add_argument("--inventory", default=None)
    sub.add_argument("--exclude-root", action="store_true")
    sub.add_argument("--csv", help="also write the table as CSV here")
    sub.set_defaults(func=cmd_report_relations)

    return parser


def _apply_config_file(parser: argparse.ArgumentParser, argv: list[str]) -> None:
    if "--config" not in argv:
        return
    index = argv.index("--config")
    if index + 1 >= len(argv):
        return  # argparse will complain properly
    path = Path(argv[index + 1])
    try:
        config = json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file {path} does not exist") from None
    except ValueError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
    if not isinstance(config, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    known = set()
    for action in parser._actions:  # includes subparsers
        known.add(action.dest)
        if isinstance(action, argparse._SubParsersAction):
            for sub in action.choices.values():
                known.update(a.dest for a in sub._actions)
    unknown = set(config) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    parser.set_defaults(**config)
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            for sub in action.choices.values():
                sub.set_defaults(
                    **{k: v for k, v in config.items()
                       if k in {a.dest for a in sub._actions}}
                )


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config_file(parser, argv)
        args = parser.parse_args(argv)
        return args.func(args)
    except _VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OracleFailure as exc:
        print(f"oracle failure: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
