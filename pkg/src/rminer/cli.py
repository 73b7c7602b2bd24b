"""Command-line interface.

Commands: ingest, score-rank, evaluate, ablate, sweep, synth, report.
Exit codes: 0 success, 1 evaluation found contract violations, 2 usage or
input errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import ConfigError, load_app_config, make_scorer
from .corpus_io import load_corpus, save_corpus, save_diagnostics
from .evaluation import (
    NDCG_KS,
    GroundTruthError,
    ablation,
    average_ndcg,
    evaluate_ndcg,
    load_ground_truth,
    parameter_sweep,
    rank_match_table,
    verify_evaluation,
    write_ablation_csv,
    write_ndcg_csv,
    write_rank_match_csv,
    write_sweep_csv,
)
from .pipeline import ingest
from .ranking import rank_corpus
from .report import render_report
from .synth import SynthError, SynthSpec, generate
from .validation import InputValidationError


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="PATH",
                        help="JSON config file (or set RMINER_CONFIG)")
    parser.add_argument("--lexicon", metavar="PATH",
                        help="lexicon JSON overriding the configured one")
    parser.add_argument("--out", metavar="DIR", default=".",
                        help="output directory (default: current)")
    parser.add_argument("--seed", type=int, default=None, metavar="N",
                        help="random seed (synthetic generation)")
    parser.add_argument("--jobs", type=int, default=None, metavar="N",
                        help="worker processes for scoring (0 = all cores)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rminer",
        description="Mine decision rationale sentences from proposal "
                    "discussion archives.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse archives and build a linked corpus")
    _add_common(p)
    p.add_argument("--mbox", nargs="+", required=True, metavar="FILE",
                   help="mbox archive files")
    p.add_argument("--peps", nargs="+", required=True, metavar="PATH",
                   help="proposal document files or directories")
    p.add_argument("--commits", metavar="FILE",
                   help="commit log CSV (date,pep,status[,commit])")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("score-rank", help="score sentences and rank them")
    _add_common(p)
    p.add_argument("--corpus", required=True, metavar="FILE")
    p.add_argument("--pep", type=int, action="append", default=None,
                   metavar="N", help="restrict to this proposal (repeatable)")
    p.add_argument("--scheme", choices=("sbs", "mbs", "both"), default="both")
    p.add_argument("--state", choices=("accepted", "rejected", "all"),
                   default="all", help="restrict to proposals in this state")
    p.add_argument("--top", type=int, default=None, metavar="K",
                   help="keep only the top K entries per list")
    p.set_defaults(func=cmd_score_rank)

    p = sub.add_parser("evaluate", help="compare rankings against ground truth")
    _add_common(p)
    p.add_argument("--corpus", required=True, metavar="FILE")
    p.add_argument("--truth", required=True, metavar="FILE")
    p.add_argument("--k", default=None, metavar="K1,K2",
                   help="NDCG cutoffs (default: 5,10,15,30,50,100)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("ablate", help="leave-one-out heuristic influence table")
    _add_common(p)
    p.add_argument("--corpus", required=True, metavar="FILE")
    p.add_argument("--truth", required=True, metavar="FILE")
    p.add_argument("--top", type=int, default=5, metavar="K",
                   help="top-K objective cutoff (default 5)")
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("sweep", help="coordinate search over heuristic deltas")
    _add_common(p)
    p.add_argument("--corpus", required=True, metavar="FILE")
    p.add_argument("--truth", required=True, metavar="FILE")
    p.add_argument("--heuristics", default=None, metavar="A,B,C",
                   help="heuristics to sweep (default: the eligible seven)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("synth", help="generate a synthetic planted corpus")
    _add_common(p)
    p.add_argument("--spec", metavar="FILE", help="generation spec JSON")
    p.add_argument("--n-peps", type=int, default=None, metavar="N")
    p.add_argument("--messages", default=None, metavar="LO,HI",
                   help="messages per proposal range")
    p.add_argument("--noise", default=None, metavar="LO,HI",
                   help="noise sentences per message range")
    p.add_argument("--adversarial", action="store_true",
                   help="inject lexicon phrases into noise")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("report", help="render the static HTML browser")
    _add_common(p)
    p.add_argument("--corpus", required=True, metavar="FILE")
    p.add_argument("--truth", default=None, metavar="FILE")
    p.add_argument("--top", type=int, default=10, metavar="K",
                   help="entries shown per ranking table")
    p.set_defaults(func=cmd_report)

    return parser


def _parse_int_list(raw: str, flag: str) -> list[int]:
    try:
        values = [int(part) for part in raw.split(",") if part.strip()]
    except ValueError as exc:
        raise ConfigError(f"{flag}: expected comma-separated integers: {exc}")
    if not values:
        raise ConfigError(f"{flag}: empty list")
    return values


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_scored(args):
    """Shared corpus -> scored-sentences path used by most commands."""
    config = load_app_config(args.config)
    corpus = load_corpus(args.corpus)
    scorer = make_scorer(config, lexicon=args.lexicon, n_jobs=args.jobs)
    scorer.fit(corpus)
    return config, corpus, scorer, scorer.transform(corpus)


def cmd_ingest(args) -> int:
    config = load_app_config(args.config)
    corpus, diagnostics = ingest(args.mbox, args.peps, args.commits, config)
    out = _out_dir(args)
    save_corpus(corpus, out / "corpus.jsonl")
    save_diagnostics(diagnostics, out / "diagnostics.json", summary={
        "messages": len(corpus.messages),
        "proposals": len(corpus.peps),
        "linked_messages": sum(len(v) for v in corpus.per_pep_index.values()),
    })
    print(f"ingested {len(corpus.messages)} messages, "
          f"{len(corpus.peps)} proposals -> {out / 'corpus.jsonl'}")
    return 0


def _filter_rankings(rankings, corpus, args):
    wanted = set(args.pep) if args.pep else None
    out = {}
    for pep, per_scheme in rankings.items():
        if wanted is not None and pep not in wanted:
            continue
        if args.state != "all" and corpus.peps[pep].final_state != args.state:
            continue
        out[pep] = per_scheme
    return out


def _write_ranked(rankings, scheme: str, out: Path, top: int | None) -> Path:
    records = []
    for pep in sorted(rankings):
        ranked = rankings[pep].get(scheme)
        if ranked is None:
            continue
        record = ranked.to_record()
        if top is not None:
            record["entries"] = record["entries"][:top]
        records.append(record)
    path = out / f"ranked_{scheme}.json"
    path.write_text(json.dumps(records, indent=2, ensure_ascii=False,
                               sort_keys=True) + "\n", encoding="utf-8")
    return path


def cmd_score_rank(args) -> int:
    config, corpus, scorer, scored = _load_scored(args)
    out = _out_dir(args)

    with (out / "scored.jsonl").open("w", encoding="utf-8", newline="\n") as fh:
        for s in scored:
            fh.write(json.dumps({
                "pep": s.pep,
                "message_id": s.message_id,
                "sentence_index": s.sentence_index,
                "components": s.vector.components,
                "fs": s.fs,
            }, sort_keys=True))
            fh.write("\n")

    rankings = rank_corpus(scored, args.scheme, config.min_score)
    rankings = _filter_rankings(rankings, corpus, args)
    schemes = ("sbs", "mbs") if args.scheme == "both" else (args.scheme,)
    for scheme in schemes:
        path = _write_ranked(rankings, scheme, out, args.top)
        print(f"wrote {path}")
    return 0


def cmd_evaluate(args) -> int:
    config, corpus, scorer, scored = _load_scored(args)
    truth = load_ground_truth(args.truth)
    for err in truth.errors:
        print(f"ground truth: {err}", file=sys.stderr)
    for warning in truth.warnings:
        print(f"ground truth: {warning}", file=sys.stderr)

    rankings = rank_corpus(scored, "both", config.min_score)
    table = rank_match_table(truth.entries, rankings)
    ks = tuple(_parse_int_list(args.k, "--k")) if args.k else NDCG_KS
    per_pep = evaluate_ndcg(truth.entries, rankings, ks)
    averages = average_ndcg(per_pep, ks)

    out = _out_dir(args)
    write_rank_match_csv(table, out / "rank_match.csv")
    write_ndcg_csv(per_pep, averages, out / "ndcg.csv", ks)
    print(f"wrote {out / 'rank_match.csv'} and {out / 'ndcg.csv'}")

    violations = verify_evaluation(truth.entries, rankings, table, per_pep)
    for v in violations:
        print(f"violation: {v}", file=sys.stderr)
    return 1 if violations else 0


def cmd_ablate(args) -> int:
    config, corpus, scorer, _ = _load_scored(args)
    truth = load_ground_truth(args.truth)
    table = ablation(corpus, scorer, truth.entries, k=args.top)
    out = _out_dir(args)
    write_ablation_csv(table, out / "ablation.csv")
    print(f"wrote {out / 'ablation.csv'}")
    return 0


def cmd_sweep(args) -> int:
    config, corpus, scorer, _ = _load_scored(args)
    truth = load_ground_truth(args.truth)
    heuristics = args.heuristics.split(",") if args.heuristics else None
    result = parameter_sweep(corpus, scorer, truth.entries, heuristics)
    out = _out_dir(args)
    write_sweep_csv(result, out / "sweep.csv")
    best_path = out / "best_config.json"
    best_path.write_text(json.dumps({
        "sweep_delta": result.best_sweep_delta,
        "objective_start": result.objective_start,
        "objective_best": result.objective_best,
    }, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {out / 'sweep.csv'} and {best_path}")
    print(f"objective: {result.objective_start} -> {result.objective_best}")
    return 0


def cmd_synth(args) -> int:
    if args.spec:
        spec = SynthSpec.from_file(args.spec)
    else:
        spec = SynthSpec()
    if args.n_peps is not None:
        spec.n_peps = args.n_peps
    if args.messages:
        lo, hi = _parse_int_list(args.messages, "--messages")[:2]
        spec.messages_per_pep = (lo, hi)
    if args.noise:
        lo, hi = _parse_int_list(args.noise, "--noise")[:2]
        spec.noise_sentences_per_message = (lo, hi)
    if args.adversarial:
        spec.adversarial = True
    if args.seed is not None:
        spec.seed = args.seed
    spec.validate()
    result = generate(spec, _out_dir(args))
    print(f"generated {spec.n_peps} proposals, "
          f"{len(result.planted)} planted sentences -> {result.out_dir}")
    return 0


def cmd_report(args) -> int:
    config, corpus, scorer, scored = _load_scored(args)
    truth_entries = None
    if args.truth:
        truth_entries = load_ground_truth(args.truth).entries
    rankings = rank_corpus(scored, "both", config.min_score)
    out = _out_dir(args)
    warnings = render_report(corpus, rankings, out, truth_entries, args.top)
    for warning in warnings:
        print(f"warning: {warning}", file=sys.stderr)
    print(f"wrote {out / 'index.html'} ({len(rankings)} proposal pages)")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, GroundTruthError, SynthError,
            InputValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
