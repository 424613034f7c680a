"""Command-line entry points: train, explain, evaluate.

Exit codes: 0 on success, 2 for caller-correctable input or
configuration problems, 70 for internal invariant failures.
"""

from __future__ import annotations

import argparse
import json
import sys
import traceback
from typing import Any, Mapping

from .config import cidr_config_from, load_config, train_config_from
from .corpus import CorpusRecord, load_corpus, tokenize
from .errors import ConfigError, InputError, InternalError
from .evaluation import (
    METHODS,
    evaluate_methods,
    parallel_map,
    single_instance_metrics,
)
from .model import (
    Model,
    instance_from_words,
    load_model,
    save_model,
    train_toy,
    training_accuracy,
)
from .pipeline import CidrConfig, MinimalFeatureSet, refine
from .reports import (
    ExplanationReport,
    MfsEntry,
    PairScoreEntry,
    write_reports,
)


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="minfeat",
        description="Minimal feature-set explanations for text classifiers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="train the bundled toy classifier")
    train.add_argument("--corpus", required=True, help="corpus file, one JSON record per line")
    train.add_argument("--out", required=True, help="model checkpoint path to write")
    train.add_argument("--config", help="flat JSON config file")
    train.add_argument("--seed", type=int, help="override the config seed")
    train.set_defaults(func=run_train)

    explain = sub.add_parser("explain", help="write one explanation report per record")
    explain.add_argument("--config", help="flat JSON config file")
    explain.add_argument("--corpus", required=True)
    explain.add_argument("--model", required=True, help="model checkpoint path")
    explain.add_argument("--out", required=True, help="report file to write")
    explain.add_argument("--seed", type=int, help="override the config seed")
    explain.set_defaults(func=run_explain)

    evaluate = sub.add_parser("evaluate", help="score explanation methods on a corpus")
    evaluate.add_argument("--config", help="flat JSON config file")
    evaluate.add_argument("--corpus", required=True)
    evaluate.add_argument("--model", required=True)
    evaluate.add_argument("--out", help="metrics table file to write (JSON lines)")
    evaluate.add_argument("--seed", type=int, help="override the config seed")
    evaluate.add_argument(
        "--methods",
        default=",".join(METHODS),
        help=f"comma-separated subset of {', '.join(METHODS)}",
    )
    evaluate.set_defaults(func=run_evaluate)
    return parser


def _resolved_config(args: argparse.Namespace) -> dict[str, Any]:
    values = load_config(args.config)
    if getattr(args, "seed", None) is not None:
        if args.seed < 0:
            raise ConfigError("seed must be >= 0")
        values["seed"] = args.seed
    return values


def run_train(args: argparse.Namespace) -> int:
    values = _resolved_config(args)
    records = load_corpus(args.corpus)
    examples = [(tokenize(rec.text), rec.label) for rec in records]
    model = train_toy(examples, train_config_from(values))
    accuracy = training_accuracy(model, examples)
    save_model(model, args.out)
    print(f"trained on {len(examples)} records, training accuracy {accuracy:.3f}")
    print(f"model written to {args.out}")
    return 0


def _build_report(
    record: CorpusRecord,
    model: Model,
    instance,
    mfs: MinimalFeatureSet,
    words: list[str],
    oov: int,
    config_echo: Mapping[str, Any],
    t: float,
) -> ExplanationReport:
    pair_map = mfs.pair_scores
    att = pair_map.attributions
    probs = model.forward(instance.embeddings)
    comp, lo, fms = single_instance_metrics(model, instance, mfs, t)
    return ExplanationReport(
        instance_id=record.id,
        tokens=tuple(words),
        predicted_class=mfs.target_class,
        predicted_probability=float(probs[mfs.target_class]),
        ig=tuple(float(s) for s in att.scores),
        positive_pairs=tuple(
            PairScoreEntry(i=i, j=j, cig=pair_map.records[(i, j)].cig)
            for (i, j) in pair_map.positive_pairs
        ),
        mfs_pairs=tuple(
            MfsEntry(i=i, j=j, frequency=mfs.frequencies[(i, j)]) for (i, j) in mfs.pairs
        ),
        mfs_words=mfs.words,
        u1=mfs.bounds.u1,
        u2=mfs.bounds.u2,
        u2_prime=mfs.bounds.u2_prime,
        degenerate=mfs.degenerate,
        oov_count=oov,
        config=dict(config_echo),
        seed=int(config_echo["seed"]),
        comp=comp,
        lo=lo,
        fms=fms,
    )


def run_explain(args: argparse.Namespace) -> int:
    values = _resolved_config(args)
    config = cidr_config_from(values)
    model = load_model(args.model)
    records = load_corpus(args.corpus)

    def explain_one(record: CorpusRecord) -> tuple[ExplanationReport, int]:
        words = tokenize(record.text)
        instance, oov = instance_from_words(model, words, record.label)
        mfs = refine(model, instance, config)
        report = _build_report(record, model, instance, mfs, words, oov, values, config.t)
        return report, oov

    results = parallel_map(explain_one, records)
    reports = [report for report, _ in results]
    total_oov = sum(oov for _, oov in results)
    write_reports(reports, args.out)
    if total_oov:
        print(
            f"warning: {total_oov} out-of-vocabulary tokens were treated as PAD",
            file=sys.stderr,
        )
    degenerate = sum(1 for r in reports if r.degenerate)
    print(f"wrote {len(reports)} reports to {args.out} ({degenerate} degenerate)")
    return 0


def run_evaluate(args: argparse.Namespace) -> int:
    values = _resolved_config(args)
    config = cidr_config_from(values)
    model = load_model(args.model)
    records = load_corpus(args.corpus)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]

    instances = []
    for rec in records:
        instance, _ = instance_from_words(model, tokenize(rec.text), rec.label)
        instances.append(instance)

    rows = evaluate_methods(model, instances, methods, config)

    header = f"{'method':<18}{'LO':>12}{'Comp':>12}{'FMS':>12}{'N':>8}{'seed':>8}"
    print(header)
    for row in rows:
        print(
            f"{row.method:<18}{row.lo:>12.6f}{row.comp:>12.6f}{row.fms:>12.6f}"
            f"{row.n:>8d}{row.seed:>8d}"
        )
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            for row in rows:
                fh.write(
                    json.dumps(
                        {
                            "method": row.method,
                            "lo": row.lo,
                            "comp": row.comp,
                            "fms": row.fms,
                            "n": row.n,
                            "seed": row.seed,
                        },
                        sort_keys=True,
                        separators=(",", ":"),
                    )
                )
                fh.write("\n")
        print(f"metrics written to {args.out}")
    return 0


def main(argv: list[str] | None = None) -> int:
    try:
        args = _parser().parse_args(argv)
        return args.func(args)
    except InternalError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 70
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception:  # pragma: no cover - unexpected bugs
        traceback.print_exc()
        return 70


if __name__ == "__main__":
    sys.exit(main())
