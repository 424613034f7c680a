"""Train the toy classifier and walk through one explanation end to end.

Prints the per-token attribution, the positive cooperative pairs, the
refined minimal feature set, and the instance-level metrics for a single
sentence from the bundled corpus.
"""

from __future__ import annotations

import argparse
import sys

from minfeat.corpus import tokenize
from minfeat.data import build_toy_corpus
from minfeat.evaluation import single_instance_metrics
from minfeat.model import TrainConfig, instance_from_words, train_toy, training_accuracy
from minfeat.pipeline import CidrConfig, refine


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--index", type=int, default=0, help="corpus record to explain")
    parser.add_argument("--seed", type=int, default=0, help="pipeline seed")
    parser.add_argument("--beta", type=float, default=0.5)
    args = parser.parse_args(argv)

    corpus = build_toy_corpus()
    examples = [(tokenize(r.text), r.label) for r in corpus]
    print("training toy classifier on the bundled corpus ...")
    model = train_toy(examples, TrainConfig())
    print(f"training accuracy: {training_accuracy(model, examples):.3f}\n")

    record = corpus[args.index % len(corpus)]
    words = tokenize(record.text)
    instance, oov = instance_from_words(model, words, record.label)
    config = CidrConfig(beta=args.beta, seed=args.seed)
    mfs = refine(model, instance, config)

    probs = model.forward(instance.embeddings)
    print(f"record {record.id} (label {record.label}, {oov} OOV tokens)")
    print(f"  text: {record.text}")
    print(f"  predicted class {mfs.target_class} with probability {probs[mfs.target_class]:.3f}\n")

    att = mfs.pair_scores.attributions
    print("per-token attribution (positive tokens marked *):")
    for pos, word in enumerate(words):
        mark = "*" if pos in att.positive_words else " "
        print(f"  {pos:>3} {mark} {word:<14} {att.scores[pos]:+.4f}")

    print(f"\npositive pairs: {len(mfs.pair_scores.positive_pairs)}")
    print(f"bounds: u1={mfs.bounds.u1:.4f} u2={mfs.bounds.u2:.4f}")
    if mfs.degenerate:
        print("instance is degenerate; no pairs to refine")
        return 0

    print(f"\nminimal feature set after {config.n_iter} refinement iterations:")
    for pair in mfs.pairs:
        i, j = pair
        print(
            f"  ({words[i]}, {words[j]})  cig={mfs.pair_scores.records[pair].cig:+.4f}"
            f"  kept in {mfs.frequencies[pair]:.0%} of candidate sets"
        )
    print(f"covered words: {', '.join(words[w] for w in mfs.words)}")

    comp, lo, fms = single_instance_metrics(model, instance, mfs, config.t)
    print(f"\ninstance metrics: comp={comp:.3f} lo={lo:.3f} fms={fms:.0f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
