"""Command-line entry point: train, predict, analyze, annotate, emotions,
stats.

Exit codes are a stable contract: 0 success, 2 data error, 64 usage error.
All randomness is seeded via --seed (default 42) and recorded in outputs.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from pathlib import Path

from . import annotate, classify, corpus, emotion, evaluate, features, report, textprep
from .errors import StressKitError

log = logging.getLogger("stresskit")

EXIT_OK = 0
EXIT_DATA = 2
EXIT_USAGE = 64


class Parser(argparse.ArgumentParser):
    """argparse parser whose usage errors exit with code 64."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _threshold(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not 0 < value <= 1:
        raise argparse.ArgumentTypeError("threshold must be in (0, 1]")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> Parser:
    parser = Parser(prog="stresskit", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=42, help="RNG seed (default 42)")
    common.add_argument("--jobs", type=_positive_int, default=1,
                        help="parallel workers for corpus classification")
    common.add_argument("--stopwords", metavar="FILE",
                        help="stopword list (default: vendored 179-word English list)")
    common.add_argument("--format", choices=("json", "csv", "both"), default="both",
                        help="report output format (analyze)")
    common.add_argument("--summary", action="store_true",
                        help="print the load summary as a JSON object")

    sub = parser.add_subparsers(dest="command", required=True, parser_class=Parser)

    p = sub.add_parser("train", parents=[common], help="train a classifier on a labeled CSV")
    p.add_argument("train_csv")
    p.add_argument("--classifier", choices=("logistic", "nb", "svm"), default="logistic")
    p.add_argument("--features", choices=("bow", "tfidf"), default="bow")
    p.add_argument("--model-out", default="model.json")
    p.add_argument("--eval", dest="eval_csv", help="held-out labeled CSV to evaluate on")
    p.add_argument("--lr", type=float, default=0.1, help="logistic learning rate")
    p.add_argument("--epochs", type=int, default=500, help="logistic epochs")
    p.add_argument("--l2", type=float, default=1e-4, help="logistic L2 strength")
    p.add_argument("--alpha", type=float, default=1.0, help="naive bayes smoothing")
    p.add_argument("--lam", type=float, default=1e-4, help="svm regularization")
    p.add_argument("--svm-epochs", type=int, default=10, help="svm passes over the data")
    p.add_argument("--min-df", type=int, default=1)
    p.add_argument("--max-vocab", type=int, default=None)
    p.set_defaults(handler=cmd_train)

    p = sub.add_parser("predict", parents=[common], help="classify a posts CSV")
    p.add_argument("model")
    p.add_argument("posts_csv")
    p.add_argument("--out", default="predictions.csv")
    p.set_defaults(handler=cmd_predict)

    p = sub.add_parser("analyze", parents=[common],
                       help="classify a posts CSV and emit the stress report")
    p.add_argument("model")
    p.add_argument("posts_csv")
    p.add_argument("--mapping", help="community,group CSV (default: built-in academic mapping)")
    p.add_argument("--lexicon", help="emotion lexicon TSV (default: vendored)")
    p.add_argument("--out-dir", default="reports")
    p.add_argument("--top-n", type=_positive_int, default=10)
    p.set_defaults(handler=cmd_analyze)

    p = sub.add_parser("annotate", parents=[common],
                       help="aggregate an annotation sheet into consensus labels")
    p.add_argument("annotations_csv")
    p.add_argument("--weights", help="annotator_id,weight CSV (default: all 1.0)")
    p.add_argument("--threshold", type=_threshold, default=0.40,
                   help="annotator outlier-rate exclusion threshold (default 0.40)")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(handler=cmd_annotate)

    p = sub.add_parser("emotions", parents=[common],
                       help="emotion-profile a CSV of texts or posts")
    p.add_argument("input_csv")
    p.add_argument("--lexicon", help="emotion lexicon TSV (default: vendored)")
    p.add_argument("--out", default="emotions.csv")
    p.set_defaults(handler=cmd_emotions)

    p = sub.add_parser("stats", parents=[common], help="corpus statistics for a posts CSV")
    p.add_argument("posts_csv")
    p.set_defaults(handler=cmd_stats)

    return parser


def _pipeline_config(args) -> textprep.PipelineConfig:
    if args.stopwords:
        return textprep.PipelineConfig(stopwords=textprep.load_stopwords(args.stopwords))
    return textprep.PipelineConfig.default()


def _require(path: str, what: str) -> Path:
    p = Path(path)
    if not p.exists():
        raise StressKitError(f"{what} not found: {path}")
    return p


def _lexicon(args) -> emotion.EmotionLexicon:
    if args.lexicon:
        _require(args.lexicon, "lexicon file")
        return emotion.load_lexicon(args.lexicon)
    return emotion.default_lexicon()


def cmd_train(args) -> int:
    _require(args.train_csv, "training file")
    config = _pipeline_config(args)
    examples, summary = corpus.load_labeled_with_summary(args.train_csv)
    if args.summary:
        print(summary.to_json())
    docs = [textprep.preprocess(ex.text, config) for ex in examples]
    vocab = features.fit_vocabulary(docs, min_df=args.min_df, max_size=args.max_vocab)
    pairs = [
        (features.vectorize(doc, vocab, args.features), ex.label)
        for doc, ex in zip(docs, examples)
    ]
    fingerprint = config.fingerprint()
    started = time.perf_counter()
    if args.classifier == "logistic":
        model = classify.train_logistic(
            pairs,
            classify.LogisticHyper(
                learning_rate=args.lr, epochs=args.epochs, l2=args.l2, seed=args.seed
            ),
            vocabulary=vocab,
            fingerprint=fingerprint,
            feature_kind=args.features,
        )
    elif args.classifier == "nb":
        model = classify.train_naive_bayes(
            pairs,
            args.alpha,
            vocabulary=vocab,
            fingerprint=fingerprint,
            feature_kind=args.features,
        )
    else:
        model = classify.train_svm(
            pairs,
            classify.SvmHyper(lam=args.lam, epochs=args.svm_epochs, seed=args.seed),
            vocabulary=vocab,
            fingerprint=fingerprint,
            feature_kind=args.features,
        )
    elapsed = time.perf_counter() - started
    classify.save_model(model, args.model_out)
    print(
        f"trained {args.classifier} ({args.features}) on {len(examples)} examples, "
        f"vocabulary {vocab.size}, {elapsed:.1f}s -> {args.model_out}"
    )
    if args.eval_csv:
        _require(args.eval_csv, "evaluation file")
        held_out = corpus.load_labeled(args.eval_csv)
        predicted = [
            classify.predict(model, features.vectorize(
                textprep.preprocess(ex.text, config), vocab, args.features)).label
            for ex in held_out
        ]
        rep = evaluate.metrics(evaluate.confusion(predicted, [ex.label for ex in held_out]))
        feature_name = "BoW" if args.features == "bow" else "TF-IDF"
        clf_name = {"logistic": "Logistic Regression", "nb": "Naive Bayes", "svm": "SVM"}[
            args.classifier
        ]
        print(evaluate.render_table([(feature_name, clf_name, rep)]))
        matrix = rep.matrix
        print(f"confusion: TP={matrix.tp} FP={matrix.fp} TN={matrix.tn} FN={matrix.fn}")
    return EXIT_OK


def cmd_predict(args) -> int:
    _require(args.model, "model file")
    _require(args.posts_csv, "posts file")
    model = classify.load_model(args.model)
    config = _pipeline_config(args)
    if model.pipeline_fingerprint and model.pipeline_fingerprint != config.fingerprint():
        print("warning: model preprocessing fingerprint does not match current "
              "configuration", file=sys.stderr)
    rows_read = kept = skipped = 0
    skip_reasons: list[str] = []
    with open(args.out, "w", newline="", encoding="utf-8") as handle:
        writer = None
        for fieldnames, raw, record, reason in corpus.iter_post_rows(args.posts_csv):
            if writer is None:
                writer = csv.writer(handle)
                writer.writerow([*fieldnames, "label", "probability"])
            rows_read += 1
            if record is None:
                skipped += 1
                skip_reasons.append(reason)
                writer.writerow([*(raw.get(f, "") for f in fieldnames), "", ""])
                continue
            doc = textprep.preprocess(record.text, config)
            pred = classify.predict(
                model, features.vectorize(doc, model.vocabulary, model.feature_kind)
            )
            writer.writerow([*(raw.get(f, "") for f in fieldnames), pred.label, repr(pred.score)])
            kept += 1
        if writer is None:  # empty input: still emit a header
            with open(args.posts_csv, newline="", encoding="utf-8") as src:
                header = next(csv.reader(src), [])
            csv.writer(handle).writerow([*header, "label", "probability"])
    if args.summary:
        print(json.dumps({
            "rows_read": rows_read,
            "rows_kept": kept,
            "rows_skipped": skipped,
            "errors": skip_reasons,
        }))
    print(f"wrote {args.out} ({kept} classified, {skipped} skipped)")
    return EXIT_OK


def cmd_analyze(args) -> int:
    _require(args.model, "model file")
    _require(args.posts_csv, "posts file")
    if args.mapping:
        _require(args.mapping, "group-mapping file")
        group_map = report.load_group_map(args.mapping)
    else:
        group_map = dict(report.DEFAULT_GROUP_MAP)
    lexicon = _lexicon(args)
    model = classify.load_model(args.model)
    config = _pipeline_config(args)
    posts, summary = corpus.load_posts_with_summary(args.posts_csv)
    if args.summary:
        print(summary.to_json())
    classified = report.classify_corpus(
        model, posts, config, lexicon=lexicon, jobs=args.jobs
    )
    result = report.build_report(
        classified,
        group_map,
        config=config,
        lexicon=lexicon,
        top_n=args.top_n,
        model_kind=model.kind,
        model_fingerprint=model.pipeline_fingerprint,
        seed=args.seed,
    )
    outdir = Path(args.out_dir)
    written = []
    if args.format in ("json", "both"):
        written += report.emit_report(result, "json", outdir / "report.json")
    if args.format in ("csv", "both"):
        written += report.emit_report(result, "csv", outdir)
    print(f"{'group':<24}{'total':>8}{'stressed':>10}{'stressed%':>11}{'not%':>8}")
    for g in result.groups:
        print(f"{g.name:<24}{g.total:>8}{g.stressed:>10}{g.stressed_pct:>11.1f}"
              f"{g.not_stressed_pct:>8.1f}")
    print(f"mean stress level: {result.overall_mean_stress_pct}%")
    print("wrote: " + ", ".join(str(p) for p in written))
    return EXIT_OK


def cmd_annotate(args) -> int:
    _require(args.annotations_csv, "annotation file")
    weights = None
    if args.weights:
        _require(args.weights, "weights file")
        weights = annotate.load_weights(args.weights)
    matrix = annotate.load_annotations(args.annotations_csv, weights)
    flags = annotate.detect_outliers(matrix)
    rates = annotate.outlier_rates(matrix, flags)
    surviving = annotate.exclude_annotators(matrix, flags, args.threshold)
    consensus = annotate.weighted_consensus(surviving)
    excluded = [
        {"annotator": a, "rate": rates[a]}
        for a in matrix.annotator_ids
        if a not in surviving.annotator_ids
    ]
    kappa = annotate.fleiss_kappa(annotate.binarize_scores(surviving), categories=(0, 1))
    correlations = annotate.annotator_correlation(matrix)
    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    consensus_path = outdir / "consensus.csv"
    with open(consensus_path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["item_id", "weighted_mean", "label", "n_scores"])
        for item_id, mean, label, n in zip(
            consensus.item_ids, consensus.means, consensus.labels, consensus.n_scores
        ):
            writer.writerow([item_id, repr(mean), label, n])
    summary_path = outdir / "annotation_summary.json"
    summary = {
        "excluded": excluded,
        "kappa": kappa,
        "correlations": {
            "annotators": list(matrix.annotator_ids),
            "matrix": [
                [None if not (v == v) else v for v in row] for row in correlations.tolist()
            ],
        },
        "metadata": {
            "threshold": args.threshold,
            "kappa_basis": "binarized (score < 0 -> stressed)",
            "weights_in_outlier_rule": False,
        },
    }
    summary_path.write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    print(f"items: {matrix.n_items}, annotators kept: {surviving.n_annotators}/"
          f"{matrix.n_annotators}, kappa: {kappa:.4f}")
    for entry in excluded:
        print(f"excluded: {entry['annotator']} (outlier rate {entry['rate']:.0%})")
    print(f"wrote: {consensus_path}, {summary_path}")
    return EXIT_OK


def cmd_emotions(args) -> int:
    _require(args.input_csv, "input file")
    lexicon = _lexicon(args)
    negative = list(emotion.NEGATIVE_AFFECTS)
    with open(args.input_csv, newline="", encoding="utf-8") as src:
        reader = csv.DictReader(src)
        fields = reader.fieldnames or []
        if fields and "text" not in fields:
            raise StressKitError(f"{args.input_csv}: no 'text' column in header")
        with open(args.out, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(["id", "anger", "fear", "sadness", "disgust", "surprise",
                             "prevailing"])
            for rownum, row in enumerate(reader, start=2):
                text = (row.get("text") or "").strip()
                title = (row.get("title") or "").strip()
                combined = f"{title} {text}".strip()
                profile = emotion.score_emotions(combined, lexicon)
                prevailing = emotion.prevailing_emotion(profile, negative)
                writer.writerow(
                    [
                        (row.get("id") or "").strip() or str(rownum - 1),
                        *(repr(profile.get(a)) for a in
                          ("anger", "fear", "sadness", "disgust", "surprise")),
                        prevailing or "",
                    ]
                )
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_stats(args) -> int:
    _require(args.posts_csv, "posts file")
    config = _pipeline_config(args)
    posts, summary = corpus.load_posts_with_summary(args.posts_csv)
    stats = corpus.corpus_stats(posts, config)
    if args.summary:
        print(summary.to_json())
    print(
        json.dumps(
            {
                "record_count": stats.record_count,
                "per_community": dict(stats.per_community),
                "per_tag": dict(stats.per_tag),
                "unique_words": stats.unique_words,
            },
            indent=2,
        )
    )
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except StressKitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
