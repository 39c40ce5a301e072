#!/usr/bin/env python3
"""Reproduce the headline Dreaddit numbers with the from-scratch pipeline.

The Dreaddit corpus is not redistributable with this repository. Download
dreaddit-train.csv and dreaddit-test.csv (3,553 labeled posts in total)
and place them under data/dreaddit/, or point DREADDIT_DIR at them:

    DREADDIT_DIR=/path/to/dreaddit python scripts/reproduce_dreaddit.py

Trains BoW + {logistic regression, naive bayes, svm} on the train split
and prints the metrics table for the test split. Reference points:
logistic 77.78% accuracy / 0.79 F1, naive bayes 71.31%, svm 69.90%.
"""

from __future__ import annotations

import os
import sys
import time
from pathlib import Path

from stresskit import classify, corpus, evaluate, features, textprep

DREADDIT_SCHEMA = {"text": "text", "label": "label", "id": "id", "domain": "subreddit"}


def locate() -> tuple[Path, Path]:
    base = Path(os.environ.get("DREADDIT_DIR", Path(__file__).resolve().parent.parent / "data" / "dreaddit"))
    train, test = base / "dreaddit-train.csv", base / "dreaddit-test.csv"
    if not train.exists() or not test.exists():
        sys.exit(
            f"Dreaddit files not found under {base}.\n"
            "Place dreaddit-train.csv and dreaddit-test.csv there or set DREADDIT_DIR."
        )
    return train, test


def main() -> None:
    train_path, test_path = locate()
    config = textprep.PipelineConfig.default()
    train = corpus.load_labeled(train_path, DREADDIT_SCHEMA)
    test = corpus.load_labeled(test_path, DREADDIT_SCHEMA)
    print(f"train: {len(train)} examples, test: {len(test)} examples")

    started = time.perf_counter()
    train_docs = [textprep.preprocess(ex.text, config) for ex in train]
    test_docs = [textprep.preprocess(ex.text, config) for ex in test]
    vocab = features.fit_vocabulary(train_docs)
    train_pairs = [
        (features.vectorize_bow(doc, vocab), ex.label) for doc, ex in zip(train_docs, train)
    ]
    test_vecs = [features.vectorize_bow(doc, vocab) for doc in test_docs]
    actual = [ex.label for ex in test]
    print(f"vocabulary: {vocab.size} tokens")

    rows = []
    fingerprint = config.fingerprint()
    models = {
        "Logistic Regression": classify.train_logistic(
            train_pairs, vocabulary=vocab, fingerprint=fingerprint
        ),
        "Naive Bayes": classify.train_naive_bayes(
            train_pairs, vocabulary=vocab, fingerprint=fingerprint
        ),
        "SVM": classify.train_svm(train_pairs, vocabulary=vocab, fingerprint=fingerprint),
    }
    for name, model in models.items():
        predicted = [classify.predict(model, vec).label for vec in test_vecs]
        rows.append(("BoW", name, evaluate.metrics(evaluate.confusion(predicted, actual))))
    print(evaluate.render_table(rows))
    print(f"total time: {time.perf_counter() - started:.1f}s")


if __name__ == "__main__":
    main()
