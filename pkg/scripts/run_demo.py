#!/usr/bin/env python3
"""End-to-end demo on the bundled synthetic fixtures.

Runs the full workflow the CLI exposes: train a BoW + logistic model on
the labeled fixture, evaluate it on a held-out split, classify and analyze
the 100-post fixture corpus, aggregate the annotation sheet, and emit
emotion profiles. Outputs land under demo_output/ (or the first argument).
"""

from __future__ import annotations

import sys
from pathlib import Path

from stresskit.cli import main as stresskit

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "data" / "fixtures"


def run(argv: list[str]) -> None:
    print(f"\n$ stresskit {' '.join(argv)}")
    code = stresskit(argv)
    if code != 0:
        sys.exit(code)


def main() -> None:
    outdir = Path(sys.argv[1]) if len(sys.argv) > 1 else ROOT / "demo_output"
    outdir.mkdir(parents=True, exist_ok=True)
    model = outdir / "model.json"
    run([
        "train", str(FIXTURES / "labeled_train.csv"),
        "--eval", str(FIXTURES / "labeled_eval.csv"),
        "--classifier", "logistic", "--features", "bow",
        "--model-out", str(model),
    ])
    run([
        "predict", str(model), str(FIXTURES / "posts_100.csv"),
        "--out", str(outdir / "predictions.csv"),
    ])
    run([
        "analyze", str(model), str(FIXTURES / "posts_100.csv"),
        "--mapping", str(FIXTURES / "communities.csv"),
        "--out-dir", str(outdir / "reports"),
    ])
    run([
        "annotate", str(FIXTURES / "annotations.csv"),
        "--weights", str(FIXTURES / "weights.csv"),
        "--out-dir", str(outdir / "annotation"),
    ])
    run([
        "emotions", str(FIXTURES / "posts_100.csv"),
        "--out", str(outdir / "emotion_profiles.csv"),
    ])
    run(["stats", str(FIXTURES / "posts_100.csv")])
    print(f"\ndemo outputs under {outdir}")


if __name__ == "__main__":
    main()
