#!/usr/bin/env python3
"""Regenerate the bundled synthetic fixtures under data/fixtures/.

Everything is seeded, so reruns reproduce the committed files byte for
byte. The fixtures mimic the shape of scraped academic-community data:
a labeled training corpus, a 100-post unlabeled collection across five
communities, a community->group mapping, and a 5-annotator sheet.

Scores in posts_100.csv are laid out so that rows at even 0-based
positions carry the distinct consecutive integers -24..25 and odd rows
carry -19..30; any even/odd row split therefore yields a .5 median under
the mean-of-two convention.
"""

from __future__ import annotations

import csv
import random
from datetime import datetime, timedelta, timezone
from pathlib import Path

FIXTURES = Path(__file__).resolve().parent.parent / "data" / "fixtures"

STRESS_WORDS = """deadline panic overwhelmed exam fail failing anxious crying pressure
burnout exhausted worried stress stressed grading thesis advisor dread nightmare
hopeless miserable crisis terrified awful desperate lonely struggling suffering
depressed fear failure tears sleepless overdue rejection""".split()

CALM_WORDS = """weekend hobby coffee garden celebrate friends music relax vacation
game sunny walk happy proud fun grateful excited wonderful delighted cheerful
success peaceful lucky smile laughter enjoyable pleasant confident hopeful calm
satisfied thriving refreshed""".split()

SHARED_WORDS = """student class work time people think semester email lecture research
lab paper campus course professor assignment project library office meeting group
schedule topic question reading""".split()

FILLERS = ["I am", "We were", "It is", "My friend said", "Honestly", "This semester",
           "Last week", "At the end of the day", "To be fair", "The department"]

COMMUNITIES = [
    ("r/csMajors", 15),
    ("r/EngineeringStudents", 10),
    ("r/GradSchool", 25),
    ("r/PhD", 25),
    ("r/Professors", 25),
]

TAGS = ["Vent", "Advice", "Humor", "Research", ""]


def make_text(rng: random.Random, stressed: bool) -> str:
    pool = STRESS_WORDS if stressed else CALM_WORDS
    other = CALM_WORDS if stressed else STRESS_WORDS
    words = rng.sample(pool, rng.randint(4, 8)) + rng.sample(SHARED_WORDS, rng.randint(6, 12))
    if rng.random() < 0.10:
        words += rng.sample(other, rng.randint(1, 2))
    rng.shuffle(words)
    sentences = []
    while words:
        n_take = rng.randint(3, 6)
        take, words = words[:n_take], words[n_take:]
        sentences.append(f"{rng.choice(FILLERS)} {' '.join(take)}.")
    text = " ".join(sentences)
    if rng.random() < 0.15:
        text = f"<p>{text}</p> @someone"
    return text


def write_labeled(path: Path, n: int, rng: random.Random) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["id", "text", "label", "domain"])
        for i in range(n):
            label = i % 2
            writer.writerow(
                [f"d{i:04d}", make_text(rng, bool(label)), label,
                 rng.choice(["anxiety", "financial", "social", "abuse", "ptsd"])]
            )


def write_posts(path: Path, rng: random.Random) -> None:
    start = datetime(2022, 9, 1, tzinfo=timezone.utc)
    even_scores = list(range(-24, 26))   # 50 distinct consecutive ints
    odd_scores = list(range(-19, 31))
    rng.shuffle(even_scores)
    rng.shuffle(odd_scores)
    rows = []
    i = 0
    for community, count in COMMUNITIES:
        for _ in range(count):
            date = start + timedelta(days=rng.randint(0, 364), hours=rng.randint(0, 23))
            score = even_scores[i // 2] if i % 2 == 0 else odd_scores[i // 2]
            stressed_text = rng.random() < 0.45
            title = "" if rng.random() < 0.3 else make_text(rng, stressed_text)[:60]
            date_cell = str(int(date.timestamp())) if i % 9 == 0 else date.isoformat()
            rows.append(
                [
                    f"p{i:03d}",
                    date_cell,
                    title,
                    make_text(rng, stressed_text),
                    score,
                    rng.choice(TAGS),
                    community,
                    rng.choice(["post", "comment"]),
                ]
            )
            i += 1
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["id", "date", "title", "text", "score", "tag", "community", "kind"])
        writer.writerows(rows)


def write_mapping(path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["community", "group"])
        writer.writerow(["r/csMajors", "Bachelor students"])
        writer.writerow(["r/EngineeringStudents", "Bachelor students"])
        writer.writerow(["r/GradSchool", "Graduate students"])
        writer.writerow(["r/PhD", "PhD students"])
        writer.writerow(["r/Professors", "Professors"])


def write_annotations(sheet: Path, weights: Path, rng: random.Random) -> None:
    annotators = ["a1", "a2", "a3", "a4", "psy"]
    with open(sheet, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["item_id", "text", *annotators])
        for i in range(20):
            true = rng.randint(-4, 4)
            row = [f"x{i:02d}", make_text(rng, true < 0)]
            for annotator in annotators:
                if annotator != "psy" and rng.random() < 0.05:
                    row.append("")  # missing judgment
                    continue
                if annotator == "psy":
                    noise = 0  # the expert scores the designed level exactly
                elif annotator == "a4" and rng.random() < 0.5:
                    noise = rng.choice([-5, 5])  # adversarial judgments
                else:
                    noise = rng.choice([0] * 8 + [-1, 1])
                row.append(max(-5, min(5, true + noise)))
            writer.writerow(row)
    with open(weights, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["annotator_id", "weight"])
        for annotator in annotators:
            writer.writerow([annotator, 2.0 if annotator == "psy" else 1.0])


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    write_labeled(FIXTURES / "labeled_train.csv", 400, random.Random(42))
    write_labeled(FIXTURES / "labeled_eval.csv", 120, random.Random(43))
    write_posts(FIXTURES / "posts_100.csv", random.Random(44))
    write_mapping(FIXTURES / "communities.csv")
    write_annotations(
        FIXTURES / "annotations.csv", FIXTURES / "weights.csv", random.Random(45)
    )
    print(f"fixtures written under {FIXTURES}")


if __name__ == "__main__":
    main()
