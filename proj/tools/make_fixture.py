#!/usr/bin/env python3
"""Writes the bundled 200-person fixture under data/fixture.

Everything is drawn from one seeded generator, so rerunning reproduces the
files byte for byte.
"""
import argparse
import json
import random
from pathlib import Path

AGES = [(14, 20), (21, 30), (31, 40), (41, 50), (51, 60), (61, 80)]
GENDERS = ["F", "M"]
RELATIONSHIPS = ["Single", "In a relationship", "Married", "Engaged", "It's complicated"]
POLITICAL = ["democrat", "republican", "liberal", "conservative", "independent"]
LOCALES = ["en_US", "en_US", "en_US", "en_GB", "it_IT", "es_ES"]
TRAIT_MEANS = [3.8, 3.5, 3.6, 3.55, 2.8]

POSITIVE = ["good", "great", "love", "happy", "nice", "fun", "awesome", "glad", "best", "enjoy"]
NEGATIVE = ["bad", "hate", "sad", "angry", "awful", "worst", "tired", "annoying", "boring", "sick"]
NEGATIONS = ["not", "no", "never", "don't", "can't", "won't", "isn't", "didn't", "n't"]

# Words that lean towards each privacy-concern level.
TOPICS = {
    "LoPC": ["party", "selfie", "photos", "tagged", "checkin", "everyone", "share", "public", "friends", "pics"],
    "MePC": ["work", "weekend", "coffee", "movie", "game", "dinner", "music", "today", "family", "trip"],
    "HiPC": ["privacy", "settings", "private", "password", "delete", "account", "tracking", "careful", "secure", "hidden"],
}
FILLER = ["the", "a", "and", "with", "my", "at", "so", "really", "just", "this", "is", "was", "for", "to"]


def status_line(rng, level):
    words = []
    for _ in range(rng.randint(5, 12)):
        r = rng.random()
        if r < 0.45:
            words.append(rng.choice(TOPICS[level]))
        elif r < 0.55:
            words.append(rng.choice(TOPICS[rng.choice(list(TOPICS))]))
        elif r < 0.65:
            words.append(rng.choice(POSITIVE))
        elif r < 0.72:
            words.append(rng.choice(NEGATIVE))
        elif r < 0.77:
            words.append(rng.choice(NEGATIONS[:-1]))
        else:
            words.append(rng.choice(FILLER))
    text = " ".join(words)
    return text[0].upper() + text[1:] + rng.choice([".", "!", "", "?"])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="data/fixture")
    ap.add_argument("--people", type=int, default=200)
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    out = Path(args.out)
    (out / "lexicons").mkdir(parents=True, exist_ok=True)
    ids = [f"u{1000 + 7 * i}" for i in range(args.people)]

    users = ["user_id,age,gender,relationship,political,locale"]
    traits = ["user_id,opn,con,ext,agr,neu"]
    status = []
    labels = []
    for k, uid in enumerate(ids):
        lo, hi = AGES[min(int(rng.random() ** 1.3 * len(AGES)), len(AGES) - 1)]
        age = "" if rng.random() < 0.03 else str(rng.randint(lo, hi))
        gender = "" if rng.random() < 0.02 else rng.choice(GENDERS)
        rel = "" if rng.random() < 0.15 else rng.choice(RELATIONSHIPS)
        pol = "" if rng.random() < 0.25 else rng.choice(POLITICAL)
        loc = rng.choice(LOCALES)
        if "," in rel or '"' in rel:
            rel = '"' + rel.replace('"', '""') + '"'
        users.append(f"{uid},{age},{gender},{rel},{pol},{loc}")

        scores = []
        for mean in TRAIT_MEANS:
            if rng.random() < 0.05:
                scores.append("")
            elif rng.random() < 0.04:
                scores.append(f"{mean:.2f}")  # exactly on the threshold
            else:
                scores.append(f"{min(5.0, max(1.0, rng.gauss(mean, 0.6))):.2f}")
        traits.append(uid + "," + ",".join(scores))

        level = rng.choices(["LoPC", "MePC", "HiPC"], weights=[3, 4, 3])[0]
        if rng.random() < 0.95:
            for _ in range(rng.randint(1, 4)):
                status.append(f"{uid}\t{status_line(rng, level)}")
        if k % 5 < 3:
            labels.append(f"{uid}\t{level}")

    (out / "users.csv").write_text("\n".join(users) + "\n")
    (out / "traits.csv").write_text("\n".join(traits) + "\n")
    (out / "status.tsv").write_text("\n".join(status) + "\n")
    (out / "labels.tsv").write_text("\n".join(labels) + "\n")
    (out / "lexicons" / "positive.txt").write_text("\n".join(POSITIVE) + "\n")
    (out / "lexicons" / "negative.txt").write_text("\n".join(NEGATIVE) + "\n")
    (out / "lexicons" / "negations.txt").write_text("\n".join(NEGATIONS) + "\n")
    schema = {
        "id_column": "user_id",
        "features": [
            {"name": "age", "kind": "binned", "bins": "age"},
            {"name": "gender", "kind": "categorical"},
            {"name": "relationship", "kind": "categorical"},
            {"name": "political", "kind": "categorical"},
            {"name": "locale", "kind": "categorical"},
        ],
    }
    (out / "schema.json").write_text(json.dumps(schema, indent=2, ensure_ascii=False) + "\n")


if __name__ == "__main__":
    main()
