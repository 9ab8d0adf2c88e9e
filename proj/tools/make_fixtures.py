#!/usr/bin/env python3
"""Writes the synthetic review fixtures under tests/data/.

Reviews are assembled from sentence templates whose adjectives lean positive
or negative with the rating, so a learner has signal but no perfect cue.
Output is deterministic for a given seed.
"""

import argparse
import json
import random
from pathlib import Path

HOTELS = [
    ("g187791", "d203112", "Hotel_Roma_Centrale", "Rome_Lazio"),
    ("g187791", "d205044", "Albergo_del_Senato", "Rome_Lazio"),
    ("g186338", "d192055", "The_Strand_Palace", "London_England"),
    ("g186338", "d193089", "Kensington_Gardens_Inn", "London_England"),
    ("g187147", "d197528", "Hotel_du_Louvre", "Paris_Ile_de_France"),
    ("g187147", "d188729", "Le_Marais_Suites", "Paris_Ile_de_France"),
    ("g60763", "d93562", "Hudson_Park_Hotel", "New_York_City_New_York"),
    ("g60763", "d122005", "Midtown_Plaza", "New_York_City_New_York"),
    ("g188590", "d190614", "Canal_House", "Amsterdam_North_Holland"),
    ("g188590", "d232451", "Dam_Square_Lodge", "Amsterdam_North_Holland"),
    ("g187497", "d228471", "Hotel_Barcelona_Mar", "Barcelona_Catalonia"),
    ("g187497", "d233595", "Ramblas_View", "Barcelona_Catalonia"),
    ("g187323", "d199105", "Spree_Hotel", "Berlin"),
    ("g187323", "d231660", "Mitte_Residenz", "Berlin"),
    ("g190454", "d191215", "Hotel_Stephansdom", "Vienna"),
    ("g190454", "d266021", "Ringstrasse_Inn", "Vienna"),
]

ASPECTS = ["room", "staff", "breakfast", "bed", "pool", "location", "bathroom", "wifi",
           "restaurant", "lobby", "view", "shower", "service", "parking", "bar", "gym"]

POSITIVE = ["clean", "comfortable", "friendly", "great", "excellent", "lovely", "helpful",
            "nice", "wonderful", "spacious", "quiet", "perfect", "good", "beautiful"]
NEGATIVE = ["dirty", "rude", "terrible", "awful", "noisy", "small", "bad", "horrible",
            "broken", "poor", "disappointing", "cold", "slow", "unpleasant"]
NEUTRAL = ["fine", "okay", "average", "standard", "basic"]

VERB_TEMPLATES = [
    "The {aspect} was {adj}.",
    "Our {aspect} was {adj}.",
    "The {aspect} is {adj}.",
    "The {aspect} was very {adj}.",
    "The {aspect} seemed {adj}.",
]
HAS_TEMPLATES = [
    "The hotel has a {adj} {aspect}.",
    "The room had a {adj} {aspect}.",
    "We loved the {aspect}.",
    "We hated the {aspect}.",
]
FILLER = [
    "We stayed for three nights in {month}.",
    "We arrived late in the evening.",
    "It was our first visit to the city.",
    "We travelled with two children.",
    "Check in took a few minutes.",
]
MONTHS = ["March", "June", "August", "October", "December"]

# Probability that an opinion sentence is positive, per rating.
POSITIVE_RATE = {1: 0.1, 2: 0.25, 3: 0.5, 4: 0.75, 5: 0.9}

# Class counts following the rating proportions of the first 10k HotelRec reviews.
COUNTS = {
    200: {5: 101, 4: 58, 3: 21, 2: 10, 1: 10},
    1000: {5: 506, 4: 290, 3: 105, 2: 52, 1: 47},
}


def opinion(rng, rating):
    roll = rng.random()
    if roll < 0.1:
        adj = rng.choice(NEUTRAL)
    elif rng.random() < POSITIVE_RATE[rating]:
        adj = rng.choice(POSITIVE)
    else:
        adj = rng.choice(NEGATIVE)
    aspect = rng.choice(ASPECTS)
    if rng.random() < 0.75:
        return rng.choice(VERB_TEMPLATES).format(aspect=aspect, adj=adj)
    template = rng.choice(HAS_TEMPLATES)
    if template.startswith("We loved") and adj in NEGATIVE:
        template = "We hated the {aspect}."
    if template.startswith("We hated") and adj in POSITIVE:
        template = "We loved the {aspect}."
    return template.format(aspect=aspect, adj=adj)


def review(rng, rating):
    sentences = [opinion(rng, rating) for _ in range(rng.randint(2, 5))]
    if rng.random() < 0.5:
        sentences.insert(0, rng.choice(FILLER).format(month=rng.choice(MONTHS)))
    geo, hotel_id, name, place = rng.choice(HOTELS)
    return {
        "hotel_url": f"Hotel_Review-{geo}-{hotel_id}-Reviews-{name}-{place}.html",
        "author": f"traveller{rng.randint(1, 99999)}",
        "date": f"20{rng.randint(10, 19)}-{rng.randint(1, 12):02d}-01T00:00:00",
        "rating": float(rating),
        "title": " ".join(sentences[0].split()[:4]).rstrip("."),
        "text": " ".join(sentences),
        "property_dict": {"service": float(rating), "cleanliness": float(rating)},
    }


def fixture(n, seed):
    rng = random.Random(seed)
    ratings = [r for r, c in COUNTS[n].items() for _ in range(c)]
    rng.shuffle(ratings)
    return [review(rng, r) for r in ratings]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "tests" / "data")
    parser.add_argument("--seed", type=int, default=20240611)
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for n in sorted(COUNTS):
        path = args.out / f"reviews_{n}.jsonl"
        with path.open("w", encoding="utf-8") as f:
            for record in fixture(n, args.seed + n):
                f.write(json.dumps(record) + "\n")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
