"""Regenerates data/reviews/synthetic_two_topic.jsonl.

Two planted themes share no content words: wildlife in the park and the
park's place in the city. Every review draws its content words from one
theme and pads them with common filler, so a two-topic model should
separate the themes cleanly.
"""
import json
import random
from pathlib import Path

WILDLIFE = ["swans", "ducks", "flowers", "birds", "trees", "pond", "squirrels", "geese",
            "heron", "lake", "roses", "tulips", "blossom", "wildlife", "feeding", "nature",
            "plants", "lawn", "butterflies", "pigeons", "bread", "fountain", "bees", "meadow"]
CITY = ["shopping", "centre", "middle", "hustle", "bustle", "street", "traffic", "shops",
        "office", "lunch", "busy", "tourists", "grafton", "hotel", "station", "bus",
        "location", "crowded", "workers", "downtown", "sandwich", "noise", "commute", "tram"]
FILLER = ["the", "a", "we", "it", "is", "was", "and", "to", "in", "of", "with", "there", "very", "so"]
TITLES = {"wildlife": ["Lovely wildlife", "Nature in town", "Feeding the ducks", "Beautiful flowers"],
          "city": ["Right in the middle", "Great lunch spot", "Escape the hustle", "Handy location"]}
VENUES = ["0f7bbab842cdf4629b4a5e57", "bc358e91a87885cf3ffba1bd", "9da303acabcaefe1d5a3cab1"]
PLACES = ["Dublin, Ireland", "London, United Kingdom", "Boston, Massachusetts", None]


def review(rng, theme):
    words = WILDLIFE if theme == "wildlife" else CITY
    body = []
    for _ in range(22):
        body.append(rng.choice(words))
        if rng.random() < 0.5:
            body.append(rng.choice(FILLER))
    text = " ".join(body).capitalize() + "."
    if rng.random() < 0.05:
        text += " More photos at https://example.org/park?id=%d" % rng.randrange(1000)
    if rng.random() < 0.05:
        text += " \U0001F333\U0001F986"
    return text


def main():
    rng = random.Random(20201231)
    out = Path(__file__).resolve().parent.parent / "data" / "reviews" / "synthetic_two_topic.jsonl"
    out.parent.mkdir(parents=True, exist_ok=True)
    lines = []
    for i in range(300):
        theme = "wildlife" if i % 2 == 0 else "city"
        year = 2006 + (i * 7) % 15
        rec = {
            "title": rng.choice(TITLES[theme]),
            "body": review(rng, theme),
            "rating": rng.randint(3, 5),
            "reviewer_location": rng.choice(PLACES),
            "date": "%04d-%02d-%02d" % (year, 1 + i % 12, 1 + i % 28),
            "venue_id": VENUES[i % len(VENUES)],
        }
        lines.append(json.dumps(rec, ensure_ascii=False))
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
