"""Synthetic conversational search benchmark generator.

Ten topics, five turns each, over ~2,000 short passages. Turn 1 names
the topic ("What is maple syrup?"); turns 2-5 are elliptical follow-ups
that never repeat the topic words ("What about the cost?"), so a system
that only sees the current question retrieves generic cost/date/cause/
process passages from every other topic. Relevant passages pair the
topic words with the follow-up attribute and carry answer-type surface
cues (prices, years, "because", step words); distractor passages have
the attribute words but not the topic, or the topic but not the
attribute. Everything is drawn from a seeded RNG, so regeneration is
byte-identical.
"""

from __future__ import annotations

import json
import random

# (subject phrase, cost unit) — subject stems are distinct across topics
# and absent from all filler vocabulary below.
SUBJECTS = [
    ("maple syrup", "gallon"),
    ("coral reef", "tour"),
    ("wind turbine", "tower"),
    ("olive oil", "jar"),
    ("silk weaving", "bolt"),
    ("basalt column", "slab"),
    ("peat bog", "plot"),
    ("amber resin", "pouch"),
    ("truffle farming", "basket"),
    ("reindeer herding", "sled"),
]

# Follow-up turns shared by every topic: ambiguous on purpose.
FOLLOW_UPS = [
    ("cost", "What about the cost?"),
    ("start", "When did production start?"),
    ("vary", "Why does quality vary?"),
    ("process", "How does the process work?"),
]

FILLER_NOUNS = [
    "lantern", "meadow", "harbor", "violin", "pottery", "orchard", "gazebo",
    "mural", "tapestry", "courtyard", "archive", "balcony", "chimney",
    "trellis", "mosaic", "parlor", "sawmill", "granary", "belfry", "cistern",
    "pergola", "attic", "cellar", "hearth", "alcove", "veranda",
]
FILLER_VERBS = [
    "painted", "repaired", "admired", "sketched", "cleaned", "photographed",
    "decorated", "restored", "surveyed", "polished",
]
FILLER_ADJS = [
    "quiet", "narrow", "bright", "dusty", "mossy", "slender", "crooked",
    "faded", "sturdy", "hollow",
]


def _judged_passages(subject: str, unit: str, rng: random.Random):
    """Per turn: two grade-2, two grade-1, one grade-0 near-miss passage."""
    year = lambda: rng.randint(1100, 1990)
    num = lambda: rng.randint(10, 900)
    adj = lambda: rng.choice(FILLER_ADJS)
    noun = lambda: rng.choice(FILLER_NOUNS)
    sub = subject
    cap = subject[0].upper() + subject[1:]
    return {
        "what": [
            (2, f"{cap} is a {adj()} craft known as the {noun()} trade in many regions."),
            (2, f"{cap} is an old practice; {sub} refers to the {adj()} {noun()} arts."),
            (1, f"A short primer covers {sub} and is a guide for beginners."),
            (1, f"Local guides describe {sub} during the {noun()} fair."),
            (0, f"Many villages mention {sub} in passing."),
        ],
        "cost": [
            (2, f"{cap} costs about ${num()} per {unit}, and retail {sub} costs {num()} dollars."),
            (2, f"Buying {sub} costs ${num()}; bulk {sub} orders cost {num()} dollars per {unit}."),
            (1, f"The cost of {sub} rose {num()} percent last season."),
            (1, f"A starter {unit} of {sub} costs {num()} dollars."),
            (0, f"The cost of {sub} is a frequent question at the fair."),
        ],
        "start": [
            (2, f"{cap} production started around {year()}, and {sub} exports started by {year()}."),
            (2, f"Records show {sub} production started in {year()}, early in that century."),
            (1, f"{cap} production started generations ago, per the {year()} almanac."),
            (1, f"Historians date {sub} production to {year()}."),
            (0, f"When {sub} production started is debated in the village."),
        ],
        "vary": [
            (2, f"{cap} quality varies because of soil, and {sub} texture varies because of rain."),
            (2, f"Experts say {sub} quality varies because the harvest differs due to weather."),
            (1, f"The reason {sub} quality varies is the water."),
            (1, f"{cap} quality varies because storage differs."),
            (0, f"{cap} quality varies across markets."),
        ],
        "process": [
            (2, f"The {sub} process works in steps: first soak, then press, next filter the {sub}."),
            (2, f"To make the {sub} process work: first gather, then settle, finally strain the {sub}."),
            (1, f"The {sub} process works once you learn each step."),
            (1, f"Workshops teach how the {sub} process works, step by step."),
            (0, f"The {sub} process works well in winter."),
        ],
    }


def _subject_only(subject: str, rng: random.Random) -> list[str]:
    cap = subject[0].upper() + subject[1:]
    out = []
    for _ in range(6):
        out.append(
            f"{cap} drew a {rng.choice(FILLER_ADJS)} crowd to the "
            f"{rng.choice(FILLER_NOUNS)} last season."
        )
    return out


def _attribute_only(rng: random.Random) -> list[str]:
    """Attribute words with no topic words: what a context-blind query finds."""
    out = []
    for _ in range(25):
        out.append(
            f"Entry costs ${rng.randint(5, 95)} and parking costs "
            f"{rng.randint(2, 40)} dollars at the {rng.choice(FILLER_NOUNS)}."
        )
    for _ in range(25):
        out.append(
            f"The annual fair started in {rng.randint(1100, 1990)} and the "
            f"{rng.choice(FILLER_NOUNS)} awards started in {rng.randint(1100, 1990)}."
        )
    for _ in range(25):
        out.append(
            f"{rng.choice(FILLER_NOUNS).capitalize()} quality varies because "
            f"the {rng.choice(FILLER_NOUNS)} shifts."
        )
    for _ in range(25):
        out.append(
            f"The sign-up process works in steps: first register at the "
            f"{rng.choice(FILLER_NOUNS)}, then confirm."
        )
    return out


def _noise(rng: random.Random, count: int) -> list[str]:
    out = []
    for _ in range(count):
        out.append(
            f"The {rng.choice(FILLER_ADJS)} {rng.choice(FILLER_NOUNS)} near the "
            f"{rng.choice(FILLER_NOUNS)} was {rng.choice(FILLER_VERBS)} during "
            f"the {rng.choice(FILLER_NOUNS)} season."
        )
    return out


def make_minibench(out_dir, seed: int = 13, total_docs: int = 2000) -> dict:
    """Write corpus.jsonl, topics.json, and qrels.txt; returns their paths."""
    import os

    rng = random.Random(seed)
    docs: list[tuple[str, str]] = []
    qrels_lines: list[str] = []
    topics = []

    def add_doc(text: str) -> str:
        doc_id = f"MB_{len(docs) + 1:04d}"
        docs.append((doc_id, text))
        return doc_id

    for t_index, (subject, unit) in enumerate(SUBJECTS, 1):
        topic_id = f"t{t_index}"
        turns = [{"number": 1, "raw_utterance": f"What is {subject}?"}]
        for n, (_, utterance) in enumerate(FOLLOW_UPS, 2):
            turns.append({"number": n, "raw_utterance": utterance})
        topics.append(
            {
                "number": topic_id,
                "title": subject,
                "description": f"Session about {subject}.",
                "turn": turns,
            }
        )
        judged = _judged_passages(subject, unit, rng)
        turn_keys = ["what"] + [key for key, _ in FOLLOW_UPS]
        for n, key in enumerate(turn_keys, 1):
            for grade, text in judged[key]:
                doc_id = add_doc(text)
                qrels_lines.append(f"{topic_id}_{n} 0 {doc_id} {grade}")
        for text in _subject_only(subject, rng):
            add_doc(text)

    for text in _attribute_only(rng):
        add_doc(text)
    noise_count = max(0, total_docs - len(docs))
    for text in _noise(rng, noise_count):
        add_doc(text)

    os.makedirs(out_dir, exist_ok=True)
    corpus_path = os.path.join(out_dir, "corpus.jsonl")
    topics_path = os.path.join(out_dir, "topics.json")
    qrels_path = os.path.join(out_dir, "qrels.txt")
    with open(corpus_path, "w", encoding="utf-8") as fh:
        for doc_id, text in docs:
            fh.write(json.dumps({"id": doc_id, "text": text}) + "\n")
    with open(topics_path, "w", encoding="utf-8") as fh:
        json.dump(topics, fh, indent=2)
        fh.write("\n")
    with open(qrels_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(qrels_lines) + "\n")
    return {"corpus": corpus_path, "topics": topics_path, "qrels": qrels_path}
