"""Deterministic text normalization shared by documents and queries.

Pipeline order for indexing and querying is always:
abbreviation expansion -> normalize -> tokenize (possessive strip,
stopword filter, Porter stem). Content hashing for deduplication uses
normalize(raw) only, so formatting differences never defeat dedup while
abbreviation config never affects document identity.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources

from . import porter

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3


def fnv1a64(data: bytes) -> int:
    """FNV-1a 64-bit hash; stable across runs and platforms."""
    h = FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


# strip anything that is not a word char, whitespace, apostrophe or hyphen
_PUNCT = re.compile(r"[^\w\s'\-]|_")
# apostrophes/hyphens not between two word characters
_LOOSE_MARK = re.compile(r"(?<!\w)['\-]|['\-](?!\w)")


def normalize(raw: str) -> str:
    """Lowercase, strip punctuation except intra-word apostrophes/hyphens, collapse whitespace."""
    text = _PUNCT.sub(" ", raw.lower())
    text = _LOOSE_MARK.sub(" ", text)
    return " ".join(text.split())


def tokenize(normalized: str, stopwords: frozenset[str], stem: bool = True) -> list[str]:
    """Split normalized text into terms: possessives stripped, stopwords dropped, Porter-stemmed.

    Order and duplicates are preserved.
    """
    terms = []
    for token in normalized.split():
        if token.endswith("'s"):
            token = token[:-2]
        token = token.rstrip("'")
        if not token or token in stopwords:
            continue
        terms.append(porter.stem(token) if stem else token)
    return terms


def expand_abbreviations(text: str, table: dict[str, str]) -> str:
    """Replace abbreviations with their expansions in one left-to-right pass.

    Matching is case-insensitive on token boundaries; expansions are not
    re-scanned.
    """
    if not table:
        return text
    folded = {key.lower(): expansion for key, expansion in table.items()}
    keys = sorted(folded, key=len, reverse=True)
    pattern = re.compile(
        r"(?<!\w)(" + "|".join(re.escape(k) for k in keys) + r")(?!\w)",
        re.IGNORECASE,
    )
    return pattern.sub(lambda m: folded[m.group(1).lower()], text)


def content_hash(raw: str) -> int:
    """64-bit FNV-1a digest of the normalized text; equal normalizations hash equal."""
    return fnv1a64(normalize(raw).encode("utf-8"))


def load_stopwords(path) -> frozenset[str]:
    """Read a stopword file: one term per line, '#' comments allowed."""
    words = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                words.add(line.lower())
    return frozenset(words)


def load_abbreviations(path) -> dict[str, str]:
    """Read an abbreviation file: 'abbrev<TAB>expansion' per line, '#' comments allowed."""
    table: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            if "\t" not in line:
                raise ValueError(f"abbreviation file line {lineno}: expected 'abbrev<TAB>expansion'")
            abbrev, expansion = line.split("\t", 1)
            abbrev, expansion = abbrev.strip(), expansion.strip()
            if not abbrev or not expansion:
                raise ValueError(f"abbreviation file line {lineno}: empty abbreviation or expansion")
            key = abbrev.lower()
            if key in table:
                raise ValueError(f"abbreviation file line {lineno}: duplicate abbreviation {abbrev!r}")
            table[key] = expansion
    return table


def _bundled(name: str) -> str:
    return resources.files("convsearch.data").joinpath(name).read_text(encoding="utf-8")


def default_stopwords() -> frozenset[str]:
    words = set()
    for line in _bundled("stopwords.txt").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line.lower())
    return frozenset(words)


def default_abbreviations() -> dict[str, str]:
    table: dict[str, str] = {}
    for line in _bundled("abbreviations.tsv").splitlines():
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        abbrev, expansion = line.split("\t", 1)
        table[abbrev.strip().lower()] = expansion.strip()
    return table


@dataclass
class TextprocConfig:
    """Immutable-by-convention bundle of text processing settings.

    An index records the config it was built with; queries must use the
    same one, which ``fingerprint`` makes checkable.
    """

    stem: bool = True
    stopwords: frozenset[str] = field(default_factory=default_stopwords)
    abbreviations: dict[str, str] = field(default_factory=default_abbreviations)

    def terms(self, raw: str) -> list[str]:
        """Full pipeline: expand abbreviations, normalize, tokenize."""
        expanded = expand_abbreviations(raw, self.abbreviations)
        return tokenize(normalize(expanded), self.stopwords, self.stem)

    def to_json(self) -> str:
        return json.dumps(
            {
                "stem": self.stem,
                "stopwords": sorted(self.stopwords),
                "abbreviations": sorted(self.abbreviations.items()),
            },
            ensure_ascii=False,
            separators=(",", ":"),
        )

    @classmethod
    def from_json(cls, payload: str) -> "TextprocConfig":
        data = json.loads(payload)
        return cls(
            stem=bool(data["stem"]),
            stopwords=frozenset(data["stopwords"]),
            abbreviations=dict(data["abbreviations"]),
        )

    def fingerprint(self) -> int:
        return fnv1a64(self.to_json().encode("utf-8"))
