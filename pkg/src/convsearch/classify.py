"""Rule-based question classification by leading phrases and keywords.

Rules are evaluated in listed order, first match wins; a question that
matches nothing is Other. Multi-word leading phrases must appear before
their prefixes in the rule file ("how much" before "how") or they can
never fire.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from importlib import resources

from .errors import RulesParseError
from .textproc import normalize


class QuestionCategory(str, Enum):
    WHO = "Who"
    WHERE = "Where"
    CLASS = "Class"
    HOW_MUCH = "HowMuch"
    WHEN = "When"
    DESCRIBE = "Describe"
    HOW = "How"
    WHY = "Why"
    OTHER = "Other"


_CATEGORY_BY_NAME = {c.value: c for c in QuestionCategory}

RULE_KINDS = ("lead", "kw")


@dataclass
class Rule:
    kind: str  # "lead" or "kw"
    pattern: str  # normalized phrase or keyword
    category: QuestionCategory


@dataclass
class ClassifierRules:
    rules: list[Rule]


def _parse_rule_line(line: str, lineno: int) -> Rule:
    parts = line.split("|")
    if len(parts) != 3:
        raise RulesParseError("expected 'kind|pattern|Category'", line=lineno)
    kind, pattern, category_name = (p.strip() for p in parts)
    if kind not in RULE_KINDS:
        raise RulesParseError(f"unknown rule kind {kind!r}", line=lineno)
    pattern = normalize(pattern)
    if not pattern:
        raise RulesParseError("empty pattern", line=lineno)
    if category_name not in _CATEGORY_BY_NAME:
        raise RulesParseError(f"unknown category {category_name!r}", line=lineno)
    return Rule(kind=kind, pattern=pattern, category=_CATEGORY_BY_NAME[category_name])


def _parse_rules(text: str) -> ClassifierRules:
    rules = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        rules.append(_parse_rule_line(line, lineno))
    return ClassifierRules(rules=rules)


def load_rules(path) -> ClassifierRules:
    with open(path, encoding="utf-8") as fh:
        return _parse_rules(fh.read())


def default_rules() -> ClassifierRules:
    text = resources.files("convsearch.data").joinpath("classify_rules.txt").read_text("utf-8")
    return _parse_rules(text)


def classify(utterance: str, rules: ClassifierRules | None = None) -> QuestionCategory:
    """Category of a (reference-resolved) question; Other when nothing matches."""
    if rules is None:
        rules = default_rules()
    text = normalize(utterance)
    if not text:
        raise ValueError("cannot classify an empty utterance")
    tokens = text.split()
    for rule in rules.rules:
        if rule.kind == "lead":
            if text == rule.pattern or text.startswith(rule.pattern + " "):
                return rule.category
        else:
            kw_tokens = rule.pattern.split()
            if len(kw_tokens) == 1:
                if kw_tokens[0] in tokens:
                    return rule.category
            else:
                n = len(kw_tokens)
                if any(tokens[i : i + n] == kw_tokens for i in range(len(tokens) - n + 1)):
                    return rule.category
    return QuestionCategory.OTHER
