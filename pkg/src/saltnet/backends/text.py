"""Tokenization, stopwords and the deterministic keyword extractor.

Every lexical decision in the package (embedding, mock generation, the
lexical hypothesis matcher) goes through these helpers so they agree on
what a "content word" is.
"""

from __future__ import annotations

import re
from collections import Counter

_TOKEN_RE = re.compile(r"[a-z0-9]+")

STOPWORDS = frozenset(
    """
    a about above after again against all also am an and any are as at be
    because been before being below between both but by can could did do does
    doing down during each few for from further had has have having he her here
    hers herself him himself his how i if in into is it its itself just may me
    might more most must my myself no nor not now of off on once only or other
    our ours ourselves out over own same shall she should so some such than that
    the their theirs them themselves then there these they this those through
    to too under until up upon very via was we were what when where which while
    who whom why will with within without would you your yours yourself
    yourselves
    s t amid among amongst per onto toward towards across along around
    said says say according reported reports report new also however whether
    soon yet still even well much many one two three like
    monitor monitoring track tracking watch watching know want happens happen
    affect affects affecting impact impacts effect effects
    """.split()
)


def tokenize(text: str) -> list[str]:
    """Lowercase alphanumeric tokens, in order."""
    return _TOKEN_RE.findall(text.lower())


def content_words(text: str) -> list[str]:
    """Tokens with stopwords and single characters removed, in order."""
    return [t for t in tokenize(text) if t not in STOPWORDS and len(t) > 1]


def keywords(text: str, k: int | None = None) -> list[str]:
    """Rank content words by frequency (descending), then alphabetically.

    This is the reference extractor the mock backend is built on.
    """
    counts = Counter(content_words(text))
    ranked = sorted(counts, key=lambda w: (-counts[w], w))
    return ranked if k is None else ranked[:k]


def keyword_phrases(text: str, k: int) -> list[str]:
    """Turn the top-``k`` keywords into short phrases.

    Each keyword is paired with its immediate right neighbour in the
    original text when that neighbour is a content word, otherwise with its
    immediate left neighbour, otherwise it stands alone.
    """
    tokens = tokenize(text)
    is_content = [t not in STOPWORDS and len(t) > 1 for t in tokens]
    phrases: list[str] = []
    for word in keywords(text, k):
        i = tokens.index(word)
        if i + 1 < len(tokens) and is_content[i + 1]:
            phrase = f"{word} {tokens[i + 1]}"
        elif i > 0 and is_content[i - 1]:
            phrase = f"{tokens[i - 1]} {word}"
        else:
            phrase = word
        if phrase not in phrases:
            phrases.append(phrase)
    return phrases
