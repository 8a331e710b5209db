"""Sentence-level BLEU-4: uniform 4-gram weights, brevity penalty, no
smoothing (any zero modified precision zeroes the score)."""

from __future__ import annotations

import math
import re
from collections import Counter

_TOKEN = re.compile(r"\w+|[^\w\s]")


def _tokens(text: str) -> list[str]:
    return _TOKEN.findall(text)


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu4(candidate: str, reference: str) -> float:
    """BLEU with n=1..4; identical strings score 1.0, an empty candidate 0."""
    cand = _tokens(candidate)
    ref = _tokens(reference)
    if not cand or not ref:
        return 0.0
    log_precision_sum = 0.0
    for n in range(1, 5):
        cand_ngrams = _ngrams(cand, n)
        total = sum(cand_ngrams.values())
        if total == 0:
            return 0.0
        ref_ngrams = _ngrams(ref, n)
        clipped = sum(min(count, ref_ngrams.get(gram, 0)) for gram, count in cand_ngrams.items())
        if clipped == 0:
            return 0.0
        log_precision_sum += 0.25 * math.log(clipped / total)
    if len(cand) >= len(ref):
        brevity = 1.0
    else:
        brevity = math.exp(1.0 - len(ref) / len(cand))
    return brevity * math.exp(log_precision_sum)
