"""ROUGE-N and ROUGE-L recall over normalized token lists."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence


@dataclass(frozen=True)
class RougeScore:
    r1: float
    r2: float
    rl: float


def ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def rouge_n_counts(candidate: Sequence[str], reference: Sequence[str], n: int) -> tuple[int, int]:
    """(clipped overlap, reference n-gram total)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    ref = ngrams(reference, n)
    cand = ngrams(candidate, n)
    overlap = sum(min(c, cand[g]) for g, c in ref.items())
    return overlap, sum(ref.values())


def rouge_n_recall(candidate: Sequence[str], reference: Sequence[str], n: int) -> float:
    overlap, total = rouge_n_counts(candidate, reference, n)
    return overlap / total if total else 0.0


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    # one DP row over the shorter sequence
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, start=1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def rouge_l_recall(candidate: Sequence[str], reference: Sequence[str]) -> float:
    if not reference:
        return 0.0
    return lcs_length(candidate, reference) / len(reference)


def rouge_scores(candidate: Sequence[str], reference: Sequence[str]) -> RougeScore:
    return RougeScore(
        rouge_n_recall(candidate, reference, 1),
        rouge_n_recall(candidate, reference, 2),
        rouge_l_recall(candidate, reference),
    )


METRICS = {
    "rouge1": lambda c, r: rouge_n_recall(c, r, 1),
    "rouge2": lambda c, r: rouge_n_recall(c, r, 2),
    "rougeL": rouge_l_recall,
}


def metric_fn(name: str):
    try:
        return METRICS[name]
    except KeyError:
        raise ValueError(f"unknown ROUGE metric {name!r}; choose from {sorted(METRICS)}") from None
