"""Unsupervised reference systems: lead-fraction and TextRank."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from winsumm.corpus import Document, is_content


def budget_count(n: int, fraction: float) -> int:
    """ceil(fraction * n), robust to float noise such as 0.2 * 15."""
    if not 0 < fraction <= 1:
        raise ValueError(f"budget fraction must lie in (0, 1], got {fraction}")
    return min(n, math.ceil(round(fraction * n, 9)))


def lead_fraction(doc: Document, fraction: float = 0.2) -> list[int]:
    return list(range(budget_count(doc.n, fraction)))


@dataclass(frozen=True)
class SentenceRanking:
    scores: np.ndarray
    order: tuple[int, ...]
    iterations: int = 0
    residual: float = 0.0


def similarity_matrix(doc: Document) -> np.ndarray:
    """Overlap of distinct content norms over log(1+|s_i|) + log(1+|s_j|)."""
    words = [[t.norm for t in s.tokens if is_content(t.norm)] for s in doc.sentences]
    sets = [set(w) for w in words]
    n = len(words)
    sim = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            overlap = len(sets[i] & sets[j])
            if overlap:
                sim[i, j] = sim[j, i] = overlap / (math.log1p(len(words[i])) + math.log1p(len(words[j])))
    return sim


def pagerank(weights: np.ndarray, damping: float = 0.85, eps: float = 1e-8, max_iter: int = 200):
    """Weighted PageRank; rows with no outgoing weight leak their mass, which the
    final normalization restores. Returns (scores summing to 1, iterations, residual)."""
    n = weights.shape[0]
    out = weights.sum(axis=1)
    transition = np.divide(weights, out[:, None], out=np.zeros_like(weights), where=out[:, None] > 0)
    scores = np.full(n, 1.0 / n)
    residual = float("inf")
    it = 0
    for it in range(1, max_iter + 1):
        new = (1.0 - damping) / n + damping * (transition.T @ scores)
        residual = float(np.abs(new - scores).sum())
        scores = new
        if residual < eps:
            break
    return scores / scores.sum(), it, residual


def rank_order(scores) -> tuple[int, ...]:
    """Indices by descending score, ties by ascending index."""
    return tuple(sorted(range(len(scores)), key=lambda i: (-scores[i], i)))


def textrank(doc: Document, damping: float = 0.85, eps: float = 1e-8, max_iter: int = 200) -> SentenceRanking:
    if doc.n < 1:
        raise ValueError("textrank needs at least one sentence")
    scores, iterations, residual = pagerank(similarity_matrix(doc), damping, eps, max_iter)
    return SentenceRanking(scores, rank_order(scores), iterations, residual)
