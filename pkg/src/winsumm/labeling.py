"""Turn abstractive gold summaries into binary extractive sentence labels."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path
from typing import Sequence

from winsumm import DataError
from winsumm.corpus import CorpusPair, Document, Sentence, is_content
from winsumm.rouge import metric_fn

log = logging.getLogger(__name__)


def rouge_tokens(sentences: Sequence[Sentence]) -> list[str]:
    """Content norms (punctuation dropped) of the given sentences, in order."""
    return [t.norm for s in sentences for t in s.tokens if is_content(t.norm)]


def gold_tokens(doc: Document) -> list[str]:
    return rouge_tokens(doc.sentences)


@dataclass(frozen=True)
class LabeledPair:
    pair: CorpusPair
    labels: tuple[int, ...]
    method: str
    metric: str = "rouge1"
    window_size: int | None = None

    def __post_init__(self):
        if len(self.labels) != self.pair.doc.n:
            raise ValueError(f"{self.pair.id}: {len(self.labels)} labels for {self.pair.doc.n} sentences")

    @property
    def positives(self) -> list[int]:
        return [i for i, y in enumerate(self.labels) if y]


def window_label(pair: CorpusPair, w: int = 10, metric: str = "rouge1", scoring: str = "singleton",
                 zero_block_positive: bool = True) -> LabeledPair:
    """Label the best-scoring sentence of each disjoint block of ``w`` sentences.

    ``scoring="singleton"`` scores each sentence alone against the gold text;
    ``"marginal-gain"`` scores it appended to the positives chosen in earlier
    blocks. Ties go to the lowest index. A block whose best score is 0 labels
    its first sentence unless ``zero_block_positive`` is False.
    """
    if w < 1:
        raise ValueError("window size must be >= 1")
    if scoring not in ("singleton", "marginal-gain"):
        raise ValueError(f"unknown window scoring {scoring!r}")
    score = metric_fn(metric)
    ref = gold_tokens(pair.gold)
    sents = pair.doc.sentences
    labels = [0] * len(sents)
    chosen: list[Sentence] = []
    for lo in range(0, len(sents), w):
        best_i, best = lo, -1.0
        for i in range(lo, min(lo + w, len(sents))):
            extract = chosen + [sents[i]] if scoring == "marginal-gain" else [sents[i]]
            s = score(rouge_tokens(extract), ref)
            if s > best:
                best_i, best = i, s
        if best > 0 or zero_block_positive:
            labels[best_i] = 1
            chosen.append(sents[best_i])
    return LabeledPair(pair, tuple(labels), "window", metric, w)


def greedy_sequential_label(pair: CorpusPair, metric: str = "rouge1") -> LabeledPair:
    """Scan in order; keep a sentence iff it strictly improves the extract's score."""
    score = metric_fn(metric)
    ref = gold_tokens(pair.gold)
    labels = []
    extract: list[str] = []
    current = 0.0
    for sent in pair.doc.sentences:
        trial = extract + rouge_tokens([sent])
        s = score(trial, ref)
        if s > current:
            labels.append(1)
            extract, current = trial, s
        else:
            labels.append(0)
    return LabeledPair(pair, tuple(labels), "greedy", metric)


def label_pair(pair: CorpusPair, method: str = "window", window: int = 10, metric: str = "rouge1",
               scoring: str = "singleton", zero_block_positive: bool = True) -> LabeledPair:
    if method == "window":
        return window_label(pair, window, metric, scoring, zero_block_positive)
    if method == "greedy":
        return greedy_sequential_label(pair, metric)
    raise ValueError(f"unknown labeling method {method!r}")


@dataclass
class LabelRun:
    labeled: list[LabeledPair]
    skipped: list[str] = field(default_factory=list)

    @property
    def positive_rates(self) -> dict[str, float]:
        return {lp.pair.id: sum(lp.labels) / len(lp.labels) for lp in self.labeled}


def label_corpus(pairs: Sequence[CorpusPair], method: str = "window", window: int = 10,
                 metric: str = "rouge1", scoring: str = "singleton", zero_block_positive: bool = True,
                 workers: int = 1) -> LabelRun:
    """Label every pair with non-empty gold text; output order follows ``pairs``."""
    usable = [p for p in pairs if gold_tokens(p.gold)]
    skipped = [p.id for p in pairs if not gold_tokens(p.gold)]
    for doc_id in skipped:
        log.warning("skipping %s: empty gold summary", doc_id)
    fn = partial(label_pair, method=method, window=window, metric=metric, scoring=scoring,
                 zero_block_positive=zero_block_positive)
    if workers > 1 and len(usable) > 1:
        with ProcessPoolExecutor(workers) as pool:
            labeled = list(pool.map(fn, usable))
    else:
        labeled = [fn(p) for p in usable]
    return LabelRun(labeled, skipped)


def write_labels(path: str | Path, labeled: Sequence[LabeledPair]) -> None:
    lines = [f"{lp.pair.id}\t{''.join(map(str, lp.labels))}" for lp in labeled]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def read_labels(path: str | Path) -> dict[str, tuple[int, ...]]:
    out = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read label file {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2 or set(parts[1]) - {"0", "1"}:
            raise DataError(f"{path}:{lineno}: expected '<id>\\t<0/1 string>'")
        out[parts[0]] = tuple(int(c) for c in parts[1])
    return out


def attach_labels(pairs: Sequence[CorpusPair], labels: dict[str, tuple[int, ...]],
                  method: str = "file") -> list[LabeledPair]:
    out = []
    for p in pairs:
        if p.id not in labels:
            continue
        if len(labels[p.id]) != p.doc.n:
            raise DataError(f"label length mismatch for {p.id}: {len(labels[p.id])} vs {p.doc.n} sentences")
        out.append(LabeledPair(p, labels[p.id], method))
    return out


def positive_count_window(n: int, w: int) -> int:
    return math.ceil(n / w)
