"""Training, summary selection, evaluation and the window-size sweep."""

from __future__ import annotations

import copy
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from winsumm import DataError
from winsumm.baselines import budget_count, lead_fraction, rank_order, textrank
from winsumm.corpus import (
    CorpusPair, Document, Vocabulary, build_vocabulary, load_corpus, load_word_vectors, shape_document,
    split_pairs,
)
from winsumm.harness import plotting
from winsumm.harness.config import RunConfig
from winsumm.labeling import (
    LabeledPair, attach_labels, gold_tokens, label_corpus, read_labels, rouge_tokens,
)
from winsumm.model import (
    RankerParams, document_loss, init_params, load_checkpoint, predict, save_checkpoint,
)
from winsumm.rouge import rouge_n_recall, rouge_scores
from winsumm.tensor import AdaDeltaState, Tape, adadelta_step, clip_grad_norm, zero_grad

log = logging.getLogger(__name__)

Selector = Callable[[CorpusPair], Sequence[int]]


class TrainingDiverged(RuntimeError):
    pass


def select_summary(probs, budget_fraction: float = 0.2) -> list[int]:
    """Top ceil(budget * n) sentences by score (ties to the lower index), in document order."""
    k = budget_count(len(probs), budget_fraction)
    return sorted(rank_order(list(probs))[:k])


def summary_tokens(doc: Document, selected: Sequence[int]) -> list[str]:
    return rouge_tokens([doc.sentences[i] for i in selected])


# -- data ----------------------------------------------------------------------------

@dataclass
class Prepared:
    vocab: Vocabulary
    train: list[CorpusPair]
    valid: list[CorpusPair]
    test: list[CorpusPair]
    embeddings: np.ndarray | None = None

    def split(self, name: str) -> list[CorpusPair]:
        if name not in ("train", "valid", "test"):
            raise ValueError(f"unknown split {name!r}")
        return getattr(self, name)


def prepare(cfg: RunConfig) -> Prepared:
    if not cfg.corpus:
        raise DataError("no corpus directory configured")
    pairs = load_corpus(cfg.corpus)
    train, valid, test = split_pairs(pairs, cfg.seed, cfg.split_fractions)
    vocab = build_vocabulary(train, cfg.min_count)
    emb = load_word_vectors(cfg.vectors, vocab, cfg.word_dim, cfg.seed).matrix if cfg.vectors else None
    return Prepared(vocab, train, valid, test, emb)


def label_split(cfg: RunConfig, pairs: Sequence[CorpusPair], method: str | None = None,
                window: int | None = None) -> list[LabeledPair]:
    """Labels from ``cfg.labels`` when set (and no override given), else computed."""
    if cfg.labels and method is None and window is None:
        return attach_labels(pairs, read_labels(cfg.labels))
    run = label_corpus(pairs, method or cfg.label_method, window or cfg.window, cfg.label_metric,
                       cfg.window_scoring, cfg.zero_block_positive)
    return [lp for lp in run.labeled if lp.pair.doc.n > 0]


# -- evaluation ----------------------------------------------------------------------

@dataclass(frozen=True)
class DocResult:
    doc_id: str
    selected: tuple[int, ...]
    r1: float
    r2: float
    rl: float


@dataclass
class EvalReport:
    system: str
    rows: list[DocResult]
    skipped: list[str] = field(default_factory=list)
    duration: float = field(default=0.0, compare=False)

    @property
    def means(self) -> tuple[float, float, float]:
        if not self.rows:
            return (0.0, 0.0, 0.0)
        n = len(self.rows)
        return (math.fsum(r.r1 for r in self.rows) / n, math.fsum(r.r2 for r in self.rows) / n,
                math.fsum(r.rl for r in self.rows) / n)


def evaluate_selector(system: str, pairs: Sequence[CorpusPair], selector: Selector) -> EvalReport:
    start = time.perf_counter()
    rows, skipped = [], []
    for pair in pairs:
        ref = gold_tokens(pair.gold)
        if not ref or pair.doc.n == 0:
            skipped.append(pair.id)
            continue
        selected = tuple(int(i) for i in selector(pair))
        s = rouge_scores(summary_tokens(pair.doc, selected), ref)
        rows.append(DocResult(pair.id, selected, s.r1, s.r2, s.rl))
    return EvalReport(system, rows, skipped, time.perf_counter() - start)


def lead_selector(budget: float = 0.2) -> Selector:
    return lambda pair: lead_fraction(pair.doc, budget)


def textrank_selector(budget: float = 0.2) -> Selector:
    return lambda pair: select_summary(textrank(pair.doc).scores, budget)


def ranker_selector(params: RankerParams, vocab: Vocabulary, budget: float = 0.2,
                    max_sents: int = 500, max_toks: int = 50) -> Selector:
    def select(pair: CorpusPair) -> list[int]:
        return select_summary(predict(shape_document(pair.doc, vocab, max_sents, max_toks), params), budget)
    return select


def mean_rouge1(params: RankerParams, vocab: Vocabulary, pairs: Sequence[CorpusPair], cfg: RunConfig) -> float:
    report = evaluate_selector("ranker", pairs, ranker_selector(params, vocab, cfg.budget, cfg.max_sents,
                                                                cfg.max_toks))
    return report.means[0]


def oracle_rouge1(labeled: Sequence[LabeledPair]) -> float:
    """Mean ROUGE-1 recall of the extract made of every positively labeled sentence."""
    scores = [rouge_n_recall(summary_tokens(lp.pair.doc, lp.positives), gold_tokens(lp.pair.gold), 1)
              for lp in labeled]
    return math.fsum(scores) / len(scores) if scores else 0.0


# -- training ------------------------------------------------------------------------

@dataclass
class TrainResult:
    params: RankerParams
    final_params: RankerParams
    curve: list[tuple[int, float, float]]
    step_losses: list[float]
    best_epoch: int
    checkpoint: Path | None = None
    curve_path: Path | None = None

    @property
    def steps(self) -> int:
        return len(self.step_losses)


def fit(cfg: RunConfig, train: Sequence[LabeledPair], valid: Sequence[CorpusPair], vocab: Vocabulary,
        embeddings: np.ndarray | None = None, out_dir: str | Path | None = None,
        params: RankerParams | None = None) -> TrainResult:
    """AdaDelta over one document per step, shuffled each epoch by ``cfg.seed``.

    The returned ``params`` are those of the epoch with the best validation
    ROUGE-1 recall (the last epoch when ``valid`` is empty).
    """
    if not train:
        raise DataError("no labeled training documents")
    params = params or init_params(cfg.model_config(), len(vocab), cfg.seed, embeddings)
    plist = params.list()
    state = AdaDeltaState.for_params(plist, cfg.lr, cfg.rho, cfg.eps)
    shaped = [shape_document(lp.pair.doc, vocab, cfg.max_sents, cfg.max_toks) for lp in train]
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(2,)))
    out = Path(out_dir) if out_dir else None
    if out:
        out.mkdir(parents=True, exist_ok=True)
        vocab.save(out / "vocab.txt")
        curve_path = out / "loss_curve.tsv"
        curve_path.write_text("epoch\tmean_loss\tval_rouge1\n", encoding="utf-8")

    curve: list[tuple[int, float, float]] = []
    step_losses: list[float] = []
    best, best_r1, best_epoch = None, -math.inf, 0
    for epoch in range(1, cfg.epochs + 1):
        losses = []
        for k in rng.permutation(len(train)):
            zero_grad(plist)
            with Tape() as tape:
                loss = document_loss(shaped[k], train[k].labels, params)
            value = loss.item()
            if not math.isfinite(value):
                raise TrainingDiverged(f"non-finite loss at epoch {epoch}, document {train[k].pair.id} (index {k})")
            tape.backward(loss)
            clip_grad_norm(plist, cfg.clip_norm)
            adadelta_step(plist, state)
            losses.append(value)
            step_losses.append(value)
        mean_loss = math.fsum(losses) / len(losses)
        val_r1 = mean_rouge1(params, vocab, valid, cfg) if valid else float("nan")
        curve.append((epoch, mean_loss, val_r1))
        log.info("epoch %d loss %.6g valid rouge1 %.4f", epoch, mean_loss, val_r1)
        improved = best is None or (valid and val_r1 > best_r1)
        if improved:
            best, best_r1, best_epoch = copy.deepcopy(params), val_r1, epoch
        if out:
            save_checkpoint(params, out / "last.ckpt")
            if improved:
                save_checkpoint(params, out / "best.ckpt")
            with curve_path.open("a", encoding="utf-8") as fh:
                fh.write(f"{epoch}\t{mean_loss!r}\t{val_r1!r}\n")
    if not valid:
        best, best_epoch = copy.deepcopy(params), cfg.epochs
        if out:
            save_checkpoint(params, out / "best.ckpt")
    result = TrainResult(best, params, curve, step_losses, best_epoch)
    if out:
        result.checkpoint = out / "best.ckpt"
        result.curve_path = curve_path
        if cfg.plots:
            plotting.loss_curve_figure(curve, out / "loss_curve.png")
    return result


def train(cfg: RunConfig, data: Prepared | None = None) -> TrainResult:
    data = data or prepare(cfg)
    return fit(cfg, label_split(cfg, data.train), data.valid, data.vocab, data.embeddings, cfg.out)


def load_ranker(checkpoint: str | Path, vocab_path: str | Path | None = None) -> tuple[RankerParams, Vocabulary]:
    checkpoint = Path(checkpoint)
    if not checkpoint.exists():
        raise DataError(f"checkpoint not found: {checkpoint}")
    vocab_path = Path(vocab_path) if vocab_path else checkpoint.parent / "vocab.txt"
    if not vocab_path.exists():
        raise DataError(f"vocabulary not found: {vocab_path}")
    params = load_checkpoint(checkpoint)
    vocab = Vocabulary.load(vocab_path)
    if len(vocab) != params.vocab_size:
        raise DataError(f"vocabulary size {len(vocab)} does not match checkpoint ({params.vocab_size})")
    return params, vocab


# -- reports -------------------------------------------------------------------------

def collapse(text: str) -> str:
    return " ".join(text.split())


def write_summaries(report: EvalReport, pairs: Sequence[CorpusPair], directory: str | Path) -> Path:
    """One file per document: selected indices on the first line, then one sentence per line."""
    directory = Path(directory) / report.system
    directory.mkdir(parents=True, exist_ok=True)
    by_id = {p.id: p for p in pairs}
    for row in report.rows:
        doc = by_id[row.doc_id].doc
        lines = [" ".join(map(str, row.selected))] + [collapse(doc.sentences[i].text) for i in row.selected]
        (directory / f"{row.doc_id}.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return directory


def read_summary(path: str | Path) -> tuple[list[int], list[str]]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    indices = [int(x) for x in lines[0].split()] if lines else []
    return indices, lines[1:]


def write_report(reports: Sequence[EvalReport], path: str | Path) -> Path:
    path = Path(path)
    lines = ["system\tdoc_id\trouge1\trouge2\trougeL\tselected"]
    for rep in reports:
        for r in rep.rows:
            lines.append(f"{rep.system}\t{r.doc_id}\t{r.r1!r}\t{r.r2!r}\t{r.rl!r}\t{' '.join(map(str, r.selected))}")
        m = rep.means
        lines.append(f"{rep.system}\tMEAN\t{m[0]!r}\t{m[1]!r}\t{m[2]!r}\t")
    for rep in reports:
        lines.append(f"# skipped\t{rep.system}\t{len(rep.skipped)}\t{' '.join(rep.skipped)}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_report(path: str | Path) -> dict[str, dict[str, tuple[float, float, float]]]:
    """system -> doc_id (or ``MEAN``) -> (r1, r2, rL)."""
    out: dict[str, dict[str, tuple[float, float, float]]] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines()[1:]:
        if not line or line.startswith("#"):
            continue
        system, doc_id, r1, r2, rl, _ = line.split("\t")
        out.setdefault(system, {})[doc_id] = (float(r1), float(r2), float(rl))
    return out


def write_timing(reports: Sequence[EvalReport], path: str | Path) -> Path:
    lines = ["system\twall_seconds"] + [f"{r.system}\t{r.duration:.3f}" for r in reports]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return Path(path)


def evaluate(cfg: RunConfig, systems: Sequence[str], checkpoint: str | Path | None = None,
             split: str = "test", data: Prepared | None = None,
             out_dir: str | Path | None = None) -> list[EvalReport]:
    """Score each system on a split; writes report.tsv, timing.tsv, summaries/ and report.png."""
    data = data or prepare(cfg)
    pairs = data.split(split)
    if not pairs:
        raise DataError(f"split {split!r} is empty")
    reports = []
    for system in systems:
        if system == "lead":
            selector = lead_selector(cfg.budget)
        elif system == "textrank":
            selector = textrank_selector(cfg.budget)
        elif system == "ranker":
            if not checkpoint:
                raise DataError("ranker evaluation needs a checkpoint")
            params, vocab = load_ranker(checkpoint)
            selector = ranker_selector(params, vocab, cfg.budget, cfg.max_sents, cfg.max_toks)
        else:
            raise ValueError(f"unknown system {system!r}")
        reports.append(evaluate_selector(system, pairs, selector))
    out = Path(out_dir or cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    write_report(reports, out / "report.tsv")
    write_timing(reports, out / "timing.tsv")
    for rep in reports:
        write_summaries(rep, pairs, out / "summaries")
    if cfg.plots:
        plotting.report_figure({r.system: r.means for r in reports}, out / "report.png")
    return reports


def sweep_window(cfg: RunConfig, sizes: Sequence[int] = (3, 5, 7, 10, 15),
                 data: Prepared | None = None) -> list[tuple[int, float, float]]:
    """Label, train and validate once per window size.

    Each row is (window, validation ROUGE-1 of the trained ranker, validation
    ROUGE-1 of the oracle extract built from that window's labels).
    """
    data = data or prepare(cfg)
    if not data.valid:
        raise DataError("window sweep needs a non-empty validation split")
    out = Path(cfg.out)
    rows = []
    for w in sizes:
        labeled = label_split(cfg, data.train, "window", w)
        result = fit(cfg, labeled, data.valid, data.vocab, data.embeddings, out / "sweep" / f"w{w}")
        ranker_r1 = mean_rouge1(result.params, data.vocab, data.valid, cfg)
        oracle = oracle_rouge1(label_split(cfg, data.valid, "window", w))
        rows.append((w, ranker_r1, oracle))
    out.mkdir(parents=True, exist_ok=True)
    lines = ["window\tranker_rouge1\toracle_rouge1"] + [f"{w}\t{r!r}\t{o!r}" for w, r, o in rows]
    (out / "sweep.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    if cfg.plots:
        plotting.sweep_figure(rows, out / "sweep.png")
    return rows
