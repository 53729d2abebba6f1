"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Thresholds and runtime limits are fixed here and never relaxed; a criterion
that is not met fails its test.
"""

from __future__ import annotations

import dataclasses
import math
import time
from fractions import Fraction

import numpy as np

from conftest import ACCEPTANCE_LINES
from oracles import brute_lcs, brute_rouge_n
from winsumm.baselines import lead_fraction, textrank
from winsumm.corpus import CorpusPair, load_corpus, make_document, shape_document, split_pairs
from winsumm.harness import pipeline
from winsumm.harness.checks import model_gradcheck
from winsumm.harness.config import RunConfig
from winsumm.harness.synthetic import overfit_corpus, sectioned_corpus, write_corpus
from winsumm.labeling import gold_tokens, greedy_sequential_label, rouge_tokens, window_label
from winsumm.model import init_params, load_checkpoint, predict
from winsumm.rouge import METRICS, lcs_length, rouge_l_recall, rouge_n_counts, rouge_n_recall

def record(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.start


ALPHABET = list("abcde")
WORDS = ["alpha", "beta", "gamma", "delta", "omega", "kappa", "sigma", "theta", "zeta", "iota"]


def test_rouge_oracle_equivalence():
    rng = np.random.default_rng(2024)
    mismatches = 0
    with Timer() as t:
        for _ in range(200):
            cand = list(rng.choice(ALPHABET, int(rng.integers(0, 13))))
            ref = list(rng.choice(ALPHABET, int(rng.integers(0, 13))))
            for n in (1, 2):
                hit, total = rouge_n_counts(cand, ref, n)
                oracle = brute_rouge_n(cand, ref, n)
                # cross-multiplied rational comparison, tolerance 0
                if hit * oracle.denominator != oracle.numerator * max(total, 1):
                    mismatches += 1
                if rouge_n_recall(cand, ref, n) != float(oracle):
                    mismatches += 1
            short_c, short_r = cand[:10], ref[:10]
            lcs = lcs_length(short_c, short_r)
            oracle_lcs = brute_lcs(short_c, short_r)
            if lcs != oracle_lcs:
                mismatches += 1
            expected = float(Fraction(oracle_lcs, len(short_r))) if short_r else 0.0
            if rouge_l_recall(short_c, short_r) != expected:
                mismatches += 1
    ok = mismatches == 0 and t.seconds < 10
    record(1, "ROUGE oracle equivalence", ok, f"{mismatches} mismatches over 200 pairs, {t.seconds:.2f}s (limit 10s)")
    assert ok


def random_pair(rng, doc_id):
    n = int(rng.integers(1, 61))
    sents = [" ".join(rng.choice(WORDS, int(rng.integers(1, 8)))).capitalize() + "." for _ in range(n)]
    gold = " ".join(" ".join(rng.choice(WORDS, int(rng.integers(1, 6)))).capitalize() + "."
                    for _ in range(int(rng.integers(1, 4))))
    return CorpusPair(make_document(doc_id, " ".join(sents)), make_document(doc_id, gold))


def test_labeler_correctness():
    rng = np.random.default_rng(7)
    problems = []
    with Timer() as t:
        for k in range(100):
            pair = random_pair(rng, f"d{k}")
            w = int(rng.integers(1, 13))
            lp = window_label(pair, w)
            ref = gold_tokens(pair.gold)
            n = pair.doc.n
            if sum(lp.labels) != math.ceil(n / w):
                problems.append(f"d{k}: {sum(lp.labels)} positives for n={n}, w={w}")
            scores = [METRICS["rouge1"](rouge_tokens([s]), ref) for s in pair.doc.sentences]
            for lo in range(0, n, w):
                block = range(lo, min(lo + w, n))
                chosen = [i for i in block if lp.labels[i]]
                if len(chosen) != 1 or any(scores[i] > scores[chosen[0]] for i in block):
                    problems.append(f"d{k}: block at {lo} not maximized")
            greedy = greedy_sequential_label(pair)
            prev, extract = 0.0, []
            for i in greedy.positives:
                extract.append(pair.doc.sentences[i])
                s = METRICS["rouge1"](rouge_tokens(extract), ref)
                if not s > prev:
                    problems.append(f"d{k}: greedy replay not increasing at {i}")
                prev = s
    ok = not problems and t.seconds < 30
    record(2, "labeler correctness", ok, f"{len(problems)} violations over 100 pairs, {t.seconds:.2f}s (limit 30s)")
    assert ok, problems[:5]


def test_gradient_fidelity():
    with Timer() as t:
        errors = {enc: max(model_gradcheck(enc, hidden=8, heads=2, step=1e-5).values())
                  for enc in ("simple", "hierarchical")}
    worst = max(errors.values())
    ok = worst < 1e-4 and t.seconds < 60
    detail = ", ".join(f"{k} {v:.2e}" for k, v in errors.items())
    record(3, "gradient fidelity", ok, f"max relative error {detail} (limit 1e-4), {t.seconds:.1f}s (limit 60s)")
    assert ok


def test_overfit_capability(tmp_path):
    corpus = write_corpus(overfit_corpus(n_docs=8, n_sents=20, seed=0), tmp_path / "corpus")
    cfg = RunConfig(corpus=str(corpus), epochs=200, lr=0.1, window=10, split="1:0:0", plots=False)
    with Timer() as t:
        data = pipeline.prepare(cfg)
        labeled = pipeline.label_split(cfg, data.train)
        result = pipeline.fit(cfg, labeled, [], data.vocab)
        recovered = total = 0
        for lp in labeled:
            probs = predict(shape_document(lp.pair.doc, data.vocab), result.final_params)
            picked = set(pipeline.select_summary(probs, 2 / 20))
            recovered += len(picked & set(lp.positives))
            total += len(lp.positives)
    first, last = result.curve[0][1], result.curve[-1][1]
    ratio = last / first
    recall = recovered / total
    ok = ratio < 0.10 and recall >= 0.90 and t.seconds < 300
    record(4, "overfit capability", ok,
           f"loss {first:.4g} -> {last:.3g} (ratio {ratio:.2e}, limit 0.10); recovered {recovered}/{total} "
           f"labeled sentences ({recall:.0%}, limit 90%); {t.seconds:.0f}s (limit 300s)")
    assert ok


def test_directional_window_vs_greedy(tmp_path):
    corpus = write_corpus(sectioned_corpus(n_docs=60, seed=0), tmp_path / "corpus")
    cfg = RunConfig(corpus=str(corpus), out=str(tmp_path / "run"), seed=0, epochs=40, word_dim=16, hidden=16,
                    split="4:1:1", plots=False)
    with Timer() as t:
        data = pipeline.prepare(cfg)
        scores = {}
        for method in ("window", "greedy"):
            run_cfg = dataclasses.replace(cfg, label_method=method)
            result = pipeline.fit(run_cfg, pipeline.label_split(run_cfg, data.train), data.valid, data.vocab)
            scores[method] = pipeline.mean_rouge1(result.params, data.vocab, data.test, cfg)
        untrained = init_params(cfg.model_config(), len(data.vocab), cfg.seed)
        scores["random"] = pipeline.mean_rouge1(untrained, data.vocab, data.test, cfg)
    margin = scores["window"] - scores["greedy"]
    ok = (margin > 0 and scores["greedy"] > scores["random"] and scores["window"] > scores["random"]
          and t.seconds < 900)
    record(5, "directional window vs greedy", ok,
           f"test ROUGE-1 window {scores['window']:.4f}, greedy {scores['greedy']:.4f} (margin {margin:+.4f}), "
           f"random {scores['random']:.4f}; {t.seconds:.0f}s (limit 900s)")
    assert ok


def test_baseline_sanity(tmp_path):
    pairs = load_corpus(write_corpus(sectioned_corpus(n_docs=12, seed=3), tmp_path / "corpus"))
    _, _, test_split = split_pairs(pairs, 0, (4, 1, 1))
    rng = np.random.default_rng(11)
    docs = [p.doc for p in test_split] + [
        make_document(f"r{k}", " ".join(" ".join(rng.choice(WORDS, int(rng.integers(1, 7)))).capitalize() + "."
                                        for _ in range(int(rng.integers(1, 40)))))
        for k in range(20)]
    problems = []
    with Timer() as t:
        for doc in docs:
            r = textrank(doc)
            if abs(r.scores.sum() - 1.0) > 1e-6 or r.iterations > 200 or not r.residual < 1e-8:
                problems.append(f"{doc.id}: sum {r.scores.sum()}, {r.iterations} iterations, residual {r.residual}")
            if lead_fraction(doc, 0.2) != list(range(math.ceil(round(0.2 * doc.n, 9)))):
                problems.append(f"{doc.id}: lead size")
        for n in range(1, 201):
            doc = make_document("n", " ".join(f"Line {i}." for i in range(n)))
            if len(lead_fraction(doc, 0.2)) != math.ceil(round(0.2 * n, 9)):
                problems.append(f"lead n={n}")
        dup = textrank(make_document("dup", "Alpha beta gamma. Alpha beta gamma. Omega kappa."))
        dup_ok = min(dup.scores[0], dup.scores[1]) > dup.scores[2]
    ok = not problems and dup_ok and t.seconds < 5
    record(6, "baseline sanity", ok,
           f"{len(docs)} documents, {len(problems)} violations, duplicate pair outranks disjoint: {dup_ok}; "
           f"{t.seconds:.2f}s (limit 5s)")
    assert ok, problems[:5]


def test_determinism_and_persistence(tmp_path):
    corpus = write_corpus(sectioned_corpus(n_docs=12, seed=4), tmp_path / "corpus")
    base = RunConfig(corpus=str(corpus), seed=3, epochs=3, word_dim=8, hidden=8, encoder="hierarchical",
                     heads=2, split="4:1:1", plots=False)
    with Timer() as t:
        texts, reports = [], []
        for name in ("a", "b"):
            cfg = dataclasses.replace(base, out=str(tmp_path / name))
            result = pipeline.train(cfg)
            reports.append(pipeline.evaluate(cfg, ["lead", "textrank", "ranker"], result.checkpoint))
            texts.append((tmp_path / name / "report.tsv").read_text())
        same_report = texts[0] == texts[1] and reports[0] == reports[1]
        data = pipeline.prepare(base)
        reloaded = load_checkpoint(tmp_path / "a" / "last.ckpt")
        mismatched = 0
        compared = 0
        for pair in data.train + data.valid + data.test:
            shaped = shape_document(pair.doc, data.vocab)
            a, b = predict(shaped, result.final_params), predict(shaped, reloaded)
            compared += a.size
            mismatched += int(np.sum(a != b))
    ok = same_report and mismatched == 0 and t.seconds < 120
    record(7, "determinism and persistence", ok,
           f"identical reports: {same_report}; {mismatched}/{compared} probabilities differ after reload; "
           f"{t.seconds:.1f}s (limit 120s)")
    assert ok

