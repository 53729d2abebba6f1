"""Independent straight-line reimplementations used as test oracles.

Nothing here imports the tape or the batched code paths; everything is
plain Python loops over floats or small numpy vectors.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np


# -- ROUGE -------------------------------------------------------------------------

def brute_rouge_n(cand, ref, n) -> Fraction:
    """Clipped n-gram recall as an exact fraction, by explicit enumeration."""
    ref_grams = [tuple(ref[i:i + n]) for i in range(len(ref) - n + 1)]
    cand_grams = [tuple(cand[i:i + n]) for i in range(len(cand) - n + 1)]
    if not ref_grams:
        return Fraction(0)
    hit = 0
    for g in set(ref_grams):
        hit += min(ref_grams.count(g), cand_grams.count(g))
    return Fraction(hit, len(ref_grams))


def is_subsequence(sub, seq) -> bool:
    it = iter(seq)
    return all(any(x == y for y in it) for x in sub)


def brute_lcs(a, b) -> int:
    """Longest common subsequence by enumerating subsequences of the shorter list."""
    short, long_ = (a, b) if len(a) <= len(b) else (b, a)
    for size in range(len(short), 0, -1):
        for idx in itertools.combinations(range(len(short)), size):
            if is_subsequence([short[i] for i in idx], long_):
                return size
    return 0


# -- scalar LSTM -------------------------------------------------------------------

def _sig(x: float) -> float:
    return 1.0 / (1.0 + math.exp(-x))


def lstm_oracle(xs, W_x, W_h, b):
    """Hidden states of a gate-ordered (i, f, o, g) LSTM via explicit loops."""
    H = W_h.shape[0]
    h = [0.0] * H
    c = [0.0] * H
    outs = []
    for x in xs:
        pre = []
        for j in range(4 * H):
            s = b[j]
            for k, xk in enumerate(x):
                s += xk * W_x[k, j]
            for k, hk in enumerate(h):
                s += hk * W_h[k, j]
            pre.append(s)
        new_h, new_c = [], []
        for u in range(H):
            i = _sig(pre[u])
            f = _sig(pre[H + u])
            o = _sig(pre[2 * H + u])
            g = math.tanh(pre[3 * H + u])
            cu = f * c[u] + i * g
            new_c.append(cu)
            new_h.append(o * math.tanh(cu))
        h, c = new_h, new_c
        outs.append(list(h))
    return np.array(outs)


def bilstm_oracle(xs, fwd, bwd):
    """Per-step [forward, backward] states; backward run on the reversed list."""
    f = lstm_oracle(xs, *fwd)
    r = lstm_oracle(xs[::-1], *bwd)[::-1]
    return np.concatenate([f, r], axis=1)


def softmax_oracle(v):
    m = max(v)
    e = [math.exp(x - m) for x in v]
    s = sum(e)
    return np.array([x / s for x in e])


# -- ranker ------------------------------------------------------------------------

def _lstm_args(P, side):
    return (P[f"{side}.W_x"].data, P[f"{side}.W_h"].data, P[f"{side}.b"].data)


def sentence_oracle(P, ids):
    """Sentence embedding from token ids, either encoder mode."""
    cfg = P.config
    xs = [P["embedding"].data[t] for t in ids]
    states = bilstm_oracle(xs, _lstm_args(P, "word_fwd"), _lstm_args(P, "word_bwd"))
    H = cfg.hidden
    if cfg.encoder == "simple":
        return np.concatenate([states[-1, :H], states[0, H:]])
    rows = []
    for head in P["word_attn"].data:
        a = softmax_oracle([float(head @ s) for s in states])
        rows.append(sum(a[t] * states[t] for t in range(len(states))))
    return np.concatenate(rows)


def doc_oracle(P, sent_embs):
    cfg = P.config
    if cfg.encoder == "simple":
        m = sum(sent_embs) / len(sent_embs)
        return np.maximum(P["doc_proj.W"].data @ m + P["doc_proj.b"].data, 0.0)
    states = bilstm_oracle(list(sent_embs), _lstm_args(P, "doc_fwd"), _lstm_args(P, "doc_bwd"))
    rows = []
    for head in P["sent_attn"].data:
        a = softmax_oracle([float(head @ s) for s in states])
        rows.append(sum(a[t] * states[t] for t in range(len(states))))
    return np.concatenate(rows)


def score_oracle(P, sentences):
    """Sequential probabilities for a list of token-id lists."""
    cfg = P.config
    E = [sentence_oracle(P, ids) for ids in sentences]
    doc = doc_oracle(P, E)
    n = len(E)
    s = np.zeros_like(E[0])
    probs = []
    sign = -1.0 if cfg.novelty == "negate" else 1.0
    for i, e in enumerate(E):
        bucket = min(i * cfg.pos_buckets // n, cfg.pos_buckets - 1)
        logit = (P["content"].data @ e + P["pos"].data[bucket] + doc @ P["salience"].data @ e
                 + sign * (s @ P["novelty"].data @ e) + float(P["bias"].data))
        p = _sig(logit)
        probs.append(p)
        s = s + p * e
    return np.array(probs)
