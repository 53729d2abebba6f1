"""Sentence ranker: biLSTM sentence encoder, simple or hierarchical-attention
document encoder, and sequential position/content/salience/redundancy scoring
with a probability-weighted running summary vector."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from winsumm.corpus import ShapedDocument
from winsumm.tensor import (
    ShapeError, Tensor, bilstm, clip, dot, embedding_lookup, init_lstm, log, matmul, mean, mul,
    parameter, relu, reshape, sigmoid, softmax, stack, sum, transpose,
)

CKPT_MAGIC = "WINSUMM-CKPT 1"
PROB_CLAMP = 1e-7


class CheckpointError(ValueError):
    pass


@dataclass(frozen=True)
class ModelConfig:
    word_dim: int = 50
    hidden: int = 50
    doc_hidden: int = 0  # 0 means "same as hidden"
    heads: int = 1
    encoder: str = "simple"
    pos_buckets: int = 10
    w_pos_class: float = 85.0
    w_neg_class: float = 2.0
    novelty: str = "negate"

    def __post_init__(self):
        for name in ("word_dim", "hidden", "heads", "pos_buckets"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.doc_hidden < 0:
            raise ValueError("doc_hidden must be >= 0")
        if self.encoder not in ("simple", "hierarchical"):
            raise ValueError(f"unknown encoder {self.encoder!r}")
        if self.novelty not in ("negate", "additive"):
            raise ValueError(f"unknown novelty mode {self.novelty!r}")
        if self.w_pos_class <= 0 or self.w_neg_class <= 0:
            raise ValueError("loss weights must be positive")

    @property
    def doc_hidden_size(self) -> int:
        return self.doc_hidden or self.hidden

    @property
    def sent_dim(self) -> int:
        return 2 * self.hidden * (self.heads if self.encoder == "hierarchical" else 1)

    @property
    def doc_dim(self) -> int:
        if self.encoder == "hierarchical":
            return 2 * self.doc_hidden_size * self.heads
        return self.sent_dim

    def to_lines(self) -> list[str]:
        return [f"{k}={v}" for k, v in asdict(self).items()]

    @classmethod
    def from_mapping(cls, values: dict[str, str]) -> "ModelConfig":
        kwargs = {}
        for f in fields(cls):
            if f.name in values:
                raw = values[f.name]
                kwargs[f.name] = {int: int, float: float}.get(type(f.default), str)(raw)
        return cls(**kwargs)

    def param_shapes(self, vocab_size: int) -> dict[str, tuple[int, ...]]:
        H, D = self.hidden, self.sent_dim
        shapes = {"embedding": (vocab_size, self.word_dim)}
        for side in ("word_fwd", "word_bwd"):
            shapes.update({f"{side}.W_x": (self.word_dim, 4 * H), f"{side}.W_h": (H, 4 * H), f"{side}.b": (4 * H,)})
        if self.encoder == "simple":
            shapes.update({"doc_proj.W": (D, D), "doc_proj.b": (D,)})
        else:
            Hd = self.doc_hidden_size
            shapes["word_attn"] = (self.heads, 2 * H)
            for side in ("doc_fwd", "doc_bwd"):
                shapes.update({f"{side}.W_x": (D, 4 * Hd), f"{side}.W_h": (Hd, 4 * Hd), f"{side}.b": (4 * Hd,)})
            shapes["sent_attn"] = (self.heads, 2 * Hd)
        shapes.update({
            "content": (D,),
            "salience": (self.doc_dim, D),
            "novelty": (D, D),
            "pos": (self.pos_buckets,),
            "bias": (),
        })
        return shapes


@dataclass
class RankerParams:
    config: ModelConfig
    tensors: dict[str, Tensor]

    def __getitem__(self, name: str) -> Tensor:
        return self.tensors[name]

    def list(self) -> list[Tensor]:
        return list(self.tensors.values())

    def lstm(self, side: str) -> dict[str, Tensor]:
        return {k: self.tensors[f"{side}.{k}"] for k in ("W_x", "W_h", "b")}

    @property
    def vocab_size(self) -> int:
        return self.tensors["embedding"].shape[0]


def init_params(config: ModelConfig, vocab_size: int, seed: int = 0,
                embeddings: np.ndarray | None = None) -> RankerParams:
    """Uniform [-0.1, 0.1] weights, zero biases; ``embeddings`` seeds the word table."""
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(1,)))
    t: dict[str, Tensor] = {}
    if embeddings is not None:
        if embeddings.shape != (vocab_size, config.word_dim):
            raise ShapeError(f"embedding matrix {embeddings.shape} != ({vocab_size}, {config.word_dim})")
        t["embedding"] = parameter(embeddings, "embedding")
    else:
        table = rng.uniform(-0.1, 0.1, (vocab_size, config.word_dim))
        table[0] = 0.0
        t["embedding"] = parameter(table, "embedding")
    for side in ("word_fwd", "word_bwd"):
        for k, v in init_lstm(rng, config.word_dim, config.hidden, side).items():
            t[f"{side}.{k}"] = v
    D = config.sent_dim
    if config.encoder == "simple":
        t["doc_proj.W"] = parameter(rng.uniform(-0.1, 0.1, (D, D)), "doc_proj.W")
        t["doc_proj.b"] = parameter(np.zeros(D), "doc_proj.b")
    else:
        Hd = config.doc_hidden_size
        t["word_attn"] = parameter(rng.uniform(-0.1, 0.1, (config.heads, 2 * config.hidden)), "word_attn")
        for side in ("doc_fwd", "doc_bwd"):
            for k, v in init_lstm(rng, D, Hd, side).items():
                t[f"{side}.{k}"] = v
        t["sent_attn"] = parameter(rng.uniform(-0.1, 0.1, (config.heads, 2 * Hd)), "sent_attn")
    t["content"] = parameter(rng.uniform(-0.1, 0.1, D), "content")
    t["salience"] = parameter(rng.uniform(-0.1, 0.1, (config.doc_dim, D)), "salience")
    t["novelty"] = parameter(rng.uniform(-0.1, 0.1, (D, D)), "novelty")
    t["pos"] = parameter(np.zeros(config.pos_buckets), "pos")
    t["bias"] = parameter(np.zeros(()), "bias")
    return RankerParams(config, t)


# -- encoders -------------------------------------------------------------------

def encode_sentences(params: RankerParams, token_ids: np.ndarray, lengths) -> Tensor:
    """Embeddings (n, sent_dim) for rows of ``token_ids`` with true ``lengths``.

    Simple mode concatenates the final forward and backward states; hierarchical
    mode pools the per-word states with ``heads`` attention rows and flattens.
    """
    lengths = np.asarray(lengths, dtype=np.int64)
    if lengths.size == 0 or lengths.min() < 1:
        raise ShapeError("encode_sentences: every sentence needs length >= 1")
    T = int(lengths.max())
    ids = np.asarray(token_ids)[:, :T]
    x = embedding_lookup(params["embedding"], ids)
    states, final = bilstm(x, params.lstm("word_fwd"), params.lstm("word_bwd"), lengths)
    if params.config.encoder == "simple":
        return final
    n = len(lengths)
    scores = transpose(matmul(states, transpose(params["word_attn"])), (0, 2, 1))
    mask = (np.arange(T)[None, :] < lengths[:, None])[:, None, :]
    weights = softmax(scores, axis=2, mask=mask)
    return reshape(matmul(weights, states), (n, params.config.sent_dim))


def encode_sentence(token_ids, length: int, params: RankerParams) -> Tensor:
    if length < 1:
        raise ShapeError("encode_sentence: length must be >= 1")
    row = np.asarray(token_ids)[None, :length]
    return reshape(encode_sentences(params, row, [length]), (params.config.sent_dim,))


def doc_embed_simple(sent_emb: Tensor, params: RankerParams) -> Tensor:
    return relu(matmul(params["doc_proj.W"], mean(sent_emb, axis=0)) + params["doc_proj.b"])


def doc_embed_hierarchical(sent_emb: Tensor, params: RankerParams) -> tuple[Tensor, Tensor, Tensor]:
    """Return (document vector, doc-level hidden states (n, 2H'), attention (k, n))."""
    n, D = sent_emb.shape
    states, _ = bilstm(reshape(sent_emb, (1, n, D)), params.lstm("doc_fwd"), params.lstm("doc_bwd"))
    h = reshape(states, (n, states.shape[2]))
    weights = softmax(matmul(params["sent_attn"], transpose(h)), axis=1)
    return reshape(matmul(weights, h), (params.config.doc_dim,)), h, weights


def doc_embedding(sent_emb: Tensor, params: RankerParams) -> Tensor:
    if params.config.encoder == "simple":
        return doc_embed_simple(sent_emb, params)
    return doc_embed_hierarchical(sent_emb, params)[0]


# -- scoring --------------------------------------------------------------------

@dataclass
class SummaryState:
    vector: Tensor
    step: int = 0

    @classmethod
    def empty(cls, dim: int) -> "SummaryState":
        return cls(Tensor(np.zeros(dim)), 0)


def update_summary_state(state: SummaryState, p: Tensor, sent: Tensor) -> SummaryState:
    if state.vector.shape != sent.shape:
        raise ShapeError(f"summary state {state.vector.shape} vs sentence {sent.shape}")
    return SummaryState(state.vector + mul(sent, p), state.step + 1)


def position_buckets(n: int, buckets: int) -> np.ndarray:
    """Bucket of relative position i/n (0-based i) among ``buckets`` equal bins."""
    return np.minimum((np.arange(n) * buckets) // n, buckets - 1)


def score_sentences(params: RankerParams, sent_emb: Tensor, doc_emb: Tensor) -> Tensor:
    """Sequential inclusion probabilities for already-encoded sentences."""
    n = sent_emb.shape[0]
    content = matmul(sent_emb, params["content"])
    pos = params["pos"][position_buckets(n, params.config.pos_buckets)]
    salience = matmul(sent_emb, matmul(transpose(params["salience"]), doc_emb))
    base = content + pos + salience + params["bias"]
    projected = matmul(sent_emb, transpose(params["novelty"]))
    sign = -1.0 if params.config.novelty == "negate" else 1.0
    state = SummaryState.empty(params.config.sent_dim)
    probs = []
    for i in range(n):
        redundancy = dot(state.vector, projected[i])
        p = sigmoid(base[i] + redundancy * sign)
        probs.append(p)
        state = update_summary_state(state, p, sent_emb[i])
    return stack(probs)


def score_document(shaped: ShapedDocument, params: RankerParams) -> Tensor:
    """Probabilities p_1..p_n for the real sentences of ``shaped``."""
    n = shaped.n_real
    if n < 1:
        raise ShapeError("score_document: document has no sentences")
    sent_emb = encode_sentences(params, shaped.token_ids[:n], shaped.sent_lengths[:n])
    return score_sentences(params, sent_emb, doc_embedding(sent_emb, params))


def predict(shaped: ShapedDocument, params: RankerParams) -> np.ndarray:
    """Tape-free scoring."""
    return score_document(shaped, params).data.copy()


def weighted_bce_loss(probs: Tensor, labels, w_pos_class: float = 85.0, w_neg_class: float = 2.0) -> Tensor:
    y = np.asarray(labels, dtype=np.float64)
    if y.shape != probs.shape:
        raise ShapeError(f"weighted_bce_loss: probs {probs.shape} vs labels {y.shape}")
    p = clip(probs, PROB_CLAMP, 1.0 - PROB_CLAMP)
    pos = sum(mul(log(p), y)) * -w_pos_class
    neg = sum(mul(log(1.0 - p), 1.0 - y)) * -w_neg_class
    return pos + neg


def document_loss(shaped: ShapedDocument, labels, params: RankerParams) -> Tensor:
    cfg = params.config
    return weighted_bce_loss(score_document(shaped, params), list(labels)[: shaped.n_real],
                             cfg.w_pos_class, cfg.w_neg_class)


# -- checkpoints ----------------------------------------------------------------

def save_checkpoint(params: RankerParams, path: str | Path) -> None:
    lines = [CKPT_MAGIC, *params.config.to_lines()]
    for name, t in params.tensors.items():
        lines.append(" ".join([name, *map(str, t.shape)]))
        lines.append(" ".join(format(x, ".17g") for x in t.data.reshape(-1)))
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def load_checkpoint(path: str | Path, config: ModelConfig | None = None) -> RankerParams:
    """Read a checkpoint; with ``config``, require it to match that architecture."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="ascii").splitlines()
    except (OSError, UnicodeDecodeError) as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    if not lines or lines[0].strip() != CKPT_MAGIC:
        raise CheckpointError(f"{path}: missing version line {CKPT_MAGIC!r}")
    settings: dict[str, str] = {}
    tensors: dict[str, Tensor] = {}
    i = 1
    while i < len(lines):
        line = lines[i].strip()
        i += 1
        if not line:
            continue
        if "=" in line:
            key, _, value = line.partition("=")
            settings[key.strip()] = value.strip()
            continue
        name, *dims = line.split()
        try:
            shape = tuple(int(d) for d in dims)
        except ValueError:
            raise CheckpointError(f"{path}:{i}: bad header {line!r}") from None
        if i >= len(lines):
            raise CheckpointError(f"{path}: truncated, no values for {name!r}")
        values = lines[i].split()
        i += 1
        if len(values) != int(np.prod(shape)):
            raise CheckpointError(f"{path}: {name!r} expects {int(np.prod(shape))} values, found {len(values)}")
        tensors[name] = parameter(np.array([float(v) for v in values]).reshape(shape), name)

    stored = ModelConfig.from_mapping(settings)
    config = config or stored
    if "embedding" not in tensors:
        raise CheckpointError(f"{path}: missing parameter 'embedding'")
    expected = config.param_shapes(tensors["embedding"].shape[0])
    for name, shape in expected.items():
        if name not in tensors:
            raise CheckpointError(f"{path}: missing parameter {name!r} required by encoder={config.encoder}")
        if tensors[name].shape != shape:
            raise CheckpointError(f"{path}: parameter {name!r} has shape {tensors[name].shape}, expected {shape}")
    extra = sorted(set(tensors) - set(expected))
    if extra:
        raise CheckpointError(f"{path}: unexpected parameters {extra} for encoder={config.encoder}")
    return RankerParams(config, {name: tensors[name] for name in expected})
