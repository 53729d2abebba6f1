"""Run configuration: flat ``key = value`` files with ``#`` comments."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path

from winsumm import DataError
from winsumm.model import ModelConfig


@dataclass(frozen=True)
class RunConfig:
    corpus: str = ""
    vectors: str = ""
    out: str = "run"
    labels: str = ""
    seed: int = 0
    epochs: int = 50
    lr: float = 0.1
    rho: float = 0.95
    eps: float = 1e-6
    clip_norm: float = 5.0
    window: int = 10
    label_method: str = "window"
    label_metric: str = "rouge1"
    window_scoring: str = "singleton"
    zero_block_positive: bool = True
    encoder: str = "simple"
    budget: float = 0.2
    w_pos: float = 85.0
    w_neg: float = 2.0
    word_dim: int = 50
    hidden: int = 50
    doc_hidden: int = 0
    heads: int = 1
    pos_buckets: int = 10
    novelty: str = "negate"
    max_sents: int = 500
    max_toks: int = 50
    min_count: int = 1
    split: str = "10:1:1"
    plots: bool = True

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if not 0 < self.budget <= 1:
            raise ValueError("budget must lie in (0, 1]")
        if self.window < 1:
            raise ValueError("window must be >= 1")
        self.split_fractions  # validates

    @property
    def split_fractions(self) -> tuple[float, float, float]:
        parts = self.split.split(":")
        try:
            values = tuple(float(p) for p in parts)
        except ValueError:
            raise ValueError(f"bad split {self.split!r}; expected a:b:c") from None
        if len(values) != 3:
            raise ValueError(f"bad split {self.split!r}; expected a:b:c")
        return values

    def model_config(self) -> ModelConfig:
        return ModelConfig(
            word_dim=self.word_dim, hidden=self.hidden, doc_hidden=self.doc_hidden, heads=self.heads,
            encoder=self.encoder, pos_buckets=self.pos_buckets, w_pos_class=self.w_pos,
            w_neg_class=self.w_neg, novelty=self.novelty,
        )

    def with_overrides(self, overrides: dict[str, object]) -> "RunConfig":
        return replace(self, **coerce(overrides))


_FIELDS = {f.name: f for f in fields(RunConfig)}


def _convert(name: str, raw):
    kind = type(_FIELDS[name].default)
    if not isinstance(raw, str):
        return kind(raw)
    if kind is bool:
        low = raw.strip().lower()
        if low not in ("true", "false", "1", "0", "yes", "no"):
            raise ValueError(f"{name}: expected a boolean, got {raw!r}")
        return low in ("true", "1", "yes")
    return kind(raw.strip())


def coerce(values: dict[str, object]) -> dict[str, object]:
    out = {}
    for key, raw in values.items():
        name = key.replace("-", "_")
        if name not in _FIELDS:
            raise ValueError(f"unknown config key {key!r}")
        out[name] = _convert(name, raw)
    return out


def parse_config_text(text: str) -> dict[str, str]:
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"config line {lineno}: expected 'key = value'")
        values[key.strip()] = value.strip()
    return values


def load_config(path: str | Path | None = None, **overrides) -> RunConfig:
    values: dict[str, object] = {}
    if path:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise DataError(f"cannot read config {path}: {exc}") from exc
        values.update(parse_config_text(text))
    values.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig(**coerce(values))
