"""Corpus ingestion: sentence splitting, tokenization, vocabulary, word vectors
and fixed-size document shaping.

Corpus directories hold ``<id>.paper.txt`` / ``<id>.slides.txt`` pairs
(UTF-8). The slide text is the gold summary for the paper.
"""

from __future__ import annotations

import logging
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from winsumm import DataError

log = logging.getLogger(__name__)

PAD_ID = 0
UNK_ID = 1
PAD_WORD = "<pad>"
UNK_WORD = "<unk>"

ABBREVIATIONS = frozenset(
    {"fig.", "eq.", "et al.", "e.g.", "i.e.", "dr.", "vs.", "al.", "sec.", "no."}
)

_BOUNDARY = re.compile(r"[.!?](?=\s+(\S))")
_TOKEN = re.compile(r"\w+|[^\w\s]")
_LEADING_PUNCT = "([{\"'"


@dataclass(frozen=True)
class Token:
    surface: str
    norm: str
    vocab_id: int = UNK_ID


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]
    index: int
    char_span: tuple[int, int]
    text: str = ""

    @property
    def norms(self) -> list[str]:
        return [t.norm for t in self.tokens]


@dataclass(frozen=True)
class Document:
    id: str
    sentences: tuple[Sentence, ...]
    source_path: str = ""

    @property
    def n(self) -> int:
        return len(self.sentences)

    def norms(self) -> list[str]:
        return [t.norm for s in self.sentences for t in s.tokens]


@dataclass(frozen=True)
class CorpusPair:
    doc: Document
    gold: Document

    def __post_init__(self):
        if self.doc.id != self.gold.id:
            raise ValueError(f"pair id mismatch: {self.doc.id!r} vs {self.gold.id!r}")

    @property
    def id(self) -> str:
        return self.doc.id


def normalize(word: str) -> str:
    """Lowercase and strip one inflectional suffix.

    Rules, first match wins: ``ies -> y``; trailing ``s`` when the word is
    longer than 3 characters and does not end in ``ss``; ``ing`` or ``ed``
    when the word is longer than 5 characters.
    """
    w = word.lower()
    if w.endswith("ies") and len(w) > 3:
        return w[:-3] + "y"
    if w.endswith("s") and len(w) > 3 and not w.endswith("ss"):
        return w[:-1]
    if len(w) > 5:
        if w.endswith("ing"):
            return w[:-3]
        if w.endswith("ed"):
            return w[:-2]
    return w


def tokenize_and_normalize(sentence_text: str) -> list[Token]:
    return [Token(m.group(), normalize(m.group())) for m in _TOKEN.finditer(sentence_text)]


def is_content(norm: str) -> bool:
    """True for tokens carrying at least one letter or digit."""
    return any(ch.isalnum() for ch in norm)


def _ends_with_abbreviation(chunk: str) -> bool:
    words = chunk.split()
    if not words:
        return False
    last = words[-1].lower().lstrip(_LEADING_PUNCT)
    if last in ABBREVIATIONS:
        return True
    if len(words) >= 2:
        pair = f"{words[-2].lower().lstrip(_LEADING_PUNCT)} {last}"
        return pair in ABBREVIATIONS
    return False


def split_sentences(text: str) -> list[Sentence]:
    """Split on '.', '!' or '?' followed by whitespace and an uppercase letter
    or digit, except after a known abbreviation. Token-less pieces are dropped."""
    pieces: list[tuple[int, int]] = []
    start = 0
    for m in _BOUNDARY.finditer(text):
        nxt = m.group(1)[0]
        if not (nxt.isupper() or nxt.isdigit()):
            continue
        end = m.end()
        if text[m.start()] == "." and _ends_with_abbreviation(text[start:end]):
            continue
        pieces.append((start, end))
        start = end
    pieces.append((start, len(text)))

    sentences: list[Sentence] = []
    for lo, hi in pieces:
        chunk = text[lo:hi]
        stripped = chunk.strip()
        if not stripped:
            continue
        lo += len(chunk) - len(chunk.lstrip())
        hi = lo + len(stripped)
        tokens = tokenize_and_normalize(stripped)
        if not tokens:
            continue
        sentences.append(Sentence(tuple(tokens), len(sentences), (lo, hi), stripped))
    return sentences


def make_document(doc_id: str, text: str, source_path: str = "") -> Document:
    return Document(doc_id, tuple(split_sentences(text)), source_path)


@dataclass
class Vocabulary:
    words: list[str] = field(default_factory=lambda: [PAD_WORD, UNK_WORD])
    min_count: int = 1

    def __post_init__(self):
        self.index = {w: i for i, w in enumerate(self.words)}
        if len(self.index) != len(self.words):
            raise ValueError("duplicate words in vocabulary")
        if self.words[PAD_ID] != PAD_WORD or self.words[UNK_ID] != UNK_WORD:
            raise ValueError("vocabulary must start with PAD and UNK")

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self.index

    def lookup(self, word: str) -> int:
        return self.index.get(word, UNK_ID)

    def save(self, path: str | Path) -> None:
        Path(path).write_text("\n".join(self.words[2:]) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "Vocabulary":
        words = [w for w in Path(path).read_text(encoding="utf-8").split("\n") if w]
        return cls([PAD_WORD, UNK_WORD] + words)


def build_vocabulary(pairs: Iterable[CorpusPair], min_count: int = 1) -> Vocabulary:
    """Vocabulary over paper norms (never gold text), ids by descending
    frequency with lexicographic tie-break."""
    if min_count < 1:
        raise ValueError("min_count must be >= 1")
    counts: Counter[str] = Counter()
    for pair in pairs:
        counts.update(pair.doc.norms())
    kept = sorted((w for w, c in counts.items() if c >= min_count), key=lambda w: (-counts[w], w))
    return Vocabulary([PAD_WORD, UNK_WORD] + kept, min_count=min_count)


def assign_ids(doc: Document, vocab: Vocabulary) -> Document:
    sents = tuple(
        Sentence(tuple(Token(t.surface, t.norm, vocab.lookup(t.norm)) for t in s.tokens),
                 s.index, s.char_span, s.text)
        for s in doc.sentences
    )
    return Document(doc.id, sents, doc.source_path)


@dataclass
class WordEmbeddings:
    matrix: np.ndarray

    @property
    def d(self) -> int:
        return self.matrix.shape[1]


def _is_float(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def random_embeddings(vocab_size: int, d: int, seed: int = 0) -> WordEmbeddings:
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0,)))
    matrix = rng.uniform(-0.1, 0.1, size=(vocab_size, d))
    matrix[PAD_ID] = 0.0
    return WordEmbeddings(matrix)


def load_word_vectors(path: str | Path, vocab: Vocabulary, d: int = 50, seed: int = 0) -> WordEmbeddings:
    """Read a GloVe-style text file (``token f1 ... fd`` per line).

    Words missing from the file keep a uniform [-0.1, 0.1] initialization;
    the PAD row is zero.
    """
    emb = random_embeddings(len(vocab), d, seed)
    path = Path(path)
    try:
        handle = path.open(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read word vectors {path}: {exc}") from exc
    with handle:
        for lineno, line in enumerate(handle, start=1):
            fields = line.rstrip("\n").split(" ")
            if fields and fields[-1] == "":
                fields = fields[:-1]
            if not fields or fields == [""]:
                continue
            if lineno == 1 and len(fields) >= 2 and not _is_float(fields[1]):
                log.warning("%s: skipping header line", path)
                continue
            if len(fields) != d + 1:
                raise DataError(
                    f"{path}:{lineno}: expected token and {d} floats, got {len(fields) - 1} values"
                )
            try:
                values = [float(x) for x in fields[1:]]
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: unparseable float ({exc})") from exc
            idx = vocab.index.get(fields[0])
            if idx is not None and idx != PAD_ID:
                emb.matrix[idx] = values
    return emb


@dataclass
class ShapedDocument:
    token_ids: np.ndarray
    sent_lengths: list[int]
    n_real: int

    def rows(self) -> list[list[int]]:
        """Un-pad: the real token ids of each real sentence."""
        return [self.token_ids[i, :L].tolist() for i, L in enumerate(self.sent_lengths[: self.n_real])]


def shape_document(doc: Document, vocab: Vocabulary, max_sents: int = 500, max_toks: int = 50) -> ShapedDocument:
    if max_sents < 1 or max_toks < 1:
        raise ValueError("shape limits must be >= 1")
    grid = np.full((max_sents, max_toks), PAD_ID, dtype=np.int64)
    lengths = []
    for i, sent in enumerate(doc.sentences[:max_sents]):
        ids = [vocab.lookup(t.norm) for t in sent.tokens[:max_toks]]
        grid[i, : len(ids)] = ids
        lengths.append(len(ids))
    return ShapedDocument(grid, lengths, len(lengths))


def read_text(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc


def load_corpus(directory: str | Path) -> list[CorpusPair]:
    directory = Path(directory)
    if not directory.is_dir():
        raise DataError(f"corpus directory not found: {directory}")
    papers = {p.name[: -len(".paper.txt")]: p for p in directory.glob("*.paper.txt")}
    slides = {p.name[: -len(".slides.txt")]: p for p in directory.glob("*.slides.txt")}
    for doc_id in sorted(papers.keys() ^ slides.keys()):
        log.warning("skipping unpaired document %r in %s", doc_id, directory)
    pairs = []
    for doc_id in sorted(papers.keys() & slides.keys()):
        pairs.append(CorpusPair(
            make_document(doc_id, read_text(papers[doc_id]), str(papers[doc_id])),
            make_document(doc_id, read_text(slides[doc_id]), str(slides[doc_id])),
        ))
    if not pairs:
        raise DataError(f"no paper/slides pairs in {directory}")
    return pairs


def split_pairs(pairs: Sequence[CorpusPair], seed: int = 0,
                fractions: Sequence[float] = (10, 1, 1)) -> tuple[list, list, list]:
    """Deterministic shuffled train/valid/test split by relative fractions."""
    if len(fractions) != 3 or min(fractions) < 0 or sum(fractions) <= 0:
        raise ValueError(f"bad split fractions {fractions!r}")
    n = len(pairs)
    total = float(sum(fractions))
    n_valid = int(round(n * fractions[1] / total))
    n_test = int(round(n * fractions[2] / total))
    n_train = n - n_valid - n_test
    order = np.random.default_rng(seed).permutation(n)
    shuffled = [pairs[i] for i in order]
    return (shuffled[:n_train], shuffled[n_train:n_train + n_valid], shuffled[n_train + n_valid:])
