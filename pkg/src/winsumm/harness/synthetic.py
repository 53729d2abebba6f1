"""Synthetic paper/slides corpora with known structure.

Words are pronounceable letter strings ending in a vowel, so normalization
leaves them unchanged. Generators return ``(doc_id, paper_text, slides_text)``
triples; :func:`write_corpus` lays them out as a corpus directory.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

_CONSONANTS = "bdfgklmnprtvz"
_VOWELS = "aeiou"


def pseudo_words(rng: np.random.Generator, count: int, exclude: set[str] = frozenset()) -> list[str]:
    words: list[str] = []
    seen = set(exclude)
    while len(words) < count:
        syllables = int(rng.integers(2, 4))
        w = "".join(rng.choice(list(_CONSONANTS)) + rng.choice(list(_VOWELS)) for _ in range(syllables))
        if w not in seen:
            seen.add(w)
            words.append(w)
    return words


def sentence_text(words: list[str]) -> str:
    return " ".join([words[0].capitalize(), *words[1:]]) + "."


@dataclass
class SyntheticDoc:
    doc_id: str
    sentences: list[list[str]]
    gold: list[list[str]]
    designated: list[int]

    @property
    def paper_text(self) -> str:
        return " ".join(sentence_text(s) for s in self.sentences)

    @property
    def slides_text(self) -> str:
        return "\n".join(sentence_text(s) for s in self.gold)


def overfit_corpus(n_docs: int = 8, n_sents: int = 20, seed: int = 0, sent_len: int = 8) -> list[SyntheticDoc]:
    """Documents whose gold text is exactly one designated sentence per half."""
    rng = np.random.default_rng(seed)
    pool = pseudo_words(rng, 300)
    docs = []
    for d in range(n_docs):
        sents = [list(rng.choice(pool, sent_len, replace=False)) for _ in range(n_sents)]
        half = n_sents // 2
        designated = [int(rng.integers(0, half)), int(rng.integers(half, n_sents))]
        docs.append(SyntheticDoc(f"doc{d:03d}", sents, [sents[i] for i in designated], designated))
    return docs


def sectioned_corpus(n_docs: int = 60, sections: int = 5, per_section: int = 10, seed: int = 0,
                     topic_words: int = 6, sent_len: int = 9, key_last_prob: float = 0.8) -> list[SyntheticDoc]:
    """Long documents whose gold content is spread evenly over ``sections``.

    Each section has a topic of ``topic_words`` words drawn from a shared
    technical vocabulary. Three partial sentences introduce the topic two
    words at a time; one key sentence states all of it, usually (with
    probability ``key_last_prob``) after the partials. Remaining sentences are
    filler, some carrying a generic slide word. The opening sentences preview
    later topics. The gold text holds one line per section: its topic words
    plus two generic slide words.
    """
    rng = np.random.default_rng(seed)
    filler = pseudo_words(rng, 400)
    technical = pseudo_words(rng, 160, set(filler))
    generic = pseudo_words(rng, 12, set(filler) | set(technical))
    docs = []
    for d in range(n_docs):
        topics = rng.choice(technical, (sections, topic_words), replace=False).tolist()
        sents: list[list[str]] = []
        gold: list[list[str]] = []
        designated = []
        for k in range(sections):
            block = [list(rng.choice(filler, sent_len, replace=False)) for _ in range(per_section)]
            for sent in block:
                if rng.random() < 0.3:
                    sent[int(rng.integers(sent_len))] = str(rng.choice(generic))
            slots = sorted(rng.choice(np.arange(1, per_section), 4, replace=False).tolist())
            if rng.random() < key_last_prob:
                key, partial = slots[-1], slots[:-1]
            else:
                key = slots[int(rng.integers(0, 3))]
                partial = [j for j in slots if j != key]
            block[key] = [str(w) for w in rng.permutation(
                topics[k] + list(rng.choice(filler, sent_len - topic_words, replace=False)))]
            order = rng.permutation(topic_words)
            for n_part, j in enumerate(partial):
                pieces = [topics[k][i] for i in order[2 * n_part:2 * n_part + 2]]
                block[j][:2] = pieces
                rng.shuffle(block[j])
            if k == 0:
                # opening sentence previews later topics
                block[0][:sections - 1] = [topics[m][0] for m in range(1, sections)]
                rng.shuffle(block[0])
            designated.append(k * per_section + key)
            sents.extend(block)
            gold.append([str(w) for w in rng.permutation(topics[k] + list(rng.choice(generic, 2, replace=False)))])
        docs.append(SyntheticDoc(f"doc{d:03d}", sents, gold, designated))
    return docs


def write_corpus(docs: list[SyntheticDoc], directory: str | Path) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for doc in docs:
        (directory / f"{doc.doc_id}.paper.txt").write_text(doc.paper_text + "\n", encoding="utf-8")
        (directory / f"{doc.doc_id}.slides.txt").write_text(doc.slides_text + "\n", encoding="utf-8")
    return directory
