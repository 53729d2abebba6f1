import logging

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from winsumm import DataError
from winsumm.corpus import (
    PAD_ID, UNK_ID, CorpusPair, Vocabulary, build_vocabulary, load_corpus, load_word_vectors,
    make_document, normalize, shape_document, split_pairs, split_sentences, tokenize_and_normalize,
)
from winsumm.harness.synthetic import overfit_corpus, write_corpus


def norms(text):
    return [t.norm for t in tokenize_and_normalize(text)]


class TestSplitSentences:
    def test_empty(self):
        assert split_sentences("") == []

    def test_two_sentences(self):
        assert [s.text for s in split_sentences("A cat. A dog.")] == ["A cat.", "A dog."]

    def test_abbreviation_does_not_split(self):
        sents = split_sentences("See Fig. 3 here. Done.")
        assert [s.text for s in sents] == ["See Fig. 3 here.", "Done."]

    def test_et_al(self):
        assert len(split_sentences("Smith et al. Proposed it. Then we ran.")) == 2

    def test_lowercase_continuation_does_not_split(self):
        assert len(split_sentences("Value is 3. and more follows.")) == 1

    def test_question_and_exclamation(self):
        assert len(split_sentences("Why? Because! 42 is fine.")) == 3

    def test_punctuation_only_pieces_dropped(self):
        sents = split_sentences("   \n  Hello there. \t ")
        assert [s.text for s in sents] == ["Hello there."]
        assert split_sentences(" \n\t ") == []

    @given(st.lists(st.sampled_from(["Alpha beta.", "Gamma!", "See Fig. 2 now.", "x y z?", "  ", "9 lives."]),
                    max_size=8))
    def test_spans_cover_text_in_order(self, parts):
        text = " ".join(parts)
        sents = split_sentences(text)
        last = 0
        for k, s in enumerate(sents):
            lo, hi = s.char_span
            assert s.index == k
            assert lo >= last and text[lo:hi] == s.text
            assert text[last:lo].strip() == ""
            last = hi
        assert text[last:].strip() == ""


class TestTokenize:
    def test_suffixes(self):
        assert norms("Models work.") == ["model", "work", "."]

    def test_single(self):
        assert norms("X") == ["x"]

    def test_hyphen_split(self):
        assert norms("state-of-the-art") == ["state", "-", "of", "-", "the", "-", "art"]

    @pytest.mark.parametrize("word,expected", [
        ("Studies", "study"), ("class", "class"), ("gas", "gas"), ("bus", "bus"), ("cats", "cat"),
        ("running", "runn"), ("sing", "sing"), ("walked", "walk"), ("bed", "bed"), ("ies", "ies"),
    ])
    def test_normalize(self, word, expected):
        assert normalize(word) == expected

    @given(st.text(max_size=40))
    def test_norms_nonempty_and_no_whitespace(self, text):
        for t in tokenize_and_normalize(text):
            assert t.norm and not any(c.isspace() for c in t.norm)


def corpus_of(*texts):
    return [CorpusPair(make_document(f"d{i}", t), make_document(f"d{i}", "gold")) for i, t in enumerate(texts)]


class TestVocabulary:
    def test_min_count(self):
        v = build_vocabulary(corpus_of("Cat cat cat dog"), min_count=2)
        assert v.words == ["<pad>", "<unk>", "cat"]

    def test_empty(self):
        assert len(build_vocabulary([], 1)) == 2

    def test_lexicographic_tie(self):
        v = build_vocabulary(corpus_of("Ab aa ab aa."))
        assert v.lookup("aa") < v.lookup("ab")

    def test_gold_text_excluded(self):
        v = build_vocabulary([CorpusPair(make_document("a", "Paper words."), make_document("a", "Slide only."))])
        assert "slide" not in v and "paper" in v

    def test_dense_ids_and_roundtrip(self, tmp_path):
        v = build_vocabulary(corpus_of("One two three. Two three. Three."))
        assert max(v.index.values()) == len(v) - 1
        v.save(tmp_path / "v.txt")
        assert Vocabulary.load(tmp_path / "v.txt").words == v.words

    def test_unknown_maps_to_unk(self):
        assert build_vocabulary(corpus_of("Known.")).lookup("unknown") == UNK_ID


class TestWordVectors:
    @pytest.fixture
    def vocab(self):
        return build_vocabulary(corpus_of("Cat dog cat."))

    def test_values_and_missing_rows(self, tmp_path, vocab):
        vals = np.random.default_rng(0).normal(size=50)
        (tmp_path / "v.txt").write_text("cat " + " ".join(repr(float(x)) for x in vals) + "\n")
        emb = load_word_vectors(tmp_path / "v.txt", vocab, d=50)
        assert emb.matrix.shape == (len(vocab), 50)
        assert np.array_equal(emb.matrix[vocab.lookup("cat")], vals)
        assert np.all(np.abs(emb.matrix[vocab.lookup("dog")]) <= 0.1)
        assert not emb.matrix[PAD_ID].any()

    def test_first_value(self, tmp_path, vocab):
        (tmp_path / "v.txt").write_text("cat 0.1" + " 0.0" * 49 + "\n")
        assert load_word_vectors(tmp_path / "v.txt", vocab, 50).matrix[vocab.lookup("cat"), 0] == 0.1

    def test_short_line_names_line(self, tmp_path, vocab):
        (tmp_path / "v.txt").write_text("cat" + " 0.5" * 50 + "\ndog" + " 0.5" * 49 + "\n")
        with pytest.raises(DataError, match=":2:"):
            load_word_vectors(tmp_path / "v.txt", vocab, 50)

    def test_bad_float(self, tmp_path, vocab):
        (tmp_path / "v.txt").write_text("cat 0.5 zz\n")
        with pytest.raises(DataError, match=":1:"):
            load_word_vectors(tmp_path / "v.txt", vocab, 2)

    def test_header_skipped(self, tmp_path, vocab, caplog):
        (tmp_path / "v.txt").write_text("words dims\ncat 1.0 2.0\n")
        with caplog.at_level(logging.WARNING):
            emb = load_word_vectors(tmp_path / "v.txt", vocab, 2)
        assert emb.matrix[vocab.lookup("cat")].tolist() == [1.0, 2.0]
        assert "header" in caplog.text


class TestShape:
    def test_defaults(self):
        doc = make_document("a", "One. Two. Three.")
        shaped = shape_document(doc, build_vocabulary(corpus_of("One two three.")))
        assert shaped.token_ids.shape == (500, 50) and shaped.n_real == 3

    def test_truncation(self):
        long_sentence = " ".join(["w"] * 60) + "."
        doc = make_document("a", " ".join([long_sentence.capitalize()] * 501))
        shaped = shape_document(doc, Vocabulary())
        assert shaped.n_real == 500 and shaped.sent_lengths[0] == 50

    @given(st.lists(st.integers(1, 9), min_size=1, max_size=12), st.integers(1, 6), st.integers(1, 7))
    @settings(deadline=None)
    def test_unpadding_recovers_prefix(self, lengths, max_sents, max_toks):
        words = ["Alpha", "beta", "gamma", "delta", "eps", "zeta", "eta", "theta", "iota"]
        text = " ".join(" ".join(words[:L]) + "." for L in lengths)
        doc = make_document("a", text)
        vocab = build_vocabulary([CorpusPair(doc, doc)])
        shaped = shape_document(doc, vocab, max_sents, max_toks)
        expected = [[vocab.lookup(t.norm) for t in s.tokens[:max_toks]] for s in doc.sentences[:max_sents]]
        assert shaped.rows() == expected
        assert shaped.n_real == min(doc.n, max_sents)
        mask = np.zeros_like(shaped.token_ids, dtype=bool)
        for i, L in enumerate(shaped.sent_lengths):
            mask[i, :L] = True
        assert not shaped.token_ids[~mask].any()


class TestLoadCorpus:
    def test_unpaired_skipped(self, tmp_path, caplog):
        for name in ("a.paper.txt", "a.slides.txt", "b.paper.txt"):
            (tmp_path / name).write_text("Some text.")
        with caplog.at_level(logging.WARNING):
            pairs = load_corpus(tmp_path)
        assert [p.id for p in pairs] == ["a"] and "'b'" in caplog.text

    def test_no_pairs(self, tmp_path):
        with pytest.raises(DataError):
            load_corpus(tmp_path)

    def test_missing_dir(self, tmp_path):
        with pytest.raises(DataError, match="nowhere"):
            load_corpus(tmp_path / "nowhere")

    def test_unreadable_names_path(self, tmp_path):
        (tmp_path / "a.paper.txt").write_bytes(b"\xff\xfe\xfa")
        (tmp_path / "a.slides.txt").write_text("ok")
        with pytest.raises(DataError, match="a.paper.txt"):
            load_corpus(tmp_path)


class TestSplit:
    @pytest.fixture
    def pairs(self, tmp_path):
        return load_corpus(write_corpus(overfit_corpus(12, 4), tmp_path))

    def test_sizes(self, pairs):
        assert tuple(map(len, split_pairs(pairs, 0))) == (10, 1, 1)

    def test_deterministic(self, pairs):
        a = [[p.id for p in part] for part in split_pairs(pairs, 3)]
        assert a == [[p.id for p in part] for part in split_pairs(pairs, 3)]

    @given(st.integers(0, 10_000))
    @settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
    def test_permutation(self, pairs, seed):
        ids = sorted(p.id for part in split_pairs(pairs, seed) for p in part)
        assert ids == sorted(p.id for p in pairs)
