import numpy as np
import pytest

from trialrank import EmbedderConfig, PvConfig, build_vocab, document_text, tokenize
from trialrank.embedding import embed_hashed_tfidf, make_vector, token_hash
from trialrank.errors import ConfigError, DimMismatch, EmptyCorpus


class TestTokenize:
    def test_splits_and_lowercases(self):
        assert tokenize("COPD, stage-II.") == ["copd", "stage", "ii"]

    def test_empty(self):
        assert tokenize("") == []

    def test_stable(self):
        text = "Hemoglobin A1c of 8.2% (HbA1c)"
        assert tokenize(text) == tokenize(text)

    def test_single_letters_and_digits_kept(self):
        assert tokenize("a 1 x-ray") == ["a", "1", "x", "ray"]


class TestDocumentText:
    def test_field_selection(self, mini_docs):
        doc = mini_docs[0]
        s = document_text(doc, "summary")
        sd = document_text(doc, "summary_description")
        sdi = document_text(doc, "summary_description_inclusion")
        assert s == doc.brief_summary
        assert doc.detailed_description in sd
        assert doc.inclusion in sdi
        assert len(s) <= len(sd) <= len(sdi)

    def test_exclusion_never_included(self, mini_docs):
        for doc in mini_docs:
            if not doc.exclusion:
                continue
            for fields in ("summary", "summary_description", "summary_description_inclusion"):
                assert doc.exclusion not in document_text(doc, fields)


class TestConfig:
    def test_defaults(self):
        cfg = EmbedderConfig()
        assert cfg.backend == "hashed_tfidf"
        assert cfg.dim == 1024
        assert cfg.pv == PvConfig(epochs=40, window=5, negative_samples=5,
                                  learning_rate_initial=0.025, learning_rate_final=0.0001,
                                  min_token_count=2)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"backend": "other"},
            {"dim": 4},
            {"seed": -1},
            {"doc_fields": "title"},
            {"backend": "remote"},  # remote_url missing
        ],
    )
    def test_invalid_configs(self, kwargs):
        with pytest.raises(ConfigError):
            EmbedderConfig(**kwargs)

    @pytest.mark.parametrize(
        "kwargs",
        [{"epochs": 0}, {"window": 0}, {"negative_samples": 0},
         {"learning_rate_final": 1.0}, {"min_token_count": 0}],
    )
    def test_invalid_pv(self, kwargs):
        with pytest.raises(ConfigError):
            PvConfig(**kwargs)

    def test_config_hash_ignores_remote_url(self):
        a = EmbedderConfig(backend="remote", remote_url="http://a/embed")
        b = EmbedderConfig(backend="remote", remote_url="http://b/embed")
        assert a.config_hash() == b.config_hash()
        assert a.config_hash() != EmbedderConfig(backend="remote", remote_url="http://a", dim=16).config_hash()


class TestVectors:
    def test_shape_enforced(self):
        with pytest.raises(DimMismatch):
            make_vector(np.zeros((2, 3)), "x")

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            make_vector([1.0, float("nan")], "x")

    def test_coerced_to_float64(self):
        vec = make_vector([1, 2, 3], "x")
        assert vec.values.dtype == np.float64
        assert vec.dim == 3


class TestBuildVocab:
    def test_exact_counts(self):
        cfg = EmbedderConfig(dim=16)
        vocab = build_vocab(["a b", "b c"], cfg)
        assert vocab.total_docs == 2
        assert vocab.doc_frequency("b") == 2
        assert vocab.doc_frequency("a") == vocab.doc_frequency("c") == 1
        assert vocab.tokens["b"].corpus_frequency == 2

    def test_min_count_applies_to_pv_only(self):
        pv = EmbedderConfig(backend="pv_dbow", dim=16)
        assert sorted(build_vocab(["a b", "b c"], pv).tokens) == ["b"]
        hashed = EmbedderConfig(backend="hashed_tfidf", dim=16)
        assert sorted(build_vocab(["a b", "b c"], hashed).tokens) == ["a", "b", "c"]

    def test_indices_lexicographic_and_order_free(self):
        cfg = EmbedderConfig(dim=16)
        v1 = build_vocab(["zebra apple", "apple mango"], cfg)
        v2 = build_vocab(["apple mango", "zebra apple"], cfg)
        assert v1.index_to_token() == sorted(v1.tokens)
        assert {t: s.index for t, s in v1.tokens.items()} == {
            t: s.index for t, s in v2.tokens.items()
        }

    def test_empty_corpus(self):
        with pytest.raises(EmptyCorpus):
            build_vocab([], EmbedderConfig(dim=16))


class TestHashedTfidf:
    CFG = EmbedderConfig(backend="hashed_tfidf", dim=64, seed=3)

    def test_empty_text_zero_vector(self):
        vocab = build_vocab(["a b"], self.CFG)
        vec = embed_hashed_tfidf("", vocab, self.CFG)
        assert not vec.values.any()

    def test_single_token_one_bucket_unit_norm(self):
        vocab = build_vocab(["apple pear", "pear plum"], self.CFG)
        vec = embed_hashed_tfidf("apple apple apple", vocab, self.CFG)
        assert np.count_nonzero(vec.values) == 1
        assert np.linalg.norm(vec.values) == pytest.approx(1.0)

    def test_identical_token_multisets_identical_vectors(self):
        vocab = build_vocab(["x y z", "w w"], self.CFG)
        a = embed_hashed_tfidf("x y y z", vocab, self.CFG)
        b = embed_hashed_tfidf("z Y x. y", vocab, self.CFG)
        assert a.values.any()
        assert np.array_equal(a.values, b.values)

    def test_norm_one_or_zero(self, mini_docs):
        texts = [document_text(d, "summary_description_inclusion") for d in mini_docs]
        vocab = build_vocab(texts, self.CFG)
        for text in texts + [""]:
            norm = float(np.linalg.norm(embed_hashed_tfidf(text, vocab, self.CFG).values))
            assert norm == pytest.approx(1.0) or norm == 0.0

    def test_seed_changes_layout(self):
        vocab = build_vocab(["apple pear", "plum fig"], self.CFG)
        other = EmbedderConfig(backend="hashed_tfidf", dim=64, seed=4)
        a = embed_hashed_tfidf("apple pear", vocab, self.CFG)
        b = embed_hashed_tfidf("apple pear", vocab, other)
        assert not np.array_equal(a.values, b.values)

    def test_token_hash_is_process_stable(self):
        # frozen values guard against silent hash-function changes
        assert token_hash("glaucoma", 42) == token_hash("glaucoma", 42)
        assert token_hash("glaucoma", 42) != token_hash("glaucoma", 43)
        assert token_hash("glaucoma", 0) != token_hash("diabetes", 0)
