"""Topic-model training, inference, held-out bound, and persistence."""

import numpy as np
import pytest
from scipy.special import psi

from refspan.errors import ConfigError
from refspan.lda import (
    BadTopicIndex,
    EmptyHeldout,
    EmptyVocabulary,
    LdaConfig,
    ModelFormatError,
    TopicModel,
    build_vocabulary,
    fit_online,
    heldout_bound,
    infer_topics,
    lda_similarity,
    load_model,
    rho,
    save_model,
    topic_top_words,
)


def synthetic_two_topic(n_docs=500, vocab_each=20, seed=42):
    """Corpus drawn from two disjoint-support topics, plus the truth."""
    rng = np.random.default_rng(seed)
    words = [[f"a{i}" for i in range(vocab_each)],
             [f"b{i}" for i in range(vocab_each)]]
    probs = [rng.dirichlet(np.ones(vocab_each)) for _ in range(2)]
    docs, labels = [], []
    for d in range(n_docs):
        topic = d % 2
        n = int(rng.integers(20, 60))
        docs.append([str(w) for w in rng.choice(words[topic], size=n, p=probs[topic])])
        labels.append(topic)
    return docs, labels, words, probs


@pytest.fixture(scope="module")
def trained():
    docs, labels, words, probs = synthetic_two_topic()
    cfg = LdaConfig(n_topics=2, kappa=0.7, tau0=1.0, batch_size=256,
                    passes=50, seed=1)
    model = fit_online(docs, cfg)
    return docs, labels, words, probs, model


def true_topic_matrix(model, words, probs):
    truth = np.zeros((2, len(model.vocab)))
    for k in range(2):
        for w, p in zip(words[k], probs[k]):
            truth[k, model.vocab[w]] = p
    return truth


def best_permutation_l1(beta, truth):
    direct = max(np.abs(beta[0] - truth[0]).sum(), np.abs(beta[1] - truth[1]).sum())
    swapped = max(np.abs(beta[0] - truth[1]).sum(), np.abs(beta[1] - truth[0]).sum())
    return min(direct, swapped)


class TestConfig:
    def test_validation(self):
        with pytest.raises(ConfigError):
            LdaConfig(n_topics=1)
        with pytest.raises(ConfigError):
            LdaConfig(kappa=0.0)
        with pytest.raises(ConfigError):
            LdaConfig(kappa=1.5)
        with pytest.raises(ConfigError):
            LdaConfig(max_df=0.0)
        with pytest.raises(ConfigError):
            LdaConfig(min_df=0)
        with pytest.raises(ConfigError):
            LdaConfig(tau0=-1)

    def test_default_priors_are_one_over_k(self):
        cfg = LdaConfig(n_topics=4)
        assert cfg.alpha_value == pytest.approx(0.25)
        assert cfg.eta_value == pytest.approx(0.25)
        assert LdaConfig(n_topics=4, alpha=0.5).alpha_value == 0.5

    def test_from_file(self, tmp_path):
        p = tmp_path / "lda.conf"
        p.write_text(
            "n_topics = 5   # a comment\n"
            "\n"
            "kappa=0.9\n"
            "tau0 = 768\n"
            "min_df = 10\n"
            "max_df = 0.99\n"
            "alpha = none\n")
        cfg = LdaConfig.from_file(p)
        assert cfg.n_topics == 5
        assert cfg.kappa == 0.9
        assert cfg.tau0 == 768
        assert cfg.max_df == 0.99
        assert cfg.alpha is None

    def test_from_file_unknown_key(self, tmp_path):
        p = tmp_path / "lda.conf"
        p.write_text("topics = 5\n")
        with pytest.raises(ConfigError):
            LdaConfig.from_file(p)


class TestRho:
    def test_formula_point(self):
        assert rho(1, 1.0, 0.5) == pytest.approx(2 ** -0.5, abs=1e-12)

    def test_clamped_to_one(self):
        assert rho(0, 0.5, 0.5) == 1.0
        assert rho(0, 0.0, 0.9) == 1.0

    def test_strictly_decreasing_once_below_one(self):
        vals = [rho(t, 1.0, 0.7) for t in range(1, 50)]
        assert all(a > b for a, b in zip(vals, vals[1:]))
        assert all(0 < v <= 1 for v in vals)


class TestBuildVocabulary:
    def test_max_df_excludes_frequent_term(self):
        docs = [["common", f"rare{i}"] for i in range(9)] + [["alone"]]
        vocab = build_vocabulary(docs, min_df=1, max_df=0.87)
        assert "common" not in vocab  # df 9 > 8.7
        assert "alone" in vocab

    def test_identity_bounds_keep_everything(self):
        docs = [["x", "y"], ["y", "z"]]
        vocab = build_vocabulary(docs, min_df=1, max_df=1.0)
        assert set(vocab) == {"x", "y", "z"}

    def test_lexicographic_indices(self):
        vocab = build_vocabulary([["b", "a", "c"]], 1, 1.0)
        assert vocab == {"a": 0, "b": 1, "c": 2}

    def test_empty_vocabulary(self):
        with pytest.raises(EmptyVocabulary):
            build_vocabulary([["x"], ["y"]], min_df=3, max_df=1.0)
        with pytest.raises(EmptyVocabulary):
            build_vocabulary([], 1, 1.0)


class TestTraining:
    def test_recovers_disjoint_topics(self, trained):
        docs, labels, words, probs, model = trained
        beta = model.topic_term_probs()
        truth = true_topic_matrix(model, words, probs)
        assert best_permutation_l1(beta, truth) < 0.05

    def test_lambda_rows_normalize_to_one(self, trained):
        *_, model = trained
        sums = model.topic_term_probs().sum(axis=1)
        np.testing.assert_allclose(sums, 1.0, atol=1e-9)
        assert (model.lam > 0).all()

    def test_deterministic_given_seed(self):
        docs, *_ = synthetic_two_topic(n_docs=60)
        cfg = LdaConfig(n_topics=2, passes=3, batch_size=16, seed=9)
        a = fit_online(docs, cfg)
        b = fit_online(docs, cfg)
        assert np.array_equal(a.lam, b.lam)

    def test_different_seed_different_lambda(self):
        docs, *_ = synthetic_two_topic(n_docs=60)
        a = fit_online(docs, LdaConfig(n_topics=2, passes=1, seed=1))
        b = fit_online(docs, LdaConfig(n_topics=2, passes=1, seed=2))
        assert not np.array_equal(a.lam, b.lam)

    def test_updates_seen_counts_minibatches(self):
        docs, *_ = synthetic_two_topic(n_docs=50)
        cfg = LdaConfig(n_topics=2, passes=4, batch_size=20, seed=0)
        model = fit_online(docs, cfg)
        assert model.updates_seen == 4 * 3  # ceil(50/20) = 3 per pass


class TestBatchReferenceEquivalence:
    def test_full_batch_training_matches_batch_vb(self):
        # independent oracle: classic batch variational Bayes, where each
        # iteration replaces lambda with eta + sufficient statistics
        docs, _, words, probs = synthetic_two_topic(n_docs=300, seed=7)
        cfg = LdaConfig(n_topics=2, kappa=0.7, tau0=1.0,
                        batch_size=300, passes=60, seed=3)
        model = fit_online(docs, cfg)

        vocab = build_vocabulary(docs, 1, 1.0)
        bows = []
        for doc in docs:
            ids_cts: dict[int, float] = {}
            for tok in doc:
                if tok in vocab:
                    ids_cts[vocab[tok]] = ids_cts.get(vocab[tok], 0) + 1
            bows.append((np.array(list(ids_cts)), np.array(list(ids_cts.values()))))

        k, v = 2, len(vocab)
        alpha = eta = 1.0 / k
        rng = np.random.default_rng(3)
        lam = rng.gamma(100.0, 0.01, (k, v))
        for _ in range(60):
            exp_elog_beta = np.exp(psi(lam) - psi(lam.sum(axis=1))[:, None])
            sstats = np.zeros_like(lam)
            for ids, cts in bows:
                gamma = np.ones(k)
                exp_et = np.exp(psi(gamma) - psi(gamma.sum()))
                beta_d = exp_elog_beta[:, ids]
                phinorm = exp_et @ beta_d + 1e-100
                for _ in range(100):
                    last = gamma
                    gamma = alpha + exp_et * ((cts / phinorm) @ beta_d.T)
                    exp_et = np.exp(psi(gamma) - psi(gamma.sum()))
                    phinorm = exp_et @ beta_d + 1e-100
                    if np.mean(np.abs(gamma - last)) < 1e-3:
                        break
                sstats[:, ids] += np.outer(exp_et, cts / phinorm)
            lam = eta + sstats * exp_elog_beta
        ref_beta = lam / lam.sum(axis=1, keepdims=True)

        got_beta = model.topic_term_probs()
        l1 = min(
            max(np.abs(got_beta[0] - ref_beta[0]).sum(),
                np.abs(got_beta[1] - ref_beta[1]).sum()),
            max(np.abs(got_beta[0] - ref_beta[1]).sum(),
                np.abs(got_beta[1] - ref_beta[0]).sum()),
        )
        assert l1 <= 0.05


class TestInference:
    def test_empty_input_uniform_and_flagged(self, trained):
        *_, model = trained
        tv = infer_topics([], model)
        assert tv.uninformative
        assert tv.probs == tuple([0.5, 0.5])

    def test_oov_only_input_uniform(self, trained):
        *_, model = trained
        tv = infer_topics(["zzz", "qqq"], model)
        assert tv.uninformative

    def test_pure_topic_document_confident(self, trained):
        docs, labels, _, _, model = trained
        beta = model.topic_term_probs()
        # map model topic index to generator topic via dominant support
        a_mass = beta[:, [model.vocab[f"a{i}"] for i in range(20)]].sum(axis=1)
        topic_of_a = int(a_mass.argmax())
        for d in range(4):
            tv = infer_topics(docs[d], model)
            want = topic_of_a if labels[d] == 0 else 1 - topic_of_a
            assert tv.probs[want] > 0.9
            assert not tv.uninformative

    def test_vector_is_distribution(self, trained):
        docs, *_, model = trained
        for d in range(0, 50, 7):
            tv = infer_topics(docs[d], model)
            assert sum(tv.probs) == pytest.approx(1.0, abs=1e-9)
            assert all(p >= 0 for p in tv.probs)

    def test_deterministic(self, trained):
        docs, *_, model = trained
        assert infer_topics(docs[3], model) == infer_topics(docs[3], model)


class TestSimilarity:
    def test_identical_inputs_give_one(self, trained):
        docs, *_, model = trained
        assert lda_similarity(docs[0], docs[0], model) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal_topics_low_similarity(self, trained):
        docs, labels, *_, model = trained
        assert labels[0] != labels[1]
        assert lda_similarity(docs[0], docs[1], model) < 0.3

    def test_uninformative_still_positive(self, trained):
        docs, *_, model = trained
        assert lda_similarity([], docs[0], model) > 0


class TestHeldoutBound:
    def test_train_beats_shuffled(self, trained):
        docs, *_, model = trained
        rng = np.random.default_rng(0)
        all_words = [f"a{i}" for i in range(20)] + [f"b{i}" for i in range(20)]
        shuffled = [
            [str(w) for w in rng.choice(all_words, size=40)] for _ in range(100)
        ]
        assert heldout_bound(docs[:100], model) > heldout_bound(shuffled, model)

    def test_deterministic(self, trained):
        docs, *_, model = trained
        assert heldout_bound(docs[:20], model) == heldout_bound(docs[:20], model)

    def test_empty_heldout(self, trained):
        *_, model = trained
        with pytest.raises(EmptyHeldout):
            heldout_bound([], model)

    def test_non_decreasing_over_passes(self):
        docs, *_ = synthetic_two_topic(n_docs=200, seed=11)
        bounds = []
        for passes in (1, 2, 4, 8):
            cfg = LdaConfig(n_topics=2, kappa=0.7, tau0=1.0, batch_size=64,
                            passes=passes, seed=5)
            bounds.append(heldout_bound(docs, fit_online(docs, cfg)))
        for earlier, later in zip(bounds, bounds[1:]):
            # allow a 1% regression: the bounds are negative, so "1%
            # worse" means more negative by 1% of magnitude
            assert later >= earlier - 0.01 * abs(earlier)


class TestTopWords:
    def _tiny_model(self):
        vocab = {"apple": 0, "pear": 1, "plum": 2}
        lam = np.array([[6.0, 3.0, 1.0], [1.0, 1.0, 8.0]])
        return TopicModel(vocab=vocab, lam=lam, config=LdaConfig(n_topics=2))

    def test_exact_ordering(self):
        m = self._tiny_model()
        assert topic_top_words(m, 0, 3) == ["apple", "pear", "plum"]
        assert topic_top_words(m, 1, 1) == ["plum"]

    def test_ties_break_lexicographically(self):
        m = self._tiny_model()
        assert topic_top_words(m, 1, 3) == ["plum", "apple", "pear"]

    def test_n_beyond_vocab(self):
        m = self._tiny_model()
        assert len(topic_top_words(m, 0, 99)) == 3

    def test_bad_index(self):
        m = self._tiny_model()
        with pytest.raises(BadTopicIndex):
            topic_top_words(m, 2, 1)


class TestPersistence:
    def test_round_trip(self, trained, tmp_path):
        docs, *_, model = trained
        p = tmp_path / "model.lda"
        save_model(model, p)
        back = load_model(p)
        assert back.vocab == model.vocab
        assert back.updates_seen == model.updates_seen
        assert back.config == model.config
        assert np.array_equal(back.lam, model.lam)
        assert infer_topics(docs[0], back) == infer_topics(docs[0], model)

    def test_bad_magic(self, tmp_path):
        p = tmp_path / "junk.lda"
        p.write_bytes(b"NOTAMODELxxxxxxxxxxxxxxx")
        with pytest.raises(ModelFormatError):
            load_model(p)
