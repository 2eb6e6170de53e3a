"""Embedding training, word mover's distance, and persistence."""

import itertools

import numpy as np
import pytest

from refspan.errors import ConfigError, ModelFormatError
from refspan.embed import (
    EmbedConfig,
    EmbeddingTable,
    EmptyCorpus,
    NoVocabOverlapWithTable,
    VocabTooSmall,
    load_binary,
    load_text,
    nearest_neighbors,
    save_binary,
    save_text,
    train_sgns,
    wmd,
    wmd_similarity,
)

# fixture embedding: six terms placed in the plane so every pairwise
# distance is distinct and hand-checkable
FIXTURE_TERMS = {
    "sun": (0.0, 0.0),
    "moon": (1.0, 0.0),
    "star": (0.0, 1.0),
    "rock": (3.0, 4.0),
    "tree": (5.0, 2.0),
    "fish": (2.0, 5.0),
}

FIXTURE_SENTENCES = [
    ["sun"],
    ["moon"],
    ["sun", "moon"],
    ["sun", "sun", "star"],
    ["rock", "tree"],
    ["fish", "fish", "rock"],
    ["sun", "moon", "star", "rock"],
    ["tree"],
]


@pytest.fixture(scope="module")
def table():
    vocab = {t: i for i, t in enumerate(FIXTURE_TERMS)}
    vectors = np.array([FIXTURE_TERMS[t] for t in vocab])
    return EmbeddingTable(vocab=vocab, vectors=vectors)


def transport_oracle(wa, wb, cost):
    """Exhaustive basic-solution search for the transportation LP.

    Every vertex of the transportation polytope corresponds to a
    spanning tree of the bipartite supply/demand graph; enumerating all
    candidate bases and keeping the cheapest feasible one is exact for
    tiny instances. Completely independent of the library's solver.
    """
    n, m = len(wa), len(wb)
    cells = list(itertools.product(range(n), range(m)))
    best = None
    for basis in itertools.combinations(cells, n + m - 1):
        # solve the tree flows by peeling leaves
        supply = {("r", i): wa[i] for i in range(n)}
        supply.update({("c", j): -wb[j] for j in range(m)})
        edges = {("r", i): [] for i in range(n)}
        edges.update({("c", j): [] for j in range(m)})
        for i, j in basis:
            edges[("r", i)].append((i, j))
            edges[("c", j)].append((i, j))
        remaining = set(basis)
        flows = {}
        ok = True
        while remaining:
            leaf = None
            for node, inc in edges.items():
                live = [e for e in inc if e in remaining]
                if len(live) == 1:
                    leaf = (node, live[0])
                    break
            if leaf is None:
                ok = False  # cycle: not a tree basis
                break
            node, (i, j) = leaf
            flow = supply[node] if node[0] == "r" else -supply[node]
            flows[(i, j)] = flow
            supply[("r", i)] -= flow
            supply[("c", j)] += flow
            remaining.discard((i, j))
        if not ok or any(f < -1e-12 for f in flows.values()):
            continue
        total = sum(f * cost[i, j] for (i, j), f in flows.items())
        if best is None or total < best:
            best = total
    return best


class TestConfig:
    def test_paper_style_configs_expressible(self):
        a = EmbedConfig(dim=200, epochs=15, negatives=5, min_count=40)
        b = EmbedConfig(dim=200, epochs=13, negatives=4, min_count=60)
        assert (a.epochs, a.negatives, a.min_count) == (15, 5, 40)
        assert (b.epochs, b.negatives, b.min_count) == (13, 4, 60)

    def test_validation(self):
        with pytest.raises(ConfigError):
            EmbedConfig(dim=0)
        with pytest.raises(ConfigError):
            EmbedConfig(initial_lr=0)
        with pytest.raises(ConfigError):
            EmbedConfig(window=0)


def toy_corpus(n=150, seed=0):
    """red/blue share contexts; control lives in a different world."""
    rng = np.random.default_rng(seed)
    nouns = ["car", "truck", "bike", "van"]
    verbs = ["drove", "parked", "turned"]
    corpus = []
    for _ in range(n):
        color = ["red", "blue"][int(rng.integers(2))]
        corpus.append(["the", color, str(rng.choice(nouns)),
                       str(rng.choice(verbs)), "quickly"])
        corpus.append(["market", "prices", "control", "inflation",
                       str(rng.choice(["sharply", "slowly"]))])
    return corpus


def cosine_of(table, a, b):
    va, vb = table[a], table[b]
    return float(va @ vb / (np.linalg.norm(va) * np.linalg.norm(vb)))


class TestTraining:
    def test_distributional_similarity(self):
        corpus = toy_corpus()
        hits = 0
        for seed in range(10):
            cfg = EmbedConfig(dim=16, epochs=8, negatives=5, min_count=2,
                              window=3, seed=seed)
            t = train_sgns(corpus, cfg)
            hits += cosine_of(t, "red", "blue") > cosine_of(t, "red", "control")
        assert hits >= 9

    def test_loss_decreases(self):
        cfg = EmbedConfig(dim=16, epochs=8, negatives=5, min_count=2,
                          window=3, seed=0)
        t = train_sgns(toy_corpus(), cfg)
        assert t.epoch_losses[-1] < t.epoch_losses[0]

    def test_deterministic_given_seed(self):
        corpus = toy_corpus(n=30)
        cfg = EmbedConfig(dim=8, epochs=2, negatives=3, min_count=2,
                          window=2, seed=4)
        a = train_sgns(corpus, cfg)
        b = train_sgns(corpus, cfg)
        assert np.array_equal(a.vectors, b.vectors)
        assert a.vocab == b.vocab

    def test_vectors_finite_and_shapes_agree(self):
        t = train_sgns(toy_corpus(n=30),
                       EmbedConfig(dim=8, epochs=1, negatives=2, min_count=2))
        assert np.isfinite(t.vectors).all()
        assert t.vectors.shape == (len(t.vocab), 8)

    def test_empty_corpus(self):
        with pytest.raises(EmptyCorpus):
            train_sgns([], EmbedConfig(dim=4))
        with pytest.raises(EmptyCorpus):
            train_sgns([[]], EmbedConfig(dim=4))

    def test_vocab_too_small(self):
        with pytest.raises(VocabTooSmall):
            train_sgns([["a", "b", "a"]], EmbedConfig(dim=4, min_count=99))


class TestWmd:
    def test_same_multiset_is_zero(self, table):
        assert wmd(["sun", "moon"], ["moon", "sun"], table) == 0.0

    def test_same_distribution_is_zero(self, table):
        # doubled counts induce the identical normalized bag
        assert wmd(["sun", "moon"], ["sun", "sun", "moon", "moon"], table) == 0.0

    def test_different_distribution_is_positive(self, table):
        assert wmd(["sun"], ["sun", "moon"], table) > 0

    def test_single_tokens_give_euclidean_distance(self, table):
        for x, y in itertools.combinations(FIXTURE_TERMS, 2):
            want = np.linalg.norm(np.array(FIXTURE_TERMS[x]) - np.array(FIXTURE_TERMS[y]))
            assert wmd([x], [y], table) == pytest.approx(float(want), abs=1e-9)

    def test_oov_tokens_dropped(self, table):
        assert wmd(["sun", "zzz"], ["sun"], table) == 0.0

    def test_fully_oov_raises(self, table):
        with pytest.raises(NoVocabOverlapWithTable):
            wmd(["zzz"], ["sun"], table)

    def test_symmetry_on_fixture_sentences(self, table):
        for a, b in itertools.combinations(FIXTURE_SENTENCES, 2):
            assert abs(wmd(a, b, table) - wmd(b, a, table)) <= 1e-9

    def test_triangle_inequality_on_fixture_sentences(self, table):
        for a, b, c in itertools.permutations(FIXTURE_SENTENCES, 3):
            assert wmd(a, c, table) <= wmd(a, b, table) + wmd(b, c, table) + 1e-9

    def test_matches_exhaustive_lp_oracle(self, table):
        rng = np.random.default_rng(2718)
        terms = list(FIXTURE_TERMS)
        for _ in range(40):
            a = [str(t) for t in rng.choice(terms, size=rng.integers(1, 5))]
            b = [str(t) for t in rng.choice(terms, size=rng.integers(1, 5))]
            got = wmd(a, b, table)
            ca = {t: a.count(t) for t in sorted(set(a))}
            cb = {t: b.count(t) for t in sorted(set(b))}
            wa = np.array(list(ca.values()), dtype=float)
            wb = np.array(list(cb.values()), dtype=float)
            wa, wb = wa / wa.sum(), wb / wb.sum()
            va = np.array([FIXTURE_TERMS[t] for t in ca])
            vb = np.array([FIXTURE_TERMS[t] for t in cb])
            cost = np.sqrt(((va[:, None, :] - vb[None, :, :]) ** 2).sum(axis=2))
            want = transport_oracle(wa, wb, cost)
            assert got == pytest.approx(want, abs=1e-6)


class TestWmdSimilarity:
    def test_identical_sentences(self, table):
        assert wmd_similarity(["sun", "star"], ["star", "sun"], table) == 1.0

    def test_oov_fallback_zero(self, table):
        assert wmd_similarity(["zzz"], ["sun"], table) == 0.0
        assert wmd_similarity(["sun"], ["zzz"], table) == 0.0

    def test_transform_value(self, table):
        # distance sun -> moon is exactly 1, so similarity is 1/2
        assert wmd_similarity(["sun"], ["moon"], table) == pytest.approx(0.5)

    def test_strictly_decreasing_in_distance(self, table):
        sims = [wmd_similarity(["sun"], [t], table) for t in ("moon", "tree")]
        dists = [wmd(["sun"], [t], table) for t in ("moon", "tree")]
        assert dists[0] < dists[1]
        assert sims[0] > sims[1]

    def test_bounded(self, table):
        for a, b in itertools.combinations(FIXTURE_SENTENCES, 2):
            assert 0.0 <= wmd_similarity(a, b, table) <= 1.0


class TestNearestNeighbors:
    def test_ordering(self, table):
        out = nearest_neighbors(table, "rock", n=2)
        assert len(out) == 2
        assert out[0][1] >= out[1][1]
        assert all(t != "rock" for t, _ in out)

    def test_unknown_term(self, table):
        with pytest.raises(NoVocabOverlapWithTable):
            nearest_neighbors(table, "zzz")


class TestPersistence:
    def _trained(self):
        return train_sgns(toy_corpus(n=30),
                          EmbedConfig(dim=6, epochs=1, negatives=2,
                                      min_count=2, seed=1))

    def test_text_round_trip_exact(self, tmp_path):
        t = self._trained()
        p = tmp_path / "vecs.txt"
        save_text(t, p)
        back = load_text(p)
        assert back.vocab == t.vocab
        assert np.array_equal(back.vectors, t.vectors)
        head = p.read_text().splitlines()[0]
        assert head == f"{len(t.vocab)} 6"

    def test_binary_round_trip_exact(self, tmp_path):
        t = self._trained()
        p = tmp_path / "vecs.bin"
        save_binary(t, p)
        back = load_binary(p)
        assert back.vocab == t.vocab
        assert np.array_equal(back.vectors, t.vectors)
        assert back.config == t.config

    def test_bad_files(self, tmp_path):
        bad = tmp_path / "bad.bin"
        bad.write_bytes(b"WRONGMAGIC" + b"\0" * 30)
        with pytest.raises(ModelFormatError):
            load_binary(bad)
        badtxt = tmp_path / "bad.txt"
        badtxt.write_text("not a header\n")
        with pytest.raises(ModelFormatError):
            load_text(badtxt)
