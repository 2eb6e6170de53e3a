"""Acceptance gate: one test per shipping criterion.

Each test prints a single [PASS]/[FAIL] line (visible under pytest -s or
in the failure report) and asserts the criterion at its stated tolerance
and runtime budget. Oracles live in the sibling test modules and are
imported rather than duplicated, so the acceptance run exercises the
exact same independent routes the unit suites froze.

The last test is advisory: it runs only when a real annotated corpus and
a full WordNet database are supplied through environment variables, and
it reports rather than gates.
"""

import itertools
import json
import os
import time
from collections import Counter
from pathlib import Path

import numpy as np
import pytest

from refspan import cli
from refspan.corpus import Citance, Dataset, Document, Sentence, load_dataset
from refspan.embed import EmbedConfig, EmbeddingTable, train_sgns, wmd
from refspan.evaluate import BootstrapResult, bootstrap_paired_test, evaluate
from refspan.lda import LdaConfig, fit_online, heldout_bound, infer_topics
from refspan.preprocess import PreprocessConfig, preprocess_sentence
from refspan.ranker import (
    RankedList,
    RankerConfig,
    blend_components,
    default_lambda_grid,
    lambda_sweep,
    rank_dataset,
    score_components,
)
from refspan.tfidf import fit, score_citance
from refspan.wordnet import expand_tokens, load_lexicon

from test_embed import FIXTURE_SENTENCES, FIXTURE_TERMS, cosine_of, toy_corpus, transport_oracle
from test_lda import best_permutation_l1, synthetic_two_topic, true_topic_matrix
from test_tfidf import dense_oracle

MINI_ROOT = Path(__file__).resolve().parent.parent / "data" / "mini"
WORDNET_MINI = Path(__file__).resolve().parent / "data" / "wordnet_mini"

MARINE = ["ocean", "wave", "tide", "current", "salt", "reef", "coral", "fish"]
MECH = ["engine", "piston", "valve", "torque", "gear", "shaft", "crank", "fuel"]


def verdict(name, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
    print(line)
    assert ok, line


def make_doc(doc_id, texts_by_sid):
    sentences = tuple(
        Sentence(sid=sid, text=text, section_title="Body", section_kind="section")
        for sid, text in sorted(texts_by_sid.items())
    )
    return Document(doc_id=doc_id, sentences=sentences)


def make_citance(cid, doc_id, text, gold):
    return Citance(citance_id=cid, citing_doc_id="X99-9999",
                   reference_doc_id=doc_id, text=text, gold_sids=frozenset(gold))


@pytest.fixture(scope="module")
def mini_dataset():
    return load_dataset(MINI_ROOT, "train")


@pytest.fixture(scope="module")
def mini_models(mini_dataset):
    # small models trained on the bundled dataset's own sentences; the
    # boundary identities do not depend on model quality
    corpus = []
    pre = PreprocessConfig()
    for doc_id in sorted(mini_dataset.documents):
        for s in mini_dataset.documents[doc_id].sentences:
            toks = preprocess_sentence(s.text, pre)
            if toks:
                corpus.append(toks)
    topic = fit_online(corpus, LdaConfig(n_topics=2, kappa=0.9, tau0=1.0,
                                         batch_size=16, passes=5, seed=3))
    table = train_sgns(corpus, EmbedConfig(dim=8, epochs=2, negatives=3,
                                           min_count=1, window=3, seed=0))
    return {"T": topic, "E": table}


@pytest.fixture(scope="module")
def marine_mech_model():
    rng = np.random.default_rng(7)
    docs = []
    for d in range(200):
        words = MARINE if d % 2 == 0 else MECH
        docs.append(list(rng.choice(words, size=30)))
    config = LdaConfig(n_topics=2, kappa=0.7, tau0=1.0, batch_size=64,
                       passes=20, seed=3)
    return fit_online(docs, config)


def test_criterion_01_tfidf_matches_dense_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    worst = 0.0
    for trial in range(50):
        vocab = [f"t{i}" for i in range(int(rng.integers(5, 21)))]
        n_sents = int(rng.integers(2, 11))
        sentences = {
            sid: [str(w) for w in rng.choice(vocab, size=int(rng.integers(1, 13)))]
            for sid in range(n_sents)
        }
        citance = [str(w) for w in rng.choice(vocab, size=int(rng.integers(1, 9)))]
        if trial % 5 == 0:
            citance.append("zzz-oov")
        model = fit(list(sentences.values()))
        got = dict(score_citance(citance, sorted(sentences.items()), model))
        want = dense_oracle(sentences, citance)
        worst = max(worst, max(abs(got[sid] - want[sid]) for sid in sentences))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-9 and elapsed < 5.0
    verdict("tfidf-dense-oracle", ok,
            f"50 corpora, max |dscore|={worst:.3e}, {elapsed:.2f}s")


def test_criterion_02_wmd_axioms_and_lp_oracle():
    t0 = time.perf_counter()
    vocab = {t: i for i, t in enumerate(FIXTURE_TERMS)}
    vectors = np.array([FIXTURE_TERMS[t] for t in vocab])
    table = EmbeddingTable(vocab=vocab, vectors=vectors)
    n = len(FIXTURE_SENTENCES)
    d = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            d[i, j] = wmd(FIXTURE_SENTENCES[i], FIXTURE_SENTENCES[j], table)

    sym_err = float(np.abs(d - d.T).max())
    self_err = float(np.abs(np.diag(d)).max())
    tri_err = 0.0
    for i, j, k in itertools.product(range(n), repeat=3):
        tri_err = max(tri_err, d[i, k] - (d[i, j] + d[j, k]))

    # exhaustive LP oracle on every pair (all fixture sentences have at
    # most 4 distinct terms per side)
    lp_err = 0.0
    for i in range(n):
        for j in range(n):
            ca = Counter(FIXTURE_SENTENCES[i])
            cb = Counter(FIXTURE_SENTENCES[j])
            ta, tb = sorted(ca), sorted(cb)
            assert len(ta) <= 4 and len(tb) <= 4
            wa = [ca[t] / sum(ca.values()) for t in ta]
            wb = [cb[t] / sum(cb.values()) for t in tb]
            cost = np.array([[np.linalg.norm(np.array(FIXTURE_TERMS[a])
                                             - np.array(FIXTURE_TERMS[b]))
                              for b in tb] for a in ta])
            lp_err = max(lp_err, abs(d[i, j] - transport_oracle(wa, wb, cost)))
    elapsed = time.perf_counter() - t0
    ok = (sym_err <= 1e-9 and self_err <= 1e-9 and tri_err <= 1e-9
          and lp_err <= 1e-6 and elapsed < 10.0)
    verdict("wmd-axioms-lp-oracle", ok,
            f"sym={sym_err:.2e} tri={tri_err:.2e} lp={lp_err:.2e}, {elapsed:.2f}s")


def test_criterion_03_lda_recovers_disjoint_topics():
    t0 = time.perf_counter()
    docs, _, words, probs = synthetic_two_topic(n_docs=500, vocab_each=20, seed=42)
    config = LdaConfig(n_topics=2, kappa=0.7, tau0=1.0, batch_size=256,
                       passes=50, seed=1)
    model = fit_online(docs, config)
    assert len(model.vocab) == 40

    l1 = best_permutation_l1(model.topic_term_probs(), true_topic_matrix(model, words, probs))

    sum_err = 0.0
    for tokens in docs[:50] + [["zzz-oov"]]:
        tv = infer_topics(tokens, model)
        sum_err = max(sum_err, abs(sum(tv.probs) - 1.0))

    rng = np.random.default_rng(0)
    pooled = [f"a{i}" for i in range(20)] + [f"b{i}" for i in range(20)]
    shuffled = [[str(w) for w in rng.choice(pooled, size=40)] for _ in range(100)]
    bound_true = heldout_bound(docs[:100], model)
    bound_shuf = heldout_bound(shuffled, model)

    elapsed = time.perf_counter() - t0
    ok = (l1 < 0.05 and sum_err <= 1e-9 and bound_true > bound_shuf
          and elapsed < 60.0)
    verdict("lda-topic-recovery", ok,
            f"L1={l1:.4f} sum_err={sum_err:.1e} "
            f"bound {bound_true:.0f} > {bound_shuf:.0f}, {elapsed:.1f}s")


def test_criterion_04_sgns_distributional_similarity():
    t0 = time.perf_counter()
    corpus = toy_corpus()
    wins = 0
    loss_drops = 0
    for seed in range(10):
        cfg = EmbedConfig(dim=16, epochs=8, negatives=5, min_count=2,
                          window=3, seed=seed)
        t = train_sgns(corpus, cfg)
        wins += cosine_of(t, "red", "blue") > cosine_of(t, "red", "control")
        loss_drops += t.epoch_losses[-1] < t.epoch_losses[0]
    elapsed = time.perf_counter() - t0
    ok = wins >= 9 and loss_drops == 10 and elapsed < 60.0
    verdict("sgns-similarity", ok,
            f"{wins}/10 seeds, loss decreased in {loss_drops}/10, {elapsed:.1f}s")


def test_criterion_05_hybrid_boundaries_and_crossover(mini_dataset, mini_models,
                                                      marine_mech_model):
    # boundary identities on the full bundled dataset, exact down to ties
    pure_tfidf = rank_dataset(mini_dataset, RankerConfig.from_string("tfidf"))
    boundary_ok = True
    for kind, mid in [("lda", "T"), ("we", "E")]:
        at_one = rank_dataset(mini_dataset,
                              RankerConfig.from_string(f"{kind}:{mid}@1.0"),
                              mini_models)
        at_zero = rank_dataset(mini_dataset,
                               RankerConfig.from_string(f"{kind}:{mid}@0.0"),
                               mini_models)
        pure_other = rank_dataset(mini_dataset,
                                  RankerConfig.from_string(f"{kind}:{mid}"),
                                  mini_models)
        boundary_ok = boundary_ok and at_one == pure_tfidf and at_zero == pure_other

    # crossover: scorers disagree on the top sentence and the blend flips
    # within one 0.01 step of the analytic switch point
    doc = make_doc("C90-1001", {3: "wave fish torque gear",
                                7: "tide salt coral reef"})
    citance = make_citance("C90-1001:1", "C90-1001",
                           "ocean wave fish reef current", {7})
    config = RankerConfig.from_string("lda:T@0.9+nltk_stop+nltk_tok")
    components = score_components(citance, doc, config,
                                  models={"T": marine_mech_model})
    t, o = components.tfidf_scores, components.other_scores
    lam_star = (o[7] - o[3]) / ((t[3] - t[7]) + (o[7] - o[3]))
    tops = {lam / 100: blend_components(components, config, lam / 100).ranked[0][0]
            for lam in range(0, 101)}
    cross_ok = 0.0 < lam_star < 1.0 and tops[1.0] == 3 and tops[0.0] == 7
    first_tfidf_win = min(lam for lam, top in sorted(tops.items()) if top == 3)
    cross_ok = cross_ok and abs(first_tfidf_win - lam_star) <= 0.01 + 1e-9

    ok = boundary_ok and cross_ok
    verdict("hybrid-boundary-crossover", ok,
            f"boundaries exact={boundary_ok}, lambda*={lam_star:.4f} "
            f"first grid win={first_tfidf_win:.2f}")


def test_criterion_06_sweep_grid_exact(marine_mech_model):
    grid = default_lambda_grid()
    want = [i / 100 for i in range(70, 100)]
    doc = make_doc("C90-1001", {3: "wave fish torque gear",
                                7: "tide salt coral reef"})
    citance = make_citance("C90-1001:1", "C90-1001",
                           "ocean wave fish reef current", {7})
    dataset = Dataset(documents={"C90-1001": doc}, citances=(citance,),
                      split="custom")
    swept = lambda_sweep(dataset, RankerConfig.from_string("lda:T@0.9"),
                         models={"T": marine_mech_model})
    ok = grid == want and len(grid) == 30 and sorted(swept) == want
    verdict("sweep-grid", ok, f"{len(grid)} values, ends {grid[0]}..{grid[-1]}")


def test_criterion_07_metric_worked_example_and_duplication():
    ranked = RankedList(citance_id="c1", ranked=((5, 0.9), (2, 0.5), (9, 0.1)))
    res = evaluate([ranked], {"c1": {5}})
    example_ok = (res.precision_at_k == pytest.approx(1 / 3, abs=1e-12)
                  and res.recall_at_k == 1.0
                  and res.f1 == pytest.approx(0.5, abs=1e-12))

    rng = np.random.default_rng(19)
    dup_ok = True
    for _ in range(20):
        runs, gold = [], {}
        for c in range(int(rng.integers(2, 8))):
            cid = f"c{c}"
            sids = [int(s) for s in rng.choice(30, size=int(rng.integers(1, 5)),
                                               replace=False)]
            runs.append(RankedList(citance_id=cid,
                                   ranked=tuple((s, 1.0 - 0.1 * i)
                                                for i, s in enumerate(sids))))
            gold[cid] = {int(s) for s in rng.choice(30, size=int(rng.integers(1, 4)),
                                                    replace=False)}
        base = evaluate(runs, gold)
        doubled = runs + [RankedList(citance_id=r.citance_id + "~dup", ranked=r.ranked)
                          for r in runs]
        gold2 = dict(gold)
        gold2.update({cid + "~dup": sids for cid, sids in gold.items()})
        dup = evaluate(doubled, gold2)
        dup_ok = dup_ok and (dup.precision_at_k, dup.recall_at_k, dup.f1) == (
            base.precision_at_k, base.recall_at_k, base.f1)

    ok = example_ok and dup_ok
    verdict("metric-arithmetic", ok,
            f"worked example P={res.precision_at_k:.4f} R={res.recall_at_k:.1f} "
            f"F1={res.f1:.2f}, duplication invariant on 20 fixtures={dup_ok}")


def test_criterion_08_bootstrap_significance():
    rng = np.random.default_rng(23)
    per_a, per_b = [], []
    for i in range(200):
        if i < 180:
            per_a.append((1, 1, 3))
            per_b.append((0, 1, 3))
        else:
            per_a.append((0, 1, 3))
            per_b.append((1, 1, 3))
    order = rng.permutation(200)  # one permutation so pairing is preserved
    per_a = [per_a[i] for i in order]
    per_b = [per_b[i] for i in order]

    self_res = bootstrap_paired_test(per_a, per_a, n=10000, seed=0)
    self_ok = self_res.degenerate and self_res.p_value == 1.0

    t0 = time.perf_counter()
    dom = bootstrap_paired_test(per_a, per_b, n=10000, seed=0)
    elapsed = time.perf_counter() - t0
    dom_ok = dom.p_value < 0.01 and dom.mean_diff > 0 and dom.n_resamples == 10000

    again = bootstrap_paired_test(per_a, per_b, n=10000, seed=0)
    repro_ok = again == BootstrapResult(dom.mean_diff, dom.t_statistic,
                                        dom.p_value, dom.n_resamples,
                                        dom.degenerate)

    ok = self_ok and dom_ok and repro_ok and elapsed < 30.0
    verdict("bootstrap-significance", ok,
            f"self p={self_res.p_value} dominance p={dom.p_value:.2e} "
            f"bitwise repro={repro_ok}, 10000 resamples in {elapsed:.1f}s")


def test_criterion_09_wordnet_expansion_semantics():
    lex = load_lexicon(WORDNET_MINI)

    # uniqueness: a lemma part is appended once even when two tokens'
    # synsets both carry it, and never when already in the sentence
    uniq = expand_tokens(["dog", "hound"], lex, duplicate_original=False)
    uniq_ok = uniq == ["dog", "hound", "domestic", "canis", "familiaris"]

    with_dup = expand_tokens(["dog"], lex, duplicate_original=True)
    without = expand_tokens(["dog"], lex, duplicate_original=False)
    dup_ok = (with_dup == ["dog", "domestic", "canis", "familiaris", "dog"]
              and without == ["dog", "domestic", "canis", "familiaris"]
              and expand_tokens(["qqq"], lex) == ["qqq"])

    # mode asymmetry, end to end: the hound synset carries the lemma
    # "dog" but not the reverse, so each one-sided mode bridges exactly
    # one direction of the pair
    def top_score(ref_text, cit_text, mode):
        doc = make_doc("D00-0000", {1: ref_text, 2: "water flows downhill"})
        citance = make_citance("D00-0000:1", "D00-0000", cit_text, {1})
        config = RankerConfig.from_string(f"tfidf+nltk_stop+nltk_tok+{mode}"
                                          if mode else "tfidf+nltk_stop+nltk_tok")
        comps = score_components(citance, doc, config, lexicon=lex if mode else None)
        return comps.tfidf_scores[1]

    ref_gains = top_score("hound growled", "dog barked", "ref_wn")
    cit_silent = top_score("hound growled", "dog barked", "cit_wn")
    cit_gains = top_score("dog growled", "hound barked", "cit_wn")
    ref_silent = top_score("dog growled", "hound barked", "ref_wn")
    plain = top_score("hound growled", "dog barked", "")
    mode_ok = (plain == 0.0 and ref_gains > 0.0 and cit_silent == 0.0
               and cit_gains > 0.0 and ref_silent == 0.0)

    ok = uniq_ok and dup_ok and mode_ok
    verdict("wordnet-expansion", ok,
            f"uniqueness={uniq_ok} duplicate-original={dup_ok} "
            f"mode asymmetry={mode_ok}")


def test_criterion_10_golden_run_reproducibility(tmp_path, monkeypatch, capsys):
    def one_run(workdir):
        monkeypatch.chdir(workdir)
        assert cli.main(["ingest", "--root", str(MINI_ROOT), "--split", "train",
                         "--out", "ds.jsonl"]) == 0
        assert cli.main(["rank", "--dataset", "ds.jsonl",
                         "--config", "tfidf+nltk_stop+nltk_tok",
                         "--out", "run.json", "--seed", "7"]) == 0
        capsys.readouterr()
        assert cli.main(["evaluate", "--manifest", "run.json",
                         "--dataset", "ds.jsonl",
                         "--out", "report.json"]) == 0
        tsv = capsys.readouterr().out
        return {name: (workdir / name).read_bytes()
                for name in ["ds.jsonl", "run.json", "report.json"]}, tsv

    dir_a, dir_b = tmp_path / "run_a", tmp_path / "run_b"
    dir_a.mkdir()
    dir_b.mkdir()
    files_a, tsv_a = one_run(dir_a)
    files_b, tsv_b = one_run(dir_b)

    same_files = all(files_a[n] == files_b[n] for n in files_a)
    ok = same_files and tsv_a == tsv_b and "R@3" in tsv_a
    manifest = json.loads(files_a["run.json"])
    verdict("golden-run", ok,
            f"byte-identical files={same_files}, identical TSV={tsv_a == tsv_b}, "
            f"dataset {manifest['dataset_hash'][:14]}...")


def test_criterion_11_real_corpus_advisory():
    root = os.environ.get("REFSPAN_DATA_ROOT")
    wn_dir = os.environ.get("REFSPAN_WORDNET_DIR")
    if not root or not wn_dir:
        pytest.skip("advisory criterion: set REFSPAN_DATA_ROOT and "
                    "REFSPAN_WORDNET_DIR to score the real test split "
                    "against the published 14.11% F1 (tolerance 1.5pp)")
    dataset = load_dataset(root, "test")
    config = RankerConfig.from_string("tfidf+nltk_stop+nltk_tok+cit_wn+(8,70)")
    lexicon = load_lexicon(wn_dir)
    runs = rank_dataset(dataset, config, lexicon=lexicon)
    gold = {c.citance_id: c.gold_sids for c in dataset.citances if c.gold_sids}
    result = evaluate(runs, gold)
    delta = result.f1 * 100 - 14.11
    within = abs(delta) <= 1.5
    print(f"[{'PASS' if within else 'ADVISORY'}] real-corpus: "
          f"F1={result.f1 * 100:.2f}% vs published 14.11% (delta {delta:+.2f}pp)")
    if not within:
        print("[ADVISORY] deviation above 1.5pp; expected causes are "
              "tokenizer and stopword snapshot differences")
