"""Hybrid ranking demo: blend TFIDF with a topic model and sweep lambda.

The blended score is lambda * tfidf + (1 - lambda) * topic similarity.
The sweep reuses the per-citance component scores across the whole
grid, so it costs little more than a single ranking pass. Afterwards
the best blend is compared against pure TFIDF with the bootstrap
paired test.
"""

from pathlib import Path

from refspan.corpus import load_dataset
from refspan.evaluate import bootstrap_paired_test, evaluate, paired_stats
from refspan.lda import LdaConfig, fit_online
from refspan.preprocess import PreprocessConfig, preprocess_sentence
from refspan.ranker import RankerConfig, gold_map, lambda_sweep, rank_dataset

ROOT = Path(__file__).resolve().parents[1] / "data" / "mini"


def main():
    dataset = load_dataset(ROOT, "train")
    pre = PreprocessConfig()
    corpus = []
    for doc_id in sorted(dataset.documents):
        for s in dataset.documents[doc_id].sentences:
            tokens = preprocess_sentence(s.text, pre)
            if tokens:
                corpus.append(tokens)
    model = fit_online(corpus, LdaConfig(n_topics=2, kappa=0.9, tau0=1.0,
                                         batch_size=16, passes=10, seed=3))
    models = {"bg": model}

    template = RankerConfig.from_string("lda:bg@0.9+nltk_stop+nltk_tok")
    swept = lambda_sweep(dataset, template, models=models)
    print("lambda sweep over the default grid:")
    print("lambda\tR@3\tP@3\tF1")
    for lam in sorted(swept):
        r = swept[lam]
        print(f"{lam:.2f}\t{r.recall_at_k * 100:.2f}\t"
              f"{r.precision_at_k * 100:.2f}\t{r.f1 * 100:.2f}")
    best_lam = max(sorted(swept), key=lambda lam: swept[lam].f1)
    print(f"\nbest lambda {best_lam:.2f} with F1 {swept[best_lam].f1 * 100:.2f}")

    gold = gold_map(dataset)
    tfidf_runs = rank_dataset(dataset, RankerConfig.from_string("tfidf+nltk_stop+nltk_tok"))
    hybrid = RankerConfig.from_string(f"lda:bg@{best_lam!r}+nltk_stop+nltk_tok")
    hybrid_runs = rank_dataset(dataset, hybrid, models)
    print(f"tfidf  F1 {evaluate(tfidf_runs, gold).f1 * 100:.2f}")
    print(f"hybrid F1 {evaluate(hybrid_runs, gold).f1 * 100:.2f}")

    per_a = paired_stats({r.citance_id: [sid for sid, _ in r.ranked]
                          for r in hybrid_runs}, gold)
    per_b = paired_stats({r.citance_id: [sid for sid, _ in r.ranked]
                          for r in tfidf_runs}, gold)
    res = bootstrap_paired_test(per_a, per_b, n=10000, seed=0)
    print(f"bootstrap paired test: mean_diff={res.mean_diff:+.4f} "
          f"p={res.p_value:.4f} degenerate={res.degenerate}")


if __name__ == "__main__":
    main()
