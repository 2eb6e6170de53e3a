"""Topic model demo: online training, top words, and model selection.

Trains small online VB topic models on the mini dataset's sentences,
compares learning-rate decays by their held-out bound on a holdout
slice, and infers the topic mixture of a citance.
"""

from pathlib import Path

from refspan.corpus import load_dataset
from refspan.lda import LdaConfig, fit_online, heldout_bound, infer_topics, topic_top_words
from refspan.preprocess import PreprocessConfig, preprocess_sentence

ROOT = Path(__file__).resolve().parents[1] / "data" / "mini"


def sentence_corpus(dataset):
    pre = PreprocessConfig()
    corpus = []
    for doc_id in sorted(dataset.documents):
        for s in dataset.documents[doc_id].sentences:
            tokens = preprocess_sentence(s.text, pre)
            if tokens:
                corpus.append(tokens)
    return corpus


def main():
    dataset = load_dataset(ROOT, "train")
    corpus = sentence_corpus(dataset)
    train, holdout = corpus[:-5], corpus[-5:]

    print(f"{len(train)} training sentences, {len(holdout)} held out")
    print("\nheld-out bound by learning-rate decay (higher is better):")
    best = None
    for kappa in (0.5, 0.7, 0.9):
        cfg = LdaConfig(n_topics=2, kappa=kappa, tau0=1.0, batch_size=16,
                        passes=10, seed=3)
        model = fit_online(train, cfg)
        bound = heldout_bound(holdout, model)
        print(f"  kappa={kappa}  bound={bound:.2f}")
        if best is None or bound > best[0]:
            best = (bound, model)
    model = best[1]

    print("\ntop words per topic:")
    for k in range(model.n_topics):
        print(f"  topic {k}: {', '.join(topic_top_words(model, k, 6))}")

    citance = dataset.citances[0]
    tokens = preprocess_sentence(citance.text, PreprocessConfig())
    tv = infer_topics(tokens, model)
    mix = ", ".join(f"{p:.3f}" for p in tv.probs)
    print(f"\ncitance {citance.citance_id} topic mixture: [{mix}]"
          + ("  (uninformative: no known tokens)" if tv.uninformative else ""))


if __name__ == "__main__":
    main()
