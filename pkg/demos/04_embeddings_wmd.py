"""Word embeddings demo: train skip-gram vectors, then compare sentences.

Trains a tiny embedding table on the mini dataset's sentences, prints
nearest neighbors for a frequent term, and measures word mover's
distance between a citance and a few reference sentences. Lower
distance means the mass of one bag of words moves more cheaply onto the
other.
"""

from collections import Counter
from pathlib import Path

from refspan.corpus import load_dataset
from refspan.embed import EmbedConfig, nearest_neighbors, train_sgns, wmd_similarity
from refspan.preprocess import PreprocessConfig, preprocess_sentence

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

    cfg = EmbedConfig(dim=16, epochs=10, negatives=5, min_count=2, window=3, seed=0)
    table = train_sgns(corpus, cfg)
    print(f"trained {len(table.vocab)} vectors, dim {table.vectors.shape[1]}")
    print("epoch losses:", " ".join(f"{x:.3f}" for x in table.epoch_losses))

    term = Counter(t for toks in corpus for t in toks
                   if t in table.vocab).most_common(1)[0][0]
    print(f"\nnearest neighbors of {term!r}:")
    for neighbor, sim in nearest_neighbors(table, term, n=4):
        print(f"  {neighbor:<16} {sim:.4f}")

    citance = dataset.citances[0]
    doc = dataset.documents[citance.reference_doc_id]
    cit_tokens = preprocess_sentence(citance.text, pre)
    print(f"\nwmd similarity of citance {citance.citance_id} to reference sentences:")
    for s in doc.sentences[:5]:
        sent_tokens = preprocess_sentence(s.text, pre)
        sim = wmd_similarity(cit_tokens, sent_tokens, table)
        marker = "*" if s.sid in citance.gold_sids else " "
        print(f"  {marker} sid {s.sid:>2}  {sim:.4f}  {s.text[:55]}")


if __name__ == "__main__":
    main()
