"""TFIDF ranking walkthrough: one citance end to end, then the dataset.

Shows the preprocessing pipeline on a single citance, the per-sentence
cosine scores against the reference document, and finally the micro
averaged metrics for ranking every citance in the mini dataset.
"""

from pathlib import Path

from refspan.corpus import load_dataset
from refspan.evaluate import TSV_HEADER, evaluate, tsv_row
from refspan.preprocess import preprocess_sentence
from refspan.ranker import RankerConfig, gold_map, rank_citance, rank_dataset

ROOT = Path(__file__).resolve().parents[1] / "data" / "mini"
CONFIG = "tfidf+nltk_stop+nltk_tok"


def main():
    dataset = load_dataset(ROOT, "train")
    config = RankerConfig.from_string(CONFIG)

    citance = dataset.citances[0]
    doc = dataset.documents[citance.reference_doc_id]
    print(f"citance {citance.citance_id}:")
    print(f"  raw    {citance.text!r}")
    print(f"  tokens {preprocess_sentence(citance.text, config.preprocess)}")
    print(f"  gold   {sorted(citance.gold_sids)}")

    ranked = rank_citance(citance, doc, config)
    print("\ntop-3 reference sentences:")
    for sid, score in ranked.ranked:
        marker = "*" if sid in citance.gold_sids else " "
        text = next(s.text for s in doc.sentences if s.sid == sid)
        print(f"  {marker} sid {sid:>2}  {score:.4f}  {text[:60]}")

    runs = rank_dataset(dataset, config)
    result = evaluate(runs, gold_map(dataset))
    print(f"\nwhole dataset, {result.n_citances} citances:")
    print(TSV_HEADER)
    print(tsv_row(config.to_string(), result))


if __name__ == "__main__":
    main()
