"""Synonym expansion demo on the miniature lexicon shipped for tests.

Expansion appends each token's disambiguated synset lemmas (multiword
lemmas split apart, each lemma added at most once) and optionally
repeats the original token to keep its weight up. One-sided modes
expand only the citance or only the reference sentences before TFIDF
scoring. Point load_lexicon at a real WordNet 3.0 database directory
for actual use; the bundled directory is just a test fixture.
"""

from pathlib import Path

from refspan.ranker import RankerConfig, rank_citance
from refspan.corpus import Citance, Document, Sentence
from refspan.wordnet import expand_tokens, load_lexicon

LEXICON_DIR = Path(__file__).resolve().parents[1] / "tests" / "data" / "wordnet_mini"


def main():
    lexicon = load_lexicon(LEXICON_DIR)
    print(f"lexicon: {len(lexicon.synsets)} synsets")

    for tokens in (["dog"], ["dog", "hound"], ["money", "bank"]):
        expanded = expand_tokens(tokens, lexicon)
        print(f"  {tokens} -> {expanded}")
    print("  (with duplicate_original=False:",
          expand_tokens(["dog"], lexicon, duplicate_original=False), ")")

    # a citance saying "dog" finds the sentence saying "hound" only when
    # one side is expanded across the synonym gap
    doc = Document(doc_id="D00-0000", sentences=(
        Sentence(sid=1, text="The hound growled.", section_title="Body",
                 section_kind="section"),
        Sentence(sid=2, text="Water flows downhill.", section_title="Body",
                 section_kind="section"),
    ))
    citance = Citance(citance_id="D00-0000:1", citing_doc_id="X99-9999",
                      reference_doc_id="D00-0000", text="The dog barked.",
                      gold_sids=frozenset({1}))

    for spec in ("tfidf+nltk_stop+nltk_tok",
                 "tfidf+nltk_stop+nltk_tok+ref_wn",
                 "tfidf+nltk_stop+nltk_tok+cit_wn"):
        config = RankerConfig.from_string(spec)
        ranked = rank_citance(citance, doc, config, lexicon=lexicon)
        top_sid, top_score = ranked.ranked[0]
        print(f"  {spec:<38} top sid {top_sid}  score {top_score:.4f}")


if __name__ == "__main__":
    main()
