"""Sentence-level tf-idf scoring within one reference document.

Every sentence of the reference document is treated as its own
document for the df statistics, so N is the sentence count and df(w)
is the number of sentences containing w. Weights are raw term
frequency times ln(N/df) with no smoothing and no tf damping. Citance
terms that never occur in the reference document are skipped: they
have no df and can match nothing. Scoring a citance against candidate
sentences is plain cosine similarity over these sparse vectors.
"""

from __future__ import annotations

import math
from collections import Counter
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from pathlib import Path

from .errors import RefspanError
from .preprocess import TokenSequence

SparseVector = dict[str, float]


class EmptyCorpus(RefspanError):
    """fit() needs at least one sentence."""


@dataclass(frozen=True)
class TfidfModel:
    """Document frequencies for one reference document."""

    doc_freq: Mapping[str, int]
    n_sentences: int

    def __post_init__(self):
        if self.n_sentences < 1:
            raise EmptyCorpus("model requires at least one sentence")

    def idf(self, term: str) -> float | None:
        """ln(N/df) for an in-vocabulary term, else None."""
        df = self.doc_freq.get(term)
        if df is None:
            return None
        return math.log(self.n_sentences / df)


def fit(sentences: Iterable[TokenSequence]) -> TfidfModel:
    """Count document frequencies, one "document" per sentence."""
    df: Counter[str] = Counter()
    n = 0
    for tokens in sentences:
        n += 1
        df.update(set(tokens))
    if n == 0:
        raise EmptyCorpus("no sentences to fit on")
    return TfidfModel(doc_freq=dict(df), n_sentences=n)


def vectorize(tokens: TokenSequence, model: TfidfModel) -> SparseVector:
    """tf * ln(N/df) per distinct in-vocabulary term; zero weights dropped.

    A term with df = N gets weight exactly 0 and is omitted, keeping the
    no-stored-zero invariant. Out-of-vocabulary terms are skipped.
    """
    vec: SparseVector = {}
    for term, tf in Counter(tokens).items():
        idf = model.idf(term)
        if idf is None or idf == 0.0:
            continue
        vec[term] = tf * idf
    return vec


def norm(vec: SparseVector) -> float:
    return math.sqrt(sum(w * w for w in vec.values()))


def cosine(a: SparseVector, b: SparseVector) -> float:
    """A.B / (|A||B|), with empty-vector cosine defined as 0."""
    if not a or not b:
        return 0.0
    if len(b) < len(a):
        a, b = b, a
    dot = sum(w * b[t] for t, w in a.items() if t in b)
    if dot == 0.0:
        return 0.0
    return dot / (norm(a) * norm(b))


def score_citance(
    citance_tokens: TokenSequence,
    candidates: list[tuple[int, TokenSequence]],
    model: TfidfModel,
) -> list[tuple[int, float]]:
    """Cosine score per candidate, sorted best first, sid breaking ties."""
    cvec = vectorize(citance_tokens, model)
    scored = [(sid, cosine(cvec, vectorize(toks, model))) for sid, toks in candidates]
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored


def dump_idf(model: TfidfModel, path: str | Path) -> None:
    """Write term, df, and idf as TSV rows sorted by term (debug aid)."""
    lines = []
    for term in sorted(model.doc_freq):
        df = model.doc_freq[term]
        lines.append(f"{term}\t{df}\t{math.log(model.n_sentences / df):.10f}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
