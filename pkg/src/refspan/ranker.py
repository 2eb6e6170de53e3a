"""Citance-to-sentence ranking: pure scorers, blends, and grid sweeps.

A ranking run picks the candidate sentences of one reference document
(length filter first, which can silently drop gold sentences), scores
each against the citance, sorts by score descending with ascending-sid
tie-break, and keeps the top k. The scorer is TFIDF, a topic model, an
embedding table, or a blend

    score = lambda * tfidf + (1 - lambda) * other

where other is the topic or embedding similarity. Blend weights live on
a grid swept in 0.01 steps; per-sentence scores are cached across the
sweep because only the mixing weight changes.

Synonym expansion, when enabled for a side, feeds only the TFIDF scorer;
topic and embedding models see the unexpanded pipeline output since they
were trained on unexpanded text.

Whole runs are described by a config string, '+'-joined tokens extending
the preprocess grammar with a scorer token (``tfidf``, ``lda:<id>`` or
``we:<id>``, optionally ``@<lambda>`` for a blend), an expansion token
(``ref_wn``/``cit_wn``/``both_wn``), and ``nodup`` to disable original-
token duplication, e.g. ``tfidf+nltk_stop+nltk_tok+cit_wn+(8,70)``.
Run outputs serialize to a manifest JSON carrying the config string,
content hashes for every input, and the per-citance ranked lists.
"""

from __future__ import annotations

import hashlib
import json
import re
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from pathlib import Path

from .corpus import Citance, Dataset, Document, UnknownDocument, dataset_checksum
from .errors import RefspanError, ConfigError
from .evaluate import EvalResult, evaluate
from .preprocess import (
    BadConfigString,
    PreprocessConfig,
    apply_config_token,
    length_filter,
    remove_stopwords,
    stem,
    strip_brackets,
    tokenize,
)
from . import embed, lda, tfidf
from .wordnet import ExpansionMode, Lexicon, expand_tokens, mode_from_token

SCORER_KINDS = ("tfidf", "lda", "we")

_SCORER_RE = re.compile(r"^(lda|we):([A-Za-z0-9_.~-]+)(?:@(.+))?$")


class BadLambda(ConfigError):
    """A blend weight outside [0, 1]."""


class MissingModel(RefspanError):
    """The config names a model id the registry does not hold."""


class MalformedManifest(RefspanError):
    """A run-manifest file has a wrong kind, version, or layout."""


@dataclass(frozen=True)
class ScorerSpec:
    """Which scorer runs, and at what blend weight.

    blend_lambda None means the scorer runs pure. A tfidf spec carries
    neither model id nor lambda.
    """

    kind: str = "tfidf"
    model_id: str | None = None
    blend_lambda: float | None = None

    def __post_init__(self):
        if self.kind not in SCORER_KINDS:
            raise ConfigError(f"unknown scorer kind {self.kind!r}")
        if self.kind == "tfidf":
            if self.model_id is not None or self.blend_lambda is not None:
                raise ConfigError("tfidf scorer takes no model id or lambda")
        elif not self.model_id:
            raise ConfigError(f"scorer {self.kind!r} requires a model id")
        if self.blend_lambda is not None and not 0.0 <= self.blend_lambda <= 1.0:
            raise BadLambda(f"lambda must lie in [0, 1], got {self.blend_lambda}")

    @property
    def is_hybrid(self) -> bool:
        return self.blend_lambda is not None

    def token(self) -> str:
        if self.kind == "tfidf":
            return "tfidf"
        base = f"{self.kind}:{self.model_id}"
        return base if self.blend_lambda is None else f"{base}@{self.blend_lambda!r}"


def _scorer_from_token(token: str) -> ScorerSpec | None:
    if token == "tfidf":
        return ScorerSpec()
    m = _SCORER_RE.match(token)
    if not m:
        return None
    kind, model_id, raw_lam = m.groups()
    if raw_lam is None:
        return ScorerSpec(kind=kind, model_id=model_id)
    try:
        lam = float(raw_lam)
    except ValueError:
        raise BadConfigString(f"bad lambda {raw_lam!r}", token) from None
    return ScorerSpec(kind=kind, model_id=model_id, blend_lambda=lam)


@dataclass(frozen=True)
class RankedList:
    citance_id: str
    ranked: tuple[tuple[int, float], ...]


@dataclass(frozen=True)
class RankerConfig:
    """One full run description: pipeline, expansion, scorer, cutoff."""

    preprocess: PreprocessConfig = PreprocessConfig()
    expansion: ExpansionMode = ExpansionMode()
    scorer: ScorerSpec = ScorerSpec()
    top_k: int = 3

    def __post_init__(self):
        if self.top_k < 1:
            raise ConfigError(f"top_k must be >= 1, got {self.top_k}")

    @classmethod
    def from_string(cls, spec: str, top_k: int = 3) -> "RankerConfig":
        """Parse the extended config grammar; unknown tokens are errors."""
        pre = PreprocessConfig()
        scorer: ScorerSpec | None = None
        mode = "none"
        duplicate = True
        for pos, token in enumerate(t.strip() for t in spec.split("+")):
            if not token:
                raise BadConfigString("empty config token", token, pos)
            found = _scorer_from_token(token)
            if found is not None:
                if scorer is not None:
                    raise BadConfigString("two scorer tokens in one config", token, pos)
                scorer = found
                continue
            mode_name = mode_from_token(token)
            if mode_name is not None:
                mode = mode_name
                continue
            if token == "nodup":
                duplicate = False
                continue
            updated = apply_config_token(pre, token)
            if updated is None:
                raise BadConfigString("unknown config token", token, pos)
            pre = updated
        return cls(
            preprocess=pre,
            expansion=ExpansionMode(mode=mode, duplicate_original=duplicate),
            scorer=scorer if scorer is not None else ScorerSpec(),
            top_k=top_k,
        )

    def to_string(self) -> str:
        """Canonical config string; from_string round-trips it."""
        pieces = self.preprocess.to_string().split("+")
        bounds = [p for p in pieces if p.startswith("(")]
        rest = [p for p in pieces if not p.startswith("(")]
        parts = [self.scorer.token(), *rest]
        wn = self.expansion.config_token()
        if wn is not None:
            parts.append(wn)
            if not self.expansion.duplicate_original:
                parts.append("nodup")
        parts.extend(bounds)
        return "+".join(parts)


def hybrid_score(tfidf_score: float, other_score: float, lam: float) -> float:
    """Blend of the two scorer outputs at weight lam toward TFIDF."""
    if not 0.0 <= lam <= 1.0:
        raise BadLambda(f"lambda must lie in [0, 1], got {lam}")
    return lam * tfidf_score + (1.0 - lam) * other_score


def default_lambda_grid() -> list[float]:
    """The sweep grid: 0.70 through 0.99 in 0.01 steps, 30 points."""
    return [i / 100 for i in range(70, 100)]


# ------------------------------------------------------------ scoring


def _pipeline_tokens(
    text: str,
    config: PreprocessConfig,
    lexicon: Lexicon | None = None,
    expand: bool = False,
    duplicate_original: bool = True,
) -> list[str]:
    """Preprocess one sentence, optionally expanding before stemming."""
    if config.strip_brackets:
        text = strip_brackets(text)
    tokens = tokenize(text, config.tokenizer)
    tokens = remove_stopwords(tokens, config.stopwords)
    if expand and lexicon is not None:
        tokens = expand_tokens(tokens, lexicon, duplicate_original, config.stopwords)
    if config.stem:
        tokens = stem(tokens)
    return list(tokens)


@dataclass(frozen=True)
class ScoreComponents:
    """Cached per-sentence scorer outputs for one citance.

    tfidf and other are keyed by sid over the same candidate set; only
    the blend weight remains to be applied, so a lambda sweep reuses one
    of these per citance.
    """

    citance_id: str
    sids: tuple[int, ...]
    tfidf_scores: Mapping[int, float]
    other_scores: Mapping[int, float]


def _resolve_model(config: RankerConfig, models: Mapping[str, object] | None):
    spec = config.scorer
    if spec.kind == "tfidf":
        return None
    wanted = lda.TopicModel if spec.kind == "lda" else embed.EmbeddingTable
    if models is None or spec.model_id not in models:
        raise MissingModel(f"model {spec.model_id!r} not in registry")
    model = models[spec.model_id]
    if not isinstance(model, wanted):
        raise MissingModel(
            f"model {spec.model_id!r} is {type(model).__name__}, "
            f"scorer {spec.kind!r} needs {wanted.__name__}")
    return model


def score_components(
    citance: Citance,
    document: Document,
    config: RankerConfig,
    models: Mapping[str, object] | None = None,
    lexicon: Lexicon | None = None,
) -> ScoreComponents:
    """Every per-sentence score the configured scorers can produce.

    Candidates are the document's sentences inside the length bounds.
    The TFIDF model is fit on the candidate set itself (each sentence is
    one document), after any reference-side expansion. Scorer errors for
    a single pair (say, a fully out-of-vocabulary sentence) become score
    0 rather than aborting the run.
    """
    pre = config.preprocess
    if config.expansion.mode != "none" and lexicon is None:
        raise MissingModel("expansion mode set but no lexicon supplied")
    sent_text = {s.sid: s.text for s in document.sentences}
    if pre.length_bounds is not None:
        sids = tuple(length_filter(sent_text, pre.length_bounds, pre))
    else:
        sids = tuple(sorted(sent_text))

    dup = config.expansion.duplicate_original
    plain = {sid: _pipeline_tokens(sent_text[sid], pre) for sid in sids}
    cit_plain = _pipeline_tokens(citance.text, pre)
    if config.expansion.expands_references:
        ref_toks = {sid: _pipeline_tokens(sent_text[sid], pre, lexicon, True, dup)
                    for sid in sids}
    else:
        ref_toks = plain
    if config.expansion.expands_citances:
        cit_toks = _pipeline_tokens(citance.text, pre, lexicon, True, dup)
    else:
        cit_toks = cit_plain

    tfidf_scores: dict[int, float] = {sid: 0.0 for sid in sids}
    if sids:
        model = tfidf.fit(ref_toks[sid] for sid in sids)
        cit_vec = tfidf.vectorize(cit_toks, model)
        for sid in sids:
            tfidf_scores[sid] = tfidf.cosine(cit_vec, tfidf.vectorize(ref_toks[sid], model))

    other_scores: dict[int, float] = {sid: 0.0 for sid in sids}
    spec = config.scorer
    if spec.kind == "lda":
        topic_model = _resolve_model(config, models)
        cit_topics = lda.infer_topics(cit_plain, topic_model)
        for sid in sids:
            sent_topics = lda.infer_topics(plain[sid], topic_model)
            other_scores[sid] = lda.topic_cosine(cit_topics, sent_topics)
    elif spec.kind == "we":
        table = _resolve_model(config, models)
        for sid in sids:
            try:
                other_scores[sid] = embed.wmd_similarity(cit_plain, plain[sid], table)
            except RefspanError:
                other_scores[sid] = 0.0

    return ScoreComponents(citance_id=citance.citance_id, sids=sids,
                           tfidf_scores=tfidf_scores, other_scores=other_scores)


def blend_components(
    components: ScoreComponents, config: RankerConfig,
    lam: float | None = None,
) -> RankedList:
    """Apply the blend (or pick the pure scorer) and cut to top_k.

    lam overrides the config's blend weight, which is how the sweep
    reuses one ScoreComponents across the whole grid.
    """
    spec = config.scorer
    if lam is None:
        lam = spec.blend_lambda
    if spec.kind == "tfidf":
        scores = components.tfidf_scores
    elif lam is None:
        scores = components.other_scores
    else:
        scores = {sid: hybrid_score(components.tfidf_scores[sid],
                                    components.other_scores[sid], lam)
                  for sid in components.sids}
    order = sorted(components.sids, key=lambda sid: (-scores[sid], sid))
    top = order[:config.top_k]
    return RankedList(citance_id=components.citance_id,
                      ranked=tuple((sid, float(scores[sid])) for sid in top))


def rank_citance(
    citance: Citance,
    document: Document,
    config: RankerConfig,
    models: Mapping[str, object] | None = None,
    lexicon: Lexicon | None = None,
) -> RankedList:
    """Rank one document's sentences against one citance."""
    return blend_components(score_components(citance, document, config, models, lexicon),
                            config)


def rank_dataset(
    dataset: Dataset,
    config: RankerConfig,
    models: Mapping[str, object] | None = None,
    lexicon: Lexicon | None = None,
) -> list[RankedList]:
    """Rank every citance in the dataset, in dataset order."""
    out = []
    for citance in dataset.citances:
        doc = dataset.documents.get(citance.reference_doc_id)
        if doc is None:
            raise UnknownDocument(
                f"citance {citance.citance_id!r} references missing document "
                f"{citance.reference_doc_id!r}")
        out.append(rank_citance(citance, doc, config, models, lexicon))
    return out


def gold_map(dataset: Dataset) -> dict[str, frozenset[int]]:
    """citance_id to gold sid set, the shape evaluate() consumes."""
    return {c.citance_id: c.gold_sids for c in dataset.citances}


def lambda_sweep(
    dataset: Dataset,
    config_template: RankerConfig,
    lambdas: Sequence[float] | None = None,
    models: Mapping[str, object] | None = None,
    lexicon: Lexicon | None = None,
) -> dict[float, EvalResult]:
    """Evaluate the blend at every grid point, caching scorer outputs.

    The per-sentence scores do not depend on lambda, so they are
    computed once per citance and re-blended for each grid value. The
    result maps each lambda to its dataset-level EvalResult.
    """
    if config_template.scorer.kind == "tfidf":
        raise ConfigError("lambda sweep needs an lda or we scorer to blend against")
    if lambdas is None:
        lambdas = default_lambda_grid()
    for lam in lambdas:
        if not 0.0 <= lam <= 1.0:
            raise BadLambda(f"lambda must lie in [0, 1], got {lam}")
    gold = gold_map(dataset)
    cached = []
    for citance in dataset.citances:
        doc = dataset.documents.get(citance.reference_doc_id)
        if doc is None:
            raise UnknownDocument(
                f"citance {citance.citance_id!r} references missing document "
                f"{citance.reference_doc_id!r}")
        cached.append(score_components(citance, doc, config_template, models, lexicon))
    out: dict[float, EvalResult] = {}
    for lam in lambdas:
        runs = [blend_components(c, config_template, lam) for c in cached]
        out[float(lam)] = evaluate(runs, gold)
    return out


def score_histogram(
    scores: Sequence[float], bins: int = 20,
    lo: float = 0.0, hi: float = 1.0,
) -> list[tuple[float, int]]:
    """(bin left edge, count) pairs; a cheap look at score distribution shape."""
    if bins < 1:
        raise ConfigError(f"bins must be >= 1, got {bins}")
    if not hi > lo:
        raise ConfigError(f"need hi > lo, got ({lo}, {hi})")
    counts = [0] * bins
    width = (hi - lo) / bins
    for s in scores:
        if s < lo or s > hi:
            continue
        idx = min(int((s - lo) / width), bins - 1)
        counts[idx] += 1
    return [(lo + i * width, counts[i]) for i in range(bins)]


# ----------------------------------------------------------- manifest

MANIFEST_KIND = "run_manifest"
MANIFEST_VERSION = 1


def file_checksum(path: str | Path) -> str:
    digest = hashlib.sha256(Path(path).read_bytes()).hexdigest()
    return f"sha256:{digest}"


def build_manifest(
    config: RankerConfig,
    dataset: Dataset,
    rankings: Sequence[RankedList],
    seed: int = 0,
    model_paths: Mapping[str, str | Path] | None = None,
    outputs: Sequence[str] = (),
) -> dict:
    """Assemble the run record: config string, input hashes, rankings."""
    model_hashes = {mid: file_checksum(p) for mid, p in (model_paths or {}).items()}
    return {
        "kind": MANIFEST_KIND,
        "version": MANIFEST_VERSION,
        "config_string": config.to_string(),
        "top_k": config.top_k,
        "seed": seed,
        "dataset_hash": dataset_checksum(dataset),
        "model_hashes": model_hashes,
        "outputs": list(outputs),
        "rankings": [
            {"citance_id": r.citance_id,
             "ranked": [[sid, score] for sid, score in r.ranked]}
            for r in rankings
        ],
    }


def manifest_dumps(manifest: dict) -> str:
    """Canonical byte-stable JSON for a manifest."""
    return json.dumps(manifest, sort_keys=True, separators=(",", ":")) + "\n"


def write_manifest(manifest: dict, path: str | Path) -> None:
    Path(path).write_text(manifest_dumps(manifest), encoding="utf-8")


def read_manifest(path: str | Path) -> dict:
    try:
        manifest = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as err:
        raise MalformedManifest(f"{path}: {err}") from None
    if not isinstance(manifest, dict) or manifest.get("kind") != MANIFEST_KIND:
        raise MalformedManifest(f"{path}: not a run manifest")
    if manifest.get("version") != MANIFEST_VERSION:
        raise MalformedManifest(f"{path}: unsupported manifest version "
                                f"{manifest.get('version')!r}")
    if not isinstance(manifest.get("rankings"), list):
        raise MalformedManifest(f"{path}: manifest has no rankings list")
    return manifest


def manifest_rankings(manifest: dict) -> dict[str, list[int]]:
    """citance_id to retrieved sid list, for the evaluation side."""
    out: dict[str, list[int]] = {}
    for row in manifest["rankings"]:
        out[row["citance_id"]] = [int(sid) for sid, _ in row["ranked"]]
    return out


def manifest_ranked_lists(manifest: dict) -> list[RankedList]:
    return [
        RankedList(citance_id=row["citance_id"],
                   ranked=tuple((int(sid), float(score)) for sid, score in row["ranked"]))
        for row in manifest["rankings"]
    ]
