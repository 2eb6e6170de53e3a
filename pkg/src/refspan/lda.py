"""Online variational Bayes topic models.

Training follows the streaming mean-field recipe: per minibatch, an
E-step finds per-document variational Dirichlet parameters gamma by a
fixed-point loop, then the topic-term parameters lambda blend the
minibatch sufficient statistics in with step size rho_t = (tau0+t)^(-kappa),
clamped to at most 1, where t counts minibatches from 0. The held-out
score is the variational lower bound on log likelihood, left
unnormalized, so it only supports comparisons at equal topic count.

Inference initializes gamma at 1 and runs the same fixed point with
lambda frozen, making repeated calls bit-identical.
"""

from __future__ import annotations

import json
import struct
from collections.abc import Sequence
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np
from scipy.special import gammaln, psi

from .errors import RefspanError, ConfigError, ModelFormatError
from .preprocess import TokenSequence


class EmptyVocabulary(RefspanError):
    """No term survived the document-frequency thresholds."""


class EmptyHeldout(RefspanError):
    """heldout_bound needs at least one document."""


class BadTopicIndex(ConfigError):
    """Topic index outside 0..K-1."""


@dataclass(frozen=True)
class LdaConfig:
    """Hyperparameters for one topic-model training run."""

    n_topics: int = 10
    kappa: float = 0.5
    tau0: float = 1.0
    min_df: int = 1
    max_df: float = 1.0
    batch_size: int = 256
    passes: int = 1
    alpha: float | None = None   # None means symmetric 1/K
    eta: float | None = None
    gamma_threshold: float = 1e-3
    max_e_iters: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.n_topics < 2:
            raise ConfigError(f"n_topics must be >= 2, got {self.n_topics}")
        if not 0 < self.kappa <= 1:
            raise ConfigError(f"kappa must lie in (0, 1], got {self.kappa}")
        if self.tau0 < 0:
            raise ConfigError(f"tau0 must be >= 0, got {self.tau0}")
        if self.min_df < 1:
            raise ConfigError(f"min_df must be >= 1, got {self.min_df}")
        if not 0 < self.max_df <= 1:
            raise ConfigError(f"max_df must lie in (0, 1], got {self.max_df}")
        if self.batch_size < 1 or self.passes < 1 or self.max_e_iters < 1:
            raise ConfigError("batch_size, passes, and max_e_iters must be >= 1")
        if self.alpha is not None and self.alpha <= 0:
            raise ConfigError("alpha must be positive")
        if self.eta is not None and self.eta <= 0:
            raise ConfigError("eta must be positive")

    @property
    def alpha_value(self) -> float:
        return self.alpha if self.alpha is not None else 1.0 / self.n_topics

    @property
    def eta_value(self) -> float:
        return self.eta if self.eta is not None else 1.0 / self.n_topics

    @classmethod
    def from_file(cls, path: str | Path) -> "LdaConfig":
        """Read key=value lines; '#' starts a comment; unknown keys fail."""
        known = {f.name: f for f in fields(cls)}
        kwargs = {}
        for lineno, line in enumerate(
                Path(path).read_text(encoding="utf-8").splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if not sep or not key:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            if key not in known:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            if value.lower() == "none":
                kwargs[key] = None
            elif key in ("kappa", "tau0", "max_df", "alpha", "eta", "gamma_threshold"):
                kwargs[key] = float(value)
            else:
                kwargs[key] = int(value)
        return cls(**kwargs)


def rho(t: int, tau0: float, kappa: float) -> float:
    """Step size for minibatch t (from 0), clamped to at most 1."""
    base = tau0 + t
    if base <= 1.0:
        return 1.0
    return min(1.0, base ** (-kappa))


def build_vocabulary(
    docs: Sequence[TokenSequence], min_df: int, max_df: float
) -> dict[str, int]:
    """Index surviving terms lexicographically.

    A term survives when its document frequency is at least min_df and
    at most max_df * len(docs).
    """
    if not docs:
        raise EmptyVocabulary("no documents")
    df: dict[str, int] = {}
    for doc in docs:
        for term in set(doc):
            df[term] = df.get(term, 0) + 1
    cap = max_df * len(docs)
    kept = sorted(t for t, n in df.items() if min_df <= n <= cap)
    if not kept:
        raise EmptyVocabulary(
            f"no term satisfies {min_df} <= df <= {cap:.2f} over {len(docs)} docs")
    return {t: i for i, t in enumerate(kept)}


@dataclass
class TopicModel:
    vocab: dict[str, int]
    lam: np.ndarray          # K x V, all entries positive
    config: LdaConfig
    updates_seen: int = 0

    @property
    def n_topics(self) -> int:
        return self.lam.shape[0]

    def topic_term_probs(self) -> np.ndarray:
        """Rows of lambda normalized into distributions."""
        return self.lam / self.lam.sum(axis=1, keepdims=True)


@dataclass(frozen=True)
class TopicVector:
    probs: tuple[float, ...]
    uninformative: bool = False


def _dirichlet_expectation(x: np.ndarray) -> np.ndarray:
    """E[log theta] for theta ~ Dir(x), rowwise for matrices."""
    if x.ndim == 1:
        return psi(x) - psi(x.sum())
    return psi(x) - psi(x.sum(axis=1, keepdims=True))


def _bow(tokens: TokenSequence, vocab: dict[str, int]) -> tuple[np.ndarray, np.ndarray]:
    counts: dict[int, int] = {}
    for t in tokens:
        idx = vocab.get(t)
        if idx is not None:
            counts[idx] = counts.get(idx, 0) + 1
    ids = np.fromiter(counts.keys(), dtype=np.int64, count=len(counts))
    cts = np.fromiter(counts.values(), dtype=np.float64, count=len(counts))
    return ids, cts


def _e_step_doc(
    ids: np.ndarray,
    cts: np.ndarray,
    exp_elog_beta: np.ndarray,
    alpha: float,
    threshold: float,
    max_iters: int,
) -> np.ndarray:
    """Fixed-point gamma for one document, lambda held fixed."""
    k = exp_elog_beta.shape[0]
    if len(ids) == 0:
        return np.full(k, alpha)  # prior only
    gamma = np.ones(k)
    exp_elog_theta = np.exp(_dirichlet_expectation(gamma))
    beta_d = exp_elog_beta[:, ids]
    phinorm = exp_elog_theta @ beta_d + 1e-100
    for _ in range(max_iters):
        last = gamma
        gamma = alpha + exp_elog_theta * ((cts / phinorm) @ beta_d.T)
        exp_elog_theta = np.exp(_dirichlet_expectation(gamma))
        phinorm = exp_elog_theta @ beta_d + 1e-100
        if np.mean(np.abs(gamma - last)) < threshold:
            break
    return gamma


def _e_step_batch(
    bows: list[tuple[np.ndarray, np.ndarray]],
    lam: np.ndarray,
    config: LdaConfig,
) -> tuple[np.ndarray, np.ndarray]:
    """Gammas and sufficient statistics for a minibatch."""
    elog_beta = _dirichlet_expectation(lam)
    exp_elog_beta = np.exp(elog_beta)
    gammas = np.empty((len(bows), lam.shape[0]))
    sstats = np.zeros_like(lam)
    for d, (ids, cts) in enumerate(bows):
        gamma = _e_step_doc(ids, cts, exp_elog_beta, config.alpha_value,
                            config.gamma_threshold, config.max_e_iters)
        gammas[d] = gamma
        if len(ids):
            exp_elog_theta = np.exp(_dirichlet_expectation(gamma))
            phinorm = exp_elog_theta @ exp_elog_beta[:, ids] + 1e-100
            sstats[:, ids] += np.outer(exp_elog_theta, cts / phinorm)
    sstats *= exp_elog_beta
    return gammas, sstats


def fit_online(docs: Sequence[TokenSequence], config: LdaConfig) -> TopicModel:
    """Train a topic model with streaming minibatch updates.

    The vocabulary is built from the same docs with the config's df
    bounds. lambda starts from a seeded Gamma(100, 0.01) draw; documents
    are consumed in order, batch by batch, for config.passes sweeps,
    with t counting minibatches across passes. Fixed seed and input
    order give bitwise-identical lambda.
    """
    vocab = build_vocabulary(docs, config.min_df, config.max_df)
    rng = np.random.default_rng(config.seed)
    k, v = config.n_topics, len(vocab)
    lam = rng.gamma(100.0, 1.0 / 100.0, (k, v))
    bows = [_bow(doc, vocab) for doc in docs]
    n_docs = len(bows)
    t = 0
    for _ in range(config.passes):
        for start in range(0, n_docs, config.batch_size):
            batch = bows[start:start + config.batch_size]
            _, sstats = _e_step_batch(batch, lam, config)
            r = rho(t, config.tau0, config.kappa)
            lam = (1 - r) * lam + r * (config.eta_value + n_docs * sstats / len(batch))
            t += 1
    return TopicModel(vocab=vocab, lam=lam, config=config, updates_seen=t)


def infer_topics(tokens: TokenSequence, model: TopicModel) -> TopicVector:
    """Normalized gamma for one document under a frozen model.

    Unknown tokens are ignored. When nothing remains, the normalized
    prior (the uniform vector) comes back flagged uninformative.
    """
    ids, cts = _bow(tokens, model.vocab)
    k = model.n_topics
    if len(ids) == 0:
        return TopicVector(probs=tuple([1.0 / k] * k), uninformative=True)
    exp_elog_beta = np.exp(_dirichlet_expectation(model.lam))
    gamma = _e_step_doc(ids, cts, exp_elog_beta, model.config.alpha_value,
                        model.config.gamma_threshold, model.config.max_e_iters)
    probs = gamma / gamma.sum()
    return TopicVector(probs=tuple(float(p) for p in probs), uninformative=False)


def topic_cosine(a: TopicVector, b: TopicVector) -> float:
    """Cosine similarity between two already-inferred topic vectors."""
    va, vb = np.array(a.probs), np.array(b.probs)
    return float(va @ vb / (np.linalg.norm(va) * np.linalg.norm(vb)))


def lda_similarity(a: TokenSequence, b: TokenSequence, model: TopicModel) -> float:
    """Cosine similarity between the two inferred topic vectors."""
    return topic_cosine(infer_topics(a, model), infer_topics(b, model))


def heldout_bound(docs: Sequence[TokenSequence], model: TopicModel) -> float:
    """Variational lower bound on the log likelihood of docs (unnormalized).

    Larger is better. The value scales with corpus and vocabulary size,
    so it only ranks models sharing the same topic count.
    """
    if not docs:
        raise EmptyHeldout("no held-out documents")
    config = model.config
    lam = model.lam
    elog_beta = _dirichlet_expectation(lam)
    bows = [_bow(doc, model.vocab) for doc in docs]
    gammas, _ = _e_step_batch(bows, lam, config)
    elog_theta = _dirichlet_expectation(gammas)
    alpha, eta = config.alpha_value, config.eta_value
    k, v = lam.shape

    score = 0.0
    for d, (ids, cts) in enumerate(bows):
        if len(ids) == 0:
            continue
        # log sum_k exp(Elogtheta_dk + Elogbeta_k,w), stably
        temp = elog_theta[d][:, None] + elog_beta[:, ids]
        tmax = temp.max(axis=0)
        score += float(cts @ (np.log(np.exp(temp - tmax).sum(axis=0)) + tmax))
    score += float(((alpha - gammas) * elog_theta).sum())
    score += float((gammaln(gammas) - gammaln(alpha)).sum())
    score += float((gammaln(alpha * k) - gammaln(gammas.sum(axis=1))).sum())
    score += float(((eta - lam) * elog_beta).sum())
    score += float((gammaln(lam) - gammaln(eta)).sum())
    score += float((gammaln(eta * v) - gammaln(lam.sum(axis=1))).sum())
    return score


def topic_top_words(model: TopicModel, k: int, n: int) -> list[str]:
    """The n most probable terms of topic k, ties broken lexicographically."""
    if not 0 <= k < model.n_topics:
        raise BadTopicIndex(f"topic {k} outside 0..{model.n_topics - 1}")
    row = model.topic_term_probs()[k]
    terms = sorted(model.vocab, key=lambda t: (-row[model.vocab[t]], t))
    return terms[:n]


# ------------------------------------------------------------ persistence


_MAGIC = b"RSPANLDA"
_VERSION = 1


def save_model(model: TopicModel, path: str | Path) -> None:
    """Versioned binary dump: header, config, vocab, then row-major lambda."""
    cfg = {f.name: getattr(model.config, f.name) for f in fields(LdaConfig)}
    cfg_blob = json.dumps(cfg, sort_keys=True).encode("utf-8")
    terms = sorted(model.vocab, key=model.vocab.get)
    vocab_blob = json.dumps(terms).encode("utf-8")
    lam_blob = np.ascontiguousarray(model.lam, dtype="<f8").tobytes()
    k, v = model.lam.shape
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<IIIQ", _VERSION, k, v, model.updates_seen))
        fh.write(struct.pack("<I", len(cfg_blob)))
        fh.write(cfg_blob)
        fh.write(struct.pack("<I", len(vocab_blob)))
        fh.write(vocab_blob)
        fh.write(lam_blob)


def load_model(path: str | Path) -> TopicModel:
    with open(path, "rb") as fh:
        magic = fh.read(len(_MAGIC))
        if magic != _MAGIC:
            raise ModelFormatError(f"{path}: not a topic-model file")
        version, k, v, updates = struct.unpack("<IIIQ", fh.read(20))
        if version != _VERSION:
            raise ModelFormatError(f"{path}: unsupported version {version}")
        (cfg_len,) = struct.unpack("<I", fh.read(4))
        cfg = json.loads(fh.read(cfg_len).decode("utf-8"))
        (vocab_len,) = struct.unpack("<I", fh.read(4))
        terms = json.loads(fh.read(vocab_len).decode("utf-8"))
        lam = np.frombuffer(fh.read(k * v * 8), dtype="<f8").reshape(k, v).copy()
    return TopicModel(vocab={t: i for i, t in enumerate(terms)},
                      lam=lam, config=LdaConfig(**cfg), updates_seen=updates)
