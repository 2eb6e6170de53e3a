"""Skip-gram word embeddings and word mover's distance.

Training is plain skip-gram with negative sampling: for each center
token a window radius is drawn uniformly from [1, window], every
in-window token becomes a positive pair, and negatives come from the
unigram distribution raised to 3/4. The learning rate decays linearly
from initial_lr down to initial_lr/100 over all center positions of
all epochs. Everything runs single-worker off one seeded generator, so
a fixed seed reproduces the table bit for bit.

Sentence distance is the exact word mover's distance: the minimum-cost
transportation plan between the two normalized bags of in-vocabulary
words, with Euclidean ground cost between embedding vectors. The LP is
solved exactly; sentences here are short enough that nothing cheaper
is needed.
"""

from __future__ import annotations

import json
import struct
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np
from scipy.optimize import linprog

from .errors import RefspanError, ConfigError, ModelFormatError
from .preprocess import TokenSequence


class EmptyCorpus(RefspanError):
    """Training corpus has no tokens."""


class VocabTooSmall(RefspanError):
    """Fewer than two terms survive min_count."""


class NoVocabOverlapWithTable(RefspanError):
    """A sentence has no tokens covered by the embedding table."""


@dataclass(frozen=True)
class EmbedConfig:
    """Hyperparameters for one embedding training run."""

    dim: int = 200
    epochs: int = 5
    negatives: int = 5
    min_count: int = 5
    window: int = 5
    initial_lr: float = 0.025
    seed: int = 0

    def __post_init__(self):
        if self.dim < 1 or self.epochs < 1 or self.negatives < 1 or self.min_count < 1:
            raise ConfigError("dim, epochs, negatives, and min_count must be >= 1")
        if self.window < 1:
            raise ConfigError("window must be >= 1")
        if self.initial_lr <= 0:
            raise ConfigError("initial_lr must be positive")


@dataclass
class EmbeddingTable:
    vocab: dict[str, int]
    vectors: np.ndarray                  # |V| x dim
    config: EmbedConfig | None = None
    epoch_losses: list[float] | None = None

    def __getitem__(self, term: str) -> np.ndarray:
        return self.vectors[self.vocab[term]]

    def __contains__(self, term: str) -> bool:
        return term in self.vocab


def train_sgns(corpus: Sequence[TokenSequence], config: EmbedConfig) -> EmbeddingTable:
    """Train skip-gram negative-sampling embeddings.

    The returned table carries the input vectors and a per-epoch mean
    loss estimate (negative log likelihood of the sampled pairs), which
    should fall as training progresses.
    """
    counts = Counter(t for sent in corpus for t in sent)
    if not counts:
        raise EmptyCorpus("no tokens in corpus")
    # frequency-descending vocab order, term as tie-break, for determinism
    kept = sorted((t for t, n in counts.items() if n >= config.min_count),
                  key=lambda t: (-counts[t], t))
    if len(kept) < 2:
        raise VocabTooSmall(
            f"{len(kept)} terms with count >= {config.min_count}; need at least 2")
    vocab = {t: i for i, t in enumerate(kept)}
    v = len(vocab)

    rng = np.random.default_rng(config.seed)
    w_in = (rng.random((v, config.dim)) - 0.5) / config.dim
    w_out = np.zeros((v, config.dim))

    noise = np.array([counts[t] for t in kept], dtype=np.float64) ** 0.75
    noise_cum = np.cumsum(noise / noise.sum())

    sent_ids = [np.array([vocab[t] for t in sent if t in vocab], dtype=np.int64)
                for sent in corpus]
    sent_ids = [s for s in sent_ids if len(s) > 0]
    total_positions = sum(len(s) for s in sent_ids) * config.epochs
    min_lr = config.initial_lr / 100.0
    processed = 0
    epoch_losses: list[float] = []

    for _ in range(config.epochs):
        loss_sum = 0.0
        loss_pairs = 0
        for ids in sent_ids:
            n = len(ids)
            radii = rng.integers(1, config.window + 1, size=n)
            for i in range(n):
                lr = config.initial_lr + (min_lr - config.initial_lr) * (
                    processed / total_positions)
                processed += 1
                lo = max(0, i - int(radii[i]))
                hi = min(n, i + int(radii[i]) + 1)
                center = ids[i]
                for j in range(lo, hi):
                    if j == i:
                        continue
                    pos = ids[j]
                    negs = np.searchsorted(
                        noise_cum, rng.random(config.negatives))
                    negs = negs[negs != pos]
                    targets = np.concatenate(([pos], negs))
                    labels = np.zeros(len(targets))
                    labels[0] = 1.0
                    h = w_in[center]
                    out = w_out[targets]                  # (1+neg, dim)
                    act = 1.0 / (1.0 + np.exp(-(out @ h)))
                    g = (labels - act) * lr
                    w_out[targets] += np.outer(g, h)
                    w_in[center] = h + g @ out
                    eps = 1e-10
                    loss_sum -= float(np.log(act[0] + eps)
                                      + np.log(1 - act[1:] + eps).sum())
                    loss_pairs += 1
        epoch_losses.append(loss_sum / max(1, loss_pairs))
    return EmbeddingTable(vocab=vocab, vectors=w_in, config=config,
                          epoch_losses=epoch_losses)


# ----------------------------------------------------------------- wmd


def _nbow(tokens: TokenSequence, table: EmbeddingTable) -> tuple[np.ndarray, np.ndarray]:
    """(indices, normalized counts) over in-vocabulary tokens."""
    counts = Counter(t for t in tokens if t in table.vocab)
    if not counts:
        raise NoVocabOverlapWithTable(
            "sentence shares no vocabulary with the embedding table")
    ids = np.array([table.vocab[t] for t in sorted(counts)], dtype=np.int64)
    w = np.array([counts[t] for t in sorted(counts)], dtype=np.float64)
    return ids, w / w.sum()


def wmd(a: TokenSequence, b: TokenSequence, table: EmbeddingTable) -> float:
    """Exact word mover's distance between two sentences.

    Identical normalized bags short-circuit to exactly 0. Raises
    NoVocabOverlapWithTable when either side is entirely out of
    vocabulary.
    """
    ids_a, wa = _nbow(a, table)
    ids_b, wb = _nbow(b, table)
    if len(ids_a) == len(ids_b) and (ids_a == ids_b).all() and np.allclose(wa, wb,
                                                                           atol=0):
        return 0.0
    va = table.vectors[ids_a]
    vb = table.vectors[ids_b]
    cost = np.sqrt(((va[:, None, :] - vb[None, :, :]) ** 2).sum(axis=2))
    n, m = len(wa), len(wb)
    # transportation LP: row sums = wa, column sums = wb
    a_eq = np.zeros((n + m, n * m))
    for i in range(n):
        a_eq[i, i * m:(i + 1) * m] = 1.0
    for j in range(m):
        a_eq[n + j, j::m] = 1.0
    res = linprog(cost.ravel(), A_eq=a_eq, b_eq=np.concatenate([wa, wb]),
                  bounds=(0, None), method="highs")
    if not res.success:
        raise RefspanError(f"transportation solve failed: {res.message}")
    return max(0.0, float(res.fun))


def wmd_similarity(a: TokenSequence, b: TokenSequence, table: EmbeddingTable) -> float:
    """1 / (1 + wmd); sentences with no usable vocabulary score 0."""
    try:
        return 1.0 / (1.0 + wmd(a, b, table))
    except NoVocabOverlapWithTable:
        return 0.0


def nearest_neighbors(
    table: EmbeddingTable, term: str, n: int = 10
) -> list[tuple[str, float]]:
    """The n vocabulary terms most cosine-similar to term (term excluded)."""
    if term not in table.vocab:
        raise NoVocabOverlapWithTable(f"term {term!r} not in embedding table")
    target = table[term]
    mat = table.vectors
    norms = np.linalg.norm(mat, axis=1) * np.linalg.norm(target)
    norms[norms == 0] = 1e-300
    sims = mat @ target / norms
    order = [(t, float(sims[i])) for t, i in table.vocab.items() if t != term]
    order.sort(key=lambda pair: (-pair[1], pair[0]))
    return order[:n]


# --------------------------------------------------------- persistence


_MAGIC = b"RSPANEMB"
_VERSION = 1


def save_text(table: EmbeddingTable, path: str | Path) -> None:
    """Common text format: `|V| dim` header, then term and coordinates."""
    terms = sorted(table.vocab, key=table.vocab.get)
    lines = [f"{len(terms)} {table.vectors.shape[1]}"]
    for t in terms:
        coords = " ".join(repr(float(x)) for x in table.vectors[table.vocab[t]])
        lines.append(f"{t} {coords}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_text(path: str | Path) -> EmbeddingTable:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ModelFormatError(f"{path}: empty embedding file")
    try:
        v, dim = map(int, lines[0].split())
    except ValueError:
        raise ModelFormatError(f"{path}: bad header {lines[0]!r}") from None
    if len(lines) - 1 != v:
        raise ModelFormatError(f"{path}: header says {v} rows, found {len(lines) - 1}")
    vocab: dict[str, int] = {}
    vectors = np.empty((v, dim))
    for i, line in enumerate(lines[1:]):
        parts = line.rstrip().split(" ")
        if len(parts) != dim + 1:
            raise ModelFormatError(f"{path}: row {i + 1} has {len(parts) - 1} coords")
        vocab[parts[0]] = i
        vectors[i] = [float(x) for x in parts[1:]]
    return EmbeddingTable(vocab=vocab, vectors=vectors)


def save_binary(table: EmbeddingTable, path: str | Path) -> None:
    cfg = None
    if table.config is not None:
        cfg = {f.name: getattr(table.config, f.name) for f in fields(EmbedConfig)}
    head = json.dumps({"config": cfg,
                       "terms": sorted(table.vocab, key=table.vocab.get)},
                      sort_keys=True).encode("utf-8")
    v, dim = table.vectors.shape
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<III", _VERSION, v, dim))
        fh.write(struct.pack("<I", len(head)))
        fh.write(head)
        fh.write(np.ascontiguousarray(table.vectors, dtype="<f8").tobytes())


def load_binary(path: str | Path) -> EmbeddingTable:
    with open(path, "rb") as fh:
        if fh.read(len(_MAGIC)) != _MAGIC:
            raise ModelFormatError(f"{path}: not an embedding file")
        version, v, dim = struct.unpack("<III", fh.read(12))
        if version != _VERSION:
            raise ModelFormatError(f"{path}: unsupported version {version}")
        (head_len,) = struct.unpack("<I", fh.read(4))
        head = json.loads(fh.read(head_len).decode("utf-8"))
        vectors = np.frombuffer(fh.read(v * dim * 8), dtype="<f8").reshape(v, dim).copy()
    config = EmbedConfig(**head["config"]) if head["config"] is not None else None
    return EmbeddingTable(vocab={t: i for i, t in enumerate(head["terms"])},
                          vectors=vectors, config=config)
