"""Retrieval metrics and the bootstrap paired significance test.

Metrics are micro-averaged by default: hit, gold, and retrieved counts
are summed over citances before the ratios are taken. Recall@k is hits
over total gold size, precision@k is hits over total retrieved (the
actual retrieved count, which can fall below k when few candidates
survive filtering), F1 the harmonic mean. A macro mode that averages
per-citance metrics sits behind a flag.

The significance test resamples citances with replacement, scores both
systems on the same resample, and runs a paired two-sided t-test over
the per-resample metric differences. Resample i draws its indices from
a generator seeded with seed + i, which makes runs reproducible and
parallelizable.
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import RefspanError, ConfigError


class MissingGold(RefspanError):
    """A ranked list names a citance absent from the gold map."""


@dataclass(frozen=True)
class EvalResult:
    recall_at_k: float
    precision_at_k: float
    f1: float
    n_citances: int
    n_gold: int
    n_correct: int


@dataclass(frozen=True)
class BootstrapResult:
    mean_diff: float
    t_statistic: float
    p_value: float
    n_resamples: int
    degenerate: bool = False


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def evaluate(
    runs: Sequence, gold: Mapping[str, frozenset[int] | set[int]],
    average: str = "micro",
) -> EvalResult:
    """Score ranked lists against gold sentence ids.

    Citances whose gold set is empty are excluded everywhere. Raises
    MissingGold when a run's citance has no gold entry at all.
    """
    if average not in ("micro", "macro"):
        raise ConfigError(f"average must be 'micro' or 'macro', not {average!r}")
    n_correct = n_gold = n_retrieved = n_citances = 0
    per_p, per_r, per_f = [], [], []
    for run in runs:
        if run.citance_id not in gold:
            raise MissingGold(f"no gold annotation for citance {run.citance_id!r}")
        g = gold[run.citance_id]
        if not g:
            continue
        sids = [sid for sid, _ in run.ranked]
        hits = len(set(sids) & set(g))
        n_correct += hits
        n_gold += len(g)
        n_retrieved += len(sids)
        n_citances += 1
        p = hits / len(sids) if sids else 0.0
        r = hits / len(g)
        per_p.append(p)
        per_r.append(r)
        per_f.append(_f1(p, r))
    if average == "micro":
        precision = n_correct / n_retrieved if n_retrieved else 0.0
        recall = n_correct / n_gold if n_gold else 0.0
        f1 = _f1(precision, recall)
    else:
        precision = sum(per_p) / n_citances if n_citances else 0.0
        recall = sum(per_r) / n_citances if n_citances else 0.0
        f1 = sum(per_f) / n_citances if n_citances else 0.0
    return EvalResult(recall_at_k=recall, precision_at_k=precision, f1=f1,
                      n_citances=n_citances, n_gold=n_gold, n_correct=n_correct)


def _stat_arrays(
    per_citance: Sequence[tuple], default_retrieved: int = 3
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(hits, gold_size[, retrieved]) tuples to three aligned arrays."""
    hits = np.array([t[0] for t in per_citance], dtype=np.float64)
    gold = np.array([t[1] for t in per_citance], dtype=np.float64)
    ret = np.array([t[2] if len(t) > 2 else default_retrieved for t in per_citance],
                   dtype=np.float64)
    return hits, gold, ret


def _micro_f1(hits, gold, ret, idx) -> float:
    h = hits[idx].sum()
    g = gold[idx].sum()
    r = ret[idx].sum()
    precision = h / r if r else 0.0
    recall = h / g if g else 0.0
    return _f1(precision, recall)


def bootstrap_paired_test(
    per_citance_a: Sequence[tuple],
    per_citance_b: Sequence[tuple],
    n: int = 10000,
    seed: int = 0,
) -> BootstrapResult:
    """Paired bootstrap t-test over per-citance (hits, gold[, retrieved]).

    Both systems are re-scored on identical resamples so only their
    difference matters. When every resample difference is identical the
    t statistic is undefined; the result is flagged degenerate with
    p = 1 for zero difference and p = 0 otherwise.
    """
    if len(per_citance_a) != len(per_citance_b):
        raise ConfigError("per-citance lists must align (same length, same order)")
    if not per_citance_a:
        raise ConfigError("nothing to resample")
    hits_a, gold_a, ret_a = _stat_arrays(per_citance_a)
    hits_b, gold_b, ret_b = _stat_arrays(per_citance_b)
    m = len(per_citance_a)
    diffs = np.empty(n)
    for i in range(n):
        idx = np.random.default_rng(seed + i).integers(0, m, size=m)
        diffs[i] = (_micro_f1(hits_a, gold_a, ret_a, idx)
                    - _micro_f1(hits_b, gold_b, ret_b, idx))
    mean_diff = float(diffs.mean())
    sd = float(diffs.std(ddof=1))
    if sd == 0.0:
        if mean_diff == 0.0:
            return BootstrapResult(0.0, 0.0, 1.0, n, degenerate=True)
        t_stat = math.copysign(math.inf, mean_diff)
        return BootstrapResult(mean_diff, t_stat, 0.0, n, degenerate=True)
    t_stat = mean_diff / (sd / math.sqrt(n))
    p = 2.0 * float(stats.t.sf(abs(t_stat), df=n - 1))
    return BootstrapResult(mean_diff, float(t_stat), min(1.0, p), n)


def adjust_annotator(
    selections: Mapping[str, frozenset[int] | set[int]],
    title_sid: int,
    threshold: int = 10,
) -> dict[str, frozenset[int]]:
    """Replace any selection larger than threshold with the title alone."""
    out = {}
    for cid, sids in selections.items():
        if len(sids) > threshold:
            out[cid] = frozenset({title_sid})
        else:
            out[cid] = frozenset(sids)
    return out


def paired_stats(
    rankings: Mapping[str, Sequence[int]],
    gold: Mapping[str, frozenset[int] | set[int]],
) -> list[tuple[int, int, int]]:
    """Per-citance (hits, gold_size, retrieved) rows, citance_id order sorted.

    Skips citances with empty gold, mirroring evaluate(). Input maps
    citance_id to the retrieved sid list.
    """
    out = []
    for cid in sorted(rankings):
        if cid not in gold:
            raise MissingGold(f"no gold annotation for citance {cid!r}")
        g = gold[cid]
        if not g:
            continue
        sids = list(rankings[cid])
        out.append((len(set(sids) & set(g)), len(g), len(sids)))
    return out


TSV_HEADER = "config\tR@3\tP@3\tF1"


def tsv_row(config_string: str, result: EvalResult) -> str:
    """One result row in the percentage table format."""
    return (f"{config_string}\t{100 * result.recall_at_k:.2f}"
            f"\t{100 * result.precision_at_k:.2f}\t{100 * result.f1:.2f}")


def json_report(config_string: str, result: EvalResult) -> dict:
    return {
        "config": config_string,
        "recall_at_k": result.recall_at_k,
        "precision_at_k": result.precision_at_k,
        "f1": result.f1,
        "n_citances": result.n_citances,
        "n_gold": result.n_gold,
        "n_correct": result.n_correct,
    }
