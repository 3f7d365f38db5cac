"""Evaluation of binary partitions against ground-truth clusters: Success
Ratio, binary V-measure and classification error."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PartitionMetrics:
    success_ratio: float
    v_measure: float
    error_count: int
    success_count: int
    aggregate_map: dict


def aggregate_clusters(true_labels, partition) -> dict:
    """Map each true cluster to the partition side holding its majority.

    Exact ties go to the smaller of the two partition sides; when the sides
    are equal in size, to side 1.  Side 1 is the +1 side of the partition.
    """
    true_labels = np.asarray(true_labels)
    part = np.asarray(partition)
    if true_labels.shape != part.shape:
        raise ValueError("label vectors must have equal length")
    if not np.all(np.isin(part, (-1, 1))):
        raise ValueError("partition entries must be -1 or +1")
    n1 = int(np.sum(part == 1))
    n2 = int(np.sum(part == -1))
    smaller = 2 if n2 < n1 else 1
    out = {}
    for cl in np.unique(true_labels):
        mask = true_labels == cl
        in1 = int(np.sum(part[mask] == 1))
        in2 = int(np.sum(part[mask] == -1))
        if in1 > in2:
            out[cl] = 1
        elif in2 > in1:
            out[cl] = 2
        else:
            out[cl] = smaller
    return out


def _aggregate_counts(true_labels, partition):
    agg = aggregate_clusters(true_labels, partition)
    true_labels = np.asarray(true_labels)
    part = np.asarray(partition)
    side = np.array([agg[cl] for cl in true_labels])
    c1 = side == 1
    c2 = side == 2
    p1 = part == 1
    p2 = part == -1
    counts = {
        (1, 1): int(np.sum(p1 & c1)), (1, 2): int(np.sum(p1 & c2)),
        (2, 1): int(np.sum(p2 & c1)), (2, 2): int(np.sum(p2 & c2)),
    }
    return agg, counts, side


def success_ratio(true_labels, partition) -> PartitionMetrics:
    """Success Ratio of a binary partition against true clusters.

    With aggregated clusters C1, C2 and partition sides P1, P2:
    error E is the smaller of the two matchings' misassignment counts,
    success S the smaller of each side's larger overlap, and SR = S/(S+E)
    (zero when S + E = 0).  SR is zero whenever the partition fails to
    isolate the majority of any cluster.
    """
    agg, c, _ = _aggregate_counts(true_labels, partition)
    error = min(c[(1, 1)] + c[(2, 2)], c[(1, 2)] + c[(2, 1)])
    success = min(max(c[(1, 1)], c[(1, 2)]), max(c[(2, 1)], c[(2, 2)]))
    total = success + error
    sr = success / total if total > 0 else 0.0
    return PartitionMetrics(
        success_ratio=float(sr),
        v_measure=binary_v_measure(true_labels, partition),
        error_count=int(error), success_count=int(success), aggregate_map=agg)


def _entropy(counts):
    counts = np.asarray(counts, dtype=float)
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts[counts > 0] / total
    return float(-(p * np.log(p)).sum())


def binary_v_measure(true_labels, partition) -> float:
    """V-measure of the binary partition against the aggregated clusters.

    Harmonic mean of homogeneity and completeness with natural-log
    entropies; zero when each side reproduces the overall class mix.
    """
    _, c, side = _aggregate_counts(true_labels, partition)
    n = len(side)
    if n == 0:
        return 0.0
    h_c = _entropy([c[(1, 1)] + c[(2, 1)], c[(1, 2)] + c[(2, 2)]])
    h_p = _entropy([c[(1, 1)] + c[(1, 2)], c[(2, 1)] + c[(2, 2)]])
    # conditional entropies from the joint counts
    h_c_given_p = 0.0
    h_p_given_c = 0.0
    for side_counts in ([c[(1, 1)], c[(1, 2)]], [c[(2, 1)], c[(2, 2)]]):
        weight = sum(side_counts) / n
        h_c_given_p += weight * _entropy(side_counts)
    for cls_counts in ([c[(1, 1)], c[(2, 1)]], [c[(1, 2)], c[(2, 2)]]):
        weight = sum(cls_counts) / n
        h_p_given_c += weight * _entropy(cls_counts)
    homogeneity = 1.0 if h_c == 0.0 else 1.0 - h_c_given_p / h_c
    completeness = 1.0 if h_p == 0.0 else 1.0 - h_p_given_c / h_p
    if homogeneity + completeness == 0.0:
        return 0.0
    return float(2.0 * homogeneity * completeness
                 / (homogeneity + completeness))


def classification_error(predicted, truth, exclude=(),
                         allow_flip: bool = True) -> float:
    """Fraction of mismatches over rows not in ``exclude``.

    ``allow_flip`` minimises over the global sign flip (clustering use,
    where the partition sign is arbitrary); disable it when labels anchor
    the sign (semi-supervised use).
    """
    predicted = np.asarray(predicted)
    truth = np.asarray(truth)
    if predicted.shape != truth.shape:
        raise ValueError("vectors must have equal length")
    mask = np.ones(len(truth), dtype=bool)
    mask[np.asarray(list(exclude), dtype=int)] = False
    if not np.any(mask):
        raise ValueError("evaluation set is empty")
    err = float(np.mean(predicted[mask] != truth[mask]))
    if allow_flip:
        err = min(err, float(np.mean(-predicted[mask] != truth[mask])))
    return err
