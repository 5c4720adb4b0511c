"""Numpy fallback implementations of the hot kernels.

Semantics must stay bit-identical to the compiled versions in
``_ckernels.pyx``: the split scores are derived from exact integer class
counts, and the hysteresis automaton is pure integer logic, so both
backends can be cross-checked for equality on random inputs.
"""
import numpy as np


def hysteresis_mask(cand, on_count, off_count):
    """Debounce a candidate-motion bit sequence into a motion mask.

    State flips to 1 only after ``on_count`` consecutive candidate frames
    (the run is backdated to the first of them) and back to 0 only after
    ``off_count`` consecutive quiet frames (the run ends at the last
    candidate).  A trailing quiet streak shorter than ``off_count`` stays
    inside the run (in-progress tail).

    Implemented over candidate runs instead of frames; equivalent to the
    per-frame automaton because each run maps to a uniform mask value.
    """
    cand = np.ascontiguousarray(cand, dtype=np.uint8)
    n = cand.shape[0]
    mask = np.zeros(n, dtype=np.uint8)
    if n == 0:
        return mask

    # run-length encode: boundaries where the candidate bit changes
    edges = np.flatnonzero(np.diff(cand)) + 1
    starts = np.concatenate(([0], edges))
    ends = np.concatenate((edges, [n]))

    state = 0
    for s, e in zip(starts, ends):
        if cand[s]:
            if state == 0 and e - s >= on_count:
                state = 1
            if state == 1:
                mask[s:e] = 1
        else:
            if state == 1:
                if e - s >= off_count:
                    state = 0
                else:
                    mask[s:e] = 1
    return mask


def gini_best_split(values, labels, n_classes, min_leaf):
    """Best binary split of a column already sorted ascending.

    ``values``/``labels`` are the node rows ordered by the candidate
    feature.  Returns ``(left_size, threshold, score)`` where ``score`` is
    ``n * weighted_gini`` (same ordering as the weighted Gini impurity) or
    ``(-1, 0.0, inf)`` when no valid split exists.  Ties keep the smallest
    left size.
    """
    n = values.shape[0]
    if n < 2 * min_leaf:
        return -1, 0.0, np.inf

    onehot = np.zeros((n, n_classes), dtype=np.int64)
    onehot[np.arange(n), labels] = 1
    prefix = np.cumsum(onehot, axis=0)
    total = prefix[-1]

    sizes = np.arange(min_leaf, n - min_leaf + 1, dtype=np.int64)
    valid = values[sizes] > values[sizes - 1]
    if not valid.any():
        return -1, 0.0, np.inf

    left = prefix[sizes - 1]
    ssl = np.einsum("ij,ij->i", left, left).astype(np.float64)
    right = total[None, :] - left
    ssr = np.einsum("ij,ij->i", right, right).astype(np.float64)

    nl = sizes.astype(np.float64)
    nr = (n - sizes).astype(np.float64)
    score = (nl - ssl / nl) + (nr - ssr / nr)
    score[~valid] = np.inf

    best = int(np.argmin(score))
    pos = int(sizes[best])
    threshold = (values[pos - 1] + values[pos]) / 2.0
    return pos, float(threshold), float(score[best])
