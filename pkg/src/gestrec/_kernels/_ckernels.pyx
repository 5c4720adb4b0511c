# Compiled hot kernels. Must stay bit-identical to _pykernels (the split
# score is computed from exact integer counts; the mask automaton is pure
# integer logic) so the two backends are interchangeable.
import numpy as np

cimport numpy as cnp

cnp.import_array()


def hysteresis_mask(cand, int on_count, int off_count):
    """Per-frame debounce automaton; see _pykernels.hysteresis_mask."""
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] c = np.ascontiguousarray(cand, dtype=np.uint8)
    cdef Py_ssize_t n = c.shape[0]
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] mask = np.zeros(n, dtype=np.uint8)
    cdef Py_ssize_t i, j
    cdef int state = 0
    cdef int count = 0

    for i in range(n):
        if state == 0:
            if c[i]:
                count += 1
                if count >= on_count:
                    for j in range(i - on_count + 1, i + 1):
                        mask[j] = 1
                    state = 1
                    count = 0
            else:
                count = 0
        else:
            mask[i] = 1
            if c[i]:
                count = 0
            else:
                count += 1
                if count >= off_count:
                    for j in range(i - off_count + 1, i + 1):
                        mask[j] = 0
                    state = 0
                    count = 0
    return mask


def gini_best_split(values, labels, int n_classes, int min_leaf):
    """Best Gini split of a sorted column; see _pykernels.gini_best_split."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] y = np.ascontiguousarray(labels, dtype=np.int64)
    cdef Py_ssize_t n = v.shape[0]
    if n < 2 * min_leaf:
        return -1, 0.0, np.inf

    cdef cnp.ndarray[cnp.int64_t, ndim=1] left = np.zeros(n_classes, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] total = np.zeros(n_classes, dtype=np.int64)
    cdef Py_ssize_t i
    cdef long long c
    for i in range(n):
        total[y[i]] += 1

    cdef long long sst = 0
    for c in range(n_classes):
        sst += total[c] * total[c]

    # move rows into the left side one at a time, keeping the sums of
    # squared class counts exact
    cdef long long ssl = 0, ssr = sst
    cdef long long lc, rc
    cdef double best_score = np.inf
    cdef Py_ssize_t best_pos = -1
    cdef double score, dnl, dnr
    cdef Py_ssize_t lo = min_leaf, hi = n - min_leaf

    for i in range(1, hi + 1):
        c = y[i - 1]
        lc = left[c]
        rc = total[c] - lc
        ssl += 2 * lc + 1
        ssr -= 2 * rc - 1
        left[c] = lc + 1
        if i < lo:
            continue
        if not v[i] > v[i - 1]:
            continue
        dnl = <double> i
        dnr = <double> (n - i)
        score = (dnl - ssl / dnl) + (dnr - ssr / dnr)
        if score < best_score:
            best_score = score
            best_pos = i

    if best_pos < 0:
        return -1, 0.0, np.inf
    return int(best_pos), float((v[best_pos - 1] + v[best_pos]) / 2.0), float(best_score)
