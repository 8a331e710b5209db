"""Pure-Python (numpy) fallback for the compiled calibration kernels.

Same contract and accumulation order as _calkernel.pyx so both backends
return bitwise-identical results; selected at import when the extension is
missing or VERIFY_PURE_PYTHON is set.
"""

from __future__ import annotations

import numpy as np


def bin_stats(conf: np.ndarray, correct: np.ndarray, bins: int):
    idx = (conf * bins).astype(np.int64)
    np.minimum(idx, bins - 1, out=idx)
    counts = np.bincount(idx, minlength=bins).astype(np.int64)
    conf_sum = np.bincount(idx, weights=conf, minlength=bins)
    acc_sum = np.bincount(idx, weights=correct, minlength=bins)
    return counts, conf_sum, acc_sum


def grid_scores(
    intrinsic: np.ndarray,
    external: np.ndarray,
    coherence: np.ndarray,
    correct: np.ndarray,
    m: int,
    bins: int,
    tau: float,
):
    n = intrinsic.shape[0]
    npoints = (m + 1) * (m + 2) // 2
    ece = np.empty(npoints, dtype=np.float64)
    acc = np.empty(npoints, dtype=np.float64)
    correct_bool = correct != 0.0
    p = 0
    for i in range(m + 1):
        a = i / m
        for j in range(m - i + 1):
            b = j / m
            g = (m - i - j) / m
            conf = a * intrinsic + b * external + g * coherence
            np.clip(conf, 0.0, 1.0, out=conf)
            _, conf_sum, acc_sum = bin_stats(conf, correct, bins)
            diff = np.abs(conf_sum - acc_sum)
            # sequential reduction matches the compiled kernel bit for bit
            total = 0.0
            for value in diff.tolist():
                total += value
            ece[p] = total / n
            acc[p] = np.count_nonzero((conf > tau) == correct_bool) / n
            p += 1
    return ece, acc
