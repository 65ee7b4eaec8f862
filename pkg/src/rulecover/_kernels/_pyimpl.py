"""Pure-numpy kernel implementations, used when the extension is absent."""

import numpy as np


def leaf_label_env_counts(preds, y, e, n_env):
    n_rules = preds.shape[1]
    counts = np.zeros((n_rules, 2, n_env), dtype=np.int64)
    zero = preds == 0
    for a in (0, 1):
        label_mask = y == a
        for b in range(n_env):
            mask = label_mask & (e == b)
            if mask.any():
                counts[:, a, b] = zero[mask].sum(axis=0)
    return counts


def stratified_label_env_counts(strata, n_strata, y, e, n_env):
    idx = (strata * 2 + y) * n_env + e
    flat = np.bincount(idx, minlength=n_strata * 2 * n_env)
    return flat.reshape(n_strata, 2, n_env).astype(np.int64)
