"""Pure numpy CPM kernels, vectorized across Monte-Carlo trials.

This is the fallback backend for :mod:`sitetwin.kernel`. The compiled
extension loops per trial; here the trial axis is vectorized instead, but the
per-(trial, relation) arithmetic runs in exactly the same order, so both
backends produce bit-identical floats.

Relation kinds are encoded 0=FS, 1=SS, 2=FF, 3=SF. Arrays come from
``ActivityNetwork.kernel_arrays``: relations sorted by topological position of
the successor (forward) and of the predecessor (backward), CSR-style offsets
per topological position.
"""

from __future__ import annotations

import numpy as np

BACKEND = "numpy"


def mcs_batch(
    topo: np.ndarray,
    in_off: np.ndarray,
    in_pred: np.ndarray,
    in_kind: np.ndarray,
    in_lag: np.ndarray,
    out_off: np.ndarray,
    out_succ: np.ndarray,
    out_kind: np.ndarray,
    out_lag: np.ndarray,
    durations: np.ndarray,
    eps: float,
):
    """Run one CPM forward/backward pass per trial.

    durations: (n_trials, n_activities) float64.
    Returns (finishes (n_trials,), criticality counts (n_activities,) int64).
    """
    if durations.shape[1] == 0:
        return np.zeros(durations.shape[0]), np.zeros(0, dtype=np.int64)
    es, ef, lf = _passes(
        topo, in_off, in_pred, in_kind, in_lag, out_off, out_succ, out_kind, out_lag, durations
    )
    finishes = ef.max(axis=1)
    crit = np.abs(lf - ef) <= eps
    return finishes, crit.sum(axis=0).astype(np.int64)


def cpm_full(
    topo: np.ndarray,
    in_off: np.ndarray,
    in_pred: np.ndarray,
    in_kind: np.ndarray,
    in_lag: np.ndarray,
    out_off: np.ndarray,
    out_succ: np.ndarray,
    out_kind: np.ndarray,
    out_lag: np.ndarray,
    durations: np.ndarray,
):
    """Single-trial pass returning full date arrays (ES, EF, LF, finish)."""
    es, ef, lf = _passes(
        topo,
        in_off,
        in_pred,
        in_kind,
        in_lag,
        out_off,
        out_succ,
        out_kind,
        out_lag,
        durations[None, :],
    )
    return es[0], ef[0], lf[0], float(ef[0].max()) if es.shape[1] else 0.0


def _passes(topo, in_off, in_pred, in_kind, in_lag, out_off, out_succ, out_kind, out_lag, durations):
    n_trials, n = durations.shape
    es = np.zeros((n_trials, n))
    ef = np.zeros((n_trials, n))
    for j in range(n):
        a = topo[j]
        d_a = durations[:, a]
        col = es[:, a]  # starts at 0: negative candidates clamp away
        for r in range(in_off[j], in_off[j + 1]):
            p = in_pred[r]
            k = in_kind[r]
            lag = in_lag[r]
            if k == 0:
                cand = ef[:, p] + lag
            elif k == 1:
                cand = es[:, p] + lag
            elif k == 2:
                cand = ef[:, p] + lag - d_a
            else:
                cand = es[:, p] + lag - d_a
            np.maximum(col, cand, out=col)
        ef[:, a] = col + d_a

    if n == 0:
        return es, ef, ef.copy()
    finish = ef.max(axis=1)
    lf = np.repeat(finish[:, None], n, axis=1)
    for j in range(n - 1, -1, -1):
        a = topo[j]
        col = lf[:, a]
        for r in range(out_off[j], out_off[j + 1]):
            s = out_succ[r]
            k = out_kind[r]
            lag = out_lag[r]
            if k == 0:
                cand = lf[:, s] - durations[:, s] - lag
            elif k == 1:
                cand = lf[:, s] - durations[:, s] - lag + durations[:, a]
            elif k == 2:
                cand = lf[:, s] - lag
            else:
                cand = lf[:, s] - lag + durations[:, a]
            np.minimum(col, cand, out=col)
    return es, ef, lf
