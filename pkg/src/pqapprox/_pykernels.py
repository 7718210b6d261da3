"""Pure numpy versions of the hot loops (fallback when the extension is absent)."""

import numpy as np


def weight_matrix(logcoef, ppow, qpow, xs):
    """Raw basis weights, one row per x; no renormalization.

    ``logcoef[k]`` holds the log of every x-independent factor of weight k.
    ``ppow[s] = p**s`` and ``qpow[s] = q**s`` for ``s < n``.
    """
    logcoef = np.asarray(logcoef, dtype=np.float64)
    ppow = np.asarray(ppow, dtype=np.float64)
    qpow = np.asarray(qpow, dtype=np.float64)
    xs = np.asarray(xs, dtype=np.float64)
    n = logcoef.shape[0] - 1
    out = np.zeros((xs.shape[0], n + 1))
    out[xs == 0.0, 0] = 1.0
    out[xs == 1.0, n] = 1.0
    inner = (xs > 0.0) & (xs < 1.0)
    if not inner.any() or n == 0:
        if n == 0:
            out[:, 0] = 1.0
        return out
    xi = xs[inner]
    # tail[:, j] = sum_{s<j} log(p^s - q^s x)
    tail = np.zeros((xi.shape[0], n + 1))
    np.cumsum(np.log(ppow[None, :] - qpow[None, :] * xi[:, None]), axis=1, out=tail[:, 1:])
    k = np.arange(n + 1)
    logw = logcoef[None, :] + k[None, :] * np.log(xi)[:, None] + tail[:, n - k]
    out[inner] = np.exp(logw)
    return out


def sup_modulus(values, max_lag):
    """max |v[i+d] - v[i]| over 1 <= d <= max_lag."""
    v = np.asarray(values, dtype=np.float64)
    best = 0.0
    for lag in range(1, min(max_lag, v.shape[0] - 1) + 1):
        d = np.abs(v[lag:] - v[:-lag]).max()
        if d > best:
            best = float(d)
    return best
