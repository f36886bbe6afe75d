"""NumPy implementations of the hot kernels.

Selected at import time when the compiled extension is unavailable (or when
``MORPHOFV_KERNELS=numpy`` forces it).  Semantics match ``_core`` exactly;
bit patterns may differ across backends, so reproducibility contracts hold
per backend, not across them.
"""

import numpy as np

NAME = "numpy"

_LOG_2PI = float(np.log(2.0 * np.pi))


def log_joint(x, means, variances, log_weights):
    """Per-point, per-component log(w_k * N(x_i; mu_k, diag sigma2_k)).

    x: (M, d), means/variances: (K, d), log_weights: (K,).  Returns (M, K).
    """
    m, d = x.shape
    k = means.shape[0]
    out = np.empty((m, k), dtype=np.float64)
    for j in range(k):
        diff = x - means[j]
        maha = np.sum(diff * diff / variances[j], axis=1)
        logdet = np.sum(np.log(variances[j]))
        out[:, j] = log_weights[j] - 0.5 * (d * _LOG_2PI + logdet + maha)
    return out


def fv_sums(x, q, means, variances):
    """Unscaled Fisher vector accumulators.

    U[k, j] = sum_i q[i, k] * z_ijk          with z = (x - mu_k) / sigma_k
    V[k, j] = sum_i q[i, k] * (z_ijk**2 - 1)

    Rows of ``x`` and ``q`` must already be in canonical order; the caller
    applies the 1/(N sqrt(w_k)) scalings.
    """
    k, d = means.shape
    u = np.empty((k, d), dtype=np.float64)
    v = np.empty((k, d), dtype=np.float64)
    sigma = np.sqrt(variances)
    for j in range(k):
        z = (x - means[j]) / sigma[j]
        u[j] = q[:, j] @ z
        v[j] = q[:, j] @ (z * z - 1.0)
    return u, v
