"""Pure numpy implementations of the numerical kernels.

Same signatures and semantics as the compiled ``_ckernels`` module; used
when the extension is not built or when ``FUZZYLABEL_PURE_PYTHON`` is set.
"""
import numpy as np

_CHUNK_ELEMS = 1 << 22


def pairwise_sq_dists(A, B):
    """Squared Euclidean distances between rows of ``A`` (n, d) and ``B`` (m, d)."""
    A = np.ascontiguousarray(A, dtype=np.float64)
    B = np.ascontiguousarray(B, dtype=np.float64)
    n, m = A.shape[0], B.shape[0]
    out = np.empty((n, m), dtype=np.float64)
    # direct differencing keeps d(x, x) == 0 exactly (no expansion cancellation)
    step = max(1, _CHUNK_ELEMS // max(1, m * A.shape[1]))
    for i0 in range(0, n, step):
        diff = A[i0:i0 + step, None, :] - B[None, :, :]
        np.einsum("ijk,ijk->ij", diff, diff, out=out[i0:i0 + step])
    return out


def knn_indices(dist, k):
    """Column indices of the ``k`` smallest entries per row, ascending.

    Equal distances keep the lower column index first.
    """
    dist = np.asarray(dist, dtype=np.float64)
    if not 1 <= k <= dist.shape[1]:
        raise ValueError(f"k must be in [1, {dist.shape[1]}], got {k}")
    return np.argsort(dist, axis=1, kind="stable")[:, :k].astype(np.intp)


def fcm_memberships(sq_dist, m):
    """Fuzzy C-means membership update from squared point-center distances.

    A point that coincides with a center gets membership 1 for the first
    such center and 0 elsewhere.
    """
    sq_dist = np.asarray(sq_dist, dtype=np.float64)
    n, k = sq_dist.shape
    expo = 1.0 / (m - 1.0)
    out = np.zeros((n, k), dtype=np.float64)
    zero = sq_dist <= 0.0
    crisp = zero.any(axis=1)
    if crisp.any():
        out[np.flatnonzero(crisp), np.argmax(zero[crisp], axis=1)] = 1.0
    rest = ~crisp
    if rest.any():
        d = sq_dist[rest]
        ratio = (d.min(axis=1, keepdims=True) / d) ** expo
        out[rest] = ratio / ratio.sum(axis=1, keepdims=True)
    return out


def propagate(P, Y, alpha, tol, max_iter):
    """Iterate ``U <- alpha * P @ U + (1 - alpha) * Y`` starting from ``U = Y``.

    Stops when the max-norm change falls below ``tol`` or after ``max_iter``
    updates. Returns ``(U, iterations, last_change)``.
    """
    P = np.ascontiguousarray(P, dtype=np.float64)
    Y = np.ascontiguousarray(Y, dtype=np.float64)
    if Y.size == 0:
        return Y.copy(), 0, 0.0
    base = (1.0 - alpha) * Y
    U = Y.copy()
    delta = np.inf
    it = 0
    while it < max_iter:
        new = alpha * (P @ U) + base
        delta = float(np.max(np.abs(new - U)))
        U = new
        it += 1
        if delta < tol:
            break
    return U, it, delta
