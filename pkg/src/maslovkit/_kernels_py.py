"""Pure numpy implementations of the hot kernels.

Same signatures and semantics as the compiled ``_kernels`` extension; used
when the extension is missing or ``MASLOVKIT_PURE_PYTHON`` is set.
"""

import numpy as np


def orthonormalize(frames):
    """Batched classical Gram-Schmidt with one reorthogonalization pass.

    ``frames`` has shape (N, d, k). Returns ``(Q, ratio)`` where Q has
    orthonormal columns per batch entry and ``ratio[i]`` is the smallest
    ratio, over columns, of the residual norm after projection to the
    original column norm (a cheap rank indicator: 0 means dependent).
    """
    a = np.array(frames, dtype=np.float64, copy=True)
    if a.ndim != 3:
        raise ValueError("frames must have shape (N, d, k)")
    n_batch, _, k = a.shape
    q = np.zeros_like(a)
    ratio = np.full(n_batch, np.inf)
    for j in range(k):
        v = a[:, :, j]
        norm0 = np.linalg.norm(v, axis=1)
        for _ in range(2):
            if j:
                coeff = np.einsum("ndk,nd->nk", q[:, :, :j], v)
                v = v - np.einsum("ndk,nk->nd", q[:, :, :j], coeff)
        norm1 = np.linalg.norm(v, axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(norm0 > 0, norm1 / norm0, 0.0)
            q[:, :, j] = np.where(norm1[:, None] > 0, v / norm1[:, None], 0.0)
        ratio = np.minimum(ratio, r)
    if k == 0:
        ratio[:] = 1.0
    return q, ratio


def wrapped_increments(phases):
    """Principal-branch increments of a closed sequence of angles.

    Entry i is ``phases[(i+1) % m] - phases[i]`` reduced to (-pi, pi].
    """
    p = np.asarray(phases, dtype=np.float64)
    d = np.roll(p, -1) - p
    d = np.mod(d + np.pi, 2.0 * np.pi) - np.pi
    d[d == -np.pi] = np.pi
    return d


def left_chain(mats):
    """Cumulative left products: out[0] = M0, out[i] = M_i @ out[i-1]."""
    m = np.asarray(mats, dtype=np.float64)
    out = np.empty_like(m)
    if len(m) == 0:
        return out
    out[0] = m[0]
    for i in range(1, len(m)):
        out[i] = m[i] @ out[i - 1]
    return out
