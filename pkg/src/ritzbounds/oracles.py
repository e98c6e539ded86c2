"""Reference computations that share no code path with the Jacobi solver."""

import numpy as np


def _negative_pivots(h, g, shifts):
    """Number of eigenvalues of the pencil below each shift.

    ``h``, ``g`` have shape ``(P, n, n)`` and ``shifts`` shape ``(P, K)``.
    By Sylvester's law of inertia the count equals the number of negative
    pivots in the unpivoted ``LDL^H`` elimination of ``H - s G``; the product
    of those pivots is ``det(H - s G)``.
    """
    a = h[:, None, :, :] - shifts[:, :, None, None] * g[:, None, :, :]
    n = a.shape[-1]
    count = np.zeros(shifts.shape, dtype=int)
    tiny = np.finfo(float).tiny
    for j in range(n):
        d = a[..., j, j].real
        d = np.where(d == 0.0, -tiny, d)
        count += d < 0.0
        if j + 1 < n:
            col = a[..., j + 1:, j]
            row = a[..., j, j + 1:]
            a[..., j + 1:, j + 1:] -= col[..., :, None] * row[..., None, :] / d[..., None, None]
    return count


def pencil_eigenvalues_bisection(h, g, rtol=1e-14, max_iter=200):
    """Eigenvalues of ``H v = lam G v`` by bisection on the inertia count.

    Accepts a single pencil ``(n, n)`` or a stack ``(P, n, n)`` of pencils of
    one size; returns ascending eigenvalues with the matching leading shape.
    """
    h = np.asarray(h, dtype=complex)
    g = np.asarray(g, dtype=complex)
    single = h.ndim == 2
    if single:
        h, g = h[None], g[None]
    p, n = h.shape[0], h.shape[-1]
    target = np.broadcast_to(np.arange(n), (p, n))

    lo = -np.ones((p, 1))
    while True:
        c = _negative_pivots(h, g, lo)
        if not c.any():
            break
        lo = np.where(c > 0, 2.0 * lo, lo)
    hi = np.ones((p, 1))
    while True:
        c = _negative_pivots(h, g, hi)
        if (c == n).all():
            break
        hi = np.where(c < n, 2.0 * hi, hi)

    lo = np.repeat(lo, n, axis=1)
    hi = np.repeat(hi, n, axis=1)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        below = _negative_pivots(h, g, mid) > target
        hi = np.where(below, mid, hi)
        lo = np.where(below, lo, mid)
        if np.all(hi - lo <= rtol * np.maximum(1.0, np.abs(mid))):
            break
    out = 0.5 * (lo + hi)
    return out[0] if single else out


def random_hermitian(rng, n):
    """Entries uniform on ``[-1, 1] + i[-1, 1]``, then Hermitian part."""
    a = rng.uniform(-1.0, 1.0, (n, n)) + 1j * rng.uniform(-1.0, 1.0, (n, n))
    return 0.5 * (a + a.conj().T)


def random_pencil(rng, n):
    """Random Hermitian ``H`` and ``G + n I`` (positive definite)."""
    h = random_hermitian(rng, n)
    g = random_hermitian(rng, n) + n * np.eye(n)
    return h, g
