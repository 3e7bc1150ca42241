"""Hot inner loops, compiled with numba when available.

Every kernel exists twice: a pure-numpy version and a numba ``@njit``
version with the same signature.  The public names in this module are bound
once, at import, to one of the two.  Set ``UNSHARP_DISABLE_NUMBA=1`` to force
the numpy path (also used automatically when numba cannot be imported).

Both variants are always importable through :data:`NUMPY_KERNELS` and
:data:`NUMBA_KERNELS` so tests and benchmarks can compare them directly.
"""

import math
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

DISABLE_ENV = "UNSHARP_DISABLE_NUMBA"


def _env_disabled():
    return os.environ.get(DISABLE_ENV, "").strip().lower() in {"1", "true", "yes", "on"}


# ---------------------------------------------------------------------------
# closed-form 2x2 Hermitian eigensystems


def _qubit_eigh_numpy(mats):
    mats = np.asarray(mats, dtype=np.complex128)
    a = mats[:, 0, 0].real
    d = mats[:, 1, 1].real
    b = mats[:, 0, 1]
    h = 0.5 * (a - d)
    mid = 0.5 * (a + d)
    r = np.sqrt(h * h + np.abs(b) ** 2)
    vals = np.stack([mid + r, mid - r], axis=1)

    # top eigenvector from the better-conditioned of the two null-space rows
    pos = h >= 0
    v0 = np.where(pos, h + r, b)
    v1 = np.where(pos, np.conj(b), -h + r)
    nrm = np.sqrt(np.abs(v0) ** 2 + np.abs(v1) ** 2)
    degenerate = nrm == 0.0
    nrm = np.where(degenerate, 1.0, nrm)
    v0 = np.where(degenerate, 1.0, v0 / nrm)
    v1 = np.where(degenerate, 0.0, v1 / nrm)

    vecs = np.empty(mats.shape, dtype=np.complex128)
    vecs[:, 0, 0] = v0
    vecs[:, 1, 0] = v1
    vecs[:, 0, 1] = -np.conj(v1)
    vecs[:, 1, 1] = np.conj(v0)
    return vals, vecs


def _qubit_eigh_loop(mats):
    m = mats.shape[0]
    vals = np.empty((m, 2))
    vecs = np.empty((m, 2, 2), dtype=np.complex128)
    for k in range(m):
        a = mats[k, 0, 0].real
        d = mats[k, 1, 1].real
        b = mats[k, 0, 1]
        h = 0.5 * (a - d)
        mid = 0.5 * (a + d)
        r = math.sqrt(h * h + b.real * b.real + b.imag * b.imag)
        vals[k, 0] = mid + r
        vals[k, 1] = mid - r
        if h >= 0:
            v0 = complex(h + r, 0.0)
            v1 = b.conjugate()
        else:
            v0 = b
            v1 = complex(r - h, 0.0)
        nrm = math.sqrt(abs(v0) ** 2 + abs(v1) ** 2)
        if nrm == 0.0:
            v0 = 1.0 + 0j
            v1 = 0.0 + 0j
        else:
            v0 = v0 / nrm
            v1 = v1 / nrm
        vecs[k, 0, 0] = v0
        vecs[k, 1, 0] = v1
        vecs[k, 0, 1] = -v1.conjugate()
        vecs[k, 1, 1] = v0.conjugate()
    return vals, vecs


# ---------------------------------------------------------------------------
# truncated coherent-state amplitudes <n|alpha>, n < n_fock


def _coherent_matrix_numpy(alphas, n_fock):
    alphas = np.asarray(alphas, dtype=np.complex128)
    out = np.empty((alphas.size, n_fock), dtype=np.complex128)
    out[:, 0] = np.exp(-0.5 * np.abs(alphas) ** 2)
    for n in range(1, n_fock):
        out[:, n] = out[:, n - 1] * alphas / np.sqrt(n)
    return out


def _coherent_matrix_loop(alphas, n_fock):
    m = alphas.shape[0]
    out = np.empty((m, n_fock), dtype=np.complex128)
    for k in range(m):
        al = alphas[k]
        c = complex(math.exp(-0.5 * (al.real * al.real + al.imag * al.imag)), 0.0)
        out[k, 0] = c
        for n in range(1, n_fock):
            c = c * al / math.sqrt(n)
            out[k, n] = c
    return out


# ---------------------------------------------------------------------------
# inverse-CDF categorical sampling


def _sample_inverse_cdf_numpy(probs, u):
    cdf = np.cumsum(np.asarray(probs, dtype=np.float64))
    idx = np.searchsorted(cdf, np.asarray(u, dtype=np.float64), side="right")
    return np.minimum(idx, cdf.size - 1).astype(np.int64)


def _sample_inverse_cdf_loop(probs, u):
    n = probs.shape[0]
    cdf = np.empty(n)
    acc = 0.0
    for i in range(n):
        acc += probs[i]
        cdf[i] = acc
    out = np.empty(u.shape[0], dtype=np.int64)
    for k in range(u.shape[0]):
        lo = 0
        hi = n
        x = u[k]
        while lo < hi:
            mid = (lo + hi) // 2
            if cdf[mid] <= x:
                lo = mid + 1
            else:
                hi = mid
        out[k] = lo if lo < n else n - 1
    return out


# ---------------------------------------------------------------------------
# CHSH: best (b0, b1) pair from a direction list, Alice optimised analytically
#   S(b0, b1) = |T (b0 + b1)| + |T (b0 - b1)|


def _chsh_pair_scan_numpy(T, dirs):
    T = np.asarray(T, dtype=np.float64)
    dirs = np.asarray(dirs, dtype=np.float64)
    Td = dirs @ T.T
    best = -1.0
    bi = bj = 0
    # row blocks keep memory at O(m) per step
    for i in range(dirs.shape[0]):
        s = np.linalg.norm(Td[i] + Td, axis=1) + np.linalg.norm(Td[i] - Td, axis=1)
        j = int(np.argmax(s))
        if s[j] > best:
            best, bi, bj = float(s[j]), i, j
    return best, bi, bj


def _chsh_pair_scan_loop(T, dirs):
    m = dirs.shape[0]
    Td = np.empty((m, 3))
    for i in range(m):
        for r in range(3):
            Td[i, r] = T[r, 0] * dirs[i, 0] + T[r, 1] * dirs[i, 1] + T[r, 2] * dirs[i, 2]
    best = -1.0
    bi = 0
    bj = 0
    for i in range(m):
        for j in range(m):
            sp = 0.0
            sm = 0.0
            for r in range(3):
                p = Td[i, r] + Td[j, r]
                q = Td[i, r] - Td[j, r]
                sp += p * p
                sm += q * q
            s = math.sqrt(sp) + math.sqrt(sm)
            if s > best:
                best = s
                bi = i
                bj = j
    return best, bi, bj


NUMPY_KERNELS = {
    "qubit_eigh_batch": _qubit_eigh_numpy,
    "coherent_matrix": _coherent_matrix_numpy,
    "sample_inverse_cdf": _sample_inverse_cdf_numpy,
    "chsh_pair_scan": _chsh_pair_scan_numpy,
}

if numba is not None:
    _jit = numba.njit(cache=True)
    NUMBA_KERNELS = {
        "qubit_eigh_batch": _jit(_qubit_eigh_loop),
        "coherent_matrix": _jit(_coherent_matrix_loop),
        "sample_inverse_cdf": _jit(_sample_inverse_cdf_loop),
        "chsh_pair_scan": _jit(_chsh_pair_scan_loop),
    }
else:  # pragma: no cover
    NUMBA_KERNELS = {}

BACKEND = "numba" if NUMBA_KERNELS and not _env_disabled() else "numpy"
_ACTIVE = NUMBA_KERNELS if BACKEND == "numba" else NUMPY_KERNELS


def qubit_eigh_batch(mats):
    """Eigen-decompose a stack of 2x2 Hermitian matrices in closed form.

    Returns ``(values, vectors)`` with values of shape ``(m, 2)`` in
    descending order and eigenvectors as the columns of ``vectors[k]``.
    """
    return _ACTIVE["qubit_eigh_batch"](np.ascontiguousarray(mats, dtype=np.complex128))


def coherent_matrix(alphas, n_fock):
    """Rows are Fock amplitudes of the coherent states ``|alpha>``, truncated (not renormalised)."""
    alphas = np.ascontiguousarray(np.ravel(alphas), dtype=np.complex128)
    return _ACTIVE["coherent_matrix"](alphas, int(n_fock))


def sample_inverse_cdf(probs, u):
    """Map uniforms ``u`` to category indices through the cumulative of ``probs``."""
    probs = np.ascontiguousarray(probs, dtype=np.float64)
    u = np.ascontiguousarray(np.atleast_1d(u), dtype=np.float64)
    return _ACTIVE["sample_inverse_cdf"](probs, u)


def chsh_pair_scan(T, dirs):
    T = np.ascontiguousarray(T, dtype=np.float64)
    dirs = np.ascontiguousarray(dirs, dtype=np.float64)
    best, i, j = _ACTIVE["chsh_pair_scan"](T, dirs)
    return float(best), int(i), int(j)
