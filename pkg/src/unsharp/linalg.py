"""Dense Hermitian linear algebra used by every other module.

Operators are plain complex ``numpy`` arrays of shape ``(d, d)``.  The
helpers here validate them and provide the spectral primitives (eigensystem,
square root, norms) with fixed tolerances.
"""

from typing import NamedTuple

import numpy as np

from . import _kernels
from .errors import DimensionMismatch, NotHermitianError, NotPositiveError, ValidationError

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = np.stack([SIGMA_X, SIGMA_Y, SIGMA_Z])


class EigenSystem(NamedTuple):
    """Eigenvalues in descending order; eigenvectors are the columns of ``vectors``."""

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self):
        return (self.vectors * self.values) @ self.vectors.conj().T


def as_operator(a):
    """Return ``a`` as a finite square complex array, or raise."""
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValidationError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError("operator has non-finite entries")
    return a


def hermiticity_deviation(a):
    a = np.asarray(a)
    return float(np.max(np.abs(a - a.conj().T)))


def as_hermitian(a, tol=HERMITIAN_TOL):
    """Validate Hermiticity within ``tol`` and return the symmetrised copy."""
    a = as_operator(a)
    dev = hermiticity_deviation(a)
    if dev > tol:
        raise NotHermitianError(dev, tol)
    return 0.5 * (a + a.conj().T)


def check_same_dim(a, b):
    if a.shape != b.shape:
        raise DimensionMismatch(f"dimension mismatch: {a.shape} vs {b.shape}")


def hermitian_eig(a):
    """Eigensystem of a Hermitian matrix, eigenvalues descending.

    Dimension 1 and 2 use the closed form; larger matrices go to LAPACK.
    """
    a = as_hermitian(a)
    d = a.shape[0]
    if d == 1:
        return EigenSystem(a.real.diagonal().copy(), np.ones((1, 1), dtype=complex))
    if d == 2:
        vals, vecs = _kernels.qubit_eigh_batch(a[None])
        return EigenSystem(vals[0], vecs[0])
    vals, vecs = np.linalg.eigh(a)
    return EigenSystem(vals[::-1].copy(), vecs[:, ::-1].copy())


def eigvalsh(a):
    return hermitian_eig(a).values


def clamp_spectrum(values, lo, hi, tol, what="operator"):
    """Clamp eigenvalues into ``[lo, hi]`` if they overshoot by at most ``tol``."""
    if values.size and values.min() < lo - tol:
        raise NotPositiveError(values.min() - lo, tol, what)
    if values.size and hi is not None and values.max() > hi + tol:
        raise ValidationError(f"{what} has eigenvalue {values.max():.6g} above {hi}")
    return np.clip(values, lo, hi)


def operator_sqrt(a):
    """Positive square root of a PSD matrix.

    Eigenvalues in ``[-1e-10, 0)`` are treated as zero; anything more negative
    raises :class:`NotPositiveError`.  Positive eigenvalues at round-off
    level are zeroed too, otherwise a projection's root picks up ~1e-8 noise.
    """
    es = hermitian_eig(a)
    vals = clamp_spectrum(es.values, 0.0, None, PSD_TOL)
    floor = 32 * np.finfo(float).eps * vals.size * max(1.0, float(vals.max(initial=0.0)))
    vals = np.where(vals <= floor, 0.0, vals)
    root = (es.vectors * np.sqrt(vals)) @ es.vectors.conj().T
    return 0.5 * (root + root.conj().T)


def trace_norm_distance(a, b):
    """Sum of singular values of ``a - b``."""
    a = as_operator(a)
    b = as_operator(b)
    check_same_dim(a, b)
    return float(np.sum(np.linalg.svd(a - b, compute_uv=False)))


def operator_norm(a):
    """Largest singular value."""
    a = as_operator(a)
    return float(np.linalg.svd(a, compute_uv=False)[0])


def max_entry(a):
    return float(np.max(np.abs(a)))


def projector(vec):
    """Rank-1 projection onto the span of ``vec`` (normalised here)."""
    v = np.asarray(vec, dtype=complex).ravel()
    nrm = np.linalg.norm(v)
    if nrm == 0:
        raise ValidationError("cannot project onto the zero vector")
    v = v / nrm
    return np.outer(v, v.conj())


def bloch_operator(vec, weight=1.0):
    """``0.5 * (weight * I + a . sigma)`` for a real 3-vector ``a``."""
    a = np.asarray(vec, dtype=float)
    return 0.5 * (weight * np.eye(2) + np.einsum("i,ijk->jk", a, PAULIS))


def random_hermitian(dim, rng, scale=1.0):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * 0.5 * (g + g.conj().T)


def random_unitary(dim, rng):
    """Haar-distributed unitary via QR with phase correction."""
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * ph


def as_rng(seed):
    """Accept a ``Generator`` or an integer seed; never touch global state."""
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None:
        raise ValidationError("an explicit seed or numpy Generator is required")
    return np.random.default_rng(int(seed))
