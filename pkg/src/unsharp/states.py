"""States, effects and projections, and the questions one can ask of them.

A :class:`State` is a density operator, an :class:`Effect` is an operator
between 0 and I, and a :class:`Projection` is an idempotent effect.  All
three are immutable wrappers around a read-only complex matrix.
"""

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatch, ValidationError
from .linalg import (
    PSD_TOL,
    as_hermitian,
    clamp_spectrum,
    hermitian_eig,
    max_entry,
    operator_norm,
    projector,
)

TRACE_TOL = 1e-10
IDEMPOTENT_TOL = 1e-9
DEGREE_TOL = 1e-12
EIGENSTATE_TOL = 1e-9
SHARP_TOL = 1e-9
SPECTRAL_GROUP_TOL = 1e-10


def _frozen(a):
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


class State:
    """Density operator: Hermitian, PSD and unit trace (all within 1e-10)."""

    __slots__ = ("op",)

    def __init__(self, op):
        op = as_hermitian(op)
        vals = hermitian_eig(op).values
        clamp_spectrum(vals, 0.0, None, PSD_TOL, "state")
        tr = np.trace(op).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValidationError(f"state trace is {tr:.12g}, expected 1")
        object.__setattr__(self, "op", _frozen(op))

    def __setattr__(self, name, value):
        raise AttributeError("State is immutable")

    @classmethod
    def pure(cls, vec):
        return cls(projector(vec))

    @classmethod
    def maximally_mixed(cls, dim):
        return cls(np.eye(dim) / dim)

    @property
    def dim(self):
        return self.op.shape[0]

    def purity(self):
        return float(np.real(np.trace(self.op @ self.op)))

    def __repr__(self):
        return f"State(dim={self.dim}, purity={self.purity():.4f})"


class Effect:
    """Operator ``E`` with ``0 <= E <= I``.

    Eigenvalues may overshoot ``[0, 1]`` by 1e-10; such spectra are clamped.
    """

    __slots__ = ("op",)

    def __init__(self, op):
        op = as_hermitian(op)
        es = hermitian_eig(op)
        clamped = clamp_spectrum(es.values, 0.0, 1.0, PSD_TOL, "effect")
        if np.any(clamped != es.values):
            op = (es.vectors * clamped) @ es.vectors.conj().T
            op = 0.5 * (op + op.conj().T)
        object.__setattr__(self, "op", _frozen(op))

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    @classmethod
    def identity(cls, dim):
        return cls(np.eye(dim))

    @classmethod
    def zero(cls, dim):
        return cls(np.zeros((dim, dim)))

    @property
    def dim(self):
        return self.op.shape[0]

    def eigenvalues(self):
        return hermitian_eig(self.op).values

    def __repr__(self):
        vals = ", ".join(f"{v:.4g}" for v in self.eigenvalues())
        return f"{type(self).__name__}(dim={self.dim}, spectrum=[{vals}])"


class Projection(Effect):
    """Idempotent effect, ``max|E^2 - E| <= 1e-9``."""

    __slots__ = ()

    def __init__(self, op):
        super().__init__(op)
        dev = max_entry(self.op @ self.op - self.op)
        if dev > IDEMPOTENT_TOL:
            raise ValidationError(f"not a projection: max|P^2 - P| = {dev:.3e}")

    @classmethod
    def onto(cls, vec):
        return cls(projector(vec))

    def rank(self):
        return int(round(np.trace(self.op).real))


def as_projection(e):
    """Promote an :class:`Effect` to a :class:`Projection` if it is idempotent."""
    return e if isinstance(e, Projection) else Projection(e.op)


def _check_dims(a, b):
    if a.dim != b.dim:
        raise DimensionMismatch(f"dimension mismatch: {a.dim} vs {b.dim}")


class Reality(enum.Enum):
    ACTUAL = "actual"
    ABSENT = "absent"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class PropertyStatus:
    status: Reality
    degree: float
    approximately_real: bool
    approximately_absent: bool


class SharpnessReport(NamedTuple):
    is_sharp: bool
    overlap_norm: float


def degree_of_reality(s, e):
    """Probability ``tr[rho E]``, clamped to ``[0, 1]``."""
    _check_dims(s, e)
    d = float(np.real(np.vdot(e.op.conj().T, s.op)))
    if d < -DEGREE_TOL or d > 1 + DEGREE_TOL:
        raise ValidationError(f"degree of reality {d!r} outside [0, 1]")
    return min(max(d, 0.0), 1.0)


def is_eigenstate(s, p):
    """True iff ``P rho = rho`` (hence also ``rho P = rho``)."""
    _check_dims(s, p)
    return max_entry(p.op @ s.op - s.op) <= EIGENSTATE_TOL


def classify_property(s, e, eps):
    """Classify ``e`` as actual, absent or indeterminate in ``s``.

    ``eps`` is the allowed shortfall from certainty; ``eps = 0`` demands a
    degree of exactly one (up to rounding).  The two "approximately" flags use
    strict inequalities against one half, so a degree of exactly 1/2 sets
    neither.
    """
    if not 0.0 <= eps < 0.5:
        raise ValidationError(f"eps must lie in [0, 1/2), got {eps}")
    d = degree_of_reality(s, e)
    if d >= 1.0 - eps - DEGREE_TOL:
        status = Reality.ACTUAL
    elif d <= eps + DEGREE_TOL:
        status = Reality.ABSENT
    else:
        status = Reality.INDETERMINATE
    return PropertyStatus(
        status=status,
        degree=d,
        approximately_real=d > 0.5 + DEGREE_TOL,
        approximately_absent=d < 0.5 - DEGREE_TOL,
    )


def is_regular(e):
    """Spectrum lies strictly on both sides of 1/2."""
    vals = e.eigenvalues()
    return bool(vals[0] > 0.5 + DEGREE_TOL and vals[-1] < 0.5 - DEGREE_TOL)


def complement(e):
    comp = np.eye(e.dim) - e.op
    return Projection(comp) if isinstance(e, Projection) else Effect(comp)


def sharpness_report(e):
    overlap = operator_norm(e.op - e.op @ e.op)
    return SharpnessReport(overlap <= SHARP_TOL, overlap)


def spectral_decompose_effect(e):
    """Write ``e`` as a sum of weighted, mutually orthogonal projections.

    Eigenvalues closer than 1e-10 are merged into one block.  Zero-weight
    blocks are dropped, so a projection decomposes as ``[(1.0, P)]``.
    Weights come out in descending order.
    """
    es = hermitian_eig(e.op)
    vals, vecs = es.values, es.vectors
    blocks = []
    start = 0
    for k in range(1, len(vals) + 1):
        if k == len(vals) or vals[start] - vals[k] > SPECTRAL_GROUP_TOL:
            w = float(np.clip(np.mean(vals[start:k]), 0.0, 1.0))
            if w > SPECTRAL_GROUP_TOL:
                v = vecs[:, start:k]
                blocks.append((w, Projection(v @ v.conj().T)))
            start = k
    return blocks


def qubit_nonorthogonal_decomposition(e, r):
    """Split a trace-one qubit effect along an arbitrary rank-1 projection.

    Returns ``(beta, r_prime)`` with ``e = beta * r + (1 - beta) * r_prime``
    and ``r_prime`` a rank-1 projection.  ``beta`` is the largest weight for
    which ``e - beta * r`` stays PSD: the root of ``det(e - beta r) = 0``,
    which for rank-1 ``r`` and ``tr e = 1`` is
    ``det(e) / <r|(I - e)|r>``.
    """
    if e.dim != 2 or r.dim != 2:
        raise ValidationError("decomposition is defined for qubit effects only")
    tr = np.trace(e.op).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValidationError(f"effect must have trace 1, got {tr:.12g}")
    r = as_projection(r)
    if r.rank() != 1:
        raise ValidationError("r must be a rank-1 projection")
    vals = e.eigenvalues()
    if vals[-1] <= PSD_TOL or vals[0] >= 1.0 - PSD_TOL:
        raise ValidationError("effect spectrum must lie inside (0, 1)")

    det = float(np.linalg.det(e.op).real)
    denom = float(np.real(np.trace(r.op @ (np.eye(2) - e.op))))
    beta = det / denom
    rest = (e.op - beta * r.op) / (1.0 - beta)
    # rest is PSD with zero determinant and unit trace; snap it onto its top ray
    es = hermitian_eig(rest)
    r_prime = Projection.onto(es.vectors[:, 0])
    return beta, r_prime
