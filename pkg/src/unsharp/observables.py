"""Discrete POMs, smearings, marginals and qubit joint measurability."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionMismatch, ValidationError
from .linalg import bloch_operator, max_entry
from .states import Effect, Projection

NORMALIZATION_TOL = 1e-9
STOCHASTIC_TOL = 1e-12
BLOCH_TOL = 1e-12


class DiscretePOM:
    """Finite-outcome POM: ordered labels, one effect per label, summing to I."""

    def __init__(self, outcomes, effects):
        outcomes = tuple(outcomes)
        effects = tuple(e if isinstance(e, Effect) else Effect(e) for e in effects)
        if len(outcomes) != len(effects) or not outcomes:
            raise ValidationError("need one effect per outcome and at least one outcome")
        if len(set(outcomes)) != len(outcomes):
            raise ValidationError("outcome labels must be distinct")
        dim = effects[0].dim
        if any(e.dim != dim for e in effects):
            raise DimensionMismatch("all effects must share one dimension")
        dev = max_entry(sum(e.op for e in effects) - np.eye(dim))
        if dev > NORMALIZATION_TOL:
            raise ValidationError(f"effects do not sum to the identity (max deviation {dev:.3e})")
        self.outcomes = outcomes
        self.effects = effects
        self._index = {o: i for i, o in enumerate(outcomes)}

    @property
    def dim(self):
        return self.effects[0].dim

    def __len__(self):
        return len(self.outcomes)

    def effect(self, outcome):
        try:
            return self.effects[self._index[outcome]]
        except KeyError:
            raise ValidationError(f"unknown outcome {outcome!r}") from None

    def probabilities(self, state):
        if state.dim != self.dim:
            raise DimensionMismatch(f"state dim {state.dim} vs POM dim {self.dim}")
        p = np.array([np.real(np.trace(state.op @ e.op)) for e in self.effects])
        return np.clip(p, 0.0, 1.0)

    def is_sharp(self):
        return all(max_entry(e.op @ e.op - e.op) <= NORMALIZATION_TOL for e in self.effects)

    def __repr__(self):
        return f"DiscretePOM(dim={self.dim}, outcomes={list(self.outcomes)})"


def sharp_pom(vectors, outcomes=None):
    """Projection-valued POM from an orthonormal basis (columns of ``vectors``)."""
    v = np.asarray(vectors, dtype=complex)
    labels = outcomes if outcomes is not None else range(v.shape[1])
    return DiscretePOM(labels, [Projection.onto(v[:, k]) for k in range(v.shape[1])])


def spin_z_pom():
    return DiscretePOM(["+", "-"], [Projection(np.diag([1.0, 0.0])), Projection(np.diag([0.0, 1.0]))])


def unbiased_qubit_pom(a):
    """Two-outcome qubit POM ``{1/2 (I + a.sigma), 1/2 (I - a.sigma)}``."""
    a = bloch_vector(a)
    return DiscretePOM(["+", "-"], [Effect(bloch_operator(a)), Effect(bloch_operator(-a))])


def bloch_vector(a):
    a = np.asarray(a, dtype=float).ravel()
    if a.shape != (3,):
        raise ValidationError(f"Bloch vector needs 3 components, got {a.shape}")
    n = float(np.linalg.norm(a))
    if n > 1.0 + BLOCH_TOL:
        raise ValidationError(f"Bloch vector norm {n:.12g} exceeds 1")
    return a


def check_stochastic(m):
    m = np.asarray(m, dtype=float)
    if m.ndim != 2:
        raise ValidationError("smearing matrix must be 2-D")
    if np.any(m < 0):
        raise ValidationError("smearing matrix has negative entries")
    dev = np.max(np.abs(m.sum(axis=0) - 1.0))
    if dev > STOCHASTIC_TOL:
        raise ValidationError(f"smearing matrix columns must sum to 1 (deviation {dev:.3e})")
    return m


def smear_discrete(sharp, m, outcomes=None):
    """Classical post-processing of a sharp POM: ``E_i = sum_j M_ij P_j``.

    ``m`` is column-stochastic with one column per sharp outcome.  Output
    labels default to the sharp labels when the outcome counts agree.
    """
    m = check_stochastic(m)
    if m.shape[1] != len(sharp):
        raise ValidationError(f"smearing matrix has {m.shape[1]} columns for {len(sharp)} sharp outcomes")
    if not sharp.is_sharp():
        raise ValidationError("smear_discrete expects a projection-valued POM")
    if outcomes is None:
        outcomes = sharp.outcomes if m.shape[0] == len(sharp) else range(m.shape[0])
    projs = np.stack([e.op for e in sharp.effects])
    effects = np.einsum("ij,jkl->ikl", m, projs)
    return DiscretePOM(outcomes, effects)


@dataclass(frozen=True)
class GridPositionMeasure:
    """Position observable on ``n`` uniformly spaced points ``x0 + k*dx``.

    The Hilbert space is C^n with one basis vector per grid point, so the
    spectral projection of a point is a diagonal unit.
    """

    n: int
    dx: float = 1.0
    x0: float = 0.0

    def __post_init__(self):
        if self.n < 1 or self.dx <= 0:
            raise ValidationError("grid needs n >= 1 points and positive spacing")

    @property
    def points(self):
        return self.x0 + self.dx * np.arange(self.n)

    def projection(self, k):
        d = np.zeros(self.n)
        d[k] = 1.0
        return Projection(np.diag(d))

    def bin_projection(self, indices):
        d = np.zeros(self.n)
        d[list(indices)] = 1.0
        return Projection(np.diag(d))


def _check_kernel(kernel):
    w = np.asarray(kernel, dtype=float).ravel()
    if w.size % 2 != 1:
        raise ValidationError("kernel needs odd length (centred on offset 0)")
    if np.any(w < 0):
        raise ValidationError("kernel has negative weights")
    if abs(w.sum() - 1.0) > STOCHASTIC_TOL:
        raise ValidationError(f"kernel weights sum to {w.sum():.15g}, expected 1")
    return w


def smeared_indicator(n, kernel, indices, open_edges=False):
    """Convolution of the indicator of ``indices`` with ``kernel`` on ``n`` points.

    ``kernel[m + o]`` is the weight of offset ``o`` for ``o`` in ``-m..m``.
    Out-of-grid points are zero (zero padding).  With ``open_edges`` a bin
    touching the first or last grid point extends to infinity on that side.
    """
    w = _check_kernel(kernel)
    m = w.size // 2
    idx = sorted(int(i) for i in indices)
    if not idx or idx[0] < 0 or idx[-1] >= n:
        raise ValidationError("bin indices must be non-empty and inside the grid")
    if idx != list(range(idx[0], idx[-1] + 1)):
        raise ValidationError("bin must be a contiguous index range")
    ext = np.zeros(n + 2 * m)
    ext[m + idx[0] : m + idx[-1] + 1] = 1.0
    if open_edges:
        if idx[0] == 0:
            ext[:m] = 1.0
        if idx[-1] == n - 1:
            ext[n + m :] = 1.0
    # value at k = sum_o w[o] * chi(k - o)
    return np.array([np.dot(w[::-1], ext[k : k + 2 * m + 1]) for k in range(n)])


def smear_position(qm, kernel, bin, open_edges=False):
    """Smeared position effect for the contiguous bin ``bin`` of grid indices."""
    vals = smeared_indicator(qm.n, kernel, bin, open_edges=open_edges)
    return Effect(np.diag(vals))


def smeared_position_pom(qm, kernel, bins):
    """POM over a partition of the grid into contiguous bins.

    The outermost bins absorb kernel mass that would fall off the grid, which
    makes the effects sum to the identity exactly.
    """
    bins = [list(b) for b in bins]
    covered = sorted(i for b in bins for i in b)
    if covered != list(range(qm.n)):
        raise ValidationError("bins must partition the grid indices")
    effects = [smear_position(qm, kernel, b, open_edges=True) for b in bins]
    return DiscretePOM(range(len(bins)), effects)


def marginals(joint):
    """Marginal POMs of a POM whose labels are pairs ``(a, b)`` on a full grid."""
    try:
        pairs = [tuple(o) for o in joint.outcomes]
        if any(len(p) != 2 for p in pairs):
            raise TypeError
    except TypeError:
        raise ValidationError("joint POM outcomes must be pairs (a, b)") from None
    first = list(dict.fromkeys(p[0] for p in pairs))
    second = list(dict.fromkeys(p[1] for p in pairs))
    if len(first) * len(second) != len(pairs) or set(pairs) != {(a, b) for a in first for b in second}:
        raise ValidationError("joint outcome labels do not form a complete product grid")
    lookup = dict(zip(pairs, joint.effects))
    ea = [sum(lookup[(a, b)].op for b in second) for a in first]
    eb = [sum(lookup[(a, b)].op for a in first) for b in second]
    return DiscretePOM(first, ea), DiscretePOM(second, eb)


@dataclass(frozen=True)
class JointQubitResult:
    """Outcome of the unbiased-qubit compatibility test.

    ``criterion`` is ``|a + b| + |a - b|``; the pair is jointly measurable iff
    it is at most 2, in which case ``pom`` holds the joint observable.
    """

    feasible: bool
    criterion: float
    gamma: Optional[float] = None
    pom: Optional[DiscretePOM] = None


def construct_joint_qubit(a, b):
    """Build a joint POM for ``{1/2 (I +- a.sigma)}`` and ``{1/2 (I +- b.sigma)}``.

    Joint effects are ``G_jk = 1/4 [(1 + jk gamma) I + (j a + k b).sigma]``
    with ``gamma = (|a + b| - |a - b|) / 2``.  Their marginals are the two
    targets by construction and they are PSD exactly when
    ``|a + b| + |a - b| <= 2``.
    """
    a = bloch_vector(a)
    b = bloch_vector(b)
    s = float(np.linalg.norm(a + b))
    d = float(np.linalg.norm(a - b))
    crit = s + d
    if crit > 2.0 + BLOCH_TOL:
        return JointQubitResult(False, crit)
    gamma = 0.5 * (s - d)
    labels, effects = [], []
    for j in (1, -1):
        for k in (1, -1):
            labels.append(("+" if j > 0 else "-", "+" if k > 0 else "-"))
            effects.append(0.5 * bloch_operator(j * a + k * b, weight=1.0 + j * k * gamma))
    return JointQubitResult(True, crit, gamma, DiscretePOM(labels, effects))

