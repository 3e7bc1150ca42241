"""Classical presentation of quantum states on ray space.

A finitely supported probability measure on the rays of C^d reduces to a
density operator by ``R(mu) = sum_i w_i P_i``; every effect ``E`` becomes
the fuzzy function ``f_E(P) = tr[P E]`` on rays, and
``tr[R(mu) E] = sum_i w_i f_E(P_i)``.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from .errors import DimensionMismatch, ValidationError
from .linalg import as_rng, operator_norm
from .states import Effect, Projection, State

WEIGHT_TOL = 1e-12


class RayPoint:
    """A point of ray space, stored as a unit vector with a fixed global phase."""

    __slots__ = ("vector",)

    def __init__(self, vector):
        v = np.array(vector, dtype=complex).ravel()
        nrm = np.linalg.norm(v)
        if v.size < 1 or nrm == 0 or not np.all(np.isfinite(v)):
            raise ValidationError("ray needs a finite non-zero vector")
        v = v / nrm
        k = int(np.argmax(np.abs(v)))
        v = v * (abs(v[k]) / v[k])
        v.setflags(write=False)
        object.__setattr__(self, "vector", v)

    def __setattr__(self, name, value):
        raise AttributeError("RayPoint is immutable")

    @classmethod
    def from_projection(cls, p):
        p = p if isinstance(p, Projection) else Projection(np.asarray(p))
        if p.rank() != 1:
            raise ValidationError("ray points are rank-1 projections")
        vals, vecs = np.linalg.eigh(p.op)
        return cls(vecs[:, -1])

    @property
    def dim(self):
        return self.vector.size

    @property
    def projector(self):
        return np.outer(self.vector, self.vector.conj())

    def projection(self):
        return Projection(self.projector)

    def __repr__(self):
        return f"RayPoint({np.array2string(self.vector, precision=4)})"


class ClassicalMeasure:
    """Finitely supported probability measure on ray space."""

    def __init__(self, atoms):
        atoms = [(p if isinstance(p, RayPoint) else RayPoint(p), float(w)) for p, w in atoms]
        if not atoms:
            raise ValidationError("measure needs at least one atom")
        dim = atoms[0][0].dim
        if any(p.dim != dim for p, _ in atoms):
            raise DimensionMismatch("all atoms must live in one dimension")
        w = np.array([w for _, w in atoms])
        if np.any(w < 0):
            raise ValidationError("atom weights must be non-negative")
        if abs(w.sum() - 1.0) > WEIGHT_TOL:
            raise ValidationError(f"atom weights sum to {w.sum():.15g}, expected 1")
        self.rays = tuple(p for p, _ in atoms)
        self.weights = w
        self.weights.setflags(write=False)

    @classmethod
    def point_mass(cls, ray):
        return cls([(ray, 1.0)])

    @property
    def dim(self):
        return self.rays[0].dim

    @property
    def atoms(self):
        return list(zip(self.rays, self.weights.tolist()))

    def vectors(self):
        return np.stack([p.vector for p in self.rays])

    def mix(self, other, lam):
        """The convex combination ``lam * self + (1 - lam) * other``."""
        if not 0.0 <= lam <= 1.0:
            raise ValidationError("mixing weight must be in [0, 1]")
        return ClassicalMeasure(
            [(p, lam * w) for p, w in self.atoms] + [(p, (1 - lam) * w) for p, w in other.atoms]
        )

    def __len__(self):
        return len(self.rays)


@dataclass(frozen=True)
class ClassicalEffectFn:
    """The fuzzy set function ``P -> tr[P E]`` of a quantum effect."""

    effect: Effect

    def __call__(self, ray):
        return classical_effect_eval(self, ray)

    def values(self, vectors):
        """Evaluate on a stack of unit vectors (rows)."""
        v = np.asarray(vectors, dtype=complex)
        return np.clip(np.real(np.einsum("ki,ij,kj->k", v.conj(), self.effect.op, v)), 0.0, 1.0)


class MonteCarloCheck(NamedTuple):
    mc_estimate: float
    exact: float
    std_error: float


class RayGeometry(NamedTuple):
    overlap: float
    opnorm_dist: float
    identity_residual: float


def sample_haar_rays(dim, n, rng):
    """``n`` unitarily invariant random unit vectors (rows), from complex Gaussians."""
    if dim < 2:
        raise ValidationError("ray space needs dim >= 2")
    rng = as_rng(rng)
    z = rng.normal(size=(n, dim)) + 1j * rng.normal(size=(n, dim))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def sample_haar_ray(dim, rng):
    return RayPoint(sample_haar_rays(dim, 1, rng)[0])


def mb_reduce(mu):
    """Barycentre ``sum_i w_i P_i`` of a measure, as a :class:`State`."""
    v = mu.vectors()
    rho = np.einsum("k,ki,kj->ij", mu.weights, v, v.conj())
    return State(rho)


def classical_effect_eval(f, p):
    if f.effect.dim != p.dim:
        raise DimensionMismatch(f"effect dim {f.effect.dim} vs ray dim {p.dim}")
    v = p.vector
    return float(np.clip(np.real(np.vdot(v, f.effect.op @ v)), 0.0, 1.0))


def mb_consistency_mc(mu, e, n_samples, rng):
    """Monte Carlo estimate of ``int f_E d mu`` against the exact ``tr[R(mu) E]``.

    Atoms are drawn by weight; the estimate is the count-weighted mean of
    ``f_E`` over the atoms, so a point mass reproduces its value exactly.
    """
    if n_samples < 1:
        raise ValidationError("n_samples must be >= 1")
    if e.dim != mu.dim:
        raise DimensionMismatch(f"effect dim {e.dim} vs measure dim {mu.dim}")
    rng = as_rng(rng)
    f = ClassicalEffectFn(e).values(mu.vectors())
    idx = _kernels.sample_inverse_cdf(mu.weights, rng.random(n_samples))
    freq = np.bincount(idx, minlength=len(mu)) / n_samples
    mc = float(freq @ f)
    var = float(freq @ (f - mc) ** 2)
    exact = float(np.real(np.trace(mb_reduce(mu).op @ e.op)))
    return MonteCarloCheck(mc, exact, float(np.sqrt(var / n_samples)))


def ray_overlap_geometry(p, q):
    """Overlap ``tr[P Q]`` and operator-norm distance of two rays.

    The residual measures ``| ||P - Q||^2 - (1 - tr[P Q]) |``, which should
    vanish identically.
    """
    if p.dim != q.dim:
        raise DimensionMismatch(f"ray dims {p.dim} vs {q.dim}")
    P, Q = p.projector, q.projector
    overlap = float(np.real(np.trace(P @ Q)))
    dist = operator_norm(P - Q)
    return RayGeometry(overlap, dist, abs(dist**2 - (1.0 - overlap)))


def random_measure(dim, n_atoms, rng):
    rng = as_rng(rng)
    rays = sample_haar_rays(dim, n_atoms, rng)
    w = rng.dirichlet(np.ones(n_atoms))
    w[-1] = 1.0 - w[:-1].sum()
    return ClassicalMeasure(zip(rays, w))
