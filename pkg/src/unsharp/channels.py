"""Lüders state updates, sampling and repeatability.

Only the (generalised) Lüders rule ``rho -> E^1/2 rho E^1/2 / tr[rho E]`` is
implemented.  Branches with probability at or below 1e-14 raise
:class:`~unsharp.errors.ZeroProbability` instead of returning a NaN state.
"""

from dataclasses import dataclass
from typing import Any

import numpy as np

from . import _kernels
from .errors import ValidationError, ZeroProbability
from .linalg import as_rng, operator_sqrt, random_unitary, trace_norm_distance
from .states import Effect, State, _check_dims, degree_of_reality

ZERO_PROB_TOL = 1e-14


@dataclass(frozen=True)
class MeasurementOutcomeRecord:
    outcome: Any
    probability: float
    post_state: State
    trace_distance: float


def _luders(s, root, effect_op, outcome):
    p = float(np.real(np.trace(s.op @ effect_op)))
    if p <= ZERO_PROB_TOL:
        raise ZeroProbability(p, outcome)
    post = root @ s.op @ root / p
    post = State(0.5 * (post + post.conj().T))
    return MeasurementOutcomeRecord(outcome, min(p, 1.0), post, trace_norm_distance(s.op, post.op))


def luders_sharp(s, p, outcome=None):
    """``rho -> P rho P / tr[rho P]`` for a projection ``P``."""
    _check_dims(s, p)
    return _luders(s, p.op, p.op, outcome)


def luders_general(s, e, outcome=None):
    """``rho -> E^1/2 rho E^1/2 / tr[rho E]``."""
    _check_dims(s, e)
    return _luders(s, operator_sqrt(e.op), e.op, outcome)


@dataclass(frozen=True)
class RobustnessProbe:
    p_before: float
    p_after: float
    trace_distance: float
    epsilon: float

    @property
    def ratio(self):
        """Disturbance per square root of the shortfall; 0 when ``epsilon == 0``."""
        return self.trace_distance / np.sqrt(self.epsilon) if self.epsilon > 0 else 0.0


def epr_robustness_probe(s, e):
    """Compare ``tr[rho E]`` before and after the Lüders update by ``E``."""
    rec = luders_general(s, e)
    return RobustnessProbe(
        p_before=rec.probability,
        p_after=degree_of_reality(rec.post_state, e),
        trace_distance=rec.trace_distance,
        epsilon=max(1.0 - rec.probability, 0.0),
    )


def near_eigenstate_pair(dim, eps, rng, n_mix=None):
    """Random (state, effect) with ``tr[rho E] = 1 - eps`` exactly.

    The effect has a random eigenbasis with top eigenvalue 1 (a projection
    half of the time).  The state mixes up to three pure states, each tilted
    away from the top eigenvector just enough to lose ``eps`` probability.
    Needs ``dim >= 2``.
    """
    if not 0.0 <= eps < 1.0:
        raise ValidationError("eps must lie in [0, 1)")
    rng = as_rng(rng)
    u = random_unitary(dim, rng)
    if rng.random() < 0.5:
        k = int(rng.integers(1, dim))
        vals = np.r_[np.ones(k), np.zeros(dim - k)]
    else:
        k = 1
        vals = np.r_[1.0, np.sort(rng.uniform(0.0, 0.8, size=dim - 1))[::-1]]
    e_op = (u * vals) @ u.conj().T
    top, rest = u[:, 0], u[:, k:]
    n_mix = int(rng.integers(1, 4)) if n_mix is None else n_mix
    weights = rng.dirichlet(np.ones(n_mix))
    rho = np.zeros((dim, dim), dtype=complex)
    for w in weights:
        # tilt towards a random direction outside the eigenvalue-1 subspace
        g = rest @ (rng.normal(size=dim - k) + 1j * rng.normal(size=dim - k))
        g /= np.linalg.norm(g)
        delta = eps / (1.0 - float(np.real(np.vdot(g, e_op @ g))))
        if delta > 1.0:
            g = u[:, -1]
            delta = eps / (1.0 - vals[-1])
            if delta > 1.0:
                raise ValidationError(f"eps={eps} unreachable for the sampled effect")
        psi = np.sqrt(1.0 - delta) * top + np.sqrt(delta) * np.exp(2j * np.pi * rng.random()) * g
        rho += w * np.outer(psi, psi.conj())
    return State(rho), Effect(e_op)


def sample_outcomes(s, pom, n, rng):
    """Draw ``n`` outcome indices by inverse-CDF sampling of ``tr[rho E_i]``."""
    rng = as_rng(rng)
    return _kernels.sample_inverse_cdf(pom.probabilities(s), rng.random(n))


def measure_and_update(s, pom, rng):
    """Sample one outcome and return its record with the Lüders post state.

    Consumes exactly one uniform draw from ``rng``, so repeated calls with one
    generator follow the same stream as :func:`sample_outcomes`.
    """
    rng = as_rng(rng)
    k = int(_kernels.sample_inverse_cdf(pom.probabilities(s), rng.random(1))[0])
    return luders_general(s, pom.effects[k], outcome=pom.outcomes[k])


def repeatability_score(s, pom, outcome):
    """Probability of seeing ``outcome`` again right after it was obtained."""
    e = pom.effect(outcome)
    rec = luders_general(s, e, outcome=outcome)
    return degree_of_reality(rec.post_state, e)
