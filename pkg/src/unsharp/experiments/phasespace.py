"""Covariant phase-space (Husimi) measurement in a truncated Fock space.

Conventions: hbar = 1, ``q = (a + a^dag)/sqrt 2``, ``p = (a - a^dag)/(i sqrt 2)``
and ``alpha = (q + i p)/sqrt 2``.  The vacuum has ``Var(q) = Var(p) = 1/2``
and a Husimi readout adds the same again, so readouts from a coherent state
scatter with unit variance per axis.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .. import _kernels
from ..errors import RemainderNotPositive, ValidationError
from ..channels import luders_general
from ..linalg import PSD_TOL, as_rng, hermitian_eig
from ..observables import DiscretePOM
from ..states import Effect, State

REMAINDER = "remainder"
READOUT_SIGMA = 1.0


@dataclass(frozen=True)
class FockSpace:
    """Number basis ``|0>, ..., |n_fock - 1>`` with ladder operators."""

    n_fock: int

    def __post_init__(self):
        if self.n_fock < 2:
            raise ValidationError("Fock truncation needs at least 2 levels")

    @cached_property
    def a(self):
        return np.diag(np.sqrt(np.arange(1, self.n_fock)), 1).astype(complex)

    @cached_property
    def adag(self):
        return self.a.conj().T

    @property
    def q(self):
        return (self.a + self.adag) / np.sqrt(2)

    @property
    def p(self):
        return (self.a - self.adag) / (1j * np.sqrt(2))

    @property
    def number(self):
        return np.diag(np.arange(self.n_fock)).astype(complex)

    def commutator_defect(self):
        """``max |[a, a^dag] - I|`` on the levels below the truncation edge."""
        c = self.a @ self.adag - self.adag @ self.a
        m = self.n_fock - 1
        return float(np.max(np.abs(c[:m, :m] - np.eye(m))))

    def coherent(self, alpha):
        """Truncated coherent state, renormalised, and the norm it lost."""
        c = _kernels.coherent_matrix(np.array([alpha]), self.n_fock)[0]
        nrm2 = float(np.real(np.vdot(c, c)))
        return c / np.sqrt(nrm2), 1.0 - nrm2


def alpha_of(q, p):
    return (np.asarray(q) + 1j * np.asarray(p)) / np.sqrt(2)


class HusimiPOM(DiscretePOM):
    """Cells of a square phase-space grid plus one remainder outcome.

    Cell ``(i, j)`` is centred at ``(q_i, p_j)`` and carries the effect
    ``dq dp / (2 pi) |alpha><alpha|``; the remainder ``I - sum(cells)``
    closes the POM.  Outcome labels are ``(i, j)`` index pairs followed by
    ``"remainder"``.  Cell effects are only materialised on demand.
    """

    def __init__(self, fock, half_width, dq, dp=None):
        dp = dq if dp is None else dp
        if half_width <= 0 or dq <= 0 or dp <= 0:
            raise ValidationError("grid half-width and cell sizes must be positive")
        nq = int(round(2 * half_width / dq))
        npp = int(round(2 * half_width / dp))
        if abs(nq * dq - 2 * half_width) > 1e-9 or abs(npp * dp - 2 * half_width) > 1e-9:
            raise ValidationError("cell sizes must tile [-L, L] exactly")
        self.fock = fock
        self.half_width = float(half_width)
        self.dq, self.dp = float(dq), float(dp)
        self.q_centers = -half_width + dq * (np.arange(nq) + 0.5)
        self.p_centers = -half_width + dp * (np.arange(npp) + 0.5)
        Q, P = np.meshgrid(self.q_centers, self.p_centers, indexing="ij")
        self.cell_q = Q.ravel()
        self.cell_p = P.ravel()
        self.weight = dq * dp / (2 * np.pi)
        self.amplitudes = _kernels.coherent_matrix(alpha_of(self.cell_q, self.cell_p), fock.n_fock)

        covered = self.weight * (self.amplitudes.T @ self.amplitudes.conj())
        rem = np.eye(fock.n_fock) - covered
        rem = 0.5 * (rem + rem.conj().T)
        vals = hermitian_eig(rem).values
        if vals[-1] < -PSD_TOL:
            raise RemainderNotPositive(-vals[-1])
        self.remainder = Effect(rem)
        self.remainder_norm = float(max(vals[0], 0.0))

        self.outcomes = tuple((i, j) for i in range(nq) for j in range(npp)) + (REMAINDER,)
        self._index = {o: k for k, o in enumerate(self.outcomes)}

    @property
    def dim(self):
        return self.fock.n_fock

    @property
    def n_cells(self):
        return self.cell_q.size

    @cached_property
    def effects(self):
        cells = tuple(Effect(self.cell_effect(k)) for k in range(self.n_cells))
        return cells + (self.remainder,)

    def cell_effect(self, k):
        c = self.amplitudes[k]
        return self.weight * np.outer(c, c.conj())

    def effect(self, outcome):
        k = self._index.get(outcome)
        if k is None:
            raise ValidationError(f"unknown outcome {outcome!r}")
        return self.remainder if outcome == REMAINDER else Effect(self.cell_effect(k))

    def probabilities(self, state):
        """Cell probabilities followed by the remainder probability."""
        rho = state.op if isinstance(state, State) else np.asarray(state)
        if rho.ndim == 1:
            cells = self.weight * np.abs(self.amplitudes.conj() @ rho) ** 2
            rem = float(np.real(np.vdot(rho, self.remainder.op @ rho)))
        else:
            cells = self.weight * np.real(
                np.einsum("ki,ij,kj->k", self.amplitudes.conj(), rho, self.amplitudes)
            )
            rem = float(np.real(np.trace(rho @ self.remainder.op)))
        return np.clip(np.r_[cells, rem], 0.0, 1.0)

    def readout_moments(self, state):
        """Means and variances of the ``(q, p)`` readout, conditioned on landing in a cell."""
        pr = self.probabilities(state)[:-1]
        pr = pr / pr.sum()
        mq, mp = pr @ self.cell_q, pr @ self.cell_p
        return {
            "mean_q": float(mq),
            "mean_p": float(mp),
            "var_q": float(pr @ (self.cell_q - mq) ** 2),
            "var_p": float(pr @ (self.cell_p - mp) ** 2),
            "outside": float(self.probabilities(state)[-1]),
        }

    def q_marginal(self, state):
        """Readout distribution over the ``q`` cell centres."""
        pr = self.probabilities(state)[:-1]
        return pr.reshape(self.q_centers.size, self.p_centers.size).sum(axis=1)

    def sample(self, state, n, rng):
        """``n`` readouts; rows landing in the remainder come back as NaN."""
        rng = as_rng(rng)
        idx = _kernels.sample_inverse_cdf(self.probabilities(state), rng.random(n))
        q = np.where(idx < self.n_cells, self.cell_q[np.minimum(idx, self.n_cells - 1)], np.nan)
        p = np.where(idx < self.n_cells, self.cell_p[np.minimum(idx, self.n_cells - 1)], np.nan)
        return q, p


def husimi_pom(fock, half_width=6.0, dq=0.25, dp=None):
    return HusimiPOM(fock, half_width, dq, dp)


@dataclass
class TrackRecord:
    """Readouts ``(t, q, p)`` and the truncation norm deficit of each collapse."""

    times: np.ndarray
    q: np.ndarray
    p: np.ndarray
    deficits: np.ndarray
    halted: bool = False
    params: dict = field(default_factory=dict)

    def __len__(self):
        return self.times.size

    def rows(self):
        return list(zip(self.times.tolist(), self.q.tolist(), self.p.tolist(), self.deficits.tolist()))

    def __eq__(self, other):
        return (
            isinstance(other, TrackRecord)
            and self.halted == other.halted
            and all(
                np.array_equal(getattr(self, f), getattr(other, f)) for f in ("times", "q", "p", "deficits")
            )
        )


def track_simulate(
    fock,
    alpha0,
    dynamics="none",
    omega=1.0,
    n_steps=50,
    dt=0.1,
    rng=None,
    pom=None,
    half_width=6.0,
    dq=0.25,
    update="coherent",
):
    """Simulate a sequence of coarse phase-space readouts with collapse.

    Each step draws a cell from the current state's Husimi probabilities,
    replaces the state by the coherent state at the cell centre, then evolves
    it for ``dt`` (``dynamics="harmonic"``: ``H = omega a^dag a``).  With
    ``update="luders"`` the post state comes from the Lüders rule on the cell
    effect instead; for these rank-1 cells both give the same ray.  Drawing
    the remainder outcome means the state left the grid: the record is
    returned as is with ``halted=True``.
    """
    if dynamics not in ("none", "harmonic"):
        raise ValidationError(f"unknown dynamics {dynamics!r}")
    if update not in ("coherent", "luders"):
        raise ValidationError(f"unknown update {update!r}")
    rng = as_rng(rng)
    pom = husimi_pom(fock, half_width, dq) if pom is None else pom
    phases = np.exp(-1j * omega * dt * np.arange(fock.n_fock)) if dynamics == "harmonic" else None

    psi, _ = fock.coherent(alpha0)
    times, qs, ps, deficits = [], [], [], []
    halted = False
    halted_step = None
    for step in range(n_steps):
        k = int(_kernels.sample_inverse_cdf(pom.probabilities(psi), rng.random(1))[0])
        if k >= pom.n_cells:
            halted, halted_step = True, step
            break
        q, p = pom.cell_q[k], pom.cell_p[k]
        if update == "coherent":
            psi, deficit = fock.coherent(complex(alpha_of(q, p)))
        else:
            c = pom.amplitudes[k]
            deficit = 1.0 - float(np.real(np.vdot(c, c)))
            rec = luders_general(State.pure(psi), Effect(pom.cell_effect(k)))
            psi = hermitian_eig(rec.post_state.op).vectors[:, 0]
        times.append(step * dt)
        qs.append(q)
        ps.append(p)
        deficits.append(deficit)
        if phases is not None:
            psi = phases * psi
    params = {
        "alpha0": [float(np.real(alpha0)), float(np.imag(alpha0))],
        "dynamics": dynamics,
        "omega": float(omega),
        "n_steps": int(n_steps),
        "dt": float(dt),
        "half_width": pom.half_width,
        "dq": pom.dq,
        "n_fock": fock.n_fock,
        "update": update,
        "halted_step": halted_step,
    }
    return TrackRecord(np.array(times), np.array(qs), np.array(ps), np.array(deficits), halted, params)


def classical_flow(q, p, omega, t):
    """Harmonic flow ``dq/dt = omega p``, ``dp/dt = -omega q``."""
    c, s = np.cos(omega * t), np.sin(omega * t)
    return q * c + p * s, p * c - q * s


def tube_report(record, alpha0, dynamics="none", omega=1.0):
    """Distances of each readout from classical references.

    ``step_dev``: from the classical evolution of the previous readout (the
    centre of the state actually measured).  ``circle_dev``: from the
    classical orbit of ``alpha0`` at the same time.  ``radial_dev``: from the
    orbit curve itself, ``| |(q, p)| - |(q0, p0)| |``.  Successive collapses
    add unit readout variance per axis, so the spread about the fixed orbit at step ``k`` is
    ``sigma_k = sqrt(k + 1)``, whereas about the one-step prediction it stays
    at ``READOUT_SIGMA``.
    """
    w = omega if dynamics == "harmonic" else 0.0
    q0, p0 = np.sqrt(2) * np.real(alpha0), np.sqrt(2) * np.imag(alpha0)
    t = record.times
    cq, cp = classical_flow(q0, p0, w, t)
    circle_dev = np.hypot(record.q - cq, record.p - cp)
    radial_dev = np.abs(np.hypot(record.q, record.p) - np.hypot(q0, p0))
    dt = record.params.get("dt", 0.0)
    prev_q = np.r_[q0, record.q[:-1]]
    prev_p = np.r_[p0, record.p[:-1]]
    lag = np.r_[0.0, np.full(max(t.size - 1, 0), dt)]
    pq, pp = classical_flow(prev_q, prev_p, w, lag)
    step_dev = np.hypot(record.q - pq, record.p - pp)
    return {
        "step_dev": step_dev,
        "circle_dev": circle_dev,
        "radial_dev": radial_dev,
        "sigma_cumulative": READOUT_SIGMA * np.sqrt(np.arange(t.size) + 1.0),
    }
