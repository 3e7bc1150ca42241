"""CHSH correlations with unbiased smeared spin observables.

Each party measures ``{1/2 (I + eta a.sigma), 1/2 (I - eta a.sigma)}``.  The
correlators are bilinear in the two sharpness factors, so the optimal CHSH
value of a state drops as ``eta_A * eta_B`` times its sharp optimum.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .. import _kernels
from ..errors import ValidationError
from ..linalg import PAULIS, bloch_operator
from ..observables import bloch_vector
from ..states import State

TSIRELSON = 2.0 * np.sqrt(2.0)


def singlet():
    psi = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)
    return State.pure(psi)


def product_state(a, b):
    return State(np.kron(bloch_operator(bloch_vector(a)), bloch_operator(bloch_vector(b))))


@dataclass(frozen=True)
class ChshSetting:
    state: State
    a0: np.ndarray
    a1: np.ndarray
    b0: np.ndarray
    b1: np.ndarray
    eta_a: float = 1.0
    eta_b: float = 1.0

    def __post_init__(self):
        if self.state.dim != 4:
            raise ValidationError("CHSH needs a two-qubit state")
        for name in ("a0", "a1", "b0", "b1"):
            object.__setattr__(self, name, bloch_vector(getattr(self, name)))
        for eta in (self.eta_a, self.eta_b):
            if not 0.0 <= eta <= 1.0:
                raise ValidationError(f"sharpness factor {eta} outside [0, 1]")


def correlator(rho, a, b, eta_a=1.0, eta_b=1.0):
    """``sum_{j,k = +-1} j k tr[rho (A^j (x) B^k)]`` built from the effects."""
    c = 0.0
    for j in (1, -1):
        ea = bloch_operator(j * eta_a * np.asarray(a))
        for k in (1, -1):
            eb = bloch_operator(k * eta_b * np.asarray(b))
            c += j * k * np.real(np.trace(rho @ np.kron(ea, eb)))
    return float(c)


def chsh_value(setting):
    rho = setting.state.op
    ea, eb = setting.eta_a, setting.eta_b
    c00 = correlator(rho, setting.a0, setting.b0, ea, eb)
    c01 = correlator(rho, setting.a0, setting.b1, ea, eb)
    c10 = correlator(rho, setting.a1, setting.b0, ea, eb)
    c11 = correlator(rho, setting.a1, setting.b1, ea, eb)
    return abs(c00 + c01 + c10 - c11)


def correlation_matrix(state):
    """``T_ij = tr[rho sigma_i (x) sigma_j]``."""
    rho = state.op
    return np.array([[np.real(np.trace(rho @ np.kron(si, sj))) for sj in PAULIS] for si in PAULIS])


def fibonacci_sphere(n):
    k = np.arange(n) + 0.5
    z = 1.0 - 2.0 * k / n
    phi = np.pi * (1.0 + 5**0.5) * k
    r = np.sqrt(1.0 - z * z)
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


def _unit(theta, phi):
    return np.array([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])


def _alice_best(T, b0, b1):
    out = []
    for v in (T @ (b0 + b1), T @ (b0 - b1)):
        n = np.linalg.norm(v)
        out.append(v / n if n > 1e-15 else np.array([0.0, 0.0, 1.0]))
    return out


def optimize_chsh(state, eta_a=1.0, eta_b=1.0, n_dirs=200):
    """Maximise the CHSH value over all four measurement directions.

    Bob's pair is found by a coarse scan over ``n_dirs`` sphere points and
    then refined locally; Alice's directions follow in closed form.  Returns
    ``(S, setting)`` with ``S`` evaluated from the effects themselves.
    """
    T = correlation_matrix(state)
    dirs = fibonacci_sphere(n_dirs)
    _, i, j = _kernels.chsh_pair_scan(T, dirs)

    def neg(x):
        b0, b1 = _unit(x[0], x[1]), _unit(x[2], x[3])
        return -(np.linalg.norm(T @ (b0 + b1)) + np.linalg.norm(T @ (b0 - b1)))

    def angles(v):
        return [np.arccos(np.clip(v[2], -1, 1)), np.arctan2(v[1], v[0])]

    res = minimize(neg, angles(dirs[i]) + angles(dirs[j]), method="BFGS", options={"gtol": 1e-12})
    b0, b1 = _unit(*res.x[:2]), _unit(*res.x[2:])
    a0, a1 = _alice_best(T, b0, b1)
    setting = ChshSetting(state, a0, a1, b0, b1, eta_a, eta_b)
    return chsh_value(setting), setting


def chsh_unsharpness_scan(eta_grid, state=None):
    """Rows ``(eta, S_max(eta))`` with equal smearing on both sides."""
    state = singlet() if state is None else state
    rows = []
    for eta in eta_grid:
        eta = float(eta)
        if not 0.0 <= eta <= 1.0:
            raise ValidationError(f"eta={eta} outside [0, 1]")
        s, _ = optimize_chsh(state, eta, eta)
        rows.append((eta, s))
    return rows


def violation_threshold(state=None):
    """Smallest symmetric sharpness at which the optimal CHSH value reaches 2."""
    state = singlet() if state is None else state
    s1, _ = optimize_chsh(state)
    return float(np.sqrt(2.0 / s1)) if s1 > 2.0 else None
