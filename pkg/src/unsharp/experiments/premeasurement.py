"""Unitary premeasurement of a qubit by a qubit pointer.

The coupling ``U = sum_i |phi_i><phi_i| (x) X^i`` maps ``|phi_i>|0>`` to
``|phi_i>|i>``, so a superposition of basis states ends up entangled with
the pointer.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import ValidationError
from ..linalg import SIGMA_X, hermitian_eig
from ..states import State

PURE_TOL = 1e-10
SCHMIDT_TOL = 1e-12


@dataclass(frozen=True)
class PremeasurementResult:
    post_state: State
    pointer_probabilities: np.ndarray
    schmidt_coefficients: Optional[np.ndarray]

    @property
    def schmidt_rank(self):
        if self.schmidt_coefficients is None:
            return None
        return int(np.sum(self.schmidt_coefficients > SCHMIDT_TOL))

    @property
    def is_product(self):
        return self.schmidt_rank == 1


def coupling_unitary(basis):
    b = np.asarray(basis, dtype=complex)
    if b.shape != (2, 2) or np.max(np.abs(b.conj().T @ b - np.eye(2))) > 1e-10:
        raise ValidationError("basis must be the two orthonormal columns of a 2x2 unitary")
    projs = [np.outer(b[:, i], b[:, i].conj()) for i in range(2)]
    return np.kron(projs[0], np.eye(2)) + np.kron(projs[1], SIGMA_X)


def premeasurement_demo(object_state, basis=None):
    """Couple ``object_state`` to a pointer in ``|0>`` and read the result.

    Schmidt coefficients are reported only for pure inputs, whose post state
    is pure as well.
    """
    if object_state.dim != 2:
        raise ValidationError("object system must be a qubit")
    basis = np.eye(2) if basis is None else basis
    u = coupling_unitary(basis)
    pointer0 = np.diag([1.0, 0.0])
    post = u @ np.kron(object_state.op, pointer0) @ u.conj().T
    post = State(0.5 * (post + post.conj().T))

    probs = np.array(
        [np.real(np.trace(post.op @ np.kron(np.eye(2), np.diag(np.eye(2)[i])))) for i in range(2)]
    )
    schmidt = None
    if abs(post.purity() - 1.0) <= PURE_TOL:
        vec = hermitian_eig(post.op).vectors[:, 0]
        schmidt = np.linalg.svd(vec.reshape(2, 2), compute_uv=False)
    return PremeasurementResult(post, np.clip(probs, 0.0, 1.0), schmidt)
