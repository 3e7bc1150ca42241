"""Frequency operator of N identically prepared qubits.

``F_N = (1/N) sum_k P_+^(k)`` measured in the product state ``psi^(x)N`` has
mean ``p`` and variance ``p (1 - p) / N``, so the
distribution of the relative frequency concentrates at ``p`` as N grows.
"""

from typing import NamedTuple

import numpy as np

from ..errors import ValidationError

MAX_TENSOR_N = 12


class FrequencyStats(NamedTuple):
    mean: float
    variance: float


def _apply_frequency_operator(psi_n, proj, n):
    """``F_N |Psi>`` with the N-fold state kept as an ``(2,)*n`` tensor."""
    out = np.zeros_like(psi_n)
    for k in range(n):
        out += np.moveaxis(np.tensordot(proj, psi_n, axes=([1], [k])), 0, k)
    return out / n


def frequency_operator_stats(p_plus, n, mode="closed_form", phase=0.0):
    """Mean and variance of ``F_N`` in ``psi^(x)N`` with ``|<+|psi>|^2 = p_plus``.

    ``mode="tensor"`` builds ``psi^(x)N`` explicitly and applies ``F_N`` site
    by site (``n <= 12``); ``phase`` sets the relative phase of ``psi``,
    which must not matter.
    """
    if not 0.0 <= p_plus <= 1.0:
        raise ValidationError(f"p_plus={p_plus} outside [0, 1]")
    n = int(n)
    if n < 1:
        raise ValidationError("n must be a positive integer")
    if mode == "closed_form":
        return FrequencyStats(float(p_plus), float(p_plus * (1.0 - p_plus) / n))
    if mode != "tensor":
        raise ValidationError(f"unknown mode {mode!r}")
    if n > MAX_TENSOR_N:
        raise ValidationError(f"tensor mode supports n <= {MAX_TENSOR_N}, got {n}")

    psi = np.array([np.sqrt(p_plus), np.sqrt(1.0 - p_plus) * np.exp(1j * phase)])
    proj = np.diag([1.0, 0.0]).astype(complex)
    psi_n = psi
    for _ in range(n - 1):
        psi_n = np.multiply.outer(psi_n, psi)
    psi_n = psi_n.reshape((2,) * n)
    f_psi = _apply_frequency_operator(psi_n, proj, n)
    mean = float(np.real(np.vdot(psi_n, f_psi)))
    second = float(np.real(np.vdot(f_psi, f_psi)))
    return FrequencyStats(mean, max(second - mean * mean, 0.0))
