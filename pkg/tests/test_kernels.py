import os
import subprocess
import sys

import numpy as np
import pytest

from unsharp import _kernels
from unsharp._kernels import NUMBA_KERNELS, NUMPY_KERNELS

BACKENDS = [NUMPY_KERNELS, NUMBA_KERNELS]
IDS = ["numpy", "numba"]


@pytest.fixture(params=BACKENDS, ids=IDS)
def kernels(request):
    return request.param


def test_both_backends_present():
    assert set(NUMPY_KERNELS) == set(NUMBA_KERNELS)


def test_qubit_eigh_reconstructs(kernels, rng):
    g = rng.normal(size=(500, 2, 2)) + 1j * rng.normal(size=(500, 2, 2))
    h = 0.5 * (g + np.conj(np.swapaxes(g, 1, 2)))
    h[:5] = np.diag([0.3, 0.3])  # degenerate
    h[5:10] = np.diag([0.1, 0.9])  # diagonal, h < 0 branch
    vals, vecs = kernels["qubit_eigh_batch"](h)
    rebuilt = np.einsum("kij,kj,klj->kil", vecs, vals, vecs.conj())
    assert np.max(np.abs(rebuilt - h)) < 1e-12
    assert np.all(vals[:, 0] >= vals[:, 1])
    gram = np.einsum("kji,kjl->kil", vecs.conj(), vecs)
    assert np.max(np.abs(gram - np.eye(2))) < 1e-12


def test_qubit_eigh_matches_lapack(kernels, rng):
    g = rng.normal(size=(200, 2, 2)) + 1j * rng.normal(size=(200, 2, 2))
    h = 0.5 * (g + np.conj(np.swapaxes(g, 1, 2)))
    vals, _ = kernels["qubit_eigh_batch"](h)
    ref = np.linalg.eigvalsh(h)[:, ::-1]
    assert np.allclose(vals, ref, atol=1e-12)


def test_coherent_matrix_agrees(rng):
    alphas = rng.normal(size=50) + 1j * rng.normal(size=50)
    a = NUMPY_KERNELS["coherent_matrix"](alphas, 30)
    b = NUMBA_KERNELS["coherent_matrix"](alphas, 30)
    assert np.allclose(a, b, rtol=1e-13, atol=1e-300)


def test_coherent_matrix_matches_formula():
    from math import factorial

    alpha = 0.7 - 0.4j
    c = _kernels.coherent_matrix([alpha], 12)[0]
    ref = [np.exp(-abs(alpha) ** 2 / 2) * alpha**n / np.sqrt(factorial(n)) for n in range(12)]
    assert np.allclose(c, ref, rtol=1e-13)


def test_inverse_cdf_agrees(rng):
    p = rng.dirichlet(np.ones(7))
    u = rng.random(10_000)
    a = NUMPY_KERNELS["sample_inverse_cdf"](p, u)
    b = NUMBA_KERNELS["sample_inverse_cdf"](p, u)
    assert np.array_equal(a, b)


def test_inverse_cdf_edges(kernels):
    p = np.array([0.0, 0.5, 0.0, 0.5])
    u = np.array([0.0, 0.4999, 0.5, 0.99999999])
    assert kernels["sample_inverse_cdf"](p, u).tolist() == [1, 1, 3, 3]
    # rounding short of 1 falls into the last category
    assert kernels["sample_inverse_cdf"](np.array([0.3, 0.3]), np.array([0.9]))[0] == 1


def test_chsh_pair_scan_agrees(rng):
    T = rng.normal(size=(3, 3))
    d = rng.normal(size=(40, 3))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    a = NUMPY_KERNELS["chsh_pair_scan"](T, d)
    b = NUMBA_KERNELS["chsh_pair_scan"](T, d)
    assert a[0] == pytest.approx(b[0], abs=1e-12)


def test_env_flag_selects_numpy():
    env = dict(os.environ, UNSHARP_DISABLE_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c", "import unsharp; print(unsharp.BACKEND)"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "numpy"
