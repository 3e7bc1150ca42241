"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v``; the verdict lines are
printed to the terminal even when output capture is on.
"""

import numpy as np
import pytest

from conftest import random_density
from oracles import beta_scan, chsh_dense_angle_grid, joint_feasible_by_scan
from unsharp.channels import epr_robustness_probe, near_eigenstate_pair
from unsharp.classical import (
    ClassicalMeasure,
    mb_consistency_mc,
    random_measure,
    ray_overlap_geometry,
    sample_haar_ray,
)
from unsharp.experiments.chsh import (
    TSIRELSON,
    ChshSetting,
    chsh_unsharpness_scan,
    chsh_value,
    optimize_chsh,
    singlet,
)
from unsharp.experiments.frequency import frequency_operator_stats
from unsharp.experiments.phasespace import FockSpace, husimi_pom, track_simulate, tube_report
from unsharp.experiments.premeasurement import premeasurement_demo
from unsharp.linalg import bloch_operator, eigvalsh, random_unitary
from unsharp.observables import construct_joint_qubit, marginals, unbiased_qubit_pom
from unsharp.states import Effect, Projection, State, degree_of_reality, qubit_nonorthogonal_decomposition

SEED = 20240611


@pytest.fixture
def verdict(capsys):
    def report(tag, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {tag}: {detail}")
        assert ok, detail

    return report


def unit_ball(n, rng):
    v = rng.normal(size=(n, 3))
    v /= np.linalg.norm(v, axis=1)[:, None]
    return v * rng.random(n)[:, None] ** (1 / 3)


def test_c01_interference(verdict):
    ket = lambda *a: np.array(a, dtype=complex) / np.linalg.norm(a)  # noqa: E731
    psi_p, psi_m = ket(1, 1), ket(1, -1)
    vals = [
        degree_of_reality(State.pure(psi_p), Projection.onto(psi_p)),
        degree_of_reality(State.pure(psi_p), Projection.onto(psi_m)),
        degree_of_reality(State.pure(ket(1, 0)), Projection.onto(psi_p)),
        degree_of_reality(State.pure(ket(1, 0)), Projection.onto(psi_m)),
    ]
    err = float(np.max(np.abs(np.array(vals) - [1, 0, 0.5, 0.5])))
    verdict("1 interference", err <= 1e-12, f"values {np.round(vals, 15).tolist()}, max error {err:.1e}")


def test_c02_ray_identity(verdict):
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(10_000):
        d = int(rng.integers(2, 7))
        g = ray_overlap_geometry(sample_haar_ray(d, rng), sample_haar_ray(d, rng))
        worst = max(worst, g.identity_residual)
    verdict("2 ray identity", worst <= 1e-10, f"max residual {worst:.2e} over 10^4 pairs, dims 2-6")


def test_c03_epr_robustness(verdict):
    rng = np.random.default_rng(SEED)
    worst_shortfall, worst_ratio = -np.inf, 0.0
    for _ in range(10_000):
        eps = float(np.exp(rng.uniform(np.log(1e-6), np.log(0.2))))
        s, e = near_eigenstate_pair(int(rng.integers(2, 4)), eps, rng)
        r = epr_robustness_probe(s, e)
        worst_shortfall = max(worst_shortfall, (1 - eps) - r.p_after)
        worst_ratio = max(worst_ratio, r.ratio)
    ok = worst_shortfall <= 1e-12 and worst_ratio <= 3.0
    verdict(
        "3 EPR robustness",
        ok,
        f"max (1-eps) - p_after = {worst_shortfall:.2e}, envelope max distance/sqrt(eps) = {worst_ratio:.4f}",
    )


def test_c04_decomposition(verdict):
    rng = np.random.default_rng(SEED)
    recon = idem = beta_err = 0.0
    non_unique = 0
    orth_when_generic = 0
    for _ in range(1000):
        alpha = rng.uniform(0.02, 0.98)
        while abs(alpha - 0.5) < 0.01:
            alpha = rng.uniform(0.02, 0.98)
        u = random_unitary(2, rng)
        e = Effect((u * [alpha, 1 - alpha]) @ u.conj().T)
        r = Projection.onto(rng.normal(size=2) + 1j * rng.normal(size=2))
        beta, rp = qubit_nonorthogonal_decomposition(e, r)
        recon = max(recon, np.max(np.abs(beta * r.op + (1 - beta) * rp.op - e.op)))
        idem = max(idem, np.max(np.abs(rp.op @ rp.op - rp.op)))
        roots = beta_scan(e.op, r.op)
        if len(roots) != 1:
            non_unique += 1
            continue
        beta_err = max(beta_err, abs(beta - roots[0]))
        if np.real(np.trace(r.op @ rp.op)) < 1e-9:
            orth_when_generic += 1
    # spectral rays give the orthogonal pair
    spectral_orth = 0.0
    for _ in range(100):
        u = random_unitary(2, rng)
        a = rng.uniform(0.05, 0.45)
        e = Effect((u * [1 - a, a]) @ u.conj().T)
        for k in range(2):
            _, rp = qubit_nonorthogonal_decomposition(e, Projection.onto(u[:, k]))
            spectral_orth = max(spectral_orth, abs(np.real(np.vdot(u[:, k], rp.op @ u[:, k]))))
    ok = (
        recon <= 1e-9
        and idem <= 1e-9
        and non_unique == 0
        and beta_err <= 1e-5
        and orth_when_generic == 0
        and spectral_orth <= 1e-9
    )
    verdict(
        "4 decomposition",
        ok,
        f"reconstruction {recon:.1e}, idempotence {idem:.1e}, |beta - scan| {beta_err:.1e}, "
        f"non-unique scans {non_unique}, orthogonal R' for generic R {orth_when_generic}, "
        f"spectral-R overlap {spectral_orth:.1e}",
    )


def test_c05_joint_measurability(verdict):
    rng = np.random.default_rng(SEED)
    a, b = unit_ball(10_000, rng), unit_ball(10_000, rng)
    oracle = joint_feasible_by_scan(a, b)
    results = [construct_joint_qubit(x, y) for x, y in zip(a, b)]
    disagree = int(np.sum(np.array([r.feasible for r in results]) != oracle))
    marg_err, min_eig = 0.0, np.inf
    for (x, y), r in zip(zip(a, b), results):
        if not r.feasible:
            continue
        ma, mb = marginals(r.pom)
        for m, t in ((ma, unbiased_qubit_pom(x)), (mb, unbiased_qubit_pom(y))):
            for f, g in zip(m.effects, t.effects):
                marg_err = max(marg_err, np.max(np.abs(f.op - g.op)))
        for ef in r.pom.effects:
            min_eig = min(min_eig, eigvalsh(ef.op)[-1])

    lo, hi = 0.5, 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if construct_joint_qubit([0, 0, mid], [mid, 0, 0]).feasible:
            lo = mid
        else:
            hi = mid
    boundary_err = abs(lo - 1 / np.sqrt(2))
    ok = disagree == 0 and boundary_err <= 1e-6 and marg_err <= 1e-12 and min_eig >= -1e-10
    verdict(
        "5 joint measurability",
        ok,
        f"oracle disagreements {disagree}/10000, boundary eta {lo:.9f} (error {boundary_err:.1e}), "
        f"marginal error {marg_err:.1e}, min certificate eigenvalue {min_eig:.1e}",
    )


def test_c06_chsh(verdict):
    rng = np.random.default_rng(SEED)
    s1, _ = optimize_chsh(singlet())
    oracle = chsh_dense_angle_grid(singlet().op)
    grid = np.linspace(0, 1, 21)
    scaling_err = max(abs(s - TSIRELSON * eta**2) for eta, s in chsh_unsharpness_scan(grid))
    thr = 2**-0.25
    below = [s for _, s in chsh_unsharpness_scan(np.linspace(0.5, thr - 1e-3, 15))]
    above = [s for _, s in chsh_unsharpness_scan(np.linspace(thr + 1e-3, 1.0, 15))]
    ceiling = 0.0
    for _ in range(5000):
        st = State(random_density(4, rng, rank=int(rng.integers(1, 5))))
        dirs = rng.normal(size=(4, 3))
        dirs /= np.linalg.norm(dirs, axis=1)[:, None]
        ceiling = max(ceiling, chsh_value(ChshSetting(st, *dirs)))
    ok = (
        abs(s1 - TSIRELSON) <= 1e-5
        and abs(s1 - oracle) <= 1e-5
        and scaling_err <= 1e-6
        and max(below) <= 2.0
        and min(above) > 2.0
        and ceiling <= TSIRELSON + 1e-6
    )
    verdict(
        "6 CHSH degradation",
        ok,
        f"S_max(1) = {s1:.9f} (grid oracle {oracle:.9f}), max |S - 2sqrt2 eta^2| {scaling_err:.1e}, "
        f"max S below threshold {max(below):.6f}, min S above {min(above):.6f}, sampled ceiling {ceiling:.6f}",
    )


def test_c07_frequency(verdict):
    worst = 0.0
    for n in range(1, 13):
        for p in np.linspace(0, 1, 11):
            a, b = frequency_operator_stats(p, n, "tensor"), frequency_operator_stats(p, n)
            worst = max(worst, abs(a.mean - p), abs(a.variance - p * (1 - p) / n), abs(a.variance - b.variance))
    vs = np.array([frequency_operator_stats(0.3, n, "tensor").variance for n in (2, 4, 8, 12)])
    trend = bool(np.all(np.diff(vs) < 0)) and np.allclose(vs * [2, 4, 8, 12], 0.21, atol=1e-10)
    verdict("7 frequency operator", worst <= 1e-10 and trend, f"max deviation {worst:.1e}, N*Var = {np.round(vs * [2, 4, 8, 12], 12).tolist()}")


def test_c08_premeasurement(verdict):
    calib = [premeasurement_demo(State.pure(np.eye(2)[i])) for i in range(2)]
    calib_ok = all(r.is_product and abs(r.pointer_probabilities[i] - 1) <= 1e-12 for i, r in enumerate(calib))
    sup = premeasurement_demo(State.pure([np.sqrt(0.8), np.sqrt(0.2)]))
    err = float(np.max(np.abs(sup.pointer_probabilities - [0.8, 0.2])))
    ok = calib_ok and err <= 1e-12 and sup.schmidt_rank == 2
    verdict("8 premeasurement", ok, f"calibration {calib_ok}, pointer error {err:.1e}, Schmidt rank {sup.schmidt_rank}")


def test_c09_misra_bugajski(verdict):
    rng = np.random.default_rng(SEED)
    z = ClassicalMeasure([([1, 0], 0.5), ([0, 1], 0.5)])
    x = ClassicalMeasure([([1, 1], 0.5), ([1, -1], 0.5)])
    diff = 0.0
    for _ in range(100):
        u = random_unitary(2, rng)
        e = Effect((u * rng.random(2)) @ u.conj().T)
        diff = max(diff, abs(mb_consistency_mc(z, e, 1, rng).exact - mb_consistency_mc(x, e, 1, rng).exact))
    zs = []
    for _ in range(20):
        mu = random_measure(3, 5, rng)
        u = random_unitary(3, rng)
        r = mb_consistency_mc(mu, Effect((u * rng.random(3)) @ u.conj().T), 100_000, rng)
        zs.append(abs(r.mc_estimate - r.exact) / r.std_error)
    ok = diff <= 1e-12 and max(zs) <= 4
    verdict("9 Misra-Bugajski", ok, f"max preparation difference {diff:.1e}, max |z| at n=1e5 {max(zs):.2f}")


@pytest.fixture(scope="module")
def vacuum_setup():
    fock = FockSpace(40)
    return fock, husimi_pom(fock, 6.0, 0.25)


def test_c10a_remainder(verdict, vacuum_setup):
    _, pom = vacuum_setup
    verdict("10a Husimi remainder norm (L=6, N_f=40)", pom.remainder_norm <= 0.01, f"remainder norm {pom.remainder_norm:.5f} (target <= 0.01)")


def test_c10b_vacuum_variance(verdict, vacuum_setup):
    fock, pom = vacuum_setup
    m = pom.readout_moments(fock.coherent(0)[0])
    ok = abs(m["var_q"] - 1) <= 0.03 and abs(m["var_p"] - 1) <= 0.03
    verdict("10b vacuum readout variance", ok, f"Var(q) = {m['var_q']:.5f}, Var(p) = {m['var_p']:.5f}")


def test_c10c_uncertainty_product(verdict, vacuum_setup):
    fock, pom = vacuum_setup
    q, p = pom.sample(fock.coherent(0)[0], 20_000, np.random.default_rng(SEED))
    prod = float(np.var(q) * np.var(p))
    verdict("10c readout uncertainty product", prod >= 0.25, f"sample Var(q) Var(p) = {prod:.4f}")


def test_c10d_tracking_tubes(verdict):
    fock = FockSpace(60)
    pom = husimi_pom(fock, 10.0, 0.25)
    radial, locked = [], []
    for seed in range(100):
        rec = track_simulate(fock, 2.0, "harmonic", 1.0, 4, np.pi / 2, np.random.default_rng(seed), pom)
        rep = tube_report(rec, 2.0, "harmonic", 1.0)
        radial.extend(rep["radial_dev"] <= 4.0)
        locked.extend(rep["circle_dev"] <= 4.0)
    frac = float(np.mean(radial))
    verdict(
        "10d harmonic tracking tubes",
        frac >= 0.95,
        f"{frac:.3f} of readouts within 4 sigma of the classical circle (100 seeds x 4 quarter turns); "
        f"phase-locked fraction {np.mean(locked):.3f} reported only",
    )


def test_c10e_track_replay(verdict):
    fock = FockSpace(100)
    pom = husimi_pom(fock, 10.0, 0.25)
    runs = [track_simulate(fock, 2.0, "harmonic", 1.0, 100, 0.1, np.random.default_rng(11), pom) for _ in range(2)]
    same = repr(runs[0].rows()).encode() == repr(runs[1].rows()).encode() and runs[0] == runs[1]
    verdict("10e track replay", same, f"identical records for seed 11 ({len(runs[0])} steps, halted={runs[0].halted})")
