import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ket, random_density, random_effect
from oracles import beta_scan
from unsharp.errors import DimensionMismatch, ValidationError
from unsharp.linalg import projector, random_unitary
from unsharp.states import (
    Effect,
    Projection,
    Reality,
    State,
    classify_property,
    complement,
    degree_of_reality,
    is_eigenstate,
    is_regular,
    qubit_nonorthogonal_decomposition,
    sharpness_report,
    spectral_decompose_effect,
)

P_UP = np.diag([1.0, 0.0])
P_DOWN = np.diag([0.0, 1.0])
PHI_A, PHI_B = ket(1, 0), ket(0, 1)
PSI_PLUS, PSI_MINUS = ket(1, 1), ket(1, -1)


class TestConstruction:
    def test_state_rejects_bad_trace(self):
        with pytest.raises(ValidationError):
            State(np.eye(2))

    def test_state_rejects_negative(self):
        with pytest.raises(Exception):
            State(np.diag([1.2, -0.2]))

    def test_effect_clamps_within_tolerance(self):
        e = Effect(np.diag([1 + 5e-11, -5e-11]))
        assert np.array_equal(e.op.real, P_UP)

    def test_effect_rejects_above_one(self):
        with pytest.raises(ValidationError):
            Effect(np.diag([1.1, 0.0]))

    def test_projection_rejects_unsharp(self):
        with pytest.raises(ValidationError):
            Projection(0.5 * np.eye(2))

    def test_values_are_immutable(self):
        s = State.pure(PHI_A)
        with pytest.raises(ValueError):
            s.op[0, 0] = 0
        with pytest.raises(AttributeError):
            s.op = np.eye(2) / 2


class TestDegreeOfReality:
    def test_identity_effect(self, rng):
        s = State(random_density(3, rng))
        assert degree_of_reality(s, Effect.identity(3)) == pytest.approx(1.0)

    def test_interference_on_superposition(self):
        psi = State.pure(PSI_PLUS)
        assert degree_of_reality(psi, Projection.onto(PSI_PLUS)) == pytest.approx(1.0, abs=1e-12)
        assert degree_of_reality(psi, Projection.onto(PSI_MINUS)) == pytest.approx(0.0, abs=1e-12)

    def test_interference_on_path_state(self):
        phi = State.pure(PHI_A)
        assert degree_of_reality(phi, Projection.onto(PSI_PLUS)) == pytest.approx(0.5, abs=1e-12)
        assert degree_of_reality(phi, Projection.onto(PSI_MINUS)) == pytest.approx(0.5, abs=1e-12)

    def test_dim_mismatch(self):
        with pytest.raises(DimensionMismatch):
            degree_of_reality(State.pure(PHI_A), Effect.identity(3))

    def test_complement_sums_to_one(self, rng):
        for _ in range(500):
            d = int(rng.integers(1, 6))
            s, e = State(random_density(d, rng)), Effect(random_effect(d, rng))
            assert degree_of_reality(s, e) + degree_of_reality(s, complement(e)) == pytest.approx(1.0, abs=1e-10)


class TestEigenstate:
    def test_projection_of_itself(self):
        p = Projection.onto(ket(1, 2j))
        assert is_eigenstate(State(p.op), p)

    def test_orthogonal(self):
        assert not is_eigenstate(State.pure(PHI_A), Projection(P_DOWN))

    def test_superposition_is_not_eigenstate(self):
        assert not is_eigenstate(State.pure(PSI_PLUS), Projection(P_UP))


class TestClassify:
    def test_actual(self):
        p = Projection(P_UP)
        st_ = classify_property(State(P_UP), p, 0.0)
        assert st_.status is Reality.ACTUAL and st_.degree == 1.0

    def test_half_is_indeterminate_without_flags(self):
        st_ = classify_property(State.pure(PSI_PLUS), Projection(P_UP), 0.1)
        assert st_.status is Reality.INDETERMINATE
        assert st_.degree == pytest.approx(0.5)
        assert not st_.approximately_real and not st_.approximately_absent

    def test_threshold_arithmetic(self):
        s = State(np.diag([0.98, 0.02]))
        st_ = classify_property(s, Projection(P_UP), 0.05)
        assert st_.status is Reality.ACTUAL and st_.approximately_real

    def test_absent(self):
        st_ = classify_property(State(np.diag([0.98, 0.02])), Projection(P_DOWN), 0.05)
        assert st_.status is Reality.ABSENT and st_.approximately_absent

    @pytest.mark.parametrize("eps", [-0.1, 0.5, 0.7])
    def test_eps_range(self, eps):
        with pytest.raises(ValidationError):
            classify_property(State(P_UP), Projection(P_UP), eps)

    @settings(max_examples=300, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.floats(0, 0.49))
    def test_exactly_one_flag(self, seed, eps):
        rng = np.random.default_rng(seed)
        s, e = State(random_density(3, rng)), Effect(random_effect(3, rng))
        st_ = classify_property(s, e, eps)
        if abs(st_.degree - 0.5) > 1e-12:
            assert st_.approximately_real != st_.approximately_absent


class TestRegularity:
    def test_projection_is_regular(self):
        assert is_regular(Projection(P_UP))

    def test_low_multiple_of_identity(self):
        assert not is_regular(Effect(0.3 * np.eye(2)))

    def test_straddling_spectrum(self):
        e = Effect(0.9 * projector(PSI_PLUS) + 0.4 * projector(PSI_MINUS))
        assert is_regular(e)

    def test_half_counts_as_neither_side(self):
        assert not is_regular(Effect(np.diag([0.5, 0.9])))

    def test_unitary_invariance(self, rng):
        for _ in range(200):
            e = random_effect(3, rng)
            u = random_unitary(3, rng)
            assert is_regular(Effect(e)) == is_regular(Effect(u @ e @ u.conj().T))


class TestComplement:
    def test_identity(self):
        assert np.allclose(complement(Effect.identity(2)).op, 0)

    def test_projection_stays_projection(self):
        c = complement(Projection(P_UP))
        assert isinstance(c, Projection) and np.allclose(c.op, P_DOWN)

    def test_unsharp(self):
        e = Effect(0.7 * P_UP + 0.3 * P_DOWN)
        assert np.allclose(complement(e).op, 0.3 * P_UP + 0.7 * P_DOWN)
        assert np.allclose(complement(complement(e)).op, e.op)


class TestSharpness:
    def test_projection(self):
        r = sharpness_report(Projection(P_UP))
        assert r.is_sharp and r.overlap_norm == pytest.approx(0.0, abs=1e-15)

    def test_half_identity(self):
        r = sharpness_report(Effect(0.5 * np.eye(2)))
        assert not r.is_sharp and r.overlap_norm == pytest.approx(0.25)

    def test_smeared_spin(self):
        r = sharpness_report(Effect(0.9 * P_UP + 0.1 * P_DOWN))
        assert not r.is_sharp and r.overlap_norm == pytest.approx(0.09)


class TestSpectralDecomposition:
    def test_two_weights(self):
        blocks = spectral_decompose_effect(Effect(0.7 * P_UP + 0.3 * P_DOWN))
        assert [w for w, _ in blocks] == pytest.approx([0.7, 0.3])
        assert np.allclose(blocks[0][1].op, P_UP) and np.allclose(blocks[1][1].op, P_DOWN)

    def test_projection_single_block(self):
        p = Projection.onto(ket(1, 1j))
        blocks = spectral_decompose_effect(p)
        assert len(blocks) == 1 and blocks[0][0] == pytest.approx(1.0)
        assert np.allclose(blocks[0][1].op, p.op)

    def test_degenerate_block(self):
        blocks = spectral_decompose_effect(Effect(0.5 * np.eye(2)))
        assert len(blocks) == 1 and blocks[0][0] == pytest.approx(0.5)
        assert np.allclose(blocks[0][1].op, np.eye(2))

    def test_random_reconstruction_and_orthogonality(self, rng):
        for _ in range(300):
            d = int(rng.integers(1, 7))
            e = Effect(random_effect(d, rng))
            blocks = spectral_decompose_effect(e)
            rebuilt = sum(w * p.op for w, p in blocks)
            assert np.max(np.abs(rebuilt - e.op)) <= 1e-9
            for i, (_, p) in enumerate(blocks):
                for _, q in blocks[i + 1 :]:
                    assert np.max(np.abs(p.op @ q.op)) <= 1e-9


class TestNonorthogonalDecomposition:
    def test_spectral_ray_gives_orthogonal_pair(self):
        beta, rp = qubit_nonorthogonal_decomposition(Effect(0.7 * P_UP + 0.3 * P_DOWN), Projection(P_UP))
        assert beta == pytest.approx(0.7)
        assert np.allclose(rp.op, P_DOWN)

    def test_half_identity(self, rng):
        r = Projection.onto(rng.normal(size=2) + 1j * rng.normal(size=2))
        beta, rp = qubit_nonorthogonal_decomposition(Effect(0.5 * np.eye(2)), r)
        assert beta == pytest.approx(0.5)
        assert np.allclose(rp.op, np.eye(2) - r.op)

    def test_x_ray_against_scan(self):
        e = Effect(0.7 * P_UP + 0.3 * P_DOWN)
        r = Projection.onto(PSI_PLUS)
        beta, rp = qubit_nonorthogonal_decomposition(e, r)
        roots = beta_scan(e.op, r.op)
        assert len(roots) == 1
        assert beta == pytest.approx(roots[0], abs=1e-5)
        assert beta == pytest.approx(0.42)  # det(E)/(1 - <+|E|+>) = 0.21/0.5
        assert np.max(np.abs(beta * r.op + (1 - beta) * rp.op - e.op)) <= 1e-9
        assert np.trace(r.op @ rp.op).real > 1e-3

    def test_rejects_wrong_trace(self):
        with pytest.raises(ValidationError):
            qubit_nonorthogonal_decomposition(Effect(0.9 * P_UP + 0.3 * P_DOWN), Projection(P_UP))

    def test_rejects_projection_effect(self):
        with pytest.raises(ValidationError):
            qubit_nonorthogonal_decomposition(Effect(P_UP), Projection.onto(PSI_PLUS))

    def test_rejects_higher_rank_r(self):
        with pytest.raises(ValidationError):
            qubit_nonorthogonal_decomposition(Effect(0.5 * np.eye(2)), Projection(np.eye(2)))
