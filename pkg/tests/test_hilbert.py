import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eprsignal.hilbert import (
    BipartiteLayout,
    DensityMatrix,
    DimensionMismatchError,
    HermitianOperator,
    StateVector,
    ZeroNormError,
    bob_marginal_of,
    eigvalsh,
    expectation,
    normalize,
    partial_trace_A,
    partial_trace_B,
    tensor_product,
    trace_distance,
)

from conftest import partial_trace_oracle, random_density, random_hermitian, random_state

HV = ("H", "V")
H = StateVector([1, 0], HV)
V = StateVector([0, 1], HV)


class TestTensorProduct:
    def test_basis_case(self):
        hv = tensor_product(H, V)
        assert hv.basis_labels == ("HH", "HV", "VH", "VV")
        np.testing.assert_array_equal(hv.amplitudes, [0, 1, 0, 0])

    def test_linearity(self):
        plus = StateVector(np.array([1, 1]) / math.sqrt(2), HV)
        out = tensor_product(plus, H)
        np.testing.assert_allclose(out.amplitudes, np.array([1, 0, 1, 0]) / math.sqrt(2),
                                   atol=1e-15)

    def test_matches_double_loop(self, rng):
        a, b = random_state(rng, 2), random_state(rng, 3)
        expected = np.empty(6, dtype=complex)
        for i in range(2):
            for j in range(3):
                expected[i * 3 + j] = a[i] * b[j]
        out = tensor_product(StateVector(a), StateVector(b))
        np.testing.assert_allclose(out.amplitudes, expected, rtol=0, atol=1e-15)


class TestPartialTrace:
    def test_singlet_is_maximally_mixed(self):
        psi = StateVector(np.array([0, 1, -1, 0]) / math.sqrt(2))
        rho_b = partial_trace_A(DensityMatrix.from_state(psi), BipartiteLayout(2, 2))
        np.testing.assert_allclose(rho_b.entries, np.eye(2) / 2, atol=1e-15)

    def test_product_factorizes(self, rng):
        ra, rb = random_density(rng, 3), random_density(rng, 2)
        out = partial_trace_A(DensityMatrix(np.kron(ra, rb)), BipartiteLayout(3, 2))
        np.testing.assert_allclose(out.entries, rb, atol=1e-14)
        out_a = partial_trace_B(DensityMatrix(np.kron(ra, rb)), BipartiteLayout(3, 2))
        np.testing.assert_allclose(out_a.entries, ra, atol=1e-14)

    def test_random_4x4_matches_oracle(self, rng):
        rho = random_density(rng, 4)
        out = partial_trace_A(DensityMatrix(rho), BipartiteLayout(2, 2))
        np.testing.assert_allclose(out.entries, partial_trace_oracle(rho, 2, 2),
                                   rtol=0, atol=1e-12)

    @pytest.mark.parametrize("da,db", [(a, b) for a in range(1, 5) for b in range(1, 5)])
    def test_preserves_trace_and_hermiticity(self, rng, da, db):
        layout = BipartiteLayout(da, db)
        for _ in range(100):
            rho = random_density(rng, da * db)
            out = partial_trace_A(DensityMatrix(rho), layout)
            assert out.dim == db
            assert abs(out.trace - 1.0) < 1e-12
            assert np.max(np.abs(out.entries - out.entries.conj().T)) < 1e-12
            np.testing.assert_allclose(out.entries, partial_trace_oracle(rho, da, db),
                                       rtol=0, atol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            partial_trace_A(DensityMatrix(np.eye(4) / 4), BipartiteLayout(2, 3))

    def test_pure_product_recovers_factors(self, rng):
        a, b = random_state(rng, 3), random_state(rng, 4)
        prod = tensor_product(StateVector(a), StateVector(b))
        layout = BipartiteLayout(3, 4)
        rho = DensityMatrix.from_state(prod)
        np.testing.assert_allclose(partial_trace_A(rho, layout).entries,
                                   np.outer(b, b.conj()), atol=1e-12)
        np.testing.assert_allclose(partial_trace_B(rho, layout).entries,
                                   np.outer(a, a.conj()), atol=1e-12)

    def test_marginal_shortcut_agrees(self, rng):
        psi = StateVector(random_state(rng, 8))
        layout = BipartiteLayout(2, 4)
        np.testing.assert_allclose(bob_marginal_of(psi, layout).entries,
                                   partial_trace_A(DensityMatrix.from_state(psi), layout).entries,
                                   atol=1e-15)


class TestEigenvalues:
    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 8])
    def test_against_lapack(self, rng, n):
        for _ in range(50):
            h = random_hermitian(rng, n)
            np.testing.assert_allclose(eigvalsh(h), np.linalg.eigvalsh(h), rtol=0, atol=1e-12)

    def test_degenerate_and_diagonal(self):
        np.testing.assert_allclose(eigvalsh(np.diag([3.0, 1.0, 1.0, -2.0])), [-2, 1, 1, 3])
        np.testing.assert_allclose(eigvalsh(np.zeros((3, 3))), [0, 0, 0])


class TestTraceDistance:
    def test_identity_case(self, rng):
        rho = DensityMatrix(random_density(rng, 3))
        assert trace_distance(rho, rho) == 0.0

    def test_orthogonal_pure_states(self):
        assert trace_distance(DensityMatrix.from_state(H),
                              DensityMatrix.from_state(V)) == pytest.approx(1.0, abs=1e-15)

    def test_focal_vs_offfocal_marginal(self):
        # difference [[0, 1/2], [1/2, 0]] has eigenvalues +-1/2
        m = StateVector(np.array([1, 1]) / math.sqrt(2))
        rho_f = DensityMatrix.from_state(m)
        rho_g = DensityMatrix(np.eye(2) / 2)
        np.testing.assert_allclose(eigvalsh(rho_f.entries - rho_g.entries), [-0.5, 0.5],
                                   atol=1e-15)
        assert trace_distance(rho_f, rho_g) == pytest.approx(0.5, abs=1e-15)

    def test_symmetric(self, rng):
        a, b = DensityMatrix(random_density(rng, 4)), DensityMatrix(random_density(rng, 4))
        assert trace_distance(a, b) == pytest.approx(trace_distance(b, a), abs=1e-15)

    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 2 ** 32 - 1), dim=st.integers(2, 4))
    def test_triangle_inequality(self, seed, dim):
        rng = np.random.default_rng(seed)
        a, b, c = (DensityMatrix(random_density(rng, dim)) for _ in range(3))
        assert trace_distance(a, c) <= trace_distance(a, b) + trace_distance(b, c) + 1e-10

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            trace_distance(DensityMatrix(np.eye(2) / 2), DensityMatrix(np.eye(3) / 3))


class TestExpectation:
    def test_projector_on_own_state(self):
        assert expectation(HermitianOperator.projector([1, 0]), H) == 1.0

    def test_born_rule(self):
        plus = StateVector(np.array([1, 1]) / math.sqrt(2))
        assert expectation(HermitianOperator.projector([1, 0]), plus) == pytest.approx(0.5)

    def test_matches_triple_loop(self, rng):
        m = random_hermitian(rng, 4)
        psi = random_state(rng, 4) * 1.7  # unnormalized on purpose
        expected = 0j
        for i in range(4):
            for j in range(4):
                expected += psi[i].conjugate() * m[i, j] * psi[j]
        assert expectation(HermitianOperator(m), StateVector(psi)) == pytest.approx(
            expected.real, rel=1e-12)

    def test_imaginary_residue_is_an_error(self):
        op = HermitianOperator(np.eye(2))
        object.__setattr__(op, "entries", np.array([[0, 1], [-1, 0]], dtype=complex))
        psi = StateVector(np.array([1, 1j]) / math.sqrt(2))
        with pytest.raises(ValueError, match="imaginary"):
            expectation(op, psi)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            expectation(HermitianOperator(np.eye(3)), H)


class TestNormalize:
    def test_simple(self):
        np.testing.assert_array_equal(normalize(StateVector([2, 0])).amplitudes, [1, 0])

    def test_literal_superposition_form(self):
        # (alpha/sqrt2, beta/sqrt2) has norm 1/sqrt2, so normalizing scales by sqrt2
        alpha, beta = np.exp(0.3j) * 0.6, np.exp(-1.1j) * 0.8
        lit = StateVector(np.array([alpha, beta]) / math.sqrt(2))
        assert lit.norm == pytest.approx(1 / math.sqrt(2), abs=1e-15)
        np.testing.assert_allclose(normalize(lit).amplitudes, [alpha, beta], atol=1e-15)

    def test_tiny_amplitudes_do_not_underflow(self):
        psi = StateVector([1e-200, -1e-200j])
        assert psi.norm == pytest.approx(math.sqrt(2) * 1e-200, rel=1e-15)
        np.testing.assert_allclose(normalize(psi).amplitudes,
                                   [1 / math.sqrt(2), -1j / math.sqrt(2)], atol=1e-15)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.complex_numbers(max_magnitude=1e3, allow_nan=False,
                                       allow_infinity=False), min_size=1, max_size=8))
    def test_unit_norm_and_idempotent(self, amps):
        psi = StateVector(amps)
        if not any(amps):
            with pytest.raises(ZeroNormError):
                normalize(psi)
            return
        once = normalize(psi)
        assert abs(once.norm - 1.0) < 1e-12
        np.testing.assert_allclose(normalize(once).amplitudes, once.amplitudes,
                                   rtol=0, atol=1e-12)

    def test_zero_vector(self):
        with pytest.raises(ZeroNormError):
            normalize(StateVector([0, 0]))


class TestTypes:
    def test_label_count_must_match(self):
        with pytest.raises(DimensionMismatchError):
            StateVector([1, 0], ("a",))

    def test_values_are_read_only(self):
        with pytest.raises(ValueError):
            H.amplitudes[0] = 3

    def test_non_hermitian_density_rejected(self):
        with pytest.raises(ValueError):
            DensityMatrix(np.array([[0.5, 1], [0, 0.5]]))

    def test_density_invariants(self, rng):
        rho = DensityMatrix(random_density(rng, 4))
        assert rho.is_positive()
        assert abs(rho.trace - 1) < 1e-12
        assert not DensityMatrix(np.diag([1.5, -0.5])).is_positive()

    def test_layout_index_is_a_major(self):
        layout = BipartiteLayout(2, 3)
        assert [layout.index(a, b) for a in range(2) for b in range(3)] == list(range(6))
