"""Tests for CP maps: Choi positivity, Perron data, irreducibility,
commutants, and fixed-space structure."""

import numpy as np
import pytest

from fusionkit.channels import (
    TRANSFER_DIM_CAP,
    ChannelPfResult,
    QuantumChannel,
    channel_irreducible,
    channel_pf,
    choi_matrix,
    commutant_basis,
    cp_check,
    fixed_space_basis,
    pf_space_structure_check,
    transfer_matrix,
)
from fusionkit.linalg import CapacityError

E00 = np.array([[1, 0], [0, 0]], dtype=complex)
E01 = np.array([[0, 1], [0, 0]], dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
HAD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def damp_channel() -> QuantumChannel:
    """Kraus {|0><0|, |0><1|}: trace preserving, fixed state |0><0|."""
    return QuantumChannel(kraus=(E00, E01))


def mix_channel() -> QuantumChannel:
    """Kraus {X, H}/sqrt(2): unital, trace preserving, irreducible."""
    return QuantumChannel(kraus=(X / np.sqrt(2), HAD / np.sqrt(2)))


def pinch_channel() -> QuantumChannel:
    """Block pinching on dim 3 with blocks {0,1} and {2}."""
    P1 = np.diag([1.0, 1.0, 0.0]).astype(complex)
    P2 = np.diag([0.0, 0.0, 1.0]).astype(complex)
    return QuantumChannel(kraus=(P1, P2))


def depolarizing(p: float) -> QuantumChannel:
    return QuantumChannel(
        kraus=(
            np.sqrt(1 - 3 * p / 4) * np.eye(2, dtype=complex),
            np.sqrt(p / 4) * X,
            np.sqrt(p / 4) * Y,
            np.sqrt(p / 4) * Z,
        )
    )


def random_tp_channel(rng, dim: int, n_kraus: int) -> QuantumChannel:
    A = rng.standard_normal((n_kraus, dim, dim)) + 1j * rng.standard_normal(
        (n_kraus, dim, dim)
    )
    S = sum(a.conj().T @ a for a in A)
    w, V = np.linalg.eigh(S)
    S_inv_half = (V / np.sqrt(w)) @ V.conj().T
    return QuantumChannel(kraus=tuple(a @ S_inv_half for a in A))


class TestQuantumChannel:
    def test_validation(self):
        with pytest.raises(ValueError, match="at least one"):
            QuantumChannel(kraus=())
        with pytest.raises(ValueError, match="square"):
            QuantumChannel(kraus=(np.zeros((2, 3)),))
        with pytest.raises(ValueError, match="one dimension"):
            QuantumChannel(kraus=(np.eye(2), np.eye(3)))

    def test_apply_and_adjoint(self):
        ch = damp_channel()
        rho = np.array([[0.25, 0.1], [0.1, 0.75]], dtype=complex)
        out = ch(rho)
        assert np.allclose(out, np.trace(rho) * E00, atol=1e-14)
        # HS duality: <Phi*(y), x> = <y, Phi(x)>
        y = np.array([[0.3, 0.2j], [-0.2j, 0.5]], dtype=complex)
        lhs = np.trace(ch.adjoint_apply(y).conj().T @ rho)
        rhs = np.trace(y.conj().T @ ch(rho))
        assert lhs == pytest.approx(rhs, abs=1e-13)

    def test_trace_preserving_and_unital_flags(self):
        assert damp_channel().is_trace_preserving()
        assert not damp_channel().is_unital()
        dep = depolarizing(0.7)
        assert dep.is_trace_preserving()
        assert dep.is_unital()
        half = QuantumChannel(kraus=(np.eye(2) / 2.0,))
        assert not half.is_trace_preserving()


class TestChoiAndCp:
    def test_identity_channel_choi(self):
        C = choi_matrix(QuantumChannel(kraus=(np.eye(2),)))
        eigs = np.sort(np.linalg.eigvalsh(C))
        assert np.allclose(eigs, [0.0, 0.0, 0.0, 2.0], atol=1e-12)

    def test_callable_agrees_with_kraus(self):
        ch = mix_channel()
        C1 = choi_matrix(ch)
        C2 = choi_matrix(lambda x: ch(x), dim=2)
        assert np.abs(C1 - C2).max() <= 1e-13

    def test_callable_requires_dim(self):
        with pytest.raises(ValueError, match="dim"):
            choi_matrix(lambda x: x)

    def test_transpose_map_choi_is_swap(self):
        C = choi_matrix(lambda x: x.T, dim=2)
        swap = np.zeros((4, 4))
        swap[0, 0] = swap[3, 3] = swap[1, 2] = swap[2, 1] = 1.0
        assert np.allclose(C, swap, atol=1e-14)

    def test_transpose_map_fails_cp(self):
        verdict = cp_check(lambda x: x.T, dim=2)
        assert verdict.failed
        assert verdict.lambda_min == pytest.approx(-1.0, abs=1e-12)

    def test_kraus_channels_pass_cp(self):
        rng = np.random.default_rng(0xC401)
        for dim, n_kraus in [(2, 1), (3, 2), (4, 3)]:
            ch = random_tp_channel(rng, dim, n_kraus)
            verdict = cp_check(ch)
            assert verdict.passed, verdict

    def test_non_hermiticity_preserving_map(self):
        N = np.array([[0, 1], [0, 0]], dtype=complex)
        verdict = cp_check(lambda x: N @ x, dim=2)
        assert verdict.failed
        assert "not Hermitian" in verdict.note


class TestTransferAndPf:
    def test_transfer_vec_identity(self):
        rng = np.random.default_rng(3)
        ch = mix_channel()
        K = transfer_matrix(ch)
        x = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        assert np.allclose(K @ x.reshape(-1), ch(x).reshape(-1), atol=1e-13)

    def test_damp_channel_pf(self):
        pf = channel_pf(damp_channel())
        assert isinstance(pf, ChannelPfResult)
        assert pf.converged
        assert pf.radius == pytest.approx(1.0, abs=1e-12)
        assert np.abs(pf.state - E00).max() <= 1e-9
        assert np.trace(pf.state).real == pytest.approx(1.0, abs=1e-12)

    def test_non_tp_conjugation_radius(self):
        F = np.diag([2.0, 1.0]).astype(complex)
        pf = channel_pf(QuantumChannel(kraus=(F,)))
        assert pf.radius == pytest.approx(4.0, abs=1e-10)
        assert np.abs(pf.state - E00).max() <= 1e-10

    def test_depolarizing_fixed_state(self):
        pf = channel_pf(depolarizing(0.7))
        assert pf.radius == pytest.approx(1.0, abs=1e-10)
        assert np.abs(pf.state - np.eye(2) / 2).max() <= 1e-10

    def test_tp_channels_have_radius_one(self):
        rng = np.random.default_rng(0x7F01)
        for _ in range(10):
            dim = int(rng.integers(2, 6))
            ch = random_tp_channel(rng, dim, int(rng.integers(1, 4)))
            pf = channel_pf(ch)
            assert abs(pf.radius - 1.0) <= 1e-9
            assert pf.converged
            # the state is PSD and fixed
            eigs = np.linalg.eigvalsh((pf.state + pf.state.conj().T) / 2)
            assert eigs.min() >= -1e-12
            assert np.abs(ch(pf.state) - pf.state).max() <= 1e-9

    def test_dimension_cap(self):
        big = QuantumChannel(kraus=(np.eye(TRANSFER_DIM_CAP + 1),))
        with pytest.raises(CapacityError):
            transfer_matrix(big)


class TestFixedSpace:
    def test_damp_fixed_space_is_one_dimensional(self):
        basis = fixed_space_basis(damp_channel())
        assert len(basis) == 1
        b = basis[0]
        # proportional to |0><0|
        assert np.abs(b / b[0, 0] - E00).max() <= 1e-9

    def test_pinch_fixed_space_dimension(self):
        # block-diagonal algebra M_2 + M_1: dimension 5
        assert len(fixed_space_basis(pinch_channel())) == 5

    def test_mix_fixed_space_is_scalar(self):
        basis = fixed_space_basis(mix_channel())
        assert len(basis) == 1
        b = basis[0]
        assert np.abs(b / b[0, 0] - np.eye(2)).max() <= 1e-9


class TestIrreducibility:
    def test_damp_reducible_with_witness(self):
        rep = channel_irreducible(damp_channel())
        assert not rep.irreducible
        assert rep.certified
        assert rep.algebra_dim == 3
        P = rep.invariant_projector
        assert P is not None
        assert np.abs(P - E00).max() <= 1e-8

    def test_mix_irreducible(self):
        rep = channel_irreducible(mix_channel())
        assert rep.irreducible
        assert rep.certified
        assert rep.algebra_dim == 4

    def test_identity_channel_reducible(self):
        rep = channel_irreducible(QuantumChannel(kraus=(np.eye(2),)))
        assert not rep.irreducible
        assert rep.algebra_dim == 1
        assert rep.invariant_projector is not None

    def test_hidden_invariant_subspace_found(self):
        # nilpotent direction conjugated away from the coordinate axes: the
        # invariant subspace contains no basis vector, but eigenvector
        # closures still locate it
        rng = np.random.default_rng(11)
        M = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        Q, _ = np.linalg.qr(M)
        N = Q @ np.array([[0, 1], [0, 0]], dtype=complex) @ Q.conj().T
        ch = QuantumChannel(kraus=(np.eye(2) + N,))
        rep = channel_irreducible(ch)
        assert not rep.irreducible
        assert rep.algebra_dim == 2
        P = rep.invariant_projector
        assert P is not None
        # P projects onto span(Q e0), the kernel of N
        u = Q[:, 0]
        assert np.abs(P - np.outer(u, u.conj())).max() <= 1e-8

    def test_irreducible_channel_unique_fixed_state(self):
        rep = channel_irreducible(mix_channel())
        assert rep.irreducible
        assert len(fixed_space_basis(mix_channel())) == 1


class TestCommutant:
    def test_commutant_of_identity_is_everything(self):
        assert len(commutant_basis([np.eye(3, dtype=complex)])) == 9

    def test_commutant_of_matrix_units_is_scalars(self):
        units = []
        for j in range(2):
            for k in range(2):
                E = np.zeros((2, 2), dtype=complex)
                E[j, k] = 1.0
                units.append(E)
        basis = commutant_basis(units)
        assert len(basis) == 1
        b = basis[0]
        assert np.abs(b / b[0, 0] - np.eye(2)).max() <= 1e-10

    def test_commutant_of_two_blocks(self):
        assert len(commutant_basis([np.diag([1.0, 2.0]).astype(complex)])) == 2
        assert len(commutant_basis([np.diag([1.0, 1.0, 2.0]).astype(complex)])) == 5

    def test_adjoint_flag_matters_for_non_normal(self):
        N = np.array([[0, 1], [0, 0]], dtype=complex)
        assert len(commutant_basis([N], include_adjoints=False)) == 2
        assert len(commutant_basis([N], include_adjoints=True)) == 1

    def test_basis_is_orthonormal(self):
        basis = commutant_basis(pinch_channel().kraus)
        G = np.array([b.reshape(-1) for b in basis])
        assert np.abs(G @ G.conj().T - np.eye(len(basis))).max() <= 1e-10

    def test_validation(self):
        with pytest.raises(ValueError, match="at least one"):
            commutant_basis([])
        with pytest.raises(ValueError, match="square"):
            commutant_basis([np.zeros((2, 3))])


class TestStructure:
    def test_damp_structure(self):
        rep = pf_space_structure_check(damp_channel())
        assert rep.passed, rep
        assert rep.support_dim == 1
        assert rep.fixed_space_dim == 1
        assert rep.commutant_dim == 1
        assert rep.zeta_residual <= 1e-9

    def test_pinching_structure(self):
        rep = pf_space_structure_check(pinch_channel())
        assert rep.passed, rep
        assert rep.support_dim == 3
        assert rep.fixed_space_dim == 5
        assert rep.commutant_dim == 5
        assert rep.unital_defect <= 1e-12

    def test_irreducible_structure(self):
        rep = pf_space_structure_check(mix_channel())
        assert rep.passed, rep
        assert rep.fixed_space_dim == 1
        assert rep.commutant_dim == 1

    def test_unitary_conjugation_structure(self):
        U = np.diag(np.exp(1j * np.array([0.3, 0.3, 1.1])))
        rep = pf_space_structure_check(QuantumChannel(kraus=(U,)))
        assert rep.passed, rep
        # commutant of U: M_2 + M_1, dimension 5
        assert rep.fixed_space_dim == 5
        assert rep.commutant_dim == 5

    def test_random_tp_channels_pass(self):
        rng = np.random.default_rng(0x57A7)
        for _ in range(5):
            dim = int(rng.integers(2, 5))
            ch = random_tp_channel(rng, dim, int(rng.integers(2, 4)))
            rep = pf_space_structure_check(ch)
            assert rep.passed, rep

    def test_requires_trace_preserving(self):
        with pytest.raises(ValueError, match="trace-preserving"):
            pf_space_structure_check(QuantumChannel(kraus=(np.eye(2) / 2,)))
