"""Categorification-obstruction criteria tests with frozen oracle values."""

from __future__ import annotations

import numpy as np
import pytest

from fusionkit import criteria as cr
from fusionkit import linalg as la
from fusionkit import rings as fr

PHI = (1.0 + np.sqrt(5.0)) / 2.0


def test_primary_matrix_z2_spectrum():
    T = cr.primary_matrix(fr.cyclic_ring(2), 3)
    w = np.linalg.eigvalsh(T)
    assert np.abs(w - np.array([0, 0, 0, 0, 2, 2, 2, 2.0])).max() < 1e-12
    assert cr.primary_criterion(fr.cyclic_ring(2), 3).status == la.PASSES


def test_primary_matrix_fibonacci_spectrum():
    # analytic spectrum: {0 x3, 1 - phi^-4, 1 + phi^-2 x3, 1 + phi^2}
    T = cr.primary_matrix(fr.fibonacci_ring(), 3)
    w = np.sort(np.linalg.eigvalsh(T))
    expected = np.sort(
        [0.0, 0.0, 0.0, 1.0 - PHI**-4, 1.0 + PHI**-2, 1.0 + PHI**-2, 1.0 + PHI**-2, 1.0 + PHI**2]
    )
    assert np.abs(w - expected).max() < 1e-9
    v = cr.primary_criterion(fr.fibonacci_ring(), 3)
    assert v.status == la.PASSES
    assert abs(v.lambda_min) < 1e-9
    assert abs(v.spectral_norm - (1.0 + PHI**2)) < 1e-9


def test_primary_small_n_always_psd():
    # n = 1, 2 are positive semidefinite for every valid ring, including
    # non-commutative group rings
    from .test_rings import s3_ring

    for ring in (fr.cyclic_ring(5), fr.fibonacci_ring(), cr.r4k_family(3), s3_ring()):
        for n in (1, 2):
            assert cr.primary_criterion(ring, n).status == la.PASSES


def test_primary_matrix_rejects_bad_n_and_cap():
    with pytest.raises(ValueError):
        cr.primary_matrix(fr.cyclic_ring(2), 0)
    with pytest.raises(la.CapacityError, match="localized"):
        cr.primary_matrix(fr.cyclic_ring(8), 5)


def test_localized_full_set_matches_primary():
    ring = cr.r4k_family(3)
    a = cr.primary_criterion(ring, 3)
    b = cr.localized_criterion(ring, range(4), 3)
    assert abs(a.lambda_min - b.lambda_min) < 1e-12
    assert a.status == b.status


def test_localized_fibonacci_singleton():
    # T_3^{S={x}} = [1 + 1/phi] (unit contributes [1], x contributes 1/phi)
    T = cr.localized_matrix(fr.fibonacci_ring(), [1], 3)
    assert T.shape == (1, 1)
    assert abs(T[0, 0] - (1.0 + 1.0 / PHI)) < 1e-9
    assert cr.localized_criterion(fr.fibonacci_ring(), [1], 3).status == la.PASSES


def test_localized_r4k5_fails():
    v = cr.localized_criterion(cr.r4k_family(5), [1, 2], 3)
    assert v.status == la.FAILS
    assert v.lambda_min < -1e-6
    assert abs(v.lambda_min - (-1.484443)) < 1e-5
    # witness eigenpair validates by direct multiplication
    T = cr.localized_matrix(cr.r4k_family(5), [1, 2], 3)
    u = v.witness_vector
    assert np.abs(T @ u - v.lambda_min * u).max() < 1e-8


def test_localized_family_fails_for_all_k():
    for k in range(3, 13):
        v = cr.localized_criterion(cr.r4k_family(k), [1, 2], 3)
        assert v.status == la.FAILS and v.lambda_min < -1e-6


def test_localized_subset_validation():
    ring = fr.cyclic_ring(3)
    with pytest.raises(ValueError):
        cr.localized_criterion(ring, [], 3)
    with pytest.raises(ValueError):
        cr.localized_criterion(ring, [0, 0], 3)
    with pytest.raises(ValueError):
        cr.localized_criterion(ring, [3], 3)


def test_r4k_matrices_match_construction():
    ring = cr.r4k_family(3)
    assert np.array_equal(
        fr.fusion_matrix(ring, 3),
        np.array([[0, 0, 0, 1], [0, 1, 1, 3], [0, 1, 0, 3], [1, 3, 3, 1]]),
    )
    assert np.array_equal(
        fr.fusion_matrix(ring, 1),
        np.array([[0, 1, 0, 0], [1, 3, 0, 1], [0, 0, 3, 1], [0, 1, 1, 3]]),
    )
    with pytest.raises(ValueError):
        cr.r4k_family(2)


def test_r4k_family_is_valid_and_commutative():
    from .test_rings import brute_force_associative

    for k in (3, 5, 8):
        ring = cr.r4k_family(k)
        assert fr.validate(ring) == []
        assert ring.is_commutative()
    assert brute_force_associative(cr.r4k_family(5))


def test_r4k_primary_fails_at_small_k():
    v3 = cr.primary_criterion(cr.r4k_family(3), 3)
    assert v3.status == la.FAILS
    assert abs(v3.lambda_min - (-3.088540)) < 1e-5
    v4 = cr.primary_criterion(cr.r4k_family(4), 3)
    assert v4.status == la.FAILS
    assert abs(v4.lambda_min - (-5.335720)) < 1e-5


def test_testing_function_check():
    assert not cr.testing_function_check(3)
    assert cr.testing_function_check(4)  # numerically true; see docstring
    for k in range(5, 13):
        assert cr.testing_function_check(k)
    with pytest.raises(ValueError):
        cr.testing_function_check(2)


def test_schur_z2_values():
    v = cr.schur_criterion(fr.cyclic_ring(2))
    assert v.status == la.PASSES
    assert abs(v.lambda_min) < 1e-12  # minimum sum is exactly 0
    assert abs(v.spectral_norm - 2.0) < 1e-12


def test_schur_fibonacci_triple_value():
    # oracle: recompute the (x,x,x) character sum = 1 - phi^-4
    t = fr.character_table(fr.fibonacci_ring())
    sums = np.einsum("ia,ib,ic->abc", t, t, t / t[:, 0][:, None])
    assert abs(sums[1, 1, 1] - (1.0 - PHI**-4)) < 1e-9
    v = cr.schur_criterion(fr.fibonacci_ring())
    assert v.status == la.PASSES


def test_schur_agrees_with_primary_spectrum():
    # spectral identity: T_3 eigenvalues equal the character-sum multiset
    for ring in (fr.cyclic_ring(4), fr.fibonacci_ring(), cr.r4k_family(3)):
        t = np.asarray(fr.character_table(ring), dtype=complex)
        sums = np.einsum("ia,ib,ic->abc", t, t, t / t[:, 0][:, None]).real
        w = np.linalg.eigvalsh(cr.primary_matrix(ring, 3))
        assert np.abs(np.sort(sums.flatten()) - np.sort(w)).max() < 1e-6
        assert cr.schur_criterion(ring).status == cr.primary_criterion(ring, 3).status


def test_schur_failing_witness_triple():
    v = cr.schur_criterion(cr.r4k_family(3))
    assert v.status == la.FAILS
    assert v.witness_triple is not None and len(v.witness_triple) == 3
    # recompute the sum at the witness triple
    t = np.asarray(fr.character_table(cr.r4k_family(3)), dtype=complex)
    sums = np.einsum("ia,ib,ic->abc", t, t, t / t[:, 0][:, None]).real
    assert abs(sums[v.witness_triple] - v.lambda_min) < 1e-9


def test_schur_rejects_noncommutative():
    from .test_rings import s3_ring

    with pytest.raises(ValueError):
        cr.schur_criterion(s3_ring())


def test_twisted_identity_matches_localized():
    ring = cr.r4k_family(5)
    a = cr.localized_criterion(ring, [1, 2], 3)
    b = cr.reduced_twisted_criterion(ring, [1, 2], 3, unitaries=[np.eye(2)], mode="twisted")
    assert b.status == a.status == la.FAILS
    assert abs(a.lambda_min - b.lambda_min) < 1e-9


def test_twisted_conjugation_preserves_spectrum():
    ring = fr.fibonacci_ring()
    U = cr.default_unitaries(2, 3, seed=42)[2]
    a = cr.localized_criterion(ring, [0, 1], 3)
    b = cr.reduced_twisted_criterion(ring, [0, 1], 3, unitaries=[U], mode="twisted")
    assert abs(a.lambda_min - b.lambda_min) < 1e-9


def test_reduced_mode_values():
    # Z2 reduced sum: I + M = [[1,1],[1,1]], boundary PSD
    v = cr.reduced_twisted_criterion(fr.cyclic_ring(2), None, 3, mode="reduced")
    assert v.status == la.PASSES
    assert abs(v.lambda_min) < 1e-12
    # Fibonacci reduced sum: entrywise cube keeps M, so T = I + [[0,1],[1,1]]/phi
    T = np.eye(2) + np.array([[0.0, 1.0], [1.0, 1.0]]) / PHI
    expected = np.linalg.eigvalsh(T)[0]
    v2 = cr.reduced_twisted_criterion(fr.fibonacci_ring(), None, 3, mode="reduced")
    assert abs(v2.lambda_min - expected) < 1e-9


def test_reduced_twisted_sampling_passes_on_categorifiable():
    # 100 seeded twists on group rings and Fibonacci: margins >= -1e-8
    for ring in (fr.cyclic_ring(3), fr.fibonacci_ring()):
        us = cr.default_unitaries(ring.rank, 100, seed=7)
        v = cr.reduced_twisted_criterion(ring, None, 3, unitaries=us)
        assert v.status != la.FAILS
        assert v.margin >= -1e-8
        assert "twist" in v.note


def test_default_unitaries_structure():
    us = cr.default_unitaries(3, 5, seed=11)
    assert len(us) == 5
    assert np.abs(us[0] - np.eye(3)).max() < 1e-14
    dft = np.exp(2j * np.pi * np.outer(np.arange(3), np.arange(3)) / 3) / np.sqrt(3)
    assert np.abs(us[1] - dft).max() < 1e-12
    for U in us:
        assert np.abs(U.conj().T @ U - np.eye(3)).max() < 1e-12
    again = cr.default_unitaries(3, 5, seed=11)
    assert all(np.array_equal(a, b) for a, b in zip(us, again))


def test_reduced_twisted_validation():
    ring = fr.cyclic_ring(2)
    with pytest.raises(ValueError):
        cr.reduced_twisted_criterion(ring, None, 3, mode="bogus")
    with pytest.raises(ValueError):
        cr.reduced_twisted_criterion(ring, None, 3, unitaries=[np.ones((2, 2))])
    with pytest.raises(ValueError):
        cr.reduced_twisted_criterion(ring, None, 3, unitaries=[np.eye(3)])


def test_partial_data_witness():
    pd = cr.PartialData(s=0, ell=3, t=3, k=0, d2=3, d3=3)
    assert cr.partial_data_criterion(pd, n_max=3) == (2, 1, 1)
    # at the witness: lhs = 1 < 324 = (3^2 + 3^2)^2 = rhs
    lhs = (0 * 3 + 0 * 3 + 1.0) * (0 * 3 + 0 * 3 + 1.0)
    rhs = (3.0**2 + 3.0**2) ** 2
    assert lhs == 1.0 and rhs == 324.0


def test_partial_data_no_witness():
    pd = cr.PartialData(s=1, ell=1, t=1, k=1, d2=2, d3=2)
    assert cr.partial_data_criterion(pd, n_max=8) is None


def test_partial_data_validation():
    with pytest.raises(ValueError):
        cr.PartialData(s=-1, ell=0, t=0, k=0, d2=2, d3=2)
    with pytest.raises(ValueError):
        cr.PartialData(s=0, ell=0, t=0, k=0, d2=0.5, d3=2)
    with pytest.raises(ValueError):
        cr.partial_data_criterion(cr.PartialData(0, 0, 0, 0, 2, 2), n_max=1)


def test_primary_matrix_symmetry():
    for ring in (fr.cyclic_ring(5), cr.r4k_family(4)):
        T = cr.primary_matrix(ring, 2)
        assert np.abs(T - T.T).max() == 0.0
