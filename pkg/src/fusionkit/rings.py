"""Fusion rings: nonnegative integer structure tensors with a distinguished
unit and a dual involution.

A ring of rank r is stored as the tensor ``N[i][j][k]`` (0-based; the unit is
index 0) giving the coefficient of basis element k in the product of elements
i and j.  ``fusion_matrix(ring, i)`` is the left-multiplication matrix
``M_i[j, k] = N[i][j][k]``; its Perron-Frobenius radius is the quantum
dimension ``d_i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .linalg import pf_eigen

__all__ = [
    "FusionRing",
    "Violation",
    "RingProfile",
    "validate",
    "is_valid",
    "fusion_matrix",
    "profile",
    "character_table",
    "cyclic_ring",
    "fibonacci_ring",
    "product_ring",
    "group_ring_from_table",
]


@dataclass(frozen=True, eq=False)
class FusionRing:
    """Fusion ring data: name, structure tensor N (r x r x r, nonnegative
    integers), and the dual involution (0-based permutation fixing 0).

    Construction enforces the structural invariants (shape, integrality,
    nonnegativity, involutive dual fixing the unit); the ring axioms that
    involve N itself are checked by :func:`validate`.
    """

    name: str
    N: np.ndarray
    dual: Tuple[int, ...]

    def __post_init__(self) -> None:
        N = np.asarray(self.N)
        if N.ndim != 3 or len(set(N.shape)) != 1:
            raise ValueError(f"structure tensor must be r x r x r, got shape {N.shape}")
        if not np.issubdtype(N.dtype, np.integer):
            if not np.all(N == np.round(N)):
                raise ValueError("structure tensor entries must be integers")
            N = N.astype(np.int64)
        else:
            N = N.astype(np.int64)
        if N.size and N.min() < 0:
            raise ValueError("structure tensor entries must be nonnegative")
        r = N.shape[0]
        dual = tuple(int(d) for d in self.dual)
        if sorted(dual) != list(range(r)):
            raise ValueError("dual must be a permutation of 0..r-1")
        if any(dual[dual[i]] != i for i in range(r)):
            raise ValueError("dual must be an involution")
        if r and dual[0] != 0:
            raise ValueError("dual must fix the unit (index 0)")
        N.flags.writeable = False
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "dual", dual)

    @property
    def rank(self) -> int:
        return self.N.shape[0]

    def is_commutative(self) -> bool:
        """Exact integer check that all fusion matrices pairwise commute."""
        mats = [self.N[i] for i in range(self.rank)]
        return all(
            np.array_equal(mats[i] @ mats[j], mats[j] @ mats[i])
            for i in range(self.rank)
            for j in range(i + 1, self.rank)
        )


@dataclass(frozen=True)
class Violation:
    """A single failed ring-axiom check."""

    kind: str
    indices: Tuple[int, ...]
    message: str
    warning: bool = False


@dataclass
class RingProfile:
    """Perron data of a ring: quantum dimensions, their squared sum, and the
    (d_i^2, multiplicity) type vector."""

    dims: np.ndarray
    pf_dim: float
    type_vector: List[Tuple[float, int]]


def fusion_matrix(ring: FusionRing, i: int) -> np.ndarray:
    """Left-multiplication matrix M_i[j, k] = N[i][j][k] (0-based index i)."""
    if not 0 <= i < ring.rank:
        raise ValueError(f"basis index {i} out of range for rank {ring.rank}")
    return np.array(ring.N[i], dtype=np.int64)


def validate(ring: FusionRing) -> List[Violation]:
    """Check the ring axioms; returns a list of violations (empty = valid).

    Errors: unit row/column structure, duality (N[i][j][0] = N[j][i][0] =
    [dual(i) == j]), associativity.  The transpose property
    M_{dual(i)} = M_i^T is reported as a warning, not an error.
    """
    N = ring.N
    r = ring.rank
    out: List[Violation] = []
    eye = np.eye(r, dtype=np.int64)
    if not np.array_equal(N[0], eye):
        for j, k in zip(*np.nonzero(N[0] != eye)):
            out.append(Violation("unit", (0, int(j), int(k)), "left unit row structure broken"))
    if not np.array_equal(N[:, 0, :], eye):
        for i, k in zip(*np.nonzero(N[:, 0, :] != eye)):
            out.append(Violation("unit", (int(i), 0, int(k)), "right unit column structure broken"))
    dual_delta = np.zeros((r, r), dtype=np.int64)
    for i in range(r):
        dual_delta[i, ring.dual[i]] = 1
    if not np.array_equal(N[:, :, 0], dual_delta):
        for i, j in zip(*np.nonzero(N[:, :, 0] != dual_delta)):
            out.append(
                Violation(
                    "duality",
                    (int(i), int(j), 0),
                    f"N[{i}][{j}][0] must be {dual_delta[i, j]} (dual({i}) = {ring.dual[i]})",
                )
            )
    left = np.einsum("ijm,mkl->ijkl", N, N)
    right = np.einsum("jkm,iml->ijkl", N, N)
    if not np.array_equal(left, right):
        for i, j, k, l in zip(*np.nonzero(left != right)):
            out.append(
                Violation(
                    "associativity",
                    (int(i), int(j), int(k), int(l)),
                    f"sum_m N[{i}][{j}][m] N[m][{k}][{l}] = {left[i, j, k, l]} != "
                    f"{right[i, j, k, l]} = sum_m N[{j}][{k}][m] N[{i}][m][{l}]",
                )
            )
    for i in range(r):
        if not np.array_equal(N[ring.dual[i]], N[i].T):
            out.append(
                Violation(
                    "transpose",
                    (i,),
                    f"M_dual({i}) != M_{i}^T (flagged as warning)",
                    warning=True,
                )
            )
    return out


def is_valid(ring: FusionRing) -> bool:
    """True when validate() reports no non-warning violations."""
    return not any(not v.warning for v in validate(ring))


def profile(ring: FusionRing) -> RingProfile:
    """Quantum dimensions d_i (Perron radii of the fusion matrices), their
    squared sum, and the sorted (d_i^2, multiplicity) type vector.

    Also cross-checks each operator norm ||M_i||_2 against d_i within 1e-8
    relative and raises ``ArithmeticError`` on mismatch.
    """
    dims = np.empty(ring.rank)
    for i in range(ring.rank):
        M = fusion_matrix(ring, i).astype(float)
        d = pf_eigen(M).radius
        opnorm = float(np.sqrt(np.linalg.eigvalsh(M.T @ M)[-1]))
        if abs(opnorm - d) > 1e-8 * (1.0 + d):
            raise ArithmeticError(
                f"operator norm {opnorm} of M_{i} disagrees with Perron radius {d}"
            )
        dims[i] = d
    sq = np.sort(dims**2)
    type_vector: List[Tuple[float, int]] = []
    for v in sq:
        if type_vector and abs(v - type_vector[-1][0]) <= 1e-6 * (1.0 + abs(v)):
            type_vector[-1] = (type_vector[-1][0], type_vector[-1][1] + 1)
        else:
            type_vector.append((float(v), 1))
    return RingProfile(dims=dims, pf_dim=float((dims**2).sum()), type_vector=type_vector)


def character_table(ring: FusionRing, max_attempts: int = 3) -> np.ndarray:
    """Simultaneous eigenvalue table of a commutative fusion ring.

    Row i lists the eigenvalues of M_i along one orthonormal basis that
    diagonalizes every fusion matrix (computed by diagonalizing a random
    Hermitian combination of the family, which is *-closed because
    M_dual(i) = M_i^T).  Column 0 is the Perron column (entries d_i);
    remaining columns are ordered by descending second-row value.  Raises
    ``ValueError`` for non-commutative rings and ``ArithmeticError`` when
    the joint diagonalization residual exceeds 1e-8.
    """
    if not ring.is_commutative():
        raise ValueError("character_table requires a commutative ring")
    r = ring.rank
    mats = [fusion_matrix(ring, i).astype(float) for i in range(r)]
    scale = max(1.0, max(float(np.abs(M).max()) for M in mats))
    last_residual = np.inf
    for attempt in range(max_attempts):
        rng = np.random.default_rng(0xF05107 + attempt)
        coeff = rng.standard_normal(r) + 1j * rng.standard_normal(r)
        C = sum(c * M for c, M in zip(coeff, mats))
        H = C + C.conj().T
        _, U = np.linalg.eigh(H)
        table = np.empty((r, r), dtype=complex)
        residual = 0.0
        for i, M in enumerate(mats):
            D = U.conj().T @ M @ U
            table[i] = np.diag(D)
            residual = max(residual, float(np.abs(D - np.diag(np.diag(D))).max()))
        if residual <= 1e-8 * scale:
            break
        last_residual = residual
    else:
        raise ArithmeticError(
            f"joint diagonalization residual {last_residual} exceeds tolerance"
        )
    dims = profile(ring).dims
    pf_col = int(np.argmin([np.abs(table[:, j] - dims).max() for j in range(r)]))
    rest = [j for j in range(r) if j != pf_col]
    rest.sort(key=lambda j: (-table[1, j].real, -table[1, j].imag) if r > 1 else 0)
    table = table[:, [pf_col] + rest]
    if np.abs(table.imag).max() <= 1e-10 * scale:
        table = np.ascontiguousarray(table.real)
    return table


def cyclic_ring(n: int) -> FusionRing:
    """Group ring of Z_n: N[i][j][k] = [i + j = k mod n], dual(i) = -i mod n."""
    if n < 1:
        raise ValueError("cyclic_ring requires n >= 1")
    N = np.zeros((n, n, n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            N[i, j, (i + j) % n] = 1
    dual = tuple((-i) % n for i in range(n))
    return FusionRing(name=f"Z{n}", N=N, dual=dual)


def fibonacci_ring() -> FusionRing:
    """Rank-2 ring with x*x = 1 + x (both elements self-dual)."""
    N = np.zeros((2, 2, 2), dtype=np.int64)
    N[0] = np.eye(2, dtype=np.int64)
    N[1, 0, 1] = 1
    N[1, 1, 0] = 1
    N[1, 1, 1] = 1
    return FusionRing(name="fib", N=N, dual=(0, 1))


def product_ring(a: FusionRing, b: FusionRing, name: Optional[str] = None) -> FusionRing:
    """Tensor product ring on pairs (i1, i2) with componentwise fusion."""
    ra, rb = a.rank, b.rank
    N = np.einsum("ijk,pqr->ipjqkr", a.N, b.N).reshape(ra * rb, ra * rb, ra * rb)
    dual = tuple(a.dual[i] * rb + b.dual[p] for i in range(ra) for p in range(rb))
    return FusionRing(name=name or f"{a.name}x{b.name}", N=N, dual=dual)


def group_ring_from_table(table: Sequence[Sequence[int]], name: str = "group") -> FusionRing:
    """Group ring from a Cayley table ``table[i][j] = index of g_i g_j``
    (identity must be index 0)."""
    T = np.asarray(table, dtype=np.int64)
    n = T.shape[0]
    if T.shape != (n, n):
        raise ValueError("Cayley table must be square")
    if not np.array_equal(T[0], np.arange(n)) or not np.array_equal(T[:, 0], np.arange(n)):
        raise ValueError("Cayley table identity must be index 0")
    N = np.zeros((n, n, n), dtype=np.int64)
    inv = [-1] * n
    for i in range(n):
        for j in range(n):
            N[i, j, T[i, j]] = 1
            if T[i, j] == 0:
                inv[i] = j
    if any(v < 0 for v in inv):
        raise ValueError("Cayley table has an element without an inverse")
    return FusionRing(name=name, N=N, dual=tuple(inv))
