"""Spectral kernels: symmetric eigensolves, three-way PSD verdicts with an
extended-precision borderline retry, Perron-Frobenius data for nonnegative
matrices, and tensor/entrywise matrix powers.

Margins are relative: ``margin = lambda_min / (1 + spectral_norm)``.  A
verdict ``Fails`` only when the margin is decisively negative, ``Passes``
when the minimum eigenvalue is nonnegative up to float noise, and
``Inconclusive`` in the narrow band where neither call is safe even after a
30-significant-digit retry.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional

import mpmath
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

__all__ = [
    "PASSES",
    "FAILS",
    "INCONCLUSIVE",
    "ZERO_SNAP",
    "RETRY_DIM_CAP",
    "CapacityError",
    "PsdPolicy",
    "CriterionVerdict",
    "PfResult",
    "sym_eig",
    "psd_verdict",
    "pf_eigen",
    "is_irreducible",
    "kron_power",
    "hadamard_power",
]

PASSES = "Passes"
FAILS = "Fails"
INCONCLUSIVE = "Inconclusive"

#: Relative margins at least this close to zero are treated as exact-zero
#: boundary eigenvalues (float64 noise floor).  Kept as a module constant so
#: :class:`PsdPolicy` stays a two-field policy.
ZERO_SNAP = 1e-12

#: Largest matrix dimension retried at extended precision; mpmath eigensolves
#: are pure Python and O(n^3).
RETRY_DIM_CAP = 64

#: Significant digits used for the borderline retry.
RETRY_DPS = 35


class CapacityError(RuntimeError):
    """Raised when a requested dense operator would exceed the size cap."""


@dataclass(frozen=True)
class PsdPolicy:
    """Tolerance policy for PSD verdicts.

    rel_tol : decisive threshold on the relative margin (default 1e-8).
    inconclusive_band : |margin| below this triggers the extended-precision
        retry before classification (default 10x rel_tol).
    """

    rel_tol: float = 1e-8
    inconclusive_band: float = 1e-7

    def __post_init__(self) -> None:
        if not (0.0 < self.rel_tol < self.inconclusive_band < 1.0):
            raise ValueError(
                "require 0 < rel_tol < inconclusive_band < 1, got "
                f"rel_tol={self.rel_tol}, inconclusive_band={self.inconclusive_band}"
            )


@dataclass
class CriterionVerdict:
    """Outcome of a positivity check.

    status : one of ``Passes`` / ``Fails`` / ``Inconclusive``.
    lambda_min : smallest eigenvalue found (best available precision).
    spectral_norm : largest eigenvalue magnitude.
    margin : lambda_min / (1 + spectral_norm).
    witness_vector : unit eigenvector for lambda_min (populated on Fails).
    witness_triple : index triple for Schur-mode failures.
    retried : True when the extended-precision retry ran.
    """

    status: str
    lambda_min: float
    spectral_norm: float
    margin: float
    policy: PsdPolicy
    witness_vector: Optional[np.ndarray] = None
    witness_triple: Optional[tuple] = None
    retried: bool = False
    dim: int = 0
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.status == PASSES

    @property
    def failed(self) -> bool:
        return self.status == FAILS

    def to_dict(self) -> dict:
        out = {
            "status": self.status,
            "lambda_min": float(self.lambda_min),
            "spectral_norm": float(self.spectral_norm),
            "margin": float(self.margin),
            "rel_tol": self.policy.rel_tol,
            "inconclusive_band": self.policy.inconclusive_band,
            "retried": self.retried,
            "dim": self.dim,
        }
        if self.note:
            out["note"] = self.note
        if self.witness_triple is not None:
            out["witness_triple"] = [int(j) for j in self.witness_triple]
        if self.witness_vector is not None:
            v = np.asarray(self.witness_vector)
            if np.iscomplexobj(v):
                out["witness_vector"] = [[float(z.real), float(z.imag)] for z in v]
            else:
                out["witness_vector"] = [float(z) for z in v]
        return out


@dataclass
class PfResult:
    """Perron-Frobenius data of a nonnegative square matrix.

    radius : spectral radius r >= 0.
    right / left : nonnegative unit eigenvectors for r of A and A^T.
    irreducible : exact strong-connectivity of the support digraph.
    simple : True when r has algebraic multiplicity one (one strongly
        connected component attains the maximal component radius).
    cw_bounds : final Collatz-Wielandt enclosure certified on the attaining
        component.
    """

    radius: float
    right: np.ndarray
    left: np.ndarray
    irreducible: bool
    simple: bool
    residual_right: float
    residual_left: float
    cw_bounds: tuple = (0.0, 0.0)


def _as_square(A, name: str = "matrix") -> np.ndarray:
    M = np.asarray(A)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} has non-finite entries")
    return M


def _check_hermitian(M: np.ndarray, rtol: float = 1e-12) -> np.ndarray:
    scale = max(1.0, float(np.abs(M).max()) if M.size else 1.0)
    if np.abs(M - M.conj().T).max() > rtol * scale:
        raise ValueError("matrix is not symmetric/Hermitian within tolerance")
    if np.iscomplexobj(M) and np.abs(M.imag).max() <= rtol * scale:
        M = M.real  # real-symmetric fast path
    return M


def sym_eig(A):
    """Eigendecomposition of a real-symmetric (or Hermitian) matrix.

    Returns ``(w, V)`` with eigenvalues ``w`` ascending and orthonormal
    eigenvector columns ``V``.  Raises ``ValueError`` on non-square or
    non-symmetric input (1e-12 relative).
    """
    M = _check_hermitian(_as_square(A, "sym_eig input"))
    w, V = np.linalg.eigh(M)
    return w, V


def _mp_margin(M: np.ndarray):
    """(lambda_min, spectral_norm, margin) of M at RETRY_DPS significant digits."""
    with mpmath.workdps(RETRY_DPS):
        n = M.shape[0]
        if np.iscomplexobj(M):
            mat = mpmath.matrix(
                [[mpmath.mpc(M[i, j]) for j in range(n)] for i in range(n)]
            )
            eigs = mpmath.mp.eighe(mat, eigvals_only=True)
        else:
            mat = mpmath.matrix([[mpmath.mpf(float(M[i, j])) for j in range(n)] for i in range(n)])
            eigs = mpmath.mp.eigsy(mat, eigvals_only=True)
        vals = [eigs[i] for i in range(n)]
        lam_min = min(vals)
        snorm = max(abs(v) for v in vals) if vals else mpmath.mpf(0)
        margin = lam_min / (1 + snorm)
        return float(lam_min), float(snorm), float(margin)


def psd_verdict(A, policy: Optional[PsdPolicy] = None, *, retry_dim_cap: int = RETRY_DIM_CAP) -> CriterionVerdict:
    """Three-way positive-semidefiniteness verdict for a Hermitian matrix.

    Classification of the relative margin ``lambda_min / (1 + ||A||_2)``:
    decisive margins (outside ``inconclusive_band``) classify directly;
    borderline margins are recomputed once at >= 30 significant digits when
    the dimension allows, then: Fails iff margin < -rel_tol, Passes iff
    margin >= -ZERO_SNAP, otherwise Inconclusive.  Failing verdicts carry a
    unit witness eigenvector.
    """
    if policy is None:
        policy = PsdPolicy()
    M = _check_hermitian(_as_square(A, "psd_verdict input"))
    n = M.shape[0]
    if n == 0:
        raise ValueError("psd_verdict input is empty")
    w = np.linalg.eigvalsh(M)
    lam_min = float(w[0])
    snorm = float(max(abs(w[0]), abs(w[-1])))
    margin = lam_min / (1.0 + snorm)

    retried = False
    if abs(margin) <= policy.inconclusive_band and n <= retry_dim_cap:
        lam_min, snorm, margin = _mp_margin(M)
        retried = True

    if margin < -policy.rel_tol:
        status = FAILS
    elif margin >= -ZERO_SNAP:
        status = PASSES
    else:
        status = INCONCLUSIVE

    witness = None
    if status == FAILS:
        wfull, V = np.linalg.eigh(M)
        witness = np.ascontiguousarray(V[:, 0])
        # report the float64 eigenpair the witness actually satisfies
        lam_min = float(wfull[0])
    return CriterionVerdict(
        status=status,
        lambda_min=lam_min,
        spectral_norm=snorm,
        margin=margin,
        policy=policy,
        witness_vector=witness,
        retried=retried,
        dim=n,
    )


def _support_components(A: np.ndarray):
    support = csr_matrix((np.abs(A) > 0.0).astype(np.int8))
    ncomp, labels = connected_components(support, directed=True, connection="strong")
    return ncomp, labels


def is_irreducible(A) -> bool:
    """Exact strong-connectivity of the support digraph of a square matrix."""
    M = _as_square(A, "is_irreducible input")
    if M.shape[0] == 1:
        return True
    ncomp, _ = _support_components(M)
    return ncomp == 1


def _component_radius(B: np.ndarray, tol: float = 1e-12, maxit: int = 200000):
    """Spectral radius of an irreducible nonnegative block via power iteration
    on I + B with a Collatz-Wielandt enclosure as the convergence certificate."""
    n = B.shape[0]
    if n == 1:
        v = float(B[0, 0])
        return v, (v, v)
    x = np.full(n, 1.0 / np.sqrt(n))
    lo, hi = 0.0, np.inf
    for _ in range(maxit):
        Bx = B @ x
        ratios = Bx / x
        lo = float(ratios.min())
        hi = float(ratios.max())
        if hi - lo <= tol * (1.0 + hi):
            break
        y = x + Bx
        x = y / np.linalg.norm(y)
    else:
        raise ArithmeticError(
            f"Collatz-Wielandt enclosure did not close within {maxit} iterations "
            f"(current bounds [{lo}, {hi}])"
        )
    return 0.5 * (lo + hi), (lo, hi)


def _dominant_vector(A: np.ndarray, r: float, tol: float = 1e-10, maxit: int = 50000) -> tuple:
    """Nonnegative unit eigenvector of A for its spectral radius r."""
    n = A.shape[0]
    x = np.full(n, 1.0 / np.sqrt(n))
    for it in range(maxit):
        res = float(np.abs(A @ x - r * x).max())
        if res <= tol * (1.0 + r):
            break
        y = x + A @ x
        nrm = np.linalg.norm(y)
        if nrm == 0.0:
            break
        x = y / nrm
    else:
        x = _nullspace_nonneg(A, r)
        res = float(np.abs(A @ x - r * x).max())
        if res > 1e-8 * (1.0 + r):
            raise ArithmeticError("failed to extract a Perron eigenvector")
    x = np.where(np.abs(x) < 1e-14, 0.0, x)
    if x.sum() < 0:
        x = -x
    x = np.clip(x, 0.0, None)
    nrm = np.linalg.norm(x)
    if nrm == 0.0:
        raise ArithmeticError("Perron eigenvector collapsed to zero")
    x = x / nrm
    return x, float(np.abs(A @ x - r * x).max())


def _nullspace_nonneg(A: np.ndarray, r: float) -> np.ndarray:
    """Nonnegative vector in the kernel of (A - r I), for defective corners
    where plain power iteration converges only algebraically."""
    n = A.shape[0]
    _, s, Vt = np.linalg.svd(A - r * np.eye(n))
    smax = s[0] if len(s) else 0.0
    null = Vt[s <= max(smax, 1.0) * 1e-10].T if len(s) else np.eye(n)
    if null.shape[1] == 0:
        null = Vt[-1:].T
    candidates = []
    ones = np.ones(n)
    candidates.append(null @ (null.T @ ones))
    for j in range(null.shape[1]):
        candidates.append(null[:, j])
        candidates.append(-null[:, j])
    for cand in candidates:
        nrm = np.linalg.norm(cand)
        if nrm == 0.0:
            continue
        v = cand / nrm
        if v.min() >= -1e-10:
            return np.clip(v, 0.0, None)
    raise ArithmeticError("no nonnegative kernel vector found for the Perron radius")


def pf_eigen(A, tol: float = 1e-10) -> PfResult:
    """Perron-Frobenius radius and nonnegative eigenvectors of a nonnegative
    square matrix.

    The radius is certified per strongly-connected component of the support
    digraph (power iteration on I + block, Collatz-Wielandt enclosure); the
    overall radius is the component maximum and ``simple`` is True when
    exactly one component attains it within relative 1e-8.  ``ValueError``
    on negative entries.
    """
    M = np.asarray(_as_square(A, "pf_eigen input"), dtype=float)
    if M.size and M.min() < 0:
        raise ValueError("pf_eigen requires a nonnegative matrix")
    n = M.shape[0]
    ncomp, labels = _support_components(M)
    radii = []
    bounds = []
    for c in range(ncomp):
        idx = np.flatnonzero(labels == c)
        block = M[np.ix_(idx, idx)]
        rc, bd = _component_radius(block)
        radii.append(rc)
        bounds.append(bd)
    r = max(radii)
    k = int(np.argmax(radii))
    attaining = [rc for rc in radii if rc >= r * (1.0 - 1e-8) - 1e-300]
    simple = len(attaining) == 1
    right, res_r = _dominant_vector(M, r, tol=tol)
    left, res_l = _dominant_vector(M.T, r, tol=tol)
    return PfResult(
        radius=r,
        right=right,
        left=left,
        irreducible=(ncomp == 1),
        simple=simple,
        residual_right=res_r,
        residual_left=res_l,
        cw_bounds=bounds[k],
    )


def kron_power(A, n: int, size_cap: int = 20000) -> np.ndarray:
    """n-fold Kronecker power of a square matrix; n = 0 gives [[1]].

    Raises :class:`CapacityError` when the result would exceed ``size_cap``
    rows.
    """
    M = _as_square(A, "kron_power input")
    if n < 0 or int(n) != n:
        raise ValueError("kron_power exponent must be a nonnegative integer")
    rows = M.shape[0] ** n
    if rows > size_cap:
        raise CapacityError(
            f"kron_power would produce a {rows}x{rows} matrix, above the cap of {size_cap} rows"
        )
    out = np.array([[1.0]], dtype=M.dtype if n else float)
    for _ in range(int(n)):
        out = np.kron(out, M)
    return out


def hadamard_power(A, n: int) -> np.ndarray:
    """Entrywise n-th power of a square matrix; n = 0 gives the all-ones matrix."""
    M = _as_square(A, "hadamard_power input")
    if n < 0 or int(n) != n:
        raise ValueError("hadamard_power exponent must be a nonnegative integer")
    if n == 0:
        return np.ones_like(M, dtype=float if not np.iscomplexobj(M) else complex)
    return M ** int(n)
