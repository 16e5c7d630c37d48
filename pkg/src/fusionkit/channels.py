"""Completely positive maps in Kraus form: Choi positivity, Perron data,
irreducibility, commutants, and the structure of the fixed-point space.

Conventions: matrices act on column vectors; ``vec`` is row-major (numpy
``reshape``), so the transfer matrix of x -> sum_j F_j x F_j* is
``sum_j kron(F_j, conj(F_j))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .linalg import CapacityError, CriterionVerdict, PsdPolicy, psd_verdict

__all__ = [
    "QuantumChannel",
    "ChannelPfResult",
    "IrreducibilityReport",
    "StructureReport",
    "choi_matrix",
    "cp_check",
    "transfer_matrix",
    "channel_pf",
    "fixed_space_basis",
    "channel_irreducible",
    "commutant_basis",
    "pf_space_structure_check",
]

#: Largest Hilbert-space dimension for which dense n^2 x n^2 work is allowed.
TRANSFER_DIM_CAP = 40

_RANK_TOL = 1e-8


@dataclass(frozen=True)
class QuantumChannel:
    """CP map x -> sum_j F_j x F_j* given by a nonempty tuple of square
    Kraus operators of a common dimension."""

    kraus: Tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        if not self.kraus:
            raise ValueError("at least one Kraus operator is required")
        ops = []
        shape = None
        for F in self.kraus:
            A = np.asarray(F, dtype=complex)
            if A.ndim != 2 or A.shape[0] != A.shape[1]:
                raise ValueError("Kraus operators must be square matrices")
            if shape is None:
                shape = A.shape
            elif A.shape != shape:
                raise ValueError("Kraus operators must share one dimension")
            A = A.copy()
            A.flags.writeable = False
            ops.append(A)
        object.__setattr__(self, "kraus", tuple(ops))

    @property
    def dim(self) -> int:
        return self.kraus[0].shape[0]

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        return sum(F @ x @ F.conj().T for F in self.kraus)

    def adjoint_apply(self, y: np.ndarray) -> np.ndarray:
        """Hilbert-Schmidt adjoint y -> sum_j F_j* y F_j."""
        y = np.asarray(y, dtype=complex)
        return sum(F.conj().T @ y @ F for F in self.kraus)

    def is_trace_preserving(self, tol: float = 1e-9) -> bool:
        s = self.adjoint_apply(np.eye(self.dim))
        return bool(np.abs(s - np.eye(self.dim)).max() <= tol)

    def is_unital(self, tol: float = 1e-9) -> bool:
        s = self(np.eye(self.dim))
        return bool(np.abs(s - np.eye(self.dim)).max() <= tol)


ChannelLike = Union[QuantumChannel, Callable[[np.ndarray], np.ndarray]]


def _resolve(channel: ChannelLike, dim: Optional[int]) -> Tuple[Callable, int]:
    if isinstance(channel, QuantumChannel):
        return channel, channel.dim
    if dim is None:
        raise ValueError("dim is required when the map is given as a callable")
    return channel, int(dim)


def _check_cap(n: int) -> None:
    if n > TRANSFER_DIM_CAP:
        raise CapacityError(
            f"dimension {n} exceeds the dense-superoperator cap {TRANSFER_DIM_CAP}"
        )


def choi_matrix(channel: ChannelLike, dim: Optional[int] = None) -> np.ndarray:
    """Choi matrix sum_{j,k} E_jk (x) Phi(E_jk) of an n x n linear map.

    For a Kraus channel this equals sum_m v_m v_m* with v_m the column-major
    vectorization of F_m, and is PSD by construction.
    """
    apply, n = _resolve(channel, dim)
    _check_cap(n)
    if isinstance(channel, QuantumChannel):
        C = np.zeros((n * n, n * n), dtype=complex)
        for F in channel.kraus:
            v = F.T.reshape(-1)
            C += np.outer(v, v.conj())
        return C
    # E_jk (x) Phi(E_jk) places Phi(E_jk) at block row j, block column k
    C = np.zeros((n * n, n * n), dtype=complex)
    E = np.zeros((n, n), dtype=complex)
    for j in range(n):
        for k in range(n):
            E[j, k] = 1.0
            C[j * n : (j + 1) * n, k * n : (k + 1) * n] = np.asarray(
                apply(E), dtype=complex
            )
            E[j, k] = 0.0
    return C


def cp_check(
    channel: ChannelLike,
    dim: Optional[int] = None,
    policy: Optional[PsdPolicy] = None,
) -> CriterionVerdict:
    """Complete-positivity verdict: the map is CP iff its Choi matrix is PSD.

    A map whose Choi matrix is not Hermitian does not even preserve
    Hermiticity; the verdict Fails with an explanatory note (the eigenvalue
    data then refers to the Hermitian part).
    """
    C = choi_matrix(channel, dim)
    defect = float(np.abs(C - C.conj().T).max())
    scale = 1.0 + float(np.abs(C).max())
    H = (C + C.conj().T) / 2.0
    verdict = psd_verdict(H, policy)
    if defect > 1e-10 * scale:
        return CriterionVerdict(
            status="Fails",
            lambda_min=verdict.lambda_min,
            spectral_norm=verdict.spectral_norm,
            margin=verdict.margin,
            policy=verdict.policy,
            witness_vector=verdict.witness_vector,
            witness_triple=None,
            retried=verdict.retried,
            dim=verdict.dim,
            note=f"Choi matrix not Hermitian (defect {defect:.3e}); map is not Hermiticity-preserving",
        )
    return verdict


def transfer_matrix(channel: QuantumChannel) -> np.ndarray:
    """Dense n^2 x n^2 matrix K with vec(Phi(x)) = K vec(x) (row-major vec)."""
    _check_cap(channel.dim)
    n = channel.dim
    K = np.zeros((n * n, n * n), dtype=complex)
    for F in channel.kraus:
        K += np.kron(F, F.conj())
    return K


@dataclass
class ChannelPfResult:
    """Spectral radius of the channel and its dominant fixed state."""

    radius: float
    state: np.ndarray
    residual: float
    iterations: int
    converged: bool


def channel_pf(
    channel: QuantumChannel,
    tol: float = 1e-11,
    max_iter: int = 20000,
) -> ChannelPfResult:
    """Perron data of a CP map: spectral radius r (from the dense transfer
    matrix) and a PSD, trace-one state D with Phi(D) ~= r D.

    The state is found by damped iteration x -> (x + Phi(x)/r)/2 from the
    maximally mixed state, with PSD projection and trace normalization each
    step; damping removes oscillation from peripheral spectrum.  A
    trace-preserving channel always has r = 1 (up to roundoff).
    """
    n = channel.dim
    K = transfer_matrix(channel)
    radius = float(np.abs(np.linalg.eigvals(K)).max())
    if radius <= 0.0:
        return ChannelPfResult(0.0, np.zeros((n, n), dtype=complex), 0.0, 0, True)
    x = np.eye(n, dtype=complex) / n
    residual = np.inf
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        y = (x + channel(x) / radius) / 2.0
        y = (y + y.conj().T) / 2.0
        w, U = np.linalg.eigh(y)
        w = np.clip(w, 0.0, None)
        tr = float(w.sum())
        if tr <= 0.0:
            raise ArithmeticError("iteration collapsed to the zero matrix")
        y = (U * w) @ U.conj().T / tr
        residual = float(np.abs(channel(y) / radius - y).max())
        x = y
        if residual <= tol * (1.0 + float(np.abs(y).max())):
            converged = True
            break
    return ChannelPfResult(radius, x, residual, iterations, converged)


def fixed_space_basis(channel: QuantumChannel, tol: float = 1e-9) -> List[np.ndarray]:
    """Orthonormal (Hilbert-Schmidt) basis of {x : Phi(x) = r x} with r the
    spectral radius, via an SVD null space of the shifted transfer matrix."""
    n = channel.dim
    K = transfer_matrix(channel)
    radius = float(np.abs(np.linalg.eigvals(K)).max())
    M = K - radius * np.eye(n * n)
    _, s, Vh = np.linalg.svd(M)
    cutoff = tol * (1.0 + radius) * max(1.0, float(s.max()) if s.size else 1.0)
    null = Vh[s <= cutoff] if s.size else Vh
    return [v.reshape(n, n) for v in null.conj()]


def _orthonormal_closure(
    seeds: Sequence[np.ndarray],
    n: int,
    max_dim: int,
) -> np.ndarray:
    """Orthonormal rows spanning the multiplicative closure of the seeds
    (an algebra basis in vectorized form), capped at max_dim."""
    basis: List[np.ndarray] = []

    def try_add(mat: np.ndarray) -> bool:
        v = mat.reshape(-1).astype(complex)
        norm = np.linalg.norm(v)
        if norm <= _RANK_TOL:
            return False
        v = v / norm
        for b in basis:
            v = v - (b.conj() @ v) * b
        res = np.linalg.norm(v)
        if res <= _RANK_TOL:
            return False
        basis.append(v / res)
        return True

    for s in seeds:
        try_add(s)
        if len(basis) >= max_dim:
            return np.array(basis)
    frontier = list(range(len(basis)))
    while frontier and len(basis) < max_dim:
        new_frontier = []
        mats = [b.reshape(n, n) for b in basis]
        for i in frontier:
            for j in range(len(mats)):
                if len(basis) >= max_dim:
                    break
                for prod in (mats[i] @ mats[j], mats[j] @ mats[i]):
                    before = len(basis)
                    if try_add(prod) and len(basis) > before:
                        new_frontier.append(len(basis) - 1)
        frontier = new_frontier
    return np.array(basis) if basis else np.zeros((0, n * n), dtype=complex)


def _orbit_subspace(v: np.ndarray, ops: Sequence[np.ndarray], tol: float = _RANK_TOL) -> np.ndarray:
    """Orthonormal columns spanning the smallest subspace containing v and
    invariant under every operator in ops."""
    n = v.shape[0]
    cols: List[np.ndarray] = []

    def try_add(w: np.ndarray) -> bool:
        norm = np.linalg.norm(w)
        if norm <= tol:
            return False
        w = w / norm
        for c in cols:
            w = w - (c.conj() @ w) * c
        res = np.linalg.norm(w)
        if res <= tol:
            return False
        cols.append(w / res)
        return True

    try_add(v)
    frontier = list(cols)
    while frontier and len(cols) < n:
        nxt = []
        for w in frontier:
            for F in ops:
                before = len(cols)
                if try_add(F @ w) and len(cols) > before:
                    nxt.append(cols[-1])
        frontier = nxt
    return np.array(cols).T if cols else np.zeros((n, 0), dtype=complex)


@dataclass
class IrreducibilityReport:
    """Irreducibility of the Kraus family: no common nontrivial invariant
    subspace.  ``certified`` records that the answer follows from the computed
    dimension of the generated matrix algebra (full algebra <=> irreducible),
    at the stated rank tolerance."""

    irreducible: bool
    certified: bool
    algebra_dim: int
    invariant_projector: Optional[np.ndarray]
    note: str


def channel_irreducible(channel: QuantumChannel, seed: int = 0x1C37) -> IrreducibilityReport:
    """Decide irreducibility by computing the algebra generated by the Kraus
    operators: it is the full matrix algebra (dimension n^2) exactly when no
    common nontrivial invariant subspace exists.

    On a reducible channel the report also tries to exhibit an invariant
    subspace projector, found by closing eigenvectors of Kraus operators and
    of random algebra elements under the Kraus action; the projector is
    verified to satisfy (1-P) F_j P ~= 0 before being returned.
    """
    n = channel.dim
    _check_cap(n)
    seeds = [np.eye(n, dtype=complex)] + [F for F in channel.kraus]
    basis = _orthonormal_closure(seeds, n, n * n)
    algebra_dim = basis.shape[0]
    if algebra_dim == n * n:
        return IrreducibilityReport(
            irreducible=True,
            certified=True,
            algebra_dim=algebra_dim,
            invariant_projector=None,
            note="generated algebra is the full matrix algebra; no common invariant subspace",
        )
    # Reducible: hunt for an invariant-subspace witness.
    rng = np.random.default_rng(seed)
    candidates: List[np.ndarray] = []
    mats = [b.reshape(n, n) for b in basis]
    for F in channel.kraus:
        _, vecs = np.linalg.eig(F)
        candidates.extend(vecs.T)
    for _ in range(3):
        coeff = rng.standard_normal(len(mats)) + 1j * rng.standard_normal(len(mats))
        A = sum(c * M for c, M in zip(coeff, mats))
        _, vecs = np.linalg.eig(A)
        candidates.extend(vecs.T)
    candidates.extend(np.eye(n, dtype=complex))
    for _ in range(3):
        candidates.append(rng.standard_normal(n) + 1j * rng.standard_normal(n))
    projector = None
    for v in candidates:
        Q = _orbit_subspace(np.asarray(v, dtype=complex), channel.kraus)
        k = Q.shape[1]
        if 0 < k < n:
            P = Q @ Q.conj().T
            leak = max(
                float(np.abs((np.eye(n) - P) @ F @ P).max()) for F in channel.kraus
            )
            if leak <= 1e-7:
                projector = P
                break
    note = (
        f"generated algebra has dimension {algebra_dim} < {n * n}; "
        + (
            "invariant subspace witness attached"
            if projector is not None
            else "no invariant-subspace witness located (dimension deficit already decides)"
        )
    )
    return IrreducibilityReport(
        irreducible=False,
        certified=True,
        algebra_dim=algebra_dim,
        invariant_projector=projector,
        note=note,
    )


def commutant_basis(
    operators: Sequence[np.ndarray],
    include_adjoints: bool = True,
    tol: float = 1e-10,
) -> List[np.ndarray]:
    """Orthonormal (Hilbert-Schmidt) basis of {Y : [Y, F] = 0 for all F}
    (adding F* to the family by default, which makes the commutant a
    *-closed algebra), via an SVD null space.

    The result is verified to be closed under products and adjoints at 1e-8;
    failure raises ArithmeticError.
    """
    ops = [np.asarray(F, dtype=complex) for F in operators]
    if not ops:
        raise ValueError("at least one operator is required")
    n = ops[0].shape[0]
    if any(F.shape != (n, n) for F in ops):
        raise ValueError("operators must be square of one common dimension")
    _check_cap(n)
    fam = list(ops)
    if include_adjoints:
        fam += [F.conj().T for F in ops]
    eye = np.eye(n)
    rows = []
    for F in fam:
        # row-major vec: vec(YF) = (I (x) F^T) vec Y, vec(FY) = (F (x) I) vec Y
        rows.append(np.kron(eye, F.T) - np.kron(F, eye))
    M = np.vstack(rows)
    _, s, Vh = np.linalg.svd(M)
    scale = float(s.max()) if s.size else 1.0
    null = Vh[s <= tol * max(1.0, scale)]
    out = [v.conj().reshape(n, n) for v in null]
    # verify algebraic closure of the span (a commutant is always an algebra;
    # it is *-closed only when the family itself was made *-closed)
    if out:
        Q = np.array([y.reshape(-1) for y in out])

        def in_span(mat: np.ndarray) -> bool:
            v = mat.reshape(-1)
            r = v - Q.T @ (Q.conj() @ v)
            return np.linalg.norm(r) <= 1e-8 * (1.0 + np.linalg.norm(v))

        for a in out:
            if include_adjoints and not in_span(a.conj().T):
                raise ArithmeticError("commutant basis not closed under adjoints")
            for b in out:
                if not in_span(a @ b):
                    raise ArithmeticError("commutant basis not closed under products")
    return out


@dataclass
class StructureReport:
    """Outcome of the fixed-space structure verification: the fixed space of
    a trace-preserving CP map equals z^(1/2) C z^(1/2) on the support of the
    averaged fixed state z, where C is the commutant of the z-conjugated
    (unital) Kraus family."""

    passed: bool
    support_dim: int
    fixed_space_dim: int
    commutant_dim: int
    unital_defect: float
    zeta_residual: float
    fixed_residual: float
    membership_residual: float
    note: str = ""


def pf_space_structure_check(
    channel: QuantumChannel,
    tol: float = 1e-7,
    max_iter: int = 100000,
    seed: int = 0x5EED,
    samples: int = 3,
) -> StructureReport:
    """Verify, by double inclusion, the structure of the fixed-point space of
    a trace-preserving CP map.

    Steps: (1) Cesaro-average the iterates of the maximally mixed state to a
    fixed state z; (2) compress to the support of z and conjugate the Kraus
    family by z^(1/2), giving a unital family G_j; (3) compute the commutant
    C of {G_j, G_j*}; (4) check that sandwiched positive commutant samples
    (the basis' Hermitian parts plus ``samples`` random positive elements)
    are fixed by the channel and that every fixed-space basis element lands
    in the sandwiched commutant span.
    """
    if samples < 0:
        raise ValueError("samples must be nonnegative")
    if not channel.is_trace_preserving(1e-9):
        raise ValueError("structure check requires a trace-preserving channel")
    n = channel.dim
    _check_cap(n)
    # (1) Averaged fixed state.  A short Cesaro stage damps peripheral
    # oscillation; a damped-iteration stage then converges geometrically
    # (the plain Cesaro increment only decays like 1/K^2, which would leave
    # visible junk on the decaying subspace and inflate the support).
    z = np.eye(n, dtype=complex) / n
    avg = z.copy()
    for k in range(1, 2001):
        z = channel(z)
        new_avg = (k * avg + z) / (k + 1)
        inc = float(np.abs(new_avg - avg).max())
        avg = new_avg
        if inc <= 1e-8:
            break
    zeta = (avg + avg.conj().T) / 2.0
    zeta_residual = np.inf
    for _ in range(max_iter):
        y = (zeta + channel(zeta)) / 2.0
        y = (y + y.conj().T) / 2.0
        wy, Uy = np.linalg.eigh(y)
        wy = np.clip(wy, 0.0, None)
        tr = float(wy.sum())
        if tr <= 0.0:
            raise ArithmeticError("averaged state collapsed to zero")
        zeta = (Uy * wy) @ Uy.conj().T / tr
        zeta_residual = float(np.abs(channel(zeta) - zeta).max())
        if zeta_residual <= 1e-13 * (1.0 + float(np.abs(zeta).max())):
            break
    w, U = np.linalg.eigh(zeta)
    keep = w > 1e-10 * max(float(w.max()), 1e-300)
    P = U[:, keep]
    ws = w[keep]
    s_dim = int(keep.sum())
    half = np.sqrt(ws)
    zs_half = (P * half) @ P.conj().T  # acts on the full space, rank s
    G = []
    sqrt_s = np.diag(half)
    inv_sqrt_s = np.diag(1.0 / half)
    for F in channel.kraus:
        Fc = P.conj().T @ F @ P
        G.append(inv_sqrt_s @ Fc @ sqrt_s)
    unital_defect = float(np.abs(sum(g @ g.conj().T for g in G) - np.eye(s_dim)).max())
    comm = commutant_basis(G, include_adjoints=True)
    # (4a) sandwiched positive commutant samples are fixed points
    rng = np.random.default_rng(seed)
    samples_list = []
    for c in comm:
        samples_list.append(c + c.conj().T)
        samples_list.append(1j * (c - c.conj().T))
    for _ in range(samples):
        coeff = rng.standard_normal(len(comm)) + 1j * rng.standard_normal(len(comm))
        y = sum(cf * c for cf, c in zip(coeff, comm))
        samples_list.append(y.conj().T @ y)
    fixed_residual = 0.0
    for c in samples_list:
        x_s = sqrt_s @ c @ sqrt_s
        X = P @ x_s @ P.conj().T
        scale = 1.0 + float(np.abs(X).max())
        fixed_residual = max(fixed_residual, float(np.abs(channel(X) - X).max()) / scale)
    # (4b) fixed-space basis sits inside the sandwiched commutant
    fixed = fixed_space_basis(channel)
    span = (
        np.array([(sqrt_s @ c @ sqrt_s).reshape(-1) for c in comm])
        if comm
        else np.zeros((0, s_dim * s_dim), dtype=complex)
    )
    if span.size:
        Qs, _ = np.linalg.qr(span.T)
        Qs = Qs.T
    else:
        Qs = span
    membership_residual = 0.0
    for b in fixed:
        bs = P.conj().T @ b @ P
        v = bs.reshape(-1)
        r = v - Qs.T @ (Qs.conj() @ v) if Qs.size else v
        membership_residual = max(
            membership_residual,
            float(np.linalg.norm(r)) / (1.0 + float(np.linalg.norm(v))),
        )
        # the fixed point must be supported in P as well
        full_norm = float(np.linalg.norm(b))
        comp_norm = float(np.linalg.norm(bs))
        if full_norm > 0:
            membership_residual = max(
                membership_residual, abs(full_norm - comp_norm) / (1.0 + full_norm)
            )
    dims_match = len(fixed) == len(comm)
    passed = (
        dims_match
        and zeta_residual <= 1e-9
        and unital_defect <= 1e-7
        and fixed_residual <= tol
        and membership_residual <= tol
    )
    note = (
        f"support {s_dim}/{n}, fixed-space dim {len(fixed)}, commutant dim {len(comm)}"
        + ("" if dims_match else " (dimension mismatch)")
        + ("" if zeta_residual <= 1e-9 else " (averaged state did not converge)")
    )
    return StructureReport(
        passed=passed,
        support_dim=s_dim,
        fixed_space_dim=len(fixed),
        commutant_dim=len(comm),
        unital_defect=unital_defect,
        zeta_residual=zeta_residual,
        fixed_residual=fixed_residual,
        membership_residual=membership_residual,
        note=note,
    )
