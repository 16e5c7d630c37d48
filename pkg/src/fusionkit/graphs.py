"""Bipartite-graph obstructions: Perron data of a candidate principal graph
and positivity checks on locally available fusion data.

A candidate graph only pins down partial data (vertex weights, the norm
delta); full fusion rules are generally unavailable, so the positivity check
takes :class:`LocalFusionData` - an index subset S with the restricted fusion
coefficients and the quantum dimensions of the elements that appear - and
evaluates the same tensor-power sum as the localized ring criterion.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .criteria import SIZE_CAP, _symmetrized, _tensor_sum
from .linalg import CriterionVerdict, PsdPolicy, pf_eigen, psd_verdict

__all__ = [
    "BipartiteGraph",
    "GraphPf",
    "LocalFusionData",
    "ExclusionResult",
    "graph_pf_dims",
    "local_matrix",
    "local_matrix_check",
    "dimension_bound_exclusion",
]


@dataclass(frozen=True)
class BipartiteGraph:
    """Bipartite multigraph with a distinguished (starred) even vertex.

    ``biadjacency[a, b]`` counts edges between even vertex a and odd vertex b.
    """

    even: Tuple[str, ...]
    odd: Tuple[str, ...]
    biadjacency: np.ndarray
    star: str

    def __post_init__(self) -> None:
        B = np.asarray(self.biadjacency)
        if B.shape != (len(self.even), len(self.odd)):
            raise ValueError(
                f"biadjacency shape {B.shape} does not match parts "
                f"({len(self.even)}, {len(self.odd)})"
            )
        if not np.issubdtype(B.dtype, np.integer) or (B.size and B.min() < 0):
            raise ValueError("biadjacency must have nonnegative integer entries")
        if self.star not in self.even:
            raise ValueError(f"star vertex {self.star!r} must belong to the even part")
        if len(set(self.even) | set(self.odd)) != len(self.even) + len(self.odd):
            raise ValueError("vertex labels must be distinct across parts")
        B = B.astype(np.int64)
        B.flags.writeable = False
        object.__setattr__(self, "biadjacency", B)

    @property
    def vertices(self) -> Tuple[str, ...]:
        return self.even + self.odd

    def adjacency(self) -> np.ndarray:
        p, q = len(self.even), len(self.odd)
        A = np.zeros((p + q, p + q), dtype=np.int64)
        A[:p, p:] = self.biadjacency
        A[p:, :p] = self.biadjacency.T
        return A


@dataclass
class GraphPf:
    """Perron data of the symmetrized adjacency: the norm delta and the
    eigenvector weights normalized to 1 at the starred vertex."""

    delta: float
    delta_sq: float
    weights: Dict[str, float]
    residual: float


def graph_pf_dims(graph: BipartiteGraph) -> GraphPf:
    """Graph norm and starred-normalized Perron weights.

    Requires a connected graph (the adjacency must be irreducible); the
    returned weights satisfy ``A w = delta w`` with residual <= 1e-9.
    """
    A = graph.adjacency().astype(float)
    res = pf_eigen(A)
    if not res.irreducible:
        raise ValueError("graph is not connected (adjacency not irreducible)")
    v = res.right
    star_idx = graph.vertices.index(graph.star)
    if v[star_idx] <= 0:
        raise ArithmeticError("Perron weight vanished at the starred vertex")
    w = v / v[star_idx]
    residual = float(np.abs(A @ w - res.radius * w).max())
    if residual > 1e-9 * (1.0 + res.radius) * float(np.abs(w).max()):
        raise ArithmeticError(f"Perron weight residual {residual} too large")
    return GraphPf(
        delta=res.radius,
        delta_sq=res.radius**2,
        weights={name: float(w[i]) for i, name in enumerate(graph.vertices)},
        residual=residual,
    )


@dataclass(frozen=True)
class LocalFusionData:
    """Restriction of unknown fusion rules to an index subset S.

    labels : the elements of S, in matrix order.
    dims : quantum dimension of every referenced element (all >= 1).
    coefficients : for each referenced element i, the |S| x |S| nonnegative
        integer matrix of fusion coefficients N[i][j][k] with j, k in S.
    """

    labels: Tuple[str, ...]
    dims: Dict[str, float]
    coefficients: Dict[str, np.ndarray]

    def __post_init__(self) -> None:
        m = len(self.labels)
        if m == 0:
            raise ValueError("local data needs a nonempty label set")
        if len(set(self.labels)) != m:
            raise ValueError("duplicate labels in S")
        coeffs = {}
        for name, mat in self.coefficients.items():
            if name not in self.dims:
                raise ValueError(f"element {name!r} has coefficients but no dimension")
            M = np.asarray(mat)
            if M.shape != (m, m):
                raise ValueError(f"coefficient matrix for {name!r} must be {m}x{m}")
            if not np.all(M == np.round(M)) or (M.size and M.min() < 0):
                raise ValueError(f"coefficient matrix for {name!r} must be nonnegative integers")
            M = M.astype(np.int64)
            M.flags.writeable = False
            coeffs[name] = M
        for name, d in self.dims.items():
            if d < 1.0:
                raise ValueError(f"dimension of {name!r} must be >= 1, got {d}")
        object.__setattr__(self, "coefficients", coeffs)


def local_matrix(data: LocalFusionData, n: int = 1, size_cap: int = SIZE_CAP) -> np.ndarray:
    """T_n^S = sum_i d_i^2 (A_i / d_i)^(tensor n) over the referenced elements
    (elements absent from the data have zero restriction and drop out).

    Shares the tensor-sum kernel with the ring-side localized criterion.
    """
    if n < 1 or int(n) != n:
        raise ValueError("tensor exponent n must be a positive integer")
    names = sorted(data.coefficients)
    mats = [data.coefficients[name].astype(float) for name in names]
    dims = np.array([data.dims[name] for name in names])
    return _symmetrized(_tensor_sum(mats, dims, int(n), size_cap), f"local T_{n}")


def local_matrix_check(
    data: LocalFusionData,
    n: int = 1,
    policy: Optional[PsdPolicy] = None,
    size_cap: int = SIZE_CAP,
) -> CriterionVerdict:
    """PSD verdict for the local tensor-power matrix; Fails certifies the
    local data extends to no unitarily categorifiable fusion ring (so a graph
    carrying it is not a principal graph)."""
    return psd_verdict(local_matrix(data, n, size_cap=size_cap), policy)


class ExclusionResult(NamedTuple):
    """Outcome of the dimension-count bound; truthy iff excluded."""

    excluded: bool
    bound: Optional[float]
    note: str

    def __bool__(self) -> bool:  # pragma: no cover - convenience
        return self.excluded


def dimension_bound_exclusion(ell: float, delta_sq: float, dim_p3: float) -> ExclusionResult:
    """Graph exclusion by counting: with multiplicity parameter ell and graph
    norm-square delta_sq, a principal graph must satisfy

        dim_P3 >= ((delta_sq - 1)/ell) sqrt(ell^4/delta_sq - 1) + ell^4 + ell^2 + 2,

    so ``dim_p3`` strictly below the bound excludes the graph.  When
    ell^4 < delta_sq the radicand is negative and the bound is inapplicable
    (returns excluded=False with a note).
    """
    if ell < 1.0:
        raise ValueError("multiplicity parameter ell must be >= 1")
    if delta_sq <= 0.0:
        raise ValueError("delta_sq must be positive")
    if dim_p3 < 1.0:
        raise ValueError("dim_p3 must be >= 1")
    radicand = ell**4 / delta_sq - 1.0
    if radicand < 0.0:
        return ExclusionResult(False, None, "inapplicable: ell^4 < delta_sq")
    bound = ((delta_sq - 1.0) / ell) * np.sqrt(radicand) + ell**4 + ell**2 + 2.0
    if dim_p3 < bound:
        return ExclusionResult(True, float(bound), f"dim_P3 = {dim_p3} < bound = {bound:.6f}")
    return ExclusionResult(False, float(bound), f"dim_P3 = {dim_p3} >= bound = {bound:.6f}")
