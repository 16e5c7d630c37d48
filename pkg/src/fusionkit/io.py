"""File formats: fusion rings and local data as JSON, bipartite graphs as
edge-list text, Kraus channels as JSON.

All JSON writers emit a canonical form (sorted keys, two-space indent,
trailing newline), so load -> save round-trips byte for byte.  Parse errors
carry a stable ``code`` attribute for programmatic handling.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .channels import QuantumChannel
from .graphs import BipartiteGraph, LocalFusionData
from .rings import FusionRing

__all__ = [
    "FormatError",
    "RingFormatError",
    "GraphFormatError",
    "ChannelFormatError",
    "RingFile",
    "canonical_json",
    "parse_ring_json",
    "ring_file_to_json",
    "load_ring",
    "save_ring",
    "parse_graph_text",
    "graph_to_text",
    "load_graph",
    "save_graph",
    "parse_local_json",
    "local_to_json",
    "load_local",
    "save_local",
    "parse_channel_json",
    "channel_to_json",
    "load_channel",
    "save_channel",
]

FORMAT_VERSION = 1


class FormatError(ValueError):
    """Parse failure with a stable error code."""

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


class RingFormatError(FormatError):
    pass


class GraphFormatError(FormatError):
    pass


class ChannelFormatError(FormatError):
    pass


def canonical_json(obj: object) -> str:
    """Deterministic JSON text: sorted keys, indent 2, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# fusion rings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RingFile:
    """A named fusion ring plus optional distinguished index subsets
    (0-based) that deserve localized scrutiny."""

    name: str
    ring: FusionRing
    local_subsets: Tuple[Tuple[int, ...], ...] = ()


def parse_ring_json(text: str) -> RingFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RingFormatError("BAD_FORMAT", f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise RingFormatError("BAD_FORMAT", "top level must be an object")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise RingFormatError(
            "UNSUPPORTED_VERSION", f"format_version must be {FORMAT_VERSION}, got {version!r}"
        )
    for key in ("name", "rank", "dual", "N"):
        if key not in doc:
            raise RingFormatError("BAD_FORMAT", f"missing required key {key!r}")
    name = doc["name"]
    if not isinstance(name, str) or not name:
        raise RingFormatError("BAD_FORMAT", "name must be a nonempty string")
    rank = doc["rank"]
    if not isinstance(rank, int) or rank < 1:
        raise RingFormatError("BAD_FORMAT", "rank must be a positive integer")
    try:
        N = np.asarray(doc["N"])
    except Exception as exc:  # ragged nesting
        raise RingFormatError("SHAPE_MISMATCH", f"N is not a cubic array: {exc}") from exc
    if N.shape != (rank, rank, rank):
        raise RingFormatError(
            "SHAPE_MISMATCH", f"N must have shape ({rank}, {rank}, {rank}), got {N.shape}"
        )
    if not np.issubdtype(N.dtype, np.integer):
        if np.issubdtype(N.dtype, np.floating) and np.all(N == np.round(N)):
            N = N.astype(np.int64)
        else:
            raise RingFormatError("BAD_FORMAT", "N entries must be integers")
    if N.size and N.min() < 0:
        idx = np.unravel_index(int(np.argmin(N)), N.shape)
        raise RingFormatError(
            "NEGATIVE_COEFFICIENT", f"N{tuple(int(i) for i in idx)} = {int(N[idx])} < 0"
        )
    dual = doc["dual"]
    if (
        not isinstance(dual, list)
        or len(dual) != rank
        or any(not isinstance(d, int) for d in dual)
        or sorted(dual) != list(range(rank))
    ):
        raise RingFormatError(
            "DUAL_NOT_INVOLUTION", "dual must be a permutation of 0..rank-1"
        )
    if any(dual[dual[i]] != i for i in range(rank)) or dual[0] != 0:
        raise RingFormatError(
            "DUAL_NOT_INVOLUTION", "dual must be an involution fixing index 0"
        )
    subsets_doc = doc.get("local_subsets", [])
    if not isinstance(subsets_doc, list):
        raise RingFormatError("BAD_FORMAT", "local_subsets must be a list of index lists")
    subsets: List[Tuple[int, ...]] = []
    for sub in subsets_doc:
        if (
            not isinstance(sub, list)
            or not sub
            or any(not isinstance(i, int) or not (0 <= i < rank) for i in sub)
            or len(set(sub)) != len(sub)
        ):
            raise RingFormatError(
                "BAD_FORMAT", f"local subset {sub!r} must be distinct indices in 0..{rank - 1}"
            )
        subsets.append(tuple(sorted(sub)))
    try:
        ring = FusionRing(name=name, N=N, dual=tuple(dual))
    except ValueError as exc:
        raise RingFormatError("BAD_FORMAT", str(exc)) from exc
    return RingFile(name=name, ring=ring, local_subsets=tuple(subsets))


def ring_file_to_json(rf: RingFile) -> str:
    doc = {
        "format_version": FORMAT_VERSION,
        "name": rf.name,
        "rank": rf.ring.rank,
        "dual": list(rf.ring.dual),
        "N": rf.ring.N.tolist(),
    }
    if rf.local_subsets:
        doc["local_subsets"] = [list(s) for s in rf.local_subsets]
    return canonical_json(doc)


def load_ring(path: Union[str, Path]) -> RingFile:
    return parse_ring_json(Path(path).read_text(encoding="utf-8"))


def save_ring(rf: RingFile, path: Union[str, Path]) -> None:
    Path(path).write_text(ring_file_to_json(rf), encoding="utf-8")


# ---------------------------------------------------------------------------
# bipartite graphs (edge-list text)
# ---------------------------------------------------------------------------


def parse_graph_text(text: str) -> BipartiteGraph:
    """Edge-list format: one ``u v [multiplicity]`` edge per line, ``#``
    comments, and an optional ``star VERTEX`` directive (default: the first
    vertex seen).  The graph must be connected and bipartite; the starred
    vertex's color class becomes the even part."""
    edges: List[Tuple[str, str, int]] = []
    star: Optional[str] = None
    order: List[str] = []
    seen = set()

    def note_vertex(v: str) -> None:
        if v not in seen:
            seen.add(v)
            order.append(v)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if tokens[0] == "star":
            if len(tokens) != 2:
                raise GraphFormatError(
                    "BAD_FORMAT", f"line {lineno}: star directive takes one vertex"
                )
            if star is not None:
                raise GraphFormatError("BAD_FORMAT", f"line {lineno}: duplicate star directive")
            star = tokens[1]
            continue
        if len(tokens) not in (2, 3):
            raise GraphFormatError(
                "BAD_FORMAT", f"line {lineno}: expected 'u v [multiplicity]', got {line!r}"
            )
        mult = 1
        if len(tokens) == 3:
            try:
                mult = int(tokens[2])
            except ValueError:
                raise GraphFormatError(
                    "BAD_FORMAT", f"line {lineno}: multiplicity must be an integer"
                ) from None
            if mult < 1:
                raise GraphFormatError("BAD_FORMAT", f"line {lineno}: multiplicity must be >= 1")
        u, v = tokens[0], tokens[1]
        if u == v:
            raise GraphFormatError("BAD_FORMAT", f"line {lineno}: self-loop at {u!r}")
        note_vertex(u)
        note_vertex(v)
        edges.append((u, v, mult))
    if not edges:
        raise GraphFormatError("BAD_FORMAT", "no edges found")
    if star is None:
        star = order[0]
    if star not in seen:
        raise GraphFormatError("UNKNOWN_STAR", f"star vertex {star!r} appears in no edge")
    adjacency: Dict[str, Dict[str, int]] = {v: {} for v in order}
    for u, v, m in edges:
        adjacency[u][v] = adjacency[u].get(v, 0) + m
        adjacency[v][u] = adjacency[v].get(u, 0) + m
    # BFS two-coloring from the star
    color = {star: 0}
    queue = [star]
    while queue:
        u = queue.pop(0)
        for v in adjacency[u]:
            if v not in color:
                color[v] = 1 - color[u]
                queue.append(v)
            elif color[v] == color[u]:
                raise GraphFormatError("NOT_BIPARTITE", f"odd cycle through {u!r} - {v!r}")
    if len(color) != len(order):
        missing = sorted(set(order) - set(color))
        raise GraphFormatError("DISCONNECTED", f"unreachable vertices: {missing}")
    even = tuple(v for v in order if color[v] == 0)
    odd = tuple(v for v in order if color[v] == 1)
    B = np.zeros((len(even), len(odd)), dtype=np.int64)
    odd_index = {v: i for i, v in enumerate(odd)}
    for i, u in enumerate(even):
        for v, m in adjacency[u].items():
            B[i, odd_index[v]] = m
    return BipartiteGraph(even=even, odd=odd, biadjacency=B, star=star)


def graph_to_text(graph: BipartiteGraph) -> str:
    """Canonical edge-list form: star directive, then sorted edges."""
    lines = [f"star {graph.star}"]
    for i, u in enumerate(graph.even):
        for j, v in enumerate(graph.odd):
            m = int(graph.biadjacency[i, j])
            if m == 1:
                lines.append(f"{u} {v}")
            elif m > 1:
                lines.append(f"{u} {v} {m}")
    return "\n".join(lines) + "\n"


def load_graph(path: Union[str, Path]) -> BipartiteGraph:
    return parse_graph_text(Path(path).read_text(encoding="utf-8"))


def save_graph(graph: BipartiteGraph, path: Union[str, Path]) -> None:
    Path(path).write_text(graph_to_text(graph), encoding="utf-8")


# ---------------------------------------------------------------------------
# local fusion data
# ---------------------------------------------------------------------------


def parse_local_json(text: str) -> LocalFusionData:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError("BAD_FORMAT", f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise GraphFormatError("BAD_FORMAT", "top level must be an object")
    if doc.get("format_version") != FORMAT_VERSION:
        raise GraphFormatError(
            "UNSUPPORTED_VERSION",
            f"format_version must be {FORMAT_VERSION}, got {doc.get('format_version')!r}",
        )
    for key in ("labels", "dims", "coefficients"):
        if key not in doc:
            raise GraphFormatError("BAD_FORMAT", f"missing required key {key!r}")
    labels = doc["labels"]
    if not isinstance(labels, list) or any(not isinstance(x, str) for x in labels):
        raise GraphFormatError("BAD_FORMAT", "labels must be a list of strings")
    dims = doc["dims"]
    if not isinstance(dims, dict) or any(
        not isinstance(v, (int, float)) for v in dims.values()
    ):
        raise GraphFormatError("BAD_FORMAT", "dims must map element names to numbers")
    coeffs = doc["coefficients"]
    if not isinstance(coeffs, dict):
        raise GraphFormatError("BAD_FORMAT", "coefficients must map element names to matrices")
    mats = {}
    m = len(labels)
    for name, rows in coeffs.items():
        arr = np.asarray(rows)
        if arr.shape != (m, m):
            raise GraphFormatError(
                "SHAPE_MISMATCH", f"coefficient matrix for {name!r} must be {m}x{m}"
            )
        mats[name] = arr
    try:
        return LocalFusionData(
            labels=tuple(labels),
            dims={k: float(v) for k, v in dims.items()},
            coefficients=mats,
        )
    except ValueError as exc:
        raise GraphFormatError("BAD_FORMAT", str(exc)) from exc


def local_to_json(data: LocalFusionData) -> str:
    doc = {
        "format_version": FORMAT_VERSION,
        "labels": list(data.labels),
        "dims": {k: float(v) for k, v in data.dims.items()},
        "coefficients": {k: v.tolist() for k, v in data.coefficients.items()},
    }
    return canonical_json(doc)


def load_local(path: Union[str, Path]) -> LocalFusionData:
    return parse_local_json(Path(path).read_text(encoding="utf-8"))


def save_local(data: LocalFusionData, path: Union[str, Path]) -> None:
    Path(path).write_text(local_to_json(data), encoding="utf-8")


# ---------------------------------------------------------------------------
# Kraus channels
# ---------------------------------------------------------------------------


def parse_channel_json(text: str) -> QuantumChannel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ChannelFormatError("BAD_FORMAT", f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ChannelFormatError("BAD_FORMAT", "top level must be an object")
    if doc.get("format_version") != FORMAT_VERSION:
        raise ChannelFormatError(
            "UNSUPPORTED_VERSION",
            f"format_version must be {FORMAT_VERSION}, got {doc.get('format_version')!r}",
        )
    for key in ("dim", "kraus"):
        if key not in doc:
            raise ChannelFormatError("BAD_FORMAT", f"missing required key {key!r}")
    dim = doc["dim"]
    if not isinstance(dim, int) or dim < 1:
        raise ChannelFormatError("BAD_FORMAT", "dim must be a positive integer")
    kraus_doc = doc["kraus"]
    if not isinstance(kraus_doc, list) or not kraus_doc:
        raise ChannelFormatError("BAD_FORMAT", "kraus must be a nonempty list of matrices")
    ops = []
    for idx, mat in enumerate(kraus_doc):
        arr = np.asarray(mat, dtype=float) if _is_pairs(mat, dim) else None
        if arr is None or arr.shape != (dim, dim, 2):
            raise ChannelFormatError(
                "SHAPE_MISMATCH",
                f"kraus[{idx}] must be a {dim}x{dim} matrix of [re, im] pairs",
            )
        ops.append(arr[..., 0] + 1j * arr[..., 1])
    return QuantumChannel(kraus=tuple(ops))


def _is_pairs(mat: object, dim: int) -> bool:
    try:
        arr = np.asarray(mat, dtype=float)
    except (TypeError, ValueError):
        return False
    return arr.shape == (dim, dim, 2)


def channel_to_json(channel: QuantumChannel, name: Optional[str] = None) -> str:
    doc = {
        "format_version": FORMAT_VERSION,
        "dim": channel.dim,
        "kraus": [
            [[[float(z.real), float(z.imag)] for z in row] for row in F]
            for F in channel.kraus
        ],
    }
    if name is not None:
        doc["name"] = name
    return canonical_json(doc)


def load_channel(path: Union[str, Path]) -> QuantumChannel:
    return parse_channel_json(Path(path).read_text(encoding="utf-8"))


def save_channel(channel: QuantumChannel, path: Union[str, Path], name: Optional[str] = None) -> None:
    Path(path).write_text(channel_to_json(channel, name), encoding="utf-8")
