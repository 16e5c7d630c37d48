"""Bundled corpus: small group rings, the golden ring, a one-parameter
rank-4 family with known localized positivity failures, a D5-shaped
principal graph with its local fusion data, and a few Kraus channels.

Files are stored in the canonical serialized forms defined by
:mod:`fusionkit.io` (``.ring`` / ``.local.json`` / ``.kraus.json`` are JSON,
``.graph`` is edge-list text).
"""

from importlib import resources
from typing import List

from ..channels import QuantumChannel
from ..graphs import BipartiteGraph, LocalFusionData
from ..io import RingFile, parse_channel_json, parse_graph_text, parse_local_json, parse_ring_json

__all__ = [
    "list_bundled",
    "read_text",
    "bundled_ring",
    "bundled_ring_names",
    "bundled_graph",
    "bundled_local",
    "bundled_channel",
    "bundled_channel_names",
]

_SUFFIXES = (".ring", ".graph", ".local.json", ".kraus.json")


def _root():
    return resources.files(__name__)


def list_bundled() -> List[str]:
    """Names of every bundled data file."""
    return sorted(
        entry.name for entry in _root().iterdir() if entry.name.endswith(_SUFFIXES)
    )


def read_text(name: str) -> str:
    """Raw text of a bundled file."""
    return (_root() / name).read_text(encoding="utf-8")


def bundled_ring(name: str) -> RingFile:
    """Load a bundled ring by name (``.ring`` suffix optional)."""
    if not name.endswith(".ring"):
        name += ".ring"
    return parse_ring_json(read_text(name))


def bundled_ring_names() -> List[str]:
    """Stems of all bundled rings (pass to :func:`bundled_ring`)."""
    return [n[: -len(".ring")] for n in list_bundled() if n.endswith(".ring")]


def bundled_graph(name: str) -> BipartiteGraph:
    if not name.endswith(".graph"):
        name += ".graph"
    return parse_graph_text(read_text(name))


def bundled_local(name: str) -> LocalFusionData:
    if not name.endswith(".local.json"):
        name += ".local.json"
    return parse_local_json(read_text(name))


def bundled_channel(name: str) -> QuantumChannel:
    if not name.endswith(".kraus.json"):
        name += ".kraus.json"
    return parse_channel_json(read_text(name))


def bundled_channel_names() -> List[str]:
    return [n[: -len(".kraus.json")] for n in list_bundled() if n.endswith(".kraus.json")]
