"""Bundled corpus: files load, match canonical serialization, and carry the
expected contents."""

import numpy as np
import pytest

from fusionkit import data
from fusionkit.channels import QuantumChannel
from fusionkit.criteria import r4k_family
from fusionkit.graphs import BipartiteGraph, LocalFusionData
from fusionkit.io import (
    RingFile,
    channel_to_json,
    graph_to_text,
    local_to_json,
    ring_file_to_json,
)
from fusionkit.rings import cyclic_ring, fibonacci_ring, product_ring

EXPECTED_RINGS = [f"z{n}" for n in range(2, 9)] + ["fib", "z2xz2"] + [
    f"r4k{k}" for k in range(3, 9)
]


class TestInventory:
    def test_all_expected_files_present(self):
        names = set(data.list_bundled())
        for stem in EXPECTED_RINGS:
            assert f"{stem}.ring" in names
        assert {"d5.graph", "d5.local.json"} <= names
        assert {"damp.kraus.json", "mix.kraus.json", "pinch.kraus.json"} <= names

    def test_ring_names(self):
        assert sorted(data.bundled_ring_names()) == sorted(EXPECTED_RINGS)
        assert sorted(data.bundled_channel_names()) == ["damp", "mix", "pinch"]


class TestCanonicalBytes:
    """Each bundled file must equal the canonical serialization of its
    programmatic construction (regenerating the corpus is a no-op)."""

    @pytest.mark.parametrize("n", range(2, 9))
    def test_cyclic_rings(self, n):
        expected = ring_file_to_json(RingFile(name=f"Z{n}", ring=cyclic_ring(n)))
        assert data.read_text(f"z{n}.ring") == expected

    def test_fib_and_product(self):
        assert data.read_text("fib.ring") == ring_file_to_json(
            RingFile(name="fib", ring=fibonacci_ring())
        )
        z2xz2 = product_ring(cyclic_ring(2), cyclic_ring(2), name="Z2xZ2")
        assert data.read_text("z2xz2.ring") == ring_file_to_json(
            RingFile(name="Z2xZ2", ring=z2xz2)
        )

    @pytest.mark.parametrize("k", range(3, 9))
    def test_r4k_rings_with_local_subsets(self, k):
        expected = ring_file_to_json(
            RingFile(name=f"R4k{k}", ring=r4k_family(k), local_subsets=((1, 2),))
        )
        assert data.read_text(f"r4k{k}.ring") == expected
        assert data.bundled_ring(f"r4k{k}").local_subsets == ((1, 2),)

    def test_d5_graph_and_local(self):
        g = BipartiteGraph(
            even=("v1", "v3"),
            odd=("v2", "v4", "v5"),
            biadjacency=np.array([[1, 0, 0], [1, 1, 1]]),
            star="v1",
        )
        assert data.read_text("d5.graph") == graph_to_text(g)
        c = float(np.sqrt(2.0 + np.sqrt(2.0)))
        local = LocalFusionData(
            labels=("x1", "x4"),
            dims={"unit": 1.0, "middle": c},
            coefficients={"unit": np.eye(2, dtype=int), "middle": np.array([[0, 1], [1, 0]])},
        )
        assert data.read_text("d5.local.json") == local_to_json(local)

    def test_channels(self):
        damp = QuantumChannel(
            kraus=(np.array([[1.0, 0.0], [0.0, 0.0]]), np.array([[0.0, 1.0], [0.0, 0.0]]))
        )
        assert data.read_text("damp.kraus.json") == channel_to_json(damp, name="damp")
        s = 1.0 / np.sqrt(2.0)
        X = np.array([[0.0, 1.0], [1.0, 0.0]])
        H = np.array([[1.0, 1.0], [1.0, -1.0]]) * s
        mix = QuantumChannel(kraus=(X * s, H * s))
        assert data.read_text("mix.kraus.json") == channel_to_json(mix, name="mix")
        pinch = QuantumChannel(kraus=(np.diag([1.0, 1.0, 0.0]), np.diag([0.0, 0.0, 1.0])))
        assert data.read_text("pinch.kraus.json") == channel_to_json(pinch, name="pinch")


class TestLoadedSemantics:
    def test_every_bundled_ring_is_valid(self):
        from fusionkit.rings import is_valid

        for stem in data.bundled_ring_names():
            rf = data.bundled_ring(stem)
            assert is_valid(rf.ring), stem

    def test_bundled_channels_are_trace_preserving(self):
        for stem in data.bundled_channel_names():
            assert data.bundled_channel(stem).is_trace_preserving(), stem

    def test_d5_pair_reproduces_known_failure(self):
        from fusionkit.graphs import graph_pf_dims, local_matrix

        g = data.bundled_graph("d5")
        local = data.bundled_local("d5")
        pf = graph_pf_dims(g)
        assert pf.delta_sq == pytest.approx(2.0 + np.sqrt(2.0), abs=1e-9)
        det = float(np.linalg.det(local_matrix(local, 1)))
        assert det == pytest.approx(-1.0 - np.sqrt(2.0), abs=1e-9)
