"""Command-line interface: exit codes, output shapes, artifact files."""

import json
import subprocess
import sys

import numpy as np
import pytest

from fusionkit.channels import QuantumChannel
from fusionkit.cli import main
from fusionkit.criteria import r4k_family
from fusionkit.io import RingFile, save_channel, save_graph, save_local, save_ring
from fusionkit.graphs import BipartiteGraph, LocalFusionData
from fusionkit.rings import cyclic_ring


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestRingCommands:
    def test_validate_bundled(self, capsys):
        code, out, err = run_cli(capsys, "ring", "validate", "bundled:fib")
        assert code == 0
        doc = json.loads(out)
        assert doc["valid"] is True and doc["name"] == "fib"

    def test_check_json_passes(self, capsys):
        code, out, _ = run_cli(capsys, "ring", "check", "bundled:z4")
        assert code == 0
        doc = json.loads(out)
        assert doc["overall"] == "Passes"
        assert doc["config"]["n_max"] == 3

    def test_check_fails_still_exit_zero(self, capsys, tmp_path):
        p = tmp_path / "r.ring"
        save_ring(RingFile(name="R4k5", ring=r4k_family(5), local_subsets=((1, 2),)), p)
        code, out, _ = run_cli(capsys, "ring", "check", str(p))
        assert code == 0
        doc = json.loads(out)
        assert doc["overall"] == "Fails"
        failing = [t for t in doc["tasks"] if t["status"] == "Fails"]
        assert any(t["params"].get("subset") == [1, 2] for t in failing)

    def test_check_markdown_format(self, capsys):
        code, out, _ = run_cli(capsys, "ring", "check", "bundled:fib", "--format", "md")
        assert code == 0
        assert out.startswith("# Ring report: fib")

    def test_check_criteria_and_n_flags(self, capsys):
        code, out, _ = run_cli(
            capsys, "ring", "check", "bundled:z3", "--criteria", "primary", "--n", "2"
        )
        assert code == 0
        doc = json.loads(out)
        assert [t["kind"] for t in doc["tasks"]] == ["primary", "primary"]

    def test_check_subsets_flag(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "ring",
            "check",
            "bundled:z4",
            "--criteria",
            "localized",
            "--subsets",
            "1",
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["config"]["subset_cap"] == 1
        subsets = [t["params"]["subset"] for t in doc["tasks"]]
        assert subsets and all(len(s) == 1 for s in subsets)

    def test_check_out_dir_artifacts(self, capsys, tmp_path):
        out_dir = tmp_path / "artifacts"
        code, _, _ = run_cli(
            capsys, "ring", "check", "bundled:r4k5", "--out", str(out_dir)
        )
        assert code == 0
        names = {p.name for p in out_dir.iterdir()}
        assert {"report.json", "report.md", "report.csv"} <= names
        pngs = [n for n in names if n.endswith(".png")]
        assert pngs, "expected at least one figure"
        for n in pngs:
            assert (out_dir / n).read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
        rows = (out_dir / "report.csv").read_text().strip().splitlines()
        assert rows[0] == "ring,task,kind,status,lambda_min,margin,retried,note"
        assert len(rows) > 1

    def test_batch(self, capsys, tmp_path):
        out_dir = tmp_path / "batch"
        code, out, _ = run_cli(
            capsys,
            "ring",
            "batch",
            "bundled:fib",
            "bundled:z2",
            "bundled:r4k5",
            "--out",
            str(out_dir),
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["counts"] == {"Fails": 1, "Passes": 2}
        assert (out_dir / "batch_margins.png").exists()
        assert (out_dir / "report.csv").exists()

    def test_batch_directory_argument(self, capsys, tmp_path):
        save_ring(RingFile(name="a2", ring=cyclic_ring(2)), tmp_path / "a2.ring")
        save_ring(RingFile(name="b3", ring=cyclic_ring(3)), tmp_path / "b3.ring")
        (tmp_path / "notes.txt").write_text("ignored")
        code, out, _ = run_cli(capsys, "ring", "batch", str(tmp_path), "--n", "2")
        assert code == 0
        doc = json.loads(out)
        assert [r["name"] for r in doc["reports"]] == ["a2", "b3"]

    def test_batch_empty_directory_exit_1(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "ring", "batch", str(tmp_path))
        assert code == 1
        assert "no .ring files" in err

    def test_determinism_same_seed_same_bytes(self, capsys):
        _, out1, _ = run_cli(capsys, "ring", "check", "bundled:fib", "--seed", "42")
        _, out2, _ = run_cli(capsys, "ring", "check", "bundled:fib", "--seed", "42")
        assert out1 == out2
        _, out3, _ = run_cli(capsys, "ring", "check", "bundled:fib", "--seed", "43")
        assert out1 != out3  # twist seed feeds through


class TestGraphCommands:
    def test_bundled_d5_picks_up_local_data(self, capsys):
        code, out, _ = run_cli(capsys, "graph", "check", "bundled:d5")
        assert code == 0
        doc = json.loads(out)
        assert doc["overall"] == "Fails"
        assert doc["local_determinant"] == pytest.approx(-1.0 - np.sqrt(2.0), abs=1e-9)

    def test_sibling_local_json_on_disk(self, capsys, tmp_path):
        g = BipartiteGraph(
            even=("v1", "v3"),
            odd=("v2", "v4", "v5"),
            biadjacency=np.array([[1, 0, 0], [1, 1, 1]]),
            star="v1",
        )
        save_graph(g, tmp_path / "mine.graph")
        code, out, _ = run_cli(capsys, "graph", "check", str(tmp_path / "mine.graph"))
        assert code == 0
        assert json.loads(out)["local_task"] is None
        c = float(np.sqrt(2.0 + np.sqrt(2.0)))
        save_local(
            LocalFusionData(
                labels=("x1", "x4"),
                dims={"unit": 1.0, "middle": c},
                coefficients={
                    "unit": np.eye(2, dtype=int),
                    "middle": np.array([[0, 1], [1, 0]]),
                },
            ),
            tmp_path / "mine.local.json",
        )
        code, out, _ = run_cli(capsys, "graph", "check", str(tmp_path / "mine.graph"))
        assert code == 0
        doc = json.loads(out)
        assert doc["local_task"]["status"] == "Fails"


class TestChannelCommands:
    def test_pf(self, capsys):
        code, out, _ = run_cli(capsys, "channel", "pf", "--kraus", "bundled:mix")
        assert code == 0
        doc = json.loads(out)
        assert doc["irreducible"] is True
        assert doc["radius"] == pytest.approx(1.0, abs=1e-9)
        assert doc["structure"] is None

    def test_structure(self, capsys):
        code, out, _ = run_cli(capsys, "channel", "structure", "--kraus", "bundled:pinch")
        assert code == 0
        doc = json.loads(out)
        assert doc["structure"]["passed"] is True

    def test_structure_samples_flag(self, capsys):
        code, out, _ = run_cli(
            capsys, "channel", "structure", "--kraus", "bundled:pinch", "--samples", "7"
        )
        assert code == 0
        assert json.loads(out)["structure"]["passed"] is True

    def test_kraus_flag_required(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["channel", "pf", "bundled:mix"])
        assert exc.value.code == 2

    def test_file_path(self, capsys, tmp_path):
        ch = QuantumChannel(
            kraus=(np.array([[1.0, 0.0], [0.0, 0.0]]), np.array([[0.0, 1.0], [0.0, 0.0]]))
        )
        save_channel(ch, tmp_path / "damp.kraus.json")
        code, out, _ = run_cli(
            capsys, "channel", "pf", "--kraus", str(tmp_path / "damp.kraus.json")
        )
        assert code == 0
        assert json.loads(out)["fixed_space_dim"] == 1


class TestGroupCommands:
    def test_suite_json(self, capsys):
        code, out, _ = run_cli(
            capsys, "group", "suite", "--order", "6", "--trials", "30", "--smooth-trials", "5"
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["n"] == 6 and doc["passed"] is True

    def test_suite_out_dir(self, capsys, tmp_path):
        out_dir = tmp_path / "suite"
        code, _, _ = run_cli(
            capsys,
            "group",
            "suite",
            "--order",
            "4",
            "--trials",
            "20",
            "--smooth-trials",
            "5",
            "--format",
            "md",
            "--out",
            str(out_dir),
        )
        assert code == 0
        assert (out_dir / "report.json").exists()
        assert (out_dir / "report.md").exists()
        assert (out_dir / "z4_slacks.png").read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


class TestErrorsAndMisc:
    def test_missing_file_exit_1(self, capsys):
        code, _, err = run_cli(capsys, "ring", "check", "/nonexistent.ring")
        assert code == 1
        assert "error" in err

    def test_malformed_file_exit_1(self, capsys, tmp_path):
        bad = tmp_path / "bad.ring"
        bad.write_text('{"format_version": 7}')
        code, _, err = run_cli(capsys, "ring", "validate", str(bad))
        assert code == 1
        assert "UNSUPPORTED_VERSION" in err

    def test_unknown_flag_exit_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["ring", "check", "bundled:fib", "--frobulate"])
        assert exc.value.code == 2

    def test_list_and_version(self, capsys):
        code, out, _ = run_cli(capsys, "list")
        assert code == 0
        assert "bundled:fib.ring" in out.splitlines()
        code, out, _ = run_cli(capsys, "version")
        assert code == 0
        assert out.strip() == "0.1.0"

    def test_console_entry_point_subprocess(self):
        proc = subprocess.run(
            [sys.executable, "-m", "fusionkit.cli", "ring", "check", "bundled:z2"],
            capture_output=True,
            text=True,
            timeout=120,
        )
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["overall"] == "Passes"


class TestBadRingVerdictFlows:
    def test_invalid_axioms_reported_not_crash(self, capsys, tmp_path):
        # x * x = x with self-dual x: parses fine, fails ring validation
        doc = {
            "format_version": 1,
            "name": "broken",
            "rank": 2,
            "dual": [0, 1],
            "N": [[[1, 0], [0, 1]], [[0, 1], [0, 1]]],
        }
        p = tmp_path / "broken.ring"
        p.write_text(json.dumps(doc))
        code, out, _ = run_cli(capsys, "ring", "check", str(p))
        assert code == 0
        report = json.loads(out)
        assert report["overall"] == "Invalid"
        assert report["violations"]

    def test_tol_flag_changes_policy(self, capsys, tmp_path):
        save_ring(RingFile(name="z2", ring=cyclic_ring(2)), tmp_path / "z2.ring")
        code, out, _ = run_cli(
            capsys, "ring", "check", str(tmp_path / "z2.ring"), "--tol", "1e-4"
        )
        assert code == 0
        assert json.loads(out)["config"]["policy"]["rel_tol"] == 1e-4
