"""
StateNet-PH Test Suite
End-to-end tests of the command-line interface
"""
import json

import numpy as np
import pytest

from statenet.main import EXIT_COMPUTE, EXIT_OK, EXIT_USAGE, run


def _last_json(capsys):
    out = capsys.readouterr().out.strip().splitlines()
    return json.loads(out[-1])


@pytest.fixture
def sine_csv(tmp_path, sine):
    path = tmp_path / "sine.csv"
    path.write_text("\n".join(repr(float(v)) for v in sine.samples) + "\n", encoding="utf-8")
    return path


@pytest.fixture
def flat_csv(tmp_path):
    path = tmp_path / "flat.csv"
    path.write_text("1.0\n" * 40, encoding="utf-8")
    return path


def _coarse_args(csv_path, out):
    return ["--csv", str(csv_path), "--fs", "50", "--kind", "coarse", "--bins", "10",
            "--tau", "26", "--dim", "2", "--out", str(out)]


class TestExitCodes:
    """Tests for exit codes and the stdout summary"""

    def test_fig4_toy(self, tmp_path, capsys):
        assert run(["repro", "fig4-toy", "--out", str(tmp_path)]) == EXIT_OK
        summary = _last_json(capsys)
        assert summary["status"] == "ok"
        assert summary["result"]["native"]["dim1"] == [[1.0, 2.0]]
        assert (tmp_path / "repro" / "fig4_toy.json").exists()

    def test_sine_method_example(self, tmp_path, capsys):
        assert run(["repro", "sine-method-example", "--out", str(tmp_path)]) == EXIT_OK
        summary = _last_json(capsys)
        assert len(summary["result"]["dim1"]) == 1
        assert summary["result"]["dim1"][0][0] == 1.0

    def test_bins_without_coarse(self, sine_csv, tmp_path):
        args = ["entropy", "--csv", str(sine_csv), "--fs", "50", "--kind", "ordinal", "--bins", "5"]
        assert run(args + ["--out", str(tmp_path)]) == EXIT_USAGE

    def test_unknown_flag(self, capsys):
        assert run(["simulate", "--bogus"]) == EXIT_USAGE
        assert "unrecognized arguments" in capsys.readouterr().err

    def test_unknown_reproduction(self):
        assert run(["repro", "no-such-thing"]) == EXIT_USAGE

    def test_missing_kind(self, sine_csv, tmp_path):
        assert run(["persist", "--csv", str(sine_csv), "--fs", "50", "--out", str(tmp_path)]) == EXIT_USAGE

    def test_both_inputs(self, sine_csv, tmp_path):
        args = ["simulate", "--system", "rossler-periodic", "--csv", str(sine_csv), "--fs", "1"]
        assert run(args + ["--out", str(tmp_path)]) == EXIT_USAGE

    def test_help(self):
        assert run(["--help"]) == 0

    def test_compute_error(self, flat_csv, tmp_path, capsys):
        args = ["entropy", "--csv", str(flat_csv), "--fs", "1", "--kind", "coarse",
                "--tau", "1", "--dim", "2", "--out", str(tmp_path)]
        assert run(args) == EXIT_COMPUTE
        summary = _last_json(capsys)
        assert summary["status"] == "error"
        assert summary["error"] == "DegenerateSequenceError"
        assert summary["details"] is None

    def test_missing_file(self, tmp_path):
        args = _coarse_args(tmp_path / "absent.csv", tmp_path)
        assert run(["entropy"] + args) == EXIT_USAGE

    def test_bad_csv_row(self, tmp_path, capsys):
        path = tmp_path / "bad.csv"
        path.write_text("1\n2\nx\n", encoding="utf-8")
        assert run(["entropy"] + _coarse_args(path, tmp_path)) == EXIT_COMPUTE
        summary = _last_json(capsys)
        assert "row 3" in summary["message"]
        assert summary["details"] == {"row": 3}


class TestPipeline:
    """Tests for chained pipeline commands"""

    def test_entropy(self, sine_csv, tmp_path, capsys):
        assert run(["entropy"] + _coarse_args(sine_csv, tmp_path)) == EXIT_OK
        result = _last_json(capsys)["result"]
        assert result["pair_count"] == 1
        assert result["entropy"] == 0.0

    def test_network(self, sine_csv, tmp_path, capsys):
        assert run(["network"] + _coarse_args(sine_csv, tmp_path)) == EXIT_OK
        result = _last_json(capsys)["result"]
        record = json.loads((tmp_path / "network.json").read_text(encoding="utf-8"))
        assert record["node_count"] == result["nodes"]
        assert (tmp_path / "edges.csv").read_text(encoding="utf-8").startswith("u,v,weight")

    def test_persist_bottleneck_mds(self, sine_csv, tmp_path, capsys):
        first, second = tmp_path / "a", tmp_path / "b"
        assert run(["persist"] + _coarse_args(sine_csv, first)) == EXIT_OK
        args = _coarse_args(sine_csv, second)
        args[args.index("--bins") + 1] = "8"
        assert run(["persist"] + args) == EXIT_OK

        out = tmp_path / "cmp"
        assert run(["bottleneck", "--diagrams", str(first / "diagram.json"), str(second / "diagram.json"),
                    "--out", str(out)]) == EXIT_OK
        record = json.loads((out / "bottleneck.json").read_text(encoding="utf-8"))
        assert record["names"] == ["a", "b"]
        assert record["values"][0][1] == record["values"][1][0]

        assert run(["mds", "--matrix", str(out / "bottleneck.json"), "--labels", "periodic", "chaotic",
                    "--out", str(out)]) == EXIT_OK
        assert (out / "mds.csv").exists()
        capsys.readouterr()

        assert run(["mds", "--matrix", str(out / "bottleneck.json"), "--labels", "periodic",
                    "--out", str(out)]) == EXIT_COMPUTE
        assert _last_json(capsys)["error"] == "AnalysisError"

    def test_embed(self, sine_csv, tmp_path, capsys):
        args = ["embed", "--csv", str(sine_csv), "--fs", "50", "--tau", "26", "--dim", "2", "--out", str(tmp_path)]
        assert run(args) == EXIT_OK
        assert _last_json(capsys)["result"]["tau_source"] == "flag"
        record = json.loads((tmp_path / "embedding.json").read_text(encoding="utf-8"))
        assert record["vectors"] == 200

    def test_simulate_needs_preset(self, sine_csv, tmp_path):
        args = ["simulate", "--csv", str(sine_csv), "--fs", "50", "--out", str(tmp_path)]
        assert run(args) == EXIT_USAGE

    def test_noisy_signal_is_seeded(self, sine_csv, tmp_path):
        for name in ("a", "b"):
            args = ["persist"] + _coarse_args(sine_csv, tmp_path / name) + ["--snr", "20", "--seed", "4"]
            assert run(args) == EXIT_OK
        a = (tmp_path / "a" / "diagram.json").read_bytes()
        b = (tmp_path / "b" / "diagram.json").read_bytes()
        assert a == b


class TestDeterminism:
    """Reruns write byte-identical artifacts"""

    def test_persist(self, sine_csv, tmp_path):
        for name in ("a", "b"):
            assert run(["persist"] + _coarse_args(sine_csv, tmp_path / name) + ["--plot"]) == EXIT_OK
        for artifact in ("diagram.json", "diagram.csv", "distance.csv", "summary.json", "diagram.svg"):
            assert (tmp_path / "a" / artifact).read_bytes() == (tmp_path / "b" / artifact).read_bytes()

    def test_bin_sweep(self, sine_csv, tmp_path, capsys):
        for name in ("a", "b"):
            args = ["bin-sweep", "--csv", str(sine_csv), "--fs", "50", "--tau", "26", "--dim", "2",
                    "--bin-min", "8", "--bin-max", "11", "--out", str(tmp_path / name)]
            assert run(args) == EXIT_OK
        assert "entropy_drop_bins" in _last_json(capsys)["result"]
        for artifact in ("binsweep.json", "binsweep.csv"):
            assert (tmp_path / "a" / artifact).read_bytes() == (tmp_path / "b" / artifact).read_bytes()


class TestConfigFile:
    """Tests for --config"""

    def test_output_directory_from_config(self, tmp_path, capsys):
        target = tmp_path / "from-config"
        config = tmp_path / "config.yaml"
        config.write_text(f"output:\n  directory: {json.dumps(str(target))}\n", encoding="utf-8")
        assert run(["--config", str(config), "repro", "fig4-toy"]) == EXIT_OK
        artifacts = _last_json(capsys)["artifacts"]
        assert all(a.startswith(str(target)) for a in artifacts)

    def test_engine_from_config(self, sine_csv, tmp_path, capsys):
        config = tmp_path / "config.yaml"
        config.write_text("homology:\n  engine: native\n", encoding="utf-8")
        assert run(["--config", str(config), "persist"] + _coarse_args(sine_csv, tmp_path)) == EXIT_OK
        diagram = json.loads((tmp_path / "diagram.json").read_text(encoding="utf-8"))
        assert diagram["provenance"]["engine"] == "native"
        assert np.asarray(diagram["1"]).shape == (1, 2)
