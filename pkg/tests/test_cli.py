import json

import numpy as np
import pytest

from weylest.cli import main
from weylest.experiment import csv_determinism_view


def run(*argv):
    return main([str(a) for a in argv])


class TestFindConfig:
    def test_prints_k_and_cache_path(self, tmp_path, capsys):
        assert run("find-config", 2, "--cache-dir", tmp_path) == 0
        out = capsys.readouterr().out
        assert "K=3" in out and "rank=4" in out and str(tmp_path) in out
        assert (tmp_path / "config_d2.json").exists()

    def test_out_writes_record(self, tmp_path):
        out = tmp_path / "cfg.json"
        assert run("find-config", 3, "--cache-dir", tmp_path, "--out", out) == 0
        record = json.loads(out.read_text())
        assert record["d"] == 3 and record["K"] == 4


class TestGenChannel:
    def test_gamma_channel(self, tmp_path):
        out = tmp_path / "ch.json"
        assert run("gen-channel", 3, "--gamma", 0.7, "--out", out) == 0
        record = json.loads(out.read_text())
        assert record["d"] == 3
        assert abs(sum(record["p"]) - 1) < 1e-12

    def test_kappa_channel(self, tmp_path):
        out = tmp_path / "ch.json"
        assert run("gen-channel", 2, "--kappa", 0.5, "--out", out) == 0
        assert json.loads(out.read_text())["p"] == [0.625, 0.125, 0.125, 0.125]

    def test_requires_exactly_one_knob(self, tmp_path, capsys):
        assert run("gen-channel", 2, "--gamma", 0.5, "--kappa", 0.5) == 1
        assert "error:" in capsys.readouterr().err


class TestSimulateEstimateChain:
    @pytest.mark.parametrize("protocol", ["dpepc", "ope"])
    def test_chain(self, protocol, tmp_path):
        ch = tmp_path / "ch.json"
        counts = tmp_path / "counts.json"
        est = tmp_path / "est.json"
        assert run("gen-channel", 2, "--gamma", 0.8, "--out", ch) == 0
        assert run(
            "simulate", "--channel", ch, "--protocol", protocol, "--n-uses", 9000,
            "--kappa", 0.2, "--seed", 7, "--cache-dir", tmp_path, "--out", counts,
        ) == 0
        payload = json.loads(counts.read_text())
        expected_blocks = 3 if protocol == "dpepc" else 1
        assert len(payload["blocks"]) == expected_blocks
        assert run(
            "estimate", "--counts", counts, "--mitigate-kappa", 0.2, "--correct",
            "--cache-dir", tmp_path, "--out", est,
        ) == 0
        record = json.loads(est.read_text())
        assert record["estimator"] == protocol
        assert record["mitigated"] and record["corrected"]
        assert record["meta"]["seed"] == 7
        assert abs(sum(record["x"]) - 1) < 1e-9

    def test_simulate_seed_reproducible(self, tmp_path):
        ch = tmp_path / "ch.json"
        run("gen-channel", 2, "--gamma", 0.8, "--out", ch)
        outs = []
        for name in ("a.json", "b.json"):
            path = tmp_path / name
            run("simulate", "--channel", ch, "--n-uses", 600, "--seed", 3,
                "--cache-dir", tmp_path, "--out", path)
            outs.append(json.loads(path.read_text()))
        assert outs[0] == outs[1]

    def test_block_mitigation_path(self, tmp_path):
        ch = tmp_path / "ch.json"
        counts = tmp_path / "counts.json"
        est = tmp_path / "est.json"
        run("gen-channel", 2, "--gamma", 0.8, "--out", ch)
        run("simulate", "--channel", ch, "--n-uses", 9000, "--kappa", 0.2,
            "--cache-dir", tmp_path, "--out", counts)
        assert run(
            "estimate", "--counts", counts, "--mitigate-kappa", 0.2,
            "--block-mitigation", "--cache-dir", tmp_path, "--out", est,
        ) == 0
        assert json.loads(est.read_text())["meta"]["mitigation"] == "blocks"


def spec_payload(out):
    return {
        "format_version": 1,
        "d": [2],
        "gamma": [0.7],
        "kappa": [0.0],
        "n_uses": [300, 900],
        "trials": 4,
        "estimators": ["dpepc", "ope"],
        "mitigation": ["none"],
        "master_seed": 5,
        "output": str(out),
    }


class TestExperiment:
    def test_runs_spec_and_writes_outputs(self, tmp_path, capsys):
        spec = tmp_path / "spec.json"
        out = tmp_path / "results.csv"
        spec.write_text(json.dumps(spec_payload(out)))
        assert run("experiment", spec, "--cache-dir", tmp_path) == 0
        assert "wrote 4 rows" in capsys.readouterr().out
        assert out.exists()
        meta = json.loads((tmp_path / "results.csv.meta.json").read_text())
        assert meta["spec"]["master_seed"] == 5
        assert "probe_noise_model" in meta

    def test_deterministic_across_worker_counts(self, tmp_path):
        spec = tmp_path / "spec.json"
        texts = []
        for workers, name in ((1, "a.csv"), (8, "b.csv")):
            out = tmp_path / name
            spec.write_text(json.dumps(spec_payload(out)))
            assert run("experiment", spec, "--workers", workers, "--cache-dir", tmp_path) == 0
            texts.append(csv_determinism_view(out.read_text()))
        assert texts[0] == texts[1]

    def test_seed_override(self, tmp_path):
        spec = tmp_path / "spec.json"
        out = tmp_path / "results.csv"
        spec.write_text(json.dumps(spec_payload(out)))
        assert run("experiment", spec, "--seed", 99, "--cache-dir", tmp_path) == 0
        meta = json.loads((tmp_path / "results.csv.meta.json").read_text())
        assert meta["spec"]["master_seed"] == 99

    def test_malformed_spec_diagnostics(self, tmp_path, capsys):
        spec = tmp_path / "spec.json"
        spec.write_text('{"format_version": 1\n "d": [2]}')
        assert run("experiment", spec, "--cache-dir", tmp_path) == 1
        err = capsys.readouterr().err
        assert "line 2" in err

    def test_unknown_field_diagnostics(self, tmp_path, capsys):
        spec = tmp_path / "spec.json"
        payload = spec_payload(tmp_path / "r.csv")
        payload["walltime_budget"] = 10
        spec.write_text(json.dumps(payload))
        assert run("experiment", spec, "--cache-dir", tmp_path) == 1
        assert "walltime_budget" in capsys.readouterr().err

    def test_missing_output_is_an_error(self, tmp_path, capsys):
        spec = tmp_path / "spec.json"
        payload = spec_payload(tmp_path / "r.csv")
        del payload["output"]
        spec.write_text(json.dumps(payload))
        assert run("experiment", spec, "--cache-dir", tmp_path) == 1
        assert "output" in capsys.readouterr().err


class TestReport:
    def test_report_prints_table(self, tmp_path, capsys):
        spec = tmp_path / "spec.json"
        out = tmp_path / "results.csv"
        payload = spec_payload(out)
        payload["n_uses"] = [300, 900, 2700]
        spec.write_text(json.dumps(payload))
        run("experiment", spec, "--cache-dir", tmp_path)
        capsys.readouterr()
        assert run("report", out) == 0
        text = capsys.readouterr().out
        assert "variance_slope" in text and "dpepc" in text

    def test_report_to_file(self, tmp_path):
        spec = tmp_path / "spec.json"
        out = tmp_path / "results.csv"
        spec.write_text(json.dumps(spec_payload(out)))
        run("experiment", spec, "--cache-dir", tmp_path)
        summary = tmp_path / "summary.txt"
        assert run("report", out, "--out", summary) == 0
        assert "mse_at_max_n" in summary.read_text()


class TestErrors:
    def test_unknown_subcommand_exits_nonzero(self):
        with pytest.raises(SystemExit) as exc:
            run("frobnicate")
        assert exc.value.code != 0

    def test_missing_channel_file(self, tmp_path, capsys):
        assert run("simulate", "--channel", tmp_path / "nope.json",
                   "--n-uses", 100, "--cache-dir", tmp_path) == 1
        assert "error:" in capsys.readouterr().err

    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run("--version")
        assert exc.value.code == 0
        assert "weylest" in capsys.readouterr().out
