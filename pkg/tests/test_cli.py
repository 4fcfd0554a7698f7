import json
import math
from pathlib import Path

import numpy as np
import pytest

from cbtsim.cli import main

REPO = Path(__file__).resolve().parents[1]
CONFIGS = REPO / "configs"


def write_config(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def read_header(path):
    with open(path) as fh:
        return fh.readline().strip().split(",")


def quick_dichromatic(**overrides):
    doc = {
        "name": "fig3",
        "scenario": "dichromatic",
        "engine": "collision",
        "schedule": {"periods": 40},
        "recording": {"stride": 5},
        "g2": {"pairs": [[1, 1], [2, 2], [1, 2]], "lags": [0, 2, 5]},
    }
    doc.update(overrides)
    return doc


def quick_qs(**overrides):
    doc = {
        "name": "fig4",
        "scenario": "qs",
        "engine": "qme",
        "schedule": {"periods": 60},
        "pearson": {"window": 40},
    }
    doc.update(overrides)
    return doc


class TestRunCommand:
    def test_dichromatic_smoke_files_and_schemas(self, tmp_path):
        cfg = write_config(tmp_path, quick_dichromatic())
        assert main(["run", "--config", cfg, "--out", str(tmp_path)]) == 0
        traj = tmp_path / "fig3_traj.csv"
        g2csv = tmp_path / "fig3_g2.csv"
        manifest = tmp_path / "fig3_manifest.json"
        assert traj.exists() and g2csv.exists() and manifest.exists()
        assert read_header(traj) == ["step", "t", "trace", "n1", "n2"]
        assert read_header(g2csv) == ["n_base", "lag_steps", "tau", "pair", "value"]
        doc = json.loads(manifest.read_text())
        assert doc["config"]["schedule"]["t_bar"] == 0.05
        assert len(doc["slots"]) == 3
        assert {"gamma_plus", "gammabar_minus", "beta_bar", "mu_b"} <= set(doc["slots"][0])

    def test_invalid_config_exits_2_naming_field(self, tmp_path, capsys):
        cfg = write_config(tmp_path, quick_dichromatic(schedule={"t_bar": -1.0}))
        assert main(["run", "--config", cfg, "--out", str(tmp_path)]) == 2
        assert "t_bar" in capsys.readouterr().err

    def test_both_engines_emit_two_files_plus_deviation(self, tmp_path):
        cfg = write_config(tmp_path, quick_qs())
        code = main(["run", "--config", cfg, "--out", str(tmp_path),
                     "--engine", "both"])
        assert code == 0
        assert (tmp_path / "fig4_traj_collision.csv").exists()
        assert (tmp_path / "fig4_traj_qme.csv").exists()
        dev = tmp_path / "fig4_dev.csv"
        assert dev.exists()
        header = read_header(dev)
        assert header[:2] == ["step", "t"]
        assert "dev_sx1" in header

    def test_qs_trajectory_columns(self, tmp_path):
        cfg = write_config(tmp_path, quick_qs())
        main(["run", "--config", cfg, "--out", str(tmp_path)])
        assert read_header(tmp_path / "fig4_traj.csv") == \
            ["step", "t", "trace", "sx1", "sx2", "sy1", "sz1", "c12"]

    def test_full_precision_round_trip(self, tmp_path):
        cfg = write_config(tmp_path, quick_qs(schedule={"periods": 5}))
        main(["run", "--config", cfg, "--out", str(tmp_path)])
        with open(tmp_path / "fig4_traj.csv") as fh:
            fh.readline()
            first = fh.readline().split(",")
        assert float(first[2]) == 1.0


class TestScanCommand:
    def scan_doc(self):
        return {
            "name": "mini",
            "scenario": "qs",
            "scan": {"phi0": [0.5, 0.8, 1.0], "beta": [0.5, 1.0, 2.0],
                     "steps": 60},
        }

    def test_grid_rows(self, tmp_path):
        cfg = write_config(tmp_path, self.scan_doc())
        assert main(["scan", "--config", cfg, "--out", str(tmp_path)]) == 0
        lines = (tmp_path / "mini_scan.csv").read_text().strip().splitlines()
        assert len(lines) == 10       # header + 9 grid points
        assert lines[0].split(",") == [
            "grid_index", "phi0", "beta", "temperature", "steps",
            "amplitude", "c12", "in_qs_region"]

    def test_resume_skips_completed_rows(self, tmp_path):
        cfg = write_config(tmp_path, self.scan_doc())
        main(["scan", "--config", cfg, "--out", str(tmp_path)])
        path = tmp_path / "mini_scan.csv"
        lines = path.read_text().strip().splitlines()
        # drop the last 4 rows as if interrupted, then resume
        path.write_text("\n".join(lines[:6]) + "\n")
        sentinel = lines[1]
        assert main(["scan", "--config", cfg, "--out", str(tmp_path),
                     "--resume"]) == 0
        new_lines = path.read_text().strip().splitlines()
        assert len(new_lines) == 10
        assert new_lines[1] == sentinel      # completed rows untouched
        assert sorted(int(l.split(",")[0]) for l in new_lines[1:]) == list(range(9))


class TestSpectrumCommand:
    def test_single_qubit_stationary_zero(self, tmp_path):
        cfg = write_config(tmp_path, {"name": "sq", "scenario": "single_qubit"})
        assert main(["spectrum", "--config", cfg, "--out", str(tmp_path)]) == 0
        header = read_header(tmp_path / "sq_spectrum.csv")
        assert header == ["index", "re", "im", "cluster", "geometric_mult", "lep_order"]
        rows = (tmp_path / "sq_spectrum.csv").read_text().strip().splitlines()[1:]
        values = [complex(float(r.split(",")[1]), float(r.split(",")[2]))
                  for r in rows]
        zero_like = [v for v in values if abs(v) < 1e-10]
        assert len(zero_like) == 1
        doc = json.loads((tmp_path / "sq_lep.json").read_text())
        assert doc["stationary_eigenvalue"] is True

    def test_qs_fourth_order_lep_point(self, tmp_path):
        assert main(["spectrum", "--config", str(CONFIGS / "fig4d_lep.json"),
                     "--out", str(tmp_path)]) == 0
        doc = json.loads((tmp_path / "fig4d_lep_lep.json").read_text())
        orders = [c["lep_order"] for c in doc["clusters"]]
        assert max(orders) == 4
        # at the coalescence the generator has no biorthogonal eigensystem
        assert doc["defective_biorthogonal"] is True

    def test_default_qs_point_has_oscillation_pair(self, tmp_path):
        assert main(["spectrum", "--config", str(CONFIGS / "fig4_spectrum.json"),
                     "--out", str(tmp_path)]) == 0
        doc = json.loads((tmp_path / "fig4_spectrum_lep.json").read_text())
        assert doc["oscillation_pair"] is not None
        (re1, im1), (re2, im2) = doc["oscillation_pair"]
        assert abs(im1) > 1e-3 and im1 == pytest.approx(-im2, abs=1e-6)


class TestBenchCommand:
    def test_bench_schema(self, tmp_path):
        doc = {"name": "b", "scenario": "qs",
               "bench": {"parameter": "g", "values": [0.5, 0.25],
                         "t_bar": 0.2, "steps": 120}}
        cfg = write_config(tmp_path, doc)
        assert main(["bench", "--config", cfg, "--out", str(tmp_path)]) == 0
        lines = (tmp_path / "b_bench.csv").read_text().strip().splitlines()
        assert lines[0].split(",") == ["parameter", "sweep_value", "steps", "max_dev"]
        assert len(lines) == 3

    def test_scan_dispatches_bench_configs(self, tmp_path):
        doc = {"name": "b2", "scenario": "qs",
               "bench": {"parameter": "g", "values": [0.5], "t_bar": 0.2,
                         "steps": 60}}
        cfg = write_config(tmp_path, doc)
        assert main(["scan", "--config", cfg, "--out", str(tmp_path)]) == 0
        assert (tmp_path / "b2_bench.csv").exists()


class TestBundledConfigs:
    @pytest.mark.parametrize("name", [
        "fig3.json", "fig3_qme.json", "fig4.json", "fig4b_scan.json",
        "fig4_spectrum.json", "fig4d_lep.json", "bench_g.json",
        "bench_tbar.json", "single_qubit.json"])
    def test_bundled_configs_parse(self, name):
        from cbtsim.scenarios import merge_config
        doc = json.loads((CONFIGS / name).read_text())
        merged = merge_config(doc)
        assert merged["scenario"] in ("qs", "dichromatic", "single_qubit")
