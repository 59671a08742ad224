import json

import numpy as np
import pytest

from chiralqed import ParseError, ValidationError, load_runspec, reproduce, run, sweep
from chiralqed.cli import main
from chiralqed.emit import fmt, matrix_csv_text
from chiralqed.runspec import WindingTask


MINIMAL_SINGLE = {"ensemble": {"preset": "single_atom", "ratio": 0.2}}


def write_config(tmp_path, doc, name="run.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


class TestLoadRunspec:
    def test_minimal_preset_defaults(self):
        spec = load_runspec(json.dumps(MINIMAL_SINGLE))
        assert spec.preset.kind == "single_atom"
        # gamma_tot = 1 normalization by default
        assert spec.preset.gamma == pytest.approx(0.2)
        assert spec.preset.gamma_prime == pytest.approx(0.8)
        assert spec.config.n_emitters == 1
        assert spec.reservoir.matrix[0, 0] == pytest.approx(-0.8j)
        assert spec.tasks == ()

    def test_tasks_parsed(self):
        doc = {
            "ensemble": {"preset": "two_atom", "gamma": 0.2, "gamma_prime": 0.8},
            "tasks": [{"type": "winding"}, {"type": "spectrum"}],
        }
        spec = load_runspec(json.dumps(doc))
        assert isinstance(spec.tasks[0], WindingTask)
        assert spec.tasks[1].kind == "spectrum"

    def test_unknown_keys_rejected_everywhere(self):
        doc = {
            "ensemble": {"preset": "single_atom", "ratio": 0.2, "extra": 1},
            "tasks": [{"type": "spectrum", "oops": True}],
            "banana": 3,
        }
        with pytest.raises(ValidationError) as err:
            load_runspec(json.dumps(doc))
        message = str(err.value)
        assert "extra" in message and "oops" in message and "banana" in message

    def test_nondissipative_reservoir_names_eigenvalue(self):
        doc = {
            "ensemble": {"omega_eg": 1.0, "atoms": [{"z": 0.0, "coupling": 1.0}]},
            "reservoir": {"mode": "matrix", "k_prime": [[[0.0, 1.0]]]},
        }
        with pytest.raises(ValidationError) as err:
            load_runspec(json.dumps(doc))
        assert "not dissipative" in str(err.value)
        assert "2" in str(err.value)  # eigenvalue of -i(K'-K'^dag)

    def test_parse_error_carries_position(self):
        with pytest.raises(ParseError) as err:
            load_runspec("{\n  \"ensemble\": }")
        assert "line 2" in str(err.value)

    def test_custom_atoms_with_independent_reservoir(self):
        doc = {
            "ensemble": {
                "omega_eg": 50.0,
                "atoms": [
                    {"z": 0.0, "coupling": [0.6, 0.0]},
                    {"z": -0.01, "coupling": [0.0, 0.6]},
                ],
            },
            "reservoir": {"mode": "independent", "gamma_prime": [0.5, 0.25]},
        }
        spec = load_runspec(json.dumps(doc))
        assert spec.config.n_emitters == 2
        assert np.allclose(spec.reservoir.matrix, np.diag([-0.5j, -0.25j]))

    def test_custom_atoms_require_reservoir(self):
        doc = {"ensemble": {"omega_eg": 1.0, "atoms": [{"z": 0.0, "coupling": 1.0}]}}
        with pytest.raises(ValidationError):
            load_runspec(json.dumps(doc))

    def test_reservoir_dimension_mismatch(self):
        doc = dict(MINIMAL_SINGLE)
        doc["reservoir"] = {"mode": "independent", "gamma_prime": [0.1, 0.2]}
        with pytest.raises(ValidationError):
            load_runspec(json.dumps(doc))

    def test_symmetric_pair_reservoir(self):
        doc = {
            "ensemble": {"preset": "two_atom", "ratio": 0.3},
            "reservoir": {"mode": "symmetric_pair", "gamma_prime": 0.7},
        }
        spec = load_runspec(json.dumps(doc))
        assert np.allclose(spec.reservoir.matrix, 0.7 * np.array([[-1j, -1], [-1, -1j]]))

    def test_g2_task_needs_single_emitter(self):
        doc = {
            "ensemble": {"preset": "two_atom", "ratio": 0.3},
            "tasks": [{"type": "g2"}],
        }
        with pytest.raises(ValidationError):
            load_runspec(json.dumps(doc))

    def test_empty_sweep_range_rejected(self):
        doc = {
            "ensemble": {"preset": "single_atom", "ratio": 0.2},
            "tasks": [{"type": "sweep", "parameter": "gamma_ratio", "range": [0.5, 0.5]}],
        }
        with pytest.raises(ValidationError):
            load_runspec(json.dumps(doc))

    def test_sweep_requires_preset(self):
        doc = {
            "ensemble": {"omega_eg": 1.0, "atoms": [{"z": 0.0, "coupling": 1.0}]},
            "reservoir": {"mode": "independent", "gamma_prime": 0.5},
            "tasks": [{"type": "sweep", "parameter": "gamma_ratio", "range": [0, 1]}],
        }
        with pytest.raises(ValidationError):
            load_runspec(json.dumps(doc))

    def test_ratio_and_rates_conflict(self):
        doc = {"ensemble": {"preset": "single_atom", "ratio": 0.2, "gamma": 0.1}}
        with pytest.raises(ValidationError):
            load_runspec(json.dumps(doc))


class TestEmit:
    def test_fmt_round_trip_and_sentinels(self):
        assert fmt(0.1) == "0.1"
        assert float(fmt(1 / 3)) == 1 / 3
        assert fmt(np.inf) == "inf"
        assert fmt(-np.inf) == "-inf"

    def test_matrix_csv_pairs(self):
        text = matrix_csv_text(np.array([[1 + 2j, 0], [0, -1j]]))
        assert text.splitlines()[0] == "1.0,2.0,0.0,0.0"
        assert text.splitlines()[1] == "0.0,0.0,0.0,-1.0"


class TestRun:
    def test_spectrum_and_transmission_artifacts(self, tmp_path):
        doc = {
            "ensemble": {"preset": "single_atom", "ratio": 0.2},
            "tasks": [{"type": "spectrum"}, {"type": "transmission", "points": 256}],
        }
        manifest = run(load_runspec(json.dumps(doc)), out_dir=tmp_path / "out")
        assert all(t["status"] == "ok" for t in manifest["tasks"])
        trace = (tmp_path / "out" / "01_transmission.csv").read_text().splitlines()
        assert trace[0] == "k,re_t,im_t,abs_t,phase_unwrapped"
        assert len(trace) >= 257
        spectrum = (tmp_path / "out" / "00_spectrum.csv").read_text().splitlines()
        assert spectrum[0] == "re_energy,im_energy,class,re_right_0,im_right_0"
        assert "BOUND" in spectrum[1]
        # the spin matrices are exported as row-major re,im pair CSVs
        h_bound = (tmp_path / "out" / "00_spectrum_h_bound.csv").read_text().splitlines()
        assert [float(c) for c in h_bound[0].split(",")] == pytest.approx([100.0, -0.6])
        assert (tmp_path / "out" / "manifest.json").exists()

    def test_byte_identical_reruns(self, tmp_path):
        doc = {
            "ensemble": {"preset": "two_atom", "ratio": 0.65},
            "tasks": [{"type": "spectrum"}, {"type": "winding", "points": 512}],
        }
        spec = load_runspec(json.dumps(doc))
        run(spec, out_dir=tmp_path / "a")
        run(spec, out_dir=tmp_path / "b")
        names = sorted(p.name for p in (tmp_path / "a").iterdir())
        assert names == sorted(p.name for p in (tmp_path / "b").iterdir())
        for name in names:
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_winding_detail(self, tmp_path):
        doc = {
            "ensemble": {"preset": "two_atom", "ratio": 0.75},
            "tasks": [{"type": "winding", "points": 512}],
        }
        manifest = run(load_runspec(json.dumps(doc)), out_dir=tmp_path / "out")
        detail = manifest["tasks"][0]["detail"]
        assert detail["winding"] == 2
        assert detail["bound_state_count"] == 0
        assert detail["levinson_consistent"] is True

    def test_task_failure_collected(self, tmp_path):
        # exactly at threshold the winding task fails but the run continues
        doc = {
            "ensemble": {"preset": "single_atom", "ratio": 0.5},
            "tasks": [{"type": "winding"}, {"type": "spectrum"}],
        }
        manifest = run(load_runspec(json.dumps(doc)), out_dir=tmp_path / "out")
        assert manifest["tasks"][0]["status"] == "error"
        assert "ZeroOnContour" in manifest["tasks"][0]["error"]
        assert manifest["tasks"][1]["status"] == "ok"

    def test_boundstates_artifacts(self, tmp_path):
        doc = {
            "ensemble": {"preset": "single_atom", "ratio": 0.2},
            "tasks": [{"type": "boundstates", "points": 501}],
        }
        manifest = run(load_runspec(json.dumps(doc)), out_dir=tmp_path / "out")
        files = manifest["tasks"][0]["files"]
        assert "00_boundstates_state00_right.csv" in files
        assert "00_boundstates_state00_left.csv" in files
        right = (tmp_path / "out" / "00_boundstates_state00_right.csv").read_text().splitlines()
        assert right[0] == "z,re_phi,im_phi,abs_phi"

    def test_g2_artifacts_with_divergence(self, tmp_path):
        doc = {
            "ensemble": {"preset": "single_atom", "ratio": 0.5},
            "tasks": [{"type": "g2", "tau_span": [0.0, 2.0], "points": 5}],
        }
        manifest = run(load_runspec(json.dumps(doc)), out_dir=tmp_path / "out")
        assert manifest["tasks"][0]["detail"]["divergent"] is True
        body = (tmp_path / "out" / "00_g2.csv").read_text().splitlines()
        assert body[0] == "tau,g2,abs_psi2_sq"
        assert body[1].split(",")[1] == "inf"

    def test_exact_mode_task(self, tmp_path):
        doc = {
            "ensemble": {"preset": "two_atom", "ratio": 0.3},
            "tasks": [{"type": "transmission", "points": 128, "mode": "exact"}],
        }
        manifest = run(load_runspec(json.dumps(doc)), out_dir=tmp_path / "out")
        assert manifest["tasks"][0]["detail"]["mode"] == "exact"


class TestSweep:
    def test_single_atom_ratio_scan(self):
        spec = load_runspec(json.dumps(MINIMAL_SINGLE))
        result = sweep(spec, "gamma_ratio", (0.0, 1.0), 101)
        plain = [r for r in result.rows if not r.is_threshold]
        for row in plain:
            if row.value < 0.5 - 1e-9:
                assert row.num_bound == 1
            elif row.value > 0.5 + 1e-9:
                assert row.num_bound == 0
        thresholds = [r for r in result.rows if r.is_threshold]
        assert len(thresholds) == 1
        assert abs(thresholds[0].value - 0.5) < 1e-8
        values = [r.value for r in result.rows]
        assert values == sorted(values)

    def test_two_atom_double_threshold(self):
        spec = load_runspec(json.dumps({"ensemble": {"preset": "two_atom", "ratio": 0.2}}))
        result = sweep(spec, "gamma_ratio", (0.2, 0.8), 13)
        thresholds = [r.value for r in result.rows if r.is_threshold]
        assert len(thresholds) == 2
        assert abs(thresholds[0] - 0.34442280721976437) < 1e-7
        assert abs(thresholds[1] - 0.7054784247838826) < 1e-7
        # windings step 0 -> 1 -> 2 across the thresholds
        for row in result.rows:
            if row.winding is None:
                continue
            if row.value < thresholds[0]:
                assert row.winding == 0
            elif row.value > thresholds[1]:
                assert row.winding == 2
            elif thresholds[0] + 1e-6 < row.value < thresholds[1] - 1e-6:
                assert row.winding == 1

    def test_piecewise_constant_bound_count(self):
        spec = load_runspec(json.dumps(MINIMAL_SINGLE))
        result = sweep(spec, "gamma_ratio", (0.0, 1.0), 21)
        rows = result.rows
        for prev, cur in zip(rows[:-1], rows[1:]):
            if prev.num_bound != cur.num_bound:
                assert prev.is_threshold or cur.is_threshold

    def test_csv_shape(self):
        spec = load_runspec(json.dumps(MINIMAL_SINGLE))
        result = sweep(spec, "gamma_ratio", (0.1, 0.3), 3)
        lines = result.to_csv().splitlines()
        assert lines[0] == "value,num_bound,winding,min_abs_t,is_threshold,error"
        assert len(lines) == 4

    def test_rejects_nonpreset(self):
        doc = {
            "ensemble": {"omega_eg": 1.0, "atoms": [{"z": 0.0, "coupling": 1.0}]},
            "reservoir": {"mode": "independent", "gamma_prime": 0.5},
        }
        spec = load_runspec(json.dumps(doc))
        with pytest.raises(ValidationError):
            sweep(spec, "gamma_ratio", (0.0, 1.0), 5)

    def test_separation_scan(self):
        spec = load_runspec(json.dumps({"ensemble": {"preset": "two_atom", "ratio": 0.3}}))
        result = sweep(spec, "separation", (0.01, 0.05), 3)
        assert all(r.num_bound is not None for r in result.rows)

    def test_counts_only_inner_task(self):
        spec = load_runspec(json.dumps(MINIMAL_SINGLE))
        result = sweep(spec, "gamma_ratio", (0.2, 0.8), 7, observe="spectrum")
        assert all(r.winding is None and r.min_abs_t is None for r in result.rows)
        assert [r for r in result.rows if r.is_threshold]  # bisection still runs

    def test_inner_task_via_document(self):
        doc = {
            "ensemble": {"preset": "single_atom", "ratio": 0.2},
            "tasks": [{"type": "sweep", "parameter": "gamma_ratio",
                       "range": [0.1, 0.4], "steps": 3, "task": "spectrum"}],
        }
        spec = load_runspec(json.dumps(doc))
        assert spec.tasks[0].observe == "spectrum"
        with pytest.raises(ValidationError):
            load_runspec(json.dumps({
                "ensemble": {"preset": "single_atom", "ratio": 0.2},
                "tasks": [{"type": "sweep", "parameter": "gamma_ratio",
                           "range": [0.1, 0.4], "task": "dance"}],
            }))


class TestReproduce:
    def test_fig3a_summary(self, tmp_path):
        manifest = reproduce("fig3a", out_dir=tmp_path / "out")
        summary = (tmp_path / "out" / "fig3a_summary.csv").read_text().splitlines()
        assert summary[0] == "ratio,winding,num_bound,zero_on_contour,min_abs_t"
        table = {row.split(",")[0]: row.split(",") for row in summary[1:]}
        assert table["1.0"][1] == "1" and table["1.0"][3] == "false"
        assert table["0.5"][1] == "1" and table["0.5"][3] == "true"
        assert table["0.2"][1] == "0" and table["0.2"][3] == "false"
        # the flagged trajectory passes through the origin
        assert float(table["0.5"][4]) == 0.0
        assert (tmp_path / "out" / "fig3a_ratio_0.5_trajectory.csv").exists()
        assert manifest["files"]

    def test_fig3a_trajectories_start_and_end_near_unity(self, tmp_path):
        reproduce("fig3a", out_dir=tmp_path / "out")
        rows = (tmp_path / "out" / "fig3a_ratio_0.2_trajectory.csv").read_text().splitlines()[1:]
        first = complex(float(rows[0].split(",")[0]), float(rows[0].split(",")[1]))
        last = complex(float(rows[-1].split(",")[0]), float(rows[-1].split(",")[1]))
        assert abs(first - 1.0) < 0.05
        assert abs(last - 1.0) < 0.05

    def test_fig3b_windings(self, tmp_path):
        manifest = reproduce("fig3b", out_dir=tmp_path / "out")
        summary = (tmp_path / "out" / "fig3b_summary.csv").read_text().splitlines()
        table = {row.split(",")[0]: row.split(",") for row in summary[1:]}
        assert table["0.2"][1] == "0" and table["0.2"][2] == "2"
        assert table["0.65"][1] == "1" and table["0.65"][2] == "1"
        assert table["0.75"][1] == "2" and table["0.75"][2] == "0"
        assert all(t["status"] == "ok" for t in manifest["tasks"])

    def test_figs1_heatmap_ridge(self, tmp_path):
        reproduce("figS1", out_dir=tmp_path / "out")
        lines = (tmp_path / "out" / "figS1_heatmap.csv").read_text().splitlines()
        assert len(lines) == 102  # header + 101 ratios
        assert len(lines[1].split(",")) == 202  # ratio + 201 delays
        by_ratio = {line.split(",")[0]: line.split(",")[1:] for line in lines[1:]}
        assert all(cell == "inf" for cell in by_ratio["0.5"])
        assert all(cell != "inf" for cell in by_ratio["0.49"])
        assert all(cell != "inf" for cell in by_ratio["0.51"])
        # gamma = 0 row: uncorrelated light, log10(g2) = 0
        assert all(float(cell) == 0.0 for cell in by_ratio["0.0"])

    def test_unknown_recipe(self):
        with pytest.raises(ValidationError):
            reproduce("fig9z")


class TestCLI:
    def test_spectrum_exit_zero(self, tmp_path, capsys):
        config = write_config(tmp_path, MINIMAL_SINGLE)
        code = main(["spectrum", "--config", str(config), "--out", str(tmp_path / "out")])
        assert code == 0
        assert "spectrum: ok" in capsys.readouterr().out

    def test_invalid_config_exit_one(self, tmp_path, capsys):
        config = write_config(tmp_path, {"ensemble": {"preset": "nope"}})
        code = main(["spectrum", "--config", str(config), "--out", str(tmp_path / "out")])
        assert code == 1
        assert "unknown preset" in capsys.readouterr().err

    def test_missing_config_exit_one(self, tmp_path):
        assert main(["spectrum", "--config", str(tmp_path / "nope.json")]) == 1

    def test_task_failure_exit_two(self, tmp_path, capsys):
        config = write_config(tmp_path, {"ensemble": {"preset": "single_atom", "ratio": 0.5}})
        code = main(["winding", "--config", str(config), "--out", str(tmp_path / "out")])
        assert code == 2
        assert "ZeroOnContour" in capsys.readouterr().err

    def test_transmission_flags(self, tmp_path):
        config = write_config(tmp_path, MINIMAL_SINGLE)
        code = main([
            "transmission", "--config", str(config), "--out", str(tmp_path / "out"),
            "--points", "64", "--mode", "exact",
        ])
        assert code == 0
        header = (tmp_path / "out" / "00_transmission.csv").read_text().splitlines()[0]
        assert header == "k,re_t,im_t,abs_t,phase_unwrapped"

    def test_g2_cli(self, tmp_path):
        config = write_config(tmp_path, MINIMAL_SINGLE)
        code = main([
            "g2", "--config", str(config), "--out", str(tmp_path / "out"),
            "--tau-span", "0", "5", "--points", "11", "--normalization", "raw",
        ])
        assert code == 0

    def test_sweep_cli(self, tmp_path):
        config = write_config(tmp_path, MINIMAL_SINGLE)
        code = main([
            "sweep", "--config", str(config), "--out", str(tmp_path / "out"),
            "--parameter", "gamma_ratio", "--range", "0.1", "0.4", "--steps", "4",
        ])
        assert code == 0
        assert (tmp_path / "out" / "00_sweep.csv").exists()

    def test_reproduce_cli(self, tmp_path):
        assert main(["reproduce", "fig3b", "--out", str(tmp_path / "out")]) == 0
        assert (tmp_path / "out" / "fig3b_summary.csv").exists()

    def test_env_var_output_dir(self, tmp_path, monkeypatch):
        monkeypatch.setenv("CHIRALQED_OUTDIR", str(tmp_path / "envout"))
        config = write_config(tmp_path, MINIMAL_SINGLE)
        assert main(["spectrum", "--config", str(config)]) == 0
        assert (tmp_path / "envout" / "00_spectrum.csv").exists()

    def test_tolerance_override_flags(self, tmp_path):
        config = write_config(tmp_path, MINIMAL_SINGLE)
        code = main([
            "spectrum", "--config", str(config), "--out", str(tmp_path / "out"),
            "--tol-real", "1e-6", "--tol-match", "1e-5",
        ])
        assert code == 0
        manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
        assert manifest["config_hash"]
