import json
import math
import subprocess
import sys

import numpy as np
import pytest

from netmon.cli import main
from netmon.errors import InputError
from netmon.fileio import (instance_from_dict, instance_to_dict,
                           load_instance, load_strategy, save_instance)
from netmon.generators import generate, security_level_from_index
from netmon.instance import MixedStrategy, Placement, validate
from netmon.reporting import (CSV_COLUMNS, TIMING_COLUMNS, SweepLimits,
                              run_sweep, sample_schedule)

from conftest import make_ex1


class TestInstanceFiles:
    def test_round_trip_ex1(self, tmp_path, ex1):
        path = tmp_path / "ex1.json"
        save_instance(ex1, path)
        assert load_instance(path) == ex1

    def test_bundled_example_matches_fixture(self, ex1):
        from netmon.fileio import bundled_example
        assert bundled_example() == ex1

    def test_round_trip_random_instances(self, tmp_path):
        rng = np.random.default_rng(19)
        for i in range(50):
            inst = generate("random", seed=int(rng.integers(2 ** 31)),
                            num_locations=int(rng.integers(2, 9)),
                            num_components=int(rng.integers(2, 12)),
                            density=float(rng.uniform(0.2, 0.6)),
                            budget=int(rng.integers(1, 3)))
            path = tmp_path / f"inst{i}.json"
            save_instance(inst, path)
            assert load_instance(path) == inst

    def test_malformed_json_names_position(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"locations": [,]}')
        with pytest.raises(InputError, match="line 1"):
            load_instance(path)

    def test_unknown_key_rejected(self):
        doc = instance_to_dict(make_ex1())
        doc["surprise"] = 1
        with pytest.raises(InputError, match="surprise"):
            instance_from_dict(doc)

    def test_unknown_component_reference(self):
        doc = instance_to_dict(make_ex1())
        doc["monitoring_sets"]["x1"] = ["ghost"]
        with pytest.raises(InputError, match="ghost"):
            instance_from_dict(doc)

    def test_duplicate_component_id(self):
        doc = instance_to_dict(make_ex1())
        doc["components"].append({"id": "u1", "security_level": 0.5})
        with pytest.raises(InputError, match="duplicate"):
            instance_from_dict(doc)


class TestGenerators:
    def test_random_is_deterministic_per_seed(self):
        a = generate("random", seed=7, num_locations=8, num_components=12,
                     density=0.3)
        b = generate("random", seed=7, num_locations=8, num_components=12,
                     density=0.3)
        assert a == b and hash(a) == hash(b)
        c = generate("random", seed=8, num_locations=8, num_components=12,
                     density=0.3)
        assert a != c

    def test_random_is_valid(self):
        for seed in range(20):
            inst = generate("random", seed=seed, num_locations=5,
                            num_components=9, density=0.25)
            assert validate(inst) == []
            levels = set(inst.security_levels.values())
            assert levels <= {0.2, 0.4, 0.6, 0.8}

    def test_disjoint_kind(self):
        inst = generate("disjoint", seed=1, num_locations=5,
                        components_per_location=2)
        seen = set()
        for x in inst.locations:
            assert not (inst.monitoring_sets[x] & seen)
            seen |= inst.monitoring_sets[x]
        assert len(inst.components) == 10

    def test_homogeneous_kind(self):
        inst = generate("homogeneous", seed=3, level=0.4)
        assert set(inst.security_levels.values()) == {0.4}

    def test_grid_kind(self):
        inst = generate("grid", seed=5, rows=4, cols=5, num_components=20)
        assert validate(inst) == []
        # every component is an edge monitored by exactly two nodes
        for u in inst.components:
            assert len(inst.coverers(u)) == 2

    def test_unknown_kind(self):
        with pytest.raises(InputError):
            generate("fractal", seed=0)

    def test_level_scale_mapping(self):
        assert security_level_from_index(5) == 0.2
        assert security_level_from_index(6) == 0.4
        assert security_level_from_index(15) == 0.4
        assert security_level_from_index(16) == 0.6
        assert security_level_from_index(20) == 0.6
        assert security_level_from_index(21) == 0.8
        assert security_level_from_index(math.inf) == 1.0
        with pytest.raises(InputError):
            security_level_from_index(0)


class TestSweep:
    def test_ex1_all_methods(self, ex1):
        report = run_sweep(ex1, [1, 2, 3], ("gcs", "ub", "exact", "cg", "mwu"),
                           SweepLimits(mwu_epsilon=0.5))
        row = report.rows[0]
        assert row.cells["lb_gcs"] == pytest.approx(0.5, abs=1e-7)
        assert row.cells["ub_packing"] == pytest.approx(2 / 3, abs=1e-7)
        assert row.cells["value_exact"] == pytest.approx(2 / 3, abs=1e-7)
        assert not row.errors
        for row in report.rows:
            lb, ub = row.cells["lb_gcs"], row.cells["ub_packing"]
            exact = row.cells["value_exact"]
            assert lb <= exact + 1e-7 <= ub + 2e-7

    def test_partial_methods_leave_cells_empty(self, ex1):
        report = run_sweep(ex1, [1], ("gcs", "ub"))
        row = report.rows[0]
        assert row.cells.get("value_exact") is None
        assert row.cells.get("value_cg") is None
        assert row.cells.get("value_mwu") is None
        csv_text = report.to_csv()
        assert csv_text.splitlines()[0] == ",".join(CSV_COLUMNS)

    def test_unknown_method_rejected(self, ex1):
        with pytest.raises(InputError):
            run_sweep(ex1, [1], ("gcs", "sorcery"))

    def test_csv_is_deterministic_outside_timing_columns(self, ex1):
        limits = SweepLimits(mwu_epsilon=0.5)
        a = run_sweep(ex1, [1, 2], ("gcs", "ub", "cg"), limits)
        b = run_sweep(ex1, [1, 2], ("gcs", "ub", "cg"), limits)
        strip = set(TIMING_COLUMNS)
        for ra, rb in zip(a.rows, b.rows):
            for col in CSV_COLUMNS:
                if col in strip:
                    continue
                assert ra.get(col) == rb.get(col)


class TestSchedule:
    def test_point_mass(self):
        strategy = MixedStrategy.point_mass(Placement.of(["x1", "x2"]))
        plan = sample_schedule(strategy, 5, seed=1)
        assert len(plan) == 5
        assert all(p.locations == ("x1", "x2") for p in plan)

    def test_iid_frequencies_converge(self):
        strategy = MixedStrategy.of(
            [(Placement.of([x]), 1 / 3) for x in ("a", "b", "c")])
        plan = sample_schedule(strategy, 30000, seed=42)
        counts = {x: 0 for x in "abc"}
        for p in plan:
            counts[p.locations[0]] += 1
        for x in "abc":
            assert abs(counts[x] / 30000 - 1 / 3) < 0.01

    def test_cycle_mode(self):
        strategy = MixedStrategy.of(
            [(Placement.of([x]), 1 / 3) for x in ("a", "b", "c")])
        plan = sample_schedule(strategy, 6, mode="cycle")
        assert [p.locations[0] for p in plan] == ["a", "b", "c", "a", "b", "c"]

    def test_cycle_rejects_nonuniform(self):
        strategy = MixedStrategy.of(
            [(Placement.of(["a"]), 0.7), (Placement.of(["b"]), 0.3)])
        with pytest.raises(InputError):
            sample_schedule(strategy, 4, mode="cycle")


class TestCli:
    def _write_ex1(self, tmp_path):
        path = tmp_path / "ex1.json"
        save_instance(make_ex1(), path)
        return str(path)

    def test_solve_approx_report(self, tmp_path, capsys):
        path = self._write_ex1(tmp_path)
        out = tmp_path / "report.json"
        code = main(["solve", "--instance", path, "--r", "1",
                     "--method", "approx", "--out", str(out)])
        assert code == 0
        report = json.loads(out.read_text())
        assert report["lower_bound"] == pytest.approx(0.5, abs=1e-7)
        assert report["upper_bound"] == pytest.approx(2 / 3, abs=1e-7)
        assert report["node_basis_size"] == 1

    def test_generate_solve_schedule_round_trip(self, tmp_path):
        inst_path = tmp_path / "inst.json"
        report_path = tmp_path / "report.json"
        plan_path = tmp_path / "plan.json"
        assert main(["generate", "--kind", "random", "--seed", "3",
                     "--locations", "5", "--components", "7",
                     "--density", "0.4", "--out", str(inst_path)]) == 0
        assert main(["solve", "--instance", str(inst_path), "--r", "2",
                     "--method", "exact", "--out", str(report_path)]) == 0
        assert main(["schedule", "--strategy", str(report_path), "--days",
                     "7", "--seed", "1", "--out", str(plan_path)]) == 0
        plan = json.loads(plan_path.read_text())
        assert len(plan["schedule"]) == 7

    def test_sweep_writes_csv_and_json(self, tmp_path):
        path = self._write_ex1(tmp_path)
        base = tmp_path / "sweep"
        code = main(["sweep", "--instance", path, "--r-from", "1",
                     "--r-to", "3", "--methods", "gcs,ub",
                     "--out", str(base)])
        assert code == 0
        csv_lines = (tmp_path / "sweep.csv").read_text().splitlines()
        assert csv_lines[0] == ",".join(CSV_COLUMNS)
        assert len(csv_lines) == 4
        payload = json.loads((tmp_path / "sweep.json").read_text())
        assert len(payload["rows"]) == 3

    def test_missing_file_exit_code(self, capsys):
        assert main(["solve", "--instance", "/nonexistent.json"]) == 2

    def test_invalid_instance_exit_code(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({
            "locations": ["x"],
            "components": [{"id": "u", "security_level": 1.5}],
            "monitoring_sets": {"x": ["u"]},
        }))
        assert main(["solve", "--instance", str(bad)]) == 2

    def test_time_limit_exit_code(self, tmp_path, capsys):
        path = self._write_ex1(tmp_path)
        out = tmp_path / "partial.json"
        code = main(["solve", "--instance", path, "--method", "cg",
                     "--time-limit", "0", "--out", str(out)])
        assert code == 4
        report = json.loads(out.read_text())
        assert report["termination"] == "time_limit"

    def test_capacity_exit_code(self, tmp_path, capsys):
        locs = [f"x{i:02d}" for i in range(40)]
        doc = {
            "locations": locs,
            "components": [{"id": "u0", "security_level": 0.5}],
            "monitoring_sets": {x: ["u0"] for x in locs},
            "budget": 20,
        }
        path = tmp_path / "big.json"
        path.write_text(json.dumps(doc))
        assert main(["solve", "--instance", str(path), "--method",
                     "exact"]) == 3

    def test_console_script_entry_point(self, tmp_path):
        path = self._write_ex1(tmp_path)
        proc = subprocess.run(
            [sys.executable, "-m", "netmon.cli", "solve", "--instance", path,
             "--method", "ub"],
            capture_output=True, text=True)
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["value"] == pytest.approx(2 / 3)
