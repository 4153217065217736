import json

import pytest

from kuhn3.catalog import instantiate
from kuhn3.cli import main
from kuhn3.dynamics import TRAJECTORY_CSV_HEADER
from kuhn3.game_model import StrategyProfile


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestEquilibria:
    def test_triple_range(self, capsys):
        code, out, _ = run_cli(capsys, "equilibria", "--pot", "3.3")
        assert code == 0
        assert "3 solution(s): 2, 3, 4" in out

    def test_lowest_family_instantiation(self, capsys):
        code, out, _ = run_cli(capsys, "equilibria", "--pot", "2.5")
        assert code == 0
        assert "solution 1:" in out
        assert f"b3={4 / 7:.6f}" in out

    def test_small_pot_rejected(self, capsys):
        code, out, err = run_cli(capsys, "equilibria", "--pot", "1.5")
        assert code == 2
        assert "pot must be >= 2" in err

    def test_all_ranges_table(self, capsys):
        code, out, _ = run_cli(capsys, "equilibria", "--pot", "2.0",
                               "--all-ranges")
        assert code == 0
        for sid in ("1a", "2a", "5a", "10a", "10"):
            assert f"\n{sid:>8}  " in out
        assert "critical pots" in out

    def test_json_export(self, capsys):
        code, out, _ = run_cli(capsys, "equilibria", "--pot", "4.35",
                               "--format", "json")
        assert code == 0
        doc = json.loads(out)
        assert doc["valid_at_query"] == ["7", "8", "9"]
        assert len(doc["solutions"]) == 14


class TestVerify:
    def write_profile(self, path, profile):
        path.write_text(json.dumps(profile.as_dict()))
        return str(path)

    def test_equilibrium_exits_zero(self, capsys, tmp_path):
        f = self.write_profile(tmp_path / "p.json", instantiate("10", 6.0))
        code, out, _ = run_cli(capsys, "verify", "--profile", f,
                               "--pot", "6.0")
        assert code == 0
        doc = json.loads(out)
        assert doc["overall"] is True
        assert all(g <= 1e-12 for g in doc["exploitability"])

    def test_non_equilibrium_exits_one_with_gaps(self, capsys, tmp_path):
        f = self.write_profile(tmp_path / "p.json",
                               StrategyProfile.uniform(0.5))
        code, out, _ = run_cli(capsys, "verify", "--profile", f,
                               "--pot", "4.0")
        assert code == 1
        doc = json.loads(out)
        assert doc["overall"] is False
        assert any(v["gap"] > 0 for v in doc["frequencies"].values())

    def test_out_of_range_frequency_is_usage_error(self, capsys, tmp_path):
        d = StrategyProfile.uniform(0.5).as_dict()
        d["b3"] = 1.2
        f = tmp_path / "p.json"
        f.write_text(json.dumps(d))
        code, _, err = run_cli(capsys, "verify", "--profile", str(f),
                               "--pot", "4.0")
        assert code == 2
        assert "outside" in err

    def test_unknown_key_rejected(self, capsys, tmp_path):
        d = StrategyProfile.uniform(0.5).as_dict()
        d["a3"] = 1.0
        f = tmp_path / "p.json"
        f.write_text(json.dumps(d))
        code, _, err = run_cli(capsys, "verify", "--profile", str(f),
                               "--pot", "4.0")
        assert code == 2

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "verify", "--profile",
                               str(tmp_path / "none.json"), "--pot", "3.0")
        assert code == 2


class TestSimulate:
    def test_periodic_run_writes_csv(self, capsys, tmp_path):
        out = tmp_path / "traj.csv"
        code, text, _ = run_cli(capsys, "simulate", "--pot", "2.5",
                                "--seed", "1", "--t-end", "2000",
                                "--out", str(out))
        assert code == 0
        assert "classification: Periodic" in text
        assert "nearest catalog solution: 1" in text
        lines = out.read_text().splitlines()
        assert lines[0] == TRAJECTORY_CSV_HEADER
        assert len(lines) == 4002

    def test_byte_identical_reruns(self, capsys, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        for path in (a, b):
            code, _, _ = run_cli(capsys, "simulate", "--pot", "3.35",
                                 "--seed", "7", "--t-end", "500",
                                 "--out", str(path))
            assert code == 0
        assert a.read_bytes() == b.read_bytes()

    def test_json_format_carries_classification(self, capsys, tmp_path):
        out = tmp_path / "traj.json"
        code, _, _ = run_cli(capsys, "simulate", "--pot", "2.5",
                             "--seed", "1", "--t-end", "2000",
                             "--format", "json", "--out", str(out))
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["meta"]["classification"]["label"] == "Periodic"
        assert doc["meta"]["seed"] == 1

    def test_init_file(self, capsys, tmp_path):
        init = tmp_path / "init.json"
        init.write_text(json.dumps(StrategyProfile.uniform(0.3).as_dict()))
        out = tmp_path / "t.csv"
        code, text, _ = run_cli(capsys, "simulate", "--pot", "2.5",
                                "--init", str(init), "--t-end", "100",
                                "--out", str(out))
        assert code == 0

    def test_gains_file_slows_a_coordinate(self, capsys, tmp_path):
        gains = tmp_path / "gains.json"
        gains.write_text(json.dumps({"b3": 0.5}))
        init = tmp_path / "init.json"
        init.write_text(json.dumps(StrategyProfile.uniform(0.4).as_dict()))
        fast = tmp_path / "fast.csv"
        slow = tmp_path / "slow.csv"
        for out, extra in ((fast, []), (slow, ["--gains", str(gains)])):
            code, _, _ = run_cli(capsys, "simulate", "--pot", "2.5",
                                 "--init", str(init), "--t-end", "5",
                                 "--dt", "5", "--out", str(out), *extra)
            assert code == 0
        row_f = [float(x) for x in fast.read_text().splitlines()[-1].split(",")]
        row_s = [float(x) for x in slow.read_text().splitlines()[-1].split(",")]
        # b3 column moves less under the halved rate; a1 is untouched by it
        b3_col = 1 + 8
        assert abs(row_s[b3_col] - 0.4) < abs(row_f[b3_col] - 0.4)

    def test_bad_gains_file(self, capsys, tmp_path):
        gains = tmp_path / "gains.json"
        gains.write_text(json.dumps({"zz": 1.0}))
        code, _, err = run_cli(capsys, "simulate", "--pot", "2.5",
                               "--seed", "1", "--t-end", "100",
                               "--gains", str(gains))
        assert code == 2
        assert "gains" in err

    def test_seed_from_environment(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("KUHN3_SEED", "9")
        monkeypatch.chdir(tmp_path)
        code, text, _ = run_cli(capsys, "simulate", "--pot", "2.5",
                                "--t-end", "100")
        assert code == 0
        assert (tmp_path / "trajectory.csv").exists()

    def test_requires_some_initial(self, capsys, monkeypatch):
        monkeypatch.delenv("KUHN3_SEED", raising=False)
        code, _, err = run_cli(capsys, "simulate", "--pot", "2.5",
                               "--t-end", "100")
        assert code == 2
        assert "--init" in err

    def test_boundary_init_rejected(self, capsys, tmp_path):
        init = tmp_path / "init.json"
        init.write_text(json.dumps(StrategyProfile.zeros().as_dict()))
        code, _, err = run_cli(capsys, "simulate", "--pot", "2.5",
                               "--init", str(init), "--t-end", "100")
        assert code == 2


class TestSweep:
    def test_profits_sweep_player3_dominates(self, capsys, tmp_path):
        out = tmp_path / "profits.csv"
        code, _, _ = run_cli(capsys, "sweep", "--pot-min", "2", "--pot-max",
                             "6", "--step", "0.01", "--what", "profits",
                             "--out", str(out))
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "P,solution,E1x24,E2x24,E3x24"
        assert len(lines) > 400
        for line in lines[1:]:
            _, _, e1, e2, e3 = line.split(",")
            assert float(e3) >= max(float(e1), float(e2)) - 1e-12

    def test_stability_sweep_unstable_families(self, capsys, tmp_path):
        out = tmp_path / "stab.csv"
        code, _, _ = run_cli(capsys, "sweep", "--pot-min", "3.0",
                             "--pot-max", "4.5", "--step", "0.05",
                             "--what", "stability", "--out", str(out))
        assert code == 0
        rows = [r.split(",") for r in out.read_text().splitlines()[1:]]
        unstable = {"2", "3", "6", "7", "8"}
        from kuhn3.catalog import validity_range
        for P, sid, verdict, *_ in rows:
            if sid in unstable:
                # interior of the range (junction pots sit on the margin)
                vlo, vhi = validity_range(sid)
                if vlo + 1e-6 < float(P) < vhi - 1e-6:
                    assert verdict == "Unstable", (P, sid)
            else:
                assert verdict == "CentreManifoldStable", (P, sid)

    def test_sweep_output_independent_of_thread_count(self, capsys, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        for out, jobs in ((a, "1"), (b, "4")):
            code, _, _ = run_cli(capsys, "sweep", "--pot-min", "2",
                                 "--pot-max", "5", "--step", "0.1",
                                 "--what", "profits", "--jobs", jobs,
                                 "--out", str(out))
            assert code == 0
        assert a.read_bytes() == b.read_bytes()

    def test_frequencies_sweep_schema(self, capsys, tmp_path):
        out = tmp_path / "freq.csv"
        code, _, _ = run_cli(capsys, "sweep", "--pot-min", "5.0",
                             "--pot-max", "5.5", "--step", "0.1",
                             "--what", "frequencies", "--out", str(out))
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("P,solution,a1,")
        assert lines[0].endswith("d3_")
        row = lines[1].split(",")
        assert len(row) == 13

    def test_classification_sweep(self, capsys, tmp_path):
        out = tmp_path / "cls.csv"
        code, _, _ = run_cli(capsys, "sweep", "--pot-min", "2.5",
                             "--pot-max", "3.75", "--step", "1.25",
                             "--what", "classification", "--seed", "1",
                             "--t-end", "4000", "--out", str(out))
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "P,seed,t_end,label"
        labels = {r.split(",")[0]: r.split(",")[-1] for r in lines[1:]}
        assert labels["2.5"] == "Periodic"
        assert labels["3.75"] == "Periodic"

    def test_bad_range_rejected(self, capsys):
        code, _, err = run_cli(capsys, "sweep", "--pot-min", "4",
                               "--pot-max", "3", "--step", "0.1",
                               "--what", "profits")
        assert code == 2


class TestRegimePattern:
    #: expected classification per pot, alternating with the coexistence
    #: structure: periodic / chaotic / close / periodic / chaotic / close
    CASES = [
        (2.5, 2000, "Periodic"),
        (3.1, 20000, "ChaoticTransientToBoundary"),
        (3.35, 8000, "CloseToPeriodic"),
        (3.75, 8000, "Periodic"),
        (4.15, 20000, "ChaoticTransientToBoundary"),
        (4.65, 20000, "CloseToPeriodic"),
    ]

    @pytest.mark.parametrize("pot,t_end,label", CASES)
    def test_six_pot_pattern(self, capsys, tmp_path, pot, t_end, label):
        out = tmp_path / "t.csv"
        code, text, _ = run_cli(capsys, "simulate", "--pot", str(pot),
                                "--seed", "1", "--t-end", str(t_end),
                                "--out", str(out))
        assert code == 0
        assert f"classification: {label}" in text

    def test_usage_error_exit_code(self):
        with pytest.raises(SystemExit) as exc:
            main(["sweep", "--pot-min", "2"])
        assert exc.value.code == 2
