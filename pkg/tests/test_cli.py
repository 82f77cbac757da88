import csv
import io
import json
import subprocess
import sys

import pytest

from mcfpga import cli, devicelab
from mcfpga.payoffs import bs_closed_form
from mcfpga.simcore import GbmParams


def run(*argv):
    out = io.StringIO()
    code = cli.main(list(argv), out=out)
    return code, out.getvalue()


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


class TestPrice:
    ARGS = ("price", "--task", "he-eu", "--paths", "2000", "--steps", "64", "--strategy", "baseline", "--seed", "42")

    def test_repeatable(self):
        code, a = run(*self.ARGS, "--format", "json", "--no-timing")
        _, b = run(*self.ARGS, "--format", "json", "--no-timing")
        assert code == 0
        assert a == b
        rec = json.loads(a)
        assert rec["task"] == "he-eu" and rec["paths"] == 2000 and rec["steps"] == 64
        assert rec["flops"] > 0 and rec["latency"] is None

    def test_text_fields(self):
        code, text = run(*self.ARGS)
        assert code == 0
        for key in ("price", "stderr", "latency", "flops"):
            assert key in text

    def test_only_seed_changes_price(self):
        def price(*extra):
            return json.loads(run(*self.ARGS, "--format", "json", *extra)[1])["price"]

        ref = price()
        assert price("--strategy", "combined:3,2") == ref
        assert price("--no-timing", "--format", "json") == ref
        assert price("--seed", "43") != ref

    def test_control_within_three_stderr(self):
        code, out = run(
            "price", "--task", "bs-eu-control", "--paths", "1000000", "--steps", "64", "--strategy", "tp:8", "--format", "json"
        )
        rec = json.loads(out)
        exact = bs_closed_form(GbmParams(100.0, 0.2, 0.05), 100.0, 1.0)
        assert code == 0
        assert abs(rec["price"] - exact) <= 3 * rec["stderr"]

    def test_power_trace(self, tmp_path):
        trace = write(tmp_path, "p.csv", "t,w\n0,100\n10,100\n")
        code, out = run("price", "--task", "bl-as", "--paths", "100", "--steps", "4", "--power-trace", trace, "--format", "json")
        assert code == 0
        assert json.loads(out)["energy"] == 1000.0

    def test_unknown_task(self, capsys):
        code, _ = run("price", "--task", "nope")
        assert code == 2
        assert "unknown task" in capsys.readouterr().err

    def test_bad_strategy(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run("price", "--task", "he-eu", "--strategy", "tp:0")
        assert exc.value.code == 2

    def test_bad_task_file(self, tmp_path):
        path = write(tmp_path, "t.ini", "[x]\nmodel = gbm\n")
        code, _ = run("price", "--task", "x", "--task-file", path)
        assert code == 4


class TestBench:
    def test_rows_and_identical_prices(self):
        code, out = run("bench", "--task", "he-eu", "--paths", "500", "--steps", "16")
        rows = list(csv.DictReader(io.StringIO(out)))
        assert code == 0
        assert [r["strategy"] for r in rows] == ["baseline", "tp:4", "pp:4"]
        assert len({r["price"] for r in rows}) == 1
        assert list(rows[0]) == list(cli.BENCH_FIELDS)

    def test_repetitions(self):
        code, out = run(
            "bench", "--task", "bl-as", "--strategy", "pp:2", "--repetitions", "3", "--paths", "20000", "--steps", "16"
        )
        rows = list(csv.DictReader(io.StringIO(out)))
        assert [r["repetition"] for r in rows] == ["0", "1", "2"]
        assert len({r["price"] for r in rows}) == 1
        assert all(float(r["latency_s"]) > 0 for r in rows)

    def test_json_deterministic(self):
        args = ("bench", "--task", "he-di", "--paths", "300", "--steps", "8", "--format", "json", "--no-timing")
        assert run(*args)[1] == run(*args)[1]


class TestAnalyze:
    def test_text(self):
        code, out = run("analyze")
        assert code == 0
        k4000 = next(line for line in out.splitlines() if line.startswith("K4000"))
        assert " 15.20 " in k4000
        assert "FPGA/GPU efficiency ratio: 1.195" in out

    def test_json_bytes_stable(self):
        a, b = run("analyze", "--format", "json")[1], run("analyze", "--format", "json")[1]
        assert a == b
        doc = json.loads(a)
        assert 1.15 <= doc["fpga_gpu_efficiency_ratio"] <= 1.45

    def test_csv(self):
        rows = list(csv.DictReader(io.StringIO(run("analyze", "--format", "csv")[1])))
        p385 = next(r for r in rows if r["platform"] == "P385-D5")
        assert float(p385["mean_energy_kj"]) == pytest.approx(1.66)

    def test_empty_file(self, tmp_path):
        code, _ = run("analyze", "--energy", write(tmp_path, "e.csv", ""))
        assert code == 2

    def test_parse_error_location(self, tmp_path, capsys):
        text = (devicelab.bundled_data_dir() / "latency.csv").read_text().replace("K4000,he-ba,-,16,-", "K4000,he-ba,-,x,-")
        path = write(tmp_path, "l.csv", text)
        code, _ = run("analyze", "--latency", path)
        assert code == 4
        assert f"{path}:33:" in capsys.readouterr().err


class TestPartition:
    def test_gpu_for_latency(self, tmp_path):
        code, out = run("partition", write(tmp_path, "w.ini", "[workload]\nobjective = min-latency\n[he-eu]\n"))
        assert code == 0
        assert "W5000" in out
        assert "assess: he-eu: FPGA not selected" in out

    def test_objective_flag(self, tmp_path):
        path = write(tmp_path, "w.ini", "[he-ba]\n")
        code, out = run("partition", path, "--objective", "min-energy", "--format", "json")
        doc = json.loads(out)
        assert code == 0
        assert doc["decisions"][0]["allocations"] == [{"platform": "P385-D5", "variant": "pp", "paths": 10_000_000}]

    def test_infeasible(self, tmp_path, capsys):
        code, _ = run("partition", write(tmp_path, "w.ini", "[workload]\ndevices = C5-SoC:tp\n[he-eu]\n"))
        assert code == 3
        assert "implementation unavailable" in capsys.readouterr().err

    def test_limit_named(self, tmp_path, capsys):
        code, _ = run("partition", write(tmp_path, "w.ini", "[workload]\nmax_seconds = 1\n[he-eu]\n"))
        assert code == 3
        assert "max_seconds" in capsys.readouterr().err

    def test_parse_error(self, tmp_path):
        assert run("partition", write(tmp_path, "w.ini", "[he-eu\n"))[0] == 4

    def test_empty(self, tmp_path):
        assert run("partition", write(tmp_path, "w.ini", ""))[0] == 2

    @pytest.mark.parametrize("fmt", ["json", "csv", "text"])
    def test_deterministic(self, tmp_path, fmt):
        path = write(tmp_path, "w.ini", "[workload]\nsplit = yes\ndevices = W5000, K4000, P385-D5\n[he-eu]\nrepeat = 2\n[bl-as]\n")
        assert run("partition", path, "--format", fmt)[1] == run("partition", path, "--format", fmt)[1]


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "mcfpga", "price", "--task", "bl-as", "--paths", "10", "--steps", "2"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "price" in proc.stdout
