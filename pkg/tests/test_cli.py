import csv
from pathlib import Path

from neuroevo.cli import main

TINY_XOR = """\
experiment = xor_fixed
seed = 60
runs = 2
initial_species = 4
generation_cap = 5
max_size = 20
"""


def write_cfg(tmp_path: Path, text: str) -> Path:
    path = tmp_path / "exp.cfg"
    path.write_text(text)
    return path


def run_into(tmp_path: Path, text: str, name: str, capsys) -> Path:
    cfg = write_cfg(tmp_path, text)
    out = tmp_path / name
    code = main(["run", str(cfg), "--out", str(out)])
    capsys.readouterr()
    assert code == 0
    return out


class TestRunCommand:
    def test_outputs_written(self, tmp_path, capsys):
        out = run_into(tmp_path, TINY_XOR, "out", capsys)
        names = {p.name for p in out.iterdir()}
        assert {"manifest.txt", "runs.csv", "summary.csv", "run_000.csv", "run_001.csv"} <= names

    def test_double_run_byte_identical(self, tmp_path, capsys):
        a = run_into(tmp_path, TINY_XOR, "a", capsys)
        b = run_into(tmp_path, TINY_XOR, "b", capsys)
        files_a = sorted(p.name for p in a.iterdir())
        assert files_a == sorted(p.name for p in b.iterdir())
        for name in files_a:
            if name == "manifest.txt":
                continue  # records the differing output_dir override
            assert (a / name).read_bytes() == (b / name).read_bytes(), name

    def test_summary_recomputable_from_runs(self, tmp_path, capsys):
        out = run_into(tmp_path, TINY_XOR, "out", capsys)
        with (out / "runs.csv").open() as fh:
            rows = list(csv.DictReader(fh))
        with (out / "summary.csv").open() as fh:
            summary = next(csv.DictReader(fh))
        solved = [r for r in rows if r["solved"] == "1"]
        assert int(summary["runs"]) == len(rows)
        assert int(summary["successes"]) == len(solved)
        if solved:
            mean_ev = sum(int(r["evaluations"]) for r in solved) / len(solved)
            assert abs(float(summary["mean_evaluations"]) - mean_ev) < 1e-9

    def test_run_log_matches_summary(self, tmp_path, capsys):
        out = run_into(tmp_path, TINY_XOR, "out", capsys)
        with (out / "runs.csv").open() as fh:
            rows = list(csv.DictReader(fh))
        for i, row in enumerate(rows):
            with (out / f"run_{i:03d}.csv").open() as fh:
                gens = list(csv.DictReader(fh))
            assert len(gens) == int(row["generations"])
            assert gens[-1]["evaluations"] == row["evaluations"]

    def test_seed_override_changes_manifest(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, TINY_XOR)
        out = tmp_path / "o"
        assert main(["run", str(cfg), "--out", str(out), "--seed", "99", "--runs", "1"]) == 0
        capsys.readouterr()
        manifest = (out / "manifest.txt").read_text()
        assert "seed = 99" in manifest
        assert "run_seeds = 99" in manifest

    def test_recoverability_experiment(self, tmp_path, capsys):
        text = "experiment = recoverability\nseed = 0\n"
        out = run_into(tmp_path, text, "rec", capsys)
        golden = Path(__file__).parent / "data" / "recoverability_golden.csv"
        assert (out / "recoverability.csv").read_text() == golden.read_text()


class TestExitCodes:
    def test_bad_config_exits_one(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, "experiment = sudoku\nseed = 1\n")
        assert main(["run", str(cfg)]) == 1
        assert "config error" in capsys.readouterr().err

    def test_missing_file_exits_one(self, tmp_path, capsys):
        assert main(["run", str(tmp_path / "nope.cfg")]) == 1
        capsys.readouterr()
