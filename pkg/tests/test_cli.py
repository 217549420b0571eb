import csv
import hashlib
import json
from pathlib import Path

import pytest

from commdeg.cli import main
from commdeg.config import compile_schedule, parse_config

EXPERIMENTS = Path(__file__).resolve().parents[1] / "experiments"

HEIS = """\
version: 1
name: heis
group: heisenberg
measure: {family: uniform-ball}
radii: {from: 2, to: 6}
estimator: {mode: exact}
homomorphisms:
  mod3: {kind: reduction, modulus: 3}
  mod2: {kind: reduction, modulus: 2}
coset_density: {hom: mod2, element: "1", n_max: 6}
checks:
  - {type: quotient-bound, hom: mod3}
  - {type: decay-trend, exact_window: [2, 5]}
"""


def levels(diags):
    return [(d.level, d.field) for d in diags]


def test_validate_diagnostics():
    _, d = parse_config("version: 1\ngroup: free(2)\nradii: [1, 2]\nestimator: {mode: sampled}\n")
    err = [x for x in d if x.level == "error"]
    assert err and "seed" in err[0].message and err[0].line == 4
    _, d = parse_config("version: 1\ngroup: infinite-dihedral\nradii: [1]\n"
                        "measure: {family: padded, padding: {element: s, schedule: 3}}\n")
    assert any(x.level == "error" and "order" in x.message for x in d)
    exp, d = parse_config("version: 1\ngroup: infinite-dihedral\nradii: [1]\n"
                          "generating_sets: {X: [s, t], Y: [s, st]}\n")
    assert exp is not None and any(x.level == "info" and "two generating sets" in x.message for x in d)
    _, d = parse_config("version: 1\ngroup: free(2)\nradii: [1]\nbogus: 3\n")
    assert ("error", "bogus") in levels(d)
    _, d = parse_config("version: 1\ngroup: free-abelian(1)\nradii: [1]\nmeasure: {family: random-walk}\n")
    assert any(x.level == "warning" and "laziness" in x.field for x in d)


def test_schedule_expressions():
    f = compile_schedule("n*n + 1")
    assert f(3) == 10
    with pytest.raises(ValueError):
        compile_schedule("__import__('os')")


@pytest.mark.parametrize("path", sorted(EXPERIMENTS.glob("*.yaml")), ids=lambda p: p.stem)
def test_shipped_configs_validate(path, capsys):
    assert main(["validate", str(path)]) == 0


def test_cli_validate_error_exit(tmp_path, capsys):
    cfg = tmp_path / "bad.yaml"
    cfg.write_text("version: 1\ngroup: free(2)\nradii: [1]\nestimator: {mode: sampled}\n")
    assert main(["validate", str(cfg)]) == 2
    assert "line 4" in capsys.readouterr().err


def run_once(tmp_path, name):
    cfg = tmp_path / "heis.yaml"
    cfg.write_text(HEIS)
    out = tmp_path / name
    assert main(["run", str(cfg), "--no-cache", "--output-dir", str(out)]) == 0
    return out


def test_run_outputs_and_determinism(tmp_path, capsys):
    a = run_once(tmp_path, "a")
    b = run_once(tmp_path, "b")
    names = sorted(p.name for p in a.iterdir())
    assert names == ["checks.json", "coset_density.csv", "growth.csv", "growth_fit.json", "manifest.json", "series.csv"]
    for n in names:
        if n != "manifest.json":
            assert (a / n).read_bytes() == (b / n).read_bytes(), n
    ma, mb = (json.loads((d / "manifest.json").read_text()) for d in (a, b))
    ma.pop("wall_times_seconds"), mb.pop("wall_times_seconds")
    assert ma == mb
    rows = list(csv.DictReader((a / "series.csv").open()))
    assert [int(r["n"]) for r in rows] == [2, 3, 4, 5, 6]
    assert all(r["mode"] == "exact" and r["ci_lo"] == "" for r in rows)
    assert len(list(csv.DictReader((a / "coset_density.csv").open()))) == 7
    checks = json.loads((a / "checks.json").read_text())
    assert [c["status"] for c in checks] == ["pass", "pass"]
    for n, h in ma["outputs"].items():
        assert hashlib.sha256((a / n).read_bytes()).hexdigest() == h


def test_failed_check_exit_code(tmp_path, capsys):
    cfg = tmp_path / "z.yaml"
    cfg.write_text("version: 1\ngroup: free(2)\nradii: [1, 2]\nestimator: {mode: exact}\n"
                   "checks:\n  - {type: band, target: 1, tolerance: 0.01}\n")
    assert main(["run", str(cfg), "--no-cache", "--output-dir", str(tmp_path / "o")]) == 4


def test_resource_error_exit_code(tmp_path, capsys):
    cfg = tmp_path / "big.yaml"
    cfg.write_text("version: 1\ngroup: free(2)\nradii: [6]\nestimator: {mode: auto, budget: 100}\n")
    assert main(["run", str(cfg), "--no-cache", "--output-dir", str(tmp_path / "o")]) == 3
