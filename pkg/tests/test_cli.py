import csv
import json

import pytest

from layered_stekloff import __version__
from layered_stekloff.cli import load_config, main
from layered_stekloff.errors import InvalidInput
from layered_stekloff.stekloff import eigenvalue_te
from layered_stekloff.radial import LayeredMedium

VACUUM = {"radii": [1.0], "eps": [[1.0, 0.0]]}


def write_config(tmp_path, **cfg):
    path = tmp_path / "run.json"
    path.write_text(json.dumps(cfg))
    return path


def run(tmp_path, command, cfg, *extra, out="out"):
    path = write_config(tmp_path, **cfg)
    code = main([command, "--config", str(path), "--out", str(tmp_path / out), *extra])
    return code, tmp_path / out


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_eigs_vacuum(tmp_path):
    code, out = run(tmp_path, "eigs", dict(medium=VACUUM, k=1.0, delta=0.0, l_max=3))
    assert code == 0
    rows = read_csv(out / "eigs.csv")
    assert len(rows) == 3
    assert list(rows[0]) == ["l", "multiplicity", "mu", "re_lambda", "im_lambda", "delta"]
    assert all(abs(float(r["im_lambda"])) <= 1e-10 for r in rows)
    summary = json.loads((out / "eigs.json").read_text())
    assert summary["version"] == __version__
    assert summary["config"]["k"] == 1.0
    assert "wall_time_s" in json.loads((out / "eigs.timing.json").read_text())
    raw = (out / "eigs.csv").read_bytes()
    assert b"\r" not in raw and raw.endswith(b"\n")


def test_eigs_rejects_malformed_config_without_output(tmp_path, capsys):
    bad = {"radii": [1.0, 0.5], "eps": [[2, 0], [1, 0]]}
    code, out = run(tmp_path, "eigs", dict(medium=bad, k=1.0))
    assert code == 2
    assert not out.exists()
    assert "increasing" in capsys.readouterr().err


@pytest.mark.parametrize(
    "cfg",
    [
        dict(medium={"radii": [1.0], "eps": [[2, -0.1]]}, k=1.0),
        dict(medium=VACUUM, k=1.0, delta=-0.5),
        dict(medium=VACUUM, k=0.0),
        dict(medium=VACUUM, k=1.0, l_max=0),
        dict(k=1.0),
    ],
)
def test_invalid_configs_exit_2(tmp_path, cfg):
    code, out = run(tmp_path, "eigs", cfg)
    assert code == 2 and not out.exists()


def test_unreadable_config(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert main(["eigs", "--config", str(path), "--out", str(tmp_path / "o")]) == 2


def test_eigs_assumption_violation_reports_degrees(tmp_path, capsys):
    code, out = run(tmp_path, "eigs", dict(medium=VACUUM, k=4.4934095, l_max=3))
    assert code == 2
    assert "[1]" in capsys.readouterr().err


def test_eigs_absorbing(tmp_path):
    med = {"radii": [0.5, 1.0], "eps": [[2.0, 0.7], [1.0, 0.2]]}
    code, out = run(tmp_path, "eigs", dict(medium=med, k=1.0, delta=0.5, l_max=8))
    assert code == 0
    assert all(float(r["im_lambda"]) >= -1e-10 for r in read_csv(out / "eigs.csv"))


def test_sweep_delta(tmp_path):
    cfg = dict(medium=VACUUM, k=1.0, sweep={"l": 1, "deltas": [0, 1e-3, 3e-3, 1e-2, 3e-2, 1e-1]})
    code, out = run(tmp_path, "sweep-delta", cfg, "--plots")
    assert code == 0
    summary = json.loads((out / "sweep-delta.json").read_text())
    assert 0.9 <= summary["exponent"] <= 1.1
    rows = read_csv(out / "sweep-delta.csv")
    assert float(rows[0]["delta"]) == 0 and float(rows[0]["drift"]) == 0
    assert (out / "sweep-delta_trajectory.dat").read_text().startswith("# delta")


def test_sweep_delta_empty_grid(tmp_path):
    code, _ = run(tmp_path, "sweep-delta", dict(medium=VACUUM, k=1.0, sweep={"deltas": []}))
    assert code == 2


def test_perturb_identical_and_shrinking(tmp_path):
    med = {"radii": [0.5, 1.0], "eps": [[2.0, 0.0], [1.5, 0.0]]}
    code, out = run(tmp_path, "perturb", dict(medium=med, k=1.0, l_max=4,
                                              perturb={"medium1": med}), out="same")
    assert code == 0
    same = json.loads((out / "perturb.json").read_text())["family"][0]
    assert same["hausdorff"] == 0 and same["max_distance"] == 0
    code, out = run(tmp_path, "perturb", dict(medium=med, k=1.0, l_max=4,
                                              perturb={"shell": 0, "ts": [0.1, 0.01, 0.001]}))
    family = json.loads((out / "perturb.json").read_text())["family"]
    hs = [f["hausdorff"] for f in family]
    assert hs[0] > hs[1] > hs[2] > 0
    assert all("hausdorff" in f for f in family)


def test_detect(tmp_path):
    cfg = dict(medium=VACUUM, k=1.0, delta=0.0, detect={"degrees": [1]})
    code, out = run(tmp_path, "detect", cfg, out="clean")
    assert code == 0
    row = read_csv(out / "detect.csv")[0]
    lam = eigenvalue_te(LayeredMedium.homogeneous(1.0), 1.0, 0.0, 1).lam
    got = complex(float(row["re_detected"]), float(row["im_detected"]))
    assert abs(got - lam) <= 1e-8
    assert row["warning"] == "0"

    cfg["detect"] = {"degrees": [1, 2, 3], "noise": 1e-6}
    code, out = run(tmp_path, "detect", cfg, "--seed", "11", out="noisy")
    assert all(float(r["abs_error"]) <= 1e-4 for r in read_csv(out / "detect.csv"))

    cfg["detect"] = {"degrees": [1], "method": "grid", "window": [[-4, 0], [-1, 1]]}
    code, out = run(tmp_path, "detect", cfg, out="window")
    assert code == 0
    assert read_csv(out / "detect.csv")[0]["warning"] == "1"
    assert json.loads((out / "detect.json").read_text())["warnings"]


def test_check_k(tmp_path):
    code, out = run(tmp_path, "check-k", dict(medium=VACUUM, k=1.0, l_max=3), out="ok")
    assert code == 0
    assert json.loads((out / "check-k.json").read_text())["all_clear"] is True
    code, out = run(tmp_path, "check-k", dict(medium=VACUUM, k=4.4934095, l_max=3), out="bad")
    assert code == 2
    assert json.loads((out / "check-k.json").read_text())["tm_degrees"] == [1]


def test_formats(tmp_path):
    cfg = dict(medium=VACUUM, k=1.0, l_max=2)
    _, out = run(tmp_path, "eigs", cfg, "--format", "csv", out="c")
    assert (out / "eigs.csv").exists() and not (out / "eigs.json").exists()
    _, out = run(tmp_path, "eigs", cfg, "--format", "json", out="j")
    assert (out / "eigs.json").exists() and not (out / "eigs.csv").exists()


def test_outputs_are_byte_identical_across_threads(tmp_path):
    med = {"radii": [0.4, 0.8, 1.0], "eps": [[3.0, 0.1], [2.0, 0.0], [1.2, 0.0]]}
    cfg = dict(medium=med, k=1.3, delta=0.5, l_max=6, seed=5,
               detect={"noise": 1e-6}, perturb={"ts": [0.1, 0.01, 0.001]})
    for cmd, name in (("detect", "detect"), ("perturb", "perturb"), ("eigs", "eigs")):
        _, a = run(tmp_path, cmd, cfg, "--threads", "1", out=f"{cmd}1")
        _, b = run(tmp_path, cmd, cfg, "--threads", "4", out=f"{cmd}4")
        for ext in ("csv", "json"):
            assert (a / f"{name}.{ext}").read_bytes() == (b / f"{name}.{ext}").read_bytes()


def test_selftest_passes_and_lists_invariants(tmp_path):
    out = tmp_path / "s"
    assert main(["selftest", "--out", str(out)]) == 0
    report = json.loads((out / "selftest.json").read_text())
    names = [c["name"] for c in report["invariants"]]
    assert report["passed"] and len(names) == len(set(names)) >= 10
    assert {"name", "value", "tol", "passed"} <= set(report["invariants"][0])


def test_selftest_forced_failure(tmp_path):
    assert main(["selftest", "--out", str(tmp_path / "f"), "--force-fail"]) != 0


def test_bad_flags(tmp_path):
    path = write_config(tmp_path, medium=VACUUM, k=1.0)
    assert main(["eigs", "--config", str(path), "--threads", "0"]) == 2
    with pytest.raises(SystemExit):
        main(["nonsense"])


def test_load_config_parses_complex_pairs():
    cfg = load_config({"medium": {"radii": [0.5, 1], "eps": [[2, 0.5], 1.0]}, "k": 2})
    assert cfg.medium.eps == (2 + 0.5j, 1 + 0j)
    with pytest.raises(InvalidInput):
        load_config({"medium": {"radii": [1], "eps": [[1, 2, 3]]}, "k": 1})
    with pytest.raises(InvalidInput):
        load_config({"medium": VACUUM, "seed": -1})
