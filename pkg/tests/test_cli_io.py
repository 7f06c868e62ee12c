import json

import numpy as np
import pytest

from poroplate.cli import EXIT_CONFIG, EXIT_FAIL, EXIT_OK, EXIT_USAGE, run_cli
from poroplate.config import (Config, ConfigSyntaxError, ConstraintError, MissingConfigError, UnknownKeyError,
                              config_from_dict, dump_config, parse_config, write_config)
from poroplate.evolution import ENERGY_COLUMNS, simulate
from poroplate.forms import build_operators
from poroplate.initial import random_state, zero_state
from poroplate.mesh import build_mesh
from poroplate.output import (ENERGY_HEADER, check_record, read_energy_csv, read_summary, read_vtk, write_energy_csv,
                              write_summary, write_vtk_snapshot)
from poroplate.vonkarman import VkConfig

SMALL = ["--n-plane", "2"]


def _write(tmp_path, text, name="cfg.json"):
    p = tmp_path / name
    p.write_text(text)
    return p


# -- config --------------------------------------------------------------------

def test_defaults_round_trip(tmp_path):
    cfg = Config()
    write_config(cfg, tmp_path / "sub" / "c.json")
    again = parse_config(tmp_path / "sub" / "c.json")
    assert again == cfg and dump_config(again) == dump_config(cfg)


def test_empty_file_gives_defaults(tmp_path):
    assert parse_config(_write(tmp_path, "")) == Config()


def test_zero_storage_coefficient_names_key_and_line(tmp_path):
    p = _write(tmp_path, '{\n  "params": {\n    "c_b": 0.0\n  }\n}\n')
    with pytest.raises(ConstraintError) as info:
        parse_config(p)
    assert info.value.key == "params.c_b" and info.value.line == 3
    assert "c_b" in str(info.value) and "line 3" in str(info.value)


def test_unknown_key_reports_line(tmp_path):
    p = _write(tmp_path, '{\n  "run": {\n    "dt": 0.1,\n    "stepz": 3\n  }\n}\n')
    with pytest.raises(UnknownKeyError) as info:
        parse_config(p)
    assert info.value.line == 4 and info.value.key == "run.stepz"


def test_unknown_section(tmp_path):
    with pytest.raises(UnknownKeyError):
        parse_config(_write(tmp_path, '{"solver": {}}'))


def test_syntax_error_reports_line(tmp_path):
    with pytest.raises(ConfigSyntaxError) as info:
        parse_config(_write(tmp_path, '{\n  "run": {"dt": 0.1,,}\n}'))
    assert info.value.line == 2


def test_missing_file(tmp_path):
    with pytest.raises(MissingConfigError):
        parse_config(tmp_path / "nope.json")


@pytest.mark.parametrize("data", [
    {"run": {"dt": -1.0}},
    {"run": {"steps": 0}},
    {"mesh": {"n_plane": 0}},
    {"output": {"formats": ["hdf5"]}},
    {"output": {"stride": -1}},
    {"params": {"mu_f": float("nan")}},
    {"ic": {"name": "bogus"}},
])
def test_constraint_violations(data):
    with pytest.raises((ConstraintError, UnknownKeyError)):
        config_from_dict(data)


def test_bad_type_is_reported():
    with pytest.raises(ConstraintError):
        config_from_dict({"run": {"steps": "many"}})


# -- CSV ------------------------------------------------------------------------

def test_zero_trajectory_csv(tmp_path, ops2):
    traj = simulate(ops2, zero_state(ops2), 0.1, 3)
    p = write_energy_csv(traj.reports, tmp_path / "e.csv")
    header = p.read_text().splitlines()[0].split(",")
    assert tuple(header) == ENERGY_HEADER
    data = read_energy_csv(p)
    assert len(data["t"]) == 3 and np.allclose(data["t"], [0.1, 0.2, 0.3])
    assert all(np.all(data[c] == 0.0) for c in header if c != "t")


def test_csv_totals_and_precision(tmp_path, ops2):
    traj = simulate(ops2, random_state(ops2, seed=1), 0.01, 5)
    data = read_energy_csv(write_energy_csv(traj.reports, tmp_path / "e.csv"))
    total = sum(data[c] for c in ENERGY_COLUMNS)
    assert np.allclose(total, data["E"], rtol=1e-12, atol=0)
    # 17 significant digits round-trip exactly
    assert np.array_equal(data["E"], [r.E for r in traj.reports])


def test_csv_pi_column(tmp_path, ops2):
    traj = simulate(ops2, random_state(ops2, seed=1, amplitude=0.1), 0.01, 2, vk=VkConfig())
    data = read_energy_csv(write_energy_csv(traj.reports, tmp_path / "e.csv"))
    assert "Pi" in data and np.array_equal(data["Pi"], [r.Pi for r in traj.reports])


def test_csv_unwritable_location(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError):
        write_energy_csv([], blocker / "e.csv")


# -- VTK ------------------------------------------------------------------------

def test_single_cell_vtk(tmp_path, params):
    ops = build_operators(build_mesh(1, 1, 1, 1), params)
    paths = write_vtk_snapshot(ops, zero_state(ops), tmp_path / "s")
    biot = read_vtk(paths["biot"])
    assert biot.points.shape == (8, 3) and len(biot.cells) == 1 and list(biot.cell_types) == [12]
    assert np.all(biot.point_data["pb"] == 0) and np.all(biot.point_data["eta"] == 0)
    plate = read_vtk(paths["plate"])
    assert plate.points.shape == (4, 3) and list(plate.cell_types) == [9]
    fluid = read_vtk(paths["fluid"])
    assert fluid.points.shape == (27, 3) and len(fluid.cells) == 8


def test_vtk_periodic_images_agree(tmp_path, ops2):
    paths = write_vtk_snapshot(ops2, random_state(ops2, seed=2), tmp_path / "s")
    biot = read_vtk(paths["biot"])
    X, pb = biot.points, biot.point_data["pb"]
    left = np.flatnonzero(X[:, 0] == 0.0)
    for i in left:
        j = np.flatnonzero((X[:, 0] == 1.0) & (X[:, 1] == X[i, 1]) & (X[:, 2] == X[i, 2]))
        assert pb[j[0]] == pb[i]


def test_vtk_values_match_state(tmp_path, ops2):
    s = random_state(ops2, seed=3)
    paths = write_vtk_snapshot(ops2, s, tmp_path / "s")
    raw = s.raw(ops2.layout)
    assert np.array_equal(read_vtk(paths["pore"]).point_data["pp"], raw["pp"])
    assert np.array_equal(read_vtk(paths["plate"]).point_data["w"], raw["w"][0::4])


# -- summaries ---------------------------------------------------------------------

def test_summary_round_trip(tmp_path):
    recs = [check_record("a", np.float64(1.5), 2.0, True, extra=np.arange(3)), check_record("b", float("inf"), None, False)]
    back = read_summary(write_summary(recs, tmp_path / "s.json"))
    assert back[0] == {"name": "a", "value": 1.5, "tolerance": 2.0, "pass": True, "extra": [0, 1, 2]}
    assert back[1]["value"] == "inf" and back[1]["pass"] is False


# -- CLI ---------------------------------------------------------------------------

def test_cli_simulate(tmp_path, capsys):
    out = tmp_path / "run"
    code = run_cli(["simulate", "--out-dir", str(out), "--steps", "20", *SMALL])
    assert code == EXIT_OK
    E = read_energy_csv(out / "energy.csv")["E"]
    assert len(E) == 20 and np.all(np.diff(E) <= 0)
    summary = read_summary(out / "summary.json")
    assert all(r["pass"] for r in summary)
    assert json.loads((out / "config.json").read_text())["mesh"]["n_plane"] == 2
    assert "all" in capsys.readouterr().out


def test_cli_snapshots(tmp_path):
    cfg = _write(tmp_path, json.dumps({"output": {"formats": ["csv", "vtk"], "stride": 2}}))
    out = tmp_path / "run"
    assert run_cli(["simulate", "--config", str(cfg), "--out-dir", str(out), "--steps", "4", *SMALL]) == EXIT_OK
    assert sorted(p.name for p in out.glob("step_*_biot.vtk")) == [f"step_{n:06d}_biot.vtk" for n in (0, 2, 4)]


def test_cli_resolvent_prints_ratio(tmp_path, capsys):
    assert run_cli(["resolvent", "--out-dir", str(tmp_path), "--count", "2", *SMALL]) == EXIT_OK
    assert "||y||_X / ||F||_X" in capsys.readouterr().out


def test_cli_usage_errors(tmp_path, capsys):
    assert run_cli(["bogus"]) == EXIT_USAGE
    assert run_cli([]) == EXIT_USAGE
    assert run_cli(["simulate", "--steps", "x"]) == EXIT_USAGE


def test_cli_config_error(tmp_path, capsys):
    cfg = _write(tmp_path, '{\n  "params": {"c_b": 0}\n}\n')
    assert run_cli(["simulate", "--config", str(cfg), "--out-dir", str(tmp_path)]) == EXIT_CONFIG
    err = capsys.readouterr().err
    assert "c_b" in err and "line 2" in err
    assert run_cli(["simulate", "--config", str(tmp_path / "none.json")]) == EXIT_CONFIG


def test_cli_failed_check_exits_one(tmp_path, capsys):
    out = tmp_path / "mms"
    assert run_cli(["mms", "--sizes", "2", "4", "--min-order", "10", "--out-dir", str(out)]) == EXIT_FAIL
    assert "mms_min_order" in capsys.readouterr().err
    assert read_summary(out / "summary.json")[0]["pass"] is False


def test_cli_runs_are_byte_identical(tmp_path):
    for name in ("a", "b"):
        assert run_cli(["simulate", "--out-dir", str(tmp_path / name), "--steps", "10", "--seed", "3", *SMALL]) == 0
    assert (tmp_path / "a" / "energy.csv").read_bytes() == (tmp_path / "b" / "energy.csv").read_bytes()
