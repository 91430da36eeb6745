import csv
import json

import numpy as np
import pytest

from grflow import dynamics as dyn
from grflow import io
from grflow.cli import main, parse_range
from grflow.errors import InvalidParameterError
from grflow.groups import make_cyclic, parse_group_spec


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


# -- envelopes and CSV ------------------------------------------------------------

@pytest.mark.parametrize("mode", ["real", "complex"])
@pytest.mark.parametrize("spec", ["Z3", "S3", "Z2xZ4"])
def test_envelope_round_trip_is_bitwise(tmp_path, spec, mode):
    ens = dyn.random_ensemble(parse_group_spec(spec), 4, 0.37, mode, seed=11)
    p = tmp_path / "s.json"
    io.write_state(p, ens, {"seed": 11})
    back, doc = io.read_state(p)
    assert back.states.tobytes() == ens.states.tobytes()
    assert back.kappa == ens.kappa and back.mode is ens.mode
    assert back.group.same_table(ens.group)
    assert doc["meta"] == {"seed": 11}


def test_envelope_layout():
    ens = dyn.Ensemble(make_cyclic(2), [[1.0, 0.0]], 1.0, "complex")
    doc = io.envelope(ens)
    assert doc["agents"] == [[[1.0, 0.0], [0.0, 0.0]]]
    assert doc["group_spec"] == "Z2" and doc["field_mode"] == "complex"


@pytest.mark.parametrize(
    "doc",
    [
        {"group_spec": "Z2", "field_mode": "real", "kappa": 1},
        {"group_spec": "Z2", "field_mode": "real", "kappa": 1, "agents": []},
        {"group_spec": "Z2", "field_mode": "real", "kappa": 1, "agents": [[1, 0, 0]]},
        {"group_spec": "Z2", "field_mode": "complex", "kappa": 1, "agents": [[1, 0]]},
        {"group_spec": "Z2", "field_mode": "quaternion", "kappa": 1, "agents": [[1, 0]]},
        {"group_spec": "Q8", "field_mode": "real", "kappa": 1, "agents": [[1, 0]]},
        {"group_spec": "Z2", "field_mode": "real", "kappa": -1, "agents": [[1, 0]]},
    ],
)
def test_malformed_envelopes(doc):
    with pytest.raises(InvalidParameterError):
        io.ensemble_from_envelope(doc)


def test_read_state_errors(tmp_path):
    with pytest.raises(InvalidParameterError):
        io.read_state(tmp_path / "missing.json")
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(InvalidParameterError):
        io.read_state(p)


def test_trajectory_csv_round_trip(tmp_path):
    ens = dyn.random_ensemble(make_cyclic(3), 3, seed=2)
    traj = dyn.simulate(ens, dyn.SimConfig(dt=1e-2, t_final=1.0, keep_states=False))
    p = tmp_path / "t.csv"
    io.write_trajectory_csv(p, traj.records)
    assert io.read_trajectory_csv(p) == traj.records
    assert p.read_text().splitlines()[0] == "t,R2,V,dissipation,residual,min_norm,max_norm"


# -- simulate -----------------------------------------------------------------------

def test_simulate_is_deterministic(tmp_path, capsys):
    args = ["simulate", "--group", "Z3", "--n-agents", 4, "--kappa", 1, "--dt", 1e-2, "--t-final", 2, "--seed", 5]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(capsys, *args, "--out", a)[0] == 0
    assert run(capsys, *args, "--out", b)[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_snapshot_reloads_bit_identical(tmp_path, capsys):
    snap = tmp_path / "s.json"
    code, _, _ = run(capsys, "simulate", "--group", "D3", "--n-agents", 3, "--kappa", 0.5, "--dt", 1e-2,
                     "--t-final", 1, "--out", tmp_path / "t.csv", "--snapshot-out", snap)
    assert code == 0
    ens, doc = io.read_state(snap)
    assert doc["meta"]["seed"] == 0 and doc["meta"]["dt"] == 0.01
    snap2 = tmp_path / "s2.json"
    # zero-length continuation is not allowed, so re-save through the library
    io.write_state(snap2, ens, doc["meta"])
    assert snap2.read_text() == snap.read_text()

    code, _, _ = run(capsys, "simulate", "--init", snap, "--dt", 1e-2, "--t-final", 1,
                     "--out", tmp_path / "t2.csv")
    assert code == 0
    first = io.read_trajectory_csv(tmp_path / "t2.csv")[0]
    last = io.read_trajectory_csv(tmp_path / "t.csv")[-1]
    assert first.R2 == last.R2 and first.V == last.V


def test_simulate_z2_real_is_constant(tmp_path, capsys):
    out = tmp_path / "t.csv"
    assert run(capsys, "simulate", "--group", "Z2", "--n-agents", 5, "--kappa", 1, "--field", "real",
               "--dt", 1e-2, "--t-final", 5, "--out", out)[0] == 0
    V = [d.V for d in io.read_trajectory_csv(out)]
    assert max(V) - min(V) <= 1e-12


def test_simulate_kuramoto_pair(tmp_path, capsys):
    snap = tmp_path / "s.json"
    th = np.array([0.0, 2.0])
    ens = dyn.Ensemble(make_cyclic(1), np.exp(1j * th)[:, None], 1.0, "complex")
    io.write_state(snap, ens)
    out_snap = tmp_path / "end.json"
    assert run(capsys, "simulate", "--init", snap, "--dt", 1e-3, "--t-final", 1, "--out", tmp_path / "t.csv",
               "--snapshot-out", out_snap)[0] == 0
    end, _ = io.read_state(out_snap)
    delta = np.angle(end.states[1, 0] / end.states[0, 0])
    assert abs(np.tan(delta / 2) - np.tan(1.0) * np.exp(-2.0)) <= 1e-9


def test_negative_kappa_is_usage_error(tmp_path, capsys):
    code, _, err = run(capsys, "simulate", "--group", "Z3", "--n-agents", 2, "--kappa", -1,
                       "--out", tmp_path / "t.csv")
    assert code == 1 and "nonnegative" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["--group", "Q8", "--n-agents", 2, "--kappa", 1],
        ["--n-agents", 2, "--kappa", 1],
        ["--group", "Z3", "--n-agents", 2, "--kappa", 1, "--init", "/nonexistent.json"],
        ["--group", "Z3", "--n-agents", 2, "--kappa", 1, "--dt", 0],
    ],
)
def test_simulate_usage_errors(tmp_path, capsys, argv):
    assert run(capsys, "simulate", *argv, "--out", tmp_path / "t.csv")[0] == 1


def test_unknown_command_exits_one(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 1


def test_divergence_exit_code(tmp_path, capsys):
    code, _, err = run(capsys, "simulate", "--group", "Z3", "--n-agents", 3, "--kappa", 1e60, "--dt", 1,
                       "--t-final", 50, "--out", tmp_path / "t.csv")
    assert code == 2 and "diverged" in err


def test_log_goes_to_stderr(tmp_path, capsys, monkeypatch):
    import logging

    monkeypatch.setenv("GRF_LOG", "info")
    root = logging.getLogger()
    saved = list(root.handlers)
    try:
        code, out, _ = run(capsys, "simulate", "--group", "Z3", "--n-agents", 2, "--kappa", 1,
                           "--dt", 1e-2, "--t-final", 1, "--out", tmp_path / "t.csv")
    finally:
        root.handlers[:] = saved
        root.setLevel(logging.WARNING)
    assert code == 0 and "simulating" not in out


# -- classify -----------------------------------------------------------------------

def _state(tmp_path, rows, spec="Z3", mode="real"):
    p = tmp_path / "state.json"
    io.write_state(p, dyn.Ensemble(parse_group_spec(spec), np.asarray(rows), 1.0, mode))
    return p


def test_classify_aggregated_state(tmp_path, capsys):
    p = _state(tmp_path, [[0.6, 0.8, 0.0]] * 3)
    code, out, _ = run(capsys, "classify", "--state", p, "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["is_equilibrium"]
    assert len(doc["elements"]) == 3 and doc["z3_class"] in ("E2", "E3")


def test_classify_random_state_text(tmp_path, capsys):
    ens = dyn.random_ensemble(make_cyclic(5), 4, mode="real", seed=9)
    p = _state(tmp_path, ens.states.real, "Z5")
    code, out, _ = run(capsys, "classify", "--state", p)
    assert code == 3
    assert "residual:" in out and "equilibrium: no" in out and "Z3 class" not in out


def test_classify_z3_classes_text(tmp_path, capsys):
    code, out, _ = run(capsys, "classify", "--state", _state(tmp_path, [[1, 2, 3], [-1, -2, -3]]))
    assert code == 0 and "Z3 class: E1" in out and "0-global" in out


def test_classify_complex_state_note(tmp_path, capsys):
    ens = dyn.random_ensemble(make_cyclic(3), 3, seed=4)
    p = _state(tmp_path, ens.states, mode="complex")
    code, out, _ = run(capsys, "classify", "--state", p)
    assert code == 3 and "REAL" in out
    code, out, _ = run(capsys, "classify", "--state", p, "--format", "json")
    assert "note" in json.loads(out)


def test_classify_malformed_state(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"group_spec": "Z3"}))
    assert run(capsys, "classify", "--state", p)[0] == 1


# -- group-info and verify -----------------------------------------------------------

def test_group_info_z6(capsys):
    code, out, _ = run(capsys, "group-info", "--group", "Z6")
    assert code == 0
    assert "m=1: 2" in out and "MISMATCH" not in out


def test_group_info_z5(capsys):
    code, out, _ = run(capsys, "group-info", "--group", "Z5")
    rows = [line.split(":")[1].split()[0] for line in out.splitlines() if line.strip().startswith("m=")]
    assert code == 0 and rows == ["5", "1", "1", "1", "1"]


def test_group_info_klein(capsys):
    code, out, _ = run(capsys, "group-info", "--group", "Z2xZ2")
    assert code == 0 and "are zero" in out
    assert out.count("nullity=4 bruteforce=4") == 4


def test_group_info_bad_spec(capsys):
    assert run(capsys, "group-info", "--group", "Z2xQ")[0] == 1


@pytest.mark.parametrize("spec, suite", [("S3", "ring"), ("Z3", "dynamics"), ("Z12", "equilibria")])
def test_verify_suites(capsys, spec, suite):
    code, out, _ = run(capsys, "verify", "--group", spec, "--suite", suite, "--trials", 20)
    assert code == 0 and "all checks passed" in out and "FAIL" not in out


# -- sweep ------------------------------------------------------------------------------

def _summary(path):
    with open(path / "summary.csv") as fh:
        return list(csv.DictReader(fh))


def test_parse_range():
    assert parse_range("0:1:0.5") == [0.0, 0.5, 1.0]
    assert parse_range("0.5:2:0.5") == [0.5, 1.0, 1.5, 2.0]


def test_sweep_real_z3(tmp_path, capsys):
    out = tmp_path / "sw"
    code, _, _ = run(capsys, "sweep", "--group", "Z3", "--n-agents", 4, "--field", "real", "--kappa", "0:2:1",
                     "--trials", 2, "--dt", 1e-2, "--t-final", 100, "--record-every", 10, "--workers", 2,
                     "--out", out)
    assert code == 0
    rows = _summary(out)
    assert len(rows) == 6
    assert len(list(out.glob("traj_kappa*_trial*.csv"))) == 6
    for r in rows:
        if float(r["kappa"]) > 0:
            assert float(r["final_residual"]) <= 1e-6
        else:
            traj = io.read_trajectory_csv(out / f"traj_kappa0_trial{r['trial']}.csv")
            assert float(r["final_V"]) == traj[0].V
            assert r["converged_at_t"] == "" or float(r["final_residual"]) < 1e-6


def test_sweep_empty_range(tmp_path, capsys):
    code, _, err = run(capsys, "sweep", "--group", "Z3", "--n-agents", 2, "--kappa", "2:1:0.5",
                       "--out", tmp_path / "sw")
    assert code == 1 and "empty" in err


@pytest.mark.parametrize("kappa", [0.5, 2.0])
def test_time_rescaling(kappa):
    # kappa multiplies the whole field, so x_kappa(t) = x_1(kappa t)
    base = dyn.random_ensemble(make_cyclic(3), 4, 1.0, "real", seed=3)
    fast = dyn.Ensemble(base.group, base.states, kappa, base.mode)
    ref = dyn.simulate(base, dyn.SimConfig(dt=1e-2, t_final=20.0, keep_states=False))
    run_k = dyn.simulate(fast, dyn.SimConfig(dt=1e-2 / kappa, t_final=20.0 / kappa, keep_states=False))
    assert len(ref.records) == len(run_k.records)
    assert np.abs(ref.column("R2") - run_k.column("R2")).max() <= 1e-10
    assert np.allclose(ref.times, kappa * run_k.times, rtol=1e-12, atol=0)
    if ref.converged_at is not None:
        assert run_k.converged_at == pytest.approx(ref.converged_at / kappa)
