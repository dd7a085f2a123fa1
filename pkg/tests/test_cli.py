import json

import numpy as np
import pytest

from noisyent.analysis import fidelity
from noisyent.cli import main
from noisyent.errors import ArgumentError
from noisyent.hom import HomFit, simulate_hom_scan, write_curve_csv
from noisyent.io import (load_dataset, load_state, matrix_from_dict, matrix_to_dict, schedule_from_list,
                         schedule_to_list, state_from_dict)
from noisyent.qmat import check_density_matrix
from noisyent.states import apply_schedule, phi_plus_pairs, private_schedule, private_state, smolin_pauli_form


def run(*argv):
    return main([str(a) for a in argv])


def test_matrix_round_trip(rng):
    m = rng.normal(size=(3, 5)) + 1j * rng.normal(size=(3, 5))
    d = matrix_to_dict(m)
    assert set(d) == {"rows", "cols", "re", "im"}
    back = matrix_from_dict(json.loads(json.dumps(d)))
    np.testing.assert_array_equal(back, m)


def test_matrix_from_dict_errors():
    with pytest.raises(ArgumentError):
        matrix_from_dict({"rows": 2, "cols": 2, "re": [1], "im": [0]})
    with pytest.raises(ArgumentError):
        matrix_from_dict({"rows": 2})


def test_state_from_dict_rejects_non_state():
    with pytest.raises(ArgumentError):
        state_from_dict({"matrix": matrix_to_dict(2 * np.eye(2))})


def test_schedule_formats():
    s = private_schedule()
    back = schedule_from_list(json.loads(json.dumps(schedule_to_list(s))))
    np.testing.assert_allclose(apply_schedule(phi_plus_pairs(), back), private_state(), atol=1e-12)
    sym = schedule_from_list([{"weight": 0.25, "pauli_b": b, "pauli_bprime": bp}
                              for b, bp in [("Z", "Y"), ("X", "I"), ("X", "X"), ("X", "Z")]])
    np.testing.assert_allclose(apply_schedule(phi_plus_pairs(), sym), private_state(), atol=1e-12)
    with pytest.raises(ArgumentError):
        schedule_from_list({"weight": 1})


def test_synth_smolin(tmp_path):
    out = tmp_path / "s.json"
    assert run("synth", "smolin", "--out", out) == 0
    np.testing.assert_allclose(load_state(out), smolin_pauli_form(), atol=1e-12)
    manifest = json.loads((tmp_path / "s.json.manifest.json").read_text())
    assert manifest["command"] == "synth" and manifest["rng_seed"] == 0


def test_synth_bell_and_noisy(tmp_path):
    assert run("synth", "bell:phi_plus", "--out", tmp_path / "b.json") == 0
    rho = load_state(tmp_path / "b.json")
    assert rho.shape == (4, 4) and abs(np.trace(rho @ rho) - 1) < 1e-12
    assert run("synth", "private", "--misalign-sigma", 0.035, "--seed", 7, "--out", tmp_path / "p.json") == 0
    noisy = check_density_matrix(load_state(tmp_path / "p.json"))
    assert fidelity(noisy, private_state()) < 1


def test_synth_custom_schedule(tmp_path):
    sched = tmp_path / "sched.json"
    sched.write_text(json.dumps([{"weight": 1.0, "pauli_b": "I", "pauli_bprime": "I"}]))
    assert run("synth", "custom-schedule", "--schedule", sched, "--out", tmp_path / "c.json") == 0
    np.testing.assert_allclose(load_state(tmp_path / "c.json"), phi_plus_pairs(), atol=1e-12)
    assert run("synth", "custom-schedule", "--out", tmp_path / "c2.json") == 2


@pytest.mark.parametrize("name", ["foo", "bell:chi"])
def test_synth_unknown(tmp_path, name):
    assert run("synth", name, "--out", tmp_path / "x.json") == 2


def test_simulate(tmp_path):
    run("synth", "smolin", "--out", tmp_path / "s.json")
    assert run("simulate", tmp_path / "s.json", "--seed", 1, "--out", tmp_path / "d.json") == 0
    d = load_dataset(tmp_path / "d.json")
    assert len(d.records) == 81 and all(len(r.counts) == 16 for r in d.records)
    assert 7000 < d.total_counts / 81 < 7400
    raw = json.loads((tmp_path / "d.json").read_text())
    assert raw["records"][0]["setting"] == "XXXX" and raw["records"][0]["duration_s"] == 3600.0
    assert run("simulate", tmp_path / "s.json", "--mode", "fast", "--duration-s", 1, "--seed", 1,
               "--out", tmp_path / "f.json") == 0
    fast = load_dataset(tmp_path / "f.json")
    assert 4000 < fast.total_counts / 81 < 6000


def test_simulate_deterministic(tmp_path):
    run("synth", "private", "--out", tmp_path / "p.json")
    run("simulate", tmp_path / "p.json", "--seed", 5, "--out", tmp_path / "a.json")
    run("simulate", tmp_path / "p.json", "--seed", 5, "--out", tmp_path / "b.json")
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_simulate_bad_file(tmp_path):
    assert run("simulate", tmp_path / "missing.json", "--out", tmp_path / "d.json") == 2
    (tmp_path / "junk.json").write_text("{not json")
    assert run("simulate", tmp_path / "junk.json", "--out", tmp_path / "d.json") == 2


def test_reconstruct(tmp_path):
    run("synth", "smolin", "--out", tmp_path / "s.json")
    run("simulate", tmp_path / "s.json", "--seed", 2, "--out", tmp_path / "d.json")
    assert run("reconstruct", tmp_path / "d.json", "--out", tmp_path / "r.json") == 0
    rho = load_state(tmp_path / "r.json")
    assert fidelity(rho, smolin_pauli_form()) >= 0.99
    diag = json.loads((tmp_path / "r.json.diagnostics.json").read_text())
    assert np.all(np.diff(diag["loglik_trace"]) >= -1e-9)
    assert diag["converged"]


def test_reconstruct_errors(tmp_path):
    zeros = {"n_qubits": 1, "records": [{"setting": s, "duration_s": 1, "counts": [0, 0]} for s in "XYZ"]}
    (tmp_path / "z.json").write_text(json.dumps(zeros))
    assert run("reconstruct", tmp_path / "z.json", "--out", tmp_path / "r.json") == 2
    partial = {"n_qubits": 1, "records": zeros["records"][:2]}
    (tmp_path / "p.json").write_text(json.dumps(partial))
    assert run("reconstruct", tmp_path / "p.json", "--out", tmp_path / "r.json") == 2


def test_reconstruct_nonconvergence_exit_3(tmp_path):
    run("synth", "smolin", "--out", tmp_path / "s.json")
    run("simulate", tmp_path / "s.json", "--out", tmp_path / "d.json")
    assert run("reconstruct", tmp_path / "d.json", "--max-iter", 2, "--no-polish",
               "--out", tmp_path / "r.json") == 3
    diag = json.loads((tmp_path / "r.json.diagnostics.json").read_text())
    assert diag["converged"] is False and diag["iterations"] == 2


def test_analyze(tmp_path):
    run("synth", "smolin", "--out", tmp_path / "s.json")
    assert run("analyze", tmp_path / "s.json", "--target", "smolin", "--out", tmp_path / "a.json") == 0
    rep = json.loads((tmp_path / "a.json").read_text())
    assert rep["fidelity_to_target"] == pytest.approx(1.0, abs=1e-9)
    for p in rep["ppt"]:
        np.testing.assert_allclose(p["eigenvalues"], [0.0] * 12 + [0.25] * 4, atol=1e-10)
    assert rep["witness"] == pytest.approx(4) and rep["witness_flipped"] == pytest.approx(-2)

    run("synth", "private", "--out", tmp_path / "p.json")
    run("analyze", tmp_path / "p.json", "--target", "private", "--out", tmp_path / "ap.json")
    rep = json.loads((tmp_path / "ap.json").read_text())
    assert rep["chsh"]["key_setting_value"] == pytest.approx(2.2360679774997896, abs=1e-12)

    mixed = {"n_qubits": 4, "matrix": {"rows": 16, "cols": 16,
                                       "re": list((np.eye(16) / 16).ravel()), "im": [0.0] * 256}}
    (tmp_path / "m.json").write_text(json.dumps(mixed))
    run("analyze", tmp_path / "m.json", "--target", f"file:{tmp_path / 's.json'}", "--out", tmp_path / "am.json")
    rep = json.loads((tmp_path / "am.json").read_text())
    assert rep["fidelity_to_target"] == pytest.approx(0.5, abs=1e-12)


def test_analyze_csv_and_bootstrap(tmp_path):
    run("synth", "private", "--out", tmp_path / "p.json")
    assert run("analyze", tmp_path / "p.json", "--target", "private", "--format", "csv",
               "--out", tmp_path / "a.csv") == 0
    lines = (tmp_path / "a.csv").read_text().splitlines()
    assert lines[0] == "partition,index,eigenvalue" and len(lines) == 1 + 3 * 16
    assert run("analyze", tmp_path / "p.json", "--target", "private", "--bootstrap-n", 2, "--duration-s", 600,
               "--out", tmp_path / "b.json") == 0
    rep = json.loads((tmp_path / "b.json").read_text())
    assert rep["bootstrap_n"] == 2 and rep["bootstrap_std"]["fidelity_to_target"] > 0
    assert run("analyze", tmp_path / "p.json", "--target", "nonsense", "--out", tmp_path / "x.json") == 2


def test_homfit(tmp_path):
    grid = np.linspace(-2, 2, 31)
    write_curve_csv(tmp_path / "c.csv", simulate_hom_scan(HomFit(5e4, 0.79, 0.0, 0.5), grid, rng_seed=1))
    assert run("homfit", tmp_path / "c.csv", "--out", tmp_path / "f.json") == 0
    fit = json.loads((tmp_path / "f.json").read_text())
    assert set(fit) == {"baseline", "visibility", "center", "width", "residual_rms"}
    assert fit["visibility"] == pytest.approx(0.79, abs=0.03)
    model = (tmp_path / "f.json.model.csv").read_text().splitlines()
    assert model[0] == "delay,model" and len(model) == 1 + grid.size

    (tmp_path / "flat.csv").write_text("delay,counts\n" + "".join(f"{t},100\n" for t in grid))
    assert run("homfit", tmp_path / "flat.csv", "--out", tmp_path / "g.json") == 3


def test_stdout_when_no_out(capsys):
    assert run("synth", "bell:psi_minus") == 0
    d = json.loads(capsys.readouterr().out)
    assert d["n_qubits"] == 2


def test_usage_error():
    with pytest.raises(SystemExit) as exc:
        run("frobnicate")
    assert exc.value.code == 2
