import json
import math

import numpy as np
import pytest

from cliffspec.cli import dumps_stable, run


def read_csv(path):
    lines = path.read_text().splitlines()
    header = lines[0].split(",")
    data = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]])
    return header, data


def test_unknown_flag_exits_one(capsys):
    assert run(["spectrum", "--bogus"]) == 1
    assert "usage" in capsys.readouterr().err.lower()


def test_missing_command_exits_one(capsys):
    assert run([]) == 1


def test_potential_csv(tmp_path):
    assert run(["--output-dir", str(tmp_path), "potential", "--blocks", "2",
                "--samples", "3"]) == 0
    header, data = read_csv(tmp_path / "potential.csv")
    assert header == ["sigma", "v"]
    assert data[0, 0] == 0.25
    assert np.all(data[:, 1] <= 0.0)
    # the edge plateau equals -kappa0^2 and the free region is zero
    k0sq = (13.0 * math.pi / 4.0) ** 2
    at_09 = data[np.abs(data[:, 0] - 0.9) < 0.06][:, 1]
    assert np.allclose(at_09, -k0sq)
    assert np.all(data[data[:, 0] > 1.0001][:, 1] == 0.0)


def test_potential_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert run(["--output-dir", str(d), "potential", "--blocks", "5"]) == 0
    assert (a / "potential.csv").read_bytes() == (b / "potential.csv").read_bytes()


def test_profiles_outputs(tmp_path):
    assert run(["--output-dir", str(tmp_path), "profiles", "--kind", "zeta",
                "--blocks", "6", "--samples-per-segment", "8"]) == 0
    header, data = read_csv(tmp_path / "profile_zeta.csv")
    assert header == ["sigma", "value", "deriv"]
    side = json.loads((tmp_path / "profile_zeta.json").read_text())
    assert len(side["block_peaks"]) == 6
    assert len(side["partial_norms"]) == 6
    k0 = 13.0 * math.pi / 4.0
    assert math.isclose(side["partial_norms"][0], 13.0 * math.pi / (16.0 * k0 ** 3),
                        rel_tol=1e-12)


def test_eigen_csv(tmp_path):
    assert run(["--output-dir", str(tmp_path), "eigen", "--lambda", "20",
                "--sigma-max", "2", "--samples", "256"]) == 0
    header, data = read_csv(tmp_path / "eigen_20.csv")
    assert header == ["sigma", "psi"]
    assert data.shape == (256, 2)
    assert np.max(np.abs(data[:, 1])) <= 1.0 + 1e-9


def test_phase_csv(tmp_path):
    assert run(["--output-dir", str(tmp_path), "phase", "--lgrid", "0.5:50:64"]) == 0
    header, data = read_csv(tmp_path / "phase.csv")
    assert header == ["lambda", "delta"]
    assert np.all(np.abs(np.diff(data[:, 1])) < math.pi / 2.0)


def test_phase_bad_grid_exits_one(tmp_path):
    assert run(["--output-dir", str(tmp_path), "phase", "--lgrid", "5:1:10"]) == 1


def test_spectrum_json_small_range(tmp_path):
    assert run(["--output-dir", str(tmp_path), "spectrum", "--lmin", "-300",
                "--lmax", "-50", "--ppd", "48"]) == 0
    doc = json.loads((tmp_path / "spectrum.json").read_text())
    assert len(doc["roots"]) == 2
    assert math.isclose(doc["roots"][0], -72.6416, rel_tol=1e-4)
    assert math.isclose(doc["roots"][1], -210.342, rel_tol=1e-4)
    assert doc["failures"] == []
    # defaults use m = 1/2, hbar = 1, x0 = 1, so E = lambda
    assert doc["energies_physical"] == doc["roots"]


def test_spectrum_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert run(["--output-dir", str(d), "spectrum", "--lmin", "-120",
                    "--lmax", "-50", "--ppd", "32"]) == 0
    assert (a / "spectrum.json").read_bytes() == (b / "spectrum.json").read_bytes()


def test_scaling_check_small(tmp_path):
    assert run(["--output-dir", str(tmp_path), "scaling-check", "--lmin", "-900",
                "--lmax", "-50", "--ppd", "48"]) == 0
    doc = json.loads((tmp_path / "scaling_check.json").read_text())
    assert doc["missing"] == []
    assert len(doc["pairs"]) == 1
    assert abs(doc["pairs"][0]["rel_error"] - 2.7e-5) < 1e-5


def test_evolve_config(tmp_path):
    conf = {
        "center": 3.0, "width": 0.3, "momentum": -8.0,
        "tau_list": [0.0, 0.05],
        "sigma_min": 2.0 ** -6, "sigma_max": 6.0, "n_sigma": 3000,
        "n_k": 512, "include_bound": False,
    }
    cpath = tmp_path / "run.json"
    cpath.write_text(json.dumps(conf))
    assert run(["--output-dir", str(tmp_path), "evolve", "--config", str(cpath)]) == 0
    header, data = read_csv(tmp_path / "evolve_000.csv")
    assert header == ["sigma", "re", "im", "abs2"]
    summary = json.loads((tmp_path / "evolve_summary.json").read_text())
    assert len(summary["states"]) == 2
    assert summary["states"][0]["momentum_sign"] == -1
    assert abs(summary["states"][0]["norm"] - 1.0) < 2e-3
    assert summary["reconstruction_error"] < 2e-3


def test_dumps_stable_format():
    text = dumps_stable({"b": 1.0, "a": [0.1, 2], "c": {"x": True, "y": None}})
    doc = json.loads(text)
    assert doc["a"][0] == 0.1
    assert list(doc.keys()) == ["a", "b", "c"]
    assert "0.10000000000000001" in text   # fixed 17-digit float formatting
