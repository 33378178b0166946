import json
import os
import subprocess
from fractions import Fraction

import pytest

import toruslab


def naive_sum(alpha, x, n):
    total = Fraction(0)
    for i in range(n):
        f = (x + i * alpha) % 1
        total += 1 / min(f, 1 - f)
    return total


def test_golden_convergents():
    table = toruslab.angle("golden")
    assert table["rows"][11]["q"] == "144"


def test_exact_sum_matches_fraction_oracle():
    a = toruslab.angle([0, 2, 2, 2, 2, 2, 2, 2, 2])
    alpha = Fraction(a["alpha_exact"])
    s = toruslab.birkhoff_sum([0, 2, 2, 2, 2, 2, 2, 2, 2], Fraction(1, 7), 12)
    assert s == naive_sum(alpha, Fraction(1, 7), 12)


def test_theta_symmetry():
    spec = "sqrt2"
    alpha = Fraction(toruslab.angle(spec)["alpha_exact"])
    x, beta, n = Fraction(1, 7), Fraction(1, 3), 25
    jx = (beta - (n - 1) * alpha - x) % 1
    assert toruslab.theta(spec, x, beta, n) * toruslab.theta(spec, jx, beta, n) == 1


def test_e_measure_closed_form():
    assert abs(float(toruslab.e_measure("sqrt2", 3, 1)) - 0.35325) < 1e-5


def test_pole_raises_structured_error():
    alpha = Fraction(toruslab.angle("sqrt2")["alpha_exact"])
    with pytest.raises(toruslab.ToruslabError) as info:
        toruslab.birkhoff_sum("sqrt2", (-5 * alpha) % 1, 10)
    payload = toruslab.error_info(info.value)
    assert payload["error"] == "OrbitHitsPole"
    assert payload["index"] == 5


def test_verify_and_unknown_tag():
    report = toruslab.verify("lemma-size", samples=10)
    assert report["passed"] == report["samples"] == 10
    with pytest.raises(toruslab.ToruslabError):
        toruslab.verify("no-such-lemma")


def test_kappa_and_weights():
    k = toruslab.kappa(1, 0, 1, 1, 1)
    assert abs(k["closed_form"] - 1.5707963267948966) < 1e-14
    wp, wq = toruslab.mu_infinity(4, 1)
    assert abs(wq - 2 / 3) < 1e-15


def test_preset_replay(tmp_path):
    man = toruslab.run_preset("fig2-right", tmp_path / "run", steps=5000)
    assert any(o["name"].endswith(".csv") for o in man["outputs"])
    identical, mismatches = toruslab.replay(tmp_path / "run" / "manifest.json", tmp_path / "again")
    assert identical, mismatches


def test_sweep_rows():
    csv = toruslab.sweep({"angles": ["golden"], "betas": ["rational:0", "rational:1/3"],
                          "K": [2], "depth": [6]}, threads=2)
    lines = csv.strip().splitlines()
    assert len(lines) == 3
    assert "hypothesis-violated" in csv


@pytest.mark.skipif(not os.environ.get("TORUSLAB_CLI"), reason="CLI path not provided")
def test_cli_convergents_json():
    out = subprocess.run([os.environ["TORUSLAB_CLI"], "convergents", "--quotients", "0,2,2,2,2,2",
                          "--json"], capture_output=True, text=True, check=True)
    data = json.loads(out.stdout)
    assert data["rows"][3]["q"] == "12"
