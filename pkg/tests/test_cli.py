import json
import shutil
import subprocess
import sys

import pytest

from geocurrents.cli import EXIT_CONFIG, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_PASS, SCHEMA, load_config, main
from geocurrents.errors import ConfigError


def write(tmp_path, text, name="exp.ini"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_certify_sh_liouville_passes(tmp_path, capsys):
    cfg = write(tmp_path, "[task]\ncurrent = L\nepsilon = 0.5\npairs = 40\npair_len = 3\n")
    assert main(["certify-sh", "--config", cfg]) == EXIT_PASS
    report = json.loads(capsys.readouterr().out)
    assert report["verdict"] == "pass" and report["checked"] == 40
    assert report["eps_star_sample_bound"] > 0.5


def test_certify_sh_atomic_fails(tmp_path, capsys):
    cfg = write(tmp_path, "[task]\ncurrent = F\nepsilon = 5\npairs = 40\npair_len = 3\nestimate = no\n")
    assert main(["certify-sh", "--config", cfg]) == EXIT_FAIL


def test_witness_integers(tmp_path, capsys):
    cfg = write(tmp_path, "[task]\nmax_len = 4\n")
    assert main(["witness", "--config", cfg]) == EXIT_PASS
    w = json.loads(capsys.readouterr().out)
    for k in ("i_a", "i_b", "i_ab", "i_abinv", "n"):
        assert isinstance(w[k], int)
    assert w["quantity"] > 1


def test_witness_out_of_budget_is_inconclusive(tmp_path, capsys):
    cfg = write(tmp_path, "[task]\nmax_len = 2\n")
    assert main(["witness", "--config", cfg]) == EXIT_INCONCLUSIVE
    assert "NoWitnessInBudget" in capsys.readouterr().out


def test_malformed_config_writes_nothing(tmp_path, capsys):
    cfg = write(tmp_path, "[task\ncurrent = L\n")
    out = tmp_path / "out"
    assert main(["certify-sh", "--config", cfg, "--out", str(out)]) == EXIT_CONFIG
    assert not out.exists()
    assert "configuration error" in capsys.readouterr().err


@pytest.mark.parametrize("text", [
    "[task]\ncolour = red\n",
    "[bogus]\nx = 1\n",
    "[run]\nseed = 1\nspeed = 2\n",
    "[surface]\ngenus = 2\nsheets = 3\n",
    "[task]\npairs = many\n",
    "[task]\ncurrent = nope\n",
], ids=["task-key", "section", "run-key", "surface-key", "bad-int", "missing-current"])
def test_config_errors(tmp_path, text, capsys):
    out = tmp_path / "out"
    assert main(["certify-sh", "--config", write(tmp_path, text), "--out", str(out)]) == EXIT_CONFIG
    assert not out.exists()


def test_missing_file(tmp_path):
    assert main(["modulus", "--config", str(tmp_path / "none.ini")]) == EXIT_CONFIG


def test_out_of_domain_parameter():
    assert main(["modulus", "--t", "-1"]) == EXIT_CONFIG


def test_spectrum_rerun_is_byte_identical(tmp_path):
    cfg = write(tmp_path, "[task]\ncurrents = L, L2\nmax_len = 4\n")
    for d in ("r1", "r2"):
        assert main(["spectrum", "--config", cfg, "--out", str(tmp_path / d)]) == EXIT_PASS
    a = (tmp_path / "r1" / "spectrum.csv").read_bytes()
    b = (tmp_path / "r2" / "spectrum.csv").read_bytes()
    assert a == b and len(a.splitlines()) == 773


def test_manifest(tmp_path):
    out = tmp_path / "out"
    cfg = write(tmp_path, "[task]\ncurrent = A\nboxes = 3\n[run]\nseed = 4\n")
    assert main(["box-mass", "--config", cfg, "--out", str(out)]) == EXIT_PASS
    m = json.loads((out / "manifest.json").read_text())
    assert m["schema"] == SCHEMA
    assert m["status"] == 0
    assert m["artifacts"] == ["box_mass.csv"]
    assert m["config"]["seed"] == 4
    assert m["config"]["params"]["boxes"] == 3
    assert "box" in m["config"]["defaults"]
    assert not list(out.glob("*.tmp"))


def test_seed_flag_overrides(tmp_path):
    cfg = write(tmp_path, "[run]\nseed = 4\n")
    assert load_config("box-mass", cfg, seed=9).seed == 9


def test_box_mass_seeded(tmp_path, capsys):
    main(["box-mass", "--seed", "3"])
    first = capsys.readouterr().out
    main(["box-mass", "--seed", "3"])
    assert capsys.readouterr().out == first
    assert first.splitlines()[0] == "box_a,box_b,box_c,box_d,mass,opposite_mass"


def test_modulus_flags(capsys):
    assert main(["modulus", "--t", "0.6931471805599453", "--M", "2"]) == EXIT_PASS
    out = capsys.readouterr().out
    csv_part = out.split("# modulus.json")[0].strip().splitlines()
    assert csv_part[1] == "t,M,k,k_prime,eta,omega"
    row = dict(zip(csv_part[1].split(","), map(float, csv_part[2].split(","))))
    assert row["eta"] == pytest.approx(1.0, abs=1e-12)
    assert row["omega"] > row["t"]


def test_flat_strip(capsys):
    assert main(["flat-strip"]) == EXIT_PASS
    assert json.loads(capsys.readouterr().out)["violating_y"] == pytest.approx(7.8767, abs=1e-3)


def test_transfer(capsys):
    assert main(["transfer"]) == EXIT_PASS
    assert capsys.readouterr().out.startswith("probe,n_iX,iY,difference")


def test_integrality_multicurve_difference(capsys):
    assert main(["integrality"]) == EXIT_PASS


def test_integrality_liouville_fails(tmp_path):
    cfg = write(tmp_path, "[task]\ncurrent = L\nprobes = 8\n")
    assert main(["integrality", "--config", cfg]) == EXIT_FAIL


def test_custom_current(tmp_path, capsys):
    text = "[current X]\ntype = atomic\natoms = a1 : 2, b1 : 1\n[task]\ncurrent = X\ndepth = 2\n"
    assert main(["bolicity", "--config", write(tmp_path, text)]) == EXIT_PASS
    assert "n,nu_B_n,mu_G_perp_n" in capsys.readouterr().out


def test_ptolemy_atomic_fails(tmp_path):
    cfg = write(tmp_path, "[task]\ncurrent = F\npairs = 60\npair_len = 3\nn_max = 2\n")
    assert main(["certify-ptolemy", "--config", cfg]) == EXIT_FAIL


def test_unknown_task():
    with pytest.raises(ConfigError):
        load_config("dance", None)


@pytest.mark.skipif(shutil.which("geocurrents") is None, reason="console script not installed")
def test_console_script():
    r = subprocess.run(["geocurrents", "modulus", "--t", "1"], capture_output=True, text=True)
    assert r.returncode == 0 and "t,M,k,k_prime,eta,omega" in r.stdout


def test_module_entry():
    r = subprocess.run([sys.executable, "-m", "geocurrents.cli", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip()
