import configparser
import os
import subprocess
import sys

import numpy as np
import pytest

from aggspec.cli import EXIT_CONFIG, EXIT_OK, EXIT_VALIDATION, main, run_validate
from aggspec.config import PRESETS, ConfigError, parse_config, parse_methods
from aggspec.response import FrequencyGrid


def load_table(path):
    return np.loadtxt(path, delimiter=",", skiprows=1)


def write_ini(tmp_path, sections, name="run.ini"):
    parser = configparser.ConfigParser()
    parser.read_dict(sections)
    path = tmp_path / name
    with open(path, "w") as fh:
        parser.write(fh)
    return str(path)


@pytest.mark.parametrize("preset", sorted(PRESETS))
def test_presets_parse_and_print(preset, capsys):
    assert main(["spectrum", "--preset", preset, "--print-config"]) == EXIT_OK
    text = capsys.readouterr().out
    parser = configparser.ConfigParser()
    parser.read_string(text)
    assert parser["aggregate"]["n_ground"] == PRESETS[preset]["aggregate"]["n_ground"]


def test_printed_config_round_trips(tmp_path, capsys):
    main(["spectrum", "--preset", "lambda", "--set", "aggregate.n_ground=7", "--print-config"])
    path = tmp_path / "dumped.ini"
    path.write_text(capsys.readouterr().out)
    cfg = parse_config(str(path))
    assert cfg.aggregate.n_ground == 7 and cfg.methods == ("exact", "cpa", 1)


def test_missing_key_is_config_error(tmp_path, capsys):
    sections = {k: dict(v) for k, v in PRESETS["dimer-pdi"].items()}
    del sections["aggregate"]["gamma"]
    path = write_ini(tmp_path, sections)
    assert main(["spectrum", "--config", path]) == EXIT_CONFIG
    assert "missing key 'gamma' in [aggregate]" in capsys.readouterr().err


@pytest.mark.parametrize(
    "override,needle",
    [
        ("aggregate.gamma=-1", "gamma"),
        ("aggregate.n_ground=2.5", "n_ground"),
        ("monomer.fc_override=1,2,3", "fc_override"),
        ("output.methods=exact,order:x", "order"),
        ("grid.count=1", "grid"),
        ("bogus.key=1", "unknown section"),
    ],
)
def test_invalid_values_exit_2(override, needle, capsys):
    assert main(["spectrum", "--preset", "dimer-pdi", "--set", override]) == EXIT_CONFIG
    assert needle in capsys.readouterr().err


def test_no_source_is_config_error(capsys):
    assert main(["spectrum"]) == EXIT_CONFIG


def test_parse_methods():
    assert parse_methods("exact, cpa,order:0,order:3") == ("exact", "cpa", 0, 3)
    for bad in ("", "dense", "order:-1"):
        with pytest.raises(ConfigError):
            parse_methods(bad)


def test_config_file_overrides_preset(tmp_path):
    path = write_ini(tmp_path, {"aggregate": {"coupling": "0.02"}})
    cfg = parse_config(path, preset="dimer-pdi")
    assert cfg.aggregate.coupling == 0.02 and cfg.aggregate.gamma == 0.01


def test_energies_override(tmp_path):
    cfg = parse_config(preset="dimer-pdi", overrides=["monomer.energies_override=0 0.2 | 2.25"])
    np.testing.assert_allclose(cfg.model.ground_energies, [0.0, 0.2])
    np.testing.assert_allclose(cfg.model.excited_energies, [2.25])


def test_lambda_spectrum_large_n(tmp_path):
    out = tmp_path / "lam.csv"
    code = main(
        ["spectrum", "--preset", "lambda", "--set", "aggregate.n_ground=100", "--set", "aggregate.coupling=-0.0006",
         "--out", str(out)]
    )
    assert code == EXIT_OK
    header = out.read_text().splitlines()[0]
    assert header == "omega_eV,sigma_exact,sigma_cpa,sigma_k1"
    data = load_table(out)
    assert data.shape == (4001, 4)
    assert np.all(data[:, 1:] >= 0)


def test_output_is_byte_identical_across_runs(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["spectrum", "--preset", "dimer-pdi", "--grid", "2.0,2.6,301", "--threads", "3"]
    assert main(args + ["--out", str(a)]) == EXIT_OK
    assert main(args + ["--out", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_bad_output_path_leaves_nothing(tmp_path, capsys):
    target = tmp_path / "missing-dir" / "out.csv"
    assert main(["spectrum", "--preset", "dimer-pdi", "--out", str(target)]) == EXIT_CONFIG
    assert not target.exists()
    assert os.listdir(tmp_path) == []


def test_spectrum_to_stdout(capsys):
    assert main(["spectrum", "--preset", "dimer-pdi", "--grid", "2.0,2.5,11", "--methods", "order:0"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "omega_eV,sigma_k0" and len(lines) == 12


def test_single_column_sweep_equals_log_spectrum(tmp_path):
    sweep_out, spec_out = tmp_path / "sweep.csv", tmp_path / "spec.csv"
    common = ["--preset", "fig3-sweep", "--grid", "1.8,2.9,201", "--set", "aggregate.n_ground=10"]
    assert main(["sweep", *common, "--set", "sweep.coupling_min=1.5", "--set", "sweep.coupling_max=1.5",
                 "--set", "sweep.count=1", "--out", str(sweep_out)]) == EXIT_OK
    nj = 1.5 * 0.16
    assert main(["spectrum", *common, "--set", f"aggregate.coupling={nj / 10!r}", "--methods", "order:0",
                 "--out", str(spec_out)]) == EXIT_OK
    sw, sp = load_table(sweep_out), load_table(spec_out)
    np.testing.assert_allclose(sw[:, 0], 1.5)
    np.testing.assert_allclose(sw[:, 1], sp[:, 0])
    np.testing.assert_allclose(sw[:, 2], np.log10(sp[:, 1]), rtol=1e-12)


def test_sweep_without_section_is_config_error(capsys):
    assert main(["sweep", "--preset", "dimer-pdi"]) == EXIT_CONFIG
    assert "[sweep]" in capsys.readouterr().err


def test_validate_passes(capsys):
    assert main(["validate", "--grid", "1.9,2.8,301"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "6/6 passed" in out and "FAIL" not in out


def test_validate_reports_failure(capsys):
    assert main(["validate", "--grid", "1.9,2.8,301", "--tolerance", "1e-300"]) == EXIT_VALIDATION
    captured = capsys.readouterr()
    assert "FAIL" in captured.out and "validation failed" in captured.err


def test_run_validate_deviations_small():
    code, report = run_validate(FrequencyGrid(2.0, 2.7, 141))
    assert code == EXIT_OK
    rows = [line.split() for line in report.splitlines()[2:-1]]
    assert all(float(r[-3]) < 1e-9 for r in rows)


def test_module_entry_point_help():
    res = subprocess.run([sys.executable, "-m", "aggspec", "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    assert "fig3-sweep" in res.stdout and "exit codes" in res.stdout
