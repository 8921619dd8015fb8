"""Command-line interface: subcommands, exit codes, output determinism."""

import numpy as np
import pytest

from plumecrb import cli, models

CONFIG = """\
source.x0 = 10
source.y0 = 15
source.z0 = 5
source.Q0 = 5
env.U = 3.5
env.sigma_v = 0.5
env.sigma_w = 0.2
noise.sigma = 1e-4
threshold.tau = 0.0018
prior.std_x = 500
prior.std_y = 500
sensors.x_coords = 40,100,160,220
sensors.y_coords = -20,0,20,40
"""


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "scenario.cfg"
    path.write_text(CONFIG)
    return str(path)


def test_crb_command(config_file, capsys):
    assert cli.main(["crb", "--config", config_file]) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "sigma_crb_loc" in out
    sigma = float(out.splitlines()[0].split("=")[1].split()[0])
    assert sigma == pytest.approx(14.437546914691882, rel=1e-12)


def test_missing_config_is_exit_2(tmp_path, capsys):
    code = cli.main(["crb", "--config", str(tmp_path / "absent.cfg")])
    assert code == cli.EXIT_CONFIG
    assert "config error" in capsys.readouterr().err


def test_bad_override_is_exit_2(config_file, capsys):
    code = cli.main(["crb", "--config", config_file, "--set", "env.U=zero"])
    assert code == cli.EXIT_CONFIG


def test_bad_sweep_range_is_exit_2(config_file, tmp_path):
    out = str(tmp_path / "s.csv")
    assert cli.main(["sweep", "--config", config_file, "--tau-min", "1",
                     "--tau-max", "0.1", "--output", out]) == cli.EXIT_CONFIG


def test_unwritable_output_is_exit_3(config_file, tmp_path):
    out = str(tmp_path / "no" / "such" / "dir" / "s.csv")
    code = cli.main(["sweep", "--config", config_file, "--points", "2",
                     "--output", out])
    assert code == cli.EXIT_RUNTIME


def test_sweep_reruns_are_byte_identical(config_file, tmp_path):
    paths = [tmp_path / "s1.csv", tmp_path / "s2.csv"]
    for p in paths:
        assert cli.main(["sweep", "--config", config_file, "--points", "25",
                         "--output", str(p)]) == cli.EXIT_OK
    first, second = (p.read_bytes() for p in paths)
    assert first == second
    assert len(first.decode().splitlines()) == 26


def test_mcmc_command_is_deterministic(config_file, capsys):
    outputs = []
    for _ in range(2):
        assert cli.main(["mcmc", "--config", config_file,
                         "--seed", "3"]) == cli.EXIT_OK
        outputs.append(capsys.readouterr().out)
    assert outputs[0] == outputs[1]
    assert "estimate = (" in outputs[0]


def test_montecarlo_command(config_file, tmp_path, capsys):
    out1, out2 = tmp_path / "r1.csv", tmp_path / "r2.csv"
    for out in (out1, out2):
        assert cli.main(["montecarlo", "--config", config_file, "--runs", "3",
                         "--seed", "11", "--output", str(out),
                         "--threads", "2"]) == cli.EXIT_OK
    assert out1.read_bytes() == out2.read_bytes()
    assert "RMS localization error over 3 runs" in capsys.readouterr().out
    rows = out1.read_text().splitlines()
    assert len(rows) == 4


def test_validate_passes_on_the_real_code(capsys):
    assert cli.main(["validate"]) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert out.count("PASS") == 4
    assert "FAIL" not in out


def test_validate_catches_a_gradient_sign_error(monkeypatch, capsys):
    # a classic sign mutation in the analytic gradient must not survive the
    # finite-difference oracle
    original = models.GaussianPlume.gradients

    def flipped(self, theta, sensors):
        return -original(self, theta, sensors)

    monkeypatch.setattr(models.GaussianPlume, "gradients", flipped)
    assert cli.main(["validate"]) == cli.EXIT_VALIDATION
    assert "FAIL" in capsys.readouterr().out


def test_validate_catches_a_rho_scale_error(monkeypatch, capsys):
    from plumecrb import binary
    original = binary.rho

    def doubled(noise, u):
        return 2.0 * np.asarray(original(noise, u))

    monkeypatch.setattr(binary, "rho", doubled)
    assert cli.main(["validate"]) == cli.EXIT_VALIDATION
