import math

import pytest

import timebin.cli as cli
from conftest import reference_config
from timebin import ConfigurationError


def physical_lines(cfg=None):
    cfg = cfg or reference_config()
    pairs = (
        ("wavelength_m", cfg.wavelength),
        ("optical_decay_rad_s", cfg.optical_decay),
        ("rabi_drive_rad_s", cfg.rabi_drive),
        ("atom_density_per_m3", cfg.atom_density),
        ("medium_length_m", cfg.medium_length),
        ("pulse_duration_s", cfg.pulse_duration),
        ("velocity_ratio", cfg.velocity_ratio),
    )
    return "".join(f"{k} = {v:.17g}\n" for k, v in pairs)


def config_text(job, extra="", cfg=None):
    return f"job = {job}\n" + physical_lines(cfg) + extra


class TestParsing:
    def test_round_trip_values(self):
        cfg = cli.parse_config(config_text("derive"))
        assert cfg.job == "derive"
        physical = cfg.physical()
        assert physical.velocity_ratio == 0.3
        assert physical.medium_length == 100e-6

    def test_comments_and_blanks_ignored(self):
        text = "# leading comment\n\n" + config_text(
            "derive", extra="  # trailing\n")
        assert cli.parse_config(text).job == "derive"

    def test_all_errors_collected_with_line_numbers(self):
        text = config_text("derive") + (
            "frobnicator = 3\n"          # line 9: unknown
            "velocity_ratio = 0.4\n"     # line 10: duplicate
            "just a stray phrase\n"      # line 11: no separator
            "t_min = fast\n"             # line 12: bad float
        )
        with pytest.raises(ConfigurationError) as err:
            cli.parse_config(text)
        message = str(err.value)
        assert "line 9: unknown key 'frobnicator'" in message
        assert "line 10: duplicate key 'velocity_ratio'" in message
        assert "line 11" in message
        assert "line 12: bad value for t_min" in message

    def test_empty_config_lists_missing_keys(self):
        with pytest.raises(ConfigurationError, match="missing required keys"):
            cli.parse_config("")

    def test_missing_job_specific_key(self):
        with pytest.raises(ConfigurationError,
                           match="'scan-z' is missing required keys"):
            cli.parse_config(config_text("scan-z", extra="z_min = 0.1\n"))

    def test_foreign_keys_rejected(self):
        with pytest.raises(ConfigurationError, match="not applicable"):
            cli.parse_config(config_text("modes", extra="j_min = 0.0\n"))

    def test_unknown_job_rejected(self):
        with pytest.raises(ConfigurationError, match="must be one of"):
            cli.parse_config("job = frobnicate\n")

    def test_summary_namespace_ignored(self):
        text = config_text("derive", extra="summary.optical_depth = 15\n")
        assert cli.parse_config(text).job == "derive"

    def test_physical_validation_wired_in(self):
        text = config_text("derive").replace(
            "velocity_ratio = 0.29999999999999999",
            "velocity_ratio = 1.5")
        assert "velocity_ratio = 1.5" in text
        with pytest.raises(ConfigurationError,
                           match="invalid physical parameters"):
            cli.parse_config(text)


class TestRuns:
    def test_derive_run_and_round_trip(self, tmp_path, capsys):
        config = tmp_path / "run.cfg"
        config.write_text(config_text("derive"))
        assert cli.main(["derive", "--config", str(config),
                         "--out", str(tmp_path / "out")]) == 0
        stdout = capsys.readouterr().out
        assert "summary.optical_depth = 15.278874536821951" in stdout
        assert "summary.regime_violations = 3" in stdout

        summary_text = (tmp_path / "out" / "summary.txt").read_text()
        assert summary_text == stdout
        # a summary is itself a parseable config for the same job
        reparsed = cli.parse_config(summary_text)
        assert reparsed.job == "derive"
        assert reparsed.values == cli.parse_config(config_text("derive")).values

    def test_repeat_runs_byte_identical(self, tmp_path):
        config = tmp_path / "run.cfg"
        config.write_text(config_text("derive"))
        outputs = []
        for name in ("a", "b"):
            out = tmp_path / name
            assert cli.main(["derive", "--config", str(config),
                             "--out", str(out)]) == 0
            outputs.append((out / "summary.txt").read_bytes())
        assert outputs[0] == outputs[1]

    def test_modes_run(self, tmp_path, capsys):
        config = tmp_path / "run.cfg"
        config.write_text(config_text("modes"))
        out = tmp_path / "out"
        assert cli.main(["modes", "--config", str(config),
                         "--out", str(out)]) == 0
        stdout = capsys.readouterr().out
        r1 = float(next(line.split("=")[1] for line in stdout.splitlines()
                        if line.startswith("summary.r1 ")))
        assert math.isclose(r1, 0.80733673963515, rel_tol=1e-6)
        profile = (out / "exit_profile.csv").read_text().splitlines()
        assert profile[0] == "t,re_phi1,im_phi1,abs2_phi1,abs2_phi2"
        assert len(profile) == 4097

    def test_bell_run(self, tmp_path, capsys):
        config = tmp_path / "run.cfg"
        config.write_text("job = bell\nbell_r1 = 0.70710678118654752\n")
        out = tmp_path / "out"
        assert cli.main(["bell", "--config", str(config),
                         "--out", str(out)]) == 0
        stdout = capsys.readouterr().out
        assert "summary.entropy_bits = 1" in stdout
        b_opt = float(next(line.split("=")[1] for line in stdout.splitlines()
                           if line.startswith("summary.b_opt ")))
        assert abs(b_opt - -2.1759054886889186) < 1e-6
        rows = (out / "bell_scan.csv").read_text().splitlines()
        assert rows[0] == "J,B"
        first_j, first_b = map(float, rows[1].split(","))
        assert first_j == 0.0
        assert abs(first_b + 2.0) < 1e-12

    def test_scan_z_run_with_threads(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("TIMEBIN_THREADS", "2")
        config = tmp_path / "run.cfg"
        config.write_text(config_text(
            "scan-z",
            extra="z_min = 0.25\nz_max = 1.0\nn_z = 4\nquad_nodes = 96\n"))
        out = tmp_path / "out"
        assert cli.main(["scan-z", "--config", str(config),
                         "--out", str(out)]) == 0
        stdout = capsys.readouterr().out
        assert "summary.revival_z = none" in stdout
        rows = (out / "conversion_scan.csv").read_text().splitlines()
        assert rows[0] == "z,n1,n2"
        assert len(rows) == 5


class TestFailureModes:
    def test_job_subcommand_mismatch(self, tmp_path, capsys):
        config = tmp_path / "run.cfg"
        config.write_text(config_text("derive"))
        code = cli.main(["modes", "--config", str(config),
                         "--out", str(tmp_path / "out")])
        assert code == 2
        assert "declares job = 'derive'" in capsys.readouterr().err

    def test_missing_config_file(self, tmp_path, capsys):
        code = cli.main(["derive", "--config", str(tmp_path / "absent.cfg"),
                         "--out", str(tmp_path / "out")])
        assert code == 2
        assert "cannot read config" in capsys.readouterr().err

    def test_unsplit_profile_reported_as_regime_failure(self, tmp_path,
                                                        capsys):
        # a drive this strong leaves a single exit peak
        strong = reference_config(
            rabi_drive=30.0 * reference_config().optical_decay)
        config = tmp_path / "run.cfg"
        config.write_text(config_text("modes", cfg=strong))
        code = cli.main(["modes", "--config", str(config),
                         "--out", str(tmp_path / "out")])
        assert code == 2
        assert "error:" in capsys.readouterr().err

    @pytest.mark.parametrize("raw", ["abc", "0", "-3"])
    def test_bad_thread_env(self, tmp_path, capsys, monkeypatch, raw):
        monkeypatch.setenv("TIMEBIN_THREADS", raw)
        config = tmp_path / "run.cfg"
        config.write_text(config_text("derive"))
        code = cli.main(["derive", "--config", str(config),
                        "--out", str(tmp_path / "out")])
        assert code == 2
        assert "TIMEBIN_THREADS" in capsys.readouterr().err
