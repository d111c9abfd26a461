"""End-to-end tests for the command-line interface.

Every test drives ``cli.main`` in process and inspects the exit code, the
stdout/stderr text, and any CSV file written through ``--out``.  Numeric
columns are parsed back and compared against direct library calls, so these
tests pin the plumbing (argument parsing, config echo, formatting, atomic
writes, exit codes) rather than re-deriving the models.
"""

from __future__ import annotations

import dataclasses
import json
import math

import numpy as np
import pytest

from clusterchain import cli
from clusterchain.clusterbuild import pcn_curve
from clusterchain.envelope import analytic_lb, optimize_z
from clusterchain.graphstate import CheckResult
from clusterchain.params import DeviceParams, chain_coefficients, derive_constants
from clusterchain.ratemodel import ChainConfig, k_of_design, r_direct, rate_n
from clusterchain.treecode import BranchingVector

# Locked outputs for the default device, m=4, tree 7,3, p_cn=0.9, new scheme.
D_STAR = 0.11463972884959224
S_STAR = 0.3654838715183896
L0_KM = 1.4877655474978313

# Best depth-2 designs at 300 km for the default device (new scheme).
K7_RATE = 3.873e-6
K8_RATE = 2.977e-3


def run_cli(capsys, *argv: str) -> tuple[int, str, str]:
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_csv(text: str):
    """Split CLI CSV text into (config, header, rows, trailer-or-None)."""
    lines = [line for line in text.splitlines() if line]
    assert lines[0].startswith("# config: "), lines[0]
    config = json.loads(lines[0][len("# config: "):])
    trailer = None
    if lines[-1].startswith("#"):
        trailer = lines[-1]
        lines = lines[:-1]
    header = lines[1].split(",")
    rows = [line.split(",") for line in lines[2:]]
    assert all(len(row) == len(header) for row in rows)
    return config, header, rows, trailer


def parse_report(out: str) -> dict[str, str]:
    """Parse ``name = value`` lines (the constants subcommand) into a dict."""
    pairs: dict[str, str] = {}
    for line in out.splitlines():
        name, sep, value = line.partition(" = ")
        if sep:
            pairs[name] = value
    return pairs


class TestConstants:
    def test_reports_every_derived_constant(self, capsys, device):
        code, out, _ = run_cli(capsys, "constants")
        assert code == 0
        report = parse_report(out)
        expected = dataclasses.asdict(derive_constants(device))
        assert set(report) == set(expected)
        for name, value in expected.items():
            assert math.isclose(float(report[name]), value, rel_tol=1e-10), name

    def test_design_block_with_tree(self, capsys, device, consts):
        code, out, _ = run_cli(capsys, "constants", "--m", "4", "--b", "7,3")
        assert code == 0
        report = parse_report(out)
        assert report["k"] == "8"
        coeffs = chain_coefficients(consts, device, 4, 8, boosted=True)
        for name in ("a_coeff", "b_coeff", "c_coeff", "ab_squared"):
            assert math.isclose(
                float(report[name]), getattr(coeffs, name), rel_tol=1e-10
            ), name

    def test_no_design_block_without_tree(self, capsys):
        code, out, _ = run_cli(capsys, "constants", "--m", "4")
        assert code == 0
        assert "k" not in parse_report(out)

    def test_alpha_flag_changes_fiber_survival(self, capsys):
        code, out, _ = run_cli(capsys, "constants", "--alpha", "0.092")
        assert code == 0
        expected = derive_constants(DeviceParams(alpha=0.092)).p_fib
        assert math.isclose(float(parse_report(out)["p_fib"]), expected, rel_tol=1e-10)


class TestRate:
    ARGS = ("rate", "--m", "4", "--b", "7,3", "--n", "100", "--L", "100:300:100")

    def test_header_and_inclusive_grid(self, capsys):
        code, out, _ = run_cli(capsys, *self.ARGS)
        assert code == 0
        _, header, rows, trailer = parse_csv(out)
        assert header == ["l_km", "rate_bits_per_mode", "r_direct"]
        assert trailer is None
        assert [float(row[0]) for row in rows] == [100.0, 200.0, 300.0]

    def test_rows_match_library_models(self, capsys, device):
        _, out, _ = run_cli(capsys, *self.ARGS)
        _, _, rows, _ = parse_csv(out)
        tree = BranchingVector.parse("7,3")
        for row in rows:
            l_km = float(row[0])
            cfg = ChainConfig(
                total_range_km=l_km, node_count=100, channels=4,
                tree=tree, p_cn=0.9, scheme="new",
            )
            point = rate_n(cfg, device)
            assert math.isclose(
                float(row[1]), point.rate_bits_per_mode, rel_tol=1e-10
            )
            assert math.isclose(
                float(row[2]), r_direct(l_km, device.alpha), rel_tol=1e-10
            )

    def test_rate_decreases_with_range(self, capsys):
        _, out, _ = run_cli(capsys, *self.ARGS)
        _, _, rows, _ = parse_csv(out)
        rates = [float(row[1]) for row in rows]
        assert rates == sorted(rates, reverse=True)

    def test_config_comment_roundtrips(self, capsys, device):
        _, out, _ = run_cli(capsys, *self.ARGS)
        config, _, _, _ = parse_csv(out)
        assert config["command"] == "rate"
        assert config["m"] == 4
        assert config["b"] == str(BranchingVector.parse("7,3"))
        assert config["n"] == 100
        assert config["device"] == dataclasses.asdict(device)

    def test_single_point_range(self, capsys):
        code, out, _ = run_cli(
            capsys, "rate", "--m", "4", "--b", "7,3", "--n", "100", "--L", "300"
        )
        assert code == 0
        _, _, rows, _ = parse_csv(out)
        assert len(rows) == 1 and float(rows[0][0]) == 300.0

    def test_out_writes_file_atomically(self, capsys, tmp_path):
        target = tmp_path / "rates.csv"
        target.write_text("stale content\n")
        code, out, _ = run_cli(capsys, *self.ARGS, "--out", str(target))
        assert code == 0
        assert out == ""  # the CSV goes to the file, not stdout
        text = target.read_text()
        assert text.startswith("# config: ") and text.endswith("\n")
        parse_csv(text)
        assert [p.name for p in tmp_path.iterdir()] == ["rates.csv"]


class TestEnvelope:
    ARGS = ("envelope", "--m", "4", "--b", "7,3", "--L", "100:200:50")

    def test_rows_and_node_count_column(self, capsys):
        code, out, _ = run_cli(capsys, *self.ARGS)
        assert code == 0
        _, header, rows, _ = parse_csv(out)
        assert header == ["l_km", "rate_bits_per_mode", "n_opt"]
        assert len(rows) == 3
        for row in rows:
            n_opt = int(row[2])
            assert n_opt == max(1, round(float(row[0]) / L0_KM))

    def test_trailer_matches_reference_values(self, capsys):
        _, out, _ = run_cli(capsys, *self.ARGS)
        _, _, _, trailer = parse_csv(out)
        assert trailer is not None and trailer.startswith("# D=")
        fields = dict(
            part.strip().split("=") for part in trailer.lstrip("# ").split(",")
        )
        assert math.isclose(float(fields["D"]), D_STAR, rel_tol=1e-6)
        assert math.isclose(float(fields["s"]), S_STAR, rel_tol=1e-6)
        assert math.isclose(float(fields["L0_km"]), L0_KM, rel_tol=1e-6)

    def test_trailer_echoed_when_writing_file(self, capsys, tmp_path):
        target = tmp_path / "env.csv"
        code, out, _ = run_cli(capsys, *self.ARGS, "--out", str(target))
        assert code == 0
        assert out.startswith("D=")  # summary still reaches the terminal
        assert target.read_text().splitlines()[-1].startswith("# D=")

    def test_rates_match_library_envelope(self, capsys, device, consts):
        _, out, _ = run_cli(capsys, *self.ARGS)
        _, _, rows, _ = parse_csv(out)
        tree = BranchingVector.parse("7,3")
        coeffs = chain_coefficients(
            consts, device, 4, k_of_design(4, tree), boosted=True
        )
        z_star = optimize_z(4, tree, device, coeffs, scheme="new")
        env = analytic_lb(z_star, 4, tree, device, coeffs, p_cn=0.9, scheme="new")
        for row in rows:
            expected = env.rate_at(float(row[0]), device.alpha)
            assert math.isclose(float(row[1]), expected, rel_tol=1e-10)


class TestResources:
    ARGS = (
        "resources", "--k", "3", "--m", "1", "--n", "1",
        "--sources", "300:600:300", "--method", "exact",
    )

    def test_exact_curves_match_library(self, capsys, consts):
        code, out, _ = run_cli(capsys, *self.ARGS)
        assert code == 0
        _, header, rows, _ = parse_csv(out)
        assert header == ["n_sources", "p_cn_naive", "p_cn_improved"]
        assert [int(row[0]) for row in rows] == [300, 600]
        grid = np.array([300, 600])
        naive = pcn_curve("naive", 3, 1, 1, consts, grid, method="exact")
        improved = pcn_curve("improved", 3, 1, 1, consts, grid, method="exact")
        for row, p_naive, p_improved in zip(rows, naive, improved):
            assert math.isclose(float(row[1]), p_naive, rel_tol=1e-10)
            assert math.isclose(float(row[2]), p_improved, rel_tol=1e-10)
            assert 0.0 <= float(row[1]) <= 1.0 and 0.0 <= float(row[2]) <= 1.0

    def test_seed_echoed_to_stderr(self, capsys):
        _, _, err = run_cli(capsys, *self.ARGS)
        assert "seed: 0" in err

    def test_monte_carlo_runs_are_reproducible(self, capsys, tmp_path):
        args = (
            "resources", "--k", "3", "--m", "1", "--n", "1",
            "--sources", "400:800:400", "--method", "mc",
            "--trials", "2000", "--seed", "5",
        )
        first = tmp_path / "first.csv"
        second = tmp_path / "second.csv"
        assert run_cli(capsys, *args, "--out", str(first))[0] == 0
        assert run_cli(capsys, *args, "--out", str(second))[0] == 0
        assert first.read_bytes() == second.read_bytes()

    def test_config_records_method_trials_seed(self, capsys):
        _, out, _ = run_cli(capsys, *self.ARGS)
        config, _, _, _ = parse_csv(out)
        assert config["method"] == "exact"
        assert config["trials"] == 10**5
        assert config["seed"] == 0
        assert config["command"] == "resources"


class TestOptimize:
    def test_restricted_scan_recovers_reference_design(self, capsys):
        code, out, _ = run_cli(
            capsys, "optimize", "--L", "300", "--k", "7",
            "--m-max", "6", "--branch-max", "6",
        )
        assert code == 0
        _, header, rows, _ = parse_csv(out)
        assert header == [
            "k", "m", "b0", "b1", "n_opt", "rate_bits_per_mode",
            "n_sources", "parallel_channels",
        ]
        (row,) = rows
        assert [int(row[0]), int(row[1]), int(row[2]), int(row[3])] == [7, 4, 4, 2]
        assert math.isclose(float(row[5]), K7_RATE, rel_tol=1e-3)
        assert row[6] == ""  # no source search requested
        assert int(row[7]) == 8

    def test_two_classes_one_row_each(self, capsys):
        code, out, _ = run_cli(
            capsys, "optimize", "--L", "300", "--k", "7,8",
            "--m-max", "6", "--branch-max", "6",
        )
        assert code == 0
        _, _, rows, _ = parse_csv(out)
        assert [int(row[0]) for row in rows] == [7, 8]
        assert [int(rows[1][1]), int(rows[1][2]), int(rows[1][3])] == [5, 5, 3]
        assert math.isclose(float(rows[1][5]), K8_RATE, rel_tol=1e-3)

    def test_depth_three_scan_pads_branch_columns(self, capsys):
        code, out, _ = run_cli(
            capsys, "optimize", "--L", "300", "--k", "7", "--depths", "2,3",
            "--m-max", "5", "--branch-max", "5",
        )
        assert code == 0
        _, header, rows, _ = parse_csv(out)
        assert header[:5] == ["k", "m", "b0", "b1", "b2"]
        (row,) = rows
        assert int(row[2]) >= 1 and int(row[3]) >= 1
        assert row[4] == "" or int(row[4]) >= 1  # depth-2 winner leaves b2 blank
        # the scan includes the best depth-2 design, so it can only improve
        assert float(row[6 - 1]) >= K7_RATE * (1 - 1e-3)

    def test_with_sources_adds_counts(self, capsys):
        code, out, err = run_cli(
            capsys, "optimize", "--L", "15", "--k", "7", "--scheme", "naive",
            "--with-sources", "--method", "auto",
            "--m-max", "6", "--branch-max", "6",
        )
        assert code == 0
        assert "seed: 0" in err
        _, header, rows, _ = parse_csv(out)
        (row,) = rows
        column = header.index("n_sources")
        assert int(row[column]) > 0

    def test_invalid_class_list_is_config_error(self, capsys):
        code, _, err = run_cli(capsys, "optimize", "--L", "300", "--k", "7,x")
        assert code == 2
        assert err.startswith("error: config:")

    def test_unbuildable_class_is_infeasible(self, capsys):
        code, _, err = run_cli(capsys, "optimize", "--L", "300", "--k", "2")
        assert code == 3
        assert err.startswith("error: infeasible:")


class TestVerify:
    def test_report_passes(self, capsys):
        code, out, err = run_cli(capsys, "verify", "--samples", "20", "--seed", "3")
        assert code == 0
        lines = out.splitlines()
        assert len(lines) == 5
        assert all(line.startswith("PASS") for line in lines)
        assert "seed: 3" in err

    def test_failure_sets_exit_code_four(self, capsys, monkeypatch):
        rows = [CheckResult(name="synthetic", passed=False, detail="forced")]
        monkeypatch.setattr(
            cli, "run_structure_checks", lambda seed, samples: rows
        )
        code, out, err = run_cli(capsys, "verify")
        assert code == 4
        assert out.startswith("FAIL")
        assert "1 verification check(s) failed" in err


class TestErrorHandling:
    RATE_PREFIX = ("rate", "--m", "4", "--b", "7,3", "--n", "100")

    @pytest.mark.parametrize(
        "bad_range", ["300:100:50", "100:200:0", "1:2:3:4"],
        ids=["reversed", "zero_step", "too_many_parts"],
    )
    def test_bad_range_is_config_error(self, capsys, bad_range):
        code, _, err = run_cli(capsys, *self.RATE_PREFIX, "--L", bad_range)
        assert code == 2
        assert err.startswith("error: config:")

    def test_unknown_device_key_is_config_error(self, capsys, tmp_path):
        config = tmp_path / "device.json"
        config.write_text(json.dumps({"flux": 1.0}))
        code, _, err = run_cli(capsys, "constants", "--config", str(config))
        assert code == 2
        assert "unknown device parameter" in err

    def test_missing_config_file_is_config_error(self, capsys, tmp_path):
        code, _, err = run_cli(
            capsys, "constants", "--config", str(tmp_path / "absent.json")
        )
        assert code == 2
        assert err.startswith("error: config:")

    def test_invalid_json_config_is_config_error(self, capsys, tmp_path):
        config = tmp_path / "device.json"
        config.write_text("not json {")
        code, _, err = run_cli(capsys, "constants", "--config", str(config))
        assert code == 2
        assert "not valid JSON" in err

    def test_flag_overrides_config_file(self, capsys, tmp_path, device):
        config = tmp_path / "device.json"
        config.write_text(json.dumps({"alpha": 0.1}))
        _, out, _ = run_cli(
            capsys, "constants", "--config", str(config), "--alpha", "0.046"
        )
        expected = derive_constants(device).p_fib
        assert math.isclose(float(parse_report(out)["p_fib"]), expected, rel_tol=1e-12)

    def test_config_file_changes_device(self, capsys, tmp_path):
        config = tmp_path / "device.json"
        config.write_text(json.dumps({"alpha": 0.1}))
        _, out, _ = run_cli(capsys, "constants", "--config", str(config))
        expected = derive_constants(DeviceParams(alpha=0.1)).p_fib
        assert math.isclose(float(parse_report(out)["p_fib"]), expected, rel_tol=1e-12)
