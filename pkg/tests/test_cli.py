# tests/test_cli.py - Command-line tests
import json

import pytest
from pydantic import ValidationError

from src.cli import RunConfig, build_parser, config_from_args, main


def _lines(capsys):
    return [json.loads(line) for line in capsys.readouterr().out.splitlines()]


class TestConfig:
    def test_defaults(self):
        """Test the default q list and the scan default"""
        parser = build_parser()
        assert config_from_args(parser.parse_args(["verify-group"])).q_list == [3]
        assert config_from_args(parser.parse_args(["region-scan"])).q_list == [3, 5, 7, 11]

    def test_q_list_flag(self):
        """Test comma-separated q values"""
        args = build_parser().parse_args(["lw-check", "--q-list", "3,5,9"])
        assert config_from_args(args).q_list == [3, 5, 9]

    @pytest.mark.parametrize(
        "overrides",
        [
            {"q_list": [4]},
            {"q_list": [6]},
            {"seed": -1},
            {"threads": 0},
            {"grid": 1.5},
            {"format": "xml"},
            {"exponents": ("1/2", "2")},
        ],
    )
    def test_rejects(self, overrides):
        """Test flag validation"""
        with pytest.raises(ValidationError):
            RunConfig(command="verify-group", **overrides)

    def test_subgroups_need_action(self):
        """Test that the subgroups command needs enumerate or count"""
        with pytest.raises(ValidationError):
            RunConfig(command="subgroups")


class TestMain:
    def test_verify_group(self, capsys):
        """Test a passing run on stdout"""
        assert main(["verify-group", "--q", "3"]) == 0
        lines = _lines(capsys)
        assert lines[0]["check"] == "associativity"
        assert all(line["passed"] for line in lines)

    def test_subgroup_count_csv(self, capsys):
        """Test the CSV summary of the subgroup counts"""
        assert main(["subgroups", "count", "--p", "3", "--format", "csv"]) == 0
        header, row = capsys.readouterr().out.splitlines()
        assert header.startswith("check,n,p,formula,formula_linear,enumerated,match,passed")
        assert row.startswith("subgroup_count,1,3,19,18,19,True,True")

    def test_region_scan_to_file(self, report_path):
        """Test a report written to a new directory"""
        assert main(["region-scan", "--q", "3", "--grid", "0.5", "--out", str(report_path)]) == 0
        lines = report_path.read_text().splitlines()
        assert len(lines) == 9

    def test_chen_records_flags(self, capsys):
        """Test that flagged hyperplane bounds leave the exit code at 0"""
        assert main(["chen", "--q", "3", "--samples", "3", "--r-max", "2"]) == 0
        checks = {line["check"] for line in _lines(capsys)}
        assert {"hyperplane_count", "chen_bounds", "vertical_family"} <= checks

    def test_set_lw(self, capsys):
        """Test the set bound corpus"""
        assert main(["set-lw", "--q", "3", "--samples", "6"]) == 0
        sharp = [line for line in _lines(capsys) if line["check"] == "set_lw_sharp"]
        assert {line["set"] for line in sharp} == {"flat", "line_t0"}

    def test_bad_field(self, capsys):
        """Test that an even q is a usage error"""
        assert main(["verify-group", "--q", "4"]) == 2

    def test_capacity_guard(self, capsys):
        """Test that the subgroup guard exits with 2"""
        assert main(["subgroups", "enumerate", "--n", "2", "--q", "5"]) == 2
        assert "estimated cost 3125" in capsys.readouterr().err

    def test_unknown_command(self):
        """Test that argparse rejects unknown commands"""
        with pytest.raises(SystemExit):
            main(["prove-everything"])
