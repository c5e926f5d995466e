import json

import pytest
from click.testing import CliRunner

from tasteauth.cli import _parse_policy, _read_totals, main


@pytest.fixture
def runner():
    return CliRunner()


class TestPolicyParsing:
    def test_full_spec(self):
        policy = _parse_policy("d=10, dhr=3, s=5, margin=1, mode=threshold, threshold=7")
        assert policy.images_per_screen == 10
        assert policy.keys_per_screen == 3
        assert policy.screens_per_session == 5
        assert policy.margin == 1
        assert policy.mode == "threshold" and policy.threshold == 7

    def test_unknown_field(self):
        with pytest.raises(Exception):
            _parse_policy("bogus=1")

    def test_totals_reader_accepts_both_shapes(self, tmp_path):
        as_json = tmp_path / "a.json"
        as_json.write_text("[8, 7, 6]")
        as_lines = tmp_path / "b.txt"
        as_lines.write_text("8\n7\n6\n")
        assert _read_totals(str(as_json)) == [8, 7, 6]
        assert _read_totals(str(as_lines)) == [8, 7, 6]


class TestStrengthCommand:
    def test_default_policy_line(self, runner):
        result = runner.invoke(main, ["strength"])
        assert result.exit_code == 0
        assert result.output.strip() == (
            "4 screens of 2/8: 19 bits (19.23 exact), comparable to a 6-digit PIN"
        )

    def test_json_report(self, runner):
        result = runner.invoke(main, ["strength", "--d", "6", "--dhr", "1", "--s", "5", "--json"])
        assert result.exit_code == 0
        doc = json.loads(result.output)
        assert doc["printed_bits"] == 13
        assert doc["comparable"] == "4-digit PIN"

    def test_invalid_policy_fails_cleanly(self, runner):
        result = runner.invoke(main, ["strength", "--d", "4", "--dhr", "9"])
        assert result.exit_code != 0
        assert "Error" in result.output


class TestFpfnCommand:
    def test_csv_to_stdout(self, runner, tmp_path):
        legit = tmp_path / "legit.txt"
        legit.write_text("8\n7\n6\n")
        attacker = tmp_path / "attacker.json"
        attacker.write_text("[2, 3, 8]")
        result = runner.invoke(
            main, ["fpfn", "--legit", str(legit), "--attacker", str(attacker)]
        )
        assert result.exit_code == 0
        lines = result.output.strip().splitlines()
        assert lines[0] == "threshold,fp,fn,cohort"
        assert len(lines) == 10
        row7 = dict(zip(("threshold", "fp", "fn"), lines[8].split(",")))
        assert float(row7["fp"]) == pytest.approx(1 / 3)
        assert float(row7["fn"]) == pytest.approx(1 / 3)

    def test_csv_to_file(self, runner, tmp_path):
        legit = tmp_path / "legit.txt"
        legit.write_text("8\n")
        attacker = tmp_path / "attacker.txt"
        attacker.write_text("0\n")
        out = tmp_path / "curve.csv"
        result = runner.invoke(
            main,
            ["fpfn", "--legit", str(legit), "--attacker", str(attacker), "--out", str(out)],
        )
        assert result.exit_code == 0
        assert "wrote" in result.output
        assert out.read_text().startswith("threshold,fp,fn,cohort")

    def test_out_of_range_totals_reported(self, runner, tmp_path):
        legit = tmp_path / "legit.txt"
        legit.write_text("99\n")
        attacker = tmp_path / "attacker.txt"
        attacker.write_text("0\n")
        result = runner.invoke(
            main, ["fpfn", "--legit", str(legit), "--attacker", str(attacker)]
        )
        assert result.exit_code != 0


class TestSimulateCommand:
    def test_small_noiseless_run(self, runner, tmp_path):
        out = tmp_path / "report.json"
        result = runner.invoke(
            main,
            [
                "simulate",
                "--preset",
                "noiseless",
                "--trials",
                "25",
                "--seed",
                "3",
                "--attackers",
                "uniform",
                "--out",
                str(out),
            ],
        )
        assert result.exit_code == 0, result.output
        doc = json.loads(out.read_text())
        assert doc["counts"]["requested"] == 25
        assert doc["legitimate"]["accept_rate"] == 1.0
        assert doc["config"]["seed"] == 3

    def test_margin_override_reaches_both_policies(self, runner):
        result = runner.invoke(
            main,
            ["simulate", "--preset", "noiseless", "--trials", "5", "--margin", "4"],
        )
        assert result.exit_code == 0, result.output
        doc = json.loads(result.output)
        assert doc["config"]["policy"]["margin"] == 4
        assert doc["config"]["enrollment_policy"]["margin"] == 4

    def test_unknown_attacker_rejected(self, runner):
        result = runner.invoke(main, ["simulate", "--attackers", "psychic"])
        assert result.exit_code != 0
        assert "psychic" in result.output
