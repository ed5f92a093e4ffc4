import json

import pytest

from rosefold.cli import main


def run_cli(capsys, *argv) -> tuple[int, str]:
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


class TestFold:
    def test_hand_example(self, capsys):
        code, out = run_cli(
            capsys, "fold", "--rank", "2", "--words", "a1 a2", "a1"
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["terminal_is_rose"] is True
        assert payload["folds"] == 1
        assert payload["config"]["policy"] == "least"

    def test_tuple_json_input(self, capsys, tmp_path):
        path = tmp_path / "tuple.json"
        path.write_text(json.dumps({"rank": 2, "words": ["a1 a2", "a1", "1"]}))
        code, out = run_cli(capsys, "fold", "--tuple-json", str(path))
        assert code == 0
        assert json.loads(out)["terminal_is_rose"] is True

    def test_dump_stages(self, capsys):
        code, out = run_cli(
            capsys, "fold", "--words", "a1 a2", "a1", "--dump-stages"
        )
        payload = json.loads(out)
        assert len(payload["stages"]) == payload["folds"] + 1
        assert len(payload["stage_digests"]) == payload["folds"] + 1

    def test_defer_policy_reports_delta_index(self, capsys):
        code, out = run_cli(
            capsys, "fold", "--words", "a1 a2 a1^-1 a2", "a1", "a2",
            "--policy", "defer_rose",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["terminal_is_rose"] is True
        assert payload["delta_index"] is None or payload["delta_index"] >= 0


class TestVerifyCovers:
    def test_small_run_exit_zero(self, capsys):
        code, out = run_cli(
            capsys,
            "verify-covers",
            "--rank", "2",
            "--max-edges", "3",
            "--max-path-len", "10",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["violations"] == []
        assert payload["config"]["max_edges"] == 3


class TestWordStats:
    def test_deterministic_output(self, capsys):
        args = (
            "word-stats", "--rank", "2", "--length", "128",
            "--samples", "5", "--seed", "11",
        )
        code1, out1 = run_cli(capsys, *args)
        code2, out2 = run_cli(capsys, *args)
        assert code1 == code2 == 0
        assert out1 == out2

    def test_jobs_do_not_change_output(self, capsys):
        base = (
            "word-stats", "--rank", "2", "--length", "96",
            "--samples", "6", "--seed", "4",
        )
        _, seq = run_cli(capsys, *base, "--jobs", "1")
        _, par = run_cli(capsys, *base, "--jobs", "2")
        # config echo differs in the jobs field only
        a = json.loads(seq)
        b = json.loads(par)
        assert a["samples"] == b["samples"]
        assert a["aggregate"] == b["aggregate"]

    def test_csv_format(self, capsys):
        code, out = run_cli(
            capsys, "word-stats", "--length", "64", "--samples", "2",
            "--seed", "1", "--format", "csv",
        )
        assert code == 0
        assert "# seed=1" in out
        assert "sample,metric,value" in out

    def test_out_file(self, capsys, tmp_path):
        path = tmp_path / "stats.json"
        code, _ = run_cli(
            capsys, "word-stats", "--length", "64", "--samples", "2",
            "--seed", "1", "--out", str(path),
        )
        assert code == 0
        assert json.loads(path.read_text())["config"]["seed"] == 1


class TestPresentationCommands:
    def test_build_presentation(self, capsys):
        code, out = run_cli(
            capsys, "build-presentation", "--rank", "2", "--length", "12",
            "--seed", "2",
        )
        assert code == 0
        payload = json.loads(out)
        assert len(payload["U"]) == 2
        assert payload["NPrime"] >= 1

    def test_sc_check_round_trip(self, capsys, tmp_path):
        code, out = run_cli(
            capsys, "build-presentation", "--rank", "2", "--length", "12",
            "--seed", "2", "--out", str(tmp_path / "p.json"),
        )
        code, out = run_cli(
            capsys, "sc-check", "--presentation", str(tmp_path / "p.json"),
            "--lambda", "0.99",
        )
        payload = json.loads(out)
        assert payload["satisfies"] is (code == 0)
        assert "lambda_value" in payload


class TestComplexityCommands:
    RELATOR = "a1 a2 a1 a2^-1 a2^-1 a1 a1 a2"

    def test_complexity(self, capsys):
        code, out = run_cli(
            capsys, "complexity", "--relators", self.RELATOR,
            "--word", "a1 a2 a1", "--depth", "0",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["c1"] == 1

    def test_reduce(self, capsys):
        code, out = run_cli(
            capsys, "reduce", "--relators", self.RELATOR,
            "--word", "a1 a2 a1 a2^-1 a2^-1 a1 a1", "--relator-rotation", "0:1:0:7",
            "--depth", "0",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["relation"] in ("decreased", "equal")
        assert payload["pattern"].startswith("a1 a2 a1")


class TestSurgeryDemo:
    def test_exit_zero_and_report(self, capsys):
        code, out = run_cli(capsys, "surgery-demo", "--seed", "7")
        assert code == 0
        payload = json.loads(out)
        assert payload["strictly_smaller"] is True
        assert payload["refolds_to_rose"] is True


class TestUsageErrors:
    def test_unknown_command_exits_two(self, capsys):
        with pytest.raises(SystemExit) as err:
            main(["no-such-command"])
        assert err.value.code == 2

    def test_missing_required_flag_exits_two(self, capsys):
        with pytest.raises(SystemExit) as err:
            main(["complexity", "--word", "a1"])
        assert err.value.code == 2
