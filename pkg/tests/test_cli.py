import json

import pytest

from desksim.cli import main
from desksim.worldmap import load_map


def run(argv, capsys):
    try:
        code = main(argv)
    except SystemExit as exc:  # argparse usage errors
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


class TestGenMap:
    def test_deterministic_output(self, tmp_path, capsys):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for p in (a, b):
            code, _, _ = run(["gen-map", "--seed", "7", "--size", "10x9",
                              "--out", str(p)], capsys)
            assert code == 0
        assert a.read_bytes() == b.read_bytes()
        grid = load_map(a)
        assert (grid.width, grid.height) == (10, 9)

    def test_effective_config_echo(self, tmp_path, capsys):
        p = tmp_path / "m.json"
        code, out, _ = run(["gen-map", "--seed", "1", "--size", "8x8",
                            "--out", str(p)], capsys)
        assert code == 0
        start = out.index("effective-config:") + len("effective-config:")
        cfg, _ = json.JSONDecoder().raw_decode(out[start:].lstrip())
        assert cfg["seed"] == 1

    def test_bad_size_is_usage_error(self, tmp_path, capsys):
        code, _, err = run(["gen-map", "--seed", "1", "--size", "8by8",
                            "--out", str(tmp_path / "m.json")], capsys)
        assert code == 2

    def test_json_errors_flag(self, tmp_path, capsys):
        code, _, err = run(["--json-errors", "run-drive", "--map",
                            str(tmp_path / "missing.json"),
                            "--speed", "6"], capsys)
        assert code == 1
        payload = json.loads(err.strip().splitlines()[-1])
        assert "error" in payload and "code" in payload


@pytest.fixture(scope="module")
def map_file(tmp_path_factory):
    p = tmp_path_factory.mktemp("maps") / "m.json"
    assert main(["gen-map", "--seed", "3", "--size", "8x8",
                 "--style", "desert", "--obstacles", "0",
                 "--out", str(p)]) == 0
    return p


class TestRunAndScore:
    def test_run_drive_writes_log_and_score(self, map_file, tmp_path,
                                            capsys):
        log = tmp_path / "ep.jsonl"
        score = tmp_path / "score.json"
        code, out, _ = run(["run-drive", "--map", str(map_file),
                            "--speed", "6", "--agent", "oracle",
                            "--log", str(log), "--score", str(score)],
                           capsys)
        assert code == 0
        assert log.exists()
        data = json.loads(score.read_text())
        assert data["status"] == "completed"
        assert data["max_deviation_m"] < 1.0

    def test_replay_consumes_drive_log(self, map_file, tmp_path, capsys):
        log = tmp_path / "ep.jsonl"
        assert main(["run-drive", "--map", str(map_file), "--speed", "8",
                     "--agent", "oracle", "--log", str(log)]) == 0
        capsys.readouterr()
        code, out, _ = run(["replay", "--log", str(log),
                            "--map", str(map_file)], capsys)
        assert code == 0
        assert "frames" in out

    def test_replay_wrong_map_fails(self, map_file, tmp_path, capsys):
        log = tmp_path / "ep.jsonl"
        assert main(["run-drive", "--map", str(map_file), "--speed", "8",
                     "--agent", "oracle", "--log", str(log)]) == 0
        other = tmp_path / "other.json"
        assert main(["gen-map", "--seed", "4", "--size", "8x8",
                     "--out", str(other)]) == 0
        capsys.readouterr()
        code, _, err = run(["replay", "--log", str(log),
                            "--map", str(other)], capsys)
        assert code == 1


class TestEvalTrack:
    def test_identical_boxes_score_perfectly(self, tmp_path, capsys):
        rows = "frame,x,y,w,h\n" + "".join(
            f"{i},{10 + i},{20},{32},{18}\n" for i in range(50))
        gt = tmp_path / "gt.csv"
        pred = tmp_path / "pred.csv"
        gt.write_text(rows)
        pred.write_text(rows)
        out = tmp_path / "curves.csv"
        code, stdout, _ = run(["eval-track", "--gt", str(gt),
                               "--pred", str(pred), "--out", str(out)],
                              capsys)
        assert code == 0
        summary = json.loads((tmp_path / "curves.json").read_text())
        assert summary["precision_auc"] == pytest.approx(1.0)
        assert summary["success_auc"] == pytest.approx(20 / 21)
        assert len(out.read_text().splitlines()) == 1 + 51 + 21

    def test_missing_pred_rows_allowed(self, tmp_path, capsys):
        gt = tmp_path / "gt.csv"
        pred = tmp_path / "pred.csv"
        gt.write_text("frame,x,y,w,h\n0,0,0,10,10\n1,5,5,10,10\n")
        pred.write_text("frame,x,y,w,h\n0,0,0,10,10\n1,,,,\n")
        out = tmp_path / "curves.csv"
        code, _, _ = run(["eval-track", "--gt", str(gt), "--pred", str(pred),
                          "--out", str(out)], capsys)
        assert code == 0
        summary = json.loads((tmp_path / "curves.json").read_text())
        assert 0.0 < summary["success_auc"] < 1.0


class TestUsage:
    def test_no_command_is_usage_error(self, capsys):
        assert run([], capsys)[0] == 2

    def test_unknown_command(self, capsys):
        assert run(["frobnicate"], capsys)[0] == 2

    def test_bad_speed_choice(self, tmp_path, capsys):
        code, _, _ = run(["run-track", "--map", "x.json", "--speed", "7",
                          "--tracker", "gt"], capsys)
        assert code == 2
