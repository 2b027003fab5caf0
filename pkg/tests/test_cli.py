import json

import pytest
from click.testing import CliRunner

from ideascreen.cli import main
from ideascreen.lingua import default_dict_dir

from conftest import EX1_BODY, EX1_TITLE, EX2_BODY, EX2_TITLE


@pytest.fixture()
def corpus_file(tmp_path):
    records = [
        {"id": "ex1", "title": EX1_TITLE, "body": EX1_BODY,
         "posted_date": "2007-06-05", "status": "Implemented", "votes": 14},
        {"id": "ex2", "title": EX2_TITLE, "body": EX2_BODY,
         "posted_date": "2008-02-01", "status": "Archived", "votes": 3},
    ]
    path = tmp_path / "corpus.jsonl"
    path.write_text("\n".join(json.dumps(r) for r in records) + "\n")
    return path


def test_extract_command(corpus_file):
    runner = CliRunner()
    result = runner.invoke(main, ["extract", "--corpus", str(corpus_file)])
    assert result.exit_code == 0, result.output
    lines = [json.loads(l) for l in result.output.strip().splitlines()]
    by_id = {l["id"]: l for l in lines}
    assert by_id["ex1"]["rt"] == ["anti-microbial keyboard"]
    assert by_id["ex1"]["kt"] == ["keyboard"]
    assert set(by_id["ex2"]["rt"]) | set(by_id["ex2"]["kt"]) == \
        {"color desktop", "notebook desktop"}


def test_extract_pretagged_flag_requires_channel(corpus_file):
    runner = CliRunner()
    result = runner.invoke(main, ["extract", "--corpus", str(corpus_file),
                                  "--pretagged"])
    assert result.exit_code == 0
    assert "no pretagged_title" in result.output or "no pretagged_title" in (result.stderr or "")


def test_score_command(corpus_file):
    runner = CliRunner()
    result = runner.invoke(main, [
        "score", "--corpus", str(corpus_file),
        "--trends", str(default_dict_dir() / "trends.csv"),
        "--scope-setting", "1",
    ])
    assert result.exit_code == 0, result.output
    rows = {r["id"]: r for r in map(json.loads, result.output.strip().splitlines())}
    ex1 = rows["ex1"]
    # rt = anti-microbial keyboard (trend 72 as of 2007-05 via refinement),
    # kt = keyboard (scope 3), balance 1
    assert ex1["rel"] == pytest.approx((72 / 3) * 1.0006318, abs=1e-3)
    assert ex1["vote"] == 14
    assert ex1["label"] == 1
    assert ex1["x"][0] == 1.0


def test_score_scope_setting_3(corpus_file):
    runner = CliRunner()
    result = runner.invoke(main, [
        "score", "--corpus", str(corpus_file), "--scope-setting", "3",
        "--seed", "7",
    ])
    assert result.exit_code == 0, result.output


def test_replay_command(tmp_path, fixture_path):
    runner = CliRunner()
    out_dir = tmp_path / "replay"
    result = runner.invoke(main, [
        "replay", "--data", str(fixture_path), "--eps", "1", "--alpha", "3",
        "--theta", "100", "--trials", "3", "--seed", "42",
        "--out", str(out_dir), "--no-timing",
    ])
    assert result.exit_code == 0, result.output
    summary, _ = json.JSONDecoder().raw_decode(result.output)
    assert summary["epsilon"] == 1.0 and summary["theta"] == 100
    assert (out_dir / "trials.csv").exists()
    assert (out_dir / "report.json").exists()


def test_bench_command():
    runner = CliRunner()
    result = runner.invoke(main, ["bench", "--n", "40", "--sweeps", "30",
                                  "--repeats", "1"])
    assert result.exit_code == 0, result.output
    assert "backend" in result.output
    assert "python" in result.output
