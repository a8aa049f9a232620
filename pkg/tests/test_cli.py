import json
import subprocess
import sys

from geosensor.cli import main


def test_run_exit_zero(corpus_dir, tmp_path, capsys):
    code = main(["run", "--config", str(corpus_dir / "hiv-us.conf"), "-o", str(tmp_path)])
    assert code == 0
    report = json.loads(capsys.readouterr().out)
    assert report["panel"]["n"] == 44


def test_stage_subcommands_chain(corpus_dir, tmp_path, capsys):
    conf = str(corpus_dir / "tb-world.conf")
    for stage in ("filter", "geocode", "panel", "fit", "render"):
        assert main([stage, "--config", conf, "-o", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert '"n_label": "n=10 countries"' in out
    assert (tmp_path / "map.svg").is_file()


def test_flags_override_config(corpus_dir, tmp_path, capsys):
    conf = str(corpus_dir / "tb-world.conf")
    assert main(["run", "--config", conf, "-o", str(tmp_path), "--classes", "3", "--canvas", "800x400"]) == 0
    svg = (tmp_path / "map.svg").read_text()
    assert 'width="800"' in svg and 'class="c3"' not in svg and 'class="c2"' in svg


def test_validation_error_exit_two(corpus_dir, tmp_path, capsys):
    conf = str(corpus_dir / "tb-world.conf")
    assert main(["run", "--config", conf, "-o", str(tmp_path), "--gazetteer", str(tmp_path / "missing.csv")]) == 2
    assert "gazetteer" in capsys.readouterr().err
    assert main(["run", "--config", str(tmp_path / "nope.conf")]) == 2
    assert main(["fit", "-o", str(tmp_path / "empty")]) == 2


def test_stage_failure_exit_one(tmp_path, capsys):
    (tmp_path / "panel.csv").write_text("region_code,tweets,burden,papers\nA,0,1,1\nB,0,2,3\nC,0,3,2\nD,0,4,5\n")
    assert main(["fit", "--panel", str(tmp_path / "panel.csv"), "-o", str(tmp_path)]) == 1
    assert "stage 'fit' failed" in capsys.readouterr().err


def test_make_fixtures(tmp_path, capsys):
    assert main(["make-fixtures", str(tmp_path), "--seed", "3"]) == 0
    written = json.loads(capsys.readouterr().out)
    assert any(p.endswith("hiv-us.conf") for p in written)


def test_console_entry_point_help():
    out = subprocess.run([sys.executable, "-m", "geosensor", "run", "--help"],
                         capture_output=True, text=True, check=True).stdout
    assert "[MeSH Major Topic]" in out
    assert "GEOSENSOR_GEOCODE_URL" in out
    assert "--geocode-rps" in out
