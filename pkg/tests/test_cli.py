import json

import pytest

from arith.errors import GridError
from cli import main, parse_grid
from verify import suite
from verify.reports import default_grid


@pytest.fixture
def out(tmp_path):
    return tmp_path / "run"


class TestParseGrid:
    def test_default(self):
        assert parse_grid("default") == default_grid()
        assert parse_grid("default", extended=True) == default_grid(extended=True)

    def test_list(self):
        assert parse_grid("1e4, 1e5") == [10**4, 10**5]

    def test_exponent_range(self):
        assert parse_grid("4:5:0.5") == [10**4, 31623, 10**5]

    def test_garbage(self):
        with pytest.raises(GridError):
            parse_grid("dez mil")


def test_sum_prints_table_and_metadata(out, capsys):
    assert main(["sum", "--spec", "unit", "--grid", "10,100", "--out", str(out)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines == ["10,10.0,10.0", "100,100.0,100.0"]
    meta = json.loads((out / "metadata.json").read_text(encoding="utf-8"))
    assert meta["command"] == "sum"
    assert meta["verdict"] is True
    assert str(out / "sum-unit.csv") in meta["artifacts"]


def test_sum_with_gnuplot(out):
    assert main(["sum", "--spec", "unit", "--grid", "10,100", "--out", str(out), "--gnuplot"]) == 0
    script = (out / "sum-unit.gp").read_text(encoding="utf-8")
    assert "set logscale x" in script
    assert "sum-unit.csv" in script


def test_validate_builtin_passes(out):
    assert main(["validate", "--spec", "unit", "--x", "1e4", "--out", str(out)]) == 0
    assert (out / "validate-unit-C.json").exists()


def test_validate_file_reports_failed_condition(out, specs_dir, capsys):
    code = main(["validate", "--spec", str(specs_dir / "liouville.toml"), "--x", "1e4", "--out", str(out)])
    assert code == 1
    assert "liouville C_a iii): FALHOU em p=2" in capsys.readouterr().out


def test_malformed_spec_file(out, tmp_path, capsys):
    bad = tmp_path / "quebrada.toml"
    bad.write_text('label = "x"\nextension = \n', encoding="utf-8")
    assert main(["validate", "--spec", str(bad), "--x", "1e4", "--out", str(out)]) == 2
    assert "erro de spec" in capsys.readouterr().err


def test_unknown_builtin(out):
    assert main(["sum", "--spec", "nao-existe", "--grid", "10", "--out", str(out)]) == 2


def test_verify_lower_mean_value(out, capsys):
    code = main(["verify", "lower-mean-value", "--spec", "unit", "--grid", "1e4,1e5", "--out", str(out)])
    assert code == 0
    assert "lower-mean-value-unit: aprovado" in capsys.readouterr().out
    assert (out / "lower-mean-value-unit.json").exists()
    assert (out / "lower-mean-value-unit.csv").exists()


def test_verify_refusal_exit_code(out, capsys):
    assert main(["verify", "upper-explicit", "--spec", "unit", "--grid", "1e4", "--out", str(out)]) == 1
    assert "recusado" in capsys.readouterr().err


def test_grid_beyond_reach_without_extended_mode(out, capsys):
    assert main(["sum", "--spec", "unit", "--grid", "1e8", "--out", str(out)]) == 2
    assert "--extended-x" in capsys.readouterr().err


def test_suite_subset(out):
    code = main(["suite", "--only", "montgomery", "--only", "trig-inequality", "--out", str(out)])
    assert code == 0
    index = json.loads((out / "suite" / "index.json").read_text(encoding="utf-8"))
    assert [e["name"] for e in index["entries"]] == ["montgomery", "trig-inequality"]
    assert all(e["passed"] for e in index["entries"])
    metadata = json.loads((out / "metadata.json").read_text(encoding="utf-8"))
    assert metadata["suite_wall_time"] >= 0


def test_suite_over_wall_limit_fails(out, monkeypatch, capsys):
    monkeypatch.setattr(suite, "SUITE_WALL_LIMIT", 0.0)
    code = main(["suite", "--only", "trig-inequality", "--out", str(out)])
    assert code == 1
    assert "limite de tempo" in capsys.readouterr().err
    metadata = json.loads((out / "metadata.json").read_text(encoding="utf-8"))
    assert metadata["suite_wall_time"] > 0
    assert metadata["verdict"] is False


def test_suite_extended_mode_has_no_wall_limit(out, monkeypatch):
    monkeypatch.setattr(suite, "SUITE_WALL_LIMIT", 0.0)
    assert main(["suite", "--only", "trig-inequality", "--extended-x", "--out", str(out)]) == 0
