import json

import pytest

from rmlab.cli import (EXIT_CRITERION, EXIT_INVALID, EXIT_OK,
                       main, read_toml_subset)
from rmlab.padic import PadicContext, PadicScalar
from rmlab.quadfield import NarrowClassGroup
from rmlab.siegelmeasure import phi_DR
from rmlab.winding import log_Tn_Jw


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_schema_and_envelope(capsys):
    code, rep = run(capsys, ["--p", "5", "phi-dr", "--gamma", "1,1,0,1"])
    assert code == EXIT_OK
    assert rep["schema"] == "rmlab/1"
    assert rep["command"] == "phi-dr"
    assert rep["exit_code"] == 0
    assert rep["phi_DR"] == 8 == phi_DR(((1, 1), (0, 1)), 5)


def test_winding_matches_library(capsys):
    code, rep = run(capsys, ["--disc", "12", "--p", "5", "--prec", "10",
                             "winding", "--n", "2"])
    assert code == EXIT_OK
    group = NarrowClassGroup(12)
    ctx = PadicContext(5, 10)
    expected = log_Tn_Jw(group.rm_representative(group.identity), 2, 5, ctx)
    assert PadicScalar.from_json(rep["log_TnJw"]).equals(expected)


def test_invalid_instance_exits_2(capsys):
    code, rep = run(capsys, ["--disc", "12", "--p", "13", "--prec", "8",
                             "--nmax", "3", "gtau"])
    assert code == EXIT_INVALID
    assert "inert" in rep["error"]


def test_nonfundamental_disc_exits_2(capsys):
    code, rep = run(capsys, ["--disc", "11", "--p", "5", "winding"])
    assert code == EXIT_INVALID


def test_gtau_and_cache(capsys, tmp_path):
    argv = ["--disc", "12", "--p", "5", "--prec", "12", "--nmax", "4",
            "--depth", "2", "--cache-dir", str(tmp_path), "gtau"]
    code, rep = run(capsys, argv)
    assert code == EXIT_OK
    assert set(rep["coefficients"]) == {"1", "2", "3", "4"}
    assert rep["fit"]["certified"] is not None
    cache = tmp_path / "coefficients.jsonl"
    assert cache.exists()
    entries = [json.loads(line) for line in cache.read_text().splitlines()]
    assert {e["n"] for e in entries} == {1, 2, 3, 4}
    assert all(e["disc"] == 12 and e["p"] == 5 for e in entries)
    # second run hits the cache and reproduces the report exactly
    code2, rep2 = run(capsys, argv)
    assert code2 == EXIT_OK
    assert rep2["coefficients"] == rep["coefficients"]
    assert len(cache.read_text().splitlines()) == 4  # nothing re-appended


def test_gtau_trivial_field(capsys):
    code, rep = run(capsys, ["--disc", "8", "--p", "5", "--prec", "8",
                             "--nmax", "3", "gtau"])
    assert code == EXIT_OK
    zeros = [PadicScalar.from_json(c) for c in rep["coefficients"].values()]
    assert all(z.is_zero for z in zeros)


def test_verify_threshold_and_exit_3(capsys):
    base = ["--disc", "12", "--p", "5", "--prec", "12", "--nmax", "4",
            "--depth", "2"]
    code, rep = run(capsys, base + ["verify", "--threshold", "6"])
    assert code == EXIT_OK and rep["passed"]
    code, rep = run(capsys, base + ["verify", "--threshold", "40"])
    assert code == EXIT_CRITERION and not rep["passed"]


def test_jdr(capsys):
    code, rep = run(capsys, ["--disc", "12", "--p", "5", "--prec", "10",
                             "jdr", "--level", "2"])
    assert code == EXIT_OK
    value = PadicScalar.from_json(rep["JDR"])
    assert value.v == 0  # principal unit representative


def test_fit_from_file(capsys, tmp_path):
    from rmlab.modforms import e2p_series
    ctx = PadicContext(5, 10)
    series = e2p_series(5, 8).scale(3)
    data = {"coefficients": [None] + [
        ctx.from_int(series.coeffs[n]).to_json() for n in range(1, 9)]}
    path = tmp_path / "series.json"
    path.write_text(json.dumps(data))
    code, rep = run(capsys, ["--p", "5", "--prec", "10",
                             "fit", "--series", str(path)])
    assert code == EXIT_OK
    a0 = PadicScalar.from_json(rep["fit"]["a0"])
    assert a0.equals(ctx.from_int(12))  # 3 * (p - 1)
    assert rep["fit"]["certified"]


def test_algdep_command(capsys):
    code, rep = run(capsys, ["--p", "5", "--prec", "24",
                             "algdep", "--value", "7,0,0",
                             "--degree", "2", "--budget", "16"])
    assert code == EXIT_OK
    assert rep["polynomial"] == [-7, 1]


def test_config_defaults_and_flag_priority(capsys, tmp_path):
    conf = tmp_path / "conf.toml"
    conf.write_text("# instance\ndisc = 8\np = 5\nprec = 8\nnmax = 3\n")
    code, rep = run(capsys, ["--config", str(conf), "gtau"])
    assert code == EXIT_OK and rep["disc"] == 8
    # explicit flag beats the config value
    code, rep = run(capsys, ["--config", str(conf), "--disc", "12",
                             "--depth", "2", "gtau"])
    assert code == EXIT_OK and rep["disc"] == 12


def test_read_toml_subset(tmp_path):
    path = tmp_path / "c.toml"
    path.write_text('[run]\nname = "x"\nn = 3  # comment\n')
    assert read_toml_subset(str(path)) == {"name": "x", "n": 3}
    bad = tmp_path / "bad.toml"
    bad.write_text("just words\n")
    with pytest.raises(ValueError):
        read_toml_subset(str(bad))


def test_recognize_unit_flagship_small(capsys):
    code, rep = run(capsys, ["--disc", "12", "--p", "5", "--prec", "20",
                             "--nmax", "4", "--depth", "3",
                             "recognize-unit", "--budget", "12"])
    assert code == EXIT_OK
    assert rep["recognized"]
    assert rep["polynomial"] == [5, -6, 5]
    assert rep["predicted_valuations"] == {"0": [-1, 12], "1": [1, 12]}


def test_threads_flag(capsys, tmp_path):
    code, rep = run(capsys, ["--disc", "12", "--p", "5", "--prec", "10",
                             "--nmax", "3", "--depth", "2", "--threads", "2",
                             "--cache-dir", str(tmp_path), "gtau"])
    assert code == EXIT_OK
    assert set(rep["coefficients"]) == {"1", "2", "3"}
