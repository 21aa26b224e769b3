import json

import numpy as np
import pytest

from cctc import cli
from cctc.errors import IngestionError


def run(*argv):
    return cli.main([str(a) for a in argv])


def test_ingest_basic(tmp_path):
    f = tmp_path / "d.csv"
    f.write_text("t,ae,sym\n1,2,3\n2,4,-5e-1\n")
    data = cli.ingest([f])
    assert data.names() == ["ae", "sym"]
    assert data.time == ("1", "2")
    assert data.series[1].values.tolist() == [3.0, -0.5]


def test_ingest_rejects_missing_row(tmp_path):
    f = tmp_path / "d.csv"
    f.write_text("t,ae,sym\n1,2,3\n2,NA,4\n3,5,6\n4,7,x\n")
    data = cli.ingest([f])
    assert len(data.series[0]) == 2
    assert [r[1] for r in data.rejected] == [3, 5]


def test_ingest_flip(tmp_path):
    f = tmp_path / "d.csv"
    f.write_text("t,ae,sym\n1,2,3\n2,4,-7.5\n")
    data = cli.ingest([f], flip=["sym"])
    assert data.series[1].values.tolist() == [-3.0, 7.5]
    assert data.series[0].values.tolist() == [2.0, 4.0]


@pytest.mark.parametrize("text,kwargs", [
    ("a,b\n1,2\n3\n", {}),
    ("a,b\n1,2\n", {"columns": ["c"]}),
    ("a,b\nNA,2\n", {}),
    ("a,b\n1,2\n", {"flip": ["zz"]}),
    ("", {}),
])
def test_ingest_errors(tmp_path, text, kwargs):
    f = tmp_path / "d.csv"
    f.write_text(text)
    with pytest.raises(IngestionError):
        cli.ingest([f], **kwargs)


def test_ingest_only_parses_selected_columns(tmp_path):
    f = tmp_path / "d.csv"
    f.write_text("name,a,b\nfoo,1,x\nbar,2,y\n")
    data = cli.ingest([f], columns=["a"], time_column="name")
    assert data.series[0].values.tolist() == [1.0, 2.0]


def test_simulate_round_trip(tmp_path):
    out = tmp_path / "m.csv"
    assert run("simulate", "--model", "M8", "--noise", "pareto", "--n", 200, "--seed", 4, "--out", out) == 0
    first = out.read_bytes()
    assert run("simulate", "--model", "M8", "--noise", "pareto", "--n", 200, "--seed", 4, "--out", out) == 0
    assert out.read_bytes() == first
    from cctc.simulate.models import ModelSpec, generate
    expect = generate(ModelSpec.of("M8", "pareto", n=200), np.random.default_rng(4))
    data = cli.ingest([out])
    for a, b in zip(data.series, expect):
        assert np.array_equal(a.values, b.values)


def test_simulate_unknown_model(capsys):
    assert run("simulate", "--model", "M42") == 1
    assert "M1, M2" in capsys.readouterr().err


def _sim(tmp_path, model="M2", seed=0):
    path = tmp_path / f"{model}.csv"
    run("simulate", "--model", model, "--noise", "pareto", "--seed", seed, "--out", path)
    return path


def test_test_command_model_2(tmp_path):
    src = _sim(tmp_path)
    assert run("test", "--input", src, "--out", tmp_path / "r1") == 0
    res = json.loads((tmp_path / "r1" / "results.json").read_text())
    decisions = {r["pair"]: r["decision"] for r in res["results"]}
    assert decisions == {"X->Y": "reject", "Y->X": "accept"}
    assert res["config"]["p"] == 3 and res["config"]["alpha"] == 1e4
    assert run("test", "--input", src, "--out", tmp_path / "r2") == 0
    assert (tmp_path / "r1" / "results.json").read_bytes() == (tmp_path / "r2" / "results.json").read_bytes()
    header = (tmp_path / "r1" / "results.csv").read_text().splitlines()[0]
    assert header == "pair,p,k,coefficient,p_value,reject"


def test_test_command_independent_series(tmp_path):
    src = _sim(tmp_path, "M1", seed=1)
    assert run("test", "--input", src, "--out", tmp_path / "r") == 0
    res = json.loads((tmp_path / "r" / "results.json").read_text())
    assert [r["decision"] for r in res["results"]] == ["accept", "accept"]


def test_test_command_variants(tmp_path):
    src = tmp_path / "m8.csv"
    run("simulate", "--model", "M8", "--noise", "t", "--out", src)
    for extra in (["--variant", "max"], ["--variant", "conditional", "--confounder", "Z"],
                  ["--variant", "multivariate"], ["--weights", "optimize", "--columns", "X,Y"],
                  ["--weights", "0.2,0.3,0.5", "--columns", "X,Y"]):
        out = tmp_path / ("o" + "_".join(extra).replace(",", "").replace("-", ""))
        assert run("test", "--input", src, "--b", 20, "--out", out, *extra) == 0, extra
        assert json.loads((out / "results.json").read_text())["results"]


def test_config_file_and_flag_override(tmp_path):
    src = _sim(tmp_path)
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"# test run\ninput = {src}\np = 2\nb = 10\n")
    assert run("test", "--config", cfg, "--b", 15, "--out", tmp_path / "r") == 0
    conf = json.loads((tmp_path / "r" / "results.json").read_text())["config"]
    assert conf["p"] == 2 and conf["b"] == 15


def test_config_unknown_key(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("bogus = 1\n")
    assert run("test", "--config", cfg, "--input", "x.csv", "--out", tmp_path) == 1


def test_usage_errors(tmp_path):
    src = _sim(tmp_path)
    assert run("test", "--input", src, "--out", tmp_path / "o", "--p", 0) == 1
    assert run("test", "--input", src, "--out", tmp_path / "o", "--weights", "0.5,0.6,0.1") == 1
    assert run("test", "--input", src, "--out", tmp_path / "o", "--blocks", 3) == 1  # block must exceed the shift
    assert run("profile", "--input", src, "--out", tmp_path / "o", "--p-range", "4:2") == 1
    assert run("benchmark", "--methods", "bogus", "--out", tmp_path / "o") == 1
    assert run("frobnicate") == 1
    assert run("test", "--input", tmp_path / "missing.csv", "--out", tmp_path / "o") == 2


def test_partial_failure_manifest(tmp_path):
    src = tmp_path / "d.csv"
    rows = ["t,a,b"] + [f"{i},{i},{(i * 7) % 11}" for i in range(60)]
    src.write_text("\n".join(rows) + "\n")
    # a is increasing, so a -> b has no extreme before the last p positions; b -> a is fine
    code = run("test", "--input", src, "--k", 3, "--b", 10, "--out", tmp_path / "o")
    assert code == 3
    res = json.loads((tmp_path / "o" / "results.json").read_text())
    assert [f["pair"] for f in res["failures"]] == ["a->b"]
    assert [r["pair"] for r in res["results"]] == ["b->a"]
    assert (tmp_path / "o" / "failures.json").exists()


def test_profile_constant_effect(tmp_path):
    src = tmp_path / "c.csv"
    rng = np.random.default_rng(0)
    src.write_text("t,x,y\n" + "".join(f"{i},{rng.standard_normal()!r},1.0\n" for i in range(300)))
    assert run("profile", "--input", src, "--columns", "x,y", "--p-range", "1:4", "--b", 0, "--out", tmp_path / "o") == 0
    lines = (tmp_path / "o" / "profile.csv").read_text().splitlines()
    assert lines[0] == "pair,p,coefficient,p_value,pccf,extremogram"
    xy = [ln.split(",") for ln in lines[1:] if ln.startswith("x->y")]
    assert [float(r[2]) for r in xy] == [1.0] * 4


def test_profile_outputs_ingest(tmp_path):
    src = _sim(tmp_path)
    assert run("profile", "--input", src, "--p-range", "1:4", "--b", 10, "--out", tmp_path / "o") == 0
    data = cli.ingest([tmp_path / "o" / "profile.csv"], columns=["p", "coefficient"], time_column="pair")
    assert len(data.series[0]) == 8
    sel = (tmp_path / "o" / "delay_selection.csv").read_text().splitlines()
    assert sel[0] == "pair,threshold_cbar,selected_p"
    assert len(sel) == 1 + 2 * 3


def test_benchmark_smoke(tmp_path):
    out = tmp_path / "b"
    assert run("benchmark", "--models", "M1,M2", "--noise", "t", "--reps", 1, "--b", 10, "--out", out) == 0
    assert (out / "benchmark.csv").read_text().startswith("model,noise,method,direction,pct_correct,reps,excluded_reps")
    assert "M2" in (out / "benchmark.txt").read_text()
