import io
import random
from pathlib import Path

import pytest

from twistlab.cli import main
from twistlab.formats import format_graphmap
from twistlab.normalize import good_representative

import corpus

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


def sample(name):
    return SAMPLES / name


def test_analyze_rank2():
    code, out, _ = run("analyze", sample("rank2.aut"))
    assert code == 0
    assert "rank 2\ns 1\nmaximal true\n" in out


def test_twist_rank2_golden():
    code, out, _ = run("twist", sample("rank2.aut"))
    assert code == 0
    assert out == ("gog\nvertex v0 group g_a g_bab'\n"
                   "edge b v0 v0 mono g_a comono g_bab' twist 1\nend\nverified: true\n")


@pytest.mark.parametrize("name", ["bad.aut", "bad.gm"])
def test_exponential_exit_code(name):
    code, out, err = run("validate", sample(name))
    assert code == 3 and out == ""
    assert "stratum 1" in err and "[[0,1],[1,1]]" in err


def test_validate_ok():
    code, out, _ = run("validate", sample("twovertex.gm"))
    assert code == 0 and out.startswith("valid\n")


def test_usage_and_input_errors():
    assert run("analyze", "--bogus", sample("rank2.aut"))[0] == 1
    assert run("analyze", SAMPLES / "missing.aut")[0] == 1
    assert run()[0] == 1
    assert run("oracle", "fixed", sample("twovertex.gm"))[0] == 1


def test_bound_exhausted_exit_code(tmp_path):
    f = tmp_path / "stuck.aut"
    f.write_text("aut rank=3 names=a,b,c\na -> a\nb -> b a\nc -> c b\nend\n")
    code, _, err = run("analyze", f)
    assert code == 2 and err.startswith("error:")


def test_act():
    assert run("act", sample("rank2.aut"), "b b")[1] == "b a b a\n"
    assert run("act", sample("twovertex.gm"), "c")[1] == "c b\n"


def test_oracle_subcommands():
    out = run("oracle", "fixed", "--max-len", 2, sample("rank2.aut"))[1]
    assert out == "fixed 1\nfixed a\nfixed a'\nfixed a a\nfixed a' a'\n"
    out = run("oracle", "periodic", "--max-len", 2, "--max-period", 3, sample("rank2.aut"))[1]
    assert all(line.endswith("period 1") for line in out.splitlines())
    assert run("oracle", "similar", "--bound", 3, sample("similar.auts"))[1] == "similar witness b\n"
    code, out, _ = run("oracle", "extend", "--max-len", 6, "--conjugator", "b'",
                       sample("extend.auts"))
    assert code == 0 and "c -> c b'\n" in out and out.endswith("inside true\nrank 3\n")
    out = run("oracle", "class-fix", "--bound", 3, sample("rank2.aut"), "a")[1]
    assert "fixed a\n" in out and "rank 2\n" in out
    assert run("oracle", "class-fix", sample("rank2.aut"), "b")[0] == 1


def test_normalize_output_feeds_twist(tmp_path):
    for name in ["rank2.aut", "rank3.aut", "conjugated.aut", "twovertex.gm", "identity3.aut"]:
        code, out, _ = run("normalize", sample(name))
        assert code == 0
        f = tmp_path / (name + ".gm")
        f.write_text(out)
        code, out, _ = run("twist", f)
        assert code == 0 and out.endswith("verified: true\n")


def test_corpus_pipeline_composes(tmp_path):
    rng = random.Random(17)
    for i in range(6):
        m = corpus.scrambled(rng, corpus.good_rep(rng), 2)
        f = tmp_path / f"in{i}.gm"
        f.write_text(format_graphmap(m))
        code, out, _ = run("normalize", f)
        assert code == 0
        g = tmp_path / f"out{i}.gm"
        g.write_text(out)
        code, out, _ = run("twist", g)
        assert code == 0 and "verified: true" in out
        assert out.count("vertex ") == good_representative(m).analysis.report.s


def test_output_is_deterministic():
    for argv in [("analyze", sample("rank3.aut")), ("normalize", sample("conjugated.aut")),
                 ("twist", sample("twovertex.gm"))]:
        assert run(*argv) == run(*argv)
