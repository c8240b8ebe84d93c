import json
import os

import pytest
import sympy as sp

from mixedcrn.cli import bundled_examples, main
from mixedcrn.dsl import render_expr

HERE = os.path.dirname(__file__)
GOLDEN = os.path.join(HERE, "golden")
PIPELINE_ARGS = {
    "figure1.crn": [],
    "enzyme_appB.crn": [],
    "simple_translation.crn": [],
    "insulin.crn": [],
    "yu_craciun.crn": ["--clear-denominators"],
}


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def stable(report):
    """Drop floating-point residuals, which are platform dependent in the last bits."""
    report = json.loads(json.dumps(report))
    report.pop("verification", None)
    for p in report["parts"]:
        p.pop("residual", None)
    return report


def test_analyze_json(capsys):
    code, out, _ = run(capsys, "analyze", "figure1.crn", "--format", "json")
    assert code == 0
    s = json.loads(out)["structure"]
    assert (s["n"], s["ell"], s["s"], s["delta"], s["weakly_reversible"]) == (7, 3, 3, 1, False)


def test_analyze_tsv(capsys):
    code, out, _ = run(capsys, "analyze", "insulin.crn", "--format", "tsv")
    assert code == 0
    rows = dict(line.split("\t") for line in out.splitlines() if line.count("\t") == 1)
    assert rows["m"] == "27" and rows["r"] == "36"


@pytest.mark.parametrize("name", sorted(PIPELINE_ARGS))
def test_pipeline_golden(capsys, name):
    code, out, _ = run(capsys, "pipeline", name, "--format", "json", *PIPELINE_ARGS[name])
    assert code == 0
    report = json.loads(out)
    assert report["schema"] == "mixedcrn.report/1"
    assert report["verification"]["passed"]
    with open(os.path.join(GOLDEN, name.replace(".crn", ".json"))) as fh:
        assert stable(report) == json.load(fh)


def test_pipeline_figures(capsys, tmp_path):
    code, out, _ = run(capsys, "pipeline", "enzyme_appB.crn", "--format", "json", "--figures", str(tmp_path))
    assert code == 0
    assert sorted(os.listdir(tmp_path)) == ["decomposition.png", "residuals.png"]
    assert all(os.path.getsize(p) > 1000 for p in json.loads(out)["figures"])


def test_seed_is_reported(capsys):
    code, out, _ = run(capsys, "pipeline", "figure1.crn", "--format", "json", "--seed", "9", "--samples", "7")
    report = json.loads(out)
    assert report["seed"] == 9 and report["verification"]["samples"] == 7


def test_decompose_and_translate(capsys):
    code, out, _ = run(capsys, "decompose", "insulin.crn", "--format", "json")
    d = json.loads(out)
    assert code == 0 and len(d["parts"]) == 10 and d["rank"] == d["rank_sum"] == 17
    code, out, _ = run(capsys, "translate", "enzyme_appB.crn", "--format", "json")
    t = json.loads(out)
    assert code == 0 and (t["effective_deficiency"], t["kinetic_deficiency"]) == (0, 0)


def test_translate_search_not_found(capsys, tmp_path):
    f = tmp_path / "one.crn"
    f.write_text("R1: 2A -> A ; k1*a^2\n")
    code, _, err = run(capsys, "translate", str(f), "--search")
    assert code == 3 and "no translation" in err


def test_parametrize_part(capsys):
    code, out, _ = run(capsys, "parametrize", "insulin.crn", "--part", "4", "--format", "json")
    assert code == 0
    assert json.loads(out)["residual"]["passed"]


def test_transform(capsys):
    code, out, _ = run(capsys, "transform", "yu_craciun.crn", "--format", "json")
    d = json.loads(out)
    assert code == 0
    assert len(d["reactions"]) == 3 and d["substitutions"] == {"k2p": "k2*k3"}


def test_empty_file(capsys, tmp_path):
    f = tmp_path / "empty.crn"
    f.write_text("")
    code, _, err = run(capsys, "analyze", str(f))
    assert code == 2 and "no reactions" in err


def test_missing_file(capsys):
    code, _, err = run(capsys, "analyze", "does-not-exist.crn")
    assert code == 2 and "no such file" in err


def test_self_loop(capsys, tmp_path):
    f = tmp_path / "loop.crn"
    f.write_text("R1: A -> B ; k1*a\nR2: A + B -> B + A ; k2*a*b\n")
    code, _, err = run(capsys, "pipeline", str(f))
    assert code == 2 and "2:1: error: self-loop" in err


def test_contradictory_merge(capsys, tmp_path):
    # two independent parts fix A at k2/k1 and at k4/k3
    f = tmp_path / "clash.crn"
    f.write_text("R1: A + C -> 2C ; k1*a*c\nR2: C -> A ; k2*c\nR3: A + B -> 2B ; k3*a*b\nR4: B -> A ; k4*b\n")
    code, _, err = run(capsys, "pipeline", str(f))
    assert code == 3 and "error [merge]" in err


def test_uncleared_rational_part_is_inapplicable(capsys):
    code, _, err = run(capsys, "pipeline", "yu_craciun.crn")
    assert code == 3 and "error [part 1]" in err


def test_examples_listing(capsys):
    code, out, _ = run(capsys, "examples")
    assert out.split() == bundled_examples() and len(bundled_examples()) == 5


def perturbations(expr):
    """Every copy of ``expr`` with one exponent raised by one."""
    out = []

    def walk(node, rebuild):
        if node.is_Symbol:
            out.append(rebuild(node ** 2))
        elif node.is_Pow:
            out.append(rebuild(node.base ** (node.exp + 1)))
            walk(node.base, lambda n: rebuild(n ** node.exp))
        elif node.args:
            for i, arg in enumerate(node.args):
                walk(arg, lambda n, i=i: rebuild(node.func(*node.args[:i], n, *node.args[i + 1:])))

    walk(expr, lambda n: n)
    return [e for e in out if e != expr]


def test_every_exponent_perturbation_fails(capsys, tmp_path):
    code, out, _ = run(capsys, "pipeline", "enzyme_appB.crn", "--format", "json")
    golden = json.loads(out)["merged"]["expressions"]
    good = tmp_path / "good.txt"
    good.write_text("".join(f"{s} = {e}\n" for s, e in golden.items()))
    assert run(capsys, "verify", "enzyme_appB.crn", str(good))[0] == 0
    count = 0
    for s, text in golden.items():
        for bad in perturbations(sp.sympify(text.replace("^", "**"), locals=_positive(text))):
            lines = dict(golden)
            lines[s] = render_expr(bad)
            f = tmp_path / "bad.txt"
            f.write_text("".join(f"{a} = {b}\n" for a, b in lines.items()))
            code, _, err = run(capsys, "verify", "enzyme_appB.crn", str(f))
            assert code == 1, (s, lines[s])
            assert "verification failed" in err
            count += 1
    assert count >= 20


def _positive(text):
    import re
    return {n: sp.Symbol(n, positive=True) for n in set(re.findall(r"[A-Za-z_]\w*", text))}
