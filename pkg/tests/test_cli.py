import json
import subprocess
import sys

import pytest

from skewlat import gen_rectangular, gen_xn, load, save, serialize_algebra
from skewlat.cli import run
from skewlat.constructions import twisted_primitive_spec


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, alg in (("x1", gen_xn(1)), ("x2", gen_xn(2)), ("rect", gen_rectangular(1, 2))):
        paths[name] = tmp_path / f"{name}.skl"
        save(alg, paths[name])
    x2 = gen_xn(2)
    bad = serialize_algebra(x2).replace("meet\na1 a1 b1", "meet\na1 a1 c1", 1)
    paths["bad"] = tmp_path / "bad.skl"
    paths["bad"].write_text(bad)
    paths["junk"] = tmp_path / "junk.skl"
    paths["junk"].write_text("not an algebra\n")
    return paths


def test_validate(files, capsys):
    assert run(["validate", str(files["x2"])]) == 0
    assert capsys.readouterr().out.strip() == "ok"
    assert run(["validate", str(files["bad"])]) == 1
    out = capsys.readouterr().out
    assert out.startswith("FAIL ") and "a1" in out


def test_parse_and_usage_errors(files, capsys):
    assert run(["validate", str(files["junk"])]) == 2
    assert "line 1" in capsys.readouterr().err
    assert run(["frobnicate"]) == 2
    assert run(["validate", str(files["x2"].parent / "missing.skl")]) == 2
    assert run(["generate", "xn", "-o", "out.skl"]) == 2


def test_classify_x2(files, capsys):
    assert run(["classify", str(files["x2"]), "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["properties"]["categorical"] is False
    assert all(data["agreement"].values())
    assert data["forbidden"]["n"] == 2
    assert run(["classify", str(files["x2"])]) == 0
    text = capsys.readouterr().out
    assert "categorical" in text and "forbidden: X_2" in text


def test_classify_invalid_input(files):
    assert run(["classify", str(files["bad"])]) == 1


def test_forbidden(files, capsys):
    assert run(["forbidden", str(files["x1"])]) == 0
    assert capsys.readouterr().out.strip() == "none"
    assert run(["forbidden", str(files["x2"]), "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["kind"] == "X" and data["n"] == 2 and len(data["embedding"]) == 8


def test_decompose(files, capsys):
    assert run(["decompose", str(files["x2"]), "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["d_classes"] == [["a1", "a2"], ["b1", "b2", "b3", "b4"], ["c1", "c2"]]
    assert data["hasse"] == [[0, 1], [1, 2]]
    assert len(data["pairs"]) == 3 and len(data["chains"]) == 1
    assert run(["decompose", str(files["x2"])]) == 0
    assert "AC-components: b1 b2 b3 b4" in capsys.readouterr().out


def test_generate(tmp_path, files):
    out = tmp_path / "g.skl"
    assert run(["generate", "xn", "--n", "3", "-o", str(out)]) == 0
    assert load(out) == gen_xn(3)
    assert run(["generate", "rectangular", "--p", "2", "--q", "3", "-o", str(out)]) == 0
    assert load(out).n == 6
    assert run(["generate", "partialfn", "--m", "2", "--k", "2", "-o", str(out)]) == 0
    assert load(out).n == 9
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps(twisted_primitive_spec().to_json()))
    assert run(["generate", "primitive", "--spec", str(spec), "-o", str(out)]) == 0
    assert load(out).n == 8
    assert run(["generate", "product", str(files["x1"]), str(files["rect"]), "-o", str(out)]) == 0
    assert load(out).n == 12


def test_generate_product_respects_carrier_limit(tmp_path, files, monkeypatch):
    monkeypatch.setenv("SKL_MAX_CARRIER", "8")
    out = tmp_path / "p.skl"
    assert run(["generate", "product", str(files["x1"]), str(files["rect"]), "-o", str(out)]) == 1


def test_crosscheck_files(files, capsys):
    paths = [str(files[k]) for k in ("x1", "x2", "rect")]
    assert run(["crosscheck", *paths]) == 0
    out = capsys.readouterr().out
    assert "algebras checked: 3" in out and "disagreements: 0" in out
    assert run(["crosscheck", str(files["bad"])]) == 1


def test_crosscheck_directory(tmp_path, capsys):
    corpus = tmp_path / "corpus"
    assert run(["generate", "corpus", "-o", str(corpus)]) == 0
    some = sorted(corpus.glob("*.skl"))[:30]
    assert len(list(corpus.glob("*.skl"))) >= 200
    assert run(["crosscheck", *map(str, some)]) == 0
    assert "algebras checked: 30" in capsys.readouterr().out


def test_crosscheck_seeded_corpus_is_deterministic(capsys):
    assert run(["crosscheck", "--seed", "0"]) == 0
    first = capsys.readouterr().out
    assert run(["crosscheck", "--seed", "0"]) == 0
    assert capsys.readouterr().out == first
    assert "disagreements: 0" in first


def test_module_entry_point(files):
    proc = subprocess.run(
        [sys.executable, "-m", "skewlat", "forbidden", str(files["x1"])],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and proc.stdout.strip() == "none"
