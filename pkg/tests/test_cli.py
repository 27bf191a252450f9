import json

import pytest

from pillowbraid.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_degree(capsys):
    code, out, _ = run(capsys, "verify", "--level", "degree")
    assert code == 0
    assert "2256 = 108 + 756 + 1392" in out


def test_verify_census(capsys):
    code, out, _ = run(capsys, "verify", "--level", "census")
    assert code == 0 and "(168, 840, 72)" in out


def test_verify_json(capsys):
    code, out, _ = run(capsys, "verify", "--level", "permutation", "--format", "json")
    d = json.loads(out)
    assert code == 0 and d["passed"] and d["permutation_ok"]


def test_verify_burau_reports_localization(capsys):
    code, out, _ = run(capsys, "verify", "--level", "burau", "--seeds", "2")
    # the shipped factorization does not pass; the report must say where
    assert code == 1
    assert "first divergence: block phi2" in out


def test_missing_catalog_is_input_error(capsys, tmp_path):
    code, _, err = run(capsys, "--catalog", str(tmp_path / "none.json"), "verify")
    assert code == 2 and "cannot read catalog" in err


def test_invalid_catalog_is_input_error(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"schema_version": 1}))
    code, _, err = run(capsys, "--catalog", str(p), "verify")
    assert code == 2 and "catalog invalid" in err


def test_emit_counts(capsys, tmp_path):
    out = tmp_path / "p.txt"
    assert run(capsys, "emit-presentation", "-o", str(out))[0] == 0
    assert len(out.read_text().splitlines()) == 1 + 1080
    pj = tmp_path / "p.json"
    run(capsys, "emit-presentation", "--target", "projective", "--format", "json", "-o", str(pj))
    assert len(json.loads(pj.read_text())["relations"]) == 1081
    run(capsys, "emit-presentation", "--expand-rho", "all=1", "-o", str(out))
    assert len(out.read_text().splitlines()) == 1 + 2160


def test_emit_bad_rho(capsys):
    code, _, err = run(capsys, "emit-presentation", "--expand-rho", "1=1,2=3")
    assert code == 2 and "share a class" in err


def test_render_counts(capsys, tmp_path):
    assert run(capsys, "render", "phi1", "--out", str(tmp_path))[0] == 0
    assert len(list(tmp_path.glob("phi1_*.svg"))) == 15
    run(capsys, "render", "D:3", "--out", str(tmp_path))
    assert len(list(tmp_path.glob("D3_*.svg"))) == 1
    run(capsys, "render", "fig:alpha", "--out", str(tmp_path))
    assert len(list(tmp_path.glob("fig_alpha_*.svg"))) == 2


def test_render_is_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run(capsys, "render", "phi2", "--out", str(a))
    run(capsys, "render", "phi2", "--out", str(b))
    for f in a.iterdir():
        assert f.read_text() == (b / f.name).read_text()


@pytest.mark.parametrize("selector", ["", "phiX", "fig:delta"])
def test_render_bad_selector(capsys, tmp_path, selector):
    assert run(capsys, "render", selector, "--out", str(tmp_path))[0] == 2


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as e:
        main(["verify", "--level", "nope"])
    assert e.value.code == 2


def test_hurwitz_apply_and_search(capsys, tmp_path):
    src = tmp_path / "e.json"
    src.write_text(json.dumps({"strand_count": 3, "factors": [[1], [2]]}))
    code, out, _ = run(capsys, "hurwitz", "apply", "--input", str(src), "--moves", "1R")
    assert code == 0
    target = tmp_path / "g.json"
    target.write_text(out)
    code, out, _ = run(capsys, "hurwitz", "search", "--input", str(src), "--target", str(target))
    assert code == 0 and json.loads(out)["moves"] == [[1, "right"]]
    far = tmp_path / "h.json"
    far.write_text(json.dumps({"strand_count": 3, "factors": [[2], [2]]}))
    code, out, _ = run(capsys, "hurwitz", "search", "--input", str(src), "--target", str(far))
    assert code == 1 and json.loads(out)["status"] == "not_equivalent"


def test_hurwitz_bad_input(capsys, tmp_path):
    src = tmp_path / "e.json"
    src.write_text("{}")
    assert run(capsys, "hurwitz", "apply", "--input", str(src), "--moves", "1R")[0] == 2


def test_certify_and_verify(capsys, tmp_path):
    cert = tmp_path / "c.json"
    code, out, _ = run(capsys, "certify", "phi1", "--local", "--exponents", "3=1,19=-2", "-o", str(cert))
    assert code == 0 and "verified" in out
    code, out, _ = run(capsys, "certify", "phi1", "--local", "--verify", str(cert))
    assert code == 0
    # phi3 in its own disk is the same braid expression as phi1
    assert run(capsys, "certify", "phi3", "--local", "--verify", str(cert))[0] == 0
    assert run(capsys, "certify", "phi1", "--verify", str(cert))[0] != 0
