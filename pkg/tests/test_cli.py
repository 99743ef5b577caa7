import json

import pytest

from gallery.cli import main
from gallery.csp import load_instance, solve_csp
from gallery.geom import format_polygon, validate_polygon

FAN = [(0, 0), (20, 2), (11, 3), (18, 8), (9, 6), (14, 14), (6, 9), (8, 18), (3, 11), (2, 20)]


@pytest.fixture
def poly_file(tmp_path, lshape):
    p = tmp_path / "l.txt"
    p.write_text(format_polygon(lshape))
    return p


@pytest.fixture
def fan_file(tmp_path):
    p = tmp_path / "fan.txt"
    p.write_text(format_polygon(validate_polygon(FAN)))
    return p


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve_yes_json(capsys, fan_file):
    code, out, _ = run(capsys, "solve", "--polygon", fan_file, "--k", 1, "--report", "json")
    assert code == 0
    data = json.loads(out)
    assert set(data) == {"answer", "k", "variant", "guards", "guessesTried", "elapsedMs", "route", "witness"}
    assert data["answer"] == "yes" and data["k"] == 1 and data["variant"] == "vv"
    assert data["guards"] == [{"vertex": data["guards"][0]["vertex"], "original": data["guards"][0]["vertex"],
                               "x": "0", "y": "0"}]
    assert data["guessesTried"] >= 1 and data["witness"]


def test_solve_no_exit_code(capsys, poly_file):
    code, out, _ = run(capsys, "solve", "--polygon", poly_file, "--k", 0, "--report", "json")
    assert code == 1
    assert json.loads(out)["answer"] == "no"


def test_solve_text_report(capsys, poly_file):
    code, out, _ = run(capsys, "solve", "--polygon", poly_file, "--k", 1)
    assert code == 0
    assert out.splitlines()[0] == "answer: yes"
    assert "guards: 1=(1, 1)" in out


def test_min_k_and_oracle(capsys, fan_file):
    code, out, _ = run(capsys, "solve", "--polygon", fan_file, "--min-k", "--oracle", "--report", "json")
    data = json.loads(out)
    assert code == 0 and data["k"] == 1 and data["oracle"] == "yes"


@pytest.mark.parametrize("variant,k,expected", [("bv", 1, 0), ("vb", 1, 0), ("bv", 0, 1)])
def test_boundary_variants(capsys, poly_file, variant, k, expected):
    code, out, _ = run(capsys, "solve", "--polygon", poly_file, "--k", k, "--variant", variant,
                       "--report", "json", "--oracle")
    assert code == expected
    data = json.loads(out)
    assert data["variant"] == variant
    for g in data["guards"]:
        if variant == "vb":
            assert g["original"] is not None


def test_bad_inputs(capsys, tmp_path, poly_file):
    missing = tmp_path / "nope.txt"
    assert run(capsys, "solve", "--polygon", missing, "--k", 1)[0] == 2
    bowtie = tmp_path / "bow.txt"
    bowtie.write_text("4\n0 0\n1 1\n1 0\n0 1\n")
    code, _, err = run(capsys, "solve", "--polygon", bowtie, "--k", 1)
    assert code == 2 and "error" in err
    assert run(capsys, "solve", "--polygon", poly_file)[0] == 2
    assert run(capsys, "solve", "--polygon", poly_file, "--k", -1)[0] == 2
    with pytest.raises(SystemExit):
        main(["solve", "--polygon", str(poly_file), "--k", "1", "--variant", "xx"])


def test_dump_csp_resolves_identically(capsys, tmp_path, fan_file):
    out_dir = tmp_path / "dump"
    code, _, _ = run(capsys, "solve", "--polygon", fan_file, "--k", 1, "--dump-csp", out_dir)
    assert code == 0
    index = (out_dir / "index.txt").read_text().splitlines()
    assert index
    assert any(line.split()[1] == "sat" for line in index)
    for line in index:
        name, status = line.split()[:2]
        inst = load_instance(out_dir / name)
        assert (solve_csp(inst) is not None) == (status == "sat")
        code, out, _ = run(capsys, "csp", "--instance", out_dir / name)
        assert code == (0 if status == "sat" else 1)
        assert out.splitlines()[0] == ("satisfiable" if status == "sat" else "unsatisfiable")


def test_csp_command(capsys, tmp_path):
    p = tmp_path / "a.csp"
    p.write_text("csp 2 3\nconst 0 ge 2\nfn 1 ge 0 1 2 3 3\n")
    code, out, _ = run(capsys, "csp", "--instance", p, "--report", "json")
    assert code == 0
    assert json.loads(out) == {"satisfiable": True, "assignment": [2, 3]}
    p.write_text("csp 1 3\nconst 0 ge 2\nconst 0 le 1\n")
    assert run(capsys, "csp", "--instance", p)[:2] == (1, "unsatisfiable\n")
    p.write_text("csp 2 2\nfn 0 le 1 0 2 1\n")
    assert run(capsys, "csp", "--instance", p)[0] == 2


def test_gen_is_reproducible(capsys, tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    assert run(capsys, "gen", "--n", 9, "--seed", 4, "--reflex", 3, "--out", a)[0] == 0
    assert run(capsys, "gen", "--n", 9, "--seed", 4, "--reflex", 3, "--out", b)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    code, out, err = run(capsys, "gen", "--n", 9, "--seed", 4, "--reflex", 3)
    assert out == a.read_text() and err == "r = 3\n"
    assert run(capsys, "gen", "--n", 2)[0] == 2


def test_viz_is_reproducible(capsys, tmp_path, poly_file):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    assert run(capsys, "viz", "--polygon", poly_file, "--guards", "1", "--out", a)[0] == 0
    assert run(capsys, "viz", "--polygon", poly_file, "--guards", "1", "--out", b)[0] == 0
    svg = a.read_text()
    assert svg == b.read_text()
    assert svg.startswith("<svg") and svg.count('class="guard"') == 1
    assert svg.count('class="reflex"') == 1 and svg.count('class="sight"') == 5
    assert run(capsys, "viz", "--polygon", poly_file, "--guards", "9", "--out", a)[0] == 2
    assert run(capsys, "viz", "--polygon", poly_file, "--guards", "x", "--out", a)[0] == 2


def test_solve_svg_output(capsys, tmp_path, poly_file):
    svg = tmp_path / "s.svg"
    assert run(capsys, "solve", "--polygon", poly_file, "--k", 1, "--svg", svg)[0] == 0
    assert 'class="guard"' in svg.read_text()


def test_views_command(capsys, tmp_path, poly_file, square):
    code, out, _ = run(capsys, "views", "--polygon", poly_file)
    assert code == 0
    assert out == "[2,6] [2,6] nondecreasing nondecreasing\nr1 [2,6] nondecreasing nondecreasing\n"
    sq = tmp_path / "sq.txt"
    sq.write_text(format_polygon(square))
    assert run(capsys, "views", "--polygon", sq)[:2] == (0, "convex polygon: no regions to report\n")


def test_threads_flag_matches_single_process(capsys, fan_file):
    reports = []
    for threads in (1, 2):
        _, out, _ = run(capsys, "solve", "--polygon", fan_file, "--k", 1, "--threads", threads, "--report", "json")
        data = json.loads(out)
        data.pop("elapsedMs")
        reports.append(data)
    assert reports[0] == reports[1]
