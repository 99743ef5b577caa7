"""End-to-end acceptance checks; each prints one PASS/FAIL line."""

import json
import random
import subprocess
import sys
import time

import pytest

import conftest
from corpus import MANIFEST, corpus, small_discrete
from gallery.csp import check_monotone, clause_bound, encode, is_monotone, solve_2sat, solve_csp
from gallery.geom import format_polygon, validate_polygon
from gallery.karp import EarlyNo, middle_tables
from gallery.oracle import brute_force, load_manifest
from gallery.regions import NotMonotone, build_workspace, check_contiguity, classify_view
from gallery.structured import Variant, certify, guess_bound, make_problem, solve
from test_csp import exhaustive_2sat, exhaustive_csp, random_2sat, random_csp

# pinned limits
CORPUS_MIN = 200
K_VALUES = range(0, 5)
VV_SECONDS = 600
SCALING_SECONDS = 300
RANDOM_INSTANCES = 500
CLAUSE_CONSTANT = 3

# 50 vertices, 3 reflex: a parabolic floor under a zigzag roof
SCALING_POLYGON = [(i, (i - 21) ** 2) for i in range(43)] + [
    (42, 600), (36, 350), (29, 600), (22, 350), (15, 600), (8, 350), (0, 600)
]


def record(number, title, ok, detail):
    line = f"criterion {number} {'PASS' if ok else 'FAIL'}: {title} ({detail})"
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


@pytest.fixture(scope="module")
def manifest():
    return {(c.seed, c.k, c.variant): c.expected for c in load_manifest(MANIFEST)}


class BuildAudit:
    """Collects every CSP instance the solver builds and checks its shape."""

    def __init__(self):
        self.builds = 0
        self.problems = []
        self.k = 0

    def __call__(self, guess, inst, sat):
        self.builds += 1
        for c in inst.constraints:
            table = getattr(c, "table", None)
            if table is not None and (check_monotone(table) is None or not is_monotone(table, c.direction)):
                self.problems.append(f"non-monotone table {table}")
        if inst.nvars > self.k:
            self.problems.append(f"{inst.nvars} variables for k={self.k}")
        ncl = len(encode(inst).clauses)
        limit = CLAUSE_CONSTANT * (inst.nvars + len(inst.constraints)) * (inst.N + 1)
        if ncl > clause_bound(inst) or ncl > limit:
            self.problems.append(f"{ncl} clauses over the size formula")


@pytest.fixture(scope="module")
def vv_run():
    audit = BuildAudit()
    rows = []
    start = time.perf_counter()
    for e in corpus():
        for k in K_VALUES:
            audit.k = k
            res = solve(e.polygon, k, on_build=audit)
            rows.append((e, k, res))
    return rows, time.perf_counter() - start, audit


def test_criterion_1_vertex_vertex_matches_oracle(vv_run, manifest):
    rows, elapsed, _ = vv_run
    polys = corpus()
    bad = []
    for e, k, res in rows:
        live = brute_force(e.polygon, k).answer
        if res.answer != live or manifest[e.seed, k, Variant.VV] != live:
            bad.append((e.seed, k))
    shape_ok = len(polys) >= CORPUS_MIN and all(p.n <= 12 and p.polygon.r <= 4 for p in polys)
    ok = shape_ok and not bad and elapsed <= VV_SECONDS
    record(1, "vertex-vertex vs brute force", ok,
           f"{len(polys)} polygons x k=0..4, {len(bad)} disagreements, {elapsed:.1f}s <= {VV_SECONDS}s")
    assert ok, bad[:10]


def test_criterion_2_boundary_variants_match_oracle(manifest):
    entries = small_discrete()
    bad = []
    checked = 0
    for e in entries:
        for variant in (Variant.BV, Variant.VB):
            problem = make_problem(e.polygon, variant)
            assert problem.polygon.n <= 24
            for k in K_VALUES:
                live = brute_force(e.polygon, k, variant).answer
                got = solve(e.polygon, k, variant).answer
                checked += 1
                if got != live or manifest[e.seed, k, variant] != live:
                    bad.append((e.seed, k, variant.value))
    ok = not bad and checked > 0
    record(2, "boundary-vertex and vertex-boundary vs brute force", ok,
           f"{len(entries)} polygons, {checked} cases, {len(bad)} disagreements")
    assert ok, bad[:10]


def test_criterion_3_csp_matches_enumeration():
    rng = random.Random(20240601)
    mismatches = unsound = 0
    for _ in range(RANDOM_INSTANCES):
        inst = random_csp(rng, max_vars=4, max_N=8)
        got = solve_csp(inst)
        if (got is not None) != exhaustive_csp(inst):
            mismatches += 1
        if got is not None and not inst.satisfied_by(got):
            unsound += 1
    ok = mismatches == 0 and unsound == 0
    record(3, "monotone 2-CSP vs exhaustive enumeration", ok,
           f"{RANDOM_INSTANCES} instances, {mismatches} mismatches, {unsound} bad assignments")
    assert ok


def test_criterion_4_2sat_matches_enumeration():
    rng = random.Random(777)
    mismatches = 0
    for _ in range(RANDOM_INSTANCES):
        ts = random_2sat(rng, max_vars=12)
        model = solve_2sat(ts)
        if (model is not None) != exhaustive_2sat(ts):
            mismatches += 1
        elif model is not None and not all(any(model[l // 2] != bool(l & 1) for l in cl) for cl in ts.clauses):
            mismatches += 1
    ok = mismatches == 0
    record(4, "2-SAT vs exhaustive enumeration", ok, f"{RANDOM_INSTANCES} instances, {mismatches} mismatches")
    assert ok


def test_criterion_5_structural_properties():
    failures = []
    for e in corpus():
        if not e.polygon.reflex:
            continue
        try:
            ws = build_workspace(e.polygon)
            if not check_contiguity(ws.views, ws.vis):
                failures.append((e.seed, "contiguity"))
            for C in ws.decomposition.regions:
                for src in ws.decomposition.elements:
                    classify_view(ws.views, src, C)
        except NotMonotone:
            failures.append((e.seed, "orientation"))
    ok = not failures
    record(5, "view contiguity and monotone orientation", ok,
           f"{len(corpus())} polygons, {len(failures)} failures")
    assert ok, failures


def test_criterion_6_reduction_internals(vv_run):
    _, _, audit = vv_run
    tables = 0
    bad = list(audit.problems)
    for e in corpus():
        if not e.polygon.reflex:
            continue
        ws = build_workspace(e.polygon)
        elems = ws.decomposition.elements
        for C in ws.decomposition.regions:
            for prev in elems:
                for cur in elems:
                    try:
                        mt = middle_tables(ws, C, prev, cur)
                    except EarlyNo:
                        continue
                    for t, d in ((mt.first_table, mt.first_dir), (mt.last_table, mt.last_dir)):
                        tables += 1
                        if not is_monotone(t, d):
                            bad.append(f"seed {e.seed}: {t}")
    ok = not bad and audit.builds > 0
    record(6, "monotone tables and instance size", ok,
           f"{audit.builds} built instances, {tables} middle tables, {len(bad)} violations")
    assert ok, bad[:10]


def test_criterion_7_reflex_vertices_guard():
    bad = []
    checked = 0
    for e in corpus():
        P = e.polygon
        if not P.reflex:
            continue
        checked += 1
        problem = make_problem(P, "vv")
        if not certify(problem, sorted(P.reflex)):
            bad.append((e.seed, "certify"))
        res = solve(P, P.r)
        if res.route != "reflex" or res.answer != brute_force(P, P.r).answer:
            bad.append((e.seed, "k=r"))
    ok = not bad and checked > 0
    record(7, "reflex vertex set guards the polygon", ok, f"{checked} polygons, {len(bad)} failures")
    assert ok, bad


def test_criterion_8_scaling():
    P = validate_polygon(SCALING_POLYGON)
    assert (P.n, P.r) == (50, 3)
    details = []
    ok = True
    for k in (1, 2):
        start = time.perf_counter()
        res = solve(P, k)
        elapsed = time.perf_counter() - start
        bound = guess_bound(P.r, k)
        ok &= elapsed <= SCALING_SECONDS and res.guesses_tried <= bound
        if res.answer:
            ok &= certify(res.problem, res.solution.guards)
        details.append(f"k={k} {'yes' if res.answer else 'no'} {elapsed:.2f}s tried {res.guesses_tried}")
    ok &= solve(P, 2).answer == brute_force(P, 2, max_candidates=50).answer
    record(8, "n=50 r=3 scaling", ok, "; ".join(details) + f"; limit {SCALING_SECONDS}s")
    assert ok


def _cli(*argv):
    out = subprocess.run([sys.executable, "-m", "gallery.cli", *map(str, argv)],
                         capture_output=True, text=True, check=False)
    return out.returncode, out.stdout


def test_criterion_9_determinism(tmp_path):
    P = validate_polygon(SCALING_POLYGON)
    poly = tmp_path / "p.txt"
    poly.write_text(format_polygon(P))
    corpus_poly = tmp_path / "c.txt"
    multi = next(e.polygon for e in corpus() if e.polygon.r >= 3)
    corpus_poly.write_text(format_polygon(multi))
    runs = [
        ("solve", "--polygon", poly, "--k", 2, "--threads", 2, "--report", "json"),
        ("solve", "--polygon", corpus_poly, "--min-k", "--threads", 2, "--report", "json"),
        ("solve", "--polygon", corpus_poly, "--k", 1, "--variant", "bv", "--threads", 2, "--report", "json"),
    ]
    diffs = 0
    for argv in runs:
        outs = []
        for _ in range(2):
            code, out = _cli(*argv)
            data = json.loads(out)
            data.pop("elapsedMs")
            outs.append((code, data))
        diffs += outs[0] != outs[1]
    files = []
    for i in range(2):
        gen, svg = tmp_path / f"g{i}.txt", tmp_path / f"v{i}.svg"
        _cli("gen", "--n", 11, "--seed", 5, "--reflex", 3, "--out", gen)
        _cli("viz", "--polygon", poly, "--guards", "1,2", "--out", svg)
        files.append((gen.read_bytes(), svg.read_bytes()))
    diffs += files[0] != files[1]
    ok = diffs == 0
    record(9, "repeated runs agree", ok, f"{len(runs)} solve commands with --threads 2 plus gen and viz, {diffs} differences")
    assert ok
