import itertools
import json
import math
import shutil
import subprocess
import sys

import pytest

from xorsmc.cli import EXIT_ERROR, EXIT_FALSE, EXIT_INFEASIBLE, EXIT_TRUE, main
from xorsmc.formula import CnfFormula
from xorsmc.smc.params import majority

SAT_BIN = shutil.which("xorsmc-sat")

VACUOUS = {"n": 1, "k": 1, "phi": {"cnf": [["-b0"]]},
           "terms": [{"y_size": 1, "q": 1, "f": {"const": False}}]}
PHI_UNSAT = {"n": 1, "k": 1, "phi": {"cnf": [["x0"], ["-x0"]]},
             "terms": [{"y_size": 1, "q": 0, "f": {"const": True}}]}
MIXED = {"n": 2, "k": 2, "phi": {"cnf": [["b0"], ["b1", "x1"]]},
         "terms": [{"y_size": 3, "q": 1, "f": {"cnf": [["x0", "y0"], ["y1", "-y2"]]}},
                   {"y_size": 2, "q": 2, "f": {"cnf": [["y0", "y1"]]}}]}
TRIANGLE = "residential a\nbudget 1\na b\nb c\na c\n"


def write(tmp_path, name, body):
    p = tmp_path / name
    p.write_text(body if isinstance(body, str) else json.dumps(body))
    return str(p)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


# -- check ---------------------------------------------------------------------------

def test_vacuous_instance_is_true(tmp_path, capsys):
    code, out, _ = run(capsys, "check", write(tmp_path, "v.json", VACUOUS))
    assert code == EXIT_TRUE and out.splitlines()[0] == "TRUE"
    assert "witness.b: 0" in out


def test_phi_unsat_is_false(tmp_path, capsys):
    code, out, _ = run(capsys, "check", write(tmp_path, "u.json", PHI_UNSAT), "--json")
    assert code == EXIT_FALSE
    rep = json.loads(out)
    assert rep["result"] == "FALSE" and "witness" not in rep


def test_seeded_reports_identical(tmp_path, capsys):
    path = write(tmp_path, "m.json", MIXED)
    first = run(capsys, "check", path, "--seed", 7, "--json")
    second = run(capsys, "check", path, "--seed", 7, "--json")
    assert first == second
    assert json.loads(first[1])["params"]["seed"] == 7


def test_verify_flag(tmp_path, capsys):
    code, out, _ = run(capsys, "check", write(tmp_path, "m.json", MIXED), "--verify", "--json")
    rep = json.loads(out)
    assert code == EXIT_TRUE and "verify" in rep


def test_parse_error_reports_location(tmp_path, capsys):
    bad = dict(MIXED, terms=[{"y_size": 3, "q": 1, "f": {"cnf": "nope"}}, MIXED["terms"][1]])
    code, _, err = run(capsys, "check", write(tmp_path, "bad.json", bad))
    assert code == EXIT_ERROR and "terms[0]" in err


def test_missing_file_is_an_error(capsys):
    code, _, err = run(capsys, "check", "/nonexistent/inst.json")
    assert code == EXIT_ERROR and err.startswith("error:")


def test_emit_cnf_matches_report(tmp_path, capsys):
    cnf_path = tmp_path / "out.cnf"
    code, out, _ = run(capsys, "check", write(tmp_path, "m.json", MIXED), "--seed", 3, "--json",
                       "--emit-cnf", cnf_path)
    rep = json.loads(out)
    f = CnfFormula.from_dimacs(cnf_path.read_text())
    assert (f.num_vars, len(f.clauses)) == (rep["oracle"]["vars"], rep["oracle"]["clauses"])


@pytest.mark.skipif(SAT_BIN is None, reason="xorsmc-sat not on PATH")
@pytest.mark.parametrize("inst", [VACUOUS, PHI_UNSAT, MIXED])
def test_emitted_cnf_resolves_to_same_status(tmp_path, capsys, inst):
    cnf_path = tmp_path / "out.cnf"
    code, _, _ = run(capsys, "check", write(tmp_path, "i.json", inst), "--seed", 11,
                     "--emit-cnf", cnf_path)
    ext = subprocess.run([SAT_BIN, str(cnf_path)], capture_output=True, text=True)
    assert ext.returncode == code


# -- count ---------------------------------------------------------------------------

def test_count_unsat_votes_all_false(tmp_path, capsys):
    path = write(tmp_path, "u.cnf", "p cnf 2 2\n1 0\n-1 0\n")
    code, out, _ = run(capsys, "count", path, "--q", 0, "--json")
    rep = json.loads(out)
    assert code == EXIT_FALSE and rep["votes"] == [0] * 5 and not rep["verdict"]


def test_count_q_above_vars_rejected(tmp_path, capsys):
    path = write(tmp_path, "t.cnf", "p cnf 4 0\n")
    code, _, err = run(capsys, "count", path, "--q", 5)
    assert code == EXIT_ERROR and "q=5" in err


def survival_probability(n):
    """P(n random parities over n vars keep a point of {0,1}^n), from GF(2) ranks."""
    total = 0.0
    for rows in itertools.product(range(1 << n), repeat=n):
        basis = []
        for r in rows:
            for b in basis:
                r = min(r, r ^ b)
            if r:
                basis.append(r)
        total += 2.0 ** (len(basis) - n)
    return total / (1 << (n * n))


def test_tautology_majority_rate(tmp_path, capsys):
    path = write(tmp_path, "t.cnf", "p cnf 4 0\n")
    p = survival_probability(4)
    R = 5
    p_major = sum(math.comb(R, j) * p**j * (1 - p) ** (R - j) for j in range(majority(R), R + 1))
    N = 120
    hits = 0
    for s in range(N):
        code, _, _ = run(capsys, "count", path, "--q", 4, "--seed", s, "--repeats", R)
        hits += code == EXIT_TRUE
    sd = math.sqrt(p_major * (1 - p_major) / N)
    assert abs(hits / N - p_major) < 3 * sd


def test_survival_probability_oracle():
    # one parity over one var: a=1 always keeps a point, a=0 keeps all or nothing
    assert survival_probability(1) == pytest.approx(0.75)
    # closed form: sum over ranks of the GF(2) matrix-count formula times 2^(r-n)
    assert survival_probability(4) == pytest.approx(654811 / 1048576, rel=1e-12)


# -- shelter / supply ----------------------------------------------------------------

def test_triangle_shelter_report(tmp_path, capsys):
    code, out, _ = run(capsys, "shelter", write(tmp_path, "g.txt", TRIANGLE), "--seed", 0, "--json")
    rep = json.loads(out)
    assert code == EXIT_TRUE
    assert rep["shelters"] == ["c"] and rep["paths"] == 2


def test_shelter_text_report_and_emit(tmp_path, capsys):
    cnf_path = tmp_path / "s.cnf"
    code, out, _ = run(capsys, "shelter", write(tmp_path, "g.txt", TRIANGLE), "--baseline",
                       "--emit-cnf", cnf_path)
    lines = dict(l.split(": ", 1) for l in out.splitlines()[1:])
    assert out.startswith("FOUND") and lines["paths"] == "2"
    f = CnfFormula.from_dimacs(cnf_path.read_text())
    assert (str(f.num_vars), str(len(f.clauses))) == (lines["oracle.vars"], lines["oracle.clauses"])
    assert "baseline.paths" in lines


def zero_budget_network(budget):
    return {"nodes": [{"id": "s", "produces": "raw"},
                      {"id": "m", "tier": 1, "budget": budget, "demands": "raw"}],
            "edges": [{"from": "s", "to": "m", "cost": 2, "capacity": 5}]}


def test_zero_budget_supply_is_infeasible(tmp_path, capsys):
    code, out, _ = run(capsys, "supply", write(tmp_path, "n.json", zero_budget_network(0)))
    assert code == EXIT_INFEASIBLE and out.startswith("INFEASIBLE")


def test_supply_report(tmp_path, capsys):
    code, out, _ = run(capsys, "supply", write(tmp_path, "n.json", zero_budget_network(2)),
                       "--json", "--baseline")
    rep = json.loads(out)
    assert code == EXIT_TRUE and rep["plan"] == ["s->m"] and rep["expectation"] == 5
    assert set(rep["terms"]) == {"m:raw"}


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["count"])
    assert exc.value.code == 2


def test_console_entry_point(tmp_path):
    path = write(tmp_path, "v.json", VACUOUS)
    proc = subprocess.run([sys.executable, "-m", "xorsmc.cli", "check", path],
                          capture_output=True, text=True)
    assert proc.returncode == EXIT_TRUE and proc.stdout.startswith("TRUE")
