import csv
import io
import json
import subprocess
import sys

import pytest

from diffsquares.bounds import BoundReport
from diffsquares.cli import EXIT_DOMAIN, EXIT_INEXACT, EXIT_USAGE, TABLE_COLUMNS, main
from diffsquares.constructions import ConstructionOutput
from diffsquares.density import DensityReport
from diffsquares.residues import is_avoiding
from diffsquares.search import SearchResult


def run(capsys, *argv):
    rc = main(list(argv))
    out, err = capsys.readouterr()
    return rc, out, err


def test_search_json(capsys, tmp_path):
    rc, out, _ = run(capsys, "search", "--m", "65", "--budget-nodes", "10000000", "--json",
                     "--cache-dir", str(tmp_path))
    assert rc == 0
    d = json.loads(out)
    assert d["schema"] == 1
    r = SearchResult.from_json(d["result"])
    assert r.best_size >= 7 and is_avoiding(r.witness, 65)


def test_search_require_exact(capsys, tmp_path):
    rc, out, _ = run(capsys, "search", "--m", "493", "--budget-nodes", "1000", "--require-exact",
                     "--cache-dir", str(tmp_path))
    assert rc == EXIT_INEXACT
    rc, _, _ = run(capsys, "search", "--m", "13", "--require-exact", "--cache-dir", str(tmp_path))
    assert rc == 0


def test_construct_two_prime(capsys):
    rc, out, _ = run(capsys, "construct", "--method", "two-prime", "--q1", "11", "--q2", "7", "--json")
    assert rc == 0
    c = ConstructionOutput.from_json(json.loads(out)["construction"])
    assert c.m == 77 and len(c.set) >= 3 and is_avoiding(c.set, 77)


@pytest.mark.parametrize("argv", [
    ("construct", "--method", "cohen", "--p", "13"),
    ("construct", "--method", "p-square", "--p", "5"),
    ("construct", "--method", "ruzsa65"),
    ("construct", "--method", "product", "--m", "1105"),
    ("construct", "--method", "best", "--m", "169"),
])
def test_construct_methods(capsys, argv):
    rc, out, _ = run(capsys, *argv, "--json")
    assert rc == 0
    c = ConstructionOutput.from_json(json.loads(out)["construction"])
    assert is_avoiding(c.set, c.m)


def test_bounds(capsys):
    rc, out, _ = run(capsys, "bounds", "--m", "7", "--json")
    assert rc == 0
    reps = [BoundReport.from_json(r) for r in json.loads(out)["reports"]]
    assert reps[0].best == 1
    rc, out, _ = run(capsys, "bounds", "--m", "7")
    assert rc == 0 and "best" in out


def test_table(capsys, tmp_path):
    rc, out, _ = run(capsys, "table", "--lo", "3", "--hi", "20", "--cache-dir", str(tmp_path), "--threads", "1")
    assert rc == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert tuple(rows[0]) == TABLE_COLUMNS and len(rows) == 19
    by_m = {int(r[0]): dict(zip(TABLE_COLUMNS, r)) for r in rows[1:]}
    assert by_m[7]["best_size"] == "1"
    rc, out, _ = run(capsys, "table", "--lo", "9", "--hi", "9", "--cache-dir", str(tmp_path))
    assert list(csv.reader(io.StringIO(out)))[1][TABLE_COLUMNS.index("best_size")] == "3"
    rc, out, _ = run(capsys, "table", "--lo", "20", "--hi", "3", "--cache-dir", str(tmp_path))
    assert rc == 0 and out.strip().splitlines() == [",".join(TABLE_COLUMNS)]


def test_warm_cache_byte_identical(capsys, tmp_path):
    argv = ("scan", "--lo", "30", "--hi", "90", "--cache-dir", str(tmp_path), "--threads", "1")
    rc1, out1, _ = run(capsys, *argv)
    rc2, out2, _ = run(capsys, *argv)
    rc3, out3, _ = run(capsys, *argv, "--format", "json")
    rc4, out4, _ = run(capsys, *argv, "--format", "json")
    assert rc1 == rc2 == rc3 == rc4 == 0
    assert out1 == out2 and out3 == out4
    t1 = run(capsys, "table", "--lo", "30", "--hi", "90", "--cache-dir", str(tmp_path))[1]
    t2 = run(capsys, "table", "--lo", "30", "--hi", "90", "--cache-dir", str(tmp_path))[1]
    assert t1 == t2


def test_scan_json_roundtrip(capsys, tmp_path):
    rc, out, _ = run(capsys, "scan", "--lo", "3", "--hi", "30", "--filter", "prime", "--json",
                     "--cache-dir", str(tmp_path))
    d = json.loads(out)
    rs = [SearchResult.from_json(r) for r in d["results"]]
    assert [r.m for r in rs] == [3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert [r.to_json() for r in rs] == d["results"]


def test_density_and_tv(capsys):
    rc, out, _ = run(capsys, "density", "--x", "10000", "--eps", "0.6", "--eps", "0.4", "--json", "--threads", "1")
    assert rc == 0
    reps = [DensityReport.from_json(r) for r in json.loads(out)["reports"]]
    assert [r.fail_iii for r in reps] == [7803, 6356]
    rc, out, _ = run(capsys, "density", "--x", "10000", "--eps", "0.6", "--format", "csv")
    assert rc == 0 and out.startswith("x,eps")
    rc, out, _ = run(capsys, "density", "--x", "10000", "--eps", "0.6", "--strict")
    assert rc == EXIT_DOMAIN
    rc, out, _ = run(capsys, "tv", "--x", "300000", "--primes", "3", "--json")
    assert rc == 0 and 0 < json.loads(out)["tv"] < 1
    rc, out, _ = run(capsys, "tv", "--x", "100000", "--interval", "100:400", "--interval", "400:900")
    assert rc == 0 and "tv=" in out


def test_domain_errors(capsys):
    assert run(capsys, "search", "--m", "200000")[0] == EXIT_DOMAIN
    assert run(capsys, "tv", "--x", "10", "--primes", "11")[0] == EXIT_DOMAIN
    assert run(capsys, "construct", "--method", "cohen", "--p", "7")[0] == EXIT_DOMAIN
    assert run(capsys, "density", "--x", "10", "--eps", "0.5")[0] == EXIT_DOMAIN


@pytest.mark.parametrize("argv", [
    (),
    ("frobnicate",),
    ("search",),
    ("search", "--m", "-3"),
    ("search", "--m", "x"),
    ("construct", "--method", "cohen"),
    ("tv", "--x", "100"),
    ("tv", "--x", "100", "--interval", "oops"),
    ("bounds", "--m", "7", "--format", "yaml"),
])
def test_usage_errors(capsys, argv):
    try:
        rc = main(list(argv))
    except SystemExit as e:
        rc = e.code
    _, err = capsys.readouterr()
    assert rc == EXIT_USAGE and "usage" in err


def test_module_entry_point(tmp_path):
    p = subprocess.run([sys.executable, "-m", "diffsquares", "bounds", "--m", "7", "--json"],
                       capture_output=True, text=True)
    assert p.returncode == 0 and json.loads(p.stdout)["schema"] == 1
    p = subprocess.run([sys.executable, "-m", "diffsquares", "search", "--bogus"], capture_output=True, text=True)
    assert p.returncode == EXIT_USAGE
