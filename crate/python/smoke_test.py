"""Smoke test for the pypacksat extension.

Build first:  cargo build --release -p packsat-py
Then run:     python3 python/smoke_test.py
"""

import importlib.util
import pathlib
import shutil
import sys
import sysconfig
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    for profile in ("release", "debug"):
        lib = ROOT / "target" / profile / "libpypacksat.so"
        if lib.exists():
            break
    else:
        sys.exit("libpypacksat.so not found; run: cargo build --release -p packsat-py")
    tmp = pathlib.Path(tempfile.mkdtemp())
    target = tmp / ("pypacksat" + sysconfig.get_config_var("EXT_SUFFIX"))
    shutil.copy(lib, target)
    spec = importlib.util.spec_from_file_location("pypacksat", target)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    return mod


def main():
    ps = load()

    e = ps.encode(6, 11, 6, variant="direct")
    assert (e.num_vars, e.num_clauses) == (935, 21086), e
    e = ps.encode(6, 11, 6, alod=True, symmetry=True)
    assert (e.num_vars, e.num_clauses) == (1039, 7833), e
    assert e.to_dimacs().startswith("p cnf 1039 7833")

    assert ps.amod_count(4, 4) == 454
    assert ps.count_cubes(6, 7, 9) == 5217031

    r = ps.encode(3, 6, 3).solve()
    assert r.status == "UNSAT", r
    r = ps.encode(3, 7, 3).solve(seed=1)
    assert r.status == "SAT", r
    col = r.coloring
    assert col.is_valid() and col.violation() is None
    assert col.color(0, 0) == 3
    again = ps.Coloring.from_text(col.to_text())
    assert again.cells() == col.cells()

    bad = ps.Coloring(1, [(0, 0, 1), (1, 0, 1), (-1, 0, 2), (0, 1, 3), (0, -1, 4)])
    assert not bad.is_valid()

    enc = ps.encode(5, 10, 5)
    cubes = enc.cubes(2, 2, 3)
    assert len(cubes) == 16
    assert ps.check_tautology(cubes)
    assert not ps.check_tautology(cubes[1:])

    assert ps.check_drat("p cnf 1 2\n1 0\n-1 0\n", "0\n")
    assert not ps.check_drat("p cnf 2 1\n1 2 0\n", "0\n")

    out = ps.run_pipeline(3, 6, 3, prior=6)
    assert out["status"] == "UNSAT" and out["refuted"], out
    assert out["conclusion"] == "chi_rho(Z^2) >= 7"

    try:
        ps.encode(3, 6, 9)
    except ValueError:
        pass
    else:
        raise AssertionError("bad center accepted")

    print("pypacksat smoke test: ok")


if __name__ == "__main__":
    main()
