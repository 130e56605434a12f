"""Smoke test for the fockzeta_py extension.

Build first:
    cargo build --release -p fockzeta-py --features extension-module
then run:
    python3 python/smoke_test.py
"""

import importlib.machinery
import importlib.util
import json
import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    try:
        import fockzeta_py

        return fockzeta_py
    except ImportError:
        pass
    for profile in ("release", "debug"):
        lib = ROOT / "target" / profile / "libfockzeta_py.so"
        if lib.exists():
            loader = importlib.machinery.ExtensionFileLoader("fockzeta_py", str(lib))
            spec = importlib.util.spec_from_file_location("fockzeta_py", str(lib), loader=loader)
            module = importlib.util.module_from_spec(spec)
            loader.exec_module(module)
            return module
    sys.exit("fockzeta_py not found; build it with cargo first")


def main():
    fz = load()
    assert fz.bernoulli(2) == "1/6"
    assert fz.zeta_neg(2) == "-1/12"
    assert fz.graded_dim(30) == 5604
    assert fz.central_term(0, 0, 2) == "2/3"

    h1 = [([1], "1")]
    assert fz.vertex_mode(h1, 1, h1) == [([], "1")]
    omega = [([1, 1], "1/2")]
    assert fz.vertex_mode(omega, 1, [([2, 1], "1")]) == [([2, 1], "3")]

    try:
        fz.zeta_neg(1)
    except ValueError:
        pass
    else:
        raise AssertionError("zeta_neg(1) should raise")

    assert "RES-CHANGE" in fz.catalog()
    reports = [json.loads(line) for line in fz.verify("core", weight_cap=4, mode_range=2)]
    assert [r["check-id"] for r in reports] == ["HEISENBERG", "VIRASORO", "MODVIR", "GRADED-DIM"]
    assert all(r["status"] == "pass" for r in reports)
    assert list(reports[0]) == [
        "check-id", "params", "status", "compared", "mismatch-count",
        "mismatches", "details", "error", "elapsed-ms",
    ]
    print("python smoke test passed")


if __name__ == "__main__":
    main()
