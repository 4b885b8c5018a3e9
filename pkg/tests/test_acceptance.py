"""Acceptance criteria AC1-AC11.

Each test prints one ``ACn PASS|FAIL`` line; the lines are also repeated in
the pytest terminal summary. Run directly for just the table:

    python3 tests/test_acceptance.py
"""

import sys

import pytest

from maslovkit import acceptance as A

RESULTS = {}


def test_pinned_tolerances():
    assert A.AC1_RUNTIME_LIMIT == 10.0
    assert A.AC7_MAX_AT_64 == 0.1
    assert A.AC7_MIN_RATIO == 1.8
    assert A.AC8_TOL == {256: 0.05, 1024: 0.01}
    assert A.AC8_RUNTIME_LIMIT == 30.0
    assert A.WINDING_SIGN in (-1, 1)


def _line(res) -> str:
    return f"{res['id']:<5} {'PASS' if res['passed'] else 'FAIL'}  {res['title']}"


@pytest.mark.parametrize("cid", range(1, 12), ids=lambda c: f"AC{c}")
def test_criterion(cid):
    res = A.run_criterion(cid, seed=0)
    RESULTS[res["id"]] = res
    print(_line(res))
    assert res["passed"], res["details"]


def test_ac2_exact_values():
    d = RESULTS.get("AC2") or A.criterion_2()
    assert d["details"]["rotating_line"] == {str(k): k for k in range(-3, 4)}
    assert d["details"]["circle"] == 2


def test_ac6_flipped_sign_fails():
    d = RESULTS.get("AC6") or A.criterion_6()
    assert d["details"]["flipped_sign_passes"] is False


if __name__ == "__main__":
    ok = True
    for cid in range(1, 12):
        res = A.run_criterion(cid)
        print(_line(res), flush=True)
        ok &= res["passed"]
    sys.exit(0 if ok else 1)
