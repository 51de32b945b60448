"""The nine acceptance criteria, each at exact tolerance.

Run with ``pytest -s tests/test_acceptance.py`` to see one PASS/FAIL line
per criterion.
"""
import pytest

from chromalg import acceptance

CRITERIA = [
    acceptance.fgl_axioms,
    acceptance.p_series,
    acceptance.v_round_trip,
    acceptance.relation_derivation,
    acceptance.hopf_quotient,
    acceptance.idempotent_suite,
    acceptance.splitting,
    acceptance.delooping,
    acceptance.loop_heights,
]


@pytest.mark.parametrize("check", CRITERIA, ids=[f"criterion_{i + 1}" for i in range(len(CRITERIA))])
def test_criterion(check):
    result = check()
    print(result.line())
    failed = [d for d in result.details if not d["ok"]]
    assert result.ok, failed
