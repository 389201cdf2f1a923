"""End-to-end acceptance checks.

Each test drives one numbered criterion of the built-in self-test at master
seed 0, prints its one-line summary, and fails with the recorded check
messages if anything inside went red.  A final test holds the whole batch to
the 300 second budget.
"""

from stabscope.selftest import TOTAL_TIME_LIMIT, run_criterion

_ELAPSED: dict[int, float] = {}


def _run(index: int):
    res = run_criterion(index, master_seed=0)
    _ELAPSED[index] = res.elapsed
    print(res.line())
    assert res.passed, "\n".join(res.failures)
    return res


def test_criterion_01_ghz_stabilizer_dimension():
    _run(1)


def test_criterion_02_four_qubit_family_stabilizer():
    _run(2)


def test_criterion_03_projection_consistency():
    _run(3)


def test_criterion_04_diagonal_commutator_weights():
    _run(4)


def test_criterion_05_unentangled_qubit_detection():
    _run(5)


def test_criterion_06_ghz_roundtrip():
    _run(6)


def test_criterion_07_four_qubit_recovery():
    _run(7)


def test_criterion_08_invariant_drift():
    _run(8)


def test_criterion_09_singlet_pair_dimension():
    _run(9)


def test_criterion_10_negative_controls():
    _run(10)


def test_criterion_11_conjugate_pair_separation():
    _run(11)


def test_total_runtime_within_budget():
    assert sorted(_ELAPSED) == list(range(1, 12)), "not all criteria ran"
    total = sum(_ELAPSED.values())
    print(f"acceptance total {total:.1f}s (budget {TOTAL_TIME_LIMIT:.0f}s)")
    assert total < TOTAL_TIME_LIMIT
