"""Unit tests for the range verifiers."""

import pytest

from collatz_lab.core_map import ResidueClass, pred_even, pred_odd, residue_class, step
from collatz_lab.facts import (
    RangeReport,
    verify_predecessor_structure,
    verify_reduction,
    verify_transitions,
)


class TestPredecessorStructure:
    def test_clean_range(self):
        report = verify_predecessor_structure(1, 2 * 10**4)
        assert report.ok
        assert report.checked == 2 * 10**4
        assert report.violations == []

    def test_odd_predecessor_class_pairing_at_5(self):
        # 5 in C2: odd predecessor 3 lies in C0 because (5-2)/3 = 1 lies in C1
        assert residue_class(5) is ResidueClass.C2
        assert pred_odd(5) == 3
        assert residue_class(3) is ResidueClass.C0
        assert residue_class((5 - 2) // 3) is ResidueClass.C1
        assert verify_predecessor_structure(5, 5).ok

    def test_odd_predecessor_class_pairing_at_17(self):
        # both the odd predecessor and the probe (x-2)/3 are in C2
        assert pred_odd(17) == 11
        assert residue_class(11) is ResidueClass.C2
        assert residue_class((17 - 2) // 3) is ResidueClass.C2
        assert verify_predecessor_structure(17, 17).ok

    def test_probe_of_zero_at_x_equals_2(self):
        # (2-2)/3 = 0 counts as a multiple of 3, scheduling the odd
        # predecessor 1 into C1
        assert pred_odd(2) == 1
        assert residue_class(1) is ResidueClass.C1
        assert verify_predecessor_structure(2, 2).ok

    def test_range_guard(self):
        with pytest.raises(ValueError):
            verify_predecessor_structure(0, 10)
        with pytest.raises(ValueError):
            verify_predecessor_structure(10, 5)


class TestTransitions:
    def test_clean_range(self):
        report = verify_transitions(1, 2 * 10**4)
        assert report.ok
        assert report.checked == 2 * 10**4

    @pytest.mark.parametrize(
        "x, target_class",
        [
            (6, ResidueClass.C0),   # 6/3 = 2 even
            (3, ResidueClass.C2),   # 3/3 = 1 odd
            (8, ResidueClass.C1),   # 8 in C2, even
            (5, ResidueClass.C2),   # 5 in C2, odd
            (7, ResidueClass.C2),   # 7 in C1
        ],
    )
    def test_spot_transitions(self, x, target_class):
        assert residue_class(step(x)[0]) is target_class
        assert verify_transitions(x, x).ok


class TestReduction:
    def test_clean_range_with_correspondence(self):
        report = verify_reduction(2, 10**4)
        assert report.ok
        assert report.inconclusive == []
        assert report.checked == 10**4 - 1

    def test_elimination_hooks_at_4_and_13(self):
        # contracting a C1 vertex rewires its C2 predecessor to its C2 successor
        assert pred_even(4) == 8 and step(4)[0] == 2
        assert pred_even(13) == 26 and step(13)[0] == 20
        assert verify_reduction(4, 4).ok
        assert verify_reduction(13, 13).ok

    def test_budget_limited_check_is_inconclusive_not_violation(self):
        report = verify_reduction(26, 26, budget=2)
        assert report.violations == []
        assert [x for x, _ in report.inconclusive] == [26]

    def test_hooks_only_mode_skips_correspondence(self):
        report = verify_reduction(26, 26, budget=2, include_correspondence=False)
        assert report.ok
        assert report.inconclusive == []

    def test_range_guard(self):
        with pytest.raises(ValueError):
            verify_reduction(0, 10)


class TestReportShape:
    def test_deterministic_modulo_timing(self):
        a = verify_transitions(1, 5000)
        b = verify_transitions(1, 5000)
        assert (a.fact_id, a.lo, a.hi, a.checked, a.violations, a.inconclusive) == (
            b.fact_id,
            b.lo,
            b.hi,
            b.checked,
            b.violations,
            b.inconclusive,
        )

    def test_json_document(self):
        doc = verify_transitions(1, 100).to_json_dict()
        assert doc["schema_version"] == 1
        assert doc["fact_id"] == "class-transitions"
        assert doc["range"] == [1, 100]
        assert doc["checked"] == 100
        assert doc["violations"] == []
        assert doc["inconclusive"] == []
        assert doc["elapsed"] >= 0

    def test_ok_property(self):
        report = RangeReport(fact_id="demo", lo=1, hi=1, checked=1)
        assert report.ok
        report.violations.append((1, "witness"))
        assert not report.ok
