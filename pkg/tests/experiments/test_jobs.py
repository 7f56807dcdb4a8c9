# tests/experiments/test_jobs.py - Evaluator job tests
import pytest

from src.algebra.field import field_create
from src.analysis.constants import SamplePlan
from src.analysis.functions import Exponent
from src.analysis.sets import random_incidence_instance, sharp_example
from src.experiments.jobs.function_checks import (
    ExtremizeEvaluator,
    ExtremizeItem,
    LWCheckEvaluator,
    RegionScanEvaluator,
    duality_checks,
)
from src.experiments.jobs.group_checks import GroupAxiomEvaluator
from src.experiments.jobs.set_checks import ChenEvaluator, IncidenceEvaluator, SetLWEvaluator
from src.experiments.jobs.subgroup_checks import SubgroupCountEvaluator, SubgroupEnumerationEvaluator
from src.experiments.samplers import LabeledSet, SetCorpusSampler
from src.models.subset import HSubset


def _by_check(records):
    grouped = {}
    for record in records:
        grouped.setdefault(record.check, []).append(record)
    return grouped


class TestGroupJob:
    @pytest.mark.parametrize("fixture", ["h1_3", "h1_5", "h1_7", "h2_3"])
    def test_all_axioms_hold(self, fixture, request):
        """Test that every group check passes"""
        ctx = request.getfixturevalue(fixture)
        records = GroupAxiomEvaluator().evaluate(ctx)
        assert all(r.passed for r in records)
        checks = _by_check(records)
        assert checks["associativity"][0].values["mode"] == "exhaustive"
        assert len(checks["fiber_coset"]) == 2 * ctx.n
        assert checks["orbit_sizes"][0].passed

    def test_sampled_associativity(self, h1_9):
        """Test that large groups are sampled"""
        record = GroupAxiomEvaluator(samples=300)._associativity(h1_9)
        assert record.passed
        assert record.values == {"triples": 300, "mode": "sampled", "failures": 0}


class TestFunctionJobs:
    def test_region_scan(self):
        """Test that every grid point matches its closed form"""
        records = RegionScanEvaluator(step=0.25).evaluate(5)
        assert len(records) == 25
        assert all(r.passed for r in records)

    def test_lw_check(self):
        """Test the ratio corpus and duality records over H^1(F_3)"""
        plan = SamplePlan(random_tuples=20, indicator_tuples=4, seed=0)
        records = LWCheckEvaluator(plan).evaluate((1, 3))
        checks = _by_check(records)
        assert len(checks["lw_ratio_corpus"]) == 2
        assert all(r.passed for r in checks["lw_ratio_corpus"])
        assert checks["duality"][0].passed
        assert checks["mass_preservation"][0].passed
        assert all(r.passed is None for r in checks["lw_ratio_max"])

    def test_duality_checks(self, h1_5):
        """Test the duality identities on random pairs"""
        duality, mass = duality_checks(h1_5, 5, seed=2)
        assert duality.passed
        assert mass.passed

    def test_extremize(self):
        """Test every estimator record at q = 3, u = (2, 2)"""
        item = ExtremizeItem(3, Exponent.parse(2), Exponent.parse(2))
        records = ExtremizeEvaluator(restarts=2, seed=0).evaluate(item)
        checks = _by_check(records)
        assert set(checks) == {
            "exhaustive",
            "ascent",
            "family_A",
            "family_B",
            "endpoint_opnorms",
            "opnorm_lower_bound",
        }
        assert all(r.passed for r in records)

    def test_extremize_boundary_point(self):
        """Test the ceiling on the A(3/2 -> 3) bound and the exhaustive optimum at q = 3"""
        item = ExtremizeItem(3, Exponent.parse("3/2"), Exponent.parse("3/2"))
        checks = _by_check(ExtremizeEvaluator(restarts=2, seed=0).evaluate(item))
        opnorm = checks["opnorm_lower_bound"][0]
        assert opnorm.values["ceiling"] == 2.0
        assert opnorm.passed
        assert checks["exhaustive"][0].values["value"] == pytest.approx(1.0, abs=1e-12)
        assert all(r.passed for records in checks.values() for r in records)

    def test_extremize_endpoint_exponent(self):
        """Test that u = 1 skips the ascent but keeps the families"""
        item = ExtremizeItem(5, Exponent.parse(1), Exponent.parse(2))
        checks = _by_check(ExtremizeEvaluator(restarts=2, seed=0).evaluate(item))
        assert "ascent" not in checks
        assert "exhaustive" not in checks
        assert checks["family_A"][0].passed


class TestSetJobs:
    def test_flat_example(self, h1_3):
        """Test the structure and sharpness records of the flat set"""
        item = LabeledSet("flat", 0, sharp_example(h1_3, "flat"))
        checks = _by_check(SetLWEvaluator().evaluate(item))
        assert checks["projection_structure"][0].passed
        assert checks["set_lw_sharp"][0].passed

    def test_corpus(self, h2_3):
        """Test a random corpus with its summary record"""
        items = list(SetCorpusSampler([h2_3], 6, seed=0).sample())
        evaluator = SetLWEvaluator()
        records = [r for item in items for r in evaluator.evaluate(item)]
        records.extend(evaluator.finalize(records))
        assert not any(r.violated for r in records)
        assert records[-1].check == "set_lw_corpus_max"

    def test_incidence(self, h1_3, rng):
        """Test both incidence item kinds"""
        evaluator = IncidenceEvaluator()
        vinh = evaluator.evaluate(random_incidence_instance(field_create(5), rng))
        chain = evaluator.evaluate(LabeledSet("flat", 0, sharp_example(h1_3, "flat")))
        assert vinh[0].check == "vinh" and vinh[0].passed
        assert chain[0].check == "incidence_chain" and chain[0].passed

    def test_chen_flags_single_point(self, h1_3):
        """Test that the exceeded bound is flagged, not violated"""
        item = LabeledSet("point", 0, HSubset.from_points(h1_3, [h1_3.identity]))
        checks = _by_check(ChenEvaluator([1, 2]).evaluate(item))
        assert all(r.passed for r in checks["hyperplane_count"])
        assert checks["chen_bounds"][0].passed is None
        assert checks["chen_bounds"][0].values["flagged"]
        assert checks["chen_bounds"][0].values["family_size"] == 13


class TestSubgroupJobs:
    def test_enumeration(self, h1_3):
        """Test the per-subgroup and summary records of H^1(F_3)"""
        records = SubgroupEnumerationEvaluator().evaluate(h1_3)
        checks = _by_check(records)
        assert len(checks["subgroup"]) == 19
        assert all(r.passed for r in checks["subgroup"])
        summary = checks["subgroup_summary"][0]
        assert summary.passed
        assert summary.values["formula"] == 19
        assert summary.values["formula_linear"] == 18
        assert summary.values["homogeneous"] == 11

    def test_count(self):
        """Test the count record against enumeration"""
        record = SubgroupCountEvaluator().evaluate((1, 5))[0]
        assert record.passed
        assert record.values["enumerated"] == 39
        assert record.values["linear_match"] is False

    def test_count_formula_only(self):
        """Test that large groups report formulas without enumerating"""
        record = SubgroupCountEvaluator().evaluate((2, 7))[0]
        assert record.passed is None
        assert record.values["enumerated"] is None
