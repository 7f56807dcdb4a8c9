# tests/algebra/test_subgroups.py - Subgroup enumeration tests
import dataclasses

import pytest

from src.algebra.group import HPoint, heisenberg
from src.algebra.subgroups import (
    SubgroupKind,
    classify_subgroup,
    closure,
    enumerate_subgroups,
    graph_subgroup,
    heis_complement,
    homogeneous_count_formula,
    is_isotropic,
    is_subgroup,
    matches_homogeneous_shape,
    nonproduct_search,
    product_subgroup,
    subgroup_count_formula,
)
from src.exceptions import BadField, NotHomogeneous, TooLarge, Unclassifiable
from src.models.subset import HSubset


class TestFormulas:
    def test_power_reading(self):
        """Test subgroup counts of H^1(F_3), H^1(F_5) and H^2(F_3)"""
        assert subgroup_count_formula(1, 3) == 19
        assert subgroup_count_formula(1, 5) == 39
        assert subgroup_count_formula(2, 3) == 693

    def test_linear_reading(self):
        """Test that the linear reading undercounts at p = 3"""
        assert subgroup_count_formula(1, 3, "linear") == 18

    def test_homogeneous(self):
        """Test homogeneous counts over prime and extension fields"""
        assert homogeneous_count_formula(1, 3) == 11
        assert homogeneous_count_formula(1, 5) == 15
        assert homogeneous_count_formula(1, 9) == 23

    def test_needs_odd_prime(self):
        """Test that the count is defined for odd primes only"""
        with pytest.raises(BadField):
            subgroup_count_formula(1, 9)


class TestEnumeration:
    def test_h1_f3(self, h1_3):
        """Test that H^1(F_3) has 19 subgroups, 11 homogeneous"""
        records = enumerate_subgroups(h1_3)
        assert len(records) == 19
        assert sum(1 for r in records if r.homogeneous) == 11
        assert records[0].order == 1
        assert records[-1].order == 27

    def test_h1_f5(self, h1_5):
        """Test that H^1(F_5) has 39 subgroups, 15 homogeneous"""
        records = enumerate_subgroups(h1_5)
        assert len(records) == 39
        assert sum(1 for r in records if r.homogeneous) == 15

    def test_records_are_typed_subgroups(self, h1_3):
        """Test closure, type and homogeneous shape of every record"""
        for rec in enumerate_subgroups(h1_3):
            assert is_subgroup(h1_3, rec.membership())
            assert rec.kind in (SubgroupKind.PRODUCT, SubgroupKind.GRAPH)
            assert rec.homogeneous == matches_homogeneous_shape(rec)

    @pytest.mark.slow
    def test_h1_f7_classifies(self, h1_7):
        """Test that every subgroup of H^1(F_7) is a product or a graph over an isotropic S"""
        records = enumerate_subgroups(h1_7)
        assert len(records) == subgroup_count_formula(1, 7)
        assert sum(1 for r in records if r.homogeneous) == homogeneous_count_formula(1, 7)
        for rec in records:
            assert rec.kind in (SubgroupKind.PRODUCT, SubgroupKind.GRAPH)
            if rec.kind == SubgroupKind.GRAPH:
                assert is_isotropic(rec.S, 1)
            assert rec.homogeneous == matches_homogeneous_shape(rec)

    def test_capacity_guard(self):
        """Test that large groups are refused"""
        with pytest.raises(TooLarge):
            enumerate_subgroups(heisenberg(2, 5))

    @pytest.mark.slow
    def test_h2_f3(self, h2_3):
        """Test the enumeration of H^2(F_3) against the formula"""
        assert len(enumerate_subgroups(h2_3)) == 693

    @pytest.mark.slow
    def test_h1_f9_homogeneous(self, h1_9):
        """Test the homogeneous count and shapes of H^1(F_9)"""
        records = enumerate_subgroups(h1_9)
        assert sum(1 for r in records if r.homogeneous) == 23
        for rec in records:
            assert rec.homogeneous == matches_homogeneous_shape(rec)


class TestClosure:
    def test_generates_group(self, h1_3):
        """Test that e1 and e2 generate H^1(F_3)"""
        rec = closure(h1_3, [HPoint.of(1, 0, 0), HPoint.of(0, 1, 0)])
        assert rec.order == 27
        assert rec.kind == SubgroupKind.PRODUCT

    def test_centre(self, h1_3):
        """Test that the centre is the product over S = 0"""
        rec = closure(h1_3, [HPoint.of(0, 0, 1)])
        assert rec.order == 3
        assert rec.kind == SubgroupKind.PRODUCT
        assert rec.S.dim == 0
        assert rec.homogeneous

    def test_horizontal_line_is_homogeneous_graph(self, h1_3):
        """Test that L_1 is a graph with rho = 0"""
        rec = closure(h1_3, [HPoint.of(1, 0, 0)])
        assert rec.kind == SubgroupKind.GRAPH
        assert rec.rho == (0,)
        assert rec.homogeneous

    def test_tilted_line(self, h1_3):
        """Test that a graph with rho != 0 is not dilation invariant"""
        rec = closure(h1_3, [HPoint.of(1, 0, 1)])
        assert rec.order == 3
        assert rec.kind == SubgroupKind.GRAPH
        assert rec.rho == (1,)
        assert not rec.homogeneous
        with pytest.raises(NotHomogeneous):
            heis_complement(rec)


class TestConstructions:
    def test_product_subgroup(self, h1_3):
        """Test S x F_3 for S spanned by e1"""
        S = product_subgroup(h1_3, [[1, 0]])
        assert S.size == 9
        assert is_subgroup(h1_3, S)

    def test_graph_subgroup_matches_closure(self, h1_3):
        """Test Gamma_S(rho) against the generated subgroup"""
        G = graph_subgroup(h1_3, [[1, 0]], [1])
        assert G == closure(h1_3, [HPoint.of(1, 0, 1)]).membership()

    def test_complement_of_centre(self, h1_3):
        """Test that the complement of the centre is the plane t = 0"""
        rec = closure(h1_3, [HPoint.of(0, 0, 1)])
        comp = heis_complement(rec)
        assert comp.subset.size == 9
        assert not comp.is_subgroup
        assert comp.homogeneous

    def test_empty_set_is_not_subgroup(self, h1_3):
        """Test that the empty set fails the subgroup test"""
        assert not is_subgroup(h1_3, HSubset.empty(h1_3))


class TestClassification:
    def test_retags_untyped_record(self, h1_3):
        """Test that a stripped record is classified again as the same graph"""
        rec = closure(h1_3, [HPoint.of(1, 0, 1)])
        bare = dataclasses.replace(rec, kind=SubgroupKind.UNCLASSIFIED, S=None, rho=None)
        tagged = classify_subgroup(bare)
        assert tagged.kind == SubgroupKind.GRAPH
        assert tagged.rho == rec.rho

    def test_unclassifiable_over_prime_field(self, h1_3):
        """Test that a kernel of size 2 fits neither shape"""
        ranks = sorted(h1_3.rank(a) for a in (HPoint.of(0, 0, 0), HPoint.of(0, 0, 1), HPoint.of(1, 0, 0)))
        bare = dataclasses.replace(closure(h1_3, [HPoint.of(0, 0, 1)]), elements=tuple(ranks))
        with pytest.raises(Unclassifiable):
            classify_subgroup(bare)

    def test_nonproduct_search(self, h1_3):
        """Test that only non-isotropic records of kind other are reported"""
        records = enumerate_subgroups(h1_3)
        assert nonproduct_search(records) == []
        whole = dataclasses.replace(records[-1], kind=SubgroupKind.OTHER)
        assert nonproduct_search([whole]) == [whole]
