# tests/models/test_subset.py - Membership structure tests
import pytest

from src.algebra.group import HPoint, heisenberg
from src.exceptions import ContextMismatch
from src.models.subset import HSubset


class TestHSubset:
    def test_set_algebra(self, h1_3):
        """Test union and intersection of two small sets"""
        a = HSubset.from_points(h1_3, [h1_3.identity, HPoint.of(1, 0, 0)])
        b = HSubset.from_points(h1_3, [HPoint.of(1, 0, 0), HPoint.of(0, 0, 1)])
        assert a.union(b).size == 3
        assert a.intersection(b) == HSubset.from_points(h1_3, [HPoint.of(1, 0, 0)])
        assert HPoint.of(0, 0, 1) not in a

    def test_dict_round_trip(self, h1_3):
        """Test that a set survives to_dict and from_dict"""
        K = HSubset.from_points(h1_3, [HPoint.of(2, 1, 0), HPoint.of(0, 2, 2)])
        assert HSubset.from_dict(h1_3, K.to_dict()) == K

    def test_dict_from_other_group(self, h1_3):
        """Test that a serialized set is tied to its group"""
        data = HSubset.full(h1_3).to_dict()
        with pytest.raises(ContextMismatch):
            HSubset.from_dict(heisenberg(1, 5), data)

    def test_rank_outside_group(self, h1_3):
        """Test that ranks are bounds-checked"""
        with pytest.raises(ContextMismatch):
            HSubset.from_ranks(h1_3, [27])
