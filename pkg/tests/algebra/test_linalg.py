# tests/algebra/test_linalg.py - Linear algebra over F_q tests
import numpy as np
import pytest

from src.algebra.field import field_create
from src.algebra.linalg import (
    enumerate_subspaces,
    gaussian_bracket,
    gr_count,
    ig_count,
    orth_complement,
    rref,
    span_codes,
)
from src.algebra.subgroups import enumerate_isotropic, is_isotropic
from src.exceptions import BadRange, DimensionMismatch, TooLarge


class TestCounts:
    def test_gaussian_bracket(self):
        """Test [3]_2 = 7 and [0]_q = 0"""
        assert gaussian_bracket(3, 2) == 7
        assert gaussian_bracket(0, 5) == 0

    def test_grassmannian(self):
        """Test |Gr(2, 4; 3)| = 130 and the hyperplane count"""
        assert gr_count(2, 4, 3) == 130
        assert gr_count(2, 3, 3) == 13
        assert gr_count(0, 4, 3) == 1

    def test_isotropic_grassmannian(self):
        """Test |IG(1, 4; 3)| = |IG(2, 4; 3)| = 40"""
        assert ig_count(1, 4, 3) == 40
        assert ig_count(2, 4, 3) == 40
        assert ig_count(1, 2, 5) == 6

    def test_count_ranges(self):
        """Test that out-of-range dimensions are rejected"""
        with pytest.raises(BadRange):
            gr_count(5, 4, 3)
        with pytest.raises(BadRange):
            ig_count(1, 3, 3)


class TestSubspaces:
    def test_rref_canonical(self, f3):
        """Test that dependent rows reduce to one normalized row"""
        S = rref(f3, [[2, 1], [1, 2]])
        assert S.basis == ((1, 2),)
        assert S == rref(f3, [[1, 2]])

    def test_contains(self, f3):
        """Test membership in a row space"""
        S = rref(f3, [[1, 0, 1], [0, 1, 1]])
        assert S.contains([1, 1, 2])
        assert not S.contains([0, 0, 1])

    def test_elements(self, f3):
        """Test that a plane of F_3^3 has 9 vectors"""
        S = rref(f3, [[1, 0, 1], [0, 1, 1]])
        assert S.elements().shape == (9, 3)

    def test_enumeration_matches_count(self, f3):
        """Test that Gr(2, 4; 3) is enumerated once per subspace"""
        planes = enumerate_subspaces(4, 2, f3)
        assert len(planes) == 130
        assert len(set(planes)) == 130

    @pytest.mark.parametrize("m, k", [(m, k) for m in (2, 4) for k in range(m + 1)])
    @pytest.mark.parametrize("q", [3, 5])
    def test_enumeration_matches_gr_count(self, q, m, k):
        """Test |Gr(k, m; q)| against the echelon enumeration"""
        subspaces = enumerate_subspaces(m, k, field_create(q))
        assert len(subspaces) == gr_count(k, m, q)
        assert len(set(subspaces)) == len(subspaces)

    @pytest.mark.parametrize("m, k", [(m, k) for m in (2, 4) for k in range(m + 1)])
    @pytest.mark.parametrize("q", [3, 5])
    def test_complement_is_an_involution(self, q, m, k):
        """Test (S^perp)^perp = S over every enumerated subspace"""
        for S in enumerate_subspaces(m, k, field_create(q)):
            perp = orth_complement(S)
            assert perp.dim == m - k
            assert orth_complement(perp) == S

    def test_enumeration_guard(self):
        """Test that oversized enumerations hit the capacity guard"""
        with pytest.raises(TooLarge):
            enumerate_subspaces(6, 3, field_create(5))

    def test_orth_complement(self, f5):
        """Test dim S + dim S^perp = m and orthogonality"""
        S = rref(f5, [[1, 2, 0, 3], [0, 1, 4, 1]])
        perp = orth_complement(S)
        assert S.dim + perp.dim == 4
        products = (S.matrix @ perp.matrix.T) % 5
        assert not products.any()

    def test_span_codes(self, f3):
        """Test the prime-field span of two independent vectors"""
        codes = span_codes(f3, np.array([[1, 0, 0], [0, 1, 0]]))
        assert codes.shape == (9, 3)
        assert not codes[:, 2].any()


class TestIsotropy:
    @pytest.mark.parametrize("n, k", [(1, 0), (1, 1), (2, 0), (2, 1), (2, 2)])
    @pytest.mark.parametrize("q", [3, 5])
    def test_isotropic_enumeration_matches_ig_count(self, q, n, k):
        """Test |IG(k, 2n; q)| against the filtered enumeration"""
        assert len(enumerate_isotropic(n, k, field_create(q))) == ig_count(k, 2 * n, q)

    def test_isotropic_enumeration(self, f3):
        """Test that enumeration agrees with the isotropic counts"""
        assert len(enumerate_isotropic(2, 1, f3)) == 40
        assert len(enumerate_isotropic(2, 2, f3)) == 40

    def test_lagrangian_check(self, f3):
        """Test one isotropic and one symplectic plane"""
        assert is_isotropic(rref(f3, [[1, 0, 0, 0], [0, 1, 0, 0]]), 2)
        assert not is_isotropic(rref(f3, [[1, 0, 0, 0], [0, 0, 1, 0]]), 2)

    def test_dimension_mismatch(self, f3):
        """Test that the ambient dimension must be 2n"""
        with pytest.raises(DimensionMismatch):
            is_isotropic(rref(f3, [[1, 0, 0]]), 2)
