# tests/analysis/test_functions.py - Function space and form tests
from fractions import Fraction

import numpy as np
import pytest

from src.algebra.group import PlanePoint
from src.analysis.functions import (
    Exponent,
    GridFn,
    apply_A,
    bilinear_L,
    constant,
    family_a,
    family_b,
    incidence_neighbors,
    indicator,
    inner,
    lp_norm,
    lw_form,
    lw_form_swapped,
    partial_form,
    point_mass,
    projection_indicators,
    random_grid_fn,
)
from src.analysis.sets import sharp_example
from src.exceptions import ArityMismatch, BadExponent, ContextMismatch, WrongDimension


class TestExponent:
    def test_parse(self):
        """Test string, integer and infinite exponents"""
        assert Exponent.parse("3/2").value == Fraction(3, 2)
        assert Exponent.parse(2).value == Fraction(2)
        assert Exponent.parse("inf").is_infinite
        assert Exponent.parse(float("inf")).is_infinite

    def test_below_one(self):
        """Test that exponents below 1 are rejected"""
        with pytest.raises(BadExponent):
            Exponent.parse("1/2")

    def test_conjugate(self):
        """Test 1/u + 1/u' = 1"""
        assert Exponent.parse("3/2").conjugate() == Exponent.parse(3)
        assert Exponent.parse(1).conjugate().is_infinite
        assert Exponent.parse("inf").conjugate() == Exponent.parse(1)


class TestGridFn:
    def test_shape_checked(self, h1_3):
        """Test that the value count must be q^{2n}"""
        with pytest.raises(ContextMismatch):
            GridFn(h1_3, np.ones(10))

    def test_negative_values_rejected(self, h1_3):
        """Test that functions are nonnegative"""
        values = np.ones(9)
        values[3] = -1.0
        with pytest.raises(ValueError):
            GridFn(h1_3, values)

    def test_norms(self, h1_3):
        """Test normalized norms of constants and point masses"""
        c = constant(h1_3, 2.0)
        assert lp_norm(c, "3/2") == pytest.approx(2.0)
        assert lp_norm(c, "inf") == 2.0
        delta = point_mass(h1_3, PlanePoint.of(1, 1))
        assert lp_norm(delta, 2) == pytest.approx(1 / 3)
        assert lp_norm(delta, 1) == pytest.approx(1 / 9)

    def test_inner(self, h1_3):
        """Test the normalized inner product"""
        assert inner(constant(h1_3, 2.0), constant(h1_3, 3.0)) == pytest.approx(6.0)


class TestLWForm:
    def test_constants(self, h2_3):
        """Test that constant functions give their product"""
        fs = [constant(h2_3, 2.0)] + [constant(h2_3) for _ in range(3)]
        assert lw_form(h2_3, fs) == pytest.approx(2.0)

    def test_arity(self, h2_3):
        """Test that 2n functions are required"""
        with pytest.raises(ArityMismatch):
            lw_form(h2_3, [constant(h2_3)] * 3)

    def test_partial_form(self, h2_3, rng):
        """Test lw_form(fs) = <f_k, partial_form(fs, k)> for each k"""
        fs = [random_grid_fn(h2_3, rng) for _ in range(4)]
        total = lw_form(h2_3, fs)
        for k in range(1, 5):
            assert inner(fs[k - 1], partial_form(h2_3, fs, k)) == pytest.approx(total, rel=1e-12)

    def test_indicators_of_flat_set(self, h1_3):
        """Test the form of the projection indicators of the flat example"""
        K = sharp_example(h1_3, "flat")
        fs = projection_indicators(K)
        assert [f.support_size for f in fs] == [1, 3]
        assert lw_form(h1_3, fs) == pytest.approx(3 / 27)


class TestPointLineForm:
    def test_neighbors(self, h1_5):
        """Test that each point lies on q non-vertical lines"""
        nbr = incidence_neighbors(h1_5)
        assert nbr.shape == (25, 5)
        assert all(len(set(row)) == 5 for row in nbr.tolist())

    def test_plane_only(self, h2_3):
        """Test that the point-line form needs n = 1"""
        with pytest.raises(WrongDimension):
            incidence_neighbors(h2_3)

    def test_duality(self, h1_5, rng):
        """Test that the LW form, its swapped version, L and <f1, A f2> agree"""
        f1, f2 = random_grid_fn(h1_5, rng), random_grid_fn(h1_5, rng)
        expected = bilinear_L(h1_5, f1, f2)
        assert lw_form(h1_5, [f1, f2]) == pytest.approx(expected, rel=1e-12)
        assert lw_form_swapped(h1_5, f1, f2) == pytest.approx(expected, rel=1e-12)
        assert inner(f1, apply_A(h1_5, f2)) == pytest.approx(expected, rel=1e-12)
        assert inner(apply_A(h1_5, f1, adjoint=True), f2) == pytest.approx(expected, rel=1e-12)

    def test_mass_preserved(self, h1_5, rng):
        """Test ||A f||_1 = ||f||_1"""
        f = random_grid_fn(h1_5, rng, density=0.3)
        assert lp_norm(apply_A(h1_5, f), 1) == pytest.approx(lp_norm(f, 1))

    def test_families(self, h1_5):
        """Test L = q^{-2} for both extremal families"""
        assert bilinear_L(h1_5, *family_a(h1_5)) == pytest.approx(1 / 25)
        assert bilinear_L(h1_5, *family_b(h1_5)) == pytest.approx(1 / 25)
        f1, f2 = family_a(h1_5)
        assert f1.support_size == 5
        assert f2.support_size == 1

    def test_indicator_builder(self, h1_3):
        """Test that repeated ranks collapse in an indicator"""
        assert indicator(h1_3, [0, 0, 4]).support_size == 2
