# tests/algebra/test_group.py - Heisenberg group tests
import numpy as np
import pytest

from src.algebra.group import (
    AxisSign,
    GroupCtx,
    HPoint,
    PlanePoint,
    commutator,
    coordinate_subgroup,
    decompose,
    dilate,
    expected_orbit_size,
    fiber,
    heisenberg,
    hv_project,
    inverse,
    mul,
    orbit,
    orbit_partition,
    power,
    project,
    straighten,
    symplectic,
)
from src.exceptions import BadAxis, BadRange, ContextMismatch, ZeroScalar


class TestGroupLaw:
    def test_sizes(self, h1_3, h2_3):
        """Test group and plane orders"""
        assert h1_3.order == 27
        assert h1_3.plane_order == 9
        assert h2_3.order == 243
        assert h2_3.dim == 5

    def test_associativity_sample(self, h2_3, rng):
        """Test (ab)c = a(bc) on sampled triples"""
        pts = h2_3.points
        idx = rng.integers(h2_3.order, size=(500, 3))
        a, b, c = pts[idx[:, 0]], pts[idx[:, 1]], pts[idx[:, 2]]
        left = h2_3.mul_codes(h2_3.mul_codes(a, b), c)
        right = h2_3.mul_codes(a, h2_3.mul_codes(b, c))
        assert np.array_equal(left, right)

    def test_identity_and_inverse(self, h1_5):
        """Test that (-x, -t) inverts (x, t)"""
        a = HPoint.of(1, 3, 2)
        assert mul(h1_5, a, inverse(h1_5, a)) == h1_5.identity
        assert mul(h1_5, h1_5.identity, a) == a

    def test_commutator_is_central(self, h1_3):
        """Test [e1, e2] = (0, 0, omega(e1, e2))"""
        e1, e2 = HPoint.of(1, 0, 0), HPoint.of(0, 1, 0)
        assert commutator(h1_3, e1, e2) == HPoint.of(0, 0, 1)
        assert mul(h1_3, e1, e2) != mul(h1_3, e2, e1)

    def test_power_has_exponent_p(self, h1_5):
        """Test a^p = e"""
        a = HPoint.of(2, 4, 1)
        assert power(h1_5, a, 5) == h1_5.identity
        assert power(h1_5, a, 2) == mul(h1_5, a, a)

    def test_symplectic_form(self, h2_3):
        """Test omega on basis vectors of F_3^4"""
        assert symplectic(h2_3, [1, 0, 0, 0], [0, 0, 1, 0]) == 1
        assert symplectic(h2_3, [0, 0, 1, 0], [1, 0, 0, 0]) == 2
        assert symplectic(h2_3, [1, 0, 0, 0], [0, 1, 0, 0]) == 0

    def test_rank_roundtrip_on_extension_field(self, h1_9):
        """Test that unrank inverts rank"""
        a = HPoint.of(4, 7, 8)
        assert h1_9.unrank(h1_9.rank(a)) == a
        assert h1_9.rank(h1_9.identity) == 0

    def test_wrong_point_length(self, h1_3):
        """Test that a point of the wrong dimension is rejected"""
        with pytest.raises(ContextMismatch):
            h1_3.validate(HPoint.of(1, 0, 0, 0, 0))

    def test_n_must_be_positive(self, f3):
        """Test that n = 0 is rejected"""
        with pytest.raises(BadRange):
            GroupCtx(n=0, field=f3)


class TestProjections:
    def test_sign_table(self, h2_3):
        """Test the pairing and signs of the correction terms"""
        assert h2_3.axis(1) == AxisSign(index=0, partner=2, sign=1)
        assert h2_3.axis(3) == AxisSign(index=2, partner=0, sign=-1)
        with pytest.raises(BadAxis):
            h2_3.axis(5)
        with pytest.raises(BadAxis):
            h2_3.axis(0)

    def test_project_plane(self, h1_3):
        """Test pi_1 and pi_2 of (1, 1, 0) over F_3"""
        a = HPoint.of(1, 1, 0)
        assert project(h1_3, 1, a) == PlanePoint.of(1, 2)
        assert project(h1_3, 2, a) == PlanePoint.of(1, 1)

    def test_hv_project(self, h2_3):
        """Test that the horizontal and vertical parts split a point"""
        a = HPoint.of(1, 2, 0, 1, 2)
        assert hv_project(h2_3, a) == ((1, 2, 0, 1), 2)

    @pytest.mark.parametrize("j", [1, 2, 3, 4])
    def test_fiber_projects_to_base(self, h2_3, j):
        """Test that the q fiber points all project to their base"""
        base = PlanePoint.of(1, 2, 0, 1)
        points = fiber(h2_3, j, base)
        assert len(set(points)) == 3
        assert all(project(h2_3, j, a) == base for a in points)

    def test_decompose(self, h2_3):
        """Test a = base * shift with the base in W_j"""
        a = HPoint.of(1, 2, 2, 1, 0)
        for j in range(1, 5):
            base, shift = decompose(h2_3, j, a)
            assert base.x[j - 1] == 0
            assert mul(h2_3, base, shift) == a

    def test_projection_ranks_are_cached(self, h1_3):
        """Test that the rank table is computed once"""
        first = h1_3.projection_ranks(1)
        assert h1_3.projection_ranks(1) is first
        assert np.bincount(first, minlength=9).tolist() == [3] * 9

    def test_straighten_is_bijective(self, h2_3):
        """Test that T_j permutes the group"""
        for j in range(1, 5):
            perm = h2_3.straighten_ranks(j)
            assert sorted(perm.tolist()) == list(range(h2_3.order))

    def test_straighten_makes_fibers_additive(self, h1_5):
        """Test T_j(a * (s e_j, 0)) = T_j(a) + s e_j"""
        a = HPoint.of(2, 3, 1)
        assert straighten(h1_5, 1, a) == HPoint.of(2, 3, 4)
        assert straighten(h1_5, 1, mul(h1_5, a, HPoint.of(4, 0, 0))) == HPoint.of(1, 3, 4)


class TestDilations:
    def test_dilation_is_automorphism(self, h1_5):
        """Test s(ab) = (sa)(sb)"""
        a, b = HPoint.of(1, 2, 3), HPoint.of(4, 0, 2)
        for s in range(1, 5):
            assert dilate(h1_5, s, mul(h1_5, a, b)) == mul(h1_5, dilate(h1_5, s, a), dilate(h1_5, s, b))

    def test_zero_scalar(self, h1_5):
        """Test that the zero dilation is rejected"""
        with pytest.raises(ZeroScalar):
            dilate(h1_5, 0, HPoint.of(1, 0, 0))

    def test_orbit_sizes(self, h1_5):
        """Test the three orbit sizes"""
        for a in (HPoint.of(1, 0, 3), HPoint.of(0, 0, 2), h1_5.identity):
            assert len(orbit(h1_5, a)) == expected_orbit_size(h1_5, a)

    @pytest.mark.parametrize("n", [1, 2])
    @pytest.mark.parametrize("q", [3, 5, 7, 9])
    def test_orbit_partition(self, n, q):
        """Test that orbits partition the group with the three expected sizes"""
        ctx = heisenberg(n, q)
        orbits = orbit_partition(ctx)
        covered = np.zeros(ctx.order, dtype=np.int64)
        for o in orbits:
            members = np.fromiter(o, dtype=np.int64)
            covered[members] += 1
            assert len(o) == expected_orbit_size(ctx, ctx.unrank(int(members[0])))
        assert (covered == 1).all()
        assert frozenset({0}) in orbits
        assert len(orbits) == 3 + q * (q ** (2 * n) - 1) // (q - 1)


class TestCoordinateSubgroups:
    def test_sizes(self, h2_3):
        """Test |W_j| = q^{2n} and |L_j| = q"""
        for j in range(1, 5):
            assert coordinate_subgroup(h2_3, j, "vertical_W").size == 81
            assert coordinate_subgroup(h2_3, j, "horizontal_L").size == 3

    def test_unknown_kind(self, h1_3):
        """Test that unknown kinds are rejected"""
        with pytest.raises(BadRange):
            coordinate_subgroup(h1_3, 1, "diagonal")

    def test_heisenberg_shorthand(self):
        """Test that heisenberg() reads q as a prime power"""
        ctx = heisenberg(1, 9)
        assert ctx.field.r == 2
        assert ctx.order == 729
