"""
Heisenberg Group

The group H^n(F_q): the set F_q^{2n+1} with

    (x, t)(x', t') = (x + x', t + t' + 1/2 * omega(x, x')),

where omega(x, x') = sum_i x_i x'_{n+i} - x'_i x_{n+i}. This module holds the
group law, the projections pi_j onto the vertical hyperplanes W_j, their
fibers, the straightening maps T_j, the dilation action and the coordinate
subgroups W_j and L_j.

Points are ranked lexicographically over (x_1, ..., x_{2n}, t) and points of
F_q^{2n} (the identified images of pi_j) over (y_1, ..., y_{2n-1}, t). All
whole-group scans work on integer code arrays of shape (..., 2n+1).
"""
import dataclasses
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, List, NamedTuple, Sequence, Set, Tuple

import numpy as np

from src.algebra.field import Codes, FieldCtx, FieldElem, field_from_order
from src.exceptions import BadAxis, BadRange, ContextMismatch, ZeroScalar
from src.models.subset import HSubset

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HPoint:
    """A point (x, t) of H^n(F_q) as field codes."""
    x: Tuple[int, ...]
    t: int

    @classmethod
    def of(cls, *codes: int) -> "HPoint":
        """Build from a flat code list [x_1, ..., x_2n, t]."""
        return cls(x=tuple(int(c) for c in codes[:-1]), t=int(codes[-1]))

    def to_list(self) -> List[int]:
        return [*self.x, self.t]


@dataclass(frozen=True)
class PlanePoint:
    """A point (y, t) of F_q^{2n}, the identified image of a vertical hyperplane."""
    y: Tuple[int, ...]
    t: int

    @classmethod
    def of(cls, *codes: int) -> "PlanePoint":
        return cls(y=tuple(int(c) for c in codes[:-1]), t=int(codes[-1]))

    def to_list(self) -> List[int]:
        return [*self.y, self.t]


class AxisSign(NamedTuple):
    """Sign convention of pi_j and T_j.

    The t-correction for axis j is sign * 1/2 * x[index] * x[partner] (0-based
    indices); j <= n pairs with n + j and carries +, j > n pairs with j - n
    and carries -.
    """
    index: int
    partner: int
    sign: int


@dataclass(frozen=True)
class GroupCtx:
    """Heisenberg group context H^n(F_q)."""
    n: int
    field: FieldCtx
    _cache: Dict[object, np.ndarray] = dataclasses.field(
        default_factory=dict, compare=False, hash=False, repr=False
    )

    def __post_init__(self) -> None:
        if self.n < 1:
            raise BadRange(f"n must be >= 1, got {self.n}")

    @classmethod
    def from_order(cls, n: int, q: int) -> "GroupCtx":
        return cls(n=n, field=field_from_order(q))

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def dim(self) -> int:
        return 2 * self.n + 1

    @property
    def order(self) -> int:
        return self.q ** self.dim

    @property
    def plane_order(self) -> int:
        return self.q ** (2 * self.n)

    @property
    def identity(self) -> HPoint:
        return HPoint(x=(0,) * (2 * self.n), t=0)

    def to_dict(self) -> Dict[str, object]:
        return {"n": self.n, "q": self.q, **self.field.to_dict()}

    # -- sign table ---------------------------------------------------------

    def axis(self, j: int) -> AxisSign:
        """Sign-table entry for axis j in 1..2n."""
        n = self.n
        if not 1 <= j <= 2 * n:
            raise BadAxis(f"axis {j} outside 1..{2 * n}")
        if j <= n:
            return AxisSign(index=j - 1, partner=n + j - 1, sign=1)
        return AxisSign(index=j - 1, partner=j - n - 1, sign=-1)

    def correction(self, j: int, x: np.ndarray) -> Codes:
        """sign * 1/2 * x_j * x_partner for code arrays of shape (..., >= 2n)."""
        ax = self.axis(j)
        f = self.field
        term = f.half(f.mul(x[..., ax.index], x[..., ax.partner]))
        return term if ax.sign > 0 else f.neg(term)

    # -- validation and ranking --------------------------------------------

    def validate(self, a: HPoint) -> None:
        if len(a.x) != 2 * self.n:
            raise ContextMismatch(f"point has {len(a.x)} x-coordinates, expected {2 * self.n}")
        self.field.check(np.array([*a.x, a.t]))

    @cached_property
    def _powers(self) -> np.ndarray:
        return self.q ** np.arange(self.dim - 1, -1, -1, dtype=np.int64)

    @cached_property
    def _plane_powers(self) -> np.ndarray:
        return self.q ** np.arange(2 * self.n - 1, -1, -1, dtype=np.int64)

    def rank(self, a: HPoint) -> int:
        self.validate(a)
        return int(np.asarray(a.to_list(), dtype=np.int64) @ self._powers)

    def unrank(self, rank: int) -> HPoint:
        if not 0 <= rank < self.order:
            raise ContextMismatch(f"rank {rank} outside [0, {self.order})")
        return HPoint.of(*(int(c) for c in self.points[rank]))

    def ranks_of(self, codes: np.ndarray) -> np.ndarray:
        return np.asarray(codes, dtype=np.int64) @ self._powers

    def plane_rank(self, pp: PlanePoint) -> int:
        if len(pp.y) != 2 * self.n - 1:
            raise ContextMismatch(f"plane point has {len(pp.y)} y-coordinates")
        self.field.check(np.array(pp.to_list()))
        return int(np.asarray(pp.to_list(), dtype=np.int64) @ self._plane_powers)

    def plane_unrank(self, rank: int) -> PlanePoint:
        if not 0 <= rank < self.plane_order:
            raise ContextMismatch(f"plane rank {rank} outside [0, {self.plane_order})")
        return PlanePoint.of(*(int(c) for c in self.plane_points[rank]))

    def plane_ranks_of(self, codes: np.ndarray) -> np.ndarray:
        return np.asarray(codes, dtype=np.int64) @ self._plane_powers

    @cached_property
    def points(self) -> np.ndarray:
        """All points as codes, shape (q^{2n+1}, 2n+1), in rank order."""
        grid = np.indices((self.q,) * self.dim, dtype=np.int64)
        return grid.reshape(self.dim, -1).T.copy()

    @cached_property
    def plane_points(self) -> np.ndarray:
        """All points of F_q^{2n}, shape (q^{2n}, 2n), in rank order."""
        grid = np.indices((self.q,) * (2 * self.n), dtype=np.int64)
        return grid.reshape(2 * self.n, -1).T.copy()

    # -- vectorized group law -------------------------------------------------

    def omega_codes(self, x: np.ndarray, y: np.ndarray) -> Codes:
        f, n = self.field, self.n
        total: Codes = 0
        for i in range(n):
            term = f.sub(f.mul(x[..., i], y[..., n + i]), f.mul(y[..., i], x[..., n + i]))
            total = f.add(total, term)
        return total

    def mul_codes(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        f, m = self.field, 2 * self.n
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        a, b = np.broadcast_arrays(a, b)
        out = np.empty(a.shape, dtype=np.int64)
        out[..., :m] = f.add(a[..., :m], b[..., :m])
        twist = f.half(self.omega_codes(a[..., :m], b[..., :m]))
        out[..., m] = f.add(f.add(a[..., m], b[..., m]), twist)
        return out

    def inverse_codes(self, a: np.ndarray) -> np.ndarray:
        return self.field.neg(np.asarray(a, dtype=np.int64))

    def project_codes(self, j: int, a: np.ndarray) -> np.ndarray:
        """pi_j on code arrays, returning identified plane codes (..., 2n)."""
        a = np.asarray(a, dtype=np.int64)
        m = 2 * self.n
        t_new = self.field.add(a[..., m], self.correction(j, a))
        kept = np.delete(a[..., :m], j - 1, axis=-1)
        return np.concatenate([kept, np.asarray(t_new)[..., None]], axis=-1)

    def straighten_codes(self, j: int, a: np.ndarray) -> np.ndarray:
        a = np.array(a, dtype=np.int64)
        m = 2 * self.n
        a[..., m] = self.field.add(a[..., m], self.correction(j, a))
        return a

    def dilate_codes(self, s: int, a: np.ndarray) -> np.ndarray:
        f, m = self.field, 2 * self.n
        a = np.array(a, dtype=np.int64)
        a[..., :m] = f.mul(a[..., :m], s)
        a[..., m] = f.mul(a[..., m], f.mul(s, s))
        return a

    def projection_ranks(self, j: int) -> np.ndarray:
        """Plane rank of pi_j(a) for every point rank a."""
        self.axis(j)
        key = ("proj", j)
        if key not in self._cache:
            self._cache[key] = self.plane_ranks_of(self.project_codes(j, self.points))
        return self._cache[key]

    def straighten_ranks(self, j: int) -> np.ndarray:
        """Rank of T_j(a) for every point rank a."""
        self.axis(j)
        key = ("straighten", j)
        if key not in self._cache:
            self._cache[key] = self.ranks_of(self.straighten_codes(j, self.points))
        return self._cache[key]


def heisenberg(n: int, q: int) -> GroupCtx:
    """Shorthand for GroupCtx.from_order."""
    return GroupCtx.from_order(n, q)


def _codes(a: HPoint) -> np.ndarray:
    return np.asarray(a.to_list(), dtype=np.int64)


def _point(codes: np.ndarray) -> HPoint:
    return HPoint.of(*(int(c) for c in codes))


def mul(ctx: GroupCtx, a: HPoint, b: HPoint) -> HPoint:
    """Group product a*b."""
    ctx.validate(a)
    ctx.validate(b)
    return _point(ctx.mul_codes(_codes(a), _codes(b)))


def inverse(ctx: GroupCtx, a: HPoint) -> HPoint:
    """(x, t)^-1 = (-x, -t) since omega(x, -x) = 0."""
    ctx.validate(a)
    return _point(ctx.inverse_codes(_codes(a)))


def power(ctx: GroupCtx, a: HPoint, k: int) -> HPoint:
    """a^k = (k*x, k*t) for every integer k."""
    ctx.validate(a)
    scalar = k % ctx.field.p
    return _point(ctx.field.mul(_codes(a), scalar))


def commutator(ctx: GroupCtx, a: HPoint, b: HPoint) -> HPoint:
    """a b a^-1 b^-1 = (0, omega(a.x, b.x))."""
    ab = mul(ctx, a, b)
    return mul(ctx, mul(ctx, ab, inverse(ctx, a)), inverse(ctx, b))


def symplectic(ctx: GroupCtx, x: Sequence[int], y: Sequence[int]) -> FieldElem:
    """omega(x, y) = sum_i x_i y_{n+i} - y_i x_{n+i}."""
    m = 2 * ctx.n
    if len(x) != m or len(y) != m:
        raise ContextMismatch(f"symplectic form takes vectors of length {m}")
    xa = np.asarray(x, dtype=np.int64)
    ya = np.asarray(y, dtype=np.int64)
    ctx.field.check(xa)
    ctx.field.check(ya)
    return FieldElem(int(ctx.omega_codes(xa, ya)))


def project(ctx: GroupCtx, j: int, a: HPoint) -> PlanePoint:
    """pi_j(a) in the identified form (x with coordinate j dropped, t')."""
    ctx.axis(j)
    ctx.validate(a)
    return PlanePoint.of(*(int(c) for c in ctx.project_codes(j, _codes(a))))


def hv_project(ctx: GroupCtx, a: HPoint) -> Tuple[Tuple[int, ...], int]:
    """(pi_h(a), pi_v(a)) = (x, t)."""
    return a.x, a.t


def embed(ctx: GroupCtx, j: int, base: PlanePoint) -> HPoint:
    """Un-identify a plane point: the point of W_j with x_j = 0."""
    ax = ctx.axis(j)
    if len(base.y) != 2 * ctx.n - 1:
        raise ContextMismatch(f"plane point has {len(base.y)} y-coordinates")
    x = list(base.y)
    x.insert(ax.index, 0)
    return HPoint(x=tuple(x), t=base.t)


def fiber(ctx: GroupCtx, j: int, base: PlanePoint) -> List[HPoint]:
    """The q points a with pi_j(a) = base, ordered by the free coordinate.

    These are (u + s e_j, tau - c_j(u + s e_j)) where (u, tau) is the
    un-identified base and c_j the sign-table correction; the set is the left
    coset (u, tau) * L_j.
    """
    ax = ctx.axis(j)
    u = _codes(embed(ctx, j, base))
    pts = np.repeat(u[None, :], ctx.q, axis=0)
    pts[:, ax.index] = ctx.field.elements()
    m = 2 * ctx.n
    pts[:, m] = ctx.field.sub(pts[:, m], ctx.correction(j, pts))
    return [_point(row) for row in pts]


def decompose(ctx: GroupCtx, j: int, a: HPoint) -> Tuple[HPoint, HPoint]:
    """Split a = base * shift with base in W_j and shift = (x_j e_j, 0) in L_j."""
    ax = ctx.axis(j)
    ctx.validate(a)
    base = embed(ctx, j, project(ctx, j, a))
    shift_x = [0] * (2 * ctx.n)
    shift_x[ax.index] = a.x[ax.index]
    return base, HPoint(x=tuple(shift_x), t=0)


def straighten(ctx: GroupCtx, j: int, a: HPoint) -> HPoint:
    """T_j(x, t) = (x, t + c_j(x)); a bijection of H^n(F_q)."""
    ctx.axis(j)
    ctx.validate(a)
    return _point(ctx.straighten_codes(j, _codes(a)))


def dilate(ctx: GroupCtx, s: int, a: HPoint) -> HPoint:
    """s*(x, t) = (s x, s^2 t)."""
    if s == 0:
        raise ZeroScalar("dilation needs a nonzero scalar")
    ctx.field.check(s)
    ctx.validate(a)
    return _point(ctx.dilate_codes(s, _codes(a)))


def orbit(ctx: GroupCtx, a: HPoint) -> Set[HPoint]:
    """Orbit of a under the dilation action of F_q^*."""
    ctx.validate(a)
    return {dilate(ctx, int(s), a) for s in ctx.field.nonzero()}


def expected_orbit_size(ctx: GroupCtx, a: HPoint) -> int:
    """q-1 when x != 0, (q-1)/2 when x = 0 and t != 0, 1 for the identity."""
    if any(a.x):
        return ctx.q - 1
    if a.t:
        return (ctx.q - 1) // 2
    return 1


def orbit_partition(ctx: GroupCtx) -> List[FrozenSet[int]]:
    """Dilation orbits as rank sets, ordered by their smallest rank."""
    dilated = np.stack(
        [ctx.ranks_of(ctx.dilate_codes(int(s), ctx.points)) for s in ctx.field.nonzero()]
    )
    leaders = dilated.min(axis=0)
    order = np.argsort(leaders, kind="stable")
    _, starts = np.unique(leaders[order], return_index=True)
    groups = np.split(order, starts[1:])
    return [frozenset(int(r) for r in g) for g in groups]


def coordinate_subgroup(ctx: GroupCtx, j: int, kind: str) -> HSubset:
    """W_j = {x_j = 0} (kind vertical_W) or L_j = {(s e_j, 0)} (kind horizontal_L)."""
    ax = ctx.axis(j)
    pts = ctx.points
    if kind == "vertical_W":
        mask = pts[:, ax.index] == 0
    elif kind == "horizontal_L":
        others = np.delete(pts, ax.index, axis=1)
        mask = ~others.any(axis=1)
    else:
        raise BadRange(f"unknown coordinate subgroup kind {kind!r}")
    return HSubset(ctx, mask)
