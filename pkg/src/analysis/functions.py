"""
Functions on F_q^{2n}

Dense nonnegative functions indexed by plane rank, their normalized L^u
norms, the Loomis-Whitney form

    (1/q^{2n+1}) sum_{(x,t)} prod_j f_j(pi_j(x, t)),

and, for n = 1, the bilinear point-line form L(f1, f2) with its averaging
operator A and adjoint.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.algebra.group import GroupCtx, PlanePoint
from src.config.settings import settings
from src.exceptions import ArityMismatch, BadExponent, BadRange, ContextMismatch, WrongDimension
from src.models.subset import HSubset

logger = logging.getLogger(__name__)

ExponentLike = Union["Exponent", int, float, str, Fraction]


@dataclass(frozen=True)
class Exponent:
    """An exponent u in [1, inf]; ``value`` is None for infinity."""
    value: Optional[Fraction]

    def __post_init__(self) -> None:
        if self.value is not None and self.value < 1:
            raise BadExponent(f"exponent {self.value} is below 1")

    @classmethod
    def parse(cls, u: ExponentLike) -> "Exponent":
        if isinstance(u, Exponent):
            return u
        if isinstance(u, str):
            text = u.strip().lower()
            if text in ("inf", "infinity", "∞"):
                return cls(None)
            return cls(Fraction(text))
        if isinstance(u, float):
            if math.isinf(u):
                return cls(None)
            return cls(Fraction(u).limit_denominator(10**6))
        return cls(Fraction(u))

    @classmethod
    def infinity(cls) -> "Exponent":
        return cls(None)

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    @property
    def reciprocal(self) -> Fraction:
        """1/u, with 1/inf = 0."""
        return Fraction(0) if self.value is None else 1 / self.value

    def conjugate(self) -> "Exponent":
        """u' with 1/u + 1/u' = 1."""
        rest = 1 - self.reciprocal
        return Exponent(None) if rest == 0 else Exponent(1 / rest)

    def __float__(self) -> float:
        return math.inf if self.value is None else float(self.value)

    def __str__(self) -> str:
        return "inf" if self.value is None else str(self.value)


class GridFn:
    """Nonnegative function on F_q^{2n}, indexed by plane rank."""

    def __init__(self, ctx: GroupCtx, values: Iterable[float]):
        arr = np.array(values, dtype=np.float64).reshape(-1)
        if arr.shape != (ctx.plane_order,):
            raise ContextMismatch(
                f"grid function has {arr.size} values, expected {ctx.plane_order}"
            )
        if not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise BadRange("grid function values must be finite and nonnegative")
        arr.setflags(write=False)
        self.ctx = ctx
        self.values = arr

    def __repr__(self) -> str:
        return f"GridFn(n={self.ctx.n}, q={self.ctx.q}, support={self.support_size})"

    @property
    def support_size(self) -> int:
        return int(np.count_nonzero(self.values))

    def scaled(self, c: float) -> "GridFn":
        return GridFn(self.ctx, self.values * c)

    def to_dict(self) -> Dict[str, Any]:
        return {"q": self.ctx.q, "n": self.ctx.n, "values": self.values.tolist()}


def stable_sum(values: np.ndarray) -> float:
    """Sum in index order; compensated over fixed-size blocks for large inputs."""
    flat = np.asarray(values, dtype=np.float64).reshape(-1)
    if flat.size <= settings.COMPENSATED_SUM_THRESHOLD:
        return float(np.sum(flat))
    block = settings.SUM_BLOCK_SIZE
    partials = [math.fsum(flat[i:i + block]) for i in range(0, flat.size, block)]
    return math.fsum(partials)


def lp_norm(f: GridFn, u: ExponentLike) -> float:
    """((1/q^{2n}) sum f^u)^{1/u}, or max f for u = inf."""
    u = Exponent.parse(u)
    if u.is_infinite:
        return float(f.values.max())
    p = float(u)
    mean = stable_sum(np.power(f.values, p)) / f.values.size
    return mean ** (1.0 / p)


def inner(f: GridFn, g: GridFn) -> float:
    """Normalized inner product (1/q^{2n}) sum f g."""
    return stable_sum(f.values * g.values) / f.values.size


def _check_arity(ctx: GroupCtx, fs: Sequence[GridFn]) -> None:
    if len(fs) != 2 * ctx.n:
        raise ArityMismatch(f"expected {2 * ctx.n} functions, got {len(fs)}")
    for f in fs:
        if f.ctx != ctx:
            raise ContextMismatch("function belongs to another group")


def _fiber_product(ctx: GroupCtx, arrays: Sequence[np.ndarray], skip: Optional[int] = None) -> np.ndarray:
    product = np.ones(ctx.order, dtype=np.float64)
    for j, values in enumerate(arrays, start=1):
        if j != skip:
            product *= values[ctx.projection_ranks(j)]
    return product


def lw_form(ctx: GroupCtx, fs: Sequence[GridFn]) -> float:
    """Loomis-Whitney form of 2n functions."""
    _check_arity(ctx, fs)
    return stable_sum(_fiber_product(ctx, [f.values for f in fs])) / ctx.order


def partial_values(ctx: GroupCtx, arrays: Sequence[np.ndarray], k: int) -> np.ndarray:
    """g(y) = (1/q) sum over the pi_k-fiber of y of prod_{j != k} f_j(pi_j)."""
    product = _fiber_product(ctx, arrays, skip=k)
    return np.bincount(ctx.projection_ranks(k), weights=product, minlength=ctx.plane_order) / ctx.q


def partial_form(ctx: GroupCtx, fs: Sequence[GridFn], k: int) -> GridFn:
    """Fiber sum with f_k removed; lw_form(fs) = inner(f_k, partial_form(fs, k))."""
    _check_arity(ctx, fs)
    ctx.axis(k)
    return GridFn(ctx, partial_values(ctx, [f.values for f in fs], k))


# -- n = 1: point-line incidences ----------------------------------------

def _require_plane(ctx: GroupCtx) -> None:
    if ctx.n != 1:
        raise WrongDimension(f"defined for n = 1 only, got n = {ctx.n}")


def incidence_neighbors(ctx: GroupCtx) -> np.ndarray:
    """nbr[x, y1] = rank of y = (y1, x2 - x1 y1): the q parameters (b1, b2)
    with x2 = b1 x1 + b2, for each point x = (x1, x2) of F_q^2."""
    _require_plane(ctx)
    key = "incidence"
    if key not in ctx._cache:
        f, q = ctx.field, ctx.q
        x = ctx.plane_points
        y1 = f.elements()[None, :]
        y2 = f.sub(x[:, 1:2], f.mul(x[:, 0:1], y1))
        ctx._cache[key] = np.broadcast_to(y1, y2.shape) * q + y2
    return ctx._cache[key]


def apply_A_values(ctx: GroupCtx, values: np.ndarray, adjoint: bool = False) -> np.ndarray:
    nbr = incidence_neighbors(ctx)
    q = ctx.q
    if not adjoint:
        return values[nbr].sum(axis=1) / q
    weights = np.repeat(values, q)
    return np.bincount(nbr.ravel(), weights=weights, minlength=ctx.plane_order) / q


def apply_A(ctx: GroupCtx, f: GridFn, adjoint: bool = False) -> GridFn:
    """(Af)(x) = (1/q) sum_{y : x1 y1 + y2 = x2} f(y); the adjoint sums over x."""
    _require_plane(ctx)
    return GridFn(ctx, apply_A_values(ctx, f.values, adjoint))


def bilinear_L(ctx: GroupCtx, f1: GridFn, f2: GridFn) -> float:
    """(1/q^3) sum over incident pairs x1 y1 + y2 = x2 of f1(x) f2(y)."""
    _require_plane(ctx)
    nbr = incidence_neighbors(ctx)
    return stable_sum(f1.values[:, None] * f2.values[nbr]) / ctx.q**3


def lw_form_swapped(ctx: GroupCtx, f1: GridFn, f2: GridFn) -> float:
    """(1/q^3) sum_{x1, x2, t} f1(x2, t + x1 x2) f2(x1, t)."""
    _require_plane(ctx)
    fld, q = ctx.field, ctx.q
    x1, x2, t = ctx.points.T
    first = x2 * q + fld.add(t, fld.mul(x1, x2))
    second = x1 * q + t
    return stable_sum(f1.values[first] * f2.values[second]) / ctx.order


# -- builders -------------------------------------------------------------

def constant(ctx: GroupCtx, c: float = 1.0) -> GridFn:
    return GridFn(ctx, np.full(ctx.plane_order, c, dtype=np.float64))


def indicator(ctx: GroupCtx, plane_ranks: Iterable[int]) -> GridFn:
    values = np.zeros(ctx.plane_order, dtype=np.float64)
    values[np.fromiter((int(r) for r in plane_ranks), dtype=np.int64)] = 1.0
    return GridFn(ctx, values)


def point_mass(ctx: GroupCtx, point: PlanePoint) -> GridFn:
    return indicator(ctx, [ctx.plane_rank(point)])


def _line_ranks(ctx: GroupCtx, slope: int, intercept: int) -> np.ndarray:
    """Ranks of {(x1, x2) : x2 = slope x1 + intercept}."""
    f, q = ctx.field, ctx.q
    x1 = f.elements()
    return x1 * q + f.add(f.mul(x1, slope), intercept)


def family_a(ctx: GroupCtx) -> Tuple[GridFn, GridFn]:
    """f1 = 1_{x2 = x1 + 1}, f2 = 1_{(1, 1)}."""
    _require_plane(ctx)
    return indicator(ctx, _line_ranks(ctx, 1, 1)), point_mass(ctx, PlanePoint.of(1, 1))


def family_b(ctx: GroupCtx) -> Tuple[GridFn, GridFn]:
    """g1 = 1_{(1, 1)}, g2 = 1_{x2 = 1 - x1}."""
    _require_plane(ctx)
    minus_one = ctx.field.neg(1)
    return point_mass(ctx, PlanePoint.of(1, 1)), indicator(ctx, _line_ranks(ctx, minus_one, 1))


def random_grid_fn(ctx: GroupCtx, rng: np.random.Generator, density: float = 1.0) -> GridFn:
    """I.i.d. Uniform(0, 1] values, optionally thinned to the given density."""
    values = 1.0 - rng.random(ctx.plane_order)
    if density < 1.0:
        values *= rng.random(ctx.plane_order) < density
    return GridFn(ctx, values)


def projection_indicators(K: HSubset) -> List[GridFn]:
    """[1_{pi_j(K)} for j = 1..2n]."""
    ctx = K.ctx
    ranks = K.ranks()
    return [indicator(ctx, np.unique(ctx.projection_ranks(j)[ranks])) for j in range(1, 2 * ctx.n + 1)]
