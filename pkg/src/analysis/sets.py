"""
Set Inequalities

Projection images and the set form of the Loomis-Whitney bound, the sharpness
constructions, point-line incidences over F_q^2 with Vinh's bound, covering
numbers of straightened sets, and the family of hyperplanes W for which a set
is covered by few translates of W^perp.

All counts are exact integers; only the Vinh square root and the log-scale
ratios are floating point.
"""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

import numpy as np
from joblib import Parallel, delayed

from src.algebra.field import FieldCtx
from src.algebra.group import GroupCtx, PlanePoint, fiber
from src.algebra.linalg import Subspace, enumerate_subspaces, orth_complement
from src.algebra.subgroups import closure
from src.config.settings import settings
from src.exceptions import BadRange, ContextMismatch, EmptySet, WrongDimension
from src.models.subset import HSubset

logger = logging.getLogger(__name__)

UNIFORM_DENSITIES = (0.1, 0.5, 0.9)
SAMPLER_REGIMES = ("uniform", "fibers", "cosets")


# -- projections ------------------------------------------------------------

def projection_ranks_image(K: HSubset, j: int) -> np.ndarray:
    """Sorted plane ranks of pi_j(K)."""
    return np.unique(K.ctx.projection_ranks(j)[K.ranks()])


def projection_size(K: HSubset, j: int) -> int:
    return int(projection_ranks_image(K, j).size)


def projection_image(K: HSubset, j: int) -> Set[PlanePoint]:
    """{pi_j(a) : a in K}."""
    ctx = K.ctx
    return {ctx.plane_unrank(int(r)) for r in projection_ranks_image(K, j)}


def projection_sizes(K: HSubset) -> List[int]:
    return [projection_size(K, j) for j in range(1, 2 * K.ctx.n + 1)]


# -- sharpness constructions ------------------------------------------------

def sharp_example(
    ctx: GroupCtx,
    kind: str,
    t0: int = 0,
    A: Optional[Iterable[int]] = None,
    B: Optional[Iterable[int]] = None,
) -> HSubset:
    """Extremal sets for the projection bounds.

    line_t0: {(s e_1, t0)}; flat: {(x, t0) : x_{n+1} = ... = x_{2n} = 0};
    box (n = 1): A x B x F_q.
    """
    pts = ctx.points
    n = ctx.n
    if kind in ("line_t0", "flat"):
        ctx.field.check(t0)
        on_level = pts[:, 2 * n] == t0
        if kind == "line_t0":
            mask = on_level & ~pts[:, 1:2 * n].any(axis=1)
        else:
            mask = on_level & ~pts[:, n:2 * n].any(axis=1)
        return HSubset(ctx, mask)
    if kind == "box":
        if n != 1:
            raise WrongDimension(f"the box example needs n = 1, got n = {n}")
        a = np.asarray(sorted(set(A or [])), dtype=np.int64)
        b = np.asarray(sorted(set(B or [])), dtype=np.int64)
        ctx.field.check(a)
        ctx.field.check(b)
        return HSubset(ctx, np.isin(pts[:, 0], a) & np.isin(pts[:, 1], b))
    raise BadRange(f"unknown sharp example {kind!r}")


def exact_log_q(value: int, q: int) -> Optional[int]:
    """e with value = q^e, or None when value is not a power of q."""
    if value < 1:
        return None
    e = 0
    while value % q == 0:
        value //= q
        e += 1
    return e if value == 1 else None


@dataclass
class LWSetReport:
    """|K| against q^{1/(2n+1)} prod_j |pi_j(K)|^{(n+1)/(n(2n+1))}.

    ``exact_exponent`` is the q-exponent of the ratio when every count is a
    power of q. The max-projection bounds are recorded, never asserted.
    """
    q: int
    n: int
    size: int
    projection_sizes: List[int]
    rhs: float
    ratio: float
    exact_exponent: Optional[Fraction]
    max_projection: int
    max_projection_bound: float
    plane_max_projection_bound: Optional[float] = None

    @property
    def rhs_exponent(self) -> Fraction:
        return Fraction(self.n + 1, self.n * (2 * self.n + 1))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "q": self.q,
            "n": self.n,
            "size": self.size,
            "projection_sizes": self.projection_sizes,
            "rhs_exponent": self.rhs_exponent,
            "rhs": self.rhs,
            "ratio": self.ratio,
            "exact_exponent": self.exact_exponent,
            "max_projection": self.max_projection,
            "max_projection_bound": self.max_projection_bound,
            "plane_max_projection_bound": self.plane_max_projection_bound,
        }


def lw_set_check(K: HSubset) -> LWSetReport:
    ctx = K.ctx
    if K.size == 0:
        raise EmptySet("the set bound needs a nonempty set")
    n, q = ctx.n, ctx.q
    sizes = projection_sizes(K)
    weight = Fraction(n + 1, n * (2 * n + 1))
    scale = Fraction(1, 2 * n + 1)

    logs = [exact_log_q(K.size, q)] + [exact_log_q(s, q) for s in sizes]
    exact: Optional[Fraction] = None
    if all(e is not None for e in logs):
        exact = Fraction(logs[0]) - scale - weight * sum(logs[1:])
        ratio = float(q) ** float(exact)
        rhs = float(q) ** float(scale + weight * sum(logs[1:]))
    else:
        log_rhs = float(scale) * math.log(q) + float(weight) * sum(math.log(s) for s in sizes)
        rhs = math.exp(log_rhs)
        ratio = math.exp(math.log(K.size) - log_rhs)

    max_bound = (K.size ** (2 * n + 1) / q) ** (1.0 / (2 * (n + 1)))
    plane_bound = None
    if n == 1:
        plane_bound = min(math.sqrt(K.size * q), K.size / math.sqrt(q))
    return LWSetReport(
        q=q,
        n=n,
        size=K.size,
        projection_sizes=sizes,
        rhs=rhs,
        ratio=ratio,
        exact_exponent=exact,
        max_projection=max(sizes),
        max_projection_bound=max_bound,
        plane_max_projection_bound=plane_bound,
    )


# -- point-line incidences --------------------------------------------------

@dataclass(frozen=True)
class Line:
    """y = slope * x + value, or the vertical line x = value when slope is None."""
    slope: Optional[int]
    value: int

    @property
    def is_vertical(self) -> bool:
        return self.slope is None

    def to_list(self) -> List[Optional[int]]:
        return [self.slope, self.value]


@dataclass(frozen=True)
class IncidenceInstance:
    field: FieldCtx
    points: Tuple[Tuple[int, int], ...]
    lines: Tuple[Line, ...]

    def __post_init__(self) -> None:
        if len(set(self.points)) != len(self.points):
            raise BadRange("duplicate points in incidence instance")
        if len(set(self.lines)) != len(self.lines):
            raise BadRange("duplicate lines in incidence instance")
        if self.points:
            self.field.check(np.asarray(self.points, dtype=np.int64))
        for line in self.lines:
            self.field.check(line.value)
            if line.slope is not None:
                self.field.check(line.slope)

    @classmethod
    def build(
        cls, field: FieldCtx, points: Iterable[Sequence[int]], lines: Iterable[Line]
    ) -> "IncidenceInstance":
        """Deduplicating constructor with sorted contents."""
        pts = sorted({(int(a), int(b)) for a, b in points})
        return cls(field=field, points=tuple(pts), lines=tuple(sorted(set(lines), key=_line_key)))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "q": self.field.q,
            "points": [list(p) for p in self.points],
            "lines": [line.to_list() for line in self.lines],
        }


def _line_key(line: Line) -> Tuple[int, int, int]:
    return (1, 0, line.value) if line.slope is None else (0, line.slope, line.value)


def incidence_count(inst: IncidenceInstance) -> int:
    """Exact number of incident (point, line) pairs."""
    if not inst.points or not inst.lines:
        return 0
    f = inst.field
    pts = np.asarray(inst.points, dtype=np.int64)
    px, py = pts[:, 0], pts[:, 1]
    sloped = [line for line in inst.lines if not line.is_vertical]
    vertical = np.asarray([line.value for line in inst.lines if line.is_vertical], dtype=np.int64)

    count = 0
    if sloped:
        m = np.asarray([line.slope for line in sloped], dtype=np.int64)[:, None]
        c = np.asarray([line.value for line in sloped], dtype=np.int64)[:, None]
        count += int(np.count_nonzero(f.add(f.mul(m, px[None, :]), c) == py[None, :]))
    if vertical.size:
        count += int(np.count_nonzero(vertical[:, None] == px[None, :]))
    return count


def vinh_bound(inst: IncidenceInstance) -> float:
    """|P||L|/q + 2 sqrt(q |P||L|)."""
    q = inst.field.q
    pl = len(inst.points) * len(inst.lines)
    return pl / q + 2.0 * math.sqrt(q * pl)


def all_lines(field: FieldCtx) -> List[Line]:
    """The q^2 + q lines of F_q^2."""
    elems = [int(e) for e in field.elements()]
    lines = [Line(m, c) for m in elems for c in elems]
    lines.extend(Line(None, x0) for x0 in elems)
    return lines


def random_incidence_instance(
    field: FieldCtx, rng: np.random.Generator, include_vertical: bool = True
) -> IncidenceInstance:
    """Random points and lines, each kept with an independent random density."""
    q = field.q
    point_density, line_density = rng.random(2)
    grid = np.indices((q, q)).reshape(2, -1).T
    points = grid[rng.random(q * q) < point_density]
    candidates = all_lines(field)
    if not include_vertical:
        candidates = candidates[: q * q]
    keep = rng.random(len(candidates)) < line_density
    lines = [line for line, k in zip(candidates, keep) if k]
    return IncidenceInstance.build(field, points.tolist(), lines)


@dataclass
class IncidenceSetReport:
    """|K| <= I(P, L) <= |P||L|/q + 2 sqrt(q |P||L|) with P = pi_1(K), L = pi_2(K)."""
    q: int
    size: int
    points: int
    lines: int
    incidences: int
    bound: float
    max_projection_bound: float

    @property
    def lower_holds(self) -> bool:
        return self.size <= self.incidences

    @property
    def upper_holds(self) -> bool:
        return self.incidences <= self.bound * (1 + 1e-12)

    @property
    def holds(self) -> bool:
        return self.lower_holds and self.upper_holds

    def to_dict(self) -> Dict[str, Any]:
        return {
            "q": self.q,
            "size": self.size,
            "points": self.points,
            "lines": self.lines,
            "incidences": self.incidences,
            "bound": self.bound,
            "max_projection_bound": self.max_projection_bound,
            "holds": self.holds,
        }


def incidence_instance_of(K: HSubset) -> IncidenceInstance:
    """pi_1(K) as points (a1, a2) and pi_2(K) as lines y = b1 x + b2.

    For a = (x1, x2, t): pi_1(a) = (x2, t + x1 x2 / 2), pi_2(a) = (x1, t - x1 x2 / 2)
    and a1 b1 + b2 = a2, so every point of K yields an incident pair.
    """
    ctx = K.ctx
    if ctx.n != 1:
        raise WrongDimension(f"the incidence reduction needs n = 1, got n = {ctx.n}")
    firsts = ctx.plane_points[projection_ranks_image(K, 1)]
    seconds = ctx.plane_points[projection_ranks_image(K, 2)]
    lines = [Line(int(b1), int(b2)) for b1, b2 in seconds]
    return IncidenceInstance.build(ctx.field, firsts.tolist(), lines)


def incidence_set_check(K: HSubset) -> IncidenceSetReport:
    if K.ctx.n != 1:
        raise WrongDimension(f"the incidence reduction needs n = 1, got n = {K.ctx.n}")
    if K.size == 0:
        raise EmptySet("the incidence check needs a nonempty set")
    inst = incidence_instance_of(K)
    q = K.ctx.q
    return IncidenceSetReport(
        q=q,
        size=K.size,
        points=len(inst.points),
        lines=len(inst.lines),
        incidences=incidence_count(inst),
        bound=vinh_bound(inst),
        max_projection_bound=min(math.sqrt(K.size * q), K.size / math.sqrt(q)),
    )


# -- coverings --------------------------------------------------------------

def _covering_of_codes(ctx: GroupCtx, codes: np.ndarray, direction: np.ndarray) -> int:
    f = ctx.field
    nz = np.flatnonzero(direction)
    if nz.size == 0:
        raise BadRange("covering direction must be nonzero")
    i = int(nz[0])
    coef = f.mul(codes[:, i], f.inv(int(direction[i])))
    reps = f.sub(codes, f.mul(coef[:, None], direction[None, :]))
    return int(np.unique(ctx.ranks_of(reps)).size)


def additive_covering(S: HSubset, direction: Sequence[int]) -> int:
    """Number of additive translates a + span(v) of F_q^{2n+1} meeting S.

    Each coset is named by its representative a - (a_i / v_i) v, where i is
    the first nonzero coordinate of v.
    """
    ctx = S.ctx
    v = np.asarray(direction, dtype=np.int64)
    if v.shape != (ctx.dim,):
        raise ContextMismatch(f"direction has shape {v.shape}, expected ({ctx.dim},)")
    ctx.field.check(v)
    if S.size == 0:
        return 0
    return _covering_of_codes(ctx, S.codes(), v)


def straightened(K: HSubset, j: int) -> HSubset:
    """T_j(K)."""
    ctx = K.ctx
    return HSubset.from_ranks(ctx, ctx.straighten_ranks(j)[K.ranks()])


def covering_number(K: HSubset, j: int) -> int:
    """Minimal number of translates of W_j^perp = L_j covering T_j(K)."""
    ctx = K.ctx
    ax = ctx.axis(j)
    direction = np.zeros(ctx.dim, dtype=np.int64)
    direction[ax.index] = 1
    return additive_covering(straightened(K, j), direction)


# -- hyperplane families ----------------------------------------------------

def chen_bounds(K: HSubset, r: int) -> Tuple[Optional[float], Optional[float]]:
    """(q^{2n-1} r if r <= |K|/2, r q^{4n} / ((q^{2n} - r)|K|) if 0 < r < q^{2n});
    None where a branch does not apply."""
    q, n = K.ctx.q, K.ctx.n
    plane = q ** (2 * n)
    first = float(q ** (2 * n - 1) * r) if 2 * r <= K.size else None
    second = None
    if 0 < r < plane and K.size:
        second = r * q ** (4 * n) / ((plane - r) * K.size)
    return first, second


@dataclass
class ChenReport:
    """Hyperplanes W with K covered by at most r translates of W^perp."""
    q: int
    n: int
    size: int
    r: int
    hyperplanes: int
    members: List[Subspace]
    coverings: List[int]
    bounds: Tuple[Optional[float], Optional[float]]

    @property
    def family_size(self) -> int:
        return len(self.members)

    @property
    def in_regime(self) -> bool:
        return any(b is not None for b in self.bounds)

    @property
    def bound_holds(self) -> Tuple[Optional[bool], Optional[bool]]:
        return tuple(None if b is None else self.family_size <= b + 1e-9 for b in self.bounds)

    @property
    def holds(self) -> bool:
        return all(h is not False for h in self.bound_holds)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "q": self.q,
            "n": self.n,
            "size": self.size,
            "r": self.r,
            "hyperplanes": self.hyperplanes,
            "family_size": self.family_size,
            "members": [[list(row) for row in W.basis] for W in self.members],
            "bound_first": self.bounds[0],
            "bound_second": self.bounds[1],
            "holds_first": self.bound_holds[0],
            "holds_second": self.bound_holds[1],
            "in_regime": self.in_regime,
        }


def _hyperplanes(ctx: GroupCtx) -> List[Tuple[Subspace, np.ndarray]]:
    key = "hyperplanes"
    if key not in ctx._cache:
        planes = enumerate_subspaces(ctx.dim, ctx.dim - 1, ctx.field)
        ctx._cache[key] = [(W, orth_complement(W).matrix[0]) for W in planes]
    return ctx._cache[key]


def chen_family(K: HSubset, r: int, n_jobs: Optional[int] = None) -> ChenReport:
    """All 2n-dimensional W of F_q^{2n+1} with K covered by <= r translates of W^perp."""
    ctx = K.ctx
    if not 1 <= r < ctx.plane_order:
        raise BadRange(f"r must lie in [1, {ctx.plane_order}), got {r}")
    if K.size == 0:
        raise EmptySet("the hyperplane family needs a nonempty set")
    planes = _hyperplanes(ctx)
    codes = K.codes()
    coverings = Parallel(n_jobs=n_jobs or settings.N_JOBS)(
        delayed(_covering_of_codes)(ctx, codes, normal) for _, normal in planes
    )
    members = [W for (W, _), c in zip(planes, coverings) if c <= r]
    return ChenReport(
        q=ctx.q,
        n=ctx.n,
        size=K.size,
        r=r,
        hyperplanes=len(planes),
        members=members,
        coverings=list(coverings),
        bounds=chen_bounds(K, r),
    )


@dataclass
class VerticalFamilyReport:
    """If fewer than 2n hyperplanes admit an r-covering, some W_j needs more
    than r translates of L_j to cover K."""
    r: int
    vertical_coverings: List[int]
    family_size: int
    threshold: Fraction
    below_threshold: bool

    @property
    def premise(self) -> bool:
        return len(self.vertical_coverings) > self.family_size

    @property
    def conclusion(self) -> bool:
        return any(c > self.r for c in self.vertical_coverings)

    @property
    def holds(self) -> bool:
        return not self.premise or self.conclusion

    def to_dict(self) -> Dict[str, Any]:
        return {
            "r": self.r,
            "vertical_coverings": self.vertical_coverings,
            "family_size": self.family_size,
            "threshold": self.threshold,
            "below_threshold": self.below_threshold,
            "premise": self.premise,
            "conclusion": self.conclusion,
            "holds": self.holds,
        }


def vertical_family_check(
    K: HSubset, r: int, n_jobs: Optional[int] = None, family: Optional[ChenReport] = None
) -> VerticalFamilyReport:
    """Tie the hyperplane family to the vertical projections.

    ``below_threshold`` records whether r < n|K|/q^{2n}, the range of r in
    which the second hyperplane bound is compared with the projections.
    """
    ctx = K.ctx
    report = family if family is not None else chen_family(K, r, n_jobs=n_jobs)
    threshold = Fraction(ctx.n * K.size, ctx.plane_order)
    coverings = []
    for j in range(1, 2 * ctx.n + 1):
        direction = np.zeros(ctx.dim, dtype=np.int64)
        direction[ctx.axis(j).index] = 1
        coverings.append(additive_covering(K, direction))
    return VerticalFamilyReport(
        r=r,
        vertical_coverings=coverings,
        family_size=report.family_size,
        threshold=threshold,
        below_threshold=r < threshold,
    )


# -- random sets ------------------------------------------------------------

def random_subset(ctx: GroupCtx, rng: np.random.Generator, regime: str = "uniform") -> HSubset:
    """Random K from one of three regimes.

    uniform: each point kept with a density drawn from 0.1, 0.5, 0.9;
    fibers: union of up to q random pi_j-fibers;
    cosets: left coset g H of the subgroup generated by one or two random points.
    """
    if regime == "uniform":
        density = UNIFORM_DENSITIES[int(rng.integers(len(UNIFORM_DENSITIES)))]
        return HSubset(ctx, rng.random(ctx.order) < density)
    if regime == "fibers":
        ranks: List[int] = []
        for _ in range(int(rng.integers(1, ctx.q + 1))):
            j = int(rng.integers(1, 2 * ctx.n + 1))
            base = ctx.plane_unrank(int(rng.integers(ctx.plane_order)))
            ranks.extend(ctx.rank(a) for a in fiber(ctx, j, base))
        return HSubset.from_ranks(ctx, ranks)
    if regime == "cosets":
        gens = [ctx.unrank(int(g)) for g in rng.integers(ctx.order, size=int(rng.integers(1, 3)))]
        H = closure(ctx, gens)
        g = ctx.points[int(rng.integers(ctx.order))]
        return HSubset.from_codes(ctx, ctx.mul_codes(g[None, :], H.codes()))
    raise BadRange(f"unknown sampler regime {regime!r}")


@dataclass
class SetCorpus:
    """Seeded corpus of random sets, one child seed per set."""
    ctx: GroupCtx
    count: int
    seed: int = 0
    regimes: Sequence[str] = field(default_factory=lambda: SAMPLER_REGIMES)

    def __iter__(self) -> Iterator[Tuple[int, HSubset]]:
        children = np.random.SeedSequence(self.seed).spawn(self.count)
        for i, child in enumerate(children):
            rng = np.random.default_rng(child)
            yield i, random_subset(self.ctx, rng, self.regimes[i % len(self.regimes)])
