"""
Subgroups of the Heisenberg Group

Subgroup testing, closure, exhaustive enumeration, structural classification,
homogeneity under dilations, isotropic subspaces, complements and the
subgroup-counting formulas.

Over a prime field every subgroup G is either a product S x F_p (its kernel
G n Z is the whole centre) or a graph {(x, rho(x)) : x in S} over an
isotropic S with rho linear (trivial kernel). Over F_{p^r} the kernel can be
a proper subgroup of the centre; such subgroups are recorded as ``other``.
"""
import dataclasses
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy

from src.algebra.field import FieldCtx, field_create, field_from_order, subfield_elements
from src.algebra.group import GroupCtx, HPoint
from src.algebra.linalg import (
    Subspace,
    enumerate_subspaces,
    gr_count,
    ig_count,
    orth_complement,
    rref,
    span_codes,
)
from src.config.settings import settings
from src.exceptions import (
    BadField,
    BadRange,
    ContextMismatch,
    DimensionMismatch,
    NotHomogeneous,
    TooLarge,
    Unclassifiable,
)
from src.models.subset import HSubset

logger = logging.getLogger(__name__)

_CHUNK = 256


class SubgroupKind(str, Enum):
    """Structural type of a subgroup."""
    PRODUCT = "product"
    GRAPH = "graph"
    OTHER = "other"
    UNCLASSIFIED = "unclassified"


@dataclass(frozen=True)
class SubgroupRec:
    """An enumerated subgroup with its classification tags.

    Attributes:
        elements: Sorted point ranks
        generators: Point ranks generating the subgroup
        S: Horizontal projection pi_h(G) as a prime-field subspace; for
            r > 1 the subspace lives in F_p^{2nr} via base-p digits
        rho: For graphs, rho evaluated on the echelon basis of S
    """
    ctx: GroupCtx
    elements: Tuple[int, ...]
    generators: Tuple[int, ...] = ()
    kind: SubgroupKind = SubgroupKind.UNCLASSIFIED
    S: Optional[Subspace] = None
    rho: Optional[Tuple[int, ...]] = None
    homogeneous: Optional[bool] = None

    @property
    def order(self) -> int:
        return len(self.elements)

    def membership(self) -> HSubset:
        return HSubset.from_ranks(self.ctx, self.elements)

    def codes(self) -> np.ndarray:
        return self.ctx.points[np.asarray(self.elements, dtype=np.int64)]

    def to_dict(self, with_elements: bool = False) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "q": self.ctx.q,
            "n": self.ctx.n,
            "order": self.order,
            "kind": self.kind.value,
            "S_basis": [list(row) for row in self.S.basis] if self.S is not None else None,
            "rho": list(self.rho) if self.rho is not None else None,
            "homogeneous": self.homogeneous,
            "generators": [self.ctx.points[g].tolist() for g in self.generators],
        }
        if with_elements:
            data["elements"] = list(self.elements)
        return data


# -- membership tests -------------------------------------------------------

def _closed_under_mul(ctx: GroupCtx, mask: np.ndarray) -> bool:
    codes = ctx.points[mask]
    for start in range(0, len(codes), _CHUNK):
        block = ctx.mul_codes(codes[start:start + _CHUNK, None, :], codes[None, :, :])
        if not mask[ctx.ranks_of(block)].all():
            return False
    return True


def is_subgroup(ctx: GroupCtx, S: HSubset) -> bool:
    """True iff S is nonempty and closed under multiplication."""
    if S.ctx != ctx:
        raise ContextMismatch("subset belongs to another group")
    if S.size == 0:
        return False
    return _closed_under_mul(ctx, S.membership)


def _dilation_closed(ctx: GroupCtx, mask: np.ndarray) -> bool:
    codes = ctx.points[mask]
    for s in ctx.field.nonzero():
        if not mask[ctx.ranks_of(ctx.dilate_codes(int(s), codes))].all():
            return False
    return True


# -- isotropy ---------------------------------------------------------------

def _omega_table(field: FieldCtx, n: int, vectors: np.ndarray) -> np.ndarray:
    """Matrix of omega over all pairs of the given 2n-vectors."""
    x = vectors[:, None, :]
    y = vectors[None, :, :]
    total = np.zeros((len(vectors), len(vectors)), dtype=np.int64)
    for i in range(n):
        term = field.sub(field.mul(x[..., i], y[..., n + i]), field.mul(y[..., i], x[..., n + i]))
        total = field.add(total, term)
    return total


def is_isotropic(S: Subspace, n: int) -> bool:
    """True iff omega vanishes on every pair of basis vectors of S."""
    if S.ambient_dim != 2 * n:
        raise DimensionMismatch(f"subspace lives in dimension {S.ambient_dim}, expected {2 * n}")
    if S.dim < 2:
        return True
    return not _omega_table(S.field, n, S.matrix).any()


def _isotropic_codes(ctx: GroupCtx, vectors: np.ndarray) -> bool:
    if len(vectors) < 2:
        return True
    return not _omega_table(ctx.field, ctx.n, vectors).any()


def enumerate_isotropic(n: int, k: int, field: FieldCtx) -> List[Subspace]:
    """All k-dimensional isotropic subspaces of the symplectic field^{2n}."""
    return [S for S in enumerate_subspaces(2 * n, k, field) if is_isotropic(S, n)]


# -- horizontal projection --------------------------------------------------

def _horizontal_subspace(ctx: GroupCtx, xs: np.ndarray) -> Subspace:
    f, m = ctx.field, 2 * ctx.n
    if f.is_prime_field:
        return rref(f, xs, m)
    prime = field_create(f.p)
    flat = f.digits(xs).reshape(len(xs), m * f.r)
    return rref(prime, flat, m * f.r)


def _subspace_vectors(ctx: GroupCtx, S: Subspace) -> np.ndarray:
    """Echelon basis of S back in F_q code form."""
    f, m = ctx.field, 2 * ctx.n
    if f.is_prime_field:
        return S.matrix
    return np.asarray(f.from_digits(S.matrix.reshape(S.dim, m, f.r)), dtype=np.int64).reshape(S.dim, m)


# -- closure and enumeration ------------------------------------------------

def _finalize(rec: SubgroupRec) -> SubgroupRec:
    classified = classify_subgroup(rec)
    return dataclasses.replace(classified, homogeneous=is_homogeneous(classified))


def closure(ctx: GroupCtx, generators: Sequence[HPoint]) -> SubgroupRec:
    """Smallest subgroup containing the generators (breadth-first saturation)."""
    gens = [ctx.rank(g) for g in generators]
    members = np.zeros(ctx.order, dtype=bool)
    members[0] = True
    members[gens] = True
    frontier = np.unique(np.asarray([0, *gens], dtype=np.int64))
    gen_codes = ctx.points[np.asarray(gens, dtype=np.int64)]
    while frontier.size and len(gens):
        products = ctx.ranks_of(
            ctx.mul_codes(ctx.points[frontier][:, None, :], gen_codes[None, :, :])
        ).ravel()
        fresh = np.unique(products[~members[products]])
        members[fresh] = True
        frontier = fresh
    rec = SubgroupRec(
        ctx=ctx,
        elements=tuple(int(r) for r in np.flatnonzero(members)),
        generators=tuple(gens),
    )
    return _finalize(rec)


def enumerate_subgroups(ctx: GroupCtx) -> List[SubgroupRec]:
    """All subgroups, each once, ordered by (order, element ranks).

    Subgroups are grown layer by layer: every nontrivial p-group H' has a
    subgroup H of index p, and H' = <H, g> for any g in H' \\ H. So from each
    H we adjoin the elements g of its normalizer outside H, where
    <H, g> = H u Hg u ... u Hg^{p-1}. The record keeps the lexicographically
    smallest generator tuple met along the way.
    """
    if ctx.order > settings.MAX_SUBGROUP_GROUP_ORDER:
        raise TooLarge("subgroup enumeration", ctx.order, settings.MAX_SUBGROUP_GROUP_ORDER)

    pts = ctx.points
    p = ctx.field.p
    inverse_ranks = ctx.ranks_of(ctx.inverse_codes(pts))
    found: Dict[bytes, Tuple[np.ndarray, Tuple[int, ...]]] = {}

    trivial = np.zeros(1, dtype=np.int64)
    found[trivial.tobytes()] = (trivial, ())
    layer = [trivial.tobytes()]
    while layer:
        next_layer: List[bytes] = []
        for key in layer:
            elems, gens = found[key]
            members = np.zeros(ctx.order, dtype=bool)
            members[elems] = True

            normalizer = np.ones(ctx.order, dtype=bool)
            for h in gens:
                conj = ctx.mul_codes(ctx.mul_codes(pts, pts[h]), pts[inverse_ranks])
                normalizer &= members[ctx.ranks_of(conj)]

            covered = members.copy()
            coset_codes = pts[elems]
            for g in np.flatnonzero(normalizer & ~members):
                if covered[g]:
                    continue
                steps = ctx.field.mul(pts[g][None, :], np.arange(p, dtype=np.int64)[:, None])
                grown = np.unique(
                    ctx.ranks_of(ctx.mul_codes(coset_codes[None, :, :], steps[:, None, :]))
                )
                covered[grown] = True
                grown_key = grown.tobytes()
                candidate = gens + (int(g),)
                if grown_key in found:
                    if candidate < found[grown_key][1]:
                        found[grown_key] = (grown, candidate)
                else:
                    found[grown_key] = (grown, candidate)
                    next_layer.append(grown_key)
        logger.debug(f"Subgroup layer complete: {len(next_layer)} new subgroups")
        layer = next_layer

    records = [
        _finalize(
            SubgroupRec(ctx=ctx, elements=tuple(int(r) for r in elems), generators=gens)
        )
        for elems, gens in found.values()
    ]
    records.sort(key=lambda rec: (rec.order, rec.elements))
    logger.info(f"Enumerated {len(records)} subgroups of H^{ctx.n}(F_{ctx.q})")
    return records


# -- classification ---------------------------------------------------------

def classify_subgroup(rec: SubgroupRec) -> SubgroupRec:
    """Tag rec as product S x F_q, graph Gamma_S(rho), or other.

    Raises:
        Unclassifiable: over a prime field, when neither shape fits
    """
    ctx = rec.ctx
    m = 2 * ctx.n
    codes = rec.codes()
    xs = np.unique(codes[:, :m], axis=0)
    kernel = codes[~codes[:, :m].any(axis=1)]
    S = _horizontal_subspace(ctx, xs)

    if len(kernel) == ctx.q and rec.order == len(xs) * ctx.q:
        return dataclasses.replace(rec, kind=SubgroupKind.PRODUCT, S=S, rho=None)

    if len(kernel) == 1 and rec.order == len(xs):
        basis = _subspace_vectors(ctx, S)
        if not _isotropic_codes(ctx, basis):
            raise Unclassifiable("graph subgroup over a non-isotropic horizontal projection")
        lookup = {tuple(int(c) for c in row[:m]): int(row[m]) for row in codes}
        rho = tuple(lookup[tuple(int(c) for c in v)] for v in basis)
        return dataclasses.replace(rec, kind=SubgroupKind.GRAPH, S=S, rho=rho)

    if ctx.field.is_prime_field:
        raise Unclassifiable(
            f"subgroup of order {rec.order} with kernel {len(kernel)} matches no type"
        )
    return dataclasses.replace(rec, kind=SubgroupKind.OTHER, S=S, rho=None)


def is_homogeneous(rec: SubgroupRec) -> bool:
    """True iff rec is invariant under every dilation s*(x, t) = (s x, s^2 t)."""
    mask = np.zeros(rec.ctx.order, dtype=bool)
    mask[np.asarray(rec.elements, dtype=np.int64)] = True
    return _dilation_closed(rec.ctx, mask)


def matches_homogeneous_shape(rec: SubgroupRec) -> bool:
    """True iff rec is S x F_q or S x {0} with S an F_q-subspace (isotropic
    in the second case)."""
    ctx = rec.ctx
    m = 2 * ctx.n
    codes = rec.codes()
    xs = np.unique(codes[:, :m], axis=0)
    x_ranks = set(ctx.plane_ranks_of(xs).tolist())
    for s in ctx.field.nonzero():
        scaled = ctx.plane_ranks_of(ctx.field.mul(xs, int(s)))
        if not x_ranks.issuperset(scaled.tolist()):
            return False
    kernel = codes[~codes[:, :m].any(axis=1)]
    if len(kernel) == ctx.q and rec.order == len(xs) * ctx.q:
        return True
    if len(kernel) == 1 and not codes[:, m].any():
        return _isotropic_codes(ctx, xs)
    return False


def nonproduct_search(records: Sequence[SubgroupRec]) -> List[SubgroupRec]:
    """Records of kind other whose horizontal projection is not isotropic.

    Exploration mode only; nothing is asserted about the result.
    """
    hits = []
    for rec in records:
        if rec.kind != SubgroupKind.OTHER:
            continue
        xs = np.unique(rec.codes()[:, : 2 * rec.ctx.n], axis=0)
        if not _isotropic_codes(rec.ctx, xs):
            hits.append(rec)
    return hits


# -- constructions ----------------------------------------------------------

def _horizontal_span(ctx: GroupCtx, vectors: Sequence[Sequence[int]]) -> np.ndarray:
    vecs = np.asarray(vectors, dtype=np.int64).reshape(-1, 2 * ctx.n)
    ctx.field.check(vecs)
    return span_codes(ctx.field, vecs, over_prime_field=True)


def product_subgroup(ctx: GroupCtx, vectors: Sequence[Sequence[int]], subfield_degree: Optional[int] = None) -> HSubset:
    """S x F with S the F_p-span of ``vectors`` and F the subfield F_{p^d}
    (d defaults to r, i.e. F = F_q)."""
    d = ctx.field.r if subfield_degree is None else subfield_degree
    xs = _horizontal_span(ctx, vectors)
    ts = subfield_elements(ctx.field, d)
    codes = np.concatenate(
        [np.repeat(xs, len(ts), axis=0), np.tile(ts, len(xs))[:, None]], axis=1
    )
    return HSubset.from_codes(ctx, codes)


def graph_subgroup(ctx: GroupCtx, vectors: Sequence[Sequence[int]], rho: Sequence[int]) -> HSubset:
    """Gamma_S(rho) = {(x, rho(x)) : x in S} for S spanned over F_p by
    independent ``vectors`` and rho given by its values on them."""
    vecs = np.asarray(vectors, dtype=np.int64).reshape(-1, 2 * ctx.n)
    values = np.asarray(rho, dtype=np.int64).reshape(-1, 1)
    if len(values) != len(vecs):
        raise BadRange("rho needs one value per spanning vector")
    lifted = np.concatenate([vecs, values], axis=1)
    codes = span_codes(ctx.field, lifted, over_prime_field=True)
    if len(np.unique(codes[:, : 2 * ctx.n], axis=0)) != len(codes):
        raise BadRange("spanning vectors are not independent over the prime field")
    return HSubset.from_codes(ctx, codes)


# -- complements ------------------------------------------------------------

@dataclass(frozen=True)
class HeisComplement:
    """G^perp in F_q^{2n+1} with its group-theoretic flags."""
    subspace: Subspace
    subset: HSubset
    is_subgroup: bool
    homogeneous: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "basis": [list(row) for row in self.subspace.basis],
            "size": self.subset.size,
            "is_subgroup": self.is_subgroup,
            "homogeneous": self.homogeneous,
        }


def heis_complement(rec: SubgroupRec) -> HeisComplement:
    """Orthogonal complement of a homogeneous subgroup viewed as a subspace
    of F_q^{2n+1}.

    Raises:
        NotHomogeneous: rec is not dilation invariant
    """
    homogeneous = rec.homogeneous if rec.homogeneous is not None else is_homogeneous(rec)
    if not homogeneous:
        raise NotHomogeneous("complements are defined for homogeneous subgroups")
    ctx = rec.ctx
    G = rref(ctx.field, rec.codes(), ctx.dim)
    perp = orth_complement(G)
    subset = HSubset.from_codes(ctx, perp.elements())
    return HeisComplement(
        subspace=perp,
        subset=subset,
        is_subgroup=is_subgroup(ctx, subset),
        homogeneous=_dilation_closed(ctx, subset.membership),
    )


# -- counting ---------------------------------------------------------------

def subgroup_count_formula(n: int, p: int, reading: str = "power") -> int:
    """Number of subgroups of H^n(F_p).

    sum_k |Gr(k, 2n)| + sum_k w_k |IG(k, 2n)| where w_k = p^k counts the
    linear maps from a k-dimensional S to F_p. ``reading="linear"`` uses
    w_k = k p instead, for comparison.
    """
    if p == 2 or not sympy.isprime(p):
        raise BadField(f"subgroup count needs an odd prime, got {p}")
    if n < 1:
        raise BadRange(f"n must be >= 1, got {n}")
    if reading not in ("power", "linear"):
        raise BadRange(f"unknown reading {reading!r}")
    products = sum(gr_count(k, 2 * n, p) for k in range(2 * n + 1))
    graphs = 0
    for k in range(n + 1):
        maps = p**k if reading == "power" else k * p
        graphs += maps * ig_count(k, 2 * n, p)
    return products + graphs


def homogeneous_count_formula(n: int, q: int) -> int:
    """Number of homogeneous subgroups of H^n(F_q): sum |Gr| + sum |IG|."""
    field_from_order(q)
    if n < 1:
        raise BadRange(f"n must be >= 1, got {n}")
    return sum(gr_count(k, 2 * n, q) for k in range(2 * n + 1)) + sum(
        ig_count(k, 2 * n, q) for k in range(n + 1)
    )
