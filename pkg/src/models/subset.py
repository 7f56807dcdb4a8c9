"""
Subsets of H^n(F_q)

A subset is a dense boolean membership table indexed by point rank.
"""
from functools import cached_property
from typing import TYPE_CHECKING, Any, Dict, Iterable, List

import numpy as np

from src.exceptions import ContextMismatch

if TYPE_CHECKING:
    from src.algebra.group import GroupCtx, HPoint


class HSubset:
    """Membership structure over the q^{2n+1} points of a Heisenberg group."""

    def __init__(self, ctx: "GroupCtx", membership: np.ndarray):
        mask = np.asarray(membership, dtype=bool)
        if mask.shape != (ctx.order,):
            raise ContextMismatch(
                f"membership table has shape {mask.shape}, expected ({ctx.order},)"
            )
        mask = mask.copy()
        mask.setflags(write=False)
        self.ctx = ctx
        self.membership = mask

    @classmethod
    def empty(cls, ctx: "GroupCtx") -> "HSubset":
        return cls(ctx, np.zeros(ctx.order, dtype=bool))

    @classmethod
    def full(cls, ctx: "GroupCtx") -> "HSubset":
        return cls(ctx, np.ones(ctx.order, dtype=bool))

    @classmethod
    def from_ranks(cls, ctx: "GroupCtx", ranks: Iterable[int]) -> "HSubset":
        mask = np.zeros(ctx.order, dtype=bool)
        idx = np.fromiter((int(r) for r in ranks), dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= ctx.order):
            raise ContextMismatch("rank outside the group")
        mask[idx] = True
        return cls(ctx, mask)

    @classmethod
    def from_points(cls, ctx: "GroupCtx", points: Iterable["HPoint"]) -> "HSubset":
        return cls.from_ranks(ctx, (ctx.rank(a) for a in points))

    @classmethod
    def from_codes(cls, ctx: "GroupCtx", codes: np.ndarray) -> "HSubset":
        codes = np.asarray(codes, dtype=np.int64).reshape(-1, ctx.dim)
        return cls.from_ranks(ctx, ctx.ranks_of(codes))

    @cached_property
    def size(self) -> int:
        return int(np.count_nonzero(self.membership))

    def __len__(self) -> int:
        return self.size

    def __contains__(self, a: "HPoint") -> bool:
        return bool(self.membership[self.ctx.rank(a)])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HSubset):
            return NotImplemented
        return self.ctx == other.ctx and bool(np.array_equal(self.membership, other.membership))

    def __hash__(self) -> int:
        return hash((self.ctx, self.membership.tobytes()))

    def __repr__(self) -> str:
        return f"HSubset(n={self.ctx.n}, q={self.ctx.q}, size={self.size})"

    def ranks(self) -> np.ndarray:
        return np.flatnonzero(self.membership)

    def codes(self) -> np.ndarray:
        return self.ctx.points[self.membership]

    def points(self) -> List["HPoint"]:
        return [self.ctx.unrank(int(r)) for r in self.ranks()]

    def union(self, other: "HSubset") -> "HSubset":
        return HSubset(self.ctx, self.membership | other.membership)

    def intersection(self, other: "HSubset") -> "HSubset":
        return HSubset(self.ctx, self.membership & other.membership)

    def to_dict(self) -> Dict[str, Any]:
        return {"q": self.ctx.q, "n": self.ctx.n, "points": self.codes().tolist()}

    @classmethod
    def from_dict(cls, ctx: "GroupCtx", data: Dict[str, Any]) -> "HSubset":
        if data.get("q") != ctx.q or data.get("n") != ctx.n:
            raise ContextMismatch("serialized set belongs to another group")
        return cls.from_codes(ctx, np.asarray(data["points"], dtype=np.int64))
