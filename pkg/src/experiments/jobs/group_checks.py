"""
Group verification job: group axioms, decomposition along pi_j, fibers,
straightening and the dilation orbits, checked over whole groups.
"""
import logging
from typing import Any, List, Optional

import numpy as np

from src.algebra.group import GroupCtx, expected_orbit_size, orbit_partition
from src.experiments.base import BaseEvaluator, CheckRecord

logger = logging.getLogger(__name__)

# Groups up to this order get exhaustive associativity; larger ones are sampled.
EXHAUSTIVE_ORDER = 343


def _first_bad(ctx: GroupCtx, ok: np.ndarray) -> Optional[List[int]]:
    bad = np.flatnonzero(~ok.reshape(-1))
    if bad.size == 0:
        return None
    return ctx.points[int(bad[0]) % ctx.order].tolist()


class GroupAxiomEvaluator(BaseEvaluator[GroupCtx]):
    """Exact checks of the Heisenberg group law and its projections."""

    def __init__(self, samples: int = 2000, seed: int = 0, name: Optional[str] = None):
        super().__init__(name)
        self.samples = samples
        self.seed = seed

    def _record(self, ctx: GroupCtx, check: str, ok: np.ndarray, **values: Any) -> CheckRecord:
        witness = _first_bad(ctx, ok)
        return CheckRecord(
            check=check,
            passed=witness is None,
            params={"n": ctx.n, "q": ctx.q},
            values=values,
            witness=None if witness is None else {"point": witness},
        )

    def _associativity(self, ctx: GroupCtx) -> CheckRecord:
        pts = ctx.points
        if ctx.order <= EXHAUSTIVE_ORDER:
            failures = 0
            witness = None
            bc = ctx.mul_codes(pts[:, None, :], pts[None, :, :])
            for a in pts:
                left = ctx.mul_codes(ctx.mul_codes(a, pts)[:, None, :], pts[None, :, :])
                right = ctx.mul_codes(a, bc)
                bad = np.any(left != right, axis=-1)
                if bad.any() and witness is None:
                    b, c = np.unravel_index(int(np.flatnonzero(bad)[0]), bad.shape)
                    witness = {"a": a.tolist(), "b": pts[b].tolist(), "c": pts[c].tolist()}
                failures += int(bad.sum())
            triples = ctx.order**3
            mode = "exhaustive"
        else:
            rng = np.random.default_rng(np.random.SeedSequence(self.seed))
            idx = rng.integers(ctx.order, size=(self.samples, 3))
            a, b, c = pts[idx[:, 0]], pts[idx[:, 1]], pts[idx[:, 2]]
            bad = np.any(
                ctx.mul_codes(ctx.mul_codes(a, b), c) != ctx.mul_codes(a, ctx.mul_codes(b, c)), axis=-1
            )
            failures = int(bad.sum())
            witness = None
            if failures:
                i = int(np.flatnonzero(bad)[0])
                witness = {"a": a[i].tolist(), "b": b[i].tolist(), "c": c[i].tolist()}
            triples = self.samples
            mode = "sampled"
        return CheckRecord(
            check="associativity",
            passed=failures == 0,
            params={"n": ctx.n, "q": ctx.q},
            values={"triples": triples, "mode": mode, "failures": failures},
            witness=witness,
        )

    def _identity_inverse(self, ctx: GroupCtx) -> CheckRecord:
        pts = ctx.points
        e = np.zeros(ctx.dim, dtype=np.int64)
        inv = ctx.inverse_codes(pts)
        ok = (
            np.all(ctx.mul_codes(pts, e) == pts, axis=1)
            & np.all(ctx.mul_codes(e, pts) == pts, axis=1)
            & ~ctx.mul_codes(pts, inv).any(axis=1)
            & ~ctx.mul_codes(inv, pts).any(axis=1)
        )
        return self._record(ctx, "identity_inverse", ok, points=ctx.order)

    def _noncommutativity(self, ctx: GroupCtx) -> CheckRecord:
        a = np.zeros(ctx.dim, dtype=np.int64)
        b = np.zeros(ctx.dim, dtype=np.int64)
        a[0], b[ctx.n] = 1, 1
        ab, ba = ctx.mul_codes(a, b), ctx.mul_codes(b, a)
        commutes = bool(np.array_equal(ab, ba))
        return CheckRecord(
            check="noncommutativity",
            passed=not commutes,
            params={"n": ctx.n, "q": ctx.q},
            values={"a": a.tolist(), "b": b.tolist(), "ab": ab.tolist(), "ba": ba.tolist()},
        )

    def _projection_checks(self, ctx: GroupCtx) -> List[CheckRecord]:
        f, m = ctx.field, 2 * ctx.n
        pts = ctx.points
        records = []
        for j in range(1, m + 1):
            ax = ctx.axis(j)
            proj = ctx.projection_ranks(j)

            # a = base * (x_j e_j, 0) with base in W_j
            base = pts.copy()
            base[:, ax.index] = 0
            base[:, m] = ctx.project_codes(j, pts)[:, -1]
            shift = np.zeros_like(pts)
            shift[:, ax.index] = pts[:, ax.index]
            recomposed = np.all(ctx.mul_codes(base, shift) == pts, axis=1)
            records.append(self._record(ctx, "decomposition", recomposed, axis=j))

            # the fiber through a is the left coset a L_j, and T_j makes it additive
            fiber_ok = np.ones(ctx.order, dtype=bool)
            straight_ok = np.ones(ctx.order, dtype=bool)
            straight = ctx.straighten_codes(j, pts)
            for s in f.elements():
                step = np.zeros(ctx.dim, dtype=np.int64)
                step[ax.index] = s
                moved = ctx.mul_codes(pts, step)
                fiber_ok &= proj[ctx.ranks_of(moved)] == proj
                straight_ok &= np.all(
                    ctx.straighten_codes(j, moved) == f.add(straight, step), axis=1
                )
            counts = np.bincount(proj, minlength=ctx.plane_order)
            fiber_ok &= counts[proj] == ctx.q
            records.append(self._record(ctx, "fiber_coset", fiber_ok, axis=j))
            records.append(self._record(ctx, "straighten_additive", straight_ok, axis=j))

            perm = ctx.straighten_ranks(j)
            hits = np.bincount(perm, minlength=ctx.order)
            records.append(self._record(ctx, "straighten_bijective", hits[perm] == 1, axis=j))
        return records

    def _orbit_checks(self, ctx: GroupCtx) -> CheckRecord:
        orbits = orbit_partition(ctx)
        sizes_ok = np.ones(ctx.order, dtype=bool)
        covered = np.zeros(ctx.order, dtype=np.int64)
        for orbit in orbits:
            members = np.fromiter(orbit, dtype=np.int64)
            covered[members] += 1
            leader = ctx.unrank(int(members.min()))
            if len(orbit) != expected_orbit_size(ctx, leader):
                sizes_ok[members] = False
        ok = sizes_ok & (covered == 1)
        return self._record(ctx, "orbit_sizes", ok, orbits=len(orbits))

    def evaluate(self, item: GroupCtx) -> List[CheckRecord]:
        ctx = item
        logger.info(f"Verifying H^{ctx.n}(F_{ctx.q}) with {ctx.order} points")
        records = [
            self._associativity(ctx),
            self._identity_inverse(ctx),
            self._noncommutativity(ctx),
        ]
        records.extend(self._projection_checks(ctx))
        records.append(self._orbit_checks(ctx))
        return records
