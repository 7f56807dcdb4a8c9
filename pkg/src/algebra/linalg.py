"""
Linear Algebra over Finite Fields

Subspaces in canonical reduced row-echelon form, orthogonal complements for
the standard dot product, echelon-form enumeration of Grassmannians and the
Gaussian-binomial counts that go with them.
"""
import itertools
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from src.algebra.field import FieldCtx
from src.config.settings import settings
from src.exceptions import BadRange, ContextMismatch, TooLarge

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Subspace:
    """Row space of an echelon basis over ``field``.

    Two subspaces are equal iff their fields, ambient dimensions and
    echelon bases coincide.
    """
    field: FieldCtx
    ambient_dim: int
    basis: Tuple[Tuple[int, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def pivots(self) -> Tuple[int, ...]:
        return tuple(next(i for i, c in enumerate(row) if c) for row in self.basis)

    @property
    def matrix(self) -> np.ndarray:
        return np.asarray(self.basis, dtype=np.int64).reshape(self.dim, self.ambient_dim)

    @cached_property
    def _element_codes(self) -> np.ndarray:
        f = self.field
        if self.dim == 0:
            return np.zeros((1, self.ambient_dim), dtype=np.int64)
        coeffs = np.indices((f.q,) * self.dim, dtype=np.int64).reshape(self.dim, -1).T
        acc = np.zeros((coeffs.shape[0], self.ambient_dim), dtype=np.int64)
        for i, row in enumerate(self.matrix):
            acc = f.add(acc, f.mul(coeffs[:, i:i + 1], row[None, :]))
        return acc

    def elements(self) -> np.ndarray:
        """All q^dim vectors, shape (q^dim, ambient_dim)."""
        return self._element_codes

    def contains(self, v: Sequence[int]) -> bool:
        return rref(self.field, [*self.basis, tuple(v)], self.ambient_dim).dim == self.dim

    def to_dict(self) -> Dict[str, Any]:
        return {
            "field": self.field.to_dict(),
            "ambient_dim": self.ambient_dim,
            "basis": [list(row) for row in self.basis],
        }


def rref(field: FieldCtx, rows: Sequence[Sequence[int]], ambient_dim: Optional[int] = None) -> Subspace:
    """Canonical reduced row-echelon basis of the row space of ``rows``."""
    mat = np.asarray(rows, dtype=np.int64)
    if ambient_dim is None:
        if mat.ndim != 2:
            raise BadRange("ambient_dim is required for an empty row list")
        ambient_dim = mat.shape[1]
    mat = mat.reshape(-1, ambient_dim).copy()
    field.check(mat)

    f = field
    lead = 0
    for col in range(ambient_dim):
        if lead == mat.shape[0]:
            break
        nz = np.flatnonzero(mat[lead:, col])
        if nz.size == 0:
            continue
        pivot = lead + int(nz[0])
        if pivot != lead:
            mat[[lead, pivot]] = mat[[pivot, lead]]
        mat[lead] = f.mul(mat[lead], f.inv(int(mat[lead, col])))
        for r in range(mat.shape[0]):
            if r != lead and mat[r, col]:
                mat[r] = f.sub(mat[r], f.mul(mat[lead], int(mat[r, col])))
        lead += 1

    basis = tuple(tuple(int(c) for c in row) for row in mat[:lead])
    return Subspace(field=field, ambient_dim=ambient_dim, basis=basis)


def orth_complement(S: Subspace) -> Subspace:
    """S^perp for the standard dot product sum x_i y_i."""
    f, m = S.field, S.ambient_dim
    pivots = S.pivots
    free = [c for c in range(m) if c not in pivots]
    rows = []
    mat = S.matrix
    for c in free:
        v = np.zeros(m, dtype=np.int64)
        v[c] = 1
        for k, pc in enumerate(pivots):
            v[pc] = f.neg(int(mat[k, c]))
        rows.append(v)
    return rref(f, rows, m)


def gaussian_bracket(m: int, q: int) -> int:
    """[m]_q = 1 + q + ... + q^{m-1} (so [0]_q = 0)."""
    if m < 0 or q < 2:
        raise BadRange(f"gaussian bracket needs m >= 0 and q >= 2, got m={m}, q={q}")
    return sum(q**i for i in range(m))


def q_factorial(m: int, q: int) -> int:
    """[m]_q! with [0]_q! = 1."""
    result = 1
    for i in range(1, m + 1):
        result *= gaussian_bracket(i, q)
    return result


def gr_count(k: int, m: int, q: int) -> int:
    """Number of k-dimensional subspaces of F_q^m."""
    if not 0 <= k <= m:
        raise BadRange(f"Gr needs 0 <= k <= m, got k={k}, m={m}")
    return q_factorial(m, q) // (q_factorial(k, q) * q_factorial(m - k, q))


def ig_count(k: int, m: int, q: int) -> int:
    """Number of k-dimensional isotropic subspaces of the symplectic F_q^m."""
    if m % 2:
        raise BadRange(f"isotropic Grassmannian needs an even ambient dimension, got {m}")
    n = m // 2
    if not 0 <= k <= n:
        raise BadRange(f"IG needs 0 <= k <= n, got k={k}, n={n}")
    count = q_factorial(n, q) // (q_factorial(k, q) * q_factorial(n - k, q))
    for i in range(n - k + 1, n + 1):
        count *= q**i + 1
    return count


def _echelon_forms(m: int, k: int, field: FieldCtx) -> Iterator[Subspace]:
    q = field.q
    for pivots in itertools.combinations(range(m), k):
        slots = [
            (row, col)
            for row, pc in enumerate(pivots)
            for col in range(pc + 1, m)
            if col not in pivots
        ]
        for values in itertools.product(range(q), repeat=len(slots)):
            mat = [[0] * m for _ in range(k)]
            for row, pc in enumerate(pivots):
                mat[row][pc] = 1
            for (row, col), v in zip(slots, values):
                mat[row][col] = v
            yield Subspace(field=field, ambient_dim=m, basis=tuple(tuple(r) for r in mat))


def enumerate_subspaces(ambient_dim: int, k: int, field: FieldCtx) -> List[Subspace]:
    """All k-dimensional subspaces of field^ambient_dim, each exactly once."""
    if not 0 <= k <= ambient_dim:
        raise BadRange(f"need 0 <= k <= {ambient_dim}, got {k}")
    expected = gr_count(k, ambient_dim, field.q)
    if expected > settings.MAX_SUBSPACE_COUNT:
        raise TooLarge("subspace enumeration", expected, settings.MAX_SUBSPACE_COUNT)
    found = list(_echelon_forms(ambient_dim, k, field))
    logger.debug(f"Enumerated {len(found)} subspaces of dimension {k} in F_{field.q}^{ambient_dim}")
    return found


def span_codes(field: FieldCtx, vectors: np.ndarray, over_prime_field: bool = True) -> np.ndarray:
    """All linear combinations of ``vectors`` with prime-field (or full-field)
    coefficients, deduplicated and sorted lexicographically."""
    vecs = np.asarray(vectors, dtype=np.int64)
    if vecs.ndim != 2:
        raise ContextMismatch("span_codes expects a 2-D array of vectors")
    k, m = vecs.shape
    if k == 0:
        return np.zeros((1, m), dtype=np.int64)
    radix = field.p if over_prime_field else field.q
    coeffs = np.indices((radix,) * k, dtype=np.int64).reshape(k, -1).T
    acc = np.zeros((coeffs.shape[0], m), dtype=np.int64)
    for i in range(k):
        acc = field.add(acc, field.mul(coeffs[:, i:i + 1], vecs[i][None, :]))
    return np.unique(acc, axis=0)
