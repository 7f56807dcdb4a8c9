"""
Finite Field Arithmetic

Exact arithmetic in F_q for q = p^r with p an odd prime.

Elements are plain integer codes in [0, q). For r > 1 the base-p digits of a
code are the coefficients of a polynomial modulo the context's monic
irreducible modulus, constant term first. Every arithmetic method accepts
either Python integers or numpy integer arrays, so the same context serves
scalar group arithmetic and vectorized whole-group scans.
"""
import itertools
import logging
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Callable, Dict, List, NewType, Optional, Sequence, Tuple, Union

import numpy as np
import sympy

from src.config.settings import settings
from src.exceptions import (
    BadField,
    BadRange,
    ContextMismatch,
    DivisionByZero,
    EvenCharacteristic,
    NotPrime,
    ReducibleModulus,
    TooLarge,
)

logger = logging.getLogger(__name__)

FieldElem = NewType("FieldElem", int)
Codes = Union[int, np.ndarray]


def _poly_rem(num: List[int], den: Sequence[int], p: int) -> List[int]:
    """Remainder of num modulo a monic den over F_p (constant-first lists)."""
    num = list(num)
    d = len(den) - 1
    for deg in range(len(num) - 1, d - 1, -1):
        c = num[deg] % p
        if c:
            shift = deg - d
            for k, coef in enumerate(den):
                num[shift + k] = (num[shift + k] - c * coef) % p
    return [c % p for c in num[:d]]


def _is_irreducible(p: int, modulus: Sequence[int]) -> bool:
    """Trial division by every monic polynomial of degree <= r/2."""
    r = len(modulus) - 1
    for d in range(1, r // 2 + 1):
        for lower in itertools.product(range(p), repeat=d):
            divisor = list(lower) + [1]
            if not any(_poly_rem(list(modulus), divisor, p)):
                return False
    return True


def default_modulus(p: int, r: int) -> Tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree r over F_p."""
    for lower in itertools.product(range(p), repeat=r):
        candidate = tuple(lower) + (1,)
        if _is_irreducible(p, candidate):
            return candidate
    raise ReducibleModulus(f"no irreducible polynomial of degree {r} over F_{p}")


@dataclass(frozen=True)
class FieldCtx:
    """Arithmetic context for F_q.

    Attributes:
        p: Odd prime characteristic
        r: Extension degree
        modulus: Monic irreducible of degree r, constant term first
            (empty for prime fields)
    """
    p: int
    r: int = 1
    modulus: Tuple[int, ...] = ()

    @property
    def q(self) -> int:
        return self.p ** self.r

    @property
    def is_prime_field(self) -> bool:
        return self.r == 1

    def to_dict(self) -> Dict[str, object]:
        return {"p": self.p, "r": self.r, "modulus": list(self.modulus)}

    # -- encoding -----------------------------------------------------------

    def digits(self, codes: Codes) -> np.ndarray:
        """Base-p digits of codes, shape (..., r), constant term first."""
        arr = np.asarray(codes, dtype=np.int64)
        powers = self.p ** np.arange(self.r, dtype=np.int64)
        return (arr[..., None] // powers) % self.p

    def from_digits(self, digits: np.ndarray) -> Codes:
        arr = np.asarray(digits, dtype=np.int64)
        powers = self.p ** np.arange(self.r, dtype=np.int64)
        out = (arr % self.p) @ powers
        return int(out) if np.ndim(out) == 0 else out

    def check(self, codes: Codes) -> None:
        """Raise ContextMismatch when a code is outside [0, q)."""
        arr = np.asarray(codes)
        if arr.size and (arr.min() < 0 or arr.max() >= self.q):
            raise ContextMismatch(f"code outside [0, {self.q}) for F_{self.q}")

    # -- scalar polynomial arithmetic (table construction only) -------------

    def _mul_scalar(self, a: int, b: int) -> int:
        if self.r == 1:
            return (a * b) % self.p
        p, r = self.p, self.r
        da = [(a // p**i) % p for i in range(r)]
        db = [(b // p**i) % p for i in range(r)]
        prod = [0] * (2 * r - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] = (prod[i + j] + x * y) % p
        reduced = _poly_rem(prod, self.modulus, p) if len(prod) > r else prod
        return sum(c * p**i for i, c in enumerate(reduced))

    def _pow_scalar(self, a: int, e: int) -> int:
        result, base = 1, a
        while e:
            if e & 1:
                result = self._mul_scalar(result, base)
            base = self._mul_scalar(base, base)
            e >>= 1
        return result

    @cached_property
    def _log_tables(self) -> Tuple[np.ndarray, np.ndarray]:
        """(exp, log) tables with respect to a primitive element."""
        q = self.q
        order = q - 1
        prime_factors = sympy.primefactors(order)
        generator = None
        for g in range(2, q):
            if all(self._pow_scalar(g, order // ell) != 1 for ell in prime_factors):
                generator = g
                break
        if generator is None:
            raise BadField(f"no primitive element found for F_{q}")

        exp = np.empty(order, dtype=np.int64)
        log = np.zeros(q, dtype=np.int64)
        value = 1
        for k in range(order):
            exp[k] = value
            log[value] = k
            value = self._mul_scalar(value, generator)
        logger.debug(f"Built log tables for F_{q} with generator {generator}")
        return exp, log

    # -- vectorized arithmetic ---------------------------------------------

    def _digitwise(self, a: Codes, b: Codes, sign: int) -> Codes:
        p = self.p
        result: Codes = 0
        for i in range(self.r):
            pw = p**i
            result = result + (((a // pw) % p + sign * ((b // pw) % p)) % p) * pw
        return result

    def add(self, a: Codes, b: Codes) -> Codes:
        if self.r == 1:
            return (a + b) % self.p
        return self._digitwise(a, b, 1)

    def sub(self, a: Codes, b: Codes) -> Codes:
        if self.r == 1:
            return (a - b) % self.p
        return self._digitwise(a, b, -1)

    def neg(self, a: Codes) -> Codes:
        return self.sub(0 * a, a)

    def mul(self, a: Codes, b: Codes) -> Codes:
        if self.r == 1:
            return (a * b) % self.p
        exp, log = self._log_tables
        a_arr = np.asarray(a, dtype=np.int64)
        b_arr = np.asarray(b, dtype=np.int64)
        out = np.where(
            (a_arr == 0) | (b_arr == 0),
            0,
            exp[(log[a_arr] + log[b_arr]) % (self.q - 1)],
        )
        return int(out) if out.ndim == 0 else out

    def inv(self, a: Codes) -> Codes:
        a_arr = np.asarray(a, dtype=np.int64)
        if np.any(a_arr == 0):
            raise DivisionByZero(f"zero has no inverse in F_{self.q}")
        exp, log = self._log_tables
        out = exp[(-log[a_arr]) % (self.q - 1)]
        return int(out) if out.ndim == 0 else out

    @property
    def inv_two(self) -> int:
        # 2 lies in the prime subfield, so its code is the constant 2
        return (self.p + 1) // 2

    def half(self, a: Codes) -> Codes:
        return self.mul(a, self.inv_two)

    def power(self, a: Codes, e: int) -> Codes:
        """a**e for e >= 0 (0**0 is 1)."""
        if e < 0:
            return self.power(self.inv(a), -e)
        a_arr = np.asarray(a, dtype=np.int64)
        if e == 0:
            out = np.ones_like(a_arr)
        else:
            exp, log = self._log_tables
            out = np.where(a_arr == 0, 0, exp[(log[a_arr] * e) % (self.q - 1)])
        return int(out) if out.ndim == 0 else out

    def elements(self) -> np.ndarray:
        return np.arange(self.q, dtype=np.int64)

    def nonzero(self) -> np.ndarray:
        return np.arange(1, self.q, dtype=np.int64)


@lru_cache(maxsize=None)
def _cached_field(p: int, r: int, modulus: Tuple[int, ...]) -> FieldCtx:
    return FieldCtx(p=p, r=r, modulus=modulus)


def field_create(p: int, r: int = 1, modulus: Optional[Sequence[int]] = None) -> FieldCtx:
    """Create a validated field context for F_{p^r}.

    Args:
        p: Odd prime characteristic
        r: Extension degree
        modulus: Optional monic irreducible of degree r, constant term first
            (including the leading 1). Chosen deterministically when absent.

    Raises:
        EvenCharacteristic: p == 2
        NotPrime: p is not prime
        ReducibleModulus: the given modulus factors over F_p
    """
    if p == 2:
        raise EvenCharacteristic("characteristic 2 has no element 1/2")
    if not sympy.isprime(p):
        raise NotPrime(f"{p} is not prime")
    if r < 1:
        raise BadRange(f"extension degree must be >= 1, got {r}")
    if p**r > settings.MAX_FIELD_ORDER:
        raise TooLarge("field order", p**r, settings.MAX_FIELD_ORDER)

    if r == 1:
        if modulus:
            raise BadRange("prime fields take no modulus")
        return _cached_field(p, 1, ())

    if modulus is None:
        chosen = default_modulus(p, r)
    else:
        chosen = tuple(int(c) for c in modulus)
        if len(chosen) != r + 1 or chosen[-1] != 1:
            raise BadRange(f"modulus must be monic of degree {r}: {list(chosen)}")
        if any(not 0 <= c < p for c in chosen):
            raise BadRange(f"modulus coefficients must lie in [0, {p})")
        if not _is_irreducible(p, chosen):
            raise ReducibleModulus(f"{list(chosen)} is reducible over F_{p}")
    return _cached_field(p, r, chosen)


def field_from_order(q: int) -> FieldCtx:
    """Field context for an odd prime power q with the default modulus."""
    factors = sympy.factorint(q) if q > 1 else {}
    if len(factors) != 1:
        raise BadField(f"{q} is not a prime power")
    (p, r), = factors.items()
    if p == 2:
        raise BadField(f"{q} is even")
    return field_create(int(p), int(r))


def arith(ctx: FieldCtx, op: str, a: int, b: Optional[int] = None) -> FieldElem:
    """Single field operation on element codes.

    Args:
        op: One of add, sub, mul, neg, inv, half
    """
    unary: Dict[str, Callable[[Codes], Codes]] = {
        "neg": ctx.neg,
        "inv": ctx.inv,
        "half": ctx.half,
    }
    binary: Dict[str, Callable[[Codes, Codes], Codes]] = {
        "add": ctx.add,
        "sub": ctx.sub,
        "mul": ctx.mul,
    }
    if __debug__:
        ctx.check(a)
        if b is not None:
            ctx.check(b)
    if op in unary:
        return FieldElem(int(unary[op](a)))
    if op in binary:
        if b is None:
            raise BadRange(f"operation {op} needs two operands")
        return FieldElem(int(binary[op](a, b)))
    raise BadRange(f"unknown field operation {op!r}")


def enumerate_elements(ctx: FieldCtx) -> List[FieldElem]:
    """All q elements in code order; index 0 is zero."""
    return [FieldElem(c) for c in range(ctx.q)]


def subfield_elements(ctx: FieldCtx, d: int) -> np.ndarray:
    """Codes of the subfield F_{p^d}, i.e. the fixed points of a -> a^(p^d)."""
    if d < 1 or ctx.r % d:
        raise BadRange(f"subfield degree {d} must divide {ctx.r}")
    codes = ctx.elements()
    return codes[ctx.power(codes, ctx.p**d) == codes]
