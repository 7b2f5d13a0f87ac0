"""Exact arithmetic in the Gaussian integers Z[i].

Everything in the package is expressed through `GInt`, an immutable pair of
Python integers, and through `PrimaryLattice`, the numpy view of all primary
elements up to a norm bound that the sieves and L-value sums run on.
"""

from __future__ import annotations

import enum
import logging
import math
import re
from collections.abc import Callable, Iterator
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import ClassVar, TypeAlias

import numpy as np
import numpy.typing as npt
from scipy.special import comb
from sympy import factorint, sqrt_mod

from .errors import DomainError, OverflowRejected

logger = logging.getLogger(__name__)

NORM_CEILING = 2**63 - 1

IntArray = npt.NDArray[np.int64]
Operand: TypeAlias = "GInt | int"

_GINT_PATTERN = re.compile(r"^[+-]?\d*(?:[+-]\d*)?i?$")


def _round_div(x: int, n: int) -> int:
    """Nearest integer to x/n for n > 0, ties toward +inf."""
    return (2 * x + n) // (2 * n)


@dataclass(frozen=True, slots=True)
class GInt:
    """A Gaussian integer re + im*i."""

    re: int
    im: int = 0

    UNITS: ClassVar[tuple[GInt, ...]]

    def __post_init__(self) -> None:
        object.__setattr__(self, "re", int(self.re))
        object.__setattr__(self, "im", int(self.im))
        if self.re * self.re + self.im * self.im > NORM_CEILING:
            raise OverflowRejected(
                f"norm of ({self.re}, {self.im}) exceeds the int64 ceiling"
            )

    @classmethod
    def parse(cls, text: str) -> GInt:
        """
        Parses the `a+bi` grammar used on the command line.

        Spaces are ignored; `i`, `-i`, `7`, `2i`, `-1-2i` and `3 + 2i` are all
        accepted.
        """
        compact = "".join(text.split())
        if not compact or not _GINT_PATTERN.match(compact):
            raise DomainError(f"cannot parse Gaussian integer from {text!r}")
        try:
            return cls._parse_compact(compact)
        except ValueError:
            raise DomainError(f"cannot parse Gaussian integer from {text!r}") from None

    @classmethod
    def _parse_compact(cls, compact: str) -> GInt:
        if not compact.endswith("i"):
            return cls(int(compact), 0)
        body = compact[:-1]
        split = max(body.rfind("+"), body.rfind("-"))
        if split <= 0:
            real_text, imag_text = "", body
        else:
            real_text, imag_text = body[:split], body[split:]
        if imag_text in ("", "+"):
            imag = 1
        elif imag_text == "-":
            imag = -1
        else:
            imag = int(imag_text)
        return cls(int(real_text) if real_text else 0, imag)

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        if self.im == 1:
            imag = "i"
        elif self.im == -1:
            imag = "-i"
        else:
            imag = f"{self.im}i"
        if self.re == 0:
            return imag
        sign = "" if imag.startswith("-") else "+"
        return f"{self.re}{sign}{imag}"

    def __add__(self, other: Operand) -> GInt:
        o = _coerce(other)
        return GInt(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other: Operand) -> GInt:
        o = _coerce(other)
        return GInt(self.re - o.re, self.im - o.im)

    def __rsub__(self, other: Operand) -> GInt:
        return _coerce(other) - self

    def __mul__(self, other: Operand) -> GInt:
        o = _coerce(other)
        return GInt(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __neg__(self) -> GInt:
        return GInt(-self.re, -self.im)

    def __pow__(self, exponent: int) -> GInt:
        if exponent < 0:
            raise DomainError("negative powers are not Gaussian integers")
        result, base = ONE, self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __divmod__(self, other: Operand) -> tuple[GInt, GInt]:
        return divrem(self, _coerce(other))

    def __floordiv__(self, other: Operand) -> GInt:
        return divrem(self, _coerce(other))[0]

    def __mod__(self, other: Operand) -> GInt:
        return divrem(self, _coerce(other))[1]

    def __bool__(self) -> bool:
        return self.re != 0 or self.im != 0

    def conj(self) -> GInt:
        return GInt(self.re, -self.im)

    def norm(self) -> int:
        return norm(self)

    def is_odd(self) -> bool:
        """True when 1+i does not divide self."""
        return (self.re + self.im) % 2 == 1

    def is_unit(self) -> bool:
        return self.norm() == 1

    def divides(self, other: GInt) -> bool:
        if not self:
            return not other
        return not divrem(other, self)[1]

    def exact_div(self, other: GInt) -> GInt:
        q, r = divrem(self, other)
        if r:
            raise DomainError(f"{other} does not divide {self}")
        return q

    def __complex__(self) -> complex:
        return complex(self.re, self.im)


def _coerce(value: Operand) -> GInt:
    if isinstance(value, GInt):
        return value
    if isinstance(value, (int, np.integer)):
        return GInt(int(value), 0)
    raise TypeError(f"cannot combine a Gaussian integer with {type(value).__name__}")


ZERO = GInt(0, 0)
ONE = GInt(1, 0)
I = GInt(0, 1)
ONE_PLUS_I = GInt(1, 1)
GInt.UNITS = (ONE, I, GInt(-1, 0), GInt(0, -1))


def norm(z: GInt) -> int:
    """N(z) = re^2 + im^2."""
    value = z.re * z.re + z.im * z.im
    if value > NORM_CEILING:
        raise OverflowRejected(f"norm of {z} exceeds the int64 ceiling")
    return value


def divrem(a: GInt, b: GInt) -> tuple[GInt, GInt]:
    """
    Euclidean division a = q*b + r with N(r) <= N(b)/2.

    Each coordinate of a*conj(b)/N(b) is rounded to the nearest integer.
    """
    nb = norm(b)
    if nb == 0:
        raise DomainError(f"division of {a} by zero")
    numerator = a * b.conj()
    q = GInt(_round_div(numerator.re, nb), _round_div(numerator.im, nb))
    return q, a - q * b


def is_primary(n: GInt) -> bool:
    """n = a+bi with a = 1, b = 0 or a = 3, b = 2 (mod 4)."""
    a, b = n.re % 4, n.im % 4
    return (a == 1 and b == 0) or (a == 3 and b == 2)


def primary_associate(n: GInt) -> tuple[GInt, GInt]:
    """Returns (unit, p) with n = unit * p and p primary."""
    if not n or not n.is_odd():
        raise DomainError(f"{n} has no primary associate (zero or even)")
    for unit in GInt.UNITS:
        candidate = n * unit.conj()
        if is_primary(candidate):
            return unit, candidate
    raise AssertionError(f"no unit multiple of {n} is primary")


def strip_one_plus_i(n: GInt) -> tuple[int, GInt]:
    """Splits n = (1+i)^e * m with m odd; n must be nonzero."""
    if not n:
        raise DomainError("zero has unbounded (1+i)-valuation")
    e = 0
    while not n.is_odd():
        n = GInt((n.re + n.im) // 2, (n.im - n.re) // 2)
        e += 1
    return e, n


def normalize(n: GInt) -> GInt:
    """(1+i)^e times the primary associate of the odd part of n."""
    e, odd = strip_one_plus_i(n)
    return ONE_PLUS_I**e * primary_associate(odd)[1]


def gcd(a: GInt, b: GInt) -> GInt:
    """Normalized greatest common divisor."""
    if not a and not b:
        raise DomainError("gcd(0, 0) is undefined")
    while b:
        a, b = b, a % b
    return normalize(a)


@dataclass(frozen=True)
class PrimaryFactorization:
    """n = unit * (1+i)^e2 * prod(p^m) with every p primary and distinct."""

    unit: GInt
    e2: int
    primes: tuple[tuple[GInt, int], ...]

    def expand(self) -> GInt:
        value = self.unit * ONE_PLUS_I**self.e2
        for prime, multiplicity in self.primes:
            value = value * prime**multiplicity
        return value

    def prime_powers(self) -> list[tuple[GInt, int, int]]:
        """(generator, norm, exponent) for every prime ideal, 1+i first."""
        powers = [(ONE_PLUS_I, 2, self.e2)] if self.e2 else []
        powers.extend((p, norm(p), m) for p, m in self.primes)
        return powers

    def is_squarefree(self) -> bool:
        return self.e2 <= 1 and all(m == 1 for _, m in self.primes)


@lru_cache(maxsize=4096)
def split_prime(p: int) -> GInt:
    """The primary prime of norm p for a rational prime p = 1 mod 4."""
    root = sqrt_mod(-1, p)
    if root is None:
        raise DomainError(f"{p} does not split in Z[i]")
    return gcd(GInt(p, 0), GInt(int(root), 1))


def factor(n: GInt) -> PrimaryFactorization:
    """Factors n over the primary generators, 1+i for the ramified prime."""
    if not n:
        raise DomainError("cannot factor zero")
    remaining = n
    e2 = 0
    primes: list[tuple[GInt, int]] = []
    for p, e in sorted(factorint(norm(n)).items()):
        if p == 2:
            e2 = e
            remaining = strip_one_plus_i(remaining)[1]
        elif p % 4 == 3:
            inert = GInt(-p, 0)
            for _ in range(e // 2):
                remaining = remaining.exact_div(inert)
            primes.append((inert, e // 2))
        else:
            pi = split_prime(p)
            for candidate in (pi, pi.conj()):
                multiplicity = 0
                while candidate.divides(remaining):
                    remaining = remaining.exact_div(candidate)
                    multiplicity += 1
                if multiplicity:
                    primes.append((candidate, multiplicity))
    if not remaining.is_unit():
        raise AssertionError(f"factorization of {n} left cofactor {remaining}")
    primes.sort(key=lambda item: (norm(item[0]), item[0].re, item[0].im))
    return PrimaryFactorization(unit=remaining, e2=e2, primes=tuple(primes))


class ArithmeticKind(str, enum.Enum):
    DIVISOR = "d"
    MOBIUS = "mu"
    TOTIENT = "phi"
    VON_MANGOLDT = "von_mangoldt"
    P = "P"


def totient(q: int, e: int) -> int:
    """phi of a prime power of norm q^e."""
    return q ** (e - 1) * (q - 1)


def _prime_power_value(kind: ArithmeticKind, q: int, e: int, k: int) -> int:
    if kind is ArithmeticKind.DIVISOR:
        return math.comb(e + k - 1, k - 1)
    if kind is ArithmeticKind.MOBIUS:
        return -1 if e == 1 else 0
    if kind is ArithmeticKind.TOTIENT:
        return totient(q, e)
    raise AssertionError(kind)


def arith_fn(
    kind: ArithmeticKind | str, n: GInt, k: int = 2
) -> int | float | Fraction:
    """
    Evaluates an arithmetic function on the ideal (n).

    Args:
        kind: d (the k-fold divisor function), mu, phi, von_mangoldt or P.
        n: Any nonzero generator of the ideal.
        k: Order of the divisor function; ignored by the other kinds.

    Returns:
        An int for d, mu and phi, a float for von_mangoldt, a Fraction for P.
    """
    kind = ArithmeticKind(kind)
    if not n:
        raise DomainError("arithmetic functions are defined on nonzero ideals")
    powers = factor(n).prime_powers()
    if kind is ArithmeticKind.VON_MANGOLDT:
        return math.log(powers[0][1]) if len(powers) == 1 else 0.0
    if kind is ArithmeticKind.P:
        return math.prod(
            (Fraction(q, q + 1) for _, q, _ in powers), start=Fraction(1)
        )
    return math.prod(_prime_power_value(kind, q, e, k) for _, q, e in powers)


def _rational_prime_mask(limit: int) -> npt.NDArray[np.bool_]:
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return mask


def _first_at_least(lower: int, residue: int) -> int:
    return lower + (residue - lower) % 4


def _primary_points(limit: int) -> tuple[IntArray, IntArray, IntArray]:
    radius = math.isqrt(limit)
    parts = []
    for a0, b0 in ((1, 0), (3, 2)):
        a_axis = np.arange(_first_at_least(-radius, a0), radius + 1, 4, dtype=np.int64)
        b_axis = np.arange(_first_at_least(-radius, b0), radius + 1, 4, dtype=np.int64)
        a, b = np.meshgrid(a_axis, b_axis, indexing="ij")
        n = a * a + b * b
        keep = n <= limit
        parts.append((a[keep], b[keep], n[keep]))
    re_part = np.concatenate([p[0] for p in parts])
    im_part = np.concatenate([p[1] for p in parts])
    norms = np.concatenate([p[2] for p in parts])
    order = np.lexsort((im_part, re_part, norms))
    return re_part[order], im_part[order], norms[order]


class PrimaryLattice:
    """
    All primary n with N(n) <= limit, sorted by (N, re, im).

    Index 0 is always the element 1. Alongside the coordinates the lattice
    keeps a smallest-prime-factor decomposition n = spf(n) * cofactor(n),
    which drives every multiplicative table in the package.
    """

    _cache: ClassVar[dict[int, PrimaryLattice]] = {}

    def __init__(self, limit: int) -> None:
        if limit < 1:
            raise DomainError(f"lattice bound must be positive, got {limit}")
        self.limit = limit
        self.re, self.im, self.norm = _primary_points(limit)
        self._radius = math.isqrt(limit)
        self._grids = self._build_grids()
        self._rational = _rational_prime_mask(limit)
        self.is_prime = self._rational[self.norm] | (
            (self.im == 0)
            & (self.re < 0)
            & self._rational[np.abs(self.re)]
            & ((-self.re) % 4 == 3)
        )
        self.spf, self.cofactor = self._sieve()
        self.omega = self._omega()
        self.spf_exponent, self.rest = self._prime_power_split()
        logger.debug("primary lattice up to %d: %d points", limit, len(self))

    @classmethod
    def covering(cls, limit: int) -> PrimaryLattice:
        """A cached lattice whose bound is the next power of two >= limit."""
        size = max(64, 1 << max(0, int(limit) - 1).bit_length())
        if size not in cls._cache:
            cls._cache[size] = cls(size)
        return cls._cache[size]

    def __len__(self) -> int:
        return int(self.re.shape[0])

    def count_upto(self, bound: float) -> int:
        """Number of lattice points with N(n) <= bound."""
        return int(np.searchsorted(self.norm, math.floor(bound), side="right"))

    def element(self, index: int) -> GInt:
        return GInt(int(self.re[index]), int(self.im[index]))

    def _build_grids(self) -> list[tuple[int, int, IntArray]]:
        grids = []
        for a0, b0 in ((1, 0), (3, 2)):
            a_start = _first_at_least(-self._radius, a0)
            b_start = _first_at_least(-self._radius, b0)
            shape = (
                max(0, (self._radius - a_start) // 4 + 1),
                max(0, (self._radius - b_start) // 4 + 1),
            )
            grids.append((a_start, b_start, np.full(shape, -1, dtype=np.int64)))
        for index_class, (a_start, b_start, grid) in enumerate(grids):
            members = (self.re % 4 == 1) if index_class == 0 else (self.re % 4 == 3)
            positions = np.nonzero(members)[0]
            grid[
                (self.re[positions] - a_start) // 4,
                (self.im[positions] - b_start) // 4,
            ] = positions
        return grids

    def lookup(self, re_part: IntArray, im_part: IntArray) -> IntArray:
        """Lattice indices of primary (re, im) pairs; -1 where out of range."""
        result = np.full(re_part.shape, -1, dtype=np.int64)
        for index_class, (a_start, b_start, grid) in enumerate(self._grids):
            a0, b0 = (1, 0) if index_class == 0 else (3, 2)
            members = (re_part % 4 == a0) & (im_part % 4 == b0)
            ia = (re_part[members] - a_start) // 4
            ib = (im_part[members] - b_start) // 4
            inside = (ia >= 0) & (ia < grid.shape[0]) & (ib >= 0) & (ib < grid.shape[1])
            found = np.full(ia.shape, -1, dtype=np.int64)
            found[inside] = grid[ia[inside], ib[inside]]
            result[members] = found
        return result

    def prime_indices(self, max_norm: float | None = None) -> IntArray:
        bound = self.limit if max_norm is None else max_norm
        return np.nonzero(self.is_prime & (self.norm <= bound))[0]

    def multiples(self, base_re: int, base_im: int, base_norm: int) -> tuple[IntArray, IntArray]:
        """(cofactor index, product index) for every m with N(base*m) <= limit."""
        count = self.count_upto(self.limit // base_norm)
        m_re, m_im = self.re[:count], self.im[:count]
        product = self.lookup(base_re * m_re - base_im * m_im, base_re * m_im + base_im * m_re)
        return np.arange(count, dtype=np.int64), product

    def _sieve(self) -> tuple[IntArray, IntArray]:
        spf = np.full(len(self), -1, dtype=np.int64)
        cofactor = np.full(len(self), -1, dtype=np.int64)
        for p in self.prime_indices(math.isqrt(self.limit)):
            m_index, product = self.multiples(int(self.re[p]), int(self.im[p]), int(self.norm[p]))
            fresh = spf[product] < 0
            spf[product[fresh]] = p
            cofactor[product[fresh]] = m_index[fresh]
        large = (spf < 0) & (np.arange(len(self)) > 0)
        spf[large] = np.nonzero(large)[0]
        cofactor[large] = 0
        return spf, cofactor

    def _omega(self) -> IntArray:
        omega = np.zeros(len(self), dtype=np.int64)
        if len(self) == 1:
            return omega
        tail = slice(1, None)
        while True:
            updated = omega[self.cofactor[tail]] + 1
            if np.array_equal(updated, omega[tail]):
                return omega
            omega[tail] = updated

    def levels(self) -> Iterator[IntArray]:
        """Indices grouped by number of prime factors, ascending."""
        for level in range(1, int(self.omega.max(initial=0)) + 1):
            yield np.nonzero(self.omega == level)[0]

    def _prime_power_split(self) -> tuple[IntArray, IntArray]:
        exponent = np.zeros(len(self), dtype=np.int64)
        rest = np.zeros(len(self), dtype=np.int64)
        for idx in self.levels():
            c = self.cofactor[idx]
            same = (c != 0) & (self.spf[c] == self.spf[idx])
            exponent[idx] = np.where(same, exponent[c] + 1, 1)
            rest[idx] = np.where(same, rest[c], c)
        return exponent, rest

    def multiplicative(
        self, local: Callable[[IntArray, IntArray], npt.NDArray[np.float64]]
    ) -> npt.NDArray[np.float64]:
        """f(n) for the multiplicative f with f(p^e) = local(N(p), e)."""
        values = np.ones(len(self), dtype=np.float64)
        for idx in self.levels():
            q = self.norm[self.spf[idx]]
            values[idx] = local(q, self.spf_exponent[idx]) * values[self.rest[idx]]
        return values

    def completely_multiplicative(self, prime_values: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        """Extends values given at prime indices by total multiplicativity."""
        values = np.ones(len(self), dtype=np.float64)
        for idx in self.levels():
            values[idx] = prime_values[self.spf[idx]] * values[self.cofactor[idx]]
        return values

    def squarefree_mask(self) -> npt.NDArray[np.bool_]:
        """Crosses off the multiples of p^2 for every prime N(p)^2 <= limit."""
        mask = np.ones(len(self), dtype=bool)
        for p in self.prime_indices(math.isqrt(self.limit)):
            sq = self.element(int(p)) ** 2
            _, product = self.multiples(sq.re, sq.im, sq.norm())
            mask[product[product >= 0]] = False
        return mask


class ArithmeticFunctionTable:
    """A multiplicative arithmetic function tabulated over a primary lattice."""

    def __init__(self, kind: ArithmeticKind | str, lattice: PrimaryLattice, k: int = 2) -> None:
        self.kind = ArithmeticKind(kind)
        self.k = k
        self.lattice = lattice
        self.values = self._tabulate()

    def _tabulate(self) -> npt.NDArray[np.float64]:
        lattice = self.lattice
        if self.kind is ArithmeticKind.VON_MANGOLDT:
            values = np.zeros(len(lattice))
            prime_power = lattice.rest == 0
            prime_power[0] = False
            values[prime_power] = np.log(lattice.norm[lattice.spf[prime_power]])
            return values
        if self.kind is ArithmeticKind.DIVISOR:
            k = self.k
            return lattice.multiplicative(lambda q, e: comb(e + k - 1, k - 1))
        if self.kind is ArithmeticKind.MOBIUS:
            return lattice.multiplicative(lambda q, e: np.where(e == 1, -1.0, 0.0))
        if self.kind is ArithmeticKind.TOTIENT:
            return lattice.multiplicative(
                lambda q, e: q.astype(np.float64) ** (e - 1) * (q - 1)
            )
        return lattice.multiplicative(lambda q, e: q / (q + 1.0))

    def __getitem__(self, n: GInt) -> float:
        index = self.lattice.lookup(np.array([n.re]), np.array([n.im]))[0]
        if index < 0:
            raise DomainError(f"{n} is not a primary element of the table")
        return float(self.values[index])


@dataclass(frozen=True)
class PrimeTable:
    """Primary odd Gaussian primes up to a norm bound, sorted by (N, re, im)."""

    re: IntArray
    im: IntArray
    norm: IntArray

    def __len__(self) -> int:
        return int(self.norm.shape[0])

    def elements(self) -> Iterator[GInt]:
        for a, b in zip(self.re.tolist(), self.im.tolist()):
            yield GInt(a, b)


@lru_cache(maxsize=16)
def gaussian_primes(limit: int) -> PrimeTable:
    """Primary odd primes with N(p) <= limit."""
    re_part, im_part, norms = _primary_points(limit)
    rational = _rational_prime_mask(max(limit, 2))
    inert = (im_part == 0) & (re_part < 0) & ((-re_part) % 4 == 3)
    inert &= rational[np.abs(re_part)]
    keep = rational[norms] | inert
    return PrimeTable(re_part[keep], im_part[keep], norms[keep])


def squarefree_odd_iter(limit: int, primary_only: bool = False) -> Iterator[GInt]:
    """
    Yields every odd square-free d with N(d) <= limit exactly once.

    Primary representatives come in (N, re, im) order; unless primary_only is
    set each one is followed by its multiples by i, -1 and -i.
    """
    lattice = PrimaryLattice.covering(limit)
    count = lattice.count_upto(limit)
    mask = lattice.squarefree_mask()[:count]
    for index in np.nonzero(mask)[0].tolist():
        d = lattice.element(index)
        if primary_only:
            yield d
        else:
            for unit in GInt.UNITS:
                yield unit * d


def squarefree_odd_count(limit: int, primary_only: bool = False) -> int:
    lattice = PrimaryLattice.covering(limit)
    count = int(lattice.squarefree_mask()[: lattice.count_upto(limit)].sum())
    return count if primary_only else 4 * count


def norm_count(x: float) -> int:
    """#{a in Z[i], a != 0 : N(a) <= x}."""
    if x < 1:
        raise DomainError(f"norm_count needs x >= 1, got {x}")
    bound = math.floor(x)
    radius = math.isqrt(bound)
    total = sum(2 * math.isqrt(bound - a * a) + 1 for a in range(-radius, radius + 1))
    return total - 1
