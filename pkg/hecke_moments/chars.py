"""Quadratic residue symbols in Z[i] and the characters chi_{(1+i)^5 d}."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import numpy.typing as npt
from sympy import isprime

from .errors import DomainError
from .gint import (
    ONE_PLUS_I,
    GInt,
    PrimaryLattice,
    factor,
    norm,
    primary_associate,
    strip_one_plus_i,
)

logger = logging.getLogger(__name__)

IntArray = npt.NDArray[np.int64]


def one_plus_i_symbol(n: GInt) -> int:
    """((1+i)/n) for primary n."""
    exponent = n.re - n.im - 1 - n.im * n.im
    if exponent % 4:
        raise AssertionError(f"supplementary exponent for {n} is not an integer")
    return -1 if (exponent // 4) % 2 else 1


def unit_symbol(unit: GInt, n: GInt) -> int:
    """(unit/n) for primary n; (-1/n) = 1 and (i/n) = (-1)^((1-a)/2)."""
    if unit.im == 0:
        return 1
    return -1 if ((1 - n.re) // 2) % 2 else 1


def residue_symbol(a: GInt, n: GInt) -> int:
    """
    The quadratic residue symbol (a/n) for odd n.

    Reduces a mod n, strips the (1+i)-power and the unit with the
    supplementary laws, then swaps numerator and denominator by reciprocity
    until the modulus becomes a unit.
    """
    if not n or not n.is_odd():
        raise DomainError(f"residue symbol needs an odd modulus, got {n}")
    n = primary_associate(n)[1]
    result = 1
    a = a % n
    while norm(n) != 1:
        if not a:
            return 0
        e, a = strip_one_plus_i(a)
        if e % 2:
            result *= one_plus_i_symbol(n)
        unit, a = primary_associate(a)
        result *= unit_symbol(unit, n)
        a, n = n % a, a
    return result


def residue_symbol_euler(a: GInt, prime: GInt) -> int:
    """(a/prime) from the Euler criterion a^((N-1)/2) mod prime."""
    if not prime or not prime.is_odd():
        raise DomainError(f"Euler criterion needs an odd prime, got {prime}")
    n = norm(prime)
    q = abs(prime.re) if prime.im == 0 else abs(prime.im)
    split = isprime(n)
    inert = (prime.re == 0 or prime.im == 0) and isprime(q) and q % 4 == 3
    if not (split or inert):
        raise DomainError(f"{prime} is not a Gaussian prime")
    power, base, exponent = GInt(1, 0), a % prime, (n - 1) // 2
    while exponent:
        if exponent & 1:
            power = (power * base) % prime
        base = (base * base) % prime
        exponent >>= 1
    if not power:
        return 0
    if prime.divides(power - 1):
        return 1
    if prime.divides(power + 1):
        return -1
    raise DomainError(f"{prime} is composite: Euler criterion gave {power}")


@lru_cache(maxsize=1024)
def _legendre_table(p: int) -> npt.NDArray[np.int8]:
    table = np.full(p, -1, dtype=np.int8)
    table[(np.arange(p, dtype=np.int64) ** 2) % p] = 1
    table[0] = 0
    return table


@lru_cache(maxsize=1024)
def _root_of_minus_one(prime: GInt) -> int:
    """r with r = i mod prime, for a split primary prime."""
    p = norm(prime)
    return (-prime.re * pow(prime.im, -1, p)) % p


def prime_symbol_array(re_part: IntArray, im_part: IntArray, prime: GInt) -> npt.NDArray[np.int8]:
    """Vectorised (x/prime) for a primary odd prime."""
    if prime.im == 0:
        q = abs(prime.re)
        values = (re_part % q) ** 2 + (im_part % q) ** 2
        return _legendre_table(q)[values % q]
    p = norm(prime)
    r = _root_of_minus_one(prime)
    return _legendre_table(p)[(re_part % p + (im_part % p) * r) % p]


def symbol_array(re_part: IntArray, im_part: IntArray, n: GInt) -> npt.NDArray[np.int8]:
    """Vectorised (x/n) for fixed odd n, x = re_part + im_part*i."""
    if not n or not n.is_odd():
        raise DomainError(f"residue symbol needs an odd modulus, got {n}")
    result = np.ones(np.shape(re_part), dtype=np.int8)
    for prime, multiplicity in factor(n).primes:
        values = prime_symbol_array(re_part, im_part, prime)
        result *= values if multiplicity % 2 else values * values
    return result


def to_primary(re_part: IntArray, im_part: IntArray) -> tuple[IntArray, IntArray]:
    """Primary associates of odd points, coordinate-wise."""
    out_re = np.array(re_part, dtype=np.int64, copy=True)
    out_im = np.array(im_part, dtype=np.int64, copy=True)
    for unit in GInt.UNITS[1:]:
        inverse = unit.conj()
        cand_re = re_part * inverse.re - im_part * inverse.im
        cand_im = re_part * inverse.im + im_part * inverse.re
        primary = ((cand_re % 4 == 1) & (cand_im % 4 == 0)) | (
            (cand_re % 4 == 3) & (cand_im % 4 == 2)
        )
        out_re = np.where(primary, cand_re, out_re)
        out_im = np.where(primary, cand_im, out_im)
    return out_re, out_im


@dataclass(frozen=True)
class QuadChar:
    """The primitive quadratic Hecke character chi_{(1+i)^5 d}, d odd square-free."""

    d: GInt
    unit: GInt = field(init=False)
    primary_part: GInt = field(init=False)
    primes: tuple[GInt, ...] = field(init=False)

    def __post_init__(self) -> None:
        if not self.d or not self.d.is_odd():
            raise DomainError(f"character parameter must be odd, got {self.d}")
        factorization = factor(self.d)
        if not factorization.is_squarefree():
            raise DomainError(f"character parameter must be square-free, got {self.d}")
        unit, primary_part = primary_associate(self.d)
        object.__setattr__(self, "unit", unit)
        object.__setattr__(self, "primary_part", primary_part)
        object.__setattr__(self, "primes", tuple(p for p, _ in factorization.primes))

    @property
    def modulus(self) -> GInt:
        return ONE_PLUS_I**5 * self.d

    @property
    def conductor_norm(self) -> int:
        return 32 * norm(self.d)

    def __call__(self, n: GInt) -> int:
        return chi(self, n)


def chi(c: QuadChar, n: GInt) -> int:
    """chi_{(1+i)^5 d}(n): ((1+i)^5 d / n) for odd n, 0 for even n."""
    if not n or not n.is_odd():
        return 0
    return residue_symbol(c.modulus, n)


def chi_at(c: QuadChar, re_part: IntArray, im_part: IntArray) -> npt.NDArray[np.int8]:
    """
    Vectorised chi over arbitrary points; even points map to 0.

    For primary n the value factors as ((1+i)/n)^5 (u/n) prod (n/q) over the
    primary primes q of d = u*prod(q).
    """
    re_part = np.asarray(re_part, dtype=np.int64)
    im_part = np.asarray(im_part, dtype=np.int64)
    odd = (re_part + im_part) % 2 == 1
    a, b = to_primary(re_part, im_part)
    exponent = (a - b - 1 - b * b) // 4
    values = np.where(exponent % 2 == 1, -1, 1).astype(np.int8)
    if c.unit.im != 0:
        values *= np.where(((1 - a) // 2) % 2 == 1, -1, 1).astype(np.int8)
    for prime in c.primes:
        values *= prime_symbol_array(a, b, prime)
    return np.where(odd, values, 0).astype(np.int8)


@dataclass(frozen=True)
class CharacterTable:
    """chi tabulated on a primary lattice prefix, index order of the lattice."""

    character: QuadChar
    lattice: PrimaryLattice
    values: npt.NDArray[np.float64]

    def __getitem__(self, n: GInt) -> int:
        _, primary = primary_associate(n)
        index = int(self.lattice.lookup(np.array([primary.re]), np.array([primary.im]))[0])
        if index < 0 or index >= len(self.values):
            raise DomainError(f"{n} lies outside the tabulated range")
        return int(self.values[index])


def chi_sieved(c: QuadChar, limit: int) -> CharacterTable:
    """chi on every primary n with N(n) <= limit, from its values at primes."""
    lattice = PrimaryLattice.covering(limit)
    primes = lattice.prime_indices(limit)
    prime_values = np.zeros(len(lattice), dtype=np.float64)
    prime_values[primes] = chi_at(c, lattice.re[primes], lattice.im[primes])
    values = lattice.completely_multiplicative(prime_values)
    logger.debug("sieved chi for d=%s over %d primes", c.d, primes.shape[0])
    return CharacterTable(c, lattice, values[: lattice.count_upto(limit)])
