"""
Euler products: the constants a_k, the fourth-moment leading constant and the
local factors of the Z-function family.

Products run over the primary odd primes with N(p) <= P in increasing norm
and are accumulated as sums of logarithms with math.fsum.
"""

from __future__ import annotations

import logging
import math
from collections import defaultdict
from collections.abc import Callable
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import numpy.typing as npt

from .chars import residue_symbol
from .config import get_settings
from .errors import DomainError
from .gauss import prime_power_gauss_form, twisted_symbol, valuation
from .gint import (
    GInt,
    PrimaryLattice,
    factor,
    gaussian_primes,
    is_primary,
    norm,
)
from .lfun import zeta_K

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]
ComplexArray = npt.NDArray[np.complex128]
LocalFactor = Callable[[FloatArray], ComplexArray]

LEADING_DENOMINATOR = 2**7 * 3**4 * 5**2 * 7


@dataclass(frozen=True)
class EulerProductValue:
    """A truncated Euler product and a bound on |log(full/partial)|."""

    tag: str
    truncation: int
    value: complex
    log_tail_bound: float
    primes_used: int

    @property
    def real(self) -> float:
        return self.value.real


@dataclass(frozen=True)
class LocalFactorCheck:
    """A local factor computed two ways."""

    identity: str
    prime: GInt
    shifts: tuple[complex, ...]
    depth: int
    direct: complex
    closed: complex
    tolerance: float = 1e-8

    @property
    def difference(self) -> float:
        return abs(self.direct - self.closed)

    @property
    def passed(self) -> bool:
        return self.difference <= self.tolerance


def _prime_norms(truncation: int) -> FloatArray:
    return gaussian_primes(truncation).norm.astype(np.float64)


def _log_product(
    tag: str, local: LocalFactor, truncation: int, decay: float = 2.0
) -> EulerProductValue:
    """
    prod local(N) over odd primes up to the truncation.

    The tail bound is max |log f|*N^decay over the top decile of primes,
    times 2/P^(decay-1).
    """
    norms = _prime_norms(truncation)
    logs = np.log(local(norms).astype(np.complex128))
    total = complex(math.fsum(logs.real), math.fsum(logs.imag))
    top = norms >= 0.9 * truncation
    if not np.any(top):
        top = slice(-max(1, norms.shape[0] // 10), None)
    c = float(np.max(np.abs(logs[top]) * norms[top] ** decay)) if norms.shape[0] else 0.0
    tail = c * 2 / truncation ** (decay - 1)
    return EulerProductValue(tag, truncation, complex(np.exp(total)), tail, int(norms.shape[0]))


def _binomial_data(k: float) -> tuple[float, float, float]:
    triangle = k * (k + 1) / 2
    return triangle, triangle + 1, k * (k + 1) * (k + 2) * (k + 3) / 24


def a_k_second_order(k: float) -> float:
    """c(k) in f = 1 + c(k)/N^2 + O(N^-3)."""
    triangle, b1, b2 = _binomial_data(k)
    return -triangle / 2 + 0.5 + b2 - b1 * b1 / 2


def a_k_local(k: float, q: FloatArray) -> FloatArray:
    """The factor of a_k at a prime of norm q."""
    q = np.asarray(q, dtype=np.float64)
    triangle = k * (k + 1) / 2
    root = 1 / np.sqrt(q)
    bracket = ((1 + root) ** -k + (1 - root) ** -k) / 2 + 1 / q
    return (1 - 1 / q) ** triangle / (1 + 1 / q) * bracket


def a_k(k: float, truncation: int | None = None, accelerate: bool = True) -> EulerProductValue:
    """
    a_k = 2^(-k(k+2)/2) prod_p a_k_local(N(p)).

    With acceleration each factor is multiplied by (1 - N^-2)^c(k), leaving
    1 + O(N^-3), and the removed part is restored exactly from
    prod over odd primes of (1 - N^-2) = 4/(3 zeta_K(2)).
    """
    if k < 0:
        raise DomainError(f"a_k needs k >= 0, got {k}")
    truncation = truncation or get_settings().euler_truncation
    if truncation < 100:
        raise DomainError(f"a_k needs a truncation of at least 100, got {truncation}")
    prefactor = 2 ** (-k * (k + 2) / 2)
    if not accelerate:
        raw = _log_product(f"a_{k}", lambda q: a_k_local(k, q), truncation)
        return EulerProductValue(
            raw.tag, truncation, prefactor * raw.value, raw.log_tail_bound, raw.primes_used
        )
    c = a_k_second_order(k)
    reduced = _log_product(
        f"a_{k}", lambda q: a_k_local(k, q) * (1 - q**-2.0) ** c, truncation, decay=3.0
    )
    odd_part = 4 / (3 * zeta_K(2).real)
    value = prefactor * reduced.value.real * odd_part ** (-c)
    return EulerProductValue(
        reduced.tag, truncation, complex(value), reduced.log_tail_bound / 2, reduced.primes_used
    )


def leading_constant_4(truncation: int | None = None) -> EulerProductValue:
    """pi a_4 / (2^7 3^4 5^2 7 zeta_K(2)) (pi/4)^10."""
    a4 = a_k(4, truncation)
    value = math.pi * a4.real / (LEADING_DENOMINATOR * zeta_K(2).real) * (math.pi / 4) ** 10
    return EulerProductValue("C_4", a4.truncation, complex(value), a4.log_tail_bound, a4.primes_used)


@dataclass(frozen=True)
class ZDirectValue:
    value: complex
    nmax: int
    pairs: int
    tail_estimate: float


def _prime_data(lattice: PrimaryLattice, count: int) -> tuple[list[tuple[int, ...]], list[dict[int, int]]]:
    """Square-free kernel and prime exponents of the first count lattice entries."""
    kernels: list[tuple[int, ...]] = [()]
    exponents: list[dict[int, int]] = [{}]
    spf, cofactor = lattice.spf.tolist(), lattice.cofactor.tolist()
    for index in range(1, count):
        powers = dict(exponents[cofactor[index]])
        powers[spf[index]] = powers.get(spf[index], 0) + 1
        exponents.append(powers)
        kernels.append(tuple(sorted(p for p, e in powers.items() if e % 2)))
    return kernels, exponents


def Z_direct(alpha: complex, beta: complex, nmax: int) -> ZDirectValue:  # noqa: N802
    """
    sum over primary n1, n2 with N(n_i) <= nmax and n1 n2 a square of
    d(n1) d(n2) P(n1 n2) / (N(n1)^alpha N(n2)^beta).

    n1 n2 is a square exactly when n1 and n2 have the same square-free kernel,
    so the pairs are enumerated group by group.
    """
    if min(complex(alpha).real, complex(beta).real) <= 0.5:
        raise DomainError("the direct Z sum needs Re(alpha), Re(beta) > 1/2")
    lattice = PrimaryLattice.covering(nmax)
    count = lattice.count_upto(nmax)
    kernels, exponents = _prime_data(lattice, count)
    norms = lattice.norm[:count].tolist()
    prime_norm = {p: int(lattice.norm[p]) for powers in exponents for p in powers}
    local_p = {p: Fraction(q, q + 1) for p, q in prime_norm.items()}

    groups: dict[tuple[int, ...], list[int]] = defaultdict(list)
    for index in range(count):
        groups[kernels[index]].append(index)

    divisor = [math.prod(e + 1 for e in exponents[i].values()) for i in range(count)]
    shells: dict[int, list[complex]] = defaultdict(list)
    pairs = 0
    for members in groups.values():
        for i in members:
            weight_i = divisor[i] * norms[i] ** -complex(alpha)
            primes_i = exponents[i].keys()
            for j in members:
                primes = primes_i | exponents[j].keys()
                p_value = float(math.prod((local_p[p] for p in primes), start=Fraction(1)))
                term = weight_i * divisor[j] * norms[j] ** -complex(beta) * p_value
                shells[max(norms[i], norms[j]).bit_length()].append(term)
                pairs += 1
    ordered = [complex(math.fsum(t.real for t in shells[s]), math.fsum(t.imag for t in shells[s])) for s in sorted(shells)]
    value = complex(math.fsum(v.real for v in ordered), math.fsum(v.imag for v in ordered))
    tail = _geometric_tail(ordered)
    logger.debug("Z_direct(%s, %s, %d): %d pairs", alpha, beta, nmax, pairs)
    return ZDirectValue(value=value, nmax=nmax, pairs=pairs, tail_estimate=tail)


def _geometric_tail(shells: list[complex]) -> float:
    """Extrapolates the last dyadic shell by the ratio of the last two."""
    if len(shells) < 3:
        return math.inf
    last, previous = abs(shells[-1]), abs(shells[-2])
    if previous == 0:
        return 0.0
    ratio = last / previous
    return math.inf if ratio >= 1 else last * ratio / (1 - ratio)


def Z1_local(alpha: complex, beta: complex, q: FloatArray) -> ComplexArray:  # noqa: N802
    """Z_{1,p}(alpha, beta) at primes of norm q."""
    q = np.asarray(q, dtype=np.complex128)
    x, y = q ** -complex(alpha), q ** -complex(beta)
    x2, y2 = x * x, y * y
    main = 1 + 4 * x * y + x2 + y2 + x2 * y2
    correction = (
        3 * x2 + 3 * y2 + 4 * x * y - x2 * x2 - y2 * y2
        - 3 * x2 * y2 + 2 * x2 * y2 * y2 + 2 * x2 * x2 * y2 - x2 * x2 * y2 * y2
    )
    return (1 - x2) * (1 - y2) * (1 - x * y) ** 4 * (main - correction / (q + 1))


def Z1_closed(  # noqa: N802
    alpha: complex, beta: complex, truncation: int | None = None, include_zeta: bool = True
) -> EulerProductValue:
    """
    Z(alpha, beta) = zeta_K^3(2 alpha) zeta_K^3(2 beta) zeta_K^4(alpha+beta) Z_1(alpha, beta),
    Z_1 = (1-4^-alpha)^3 (1-4^-beta)^3 (1-2^(-alpha-beta))^4 prod_p Z_{1,p}.

    With include_zeta false only Z_1 is returned.
    """
    alpha, beta = complex(alpha), complex(beta)
    if min(alpha.real, beta.real) <= 0.25:
        raise DomainError("Z_1 is evaluated for Re(alpha), Re(beta) > 1/4")
    truncation = truncation or get_settings().euler_truncation
    product = _log_product("Z_1", lambda q: Z1_local(alpha, beta, q), truncation)
    value = (
        (1 - 4**-alpha) ** 3 * (1 - 4**-beta) ** 3 * (1 - 2 ** (-alpha - beta)) ** 4 * product.value
    )
    tag = "Z_1"
    if include_zeta:
        tag = "Z"
        value *= zeta_K(2 * alpha) ** 3 * zeta_K(2 * beta) ** 3 * zeta_K(alpha + beta) ** 4
    return EulerProductValue(tag, truncation, value, product.log_tail_bound, product.primes_used)


def split_square(k: GInt) -> tuple[GInt, GInt]:
    """k = k1 k2^2 with k1 square-free (carrying the unit) and k2 a generator."""
    if not k:
        raise DomainError("k = 0 has no square-free part")
    f = factor(k)
    k1 = f.unit * GInt(1, 1) ** (f.e2 % 2)
    k2 = GInt(1, 1) ** (f.e2 // 2)
    for prime, m in f.primes:
        k1 = k1 * prime ** (m % 2)
        k2 = k2 * prime ** (m // 2)
    return k1, k2


def _pair_weight(x: complex, y: complex, level: int) -> complex:
    """sum over n1 + n2 = level of (n1+1)(n2+1) x^n1 y^n2."""
    return sum((n1 + 1) * (level - n1 + 1) * x**n1 * y ** (level - n1) for n1 in range(level + 1))


def _scaled_gauss(q: int, h: float, symbol: int, level: int) -> float:
    """g(k, prime^level) / N^level without forming N^level as a float."""
    form = prime_power_gauss_form(q, h, symbol, level)
    if form.coefficient == 0:
        return 0.0
    return form.coefficient / q**level * math.sqrt(form.radicand)


def _z2_direct(q: int, x: complex, y: complex, h: float, symbol: int, depth: int) -> complex:
    total = 0j
    for n1 in range(depth + 1):
        for n2 in range(depth + 1):
            g = _scaled_gauss(q, h, symbol, n1 + n2)
            if g:
                total += (n1 + 1) * (n2 + 1) * x**n1 * y**n2 * g
    return total


def _z2_closed(q: int, x: complex, y: complex, h: float, symbol: int) -> complex:
    """
    Level 0 contributes 1, even levels 2..h contribute (1 - 1/N) times their
    pair weight and level h+1 is the boundary term.
    """
    if h == 0:
        return 1 + 2 * symbol * (x + y) / math.sqrt(q)
    top = int(h)
    total = 1 + (1 - 1 / q) * sum(_pair_weight(x, y, level) for level in range(2, top + 1, 2))
    return total + _pair_weight(x, y, top + 1) * _scaled_gauss(q, h, symbol, top + 1)


def _z2_value(
    q: int,
    alpha: complex,
    beta: complex,
    divides_2a: bool,
    chi: int,
    h: float,
    symbol: int,
    depth: int | None = None,
) -> complex:
    """Z_{2,p}; the double series when a depth is given, the finite form otherwise."""
    alpha, beta = complex(alpha), complex(beta)
    prefactor = (1 - chi * q ** (-0.5 - alpha)) ** 2 * (1 - chi * q ** (-0.5 - beta)) ** 2
    if divides_2a:
        return prefactor
    x, y = q**-alpha, q**-beta
    if depth is None:
        return prefactor * _z2_closed(q, x, y, h, symbol)
    return prefactor * _z2_direct(q, x, y, h, symbol, depth)


def Z2_local(  # noqa: N802
    prime: GInt,
    alpha: complex,
    beta: complex,
    divides_2a: bool,
    k: GInt,
    depth: int = 30,
) -> LocalFactorCheck:
    """
    Z_{2,p}(alpha, beta, a, k) as the double series over n1, n2 <= depth and as
    the finite closed form. The series stops at n1 + n2 = v_p(k) + 1 because
    the Gauss sums vanish beyond it.
    """
    if not k:
        raise DomainError("Z_2 is defined for k != 0")
    if not is_primary(prime):
        raise DomainError(f"local factors are taken at primary primes, got {prime}")
    if depth > 60:
        raise DomainError(f"series depth is capped at 60, got {depth}")
    q = norm(prime)
    k1, _ = split_square(k)
    chi = residue_symbol(GInt(0, 1) * k1, prime)
    h = valuation(k, prime)
    symbol = twisted_symbol(k, prime, h)
    return LocalFactorCheck(
        identity="Z2_local",
        prime=prime,
        shifts=(complex(alpha), complex(beta)),
        depth=depth,
        direct=_z2_value(q, alpha, beta, divides_2a, chi, h, symbol, depth),
        closed=_z2_value(q, alpha, beta, divides_2a, chi, h, symbol),
        tolerance=1e-10,
    )


def K1(alpha: complex, beta: complex, gamma: complex, q: float) -> complex:  # noqa: N802
    a, b, g = complex(alpha), complex(beta), complex(gamma)
    return (
        (1 - q ** (-0.5 - a)) ** 2
        * (1 - q ** (-0.5 - b)) ** 2
        * (1 - q ** (-2 * a - 2 * g)) ** 2
        * (1 - q ** (-2 * b - 2 * g)) ** 2
    )


def K2(alpha: complex, beta: complex, gamma: complex, q: float) -> complex:  # noqa: N802
    a, b, g = complex(alpha), complex(beta), complex(gamma)
    front = (1 - q ** (-0.5 - a)) ** 2 * (1 - q ** (-0.5 - b)) ** 2
    ag, bg = q ** (-2 * a - 2 * g), q ** (-2 * b - 2 * g)
    body = (
        (1 - 1 / q) * (1 + ag) * (1 + bg)
        + (1 / q) * (1 - ag) ** 2 * (1 - bg) ** 2
        + (1 - 1 / q) * 4 * q ** (-a - b - 2 * g)
        + 2
        * (1 - q ** (-2 * g))
        * (
            q ** (-0.5 - a)
            + q ** (-0.5 - b)
            + q ** (-0.5 - 2 * a - b - 2 * g)
            + q ** (-0.5 - a - 2 * b - 2 * g)
        )
    )
    return front * body


def Z3_local_identity(  # noqa: N802
    prime: GInt,
    alpha: complex,
    beta: complex,
    gamma: complex,
    divides_2a: bool = False,
    depth: int = 30,
) -> LocalFactorCheck:
    """
    sum_b N^(-2b gamma) Z_{2,p}(alpha, beta, a, i p^(2b)) against
    K / ((1 - N^-2gamma)(1 - N^(-2alpha-2gamma))^2 (1 - N^(-2beta-2gamma))^2)
    with K = K_2, or K_1 when p divides 2a.
    """
    if complex(gamma).real <= 0:
        raise DomainError("the b-sum converges for Re(gamma) > 0")
    if not is_primary(prime):
        raise DomainError(f"local factors are taken at primary primes, got {prime}")
    q = norm(prime)
    a, b, g = complex(alpha), complex(beta), complex(gamma)
    direct = 0j
    for power in range(depth + 1):
        # k = i p^(2b): the character chi_{i k1} = (-1/p) = 1 and (i k p^-2b / p) = 1.
        direct += q ** (-2 * power * g) * _z2_value(q, a, b, divides_2a, 1, 2 * power, 1)
    k_value = K1(a, b, g, q) if divides_2a else K2(a, b, g, q)
    closed = k_value / ((1 - q ** (-2 * g)) * (1 - q ** (-2 * a - 2 * g)) ** 2 * (1 - q ** (-2 * b - 2 * g)) ** 2)
    return LocalFactorCheck(
        identity="Z3_local_identity",
        prime=prime,
        shifts=(a, b, g),
        depth=depth,
        direct=complex(direct),
        closed=complex(closed),
    )


def Z4_local(alpha: complex, beta: complex, gamma: complex, q: FloatArray) -> ComplexArray:  # noqa: N802
    q = np.asarray(q, dtype=np.complex128)
    a, b, g = complex(alpha), complex(beta), complex(gamma)
    k1 = np.array([K1(a, b, g, v) for v in q.tolist()], dtype=np.complex128)
    k2 = np.array([K2(a, b, g, v) for v in q.tolist()], dtype=np.complex128)
    numerator = (1 - q ** (-2 * a - 2 * g)) * (1 - q ** (-2 * b - 2 * g)) * (1 - q ** (-a - b - 2 * g)) ** 4
    denominator = (1 - q ** (-0.5 - a - 2 * g)) ** 2 * (1 - q ** (-0.5 - b - 2 * g)) ** 2
    return (k2 - q ** (-2 + 2 * g) * k1) * numerator / denominator


def Z4_factor(  # noqa: N802
    alpha: complex, beta: complex, gamma: complex, truncation: int | None = None
) -> EulerProductValue:
    """K_1(alpha, beta, gamma; 1+i) times the product of Z4_local over odd primes."""
    a, b, g = complex(alpha), complex(beta), complex(gamma)
    if min(a.real, b.real) < 3 / 8 or not -1 / 16 <= g.real <= 1 / 8:
        raise DomainError("Z_4 is evaluated for Re(alpha), Re(beta) >= 3/8, -1/16 <= Re(gamma) <= 1/8")
    truncation = truncation or get_settings().euler_truncation
    product = _log_product("Z_4", lambda q: Z4_local(a, b, g, q), truncation)
    value = K1(a, b, g, 2) * product.value
    return EulerProductValue("Z_4", truncation, value, product.log_tail_bound, product.primes_used)


@dataclass(frozen=True)
class RelationRow:
    identity: str
    lhs: float
    rhs: float
    tolerance: float
    informational: bool = False

    @property
    def difference(self) -> float:
        return abs(self.lhs - self.rhs)

    @property
    def passed(self) -> bool:
        return self.informational or self.difference <= self.tolerance * abs(self.rhs)


def central_relations(truncation: int | None = None, tolerance: float = 1e-5) -> list[RelationRow]:
    """
    The central-point relations between Z_1, Z_4 and a_4, compared at the
    same truncation so that only the relations themselves are tested.
    """
    truncation = truncation or get_settings().euler_truncation
    a4_raw = a_k(4, truncation, accelerate=False).real
    z1 = Z1_closed(0.5, 0.5, truncation, include_zeta=False).real
    norms = _prime_norms(truncation)
    z4_odd = Z4_factor(0.5, 0.5, 0.0, truncation).real / K1(0.5, 0.5, 0.0, 2).real
    a4_odd = math.exp(math.fsum(np.log(a_k_local(4, norms) * (1 - norms**-2.0))))
    k1_two = K1(0.5, 0.5, 0.0, 2).real
    return [
        RelationRow("Z_1(1/2,1/2) = 4 a_4", z1, 4 * a4_raw, tolerance),
        RelationRow("Z_4 odd part = prod a_4 local (1-N^-2)", z4_odd, a4_odd, tolerance),
        RelationRow("K_1(1/2,1/2,0;1+i) against 2^-10", k1_two, 2.0**-10, tolerance, informational=True),
    ]
