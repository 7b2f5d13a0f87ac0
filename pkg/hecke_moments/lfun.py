"""
Central values of L(s, chi_{(1+i)^5 d}) and the quantities built around them.

L(1/2, chi)^j is evaluated through the exact identity

    L(1/2, chi)^j = 2 sum_n chi(n) d_j(n) N(n)^(-1/2) V_j(N(n) / N(d)^(j/2)),

with the sum over nonzero ideals, each represented by its primary
generator. The kernels V_1 and V_2 have closed forms in terms of erfc and the
integral of K_0; the contour integral defining them is kept as an independent
evaluation path.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Literal

import mpmath
import numpy as np
import numpy.typing as npt
from scipy.integrate import quad, trapezoid
from scipy.optimize import brentq
from scipy.special import erfc, iti0k0, loggamma

from .chars import QuadChar, chi_sieved
from .config import get_settings
from .errors import DomainError, ToleranceError
from .gint import ArithmeticFunctionTable, ArithmeticKind, GInt, PrimaryLattice, norm

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]
KernelMethod = Literal["closed", "contour", "series"]

# (2^(5/2) / pi): the conductor factor per unit of s in w_j(s).
CONDUCTOR_SCALE = 2**2.5 / math.pi


@dataclass(frozen=True)
class SmoothingKernel:
    """
    V_j(t) = (1/2 pi i) int_(c) w_j(s) t^(-s) ds / s,
    w_j(s) = (2^(5/2)/pi)^(js) (Gamma(1/2+s)/Gamma(1/2))^j.

    `contour` integrates along Re s = c for |Im s| <= T with step h,
    `closed` uses V_1(t) = erfc(sqrt(pi t / 2^(5/2))) and
    V_2(t) = (2/pi) int_{pi sqrt(t)/2^(3/2)}^inf K_0(v) dv, and `series` is the
    residue expansion of V_1.
    """

    j: int = 2
    c: float = 1.0
    T: float = 40.0
    h: float = 0.02
    method: KernelMethod = "closed"

    def __post_init__(self) -> None:
        if self.j not in (1, 2):
            raise DomainError(f"kernels exist for j = 1, 2, got {self.j}")
        if self.c <= 0:
            raise DomainError(f"contour abscissa must be positive, got {self.c}")
        if self.method == "series" and self.j != 1:
            raise DomainError("the residue series is only available for j = 1")

    def w(self, s: npt.NDArray[np.complex128]) -> npt.NDArray[np.complex128]:
        log_ratio = loggamma(0.5 + s) - math.lgamma(0.5)
        return np.exp(self.j * (s * math.log(CONDUCTOR_SCALE) + log_ratio))

    def values(self, t: FloatArray) -> FloatArray:
        t = np.asarray(t, dtype=np.float64)
        if np.any(t <= 0):
            raise DomainError("V_j is evaluated at t > 0")
        if self.method == "closed":
            return _closed(self.j, t)
        if self.method == "series":
            return np.array([V1_series(float(v)) for v in t.ravel()]).reshape(t.shape)
        return np.array([self._contour(float(v)) for v in t.ravel()]).reshape(t.shape)

    def _contour(self, t: float) -> float:
        y = np.arange(0.0, self.T + 0.5 * self.h, self.h)
        s = self.c + 1j * y
        integrand = (self.w(s) * np.exp(-s * math.log(t)) / s).real
        return float(trapezoid(integrand, dx=self.h)) / math.pi

    def envelope(self, t: FloatArray) -> FloatArray:
        """The measured decay shape: exp(-pi t/2^(5/2)) or exp(-pi sqrt(t)/2^(3/2))."""
        t = np.asarray(t, dtype=np.float64)
        if self.j == 1:
            return np.exp(-t / CONDUCTOR_SCALE)
        return np.exp(-math.pi * np.sqrt(t) / 2**1.5)

    def decay_constant(self, ts: FloatArray | None = None) -> float:
        """max V_j(t)/envelope(t) over t >= 1."""
        ts = np.geomspace(1.0, 400.0, 64) if ts is None else np.asarray(ts)
        return float(np.max(self.values(ts) / self.envelope(ts)))


def _closed(j: int, t: FloatArray) -> FloatArray:
    if j == 1:
        return erfc(np.sqrt(t / CONDUCTOR_SCALE))
    _, k0_integral = iti0k0(math.pi * np.sqrt(t) / 2**1.5)
    return 1.0 - (2.0 / math.pi) * k0_integral


def V_j(kernel: SmoothingKernel, t: float) -> float:  # noqa: N802
    return float(kernel.values(np.array([t]))[0])


def V1_series(t: float, max_terms: int = 400) -> float:  # noqa: N802
    """1 - pi^(-1/2) sum_m (-1)^m (t/A)^(m+1/2) / (m! (m+1/2)), A = 2^(5/2)/pi."""
    y = t / CONDUCTOR_SCALE
    terms = []
    power = math.sqrt(y)
    for m in range(max_terms):
        term = (-1) ** m * power / (math.factorial(m) * (m + 0.5))
        terms.append(term)
        if abs(term) < 1e-18 and m > y:
            break
        power *= y
    return 1.0 - math.fsum(terms) / math.sqrt(math.pi)


_TAIL_GRID = np.geomspace(1e-3, 1e6, 601)


@lru_cache(maxsize=2)
def _tail_tables(j: int) -> tuple[FloatArray, FloatArray]:
    """int_v^inf v'^(-1/2) V_j(v') dv' and the same with a log v' weight, on the grid."""

    def piece(weight_log: bool, a: float, b: float) -> float:
        def integrand(v: float) -> float:
            value = v**-0.5 * float(_closed(j, np.array([v]))[0])
            return value * math.log(v) if weight_log else value

        return quad(integrand, a, b, limit=200)[0]

    edges = list(zip(_TAIL_GRID[:-1].tolist(), _TAIL_GRID[1:].tolist()))
    plain = np.array([piece(False, a, b) for a, b in edges] + [0.0])
    logged = np.array([piece(True, a, b) for a, b in edges] + [0.0])
    return np.cumsum(plain[::-1])[::-1], np.cumsum(logged[::-1])[::-1]


@lru_cache(maxsize=4096)
def truncation_norm(j: int, scale: float, tol: float) -> tuple[int, float]:
    """
    Smallest tabulated M with

        2 int_M^inf (pi/4) (1 + log u)^(j-1) u^(-1/2) V_j(u/scale) du < tol.

    With u = scale*v the integral splits into scale-free pieces, so one table
    per j serves every conductor. Returns M and the bound it achieves.
    """
    plain, logged = _tail_tables(j)
    tails = plain if j == 1 else (1 + math.log(scale)) * plain + logged
    tails = 2 * (math.pi / 4) * math.sqrt(scale) * tails
    below = np.nonzero(tails < tol)[0]
    if below.shape[0] == 0:
        raise ToleranceError(f"no truncation reaches tolerance {tol} for j={j}")
    index = int(below[0])
    return max(1, math.ceil(scale * _TAIL_GRID[index])), float(tails[index])


@dataclass(frozen=True)
class CentralValue:
    d: GInt
    j: int
    value: float
    truncation_norm: int
    tail_bound: float


@lru_cache(maxsize=8)
def _divisor_values(lattice: PrimaryLattice, k: int) -> FloatArray:
    return ArithmeticFunctionTable(ArithmeticKind.DIVISOR, lattice, k).values


def _afe_sum(
    character: QuadChar, j: int, scale: float, tol: float | None, max_terms: int | None
) -> tuple[float, int, float]:
    settings = get_settings()
    tol = settings.tolerance if tol is None else tol
    max_terms = settings.afe_max_terms if max_terms is None else max_terms
    m, bound = truncation_norm(j, float(scale), tol)
    if m > max_terms:
        raise ToleranceError(
            f"d={character.d}: truncation norm {m} exceeds afe_max_terms={max_terms}"
        )
    table = chi_sieved(character, m)
    count = len(table.values)
    norms = table.lattice.norm[:count].astype(np.float64)
    coefficients = table.values
    if j == 2:
        coefficients = coefficients * _divisor_values(table.lattice, 2)[:count]
    live = coefficients != 0
    kernel = _closed(j, norms[live] / scale)
    terms = coefficients[live] * kernel / np.sqrt(norms[live])
    return 2.0 * math.fsum(terms), m, bound


def central_value(
    d: GInt, j: int = 1, tol: float | None = None, max_terms: int | None = None
) -> CentralValue:
    """L(1/2, chi_{(1+i)^5 d})^j by the exact approximate functional equation."""
    if j not in (1, 2):
        raise DomainError(f"central values are available for j = 1, 2, got {j}")
    character = QuadChar(d)
    scale = norm(d) ** (j / 2)
    value, m, bound = _afe_sum(character, j, scale, tol, max_terms)
    logger.debug("L(1/2)^%d at d=%s: M=%d value=%.12g", j, d, m, value)
    return CentralValue(d=d, j=j, value=value, truncation_norm=m, tail_bound=bound)


def mollified_afe_A_t(  # noqa: N802
    d: GInt, t: float, tol: float | None = None, max_terms: int | None = None
) -> float:
    """A_t(d) = 2 sum chi(n) d(n) N(n)^(-1/2) V_2(N(n)/t); A_{N(d)}(d) = L(1/2)^2."""
    if t <= 0:
        raise DomainError(f"A_t needs t > 0, got {t}")
    return _afe_sum(QuadChar(d), 2, float(t), tol, max_terms)[0]


def dirichlet_poly_A(d: GInt, x: float) -> float:  # noqa: N802
    """A(d) = sum over N(n) <= x of chi(n) / sqrt(N(n))."""
    if x < 1:
        return 0.0
    table = chi_sieved(QuadChar(d), math.floor(x))
    norms = table.lattice.norm[: len(table.values)].astype(np.float64)
    return math.fsum(table.values / np.sqrt(norms))


def zeta_K(s: complex, continued: bool = False) -> complex:  # noqa: N802
    """
    Dedekind zeta of Q(i) as zeta(s) L(s, chi_-4), for Re(s) > 1/2.

    `continued` admits the rest of the plane through the analytic continuation.
    """
    if s == 1:
        raise DomainError("zeta_K has a pole at s = 1")
    if not continued and complex(s).real <= 0.5:
        raise DomainError(f"zeta_K is evaluated for Re(s) > 1/2, got s = {s}")
    value = mpmath.zeta(s) * mpmath.dirichlet(s, [0, 1, 0, -1])
    return complex(value)


def zeta_K_partial(s: float, limit: int) -> float:
    """sum over nonzero ideals with N <= limit of N^(-s)."""
    radius = math.isqrt(limit)
    axis = np.arange(-radius, radius + 1, dtype=np.int64)
    a, b = np.meshgrid(axis, axis, indexing="ij")
    n = (a * a + b * b).ravel()
    n = n[(n > 0) & (n <= limit)].astype(np.float64)
    return math.fsum(n**-s) / 4


@dataclass(frozen=True)
class ShiftedBoundParams:
    """Shifts z1, z2 with 0 <= Re z <= 1/log X, X >= 10 and the power k of |L L|."""

    z1: complex
    z2: complex
    x: float
    k: float

    def __post_init__(self) -> None:
        if self.x < 10:
            raise DomainError(f"X must be at least 10, got {self.x}")
        if self.k <= 0:
            raise DomainError(f"k must be positive, got {self.k}")
        bound = 1 / math.log(self.x)
        for z in (self.z1, self.z2):
            if not 0 <= complex(z).real <= bound:
                raise DomainError(f"Re {z} outside [0, 1/log X] = [0, {bound:.4g}]")

    @property
    def moment_order(self) -> float:
        return 2 * self.k


def script_L(z: complex, x: float) -> float:  # noqa: N802
    """log log x for |z| <= 1/log x, -log|z| for |z| <= 1 and 0 beyond."""
    size = abs(z)
    if size <= 1 / math.log(x):
        return math.log(math.log(x))
    if size <= 1:
        return -math.log(size)
    return 0.0


def script_L_M_V(p: ShiftedBoundParams) -> tuple[float, float, float, float]:  # noqa: N802
    z1, z2, x = complex(p.z1), complex(p.z2), p.x
    l1, l2 = script_L(z1, x), script_L(z2, x)
    m = (l1 + l2) / 2
    v = 0.5 * (
        script_L(2 * z1, x)
        + script_L(2 * z2, x)
        + script_L(2 * z1.real, x)
        + script_L(2 * z2.real, x)
        + 2 * script_L(z1 + z2, x)
        + 2 * script_L(z1 + z2.conjugate(), x)
    )
    return l1, l2, m, v


def shifted_moment_envelope(p: ShiftedBoundParams) -> float:
    """X exp(k M + k^2 V / 2)."""
    _, _, m, v = script_L_M_V(p)
    return p.x * math.exp(p.k * m + p.k * p.k * v / 2)


def corollary_exponent(order: float) -> float:
    """Exponent of log X in the moment of the given order: order(order+1)/2."""
    return order * (order + 1) / 2


@lru_cache(maxsize=1)
def lambda_zero() -> float:
    """The positive root of exp(-lambda) = lambda."""
    return float(brentq(lambda lam: math.exp(-lam) - lam, 0.1, 1.0, xtol=1e-15))


@dataclass(frozen=True)
class GrhBound:
    prime_sum: float
    conductor_term: float

    @property
    def total(self) -> float:
        return self.prime_sum + self.conductor_term


def grh_log_bound(
    d: GInt, s: complex, x: float, lam: float, T: float | None = None  # noqa: N803
) -> GrhBound:
    """
    The conditional upper bound for log|L(s, chi_{(1+i)^5 d})|.

    The prime-power sum carries chi(n) and the weight log(x/N(n))/log x; the
    implied O(1/log x) term is not included.
    """
    s = complex(s)
    sigma, t = s.real, s.imag
    log_x = math.log(x)
    if not lambda_zero() <= lam <= 5:
        raise DomainError(f"lambda must lie in [{lambda_zero():.6f}, 5], got {lam}")
    if not 0.5 <= sigma <= 0.5 + lam / log_x:
        raise DomainError(f"Re s = {sigma} outside [1/2, 1/2 + lambda/log x]")
    T = max(2.0, abs(t)) if T is None else T  # noqa: N806
    table = chi_sieved(QuadChar(d), math.floor(x))
    lattice = table.lattice
    count = len(table.values)
    prime_power = (lattice.rest[:count] == 0) & (np.arange(count) > 0)
    prime_power &= table.values != 0
    norms = lattice.norm[:count][prime_power].astype(np.float64)
    exponents = lattice.spf_exponent[:count][prime_power].astype(np.float64)
    chi_values = table.values[prime_power]
    exponent = 0.5 + lam / log_x + 1j * t
    terms = chi_values / exponents * np.exp(-exponent * np.log(norms)) * np.log(x / norms) / log_x
    prime_sum = math.fsum(terms.real)
    conductor = (math.log(T) + 0.5 * math.log(32 * norm(d))) * (0.5 - sigma + (1 + lam) / log_x)
    return GrhBound(prime_sum=prime_sum, conductor_term=conductor)
