"""Quadratic Gauss sums, the transform W~ and the two Poisson summation checks."""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Literal

import numpy as np
import numpy.typing as npt
from scipy.special import j0, loggamma, roots_legendre

from .chars import QuadChar, chi_at, one_plus_i_symbol, residue_symbol, symbol_array
from .errors import DomainError, ToleranceError
from .gint import GInt, factor, is_primary, norm, totient

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]
IntArray = npt.NDArray[np.int64]

KernelShape = Literal["bump", "gaussian"]
TransformMethod = Literal["polar", "hankel", "exact"]

GAUSSIAN_CUTOFF = 13.0

# Direct sums materialise one array entry per residue class.
DIRECT_SUM_LIMIT = 10**6


def e_tilde(z: complex) -> complex:
    """exp(2*pi*i*Im z)."""
    return cmath.exp(2j * math.pi * complex(z).imag)


@dataclass(frozen=True)
class ExactForm:
    """coefficient * sqrt(radicand), with a square-free radicand when possible."""

    coefficient: int
    radicand: int = 1

    def __post_init__(self) -> None:
        if self.radicand < 1:
            raise DomainError(f"radicand must be positive, got {self.radicand}")
        root = math.isqrt(self.radicand)
        if root * root == self.radicand and self.radicand != 1:
            object.__setattr__(self, "coefficient", self.coefficient * root)
            object.__setattr__(self, "radicand", 1)

    def __mul__(self, other: ExactForm) -> ExactForm:
        return ExactForm(self.coefficient * other.coefficient, self.radicand * other.radicand)

    def __float__(self) -> float:
        return self.coefficient * math.sqrt(self.radicand)

    def __str__(self) -> str:
        if self.radicand == 1 or self.coefficient == 0:
            return str(self.coefficient)
        return f"{self.coefficient}*sqrt({self.radicand})"


@dataclass(frozen=True)
class GaussSumValue:
    value: complex
    exact: ExactForm | None = None

    def __post_init__(self) -> None:
        if self.exact is not None:
            target = float(self.exact)
            if abs(self.value - target) >= 1e-9 * (1 + abs(target)):
                raise AssertionError(f"Gauss sum {self.value} disagrees with {self.exact}")


def residue_system(n: GInt) -> tuple[IntArray, IntArray]:
    """x + y*i with 0 <= x < N/g, 0 <= y < g, g = gcd(re, im): one point per class mod n."""
    if not n:
        raise DomainError("no residue system modulo zero")
    g = math.gcd(n.re, n.im)
    x, y = np.meshgrid(
        np.arange(norm(n) // g, dtype=np.int64), np.arange(g, dtype=np.int64), indexing="ij"
    )
    return x.ravel(), y.ravel()


def _phases(r: GInt, n: GInt, x: IntArray, y: IntArray) -> FloatArray:
    """Im(r*x/n) mod 1, computed exactly as Im(r*conj(n)*x) mod N(n)."""
    rn = r * n.conj()
    big_n = norm(n)
    numerator = (rn.re * y + rn.im * x) % big_n
    return numerator.astype(np.float64) / big_n


def _fsum_complex(weights: npt.NDArray[np.int8], phases: FloatArray) -> complex:
    keep = weights != 0
    angle = 2 * np.pi * phases[keep]
    w = weights[keep].astype(np.float64)
    return complex(math.fsum(w * np.cos(angle)), math.fsum(w * np.sin(angle)))


def _check_direct_size(n: GInt) -> None:
    if norm(n) > DIRECT_SUM_LIMIT:
        raise DomainError(
            f"direct Gauss sums are limited to N(n) <= {DIRECT_SUM_LIMIT}, got N({n}) = {norm(n)}"
        )


def gauss_sum_direct(r: GInt, n: GInt) -> GaussSumValue:
    """g(r, n) as the sum over x mod n of (x/n) e~(r x / n)."""
    if not n or not n.is_odd():
        raise DomainError(f"Gauss sums need an odd modulus, got {n}")
    _check_direct_size(n)
    x, y = residue_system(n)
    return GaussSumValue(_fsum_complex(symbol_array(x, y, n), _phases(r, n, x, y)))


def valuation(k: GInt, prime: GInt) -> float:
    """Exponent of prime in k, infinity for k = 0."""
    if not k:
        return math.inf
    h = 0
    while prime.divides(k):
        k = k.exact_div(prime)
        h += 1
    return h


def prime_power_gauss_form(q: int, h: float, symbol: int, exponent: int) -> ExactForm:
    """
    g(k, prime^exponent) from h = v_prime(k) and symbol = (i k prime^-h / prime).

    Only the norm q of the prime enters, so neither k nor the prime power has
    to be materialised.
    """
    if exponent == 0:
        return ExactForm(1)
    if exponent <= h:
        return ExactForm(0) if exponent % 2 else ExactForm(totient(q, exponent))
    if exponent == h + 1:
        if exponent % 2 == 0:
            return ExactForm(-(q ** (exponent - 1)))
        return ExactForm(symbol * q ** (exponent - 1), q)
    return ExactForm(0)


def twisted_symbol(k: GInt, prime: GInt, h: float) -> int:
    """(i k prime^-h / prime); zero when k = 0."""
    if not k:
        return 0
    return residue_symbol(GInt(0, 1) * k.exact_div(prime ** int(h)), prime)


def _prime_power_form(k: GInt, prime: GInt, exponent: int) -> ExactForm:
    h = valuation(k, prime)
    symbol = twisted_symbol(k, prime, h) if exponent == h + 1 else 0
    return prime_power_gauss_form(norm(prime), h, symbol, exponent)


def gauss_sum_closed(k: GInt, n: GInt) -> GaussSumValue:
    """
    g(k, n) for primary n from the prime-power table.

    With h the exponent of the prime in k, the factor at prime^l is 0 for odd
    l <= h, phi(prime^l) for even l <= h, -N^(l-1) for even l = h+1,
    (i k prime^-h / prime) N^(l-1/2) for odd l = h+1 and 0 for l >= h+2.
    """
    if not is_primary(n):
        raise DomainError(f"closed-form Gauss sums need a primary modulus, got {n}")
    form = ExactForm(1)
    for prime, exponent in factor(n).primes:
        form = form * _prime_power_form(k, prime, exponent)
        if form.coefficient == 0:
            break
    return GaussSumValue(complex(float(form)), form)


def gauss_sum_class_key(k_re: IntArray, k_im: IntArray, n: GInt) -> IntArray:
    """Integer key of the class of k mod n; g(k, n) depends only on it."""
    big_n = norm(n)
    key_re = (k_re * n.re + k_im * n.im) % big_n
    key_im = (k_im * n.re - k_re * n.im) % big_n
    return key_re * big_n + key_im


def primitive_gauss_sum(d: GInt) -> GaussSumValue:
    """g(chi_{(1+i)^5 d}) by direct summation; the closed value is sqrt(32 N(d))."""
    return gauss_sum_character(GInt(1, 0), QuadChar(d))


def gauss_sum_character(r: GInt, c: QuadChar) -> GaussSumValue:
    """g(r, chi) = sum over x mod (1+i)^5 d of chi(x) e~(r x / ((1+i)^5 d))."""
    modulus = c.modulus
    _check_direct_size(modulus)
    x, y = residue_system(modulus)
    value = _fsum_complex(chi_at(c, x, y), _phases(r, modulus, x, y))
    exact = ExactForm(1, c.conductor_norm) if r == GInt(1, 0) else None
    return GaussSumValue(value, exact)


@lru_cache(maxsize=64)
def _gauss_legendre(order: int) -> tuple[FloatArray, FloatArray]:
    nodes, weights = roots_legendre(order)
    return nodes, weights


def _panel_nodes(a: float, b: float, panels: int, order: int) -> tuple[FloatArray, FloatArray]:
    """Composite Gauss-Legendre nodes and weights on [a, b]."""
    x, w = _gauss_legendre(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


@dataclass(frozen=True)
class KernelTransform:
    """
    A smooth weight W on (0, inf) together with the rule used to evaluate

        W~(t) = 2 * int_0^{pi/2} int_0^inf cos(2 pi t sqrt(r) sin(theta)) W(r) dr dtheta.

    The default bump is exp(-1/(1-(2r-3)^2)) on [1, 2]. The gaussian weight
    exp(-pi r) has W~(t) = exp(-pi t^2) exactly and is cut at r = 13.
    """

    shape: KernelShape = "bump"
    method: TransformMethod = "polar"
    order: int = 24
    panels: int = 16
    tolerance: float = 1e-11
    max_doublings: int = 8

    def __post_init__(self) -> None:
        if self.shape not in ("bump", "gaussian"):
            raise DomainError(f"unsupported kernel shape {self.shape!r}")
        if self.method == "exact" and self.shape != "gaussian":
            raise DomainError("only the gaussian kernel has an exact transform")

    @property
    def support(self) -> tuple[float, float]:
        return (1.0, 2.0) if self.shape == "bump" else (0.0, GAUSSIAN_CUTOFF)

    def weight(self, r: FloatArray) -> FloatArray:
        r = np.asarray(r, dtype=np.float64)
        if self.shape == "gaussian":
            return np.where(r <= GAUSSIAN_CUTOFF, np.exp(-np.pi * r), 0.0)
        u = 2.0 * r - 3.0
        inside = np.abs(u) < 1.0
        safe = np.where(inside, 1.0 - u * u, 1.0)
        return np.where(inside, np.exp(-1.0 / safe), 0.0)

    def integral(self) -> float:
        """int_0^inf W(r) dr, so that W~(0) = pi times this."""
        a, b = self.support
        nodes, weights = _panel_nodes(a, b, 4 * self.panels, self.order)
        return math.fsum(weights * self.weight(nodes))


def _polar(kernel: KernelTransform, t: float, panels: int) -> float:
    lo, hi = (math.sqrt(v) for v in kernel.support)
    rho, w_rho = _panel_nodes(lo, hi, panels, kernel.order)
    theta, w_theta = _panel_nodes(0.0, math.pi / 2, panels, kernel.order)
    radial = kernel.weight(rho * rho) * rho * w_rho
    phase = np.cos(2 * np.pi * t * np.outer(np.sin(theta), rho))
    return 4.0 * math.fsum((w_theta[:, None] * phase * radial[None, :]).ravel())


def _hankel_panels(kernel: KernelTransform, t: float) -> int:
    lo, hi = (math.sqrt(v) for v in kernel.support)
    return max(kernel.panels, math.ceil(2 * t * (hi - lo)))


def _hankel(kernel: KernelTransform, ts: FloatArray, panels: int) -> FloatArray:
    lo, hi = (math.sqrt(v) for v in kernel.support)
    rho, w_rho = _panel_nodes(lo, hi, panels, kernel.order)
    radial = 2 * np.pi * kernel.weight(rho * rho) * rho * w_rho
    out = np.empty(ts.shape[0])
    chunk = max(1, 2_000_000 // rho.shape[0])
    for start in range(0, ts.shape[0], chunk):
        block = ts[start : start + chunk]
        out[start : start + chunk] = j0(2 * np.pi * np.outer(block, rho)) @ radial
    return out


def w_transform(kernel: KernelTransform, t: float) -> float:
    """W~(t) by the kernel's method, refined until successive panel doublings agree."""
    if t < 0:
        raise DomainError(f"W~ is evaluated at t >= 0, got {t}")
    if kernel.method == "exact":
        return math.exp(-math.pi * t * t)
    if kernel.method == "hankel":
        evaluate = lambda p: float(_hankel(kernel, np.array([t]), p)[0])  # noqa: E731
    else:
        evaluate = lambda p: _polar(kernel, t, p)  # noqa: E731
    panels = _hankel_panels(kernel, t)
    previous = evaluate(panels)
    for _ in range(kernel.max_doublings):
        panels *= 2
        current = evaluate(panels)
        if abs(current - previous) < kernel.tolerance:
            return current
        previous = current
    raise ToleranceError(f"W~({t}) did not settle after {panels} panels")


def w_transform_array(kernel: KernelTransform, ts: FloatArray) -> FloatArray:
    """Vectorised W~ over many t; the polar rule falls back to the Hankel form."""
    ts = np.asarray(ts, dtype=np.float64)
    if kernel.method == "exact":
        return np.exp(-np.pi * ts * ts)
    out = np.empty(ts.shape[0])
    panel_counts = np.array(
        [64 * math.ceil(_hankel_panels(kernel, t) / 32) for t in ts.tolist()], dtype=np.int64
    )
    for count in np.unique(panel_counts).tolist():
        group = panel_counts == count
        out[group] = _hankel(kernel, ts[group], int(count))
    return out


def _mellin_of_weight(kernel: KernelTransform, u: npt.NDArray[np.complex128]) -> npt.NDArray[np.complex128]:
    """int_0^inf W(r) r^(u-1) dr along a vertical line."""
    if kernel.shape == "gaussian":
        return np.exp(loggamma(u) - u * math.log(math.pi))
    nodes, weights = _panel_nodes(1.0, 2.0, 4 * kernel.panels, kernel.order)
    powers = np.exp(np.outer(u - 1, np.log(nodes)))
    return powers @ (weights * kernel.weight(nodes))


def w_transform_mellin(
    kernel: KernelTransform, t: float, abscissa: float = 0.5, height: float = 60.0
) -> float:
    """
    W~(t) from the inverse Mellin integral along Re s = abscissa.

    The integrand is W^(1-s) (pi t)^(-2s) Gamma(s)/Gamma(1-s); the conjugate
    symmetry of the line folds it onto Im s >= 0.
    """
    if t <= 0:
        raise DomainError(f"the Mellin form needs t > 0, got {t}")
    y, w = _panel_nodes(0.0, height, max(kernel.panels, math.ceil(height)), kernel.order)
    s = abscissa + 1j * y
    integrand = (
        _mellin_of_weight(kernel, 1 - s)
        * np.exp(-2 * s * math.log(math.pi * t) + loggamma(s) - loggamma(1 - s))
    )
    return math.fsum(w * integrand.real)


@dataclass(frozen=True)
class PoissonCheck:
    """Both sides of both Poisson formulas at one modulus."""

    n: GInt
    x: float
    kmax: int
    lhs_all: float
    rhs_all: float
    tail_all: float
    lhs_odd: float
    rhs_odd: float
    tail_odd: float

    @property
    def discrepancy_all(self) -> float:
        return abs(self.lhs_all - self.rhs_all)

    @property
    def discrepancy_odd(self) -> float:
        return abs(self.lhs_odd - self.rhs_odd)

    @property
    def discrepancy(self) -> float:
        return max(self.discrepancy_all, self.discrepancy_odd)


def _disc_points(radius_sq: float) -> tuple[IntArray, IntArray]:
    r = math.isqrt(math.floor(radius_sq))
    a, b = np.meshgrid(np.arange(-r, r + 1, dtype=np.int64), np.arange(-r, r + 1, dtype=np.int64), indexing="ij")
    keep = a * a + b * b <= radius_sq
    return a[keep], b[keep]


def default_kmax(kernel: KernelTransform, n: GInt, x: float) -> int:
    """Dual-side cut giving t up to 600 (bump) or 5 (gaussian) in the odd formula."""
    t_cut = 5.0 if kernel.shape == "gaussian" else 600.0
    return max(16, math.ceil(2 * t_cut * t_cut * norm(n) / x))


def _dual_sum(
    kernel: KernelTransform, g_values: npt.NDArray[np.complex128], k_norm: IntArray, scale: float, kmax: int
) -> tuple[complex, complex]:
    """(sum over N(k) <= kmax, sum over the outermost dyadic shell)."""
    distinct, inverse = np.unique(k_norm, return_inverse=True)
    transforms = w_transform_array(kernel, np.sqrt(distinct * scale))[inverse]
    terms = g_values * transforms
    shell = k_norm > kmax // 2
    total = complex(math.fsum(terms.real), math.fsum(terms.imag))
    tail = complex(math.fsum(terms.real[shell]), math.fsum(terms.imag[shell]))
    return total, tail


def poisson_check(
    n: GInt,
    kernel: KernelTransform | None = None,
    x: float = 50.0,
    kmax: int | None = None,
    tolerance: float = 1e-6,
) -> PoissonCheck:
    """
    Evaluates both sides of

        sum_m (m/n) W(N(m)/X) = X/N(n) sum_k g(k, n) W~(sqrt(N(k) X / N(n)))

    and of its odd-m analogue

        sum_{m odd} (m/n) W(N(m)/X)
            = X/(2N(n)) ((1+i)/n) sum_k (-1)^N(k) g(k, n) W~(sqrt(N(k) X / (2N(n)))).

    The dual sums run over N(k) <= kmax; the outermost dyadic shell is the
    reported tail and must stay below tolerance.
    """
    kernel = kernel or KernelTransform()
    if not is_primary(n):
        raise DomainError(f"Poisson formulas need a primary modulus, got {n}")
    big_n = norm(n)
    kmax = kmax or default_kmax(kernel, n, x)

    m_re, m_im = _disc_points(x * kernel.support[1])
    weights = kernel.weight((m_re * m_re + m_im * m_im) / x) * symbol_array(m_re, m_im, n)
    odd = (m_re + m_im) % 2 == 1
    lhs_all = math.fsum(weights)
    lhs_odd = math.fsum(weights[odd])

    k_re, k_im = _disc_points(kmax)
    k_norm = k_re * k_re + k_im * k_im
    keys = gauss_sum_class_key(k_re, k_im, n)
    classes, first, inverse = np.unique(keys, return_index=True, return_inverse=True)
    class_values = np.array(
        [gauss_sum_closed(GInt(int(k_re[i]), int(k_im[i])), n).value for i in first.tolist()]
    )
    g_values = class_values[inverse]
    logger.debug("poisson n=%s: %d dual points in %d classes", n, k_norm.shape[0], classes.shape[0])

    total_all, tail_all = _dual_sum(kernel, g_values, k_norm, x / big_n, kmax)
    signs = np.where(k_norm % 2 == 1, -1.0, 1.0)
    total_odd, tail_odd = _dual_sum(kernel, signs * g_values, k_norm, x / (2 * big_n), kmax)
    rhs_all = x / big_n * total_all
    rhs_odd = x / (2 * big_n) * one_plus_i_symbol(n) * total_odd

    check = PoissonCheck(
        n=n,
        x=x,
        kmax=kmax,
        lhs_all=lhs_all,
        rhs_all=rhs_all.real,
        tail_all=abs(x / big_n * tail_all),
        lhs_odd=lhs_odd,
        rhs_odd=rhs_odd.real,
        tail_odd=abs(x / (2 * big_n) * tail_odd),
    )
    if max(check.tail_all, check.tail_odd) > tolerance:
        raise ToleranceError(
            f"dual-sum tail {max(check.tail_all, check.tail_odd):.3e} at kmax={kmax} exceeds {tolerance}"
        )
    return check
