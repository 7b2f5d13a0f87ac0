"""
Verification suites: each identity is evaluated two independent ways and
reported as one row per case.
"""

from __future__ import annotations

import enum
import logging
import math
import random
from collections.abc import Callable, Iterator

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .chars import residue_symbol, residue_symbol_euler
from .config import get_settings
from .errors import VerificationFailure
from .gauss import (
    DIRECT_SUM_LIMIT,
    KernelShape,
    KernelTransform,
    gauss_sum_closed,
    gauss_sum_direct,
    poisson_check,
    primitive_gauss_sum,
)
from .gint import GInt, gaussian_primes, squarefree_odd_iter, totient
from .lfun import SmoothingKernel, V1_series, central_value, zeta_K, zeta_K_partial
from .products import (
    Z1_closed,
    Z2_local,
    Z3_local_identity,
    Z_direct,
    a_k,
    central_relations,
)

logger = logging.getLogger(__name__)


class Suite(str, enum.Enum):
    GAUSS = "gauss"
    POISSON = "poisson"
    ZSERIES = "zseries"
    AFE = "afe"


class SuiteOptions(BaseModel):
    """Sizes of a verification run; None picks the suite's own default."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    nmax: int | None = Field(default=None, ge=1, title="Largest modulus norm")
    dmax: int | None = Field(default=None, ge=1, title="Largest N(d)")
    x: float = Field(default=50.0, gt=0, title="Poisson X")
    kmax: int | None = Field(default=None, ge=1, title="Dual-sum norm bound")
    tolerance: float | None = Field(default=None, gt=0, title="Tolerance override")
    kernel: KernelShape = Field(default="bump", title="Poisson weight")
    trials: int = Field(default=10_000, ge=0, title="Random symbol pairs")
    seed: int = Field(default=20240611, title="Random seed")


class VerificationRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    identity: str = Field(title="Identity")
    parameters: str = Field(title="Parameters")
    direct: float = Field(title="Direct")
    closed: float = Field(title="Closed")
    difference: float = Field(title="|diff|")
    tolerance: float = Field(title="Tolerance")
    passed: bool = Field(title="Pass")
    informational: bool = Field(default=False, title="Informational")


class VerificationReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    suite: Suite
    options: SuiteOptions
    rows: list[VerificationRow]

    @property
    def failed(self) -> int:
        return sum(not row.passed for row in self.rows)

    def raise_for_failures(self) -> None:
        if self.failed:
            raise VerificationFailure(self.suite.value, self.failed, len(self.rows))


def _row(
    identity: str,
    parameters: str,
    direct: complex,
    closed: complex,
    tolerance: float,
    scale: float = 1.0,
    informational: bool = False,
) -> VerificationRow:
    """`tolerance * scale` is the allowed absolute difference."""
    difference = abs(complex(direct) - complex(closed))
    allowed = tolerance * scale
    return VerificationRow(
        identity=identity,
        parameters=parameters,
        direct=complex(direct).real,
        closed=complex(closed).real,
        difference=difference,
        tolerance=allowed,
        passed=informational or difference <= allowed,
        informational=informational,
    )


def _primitive_rows(options: SuiteOptions) -> Iterator[VerificationRow]:
    for d in squarefree_odd_iter(options.dmax or 500):
        value = primitive_gauss_sum(d)
        yield _row("g(chi_d) = sqrt(32 N(d))", f"d={d}", value.value, float(value.exact or 0), 1e-6, scale=float(value.exact or 1))


def _prime_power_rows(options: SuiteOptions) -> Iterator[VerificationRow]:
    """Closed against direct Gauss sums for every prime power of norm <= nmax."""
    tolerance = options.tolerance or 1e-9
    limit = min(options.nmax or 2000, DIRECT_SUM_LIMIT)
    for prime in gaussian_primes(limit).elements():
        q = prime.norm()
        for exponent in (1, 2, 3):
            if q**exponent > limit:
                break
            n = prime**exponent
            for k in (GInt(0, 0), GInt(1, 0), GInt(0, 1), GInt(1, 1), prime, prime * prime):
                closed = gauss_sum_closed(k, n)
                direct = gauss_sum_direct(k, n)
                yield _row("g(k, p^l) closed form", f"k={k} n={prime}^{exponent}", direct.value, closed.value, tolerance)
        if q * q <= limit:
            square = prime * prime
            yield _row(
                "g(0, n) = phi(n), n square",
                f"n={square}",
                gauss_sum_direct(GInt(0, 0), square).value,
                totient(q, 2),
                tolerance,
            )


def _squarefree_rows(options: SuiteOptions) -> Iterator[VerificationRow]:
    tolerance = options.tolerance or 1e-9
    limit = min(options.nmax or 2000, DIRECT_SUM_LIMIT)
    for n in squarefree_odd_iter(limit, primary_only=True):
        expected = residue_symbol(GInt(0, 1), n) * math.sqrt(n.norm())
        direct = gauss_sum_direct(GInt(1, 0), n)
        yield _row("g(n) = (i/n) sqrt N(n)", f"n={n}", direct.value, expected, tolerance, scale=math.sqrt(n.norm()))


def _symbol_rows(options: SuiteOptions) -> Iterator[VerificationRow]:
    """Reciprocity against the Euler criterion on random pairs; one summary row."""
    rng = random.Random(options.seed)
    primes = list(gaussian_primes(options.nmax or 100_000).elements())
    mismatches = 0
    for _ in range(options.trials):
        prime = rng.choice(primes)
        bound = int(math.isqrt(prime.norm())) + 2
        a = GInt(rng.randint(-bound, bound), rng.randint(-bound, bound))
        if residue_symbol(a, prime) != residue_symbol_euler(a, prime):
            mismatches += 1
            logger.warning("symbol mismatch for a=%s, p=%s", a, prime)
    yield _row("(a/p) reciprocity = Euler", f"{options.trials} random pairs", mismatches, 0, 0.0)


def gauss_suite(options: SuiteOptions) -> list[VerificationRow]:
    rows = list(_primitive_rows(options))
    rows += _prime_power_rows(options)
    rows += _squarefree_rows(options)
    rows += _symbol_rows(options.model_copy(update={"nmax": 100_000}))
    return rows


POISSON_MODULI = (GInt(1, 0), GInt(-3, 0), GInt(-1, -2), GInt(3, 2))


def poisson_suite(options: SuiteOptions) -> list[VerificationRow]:
    tolerance = options.tolerance or 1e-6
    kernel = KernelTransform(shape=options.kernel, method="exact" if options.kernel == "gaussian" else "hankel")
    rows = []
    for n in POISSON_MODULI:
        check = poisson_check(n, kernel, options.x, options.kmax, tolerance)
        parameters = f"n={n} X={options.x:g} kmax={check.kmax} W={options.kernel}"
        rows.append(_row("Poisson, all m", parameters, check.lhs_all, check.rhs_all, tolerance))
        rows.append(_row("Poisson, odd m", parameters, check.lhs_odd, check.rhs_odd, tolerance))
    return rows


def zseries_suite(options: SuiteOptions) -> list[VerificationRow]:
    nmax = options.nmax or 10_000
    rows = []

    direct = Z_direct(1.0, 1.25, nmax)
    closed = Z1_closed(1.0, 1.25)
    tolerance = max(options.tolerance or 1e-3, direct.tail_estimate)
    rows.append(_row("Z direct = zeta^3 zeta^3 zeta^4 Z_1", f"alpha=1 beta=1.25 Nmax={nmax}", direct.value, closed.value, tolerance))

    for prime in (GInt(-1, 2), GInt(-3, 0), GInt(3, 2)):
        check = Z3_local_identity(prime, 0.1, 0.1, 0.75)
        rows.append(_row("Z_3 local identity (K_2)", f"p={prime}", check.direct, check.closed, options.tolerance or 1e-8))
        for k in (GInt(1, 0), GInt(0, 1) * prime, prime * prime * GInt(2, 1)):
            z2 = Z2_local(prime, 0.6, 0.7, False, k)
            rows.append(_row("Z_2 local series = closed", f"p={prime} k={k}", z2.direct, z2.closed, z2.tolerance))

    coarse, fine = a_k(4, 10_000), a_k(4, 100_000)
    rows.append(_row("a_4 truncation stability", "P=1e4 vs 1e5", coarse.value, fine.value, 1e-6, scale=fine.real))
    rows.append(_row("zeta_K(2) = ideal sum", "N <= 1e6", zeta_K_partial(2, 10**6), zeta_K(2), 1e-6))
    rows.append(_row("zeta_K(0) = -1/4", "s=0", zeta_K(0, continued=True), -0.25, 1e-12))
    rows.append(_row("s zeta_K(1+s) -> pi/4", "s=1e-8", 1e-8 * zeta_K(1 + 1e-8), math.pi / 4, 1e-6))
    truncation = get_settings().euler_truncation
    for relation in central_relations(truncation, tolerance=1e-5):
        rows.append(
            _row(
                relation.identity,
                f"P={truncation}",
                relation.lhs,
                relation.rhs,
                relation.tolerance,
                scale=abs(relation.rhs),
                informational=relation.informational,
            )
        )
    return rows


def afe_suite(options: SuiteOptions) -> list[VerificationRow]:
    tolerance = options.tolerance or 1e-6
    rows = []
    for d in squarefree_odd_iter(options.dmax or 2_000):
        l1 = central_value(d, 1).value
        l2 = central_value(d, 2).value
        rows.append(_row("L(1/2)^2 from V_1 = from V_2", f"d={d}", l1 * l1, l2, tolerance, scale=1 + abs(l2)))
    ts = np.geomspace(0.05, 20.0, 9)
    for j in (1, 2):
        closed = SmoothingKernel(j=j).values(ts)
        contour = SmoothingKernel(j=j, method="contour").values(ts)
        rows += [
            _row(f"V_{j} contour = closed", f"t={t:.4g}", c, v, 1e-6) for t, c, v in zip(ts, contour, closed)
        ]
    rows += [
        _row("V_1 residue series = closed", f"t={t:.4g}", V1_series(float(t)), v, 1e-10)
        for t, v in zip(ts, SmoothingKernel(j=1).values(ts))
    ]
    return rows


SUITES: dict[Suite, Callable[[SuiteOptions], list[VerificationRow]]] = {
    Suite.GAUSS: gauss_suite,
    Suite.POISSON: poisson_suite,
    Suite.ZSERIES: zseries_suite,
    Suite.AFE: afe_suite,
}


def run_suite(suite: Suite | str, options: SuiteOptions | None = None) -> VerificationReport:
    suite = Suite(suite)
    options = options or SuiteOptions()
    rows = SUITES[suite](options)
    report = VerificationReport(suite=suite, options=options, rows=rows)
    logger.info("suite %s: %d rows, %d failed", suite.value, len(rows), report.failed)
    return report
