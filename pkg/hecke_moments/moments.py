"""
Moment scans over the family of odd square-free d and the comparisons built on
them: square-free density, the Hoelder lower-bound proxy and the shifted
moment envelope.

The sums run over elements d, so every ideal contributes its four unit
multiples. chi_{-d} = chi_d and chi_{-id} = chi_{id}, which leaves two
distinct central values per ideal, each counted twice; the scan evaluates
those two and keeps the full four-unit evaluation for the conservation check.
"""

from __future__ import annotations

import logging
import math
import time
from collections import defaultdict
from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .config import EvenSource, get_settings
from .errors import DomainError, ToleranceError
from .gint import GInt, PrimaryLattice, squarefree_odd_count
from .lfun import (
    ShiftedBoundParams,
    central_value,
    corollary_exponent,
    dirichlet_poly_A,
    shifted_moment_envelope,
    zeta_K,
)
from .products import leading_constant_4

logger = logging.getLogger(__name__)

CHUNK_SIZE = 32
MOMENT_ORDERS = (1, 2, 3, 4)

ASYMPTOTIC_NOTE = (
    "The fourth-moment asymptotic C_4 X (log X)^10 is not reproducible at these X: "
    "its error term dominates until X is astronomically large. The ratio column is "
    "a structural diagnostic (slow variation, positivity), not a convergence test."
)


class MomentRow(BaseModel):
    """One grid point of a moment scan."""

    model_config = ConfigDict(frozen=True)

    x: int = Field(title="X")
    count: int = Field(title="Family count")
    s1: float | None = Field(default=None, title="S_1(X)")
    s2: float | None = Field(default=None, title="S_2(X)")
    s3: float | None = Field(default=None, title="S_3(X)")
    s4: float | None = Field(default=None, title="S_4(X)")
    ratio4: float | None = Field(default=None, title="S_4 / (C_4 X log^10 X)")
    seconds: float = Field(default=0.0, title="Evaluation seconds")

    def moment(self, k: int) -> float | None:
        return getattr(self, f"s{k}")


class CrossCheck(BaseModel):
    """S_4 from the squared second-moment AFE against the fourth power of L."""

    model_config = ConfigDict(frozen=True)

    norm_bound: int = Field(title="Cross-check norm bound")
    from_l2: float = Field(title="sum (L^2)^2")
    from_l1: float = Field(title="sum (L^1)^4")
    tolerance: float = Field(title="Accumulated tolerance")

    @property
    def difference(self) -> float:
        return abs(self.from_l2 - self.from_l1)

    @property
    def passed(self) -> bool:
        return self.difference <= self.tolerance


class MomentReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    rows: list[MomentRow]
    ks: tuple[int, ...]
    tolerance: float = Field(title="AFE tail tolerance")
    max_tail_bound: float = Field(title="Largest AFE tail bound used")
    even_source: EvenSource
    primary_only: bool
    leading_constant: float | None = Field(default=None, title="C_4")
    min_l2: float | None = Field(default=None, title="Smallest L(1/2)^2")
    conservation_gap: float | None = Field(
        default=None, title="Largest gap between unit multiples sharing a character"
    )
    cross_check: CrossCheck | None = None
    note: str = ASYMPTOTIC_NOTE

    def deterministic_view(self) -> dict[str, object]:
        """The report without wall times; equal across worker counts."""
        return self.model_dump(exclude={"rows": {"__all__": {"seconds"}}})


@dataclass(frozen=True)
class _ScanJob:
    tolerance: float
    max_terms: int
    primary_only: bool
    need_l2: bool
    cross_check_norm: int


@dataclass(frozen=True)
class IdealSample:
    """Central values for the representatives d (and i*d) of one ideal."""

    norm: int
    l1: tuple[float, ...]
    l2: tuple[float, ...] | None
    unit_l1: tuple[float, ...] | None
    tail: float
    seconds: float

    @property
    def weight(self) -> int:
        return 2 if len(self.l1) == 2 else 1


def _evaluate(d: GInt, job: _ScanJob) -> IdealSample:
    started = time.perf_counter()
    representatives = [d] if job.primary_only else [d, GInt(0, 1) * d]
    in_cross_range = d.norm() <= job.cross_check_norm
    try:
        first = [central_value(r, 1, job.tolerance, job.max_terms) for r in representatives]
        second = None
        if job.need_l2 or in_cross_range:
            second = [central_value(r, 2, job.tolerance, job.max_terms) for r in representatives]
        unit_l1 = None
        if in_cross_range and not job.primary_only:
            unit_l1 = tuple(
                central_value(u * d, 1, job.tolerance, job.max_terms).value for u in GInt.UNITS
            )
    except ToleranceError as exc:
        raise ToleranceError(f"moment scan aborted at d={d}: {exc}") from exc
    tails = [v.tail_bound for v in first + (second or [])]
    return IdealSample(
        norm=d.norm(),
        l1=tuple(v.value for v in first),
        l2=None if second is None else tuple(v.value for v in second),
        unit_l1=unit_l1,
        tail=max(tails),
        seconds=time.perf_counter() - started,
    )


def _evaluate_chunk(chunk: tuple[tuple[int, int], ...], job: _ScanJob) -> list[IdealSample]:
    return [_evaluate(GInt(re_part, im_part), job) for re_part, im_part in chunk]


def _chunks(points: Sequence[tuple[int, int]], size: int) -> list[tuple[tuple[int, int], ...]]:
    return [tuple(points[i : i + size]) for i in range(0, len(points), size)]


def _primary_squarefree(limit: int) -> list[tuple[int, int]]:
    lattice = PrimaryLattice.covering(limit)
    count = lattice.count_upto(limit)
    indices = np.nonzero(lattice.squarefree_mask()[:count])[0]
    return list(zip(lattice.re[indices].tolist(), lattice.im[indices].tolist()))


def _run(points: list[tuple[int, int]], job: _ScanJob, workers: int) -> list[IdealSample]:
    chunks = _chunks(points, CHUNK_SIZE)
    if workers == 1 or len(chunks) <= 1:
        samples = [s for chunk in chunks for s in _evaluate_chunk(chunk, job)]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = pool.map(_evaluate_chunk, chunks, [job] * len(chunks))
            samples = [s for batch in results for s in batch]
    return samples


def _power(sample: IdealSample, index: int, k: int, even_source: EvenSource) -> float:
    if k % 2 == 0 and even_source == "afe2" and sample.l2 is not None:
        return sample.l2[index] ** (k // 2)
    return sample.l1[index] ** k


def check_ceiling(xmax: int, allow_stretch: bool) -> None:
    settings = get_settings()
    if xmax > settings.stretch_ceiling:
        raise DomainError(f"X = {xmax} exceeds the hard ceiling {settings.stretch_ceiling}")
    if xmax > settings.scan_ceiling:
        if not allow_stretch:
            raise DomainError(
                f"X = {xmax} exceeds the scan ceiling {settings.scan_ceiling}; pass allow_stretch"
            )
        logger.warning("scanning up to X = %d; expect this to take hours", xmax)


def moment_scan(
    grid: Iterable[int],
    ks: Iterable[int] = MOMENT_ORDERS,
    tol: float | None = None,
    workers: int = 1,
    primary_only: bool = False,
    even_source: EvenSource = "afe2",
    allow_stretch: bool = False,
    cross_check_norm: int = 1_000,
    leading_constant: float | None = None,
) -> MomentReport:
    """
    S_k(X) = sum over odd square-free d with N(d) <= X of L(1/2, chi_d)^k for
    every X in the grid.

    Per-d values are computed in fixed chunks in d order and every bucket is
    reduced with math.fsum, so the result does not depend on the worker count.
    """
    grid = sorted(set(int(x) for x in grid))
    ks = tuple(sorted(set(int(k) for k in ks)))
    if not grid or grid[0] < 1:
        raise DomainError(f"the X grid must be non-empty and positive, got {grid}")
    if not ks or not set(ks) <= set(MOMENT_ORDERS):
        raise DomainError(f"moment orders must be drawn from {MOMENT_ORDERS}, got {ks}")
    if workers < 1:
        raise DomainError(f"workers must be at least 1, got {workers}")
    settings = get_settings()
    tol = settings.tolerance if tol is None else tol
    xmax = grid[-1]
    check_ceiling(xmax, allow_stretch)

    job = _ScanJob(
        tolerance=tol,
        max_terms=settings.afe_max_terms,
        primary_only=primary_only,
        need_l2=even_source == "afe2" and any(k % 2 == 0 for k in ks),
        cross_check_norm=cross_check_norm,
    )
    points = _primary_squarefree(xmax)
    logger.info("moment scan: %d ideals up to X = %d on %d worker(s)", len(points), xmax, workers)
    samples = _run(points, job, workers)

    buckets: dict[int, dict[str, list[float]]] = defaultdict(lambda: defaultdict(list))
    for sample in samples:
        bucket = next(x for x in grid if sample.norm <= x)
        terms = buckets[bucket]
        terms["count"].append(float(sample.weight * len(sample.l1)))
        terms["seconds"].append(sample.seconds)
        for k in ks:
            for index in range(len(sample.l1)):
                terms[f"s{k}"].append(sample.weight * _power(sample, index, k, even_source))

    if 4 in ks and leading_constant is None:
        leading_constant = leading_constant_4().real

    rows: list[MomentRow] = []
    totals: dict[str, list[float]] = defaultdict(list)
    for x in grid:
        for name, values in buckets.get(x, {}).items():
            totals[name].append(math.fsum(values))
        moments = {f"s{k}": math.fsum(totals[f"s{k}"]) for k in ks}
        ratio = None
        if 4 in ks and x > 1:
            ratio = moments["s4"] / (leading_constant * x * math.log(x) ** 10)
        rows.append(
            MomentRow(
                x=x,
                count=int(math.fsum(totals["count"])),
                ratio4=ratio,
                seconds=math.fsum(totals["seconds"]),
                **moments,
            )
        )
        logger.info("X = %d: %d elements", x, rows[-1].count)

    return MomentReport(
        rows=rows,
        ks=ks,
        tolerance=tol,
        max_tail_bound=max((s.tail for s in samples), default=0.0),
        even_source=even_source,
        primary_only=primary_only,
        leading_constant=leading_constant,
        min_l2=min((v for s in samples if s.l2 for v in s.l2), default=None),
        conservation_gap=_conservation_gap(samples),
        cross_check=_cross_check(samples, cross_check_norm, tol),
    )


def _conservation_gap(samples: Sequence[IdealSample]) -> float | None:
    """
    max over checked ideals of |L(-d) - L(d)| and |L(-id) - L(id)|; a zero gap
    makes the element sum equal to twice the sum over the two representatives.
    """
    gaps = [
        max(abs(s.unit_l1[2] - s.unit_l1[0]), abs(s.unit_l1[3] - s.unit_l1[1]))
        for s in samples
        if s.unit_l1 is not None
    ]
    return max(gaps) if gaps else None


def _cross_check(samples: Sequence[IdealSample], norm_bound: int, tol: float) -> CrossCheck | None:
    checked = [s for s in samples if s.norm <= norm_bound and s.l2 is not None]
    if not checked:
        return None
    from_l2 = math.fsum(s.weight * v * v for s in checked for v in s.l2 or ())
    from_l1 = math.fsum(s.weight * v**4 for s in checked for v in s.l1)
    # |a^2 - b^4| <= |a - b^2| (|a| + b^2), each AFE carrying at most tol.
    scale = math.fsum(s.weight * (abs(v) + 1) for s in checked for v in s.l2 or ())
    return CrossCheck(norm_bound=norm_bound, from_l2=from_l2, from_l1=from_l1, tolerance=10 * tol * scale + 1e-9)


class DensityReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    x: int = Field(title="X")
    count: int = Field(title="Square-free odd elements")
    predicted: float = Field(title="2 pi X / (3 zeta_K(2))")
    primary_only: bool = False

    @property
    def relative_error(self) -> float:
        return abs(self.count - self.predicted) / self.predicted


def density_report(x: int, primary_only: bool = False) -> DensityReport:
    """Counts odd square-free d with N(d) <= X against 2 pi X / (3 zeta_K(2))."""
    if not 1 <= x <= 10**7:
        raise DomainError(f"density reports cover 1 <= X <= 10^7, got {x}")
    predicted = 2 * math.pi * x / (3 * zeta_K(2).real)
    if primary_only:
        predicted /= 4
    return DensityReport(
        x=x,
        count=squarefree_odd_count(x, primary_only),
        predicted=predicted,
        primary_only=primary_only,
    )


class RsProxy(BaseModel):
    """The Hoelder quotient S_1^k / S_2^(k-1) over X/2 < N(d) <= X."""

    model_config = ConfigDict(frozen=True)

    x: int
    k: int
    poly_length: float = Field(title="Dirichlet polynomial length")
    s1: float = Field(title="sum L A^(k-1)")
    s2: float = Field(title="sum A^k")
    direct: float = Field(title="sum L^k")

    @property
    def lower_bound(self) -> float:
        return self.s1**self.k / self.s2 ** (self.k - 1)

    @property
    def holds(self) -> bool:
        return self.lower_bound <= self.direct * (1 + 1e-9)


def rs_proxy(x: int, k: int, tol: float | None = None) -> RsProxy:
    if k not in (2, 4):
        raise DomainError(f"the Hoelder proxy is taken for k in (2, 4), got {k}")
    if not 2 <= x <= 10**4:
        raise DomainError(f"the Hoelder proxy runs for 2 <= X <= 10^4, got {x}")
    length = x ** (1 / (10 * k))
    s1: list[float] = []
    s2: list[float] = []
    direct: list[float] = []
    for re_part, im_part in _primary_squarefree(x):
        d = GInt(re_part, im_part)
        if 2 * d.norm() <= x:
            continue
        for representative in (d, GInt(0, 1) * d):
            value = central_value(representative, 1, tol).value
            poly = dirichlet_poly_A(representative, length)
            s1.append(2 * value * poly ** (k - 1))
            s2.append(2 * poly**k)
            direct.append(2 * value**k)
    return RsProxy(
        x=x, k=k, poly_length=length, s1=math.fsum(s1), s2=math.fsum(s2), direct=math.fsum(direct)
    )


class ShiftedMomentEstimate(BaseModel):
    """
    The shifted-moment envelope, with the empirical moment alongside it when
    both shifts are zero. Central values at shifted points are not evaluated.
    """

    model_config = ConfigDict(frozen=True)

    z1: complex
    z2: complex
    x: int
    order: int = Field(title="Moment order")
    envelope: float = Field(title="X exp(k M + k^2 V / 2)")
    exponent: float = Field(title="Exponent of log X in the envelope")
    predicted_exponent: float = Field(title="order (order + 1) / 2")
    empirical: float | None = Field(default=None, title="S_order(X)")
    prediction_only: bool = Field(default=False, title="Prediction, no empirical value")


def shifted_moment_estimate(
    z1: complex, z2: complex, x: int, order: int = 4, tol: float | None = None, workers: int = 1
) -> ShiftedMomentEstimate:
    """`order` is the moment order 2k for the k-th power of |L(1/2+z1) L(1/2+z2)|."""
    if order not in (2, 4):
        raise DomainError(f"shifted estimates cover moment orders 2 and 4, got {order}")
    params = ShiftedBoundParams(z1=complex(z1), z2=complex(z2), x=float(x), k=order / 2)
    envelope = shifted_moment_envelope(params)
    exponent = math.log(envelope / x) / math.log(math.log(x))
    empirical = None
    prediction_only = complex(z1) != 0 or complex(z2) != 0
    if prediction_only:
        logger.info("shifts %s, %s: prediction only, no empirical value", z1, z2)
    else:
        report = moment_scan([x], ks=(order,), tol=tol, workers=workers, cross_check_norm=0)
        empirical = report.rows[-1].moment(order)
    return ShiftedMomentEstimate(
        z1=complex(z1),
        z2=complex(z2),
        x=x,
        order=order,
        envelope=envelope,
        exponent=exponent,
        predicted_exponent=corollary_exponent(order),
        empirical=empirical,
        prediction_only=prediction_only,
    )
