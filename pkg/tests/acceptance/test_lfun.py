"""Researcher acceptance tests for central values and the shifted-moment envelope"""

import math

import numpy as np
import pytest

from hecke_moments.errors import DomainError, ToleranceError
from hecke_moments.gint import GInt
from hecke_moments.lfun import (
    ShiftedBoundParams,
    SmoothingKernel,
    V1_series,
    V_j,
    central_value,
    corollary_exponent,
    dirichlet_poly_A,
    grh_log_bound,
    lambda_zero,
    mollified_afe_A_t,
    script_L,
    script_L_M_V,
    shifted_moment_envelope,
    truncation_norm,
    zeta_K,
    zeta_K_partial,
)


def test_researcher_can_evaluate_the_dedekind_zeta():
    """As a researcher, I want zeta_K of Q(i)
    so that densities and leading constants have their normalisation"""
    assert zeta_K(2).real == pytest.approx(1.5067030099229851, rel=1e-12)
    assert zeta_K(0, continued=True).real == pytest.approx(-0.25, abs=1e-14)
    assert zeta_K_partial(2, 10**5) == pytest.approx(zeta_K(2).real, abs=2e-5)
    with pytest.raises(DomainError):
        zeta_K(1)
    for s in (0.5, 0, 0.3 + 5j):
        with pytest.raises(DomainError):
            zeta_K(s)


@pytest.mark.parametrize("t", [0.1, 1.0, 5.0])
def test_v1_closed_form_matches_series_and_contour(t):
    """As a researcher, I want three independent evaluations of V_1
    so that the erfc closed form is trusted"""
    closed = V_j(SmoothingKernel(1), t)
    assert V1_series(t) == pytest.approx(closed, abs=1e-9)
    assert V_j(SmoothingKernel(1, method="contour"), t) == pytest.approx(closed, abs=1e-6)


@pytest.mark.parametrize("t", [0.1, 1.0, 5.0, 30.0])
def test_v2_closed_form_matches_contour(t):
    """As a researcher, I want V_2 through the K_0 integral
    so that second moments need no contour integration"""
    closed = V_j(SmoothingKernel(2), t)
    assert V_j(SmoothingKernel(2, method="contour"), t) == pytest.approx(closed, abs=1e-6)


@pytest.mark.parametrize("j", [1, 2])
@pytest.mark.parametrize(
    "c, T, h",
    [(0.5, 40.0, 0.02), (2.0, 40.0, 0.02), (1.0, 20.0, 0.02), (1.0, 80.0, 0.02), (1.0, 40.0, 0.01), (1.0, 40.0, 0.04)],
)
def test_contour_kernels_are_stable_under_halving_and_doubling(j, c, T, h):
    """As a researcher, I want V_j unchanged when the contour abscissa, height or step
    is halved or doubled so that the quadrature settings are not tuned to one point"""
    kernel = SmoothingKernel(j, c=c, T=T, h=h, method="contour")
    reference = SmoothingKernel(j, method="contour")
    for t in (0.3, 1.0, 5.0):
        assert V_j(kernel, t) == pytest.approx(V_j(reference, t), abs=1e-9)
        assert V_j(kernel, t) == pytest.approx(V_j(SmoothingKernel(j), t), abs=1e-6)


def test_series_kernel_is_stable_under_term_count():
    """As a researcher, I want the residue series of V_1 to settle
    so that its term cap never decides the value"""
    for t in (0.3, 1.0, 5.0, 20.0):
        short, full, long = (V1_series(t, max_terms=m) for m in (200, 400, 800))
        assert short == pytest.approx(full, abs=1e-12)
        assert long == pytest.approx(full, abs=1e-12)
        assert full == pytest.approx(V_j(SmoothingKernel(1), t), abs=1e-9)


def test_kernels_decay_from_one():
    """As a researcher, I want V_j(0+) = 1 and monotone decay
    so that truncating the sum is justified"""
    ts = np.geomspace(1e-10, 200, 50)
    for j in (1, 2):
        values = SmoothingKernel(j).values(ts)
        assert values[0] == pytest.approx(1.0, abs=1e-3)
        assert np.all(np.diff(values) < 0)
        assert SmoothingKernel(j).decay_constant() < 10


def test_kernel_rejects_bad_parameters():
    """As a researcher, I want unsupported kernels rejected
    so that j = 3 never silently reuses the j = 2 weight"""
    with pytest.raises(DomainError):
        SmoothingKernel(3)
    with pytest.raises(DomainError):
        SmoothingKernel(2, method="series")
    with pytest.raises(DomainError):
        SmoothingKernel(1).values(np.array([0.0]))


def test_truncation_norm_grows_with_precision():
    """As a researcher, I want the truncation to follow the tolerance
    so that tighter runs sum more terms"""
    loose, loose_bound = truncation_norm(1, 100.0, 1e-4)
    tight, tight_bound = truncation_norm(1, 100.0, 1e-10)
    assert loose < tight
    assert loose_bound < 1e-4
    assert tight_bound < 1e-10


@pytest.mark.parametrize("d", [GInt(1), GInt(-3), GInt(-1, -2), GInt(0, 1) * GInt(3, 2)])
def test_square_of_first_moment_term_matches_second(d):
    """As a researcher, I want L(1/2)^2 from both expansions to agree
    so that the two approximate functional equations validate each other"""
    l1 = central_value(d, 1, tol=1e-11)
    l2 = central_value(d, 2, tol=1e-11)
    assert l1.value**2 == pytest.approx(l2.value, abs=1e-8 * (1 + abs(l2.value)))
    assert l1.tail_bound < 1e-11
    assert mollified_afe_A_t(d, float(d.norm()), tol=1e-11) == pytest.approx(l2.value, abs=1e-12)


def test_central_value_is_a_function_of_the_ideal():
    """As a researcher, I want L(1/2, chi_d) = L(1/2, chi_{-d})
    so that unit multiples can be collapsed"""
    d = GInt(3, 2)
    assert central_value(-d, 1, tol=1e-10).value == pytest.approx(central_value(d, 1, tol=1e-10).value, abs=1e-12)


def test_central_value_respects_the_term_budget():
    """As a researcher, I want runaway truncations aborted
    so that a bad tolerance cannot exhaust memory"""
    with pytest.raises(ToleranceError):
        central_value(GInt(-3), 2, tol=1e-10, max_terms=5)
    with pytest.raises(DomainError):
        central_value(GInt(-3), 3)


def test_dirichlet_polynomial():
    """As a researcher, I want the short sum A(d)
    so that lower bounds through short sums can be tested"""
    assert dirichlet_poly_A(GInt(-3), 0.5) == 0.0
    assert dirichlet_poly_A(GInt(-3), 1) == pytest.approx(1.0)
    assert dirichlet_poly_A(GInt(1), 5) == pytest.approx(1.0)


def test_script_l_and_envelope_at_the_origin():
    """As a researcher, I want the shifted-moment envelope at z = 0
    so that it reduces to X (log X)^(k(2k+1))"""
    x = 1e4
    assert script_L(0, x) == pytest.approx(math.log(math.log(x)))
    assert script_L(0.5, x) == pytest.approx(math.log(2))
    assert script_L(2, x) == 0.0
    params = ShiftedBoundParams(0, 0, x, 2)
    _, _, m, v = script_L_M_V(params)
    assert v == pytest.approx(4 * math.log(math.log(x)))
    assert m == pytest.approx(math.log(math.log(x)))
    assert shifted_moment_envelope(params) == pytest.approx(x * math.log(x) ** 10, rel=1e-12)
    assert corollary_exponent(4) == 10
    assert params.moment_order == 4


def test_shift_parameters_are_validated():
    """As a researcher, I want shifts outside the strip rejected
    so that the envelope is only quoted where it applies"""
    with pytest.raises(DomainError):
        ShiftedBoundParams(0, 0, 5, 1)
    with pytest.raises(DomainError):
        ShiftedBoundParams(0.5, 0, 100, 1)
    with pytest.raises(DomainError):
        ShiftedBoundParams(0, 0, 100, 0)


def test_conditional_log_bound():
    """As a researcher, I want the conditional bound on log|L|
    so that large values can be compared against it"""
    lam = lambda_zero()
    assert math.exp(-lam) == pytest.approx(lam, abs=1e-14)
    assert lam == pytest.approx(0.5671432904097838)
    bound = grh_log_bound(GInt(-3), 0.5, 100.0, lam)
    assert math.isfinite(bound.total)
    assert bound.conductor_term > 0
    with pytest.raises(DomainError):
        grh_log_bound(GInt(-3), 0.5, 100.0, 0.1)
    with pytest.raises(DomainError):
        grh_log_bound(GInt(-3), 0.9, 100.0, lam)
