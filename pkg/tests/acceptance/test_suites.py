"""Researcher acceptance tests for the verification suites"""

import pytest

from hecke_moments import suites
from hecke_moments.errors import VerificationFailure
from hecke_moments.gauss import gauss_sum_direct
from hecke_moments.suites import (
    SUITES,
    Suite,
    SuiteOptions,
    VerificationReport,
    VerificationRow,
    run_suite,
)


def _assert_all_pass(report: VerificationReport) -> None:
    failing = [row for row in report.rows if not row.passed]
    assert not failing, failing
    report.raise_for_failures()


def test_every_suite_is_registered():
    """As a researcher, I want each suite name mapped to a runner
    so that the command line can offer all of them"""
    assert set(SUITES) == set(Suite)
    assert [s.value for s in Suite] == ["gauss", "poisson", "zseries", "afe"]


def test_researcher_can_verify_gauss_sums():
    """As a researcher, I want Gauss sums and symbols verified on small moduli
    so that the arithmetic layer is trusted before long runs"""
    report = run_suite("gauss", SuiteOptions(nmax=30, dmax=20, trials=200))
    assert report.suite is Suite.GAUSS
    assert len(report.rows) > 20
    assert {row.identity for row in report.rows} >= {
        "g(chi_d) = sqrt(32 N(d))",
        "g(k, p^l) closed form",
        "g(0, n) = phi(n), n square",
        "g(n) = (i/n) sqrt N(n)",
        "(a/p) reciprocity = Euler",
    }
    _assert_all_pass(report)


def test_gauss_suite_keeps_direct_sums_within_nmax(monkeypatch):
    """As a researcher, I want nmax to bound every modulus summed directly
    so that verify gauss --nmax 500 stays a desk-sized run"""
    seen = []

    def recording_direct(r, n):
        seen.append(n.norm())
        return gauss_sum_direct(r, n)

    monkeypatch.setattr(suites, "gauss_sum_direct", recording_direct)
    run_suite(Suite.GAUSS, SuiteOptions(nmax=130, dmax=5, trials=10))
    assert max(seen) <= 130
    assert 125 in seen


def test_researcher_can_verify_poisson_summation():
    """As a researcher, I want both Poisson formulas checked at the standard moduli
    so that the dual-sum side of the AFE is validated"""
    report = run_suite(Suite.POISSON, SuiteOptions(kernel="gaussian", x=20.0))
    assert len(report.rows) == 8
    _assert_all_pass(report)


def test_researcher_can_verify_the_afe(fast_settings):
    """As a researcher, I want the two central-value expansions compared
    so that moment scans rest on a checked kernel"""
    report = run_suite(Suite.AFE, SuiteOptions(dmax=20))
    assert any(row.identity.startswith("V_2 contour") for row in report.rows)
    _assert_all_pass(report)


def test_researcher_can_verify_z_series_on_a_small_box(fast_settings):
    """As a researcher, I want the Z-series identities at reduced sizes
    so that a quick run catches gross errors"""
    report = run_suite(Suite.ZSERIES, SuiteOptions(nmax=1_000, tolerance=0.25))
    informational = [row for row in report.rows if row.informational]
    assert len(informational) == 1
    assert informational[0].passed
    _assert_all_pass(report)


@pytest.mark.slow
@pytest.mark.parametrize("suite", list(Suite))
def test_suites_pass_at_default_sizes(suite):
    """As a researcher, I want every suite to pass at its published sizes
    so that the acceptance bar is met as shipped"""
    _assert_all_pass(run_suite(suite))


def test_failed_rows_raise_a_verification_failure():
    """As a researcher, I want a failing row to surface as an error
    so that scripts stop on a broken identity"""
    row = VerificationRow(
        identity="x = y", parameters="", direct=1.0, closed=2.0, difference=1.0, tolerance=0.1, passed=False
    )
    report = VerificationReport(suite=Suite.GAUSS, options=SuiteOptions(), rows=[row])
    assert report.failed == 1
    with pytest.raises(VerificationFailure) as info:
        report.raise_for_failures()
    assert info.value.failed == 1
    assert info.value.exit_code == 1


def test_suite_options_are_validated():
    """As a researcher, I want nonsensical sizes rejected
    so that a suite never runs on an empty box"""
    with pytest.raises(ValueError):
        SuiteOptions(nmax=0)
    with pytest.raises(ValueError):
        SuiteOptions(kernel="box")
    with pytest.raises(ValueError):
        SuiteOptions(unknown=1)
