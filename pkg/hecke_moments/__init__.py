from . import chars, cj_models, gauss, gint, lfun, moments, products, reports, suites, templating
from .chars import QuadChar, chi, residue_symbol
from .errors import (
    DomainError,
    HeckeMomentsError,
    OverflowRejected,
    ToleranceError,
    VerificationFailure,
)
from .gint import GInt, PrimaryLattice, factor
from .lfun import central_value, zeta_K
from .moments import moment_scan

__all__ = [
    "chars",
    "cj_models",
    "gauss",
    "gint",
    "lfun",
    "moments",
    "products",
    "reports",
    "suites",
    "templating",
    "GInt",
    "PrimaryLattice",
    "factor",
    "QuadChar",
    "chi",
    "residue_symbol",
    "central_value",
    "zeta_K",
    "moment_scan",
    "HeckeMomentsError",
    "DomainError",
    "OverflowRejected",
    "ToleranceError",
    "VerificationFailure",
]
