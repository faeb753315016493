"""Exact workbench for pairs (Q, L) of a quadratic and a linear form over R x prod Q_p."""

__version__ = "0.1.0"

from .exact import ARCHIMEDEAN, INFINITE, ExtReal, ext_abs_lt, ext_sign, padic_abs, padic_valuation
from .forms import LinForm, NormalForm, PairInstance, QuadForm, eval_quad, kernel_basis, normal_form_pair
from .local import check_hypotheses, hilbert_symbol, is_isotropic_local, pencil_rationality
from .search import SearchBudget, search_witness, verify_witness

__all__ = [
    "ARCHIMEDEAN",
    "INFINITE",
    "ExtReal",
    "LinForm",
    "NormalForm",
    "PairInstance",
    "QuadForm",
    "SearchBudget",
    "check_hypotheses",
    "eval_quad",
    "ext_abs_lt",
    "ext_sign",
    "hilbert_symbol",
    "is_isotropic_local",
    "kernel_basis",
    "normal_form_pair",
    "padic_abs",
    "padic_valuation",
    "pencil_rationality",
    "search_witness",
    "verify_witness",
]
