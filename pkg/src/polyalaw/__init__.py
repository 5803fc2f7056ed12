"""Universal-law asymptotics for recursively defined classes of trees.

Typical use::

    from polyalaw import analyze
    report = analyze("w = z + z*MSet(w)", order=500)
    print(report.to_text())
"""

from .classify import Certificate, Classification, certify, classify
from .fixpoint import SolutionPrefix, apply_operator, solve
from .periodicity import PeriodInfo, compute_dq, dominant_singularities, elementary_dq
from .report import AnalysisReport, analyze, empirical_fit, ratio_rho_estimate
from .series import Series
from .singularity import AsymptoticLaw, CharSolution, asymptotic_constant, find_char_point
from .specset import SpecSet
from .term import ParseError, parse, pretty_print

__version__ = "0.1.0"

__all__ = [
    "AnalysisReport",
    "AsymptoticLaw",
    "Certificate",
    "CharSolution",
    "Classification",
    "ParseError",
    "PeriodInfo",
    "Series",
    "SolutionPrefix",
    "SpecSet",
    "analyze",
    "apply_operator",
    "asymptotic_constant",
    "certify",
    "classify",
    "compute_dq",
    "dominant_singularities",
    "elementary_dq",
    "empirical_fit",
    "find_char_point",
    "parse",
    "pretty_print",
    "ratio_rho_estimate",
    "solve",
]
