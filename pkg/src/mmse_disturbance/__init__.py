"""Estimation-theoretic tools for the Gaussian channel with an MMSE disturbance constraint."""

from .bounds import Scenario, c_inf, c_n_upper, d_bound, gap_report, m_inf, width_report
from .design import design_mixed, intersect_power_bound, pam, reference_inputs, xa
from .distributions import Discrete, Gaussian, Mixed
from .metrics import cov_sq_moment, fisher_info, mmse, mutual_information
from .optimizer import SearchConfig, local_search
from .quadrature import GaussGrid, QuadratureSpec, build_grid

__version__ = "0.1.0"

__all__ = [
    "Discrete",
    "GaussGrid",
    "Gaussian",
    "Mixed",
    "QuadratureSpec",
    "Scenario",
    "SearchConfig",
    "build_grid",
    "c_inf",
    "c_n_upper",
    "cov_sq_moment",
    "d_bound",
    "design_mixed",
    "fisher_info",
    "gap_report",
    "intersect_power_bound",
    "local_search",
    "m_inf",
    "mmse",
    "mutual_information",
    "pam",
    "reference_inputs",
    "width_report",
    "xa",
]
