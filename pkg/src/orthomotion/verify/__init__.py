"""Checks of the analytic results: operator identities, finite-difference
residuals and Monte Carlo goodness of fit."""

from .compare import (boundary_samples, edge_chi2, endpoint_tv, face_tv, kac_limit_check, plane_reduction_tv,
                      planar_tv, singular_mass_check, telegraph_ks, txty_marginal_tv)
from .fd import ConvergenceReport, ResidualReport, convergence_check, fd_residual
from .operators import ExpPolynomial, IdentityReport, Operator, generator_operator, operator_identity_check
from .stats import StatReport, chi2_test, ks_test, tv_distance, tv_report
from .suite import identity_jobs, residual_jobs, run_identity_job, run_residual_job

__all__ = [
    "Operator", "ExpPolynomial", "IdentityReport", "generator_operator", "operator_identity_check",
    "ResidualReport", "ConvergenceReport", "fd_residual", "convergence_check",
    "StatReport", "ks_test", "chi2_test", "tv_distance", "tv_report",
    "singular_mass_check", "telegraph_ks", "planar_tv", "boundary_samples", "edge_chi2", "face_tv",
    "endpoint_tv", "plane_reduction_tv", "txty_marginal_tv", "kac_limit_check",
    "residual_jobs", "run_residual_job", "identity_jobs", "run_identity_job",
]
