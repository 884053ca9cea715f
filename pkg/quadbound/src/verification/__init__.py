"""
Verification Package

This package provides the acceptance suite: named checks with pass/fail
results, timing and peak memory.
"""

from quadbound.src.verification.acceptance import (
    AcceptanceSuite,
    CriterionResult,
    VerificationReport,
    brute_force_chebyshev_omega,
    chebyshev_superlevel,
    run_acceptance,
)

__all__ = [
    "AcceptanceSuite",
    "CriterionResult",
    "VerificationReport",
    "brute_force_chebyshev_omega",
    "chebyshev_superlevel",
    "run_acceptance",
]
