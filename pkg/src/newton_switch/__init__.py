"""Globalized Newton-type solver with a certified switch to the
frozen-Jacobian simplified iteration, plus a basin-of-attraction lab.

The hot grid kernel lives in :mod:`._fastscan`, a single source that is
compiled to a C extension when possible and interpreted as plain Python
otherwise; ``COMPILED`` reports which one is active.
"""

from ._fastscan import IS_COMPILED as COMPILED
from .basin import (BasinReport, GridSpec, Table1Record, basin_scan,
                    correct_zero_of, direction_field, table1)
from .certificate import (CertificateCheckReport, SwitchCertificate,
                          build_certificate, estimate_kappa, estimate_omega_hat,
                          radii, verdict, verify_certificate_sampled)
from .driver import (MODES, OUTCOMES, ResumeState, SolveTrace, SolverConfig,
                     resume_policy, solve)
from .errors import (DegenerateStep, DomainViolation, EstimateOverflowWarning,
                     GuardViolation, IoFailure, NewtonSwitchError,
                     NonFiniteValue, SingularSystem, StepCollapse, UsageError)
from .imaging import PALETTE, BasinImage, image_from_report, write_csv_stats, write_ppm
from .kernel import Correction, Counters, SimplifiedRunResult, correction, simplified_iterate
from .linalg import LinearSolveHandle, enorm, factorize, finite_difference_jacobian
from .problems import (DomainBox, MatrixPolicy, Problem, get_problem,
                       scalar_problem)
from .stepcontrol import StepControllerConfig, StepDecision, propose_step

__version__ = "0.1.0"

__all__ = [
    "COMPILED", "MODES", "OUTCOMES", "PALETTE", "__version__",
    "BasinImage", "BasinReport", "CertificateCheckReport", "Correction",
    "Counters", "DegenerateStep", "DomainBox", "DomainViolation",
    "EstimateOverflowWarning", "GridSpec", "GuardViolation", "IoFailure",
    "LinearSolveHandle", "MatrixPolicy", "NewtonSwitchError", "NonFiniteValue",
    "Problem", "ResumeState", "SimplifiedRunResult", "SingularSystem",
    "SolveTrace", "SolverConfig", "StepCollapse", "StepControllerConfig",
    "StepDecision", "SwitchCertificate", "Table1Record", "UsageError",
    "basin_scan", "build_certificate", "correct_zero_of", "correction",
    "direction_field", "enorm", "estimate_kappa", "estimate_omega_hat",
    "factorize", "finite_difference_jacobian", "get_problem",
    "image_from_report", "propose_step", "radii", "resume_policy",
    "scalar_problem", "simplified_iterate", "solve", "table1", "verdict",
    "verify_certificate_sampled", "write_csv_stats", "write_ppm",
]
