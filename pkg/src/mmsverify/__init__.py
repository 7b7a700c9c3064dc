"""Exact verifier for minimum nonnegative k-sum counts.

Given n reals with nonnegative total, at least how many of the C(n, k)
k-element subsets must have nonnegative sum?  This package computes that
minimum g(n, k) exactly for fixed small k, the threshold f(k) past which
the sharp bound C(n-1, k-1) holds, and the strong variant g_s(n, k), by a
branch-and-cut search over the shift order of k-subsets with an exact
rational LP oracle.  Every run emits a replayable proof log.
"""

from .config import PropagationConfig, SearchConfig
from .driver import (
    RunResult,
    compute_f,
    compute_g,
    compute_g_strong,
    compute_Nk,
    descriptor,
    normalize_vector,
    resume,
    scan_two_value,
    two_value_s,
    two_value_vector,
    verify_run,
)
from .family import ConflictError, FamilyState, ShiftContext, left_count, right_count
from .lp import (
    LPInstance,
    LPResult,
    build_lp,
    count_nonneg_ksums,
    lp_format,
    solve,
    verify_certificate,
)
from .propagation import GTable, forced_negative
from .prooflog import ProofLog
from .replay import replay_proof
from .search import Witness, select_branch_set, verify_g

__version__ = "0.1.0"

__all__ = [
    "PropagationConfig", "SearchConfig", "RunResult", "compute_f",
    "compute_g", "compute_g_strong", "compute_Nk", "descriptor",
    "normalize_vector", "resume", "scan_two_value", "two_value_s",
    "two_value_vector", "verify_run", "ConflictError", "FamilyState",
    "ShiftContext", "left_count", "right_count", "LPInstance", "LPResult",
    "build_lp", "count_nonneg_ksums", "lp_format", "solve",
    "verify_certificate", "GTable", "forced_negative", "ProofLog",
    "replay_proof", "Witness", "select_branch_set", "verify_g",
]
