"""Run configuration shared by propagation, search, and the CLI."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, asdict
from typing import Optional


@dataclass
class PropagationConfig:
    """Knobs for the randomized propagation loop.

    sample_limit: consecutive failed probes before giving up;
    time_limit: wall-clock budget in seconds per call (None = unlimited;
    note a binding time limit is the one nondeterministic exit);
    rng_seed: stream seed;
    enable_after_branch_depth: randomized probing stays off until this many
    branch sets have been chosen.
    """

    sample_limit: int = 200
    time_limit: Optional[float] = 60.0
    rng_seed: int = 0
    enable_after_branch_depth: int = 4

    def __post_init__(self):
        if self.sample_limit < 1:
            raise ValueError("sample_limit must be >= 1")


@dataclass
class SearchConfig:
    mode: str = "negative"  # negative | positive | stochastic
    strategy: str = "auto"  # restricted-count strategy: auto | bfs | incexc
    propagation: PropagationConfig = field(default_factory=PropagationConfig)
    node_budget: Optional[int] = None
    time_budget: Optional[float] = None
    parallel: int = 1
    verify_certs: bool = True
    dump_lp_dir: Optional[str] = None

    def __post_init__(self):
        if self.mode not in ("negative", "positive", "stochastic"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.parallel < 1:
            raise ValueError("parallel must be >= 1")

    @property
    def seed(self) -> int:
        return self.propagation.rng_seed

    def digest(self) -> str:
        payload = repr(sorted(asdict(self).items()))
        return hashlib.sha256(payload.encode()).hexdigest()[:12]

    def header_fields(self) -> dict:
        p = self.propagation
        return {
            "seed": p.rng_seed,
            "strategy": self.strategy,
            "sample_limit": p.sample_limit,
            "time_limit": p.time_limit,
            "enable_after_branch_depth": p.enable_after_branch_depth,
            "node_budget": self.node_budget,
            "parallel": self.parallel,
        }
