"""Proof-log replay: re-run the recorded query and compare event streams.

A log replays cleanly when re-running its header parameters (with the
recorded guard-table dependencies pre-seeded) reproduces every event line
and the final verdict byte for byte.  Runs whose stochastic stage was cut
off by the wall-clock limit may legitimately fail to replay; use
sample-limit exits for archival logs.
"""

from __future__ import annotations

from .config import PropagationConfig, SearchConfig
from .propagation import GTable
from .prooflog import parse_text
from .search import verify_g


def _config_from_header(cfg: dict) -> SearchConfig:
    def _opt(key, conv):
        v = cfg.get(key, "-")
        return None if v == "-" else conv(v)

    return SearchConfig(
        strategy=cfg.get("strategy", "auto"),
        propagation=PropagationConfig(
            sample_limit=int(cfg.get("sample_limit", 200)),
            time_limit=_opt("time_limit", float),
            rng_seed=int(cfg.get("seed", 0)),
            enable_after_branch_depth=int(
                cfg.get("enable_after_branch_depth", 4))),
        node_budget=_opt("node_budget", int),
        parallel=1)


def replay_proof(path: str) -> tuple[bool, str]:
    """Re-execute the log at `path`; (ok, one-line summary)."""
    with open(path) as fh:
        parsed = parse_text(fh.read())
    config = _config_from_header(parsed["config"])
    gtable = GTable()
    for n, k, g in parsed["gdeps"]:
        if g is not None:
            gtable.set(n, k, g)
    outcome, log = verify_g(parsed["n"], parsed["k"], parsed["t"],
                            mode=parsed["mode"], config=config,
                            gtable=gtable, strong=parsed["strong"])
    fresh = log.event_lines()
    if outcome.verdict != parsed["verdict"]:
        return False, (f"verdict mismatch: log says {parsed['verdict']}, "
                       f"replay got {outcome.verdict}")
    if fresh != parsed["events"]:
        for i, (a, b) in enumerate(zip(parsed["events"], fresh)):
            if a != b:
                return False, f"event {i} diverged: {a!r} vs {b!r}"
        return False, (f"event count mismatch: {len(parsed['events'])} logged, "
                       f"{len(fresh)} replayed")
    if outcome.nodes != parsed["nodes"]:
        return False, (f"node count mismatch: {parsed['nodes']} logged, "
                       f"{outcome.nodes} replayed")
    return True, (f"replay ok: {parsed['verdict']} with {outcome.nodes} nodes, "
                  f"{len(fresh)} events")
