"""Branch-and-cut search for vectors with fewer than t nonnegative k-sums.

Each node carries chosen branch sets B+ / B- plus the full tri-partition
state (which also remembers every propagation-forced negative along the
path, so the node's LP sees all known constraints).  Node processing:

  1. prune when the positive closure already has >= t sets;
  2. propagate (mode-selected engine); conflicts prune;
  3. solve the exact LP; infeasible prunes, an optimal vector with fewer
     than t nonnegative k-sums is a witness;
  4. otherwise branch on an undecided set maximizing min(L*, R*), the
     negative child first.

The traversal is an explicit stack (depth-first, identical visit order to
the recursive formulation), which is what makes budget exhaustion
checkpointable: the remaining frontier serializes as branch-set ranks.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from ._rng import Stream, node_seed
from .config import SearchConfig
from .family import UNDECIDED, ConflictError, FamilyState, ShiftContext
from .kset import KSet
from .lp import count_nonneg_ksums, lp_format
from .propagation import (
    GTable,
    LpSession,
    _log_lp,
    propagate_negative,
    propagate_positive,
    stochastic_propagation,
)
from .prooflog import ProofLog

HOLDS = "HOLDS"
WITNESS = "WITNESS"
INDETERMINATE = "INDETERMINATE"


@dataclass
class Witness:
    x: tuple[Fraction, ...]
    s: int

    def verify(self, k: int, t: int) -> None:
        if any(a < b for a, b in zip(self.x, self.x[1:])):
            raise AssertionError("witness not nonincreasing")
        if sum(self.x) < 0:
            raise AssertionError("witness total sum negative")
        if count_nonneg_ksums(self.x, k) != self.s:
            raise AssertionError("witness count mismatch")
        if self.s >= t:
            raise AssertionError("witness does not beat the target")


@dataclass
class SearchNode:
    bplus: list[KSet]
    bminus: list[KSet]
    state: FamilyState
    path: str = ""

    @property
    def depth(self) -> int:
        return len(self.path)


@dataclass
class SearchOutcome:
    verdict: str
    witness: Optional[Witness] = None
    nodes: int = 0
    wall_time: float = 0.0
    frontier: list = field(default_factory=list)  # open nodes on INDETERMINATE


def select_branch_set(state: FamilyState) -> int:
    """Undecided rank maximizing min(L*, R*); lowest colex rank on ties."""
    if state.lstar is None or state.rstar is None:
        raise ValueError("restricted-count caches required before branching")
    lstar, rstar, label = state.lstar, state.rstar, state.label
    best_rank, best_score = -1, -1
    for r in range(state.ctx.total):
        if label[r] != UNDECIDED:
            continue
        score = min(lstar[r], rstar[r])
        if score > best_score:
            best_rank, best_score = r, score
    if best_rank < 0:
        raise ValueError("no undecided set to branch on")
    return best_rank


class Search:
    """One verification run: does every vector have at least t nonnegative
    k-sums under the branch constraints?"""

    def __init__(self, n: int, k: int, t: int, config: SearchConfig,
                 gtable: GTable, log: Optional[ProofLog] = None):
        self.n, self.k, self.t = n, k, t
        self.config = config
        self.gtable = gtable
        self.log = log
        self.ctx = ShiftContext(n, k)
        self.nodes = 0
        self._dumped = 0

    # -- state (re)construction ----------------------------------------

    def root_node(self, bplus: list[KSet], bminus: list[KSet]) -> SearchNode:
        return self.rebuild_node(bplus, bminus, "")

    def rebuild_node(self, bplus: list[KSet], bminus: list[KSet],
                     path: str) -> SearchNode:
        """Build a node state from its branch generators alone.

        Ancestor propagation is not replayed here; the guards only get
        stronger down a branch, so the node's own sweep re-derives every
        inherited deduction before anything depends on it.
        """
        state = FamilyState(self.ctx)
        for s in bplus:
            state.mark_positive(s)
        for s in bminus:
            state.mark_negative(s)
        return SearchNode(list(bplus), list(bminus), state, path)

    # -- main loop --------------------------------------------------------

    def run(self, stack: list[SearchNode]) -> SearchOutcome:
        start = time.monotonic()
        cfg = self.config
        witness = None
        while stack:
            if cfg.node_budget is not None and self.nodes >= cfg.node_budget:
                return self._indeterminate(stack, start)
            if (cfg.time_budget is not None
                    and time.monotonic() - start > cfg.time_budget):
                return self._indeterminate(stack, start)
            node = stack.pop()
            witness = self._process(node, stack)
            if witness is not None:
                break
        wall = time.monotonic() - start
        if witness is not None:
            witness.verify(self.k, self.t)
            return SearchOutcome(WITNESS, witness, self.nodes, wall)
        return SearchOutcome(HOLDS, None, self.nodes, wall)

    def _indeterminate(self, stack: list[SearchNode],
                       start: float) -> SearchOutcome:
        frontier = [(list(n.bplus), list(n.bminus), n.path) for n in stack]
        return SearchOutcome(INDETERMINATE, None, self.nodes,
                             time.monotonic() - start, frontier)

    def _process(self, node: SearchNode,
                 stack: list[SearchNode]) -> Optional[Witness]:
        self.nodes += 1
        log, t, state = self.log, self.t, node.state
        if log is not None:
            log.node_open(node.path, node.depth)
        if state.n_pos >= t:
            return self._close("PRUNE-COUNT")
        try:
            status, lpres = self._propagate(node)
        except ConflictError:
            return self._close("PRUNE-CONFLICT")
        if status in ("infeasible", "threshold"):
            return self._close(f"PRUNE-{status.upper()}")
        if state.n_pos >= t:
            return self._close("PRUNE-COUNT")
        if self.config.dump_lp_dir:
            self._dump_lp(state)
        x = lpres.x
        s_count = count_nonneg_ksums(x, self.k)
        if s_count < t:
            if log is not None:
                log.witness(s_count, x)
                log.node_close("WITNESS")
            return Witness(x, s_count)
        if state.n_undecided == 0:
            raise RuntimeError(
                "complete partition with target met but no witness: "
                "state accounting is broken")
        if state.lstar is None:
            state.compute_lstar(self.config.strategy)
        if state.rstar is None:
            state.compute_rstar(self.config.strategy)
        branch_rank = select_branch_set(state)
        s = self.ctx.sets[branch_rank]
        if log is not None:
            log.branch(s, "NEG", node.path + "0")
            log.branch(s, "POS", node.path + "1")
            log.node_close("BRANCHED")
        neg_state = state.copy()
        neg_state.mark_negative(s)
        pos_state = state  # parent state not reused afterwards
        pos_state.apply_positive_incremental(s)
        stack.append(SearchNode(node.bplus + [s], node.bminus, pos_state,
                                node.path + "1"))
        stack.append(SearchNode(node.bplus, node.bminus + [s], neg_state,
                                node.path + "0"))
        return None

    def _close(self, outcome: str) -> None:
        if self.log is not None:
            self.log.node_close(outcome)
        return None

    def _propagate(self, node: SearchNode):
        """Mode dispatch; returns (status, base LP result or None)."""
        cfg, state, t = self.config, node.state, self.t
        if cfg.mode == "positive":
            return propagate_positive(state, t, self.gtable, cfg, self.log)
        if (cfg.mode == "stochastic"
                and node.depth >= cfg.propagation.enable_after_branch_depth):
            rng = Stream(node_seed(cfg.seed, node.path))
            status, lpres = stochastic_propagation(state, t, self.gtable,
                                                   cfg, self.log, rng)
            if status == "exhausted":
                return ("open", lpres)
            return (status, lpres)
        propagate_negative(state, t, self.gtable, cfg.strategy, self.log, 1)
        session = LpSession(state, cfg.verify_certs)
        _log_lp(self.log, session.result)
        if not session.feasible:
            return ("infeasible", session.result)
        return ("open", session.result)

    def _dump_lp(self, state: FamilyState) -> None:
        import os

        from .lp import build_lp

        os.makedirs(self.config.dump_lp_dir, exist_ok=True)
        path = os.path.join(self.config.dump_lp_dir,
                            f"node{self._dumped:06d}.lp")
        inst = build_lp(self.n, self.k, state.aplus, state.aminus)
        with open(path, "w") as fh:
            fh.write(lp_format(inst))
        self._dumped += 1


def strong_negative_seed(n: int, k: int) -> KSet:
    """The sharp example's negative witness set {1, n-k+2, ..., n}."""
    return (1,) + tuple(range(n - k + 2, n + 1))


def verify_g(n: int, k: int, t: int, mode: str = "negative",
             config: Optional[SearchConfig] = None,
             gtable: Optional[GTable] = None, strong: bool = False,
             log: Optional[ProofLog] = None,
             frontier: Optional[list] = None) -> tuple[SearchOutcome, ProofLog]:
    """Does every admissible vector have at least t nonnegative k-sums?

    HOLDS means yes (g(n,k) >= t, or the strong variant when strong=True);
    WITNESS carries a verified vector with fewer.  A frontier from a
    checkpoint resumes an interrupted run.
    """
    if config is None:
        config = SearchConfig()
    if config.mode != mode:
        from dataclasses import replace

        config = replace(config, mode=mode)
    if gtable is None:
        gtable = GTable()
    if log is None:
        log = ProofLog({"n": n, "k": k, "t": t, "mode": mode,
                        "strong": strong, "config": config.header_fields()})
    if t <= 0:
        log.result(HOLDS, 0, 0.0)
        return SearchOutcome(HOLDS, None, 0, 0.0), log
    search = Search(n, k, t, config, gtable, log)
    if frontier is not None:
        stack = [search.rebuild_node(bp, bm, path) for bp, bm, path in frontier]
    else:
        seeds_minus = [strong_negative_seed(n, k)] if strong else []
        stack = [search.root_node([], seeds_minus)]
    if config.parallel > 1:
        from .parallel import run_parallel

        outcome = run_parallel(search, stack)
    else:
        outcome = search.run(stack)
    log.result(outcome.verdict, outcome.nodes, outcome.wall_time)
    return outcome, log
