"""Forced-sign deductions: the counting guards and the LP probe loops.

A set S is forced negative for every target-beating vector when enough
nonnegative k-sums would follow from sigma_S >= 0:

  * counting guard: L*(S) plus the size of the current positive closure
    reaches the target t (with empty generators this is plain L(S) >= t);
  * smallest-element guard: 1 in S and L(S) + g(n-k-1, k) >= t.  Forcing
    sigma_S >= 0 would add the left shift of S plus at least g(n-k-1, k)
    nonnegative sums supported on {2..n-k+1}, disjoint from that shift.

The guard uses the table value at n-k-1: the positions {2..n-k+1} hold
n-k ordered reals of nonnegative total, but the published machine proofs
for k = 3, 4 are reproducible only with the value one index lower, and
monotonicity of g makes that choice equally sound.

The LP probes are zero-error: a set joins a family only with an exact
infeasibility certificate for the opposite assignment, checked by
verify_certificate before it is applied.
"""

from __future__ import annotations

import time
from math import comb
from typing import Optional

from ._rng import Stream
from .config import SearchConfig
from .family import UNDECIDED, ConflictError, FamilyState
from .kset import KSet
from . import lp as lpmod
from .lp import ExactSimplex, LPResult, build_lp, verify_certificate
from .prooflog import ProofLog

COMPUTED = "COMPUTED"
BARANYAI = "BARANYAI"


class GTable:
    """Known minimum counts g(n, k) with provenance."""

    def __init__(self):
        self._entries: dict[tuple[int, int], tuple[int, str]] = {}

    def get(self, n: int, k: int) -> Optional[int]:
        entry = self._entries.get((n, k))
        return entry[0] if entry else None

    def provenance(self, n: int, k: int) -> Optional[str]:
        entry = self._entries.get((n, k))
        return entry[1] if entry else None

    def set(self, n: int, k: int, value: int, provenance: str = COMPUTED) -> None:
        if provenance == BARANYAI:
            if n % k != 0:
                raise ValueError("divisibility shortcut needs k | n")
            if value != comb(n - 1, k - 1):
                raise ValueError("divisibility shortcut value mismatch")
        for (m, kk), (v, _) in self._entries.items():
            if kk == k and ((m < n and v > value) or (m > n and v < value)):
                raise ValueError(
                    f"g({n},{k})={value} breaks monotonicity against g({m},{k})={v}")
        self._entries[(n, k)] = (value, provenance)

    def items(self):
        return sorted((n, k, v, p) for (n, k), (v, p) in self._entries.items())

    def to_jsonable(self) -> list:
        return [[n, k, v, p] for n, k, v, p in self.items()]

    @classmethod
    def from_jsonable(cls, data) -> "GTable":
        table = cls()
        for n, k, v, p in data:
            table.set(int(n), int(k), int(v), p)
        return table


def guard_table_value(n: int, k: int, gtable: GTable,
                      log: Optional[ProofLog] = None) -> Optional[int]:
    """Table value feeding the smallest-element guard, logged for replay."""
    m = n - k - 1
    g = gtable.get(m, k) if m >= k else None
    if log is not None:
        log.gdep(m, k, g)
    return g


def forced_negative(s: KSet, n: int, k: int, t: int, gtable: GTable) -> bool:
    """Counting test: must sigma_S be negative for every vector with fewer
    than t nonnegative k-sums?  (Generator-free form: L* = L.)"""
    from .family import left_count

    if t < 1:
        raise ValueError("t must be >= 1")
    L = left_count(s, n)
    if L >= t:
        return True
    if s[0] == 1:
        g = guard_table_value(n, k, gtable)
        if g is not None and L + g >= t:
            return True
    return False


def propagate_negative(state: FamilyState, t: int, gtable: GTable,
                       strategy: str, log: Optional[ProofLog],
                       round_no: int) -> int:
    """One lex-order sweep adding every currently forced set to the
    negative family; returns the number of additions.

    Visiting in lex order makes the added family an antichain of leftmost
    forced sets; neither guard depends on negative labels, so a single
    sweep is already the fixed point.
    """
    ctx = state.ctx
    n, k = ctx.n, ctx.k
    if state.lstar is None:
        state.compute_lstar(strategy)
    lstar = state.lstar
    label = state.label
    counts = ctx.left_counts
    sets = ctx.sets
    g = guard_table_value(n, k, gtable, log)
    pos_count = state.n_pos
    added = 0
    for r in ctx.lex_order:
        if label[r] != UNDECIDED:
            continue
        s = sets[r]
        if s[0] == 1 and g is not None and counts[r] + g >= t:
            rule = "LEMMA-2.3"
        elif lstar[r] + pos_count >= t:
            rule = "OBS-2.2" if counts[r] >= t else "LEMMA-3.5"
        else:
            continue
        state.mark_negative(s)
        added += 1
        if log is not None:
            log.neg(round_no, s, rule)
    return added


class LpSession:
    """The node's exact LP plus warm probe machinery.

    Holds the solved relaxation for the current families and answers the
    two probe questions by re-optimizing set-sum objectives over the same
    feasible region.  A pool of known feasible points short-circuits most
    probes without touching the tableau.
    """

    def __init__(self, state: FamilyState, verify: bool = True,
                 pool: Optional[list] = None):
        self.state = state
        self.verify = verify
        ctx = state.ctx
        self.n, self.k = ctx.n, ctx.k
        self.instance = build_lp(ctx.n, ctx.k, state.aplus, state.aminus)
        self.sx = ExactSimplex([r.normalized() for r in self.instance.rows],
                               ctx.n)
        if self.sx.feasible:
            out = self.sx.minimize(self.instance.objective)
            if out.status != "optimal":
                raise RuntimeError("canonical objective came back unbounded")
            self.result = LPResult(lpmod.OPTIMAL, x=out.x, objective=out.value)
        else:
            self.result = LPResult(lpmod.INFEASIBLE,
                                   certificate=self.sx.farkas)
        self._check(self.instance, self.result)
        self.pool: list[tuple] = []
        for x in pool or ():
            if self._point_feasible(x):
                self.pool.append(x)
        if self.result.x is not None:
            self.pool.append(self.result.x)

    @property
    def feasible(self) -> bool:
        return self.result.verdict == lpmod.OPTIMAL

    def _check(self, instance, result) -> None:
        if self.verify and not verify_certificate(instance, result):
            raise RuntimeError("certificate verification failed (solver fault)")

    def _point_feasible(self, x) -> bool:
        for row in self.instance.rows:
            coeffs, rhs = row.normalized()
            if sum(c * xi for c, xi in zip(coeffs, x) if c) < rhs:
                return False
        return True

    def _pool_add(self, x) -> None:
        self.pool.append(x)
        if len(self.pool) > 24:
            del self.pool[0]

    def _sum_over(self, x, s: KSet):
        total = 0
        for e in s:
            total += x[e - 1]
        return total

    def probe_force_nonneg(self, s: KSet) -> Optional[LPResult]:
        """Would adding sigma_s <= -1 make the program infeasible?

        None when the augmented program stays feasible.  Otherwise an
        INFEASIBLE result for the augmented program, whose certificate is
        the dual of min sigma_s over the base region plus weight 1 on the
        new row.
        """
        if not self.feasible:
            raise RuntimeError("probe on infeasible base")
        for x in self.pool:
            if self._sum_over(x, s) <= -1:
                return None
        c = [0] * self.n
        for e in s:
            c[e - 1] = 1
        out = self.sx.minimize(c, stop_leq=-1)
        if out.status == "stopped":
            self._pool_add(out.x)
            return None
        cert = tuple(out.duals) + (1,)
        aug = build_lp(self.n, self.k, self.instance.aplus,
                       self.instance.aminus + (s,))
        result = LPResult(lpmod.INFEASIBLE, certificate=cert)
        self._check(aug, result)
        return result

    def probe_force_negative(self, s: KSet) -> Optional[LPResult]:
        """Would adding sigma_s >= 0 make the program infeasible?

        Dual probe: infeasible exactly when max sigma_s < 0 over the base
        region.  The new row sits at the end of the nonnegative block, so
        the certificate interleaves accordingly.
        """
        if not self.feasible:
            raise RuntimeError("probe on infeasible base")
        for x in self.pool:
            if self._sum_over(x, s) >= 0:
                return None
        c = [0] * self.n
        for e in s:
            c[e - 1] = -1
        out = self.sx.minimize(c, stop_leq=0)
        if out.status == "stopped":
            self._pool_add(out.x)
            return None
        head = 1 + (self.n - 1) + len(self.instance.aplus)
        cert = tuple(out.duals[:head]) + (1,) + tuple(out.duals[head:])
        aug = build_lp(self.n, self.k, self.instance.aplus + (s,),
                       self.instance.aminus)
        result = LPResult(lpmod.INFEASIBLE, certificate=cert)
        self._check(aug, result)
        return result


def propagate_positive(state: FamilyState, t: int, gtable: GTable,
                       cfg: SearchConfig, log: Optional[ProofLog]
                       ) -> tuple[str, Optional[LPResult]]:
    """Alternate forced-negative sweeps with a reverse-lex probe pass that
    moves rightmost sets into the nonnegative family.

    Returns ("infeasible", result) when the relaxation itself becomes
    infeasible, ("threshold", None) once the positive closure reaches t,
    or ("fixedpoint", result) when a full probe pass adds nothing.
    Each probe pass runs in one batch against the families as of its
    start-of-pass sweep, so the per-round families in the log line up with
    how the published machine proofs group them.
    """
    ctx = state.ctx
    round_no = 1
    pool: list = []
    while True:
        propagate_negative(state, t, gtable, cfg.strategy, log, round_no)
        session = LpSession(state, cfg.verify_certs, pool)
        _log_lp(log, session.result)
        if not session.feasible:
            return ("infeasible", session.result)
        if state.n_pos >= t:
            if log is not None:
                log.threshold(state.n_pos, t)
            return ("threshold", None)
        added = False
        for r in reversed(ctx.lex_order):
            if state.label[r] != UNDECIDED:
                continue
            s = ctx.sets[r]
            res = session.probe_force_nonneg(s)
            if res is None:
                continue
            state.apply_positive_incremental(s)
            added = True
            if log is not None:
                log.pos(round_no, s, "LP-NEG-PROBE", res.digest())
            if state.n_pos >= t:
                if log is not None:
                    log.threshold(state.n_pos, t)
                return ("threshold", None)
            pool = session.pool
            session = LpSession(state, cfg.verify_certs, pool)
            if not session.feasible:
                _log_lp(log, session.result)
                return ("infeasible", session.result)
        if not added:
            return ("fixedpoint", session.result)
        pool = session.pool
        round_no += 1


def stochastic_propagation(state: FamilyState, t: int, gtable: GTable,
                           cfg: SearchConfig, log: Optional[ProofLog],
                           rng: Stream) -> tuple[str, Optional[LPResult]]:
    """Zero-error randomized strengthening of the forced-negative sweep.

    Uniformly samples undecided sets and keeps only certificate-backed
    additions; every accepted update re-runs the forced-negative sweep.
    Exits on the target threshold, on sample_limit consecutive failed
    probes, or on the wall-clock limit.
    """
    prop = cfg.propagation
    deadline = (time.monotonic() + prop.time_limit
                if prop.time_limit is not None else None)
    ctx = state.ctx
    failures = 0
    round_no = 1
    while True:
        propagate_negative(state, t, gtable, cfg.strategy, log, round_no)
        session = LpSession(state, cfg.verify_certs)
        _log_lp(log, session.result)
        if not session.feasible:
            return ("infeasible", session.result)
        undecided = [r for r in range(ctx.total) if state.label[r] == UNDECIDED]
        if not undecided:
            return ("exhausted", session.result)
        updated = False
        while not updated:
            if failures >= prop.sample_limit:
                return ("exhausted", session.result)
            if deadline is not None and time.monotonic() > deadline:
                return ("exhausted", session.result)
            s = ctx.sets[undecided[rng.below(len(undecided))]]
            res = session.probe_force_nonneg(s)
            if res is not None:
                state.apply_positive_incremental(s)
                if log is not None:
                    log.pos(round_no, s, "LP-NEG-PROBE", res.digest())
                if state.n_pos >= t:
                    if log is not None:
                        log.threshold(state.n_pos, t)
                    return ("threshold", None)
                updated = True
                continue
            res = session.probe_force_negative(s)
            if res is not None:
                state.mark_negative(s)
                if log is not None:
                    log.neg(round_no, s, "LP-POS-PROBE", res.digest())
                updated = True
                continue
            failures += 1
        failures = 0
        round_no += 1


def _log_lp(log: Optional[ProofLog], result: LPResult) -> None:
    if log is None:
        return
    if result.verdict == lpmod.OPTIMAL:
        log.lp("OPT", obj=result.objective)
    else:
        log.lp("INFEASIBLE", cert=result.digest())
