"""Top-level computations: g(n,k) tables, f(k), the strong variant, the
two-value scans and the conjectured threshold index N_k.

Values are established by target descent: start from the best candidate
count (the two-value scan minimum), verify; a returned witness lowers the
target to its exact count and the verification repeats.  The descent
terminates because targets are strictly decreasing nonnegative integers,
and it ends with a HOLDS at a count that some concrete vector attains.

Divisible cases k | n can take the cited divisibility shortcut
(g = C(n-1, k-1)) instead of searching; it is on by default only for the
f(k) scan, and dependency autofill, where the published tables leave those
cells blank.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import comb, gcd, lcm
from typing import Optional

from .config import SearchConfig
from .kset import KSet, colex_rank, colex_unrank
from .lp import count_nonneg_ksums
from .propagation import BARANYAI, COMPUTED, GTable
from .prooflog import ProofLog
from .search import HOLDS, INDETERMINATE, WITNESS, SearchOutcome, verify_g
from .search import strong_negative_seed

CHECKPOINT_VERSION = 1


@dataclass
class RunResult:
    kind: str  # g | gs | f | verify | scan | nk
    n: Optional[int]
    k: int
    t: Optional[int]
    verdict: str
    value: Optional[int] = None
    ghat: Optional[int] = None
    example: Optional[str] = None
    witness: Optional[list[str]] = None
    nodes: int = 0
    wall_time: float = 0.0
    seed: int = 0
    log_path: Optional[str] = None
    checkpoint_path: Optional[str] = None
    extra: dict = field(default_factory=dict)

    def to_jsonable(self) -> dict:
        out = {
            "schema": "mmsverify-result-1",
            "kind": self.kind, "n": self.n, "k": self.k, "t": self.t,
            "verdict": self.verdict, "value": self.value, "ghat": self.ghat,
            "example": self.example, "witness": self.witness,
            "nodes": self.nodes, "wall_time": self.wall_time,
            "seed": self.seed, "log_path": self.log_path,
            "checkpoint_path": self.checkpoint_path,
        }
        out.update(self.extra)
        return out


# -- two-value vectors -------------------------------------------------

def two_value_vector(a: int, b: int) -> tuple[int, ...]:
    """b leading coordinates equal to a, then a trailing ones equal to -b."""
    if a < 1 or b < 1:
        raise ValueError("parts must be positive")
    return (a,) * b + (-b,) * a


def two_value_s(a: int, b: int, k: int) -> int:
    """Nonnegative k-sum count of the two-value vector, in closed form:
    choosing j large coordinates is nonnegative iff j*a >= (k-j)*b."""
    n = a + b
    if n < k:
        raise ValueError("need a + b >= k")
    total = 0
    for j in range(max(0, k - a), min(k, b) + 1):
        if j * a >= (k - j) * b:
            total += comb(b, j) * comb(a, k - j)
    return total


def scan_two_value(n: int, k: int, require_strong: bool = False
                   ) -> tuple[int, tuple[int, int]]:
    """Minimum two-value count over all splits a + b = n (smallest a wins
    ties).  With require_strong, only vectors whose sharp-example k-set
    {1, n-k+2..n} sums negative are admitted."""
    if n <= k:
        raise ValueError("need n > k")
    seed = strong_negative_seed(n, k)
    best: Optional[tuple[int, tuple[int, int]]] = None
    for a in range(1, n):
        b = n - a
        if require_strong:
            vec = two_value_vector(a, b)
            if sum(vec[e - 1] for e in seed) >= 0:
                continue
        s = two_value_s(a, b, k)
        if best is None or s < best[0]:
            best = (s, (a, b))
    if best is None:
        raise RuntimeError("no admissible two-value vector")
    return best


def compute_Nk(k: int) -> int:
    """Smallest x with C(x-3, k) >= C(x-1, k-1), by upward scan."""
    if k < 2:
        raise ValueError("k must be >= 2")
    x = k
    while comb(x - 3, k) < comb(x - 1, k - 1):
        x += 1
    return x


# -- witness normalization and the power-notation descriptor -------------

def normalize_vector(x) -> tuple[int, ...]:
    """Scale a rational vector to the smallest integer form."""
    fracs = [v if isinstance(v, Fraction) else Fraction(v) for v in x]
    mult = lcm(*(f.denominator for f in fracs))
    ints = [int(f * mult) for f in fracs]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    if g > 1:
        ints = [v // g for v in ints]
    return tuple(ints)


def descriptor(x) -> str:
    """Run-length power notation, e.g. '3^7 (-7)^3' or '35^1 3^10 (-16)^5'."""
    ints = normalize_vector(x)
    parts = []
    i = 0
    while i < len(ints):
        j = i
        while j < len(ints) and ints[j] == ints[i]:
            j += 1
        val = ints[i]
        base = str(val) if val >= 0 else f"({val})"
        parts.append(f"{base}^{j - i}")
        i = j
    return " ".join(parts)


# -- gtable dependency chains --------------------------------------------

def ensure_guard_chain(n: int, k: int, gtable: GTable,
                       config: SearchConfig) -> None:
    """Fill the g-values the smallest-element guard needs below n.

    The chain is n-k-1, n-2(k+1), ... computed in increasing order so each
    member's own guard dependency is already present.  Divisible members
    use the divisibility shortcut.
    """
    chain = []
    m = n - k - 1
    while m >= k:
        chain.append(m)
        m -= k + 1
    for m in reversed(chain):
        if gtable.get(m, k) is not None:
            continue
        if m % k == 0:
            gtable.set(m, k, comb(m - 1, k - 1), BARANYAI)
        else:
            result = compute_g(m, k, gtable, _quiet_config(config))
            if result.verdict == INDETERMINATE:
                raise RuntimeError(
                    f"dependency g({m},{k}) indeterminate under budget")


def _quiet_config(config: SearchConfig) -> SearchConfig:
    # dependency fills always use the deterministic engine
    return replace(config, mode="negative", parallel=1, dump_lp_dir=None)


# -- target descent -----------------------------------------------------

def _descend(kind: str, n: int, k: int, t0: int, best_vec: tuple[int, ...],
             config: SearchConfig, gtable: GTable, strong: bool,
             log_path: Optional[str], checkpoint_path: Optional[str]
             ) -> RunResult:
    """Verify at decreasing targets until HOLDS; witnesses retarget."""
    t = t0
    best = best_vec
    nodes = 0
    wall = 0.0
    final_log: Optional[ProofLog] = None
    while True:
        outcome, log = verify_g(n, k, t, mode=config.mode, config=config,
                                gtable=gtable, strong=strong)
        nodes += outcome.nodes
        wall += outcome.wall_time
        if outcome.verdict == INDETERMINATE:
            cp = None
            if checkpoint_path:
                cp = write_checkpoint(checkpoint_path, kind, n, k, t, config,
                                      strong, outcome.frontier, gtable, best)
            return RunResult(kind, n, k, t, INDETERMINATE, nodes=nodes,
                             wall_time=wall, seed=config.seed,
                             checkpoint_path=cp)
        if outcome.verdict == HOLDS:
            final_log = log
            break
        w = outcome.witness
        best = normalize_vector(w.x)
        t = w.s
        if t <= 0:
            final_log = log
            break
    value = t
    if log_path and final_log is not None:
        write_log(log_path, final_log)
    check = count_nonneg_ksums(best, k)
    if check != value:
        raise AssertionError(
            f"achieving vector recount {check} != established value {value}")
    gh = comb(n - 1, k - 1) - value if not strong else None
    if gh is not None and gh < 0:
        raise AssertionError("deficiency negative: value above the sharp bound")
    return RunResult(kind, n, k, value, HOLDS, value=value, ghat=gh,
                     example=descriptor(best), nodes=nodes, wall_time=wall,
                     seed=config.seed, log_path=log_path)


def compute_g(n: int, k: int, gtable: Optional[GTable] = None,
              config: Optional[SearchConfig] = None, *,
              baranyai: bool = False, log_path: Optional[str] = None,
              checkpoint_path: Optional[str] = None) -> RunResult:
    """Exact minimum number of nonnegative k-sums over nonnegative-sum
    n-vectors, with the deficiency against C(n-1, k-1)."""
    if k < 1 or n < k:
        raise ValueError("need n >= k >= 1")
    gtable = gtable if gtable is not None else GTable()
    config = config or SearchConfig()
    if baranyai and n % k == 0:
        value = comb(n - 1, k - 1)
        if gtable.get(n, k) is None:
            gtable.set(n, k, value, BARANYAI)
        return RunResult("g", n, k, value, HOLDS, value=value, ghat=0,
                         example=None, seed=config.seed,
                         extra={"provenance": BARANYAI})
    if n == k:
        # the single k-sum is the whole nonnegative total
        if gtable.get(n, k) is None:
            gtable.set(n, k, 1, COMPUTED)
        return RunResult("g", n, k, 1, HOLDS, value=1,
                         ghat=comb(n - 1, k - 1) - 1,
                         example=descriptor(two_value_vector(1, n - 1)),
                         seed=config.seed)
    ensure_guard_chain(n, k, gtable, config)
    t0, (a, b) = scan_two_value(n, k)
    result = _descend("g", n, k, t0, two_value_vector(a, b), config, gtable,
                      False, log_path, checkpoint_path)
    if result.verdict == HOLDS and gtable.get(n, k) is None:
        gtable.set(n, k, result.value, COMPUTED)
    return result


def compute_g_strong(n: int, k: int, gtable: Optional[GTable] = None,
                     config: Optional[SearchConfig] = None, *,
                     log_path: Optional[str] = None,
                     checkpoint_path: Optional[str] = None) -> RunResult:
    """Minimum count over vectors whose k-set {1, n-k+2..n} sums negative."""
    if n <= k:
        raise ValueError("need n > k")
    gtable = gtable if gtable is not None else GTable()
    config = config or SearchConfig()
    ensure_guard_chain(n, k, gtable, config)
    t0, (a, b) = scan_two_value(n, k, require_strong=True)
    return _descend("gs", n, k, t0, two_value_vector(a, b), config, gtable,
                    True, log_path, checkpoint_path)


def verify_run(n: int, k: int, t: int, gtable: Optional[GTable] = None,
               config: Optional[SearchConfig] = None, *, strong: bool = False,
               log_path: Optional[str] = None,
               checkpoint_path: Optional[str] = None,
               frontier: Optional[list] = None,
               fill_chain: bool = True) -> RunResult:
    """Single verification at an explicit target (the --t path)."""
    gtable = gtable if gtable is not None else GTable()
    config = config or SearchConfig()
    if fill_chain:
        ensure_guard_chain(n, k, gtable, config)
    outcome, log = verify_g(n, k, t, mode=config.mode, config=config,
                            gtable=gtable, strong=strong, frontier=frontier)
    if log_path:
        write_log(log_path, log)
    cp = None
    if outcome.verdict == INDETERMINATE and checkpoint_path:
        cp = write_checkpoint(checkpoint_path, "verify", n, k, t, config,
                              strong, outcome.frontier, gtable, None)
    witness = None
    example = None
    if outcome.witness is not None:
        witness = [str(v) for v in outcome.witness.x]
        example = descriptor(outcome.witness.x)
    return RunResult("verify", n, k, t, outcome.verdict,
                     value=outcome.witness.s if outcome.witness else None,
                     example=example, witness=witness, nodes=outcome.nodes,
                     wall_time=outcome.wall_time, seed=config.seed,
                     log_path=log_path, checkpoint_path=cp)


def compute_f(k: int, gtable: Optional[GTable] = None,
              config: Optional[SearchConfig] = None, *,
              baranyai: bool = True, log_path: Optional[str] = None,
              checkpoint_path: Optional[str] = None) -> RunResult:
    """Least n0 with zero deficiency from n0 on; k consecutive zeros close
    the scan since zero deficiency propagates upward in steps of k."""
    if k < 2:
        raise ValueError("k must be >= 2")
    gtable = gtable if gtable is not None else GTable()
    config = config or SearchConfig()
    nodes = 0
    wall = 0.0
    rows = []
    streak = 0
    last_nonzero = k
    n = k + 1
    while streak < k:
        if baranyai and n % k == 0:
            value, ghat, prov = comb(n - 1, k - 1), 0, BARANYAI
            if gtable.get(n, k) is None:
                gtable.set(n, k, value, BARANYAI)
        else:
            rr = compute_g(n, k, gtable, config,
                           checkpoint_path=checkpoint_path)
            nodes += rr.nodes
            wall += rr.wall_time
            if rr.verdict == INDETERMINATE:
                return RunResult("f", n, k, rr.t, INDETERMINATE, nodes=nodes,
                                 wall_time=wall, seed=config.seed,
                                 checkpoint_path=rr.checkpoint_path)
            value, ghat, prov = rr.value, rr.ghat, COMPUTED
        rows.append({"n": n, "g": value, "ghat": ghat, "provenance": prov})
        if ghat == 0:
            streak += 1
        else:
            streak = 0
            last_nonzero = n
        n += 1
    f_value = last_nonzero + 1
    return RunResult("f", None, k, None, HOLDS, value=f_value, nodes=nodes,
                     wall_time=wall, seed=config.seed, log_path=log_path,
                     extra={"table": rows})


# -- persistence ----------------------------------------------------------

def write_log(path: str, log: ProofLog) -> None:
    with open(path, "w") as fh:
        fh.write(log.to_text())
    with open(path + ".json", "w") as fh:
        fh.write(log.to_json())


def write_json(path: str, result: RunResult) -> None:
    with open(path, "w") as fh:
        json.dump(result.to_jsonable(), fh, indent=1, sort_keys=True)
        fh.write("\n")


CSV_COLUMNS = ["k", "n", "g", "ghat", "nodes", "time", "example"]


def append_csv(path: str, result: RunResult) -> None:
    rows = []
    if result.kind == "f" and "table" in result.extra:
        for row in result.extra["table"]:
            rows.append([result.k, row["n"], row["g"], row["ghat"], "", "",
                         ""])
    else:
        rows.append([result.k, result.n, result.value, result.ghat,
                     result.nodes, f"{result.wall_time:.3f}",
                     result.example or ""])
    try:
        new = not open(path).readline().startswith("k,")
    except FileNotFoundError:
        new = True
    with open(path, "a", newline="") as fh:
        writer = csv.writer(fh)
        if new:
            writer.writerow(CSV_COLUMNS)
        writer.writerows(rows)


def write_checkpoint(path: str, kind: str, n: int, k: int, t: int,
                     config: SearchConfig, strong: bool, frontier: list,
                     gtable: GTable, best_vec) -> str:
    payload = {
        "version": CHECKPOINT_VERSION,
        "kind": kind, "n": n, "k": k, "t": t, "strong": strong,
        "mode": config.mode, "strategy": config.strategy,
        "seed": config.seed,
        "sample_limit": config.propagation.sample_limit,
        "time_limit": config.propagation.time_limit,
        "enable_after_branch_depth":
            config.propagation.enable_after_branch_depth,
        "node_budget": config.node_budget,
        "frontier": [
            [[colex_rank(s) for s in bp], [colex_rank(s) for s in bm], path]
            for bp, bm, path in frontier
        ],
        "gtable": gtable.to_jsonable(),
        "best": list(best_vec) if best_vec is not None else None,
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")
    return path


def load_checkpoint(path: str) -> dict:
    with open(path) as fh:
        payload = json.load(fh)
    if payload.get("version") != CHECKPOINT_VERSION:
        raise ValueError("unsupported checkpoint version")
    return payload


def resume(path: str, config: Optional[SearchConfig] = None,
           log_path: Optional[str] = None,
           checkpoint_path: Optional[str] = None) -> RunResult:
    """Continue an interrupted run; completion gives the same verdict as an
    uninterrupted run would have."""
    from .config import PropagationConfig

    payload = load_checkpoint(path)
    n, k, t = payload["n"], payload["k"], payload["t"]
    strong = payload["strong"]
    if config is None:
        config = SearchConfig(
            mode=payload["mode"], strategy=payload["strategy"],
            propagation=PropagationConfig(
                sample_limit=payload["sample_limit"],
                time_limit=payload["time_limit"],
                rng_seed=payload["seed"],
                enable_after_branch_depth=
                    payload["enable_after_branch_depth"]),
            node_budget=payload["node_budget"])
    gtable = GTable.from_jsonable(payload["gtable"])
    frontier = [
        ([colex_unrank(r, n, k) for r in bp],
         [colex_unrank(r, n, k) for r in bm], pth)
        for bp, bm, pth in payload["frontier"]
    ]
    out = verify_run(n, k, t, gtable, config, strong=strong,
                     log_path=log_path, checkpoint_path=checkpoint_path,
                     frontier=frontier, fill_chain=False)
    kind = payload["kind"]
    if kind == "verify" or out.verdict == INDETERMINATE:
        return out
    if out.verdict == HOLDS:
        best = payload["best"]
        value = t
        gh = comb(n - 1, k - 1) - value if kind == "g" else None
        return RunResult(kind, n, k, value, HOLDS, value=value, ghat=gh,
                         example=descriptor(best) if best else None,
                         nodes=out.nodes, wall_time=out.wall_time,
                         seed=config.seed, log_path=log_path)
    # a witness restarts the descent below the checkpointed target
    w_ints = normalize_vector([Fraction(v) for v in out.witness])
    s_count = count_nonneg_ksums(w_ints, k)
    return _descend(kind, n, k, s_count, w_ints, config, gtable,
                    strong, log_path, checkpoint_path)
