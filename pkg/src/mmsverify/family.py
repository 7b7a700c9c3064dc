"""Shift-closure counting against a fixed (n, k) ground set.

ShiftContext precomputes, per (n, k): the colex-indexed list of all k-sets,
lex scan order, Hasse cover neighbors, and the full left/right shift sizes
L_k and R_k.  L_k comes from the recursion

    L_k(S) = C(i_k, k) - C(i_k - i_1, k)
             - sum_{l=1}^{k-2} L_l(S_l) * C(i_k - i_{l+1}, k - l)

over prefixes S_l, with R_k obtained by reflection.

FamilyState is the live tri-partition of the ground set into POS (left
closure of the nonnegative generators), NEG (right closure of the negative
generators) and UNDECIDED.  It also caches the restricted counts

    L*(S) = |{T left of S} \\ POS|,   R*(S) = |{T right of S} \\ NEG|

for undecided S.  Three interchangeable strategies compute them:

  * "bfs"     -- walk the Hasse digraph above (below) each undecided set;
  * "incexc"  -- lattice inclusion-exclusion over cover joins (meets),
                 evaluated in colex order so dependencies are ready;
  * incremental -- after one set joins the positive generators,
                 L*(T) -= L*(T v S) updates every undecided T in one pass.

All three agree pointwise; the test suite cross-checks them.
"""

from __future__ import annotations

from functools import cached_property
from math import comb

from .kset import (
    KSet,
    colex_iter,
    cover_neighbors,
    format_kset,
    reflect,
    validate_kset,
)

UNDECIDED, POS, NEG = 0, 1, 2

# Strategy names; "auto" resolves per ground-set size, mirroring what is
# fastest in practice: digraph walks up to k = 4, inclusion-exclusion from
# k = 5 up (at k = 5 the two are comparable; inclusion-exclusion is the
# cheaper one here).
STRATEGIES = ("auto", "bfs", "incexc")

# Above this many Hasse edges the digraph is not materialized and "bfs"
# falls back to inclusion-exclusion.
HASSE_EDGE_BUDGET = 1 << 24


class ConflictError(Exception):
    """A forced label collided with the opposite closure."""


def left_count(s: KSet, n: int, memo: dict | None = None) -> int:
    """Number of k-sets left of s (including s), via the prefix recursion."""
    validate_kset(s, n)
    if memo is None:
        memo = {}
    return _left_count_rec(s, memo)


def _left_count_rec(s: KSet, memo: dict) -> int:
    val = memo.get(s)
    if val is not None:
        return val
    j = len(s)
    if j == 1:
        val = s[0]
    else:
        ik, i1 = s[-1], s[0]
        val = comb(ik, j) - comb(ik - i1, j)
        for l in range(1, j - 1):
            val -= _left_count_rec(s[:l], memo) * comb(ik - s[l], j - l)
    memo[s] = val
    return val


def right_count(s: KSet, n: int, memo: dict | None = None) -> int:
    """Number of k-sets right of s (including s); reflection of left_count."""
    return left_count(reflect(s, n), n, memo)


class ShiftContext:
    """Immutable per-(n, k) tables shared by every state of one run."""

    def __init__(self, n: int, k: int):
        if k < 1:
            raise ValueError("k must be >= 1")
        if n < k:
            raise ValueError(f"need n >= k, got n={n} k={k}")
        self.n = n
        self.k = k
        self.total = comb(n, k)
        self.sets: list[KSet] = list(colex_iter(n, k))
        self.rank: dict[KSet, int] = {s: r for r, s in enumerate(self.sets)}
        self._prefix_memo: dict = {}

    def __repr__(self) -> str:
        return f"ShiftContext(n={self.n}, k={self.k}, total={self.total})"

    @cached_property
    def lex_order(self) -> list[int]:
        """Colex ranks sorted into lex scan order."""
        return sorted(range(self.total), key=lambda r: self.sets[r])

    @cached_property
    def left_covers(self) -> list[list[int]]:
        """left_covers[r] = ranks of the sets covering sets[r]."""
        rank = self.rank
        return [
            [rank[t] for t in cover_neighbors(s, self.n, "left")]
            for s in self.sets
        ]

    @cached_property
    def right_covers(self) -> list[list[int]]:
        """right_covers[r] = ranks of the sets that sets[r] covers."""
        rank = self.rank
        return [
            [rank[t] for t in cover_neighbors(s, self.n, "right")]
            for s in self.sets
        ]

    @cached_property
    def left_counts(self) -> list[int]:
        return [left_count(s, self.n, self._prefix_memo) for s in self.sets]

    @cached_property
    def right_counts(self) -> list[int]:
        rank = self.rank
        lc = self.left_counts
        return [lc[rank[reflect(s, self.n)]] for s in self.sets]

    @property
    def hasse_within_budget(self) -> bool:
        return self.total * self.k <= HASSE_EDGE_BUDGET

    def resolve_strategy(self, strategy: str) -> str:
        if strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {strategy!r}")
        if strategy == "auto":
            strategy = "bfs" if self.k <= 4 else "incexc"
        if strategy == "bfs" and not self.hasse_within_budget:
            strategy = "incexc"
        return strategy

    # Inclusion-exclusion terms are state-independent, so they are built
    # once: terms[r] alternates over the nonempty cover subsets, giving
    # (sign, rank of subset join) for the left side and meets for the right.
    @cached_property
    def lstar_terms(self) -> list[list[tuple[int, int]]]:
        return self._build_terms(self.left_covers, min)

    @cached_property
    def rstar_terms(self) -> list[list[tuple[int, int]]]:
        return self._build_terms(self.right_covers, max)

    def _build_terms(self, covers, pick) -> list[list[tuple[int, int]]]:
        sets, rank, k = self.sets, self.rank, self.k
        table = []
        for r in range(self.total):
            cov = covers[r]
            c = len(cov)
            # joins/meets of every nonempty subset, built by adding one
            # cover at a time to the smaller subset's result
            combo: list[KSet | None] = [None] * (1 << c)
            terms = []
            for mask in range(1, 1 << c):
                low = mask & -mask
                idx = low.bit_length() - 1
                rest = mask ^ low
                cur = sets[cov[idx]]
                if rest:
                    prev = combo[rest]
                    cur = tuple(pick(a, b) for a, b in zip(prev, cur))
                combo[mask] = cur
                sign = 1 if mask.bit_count() & 1 else -1
                terms.append((sign, rank[cur]))
            table.append(terms)
        return table


class FamilyState:
    """Tri-partition of the k-sets plus the generating families.

    POS is always the left closure of ``aplus`` and NEG the right closure
    of ``aminus``.  A state is owned by a single search node; ``copy()``
    produces the independent child states used for branching.
    """

    __slots__ = ("ctx", "label", "aplus", "aminus", "n_pos", "n_neg",
                 "lstar", "rstar")

    def __init__(self, ctx: ShiftContext):
        self.ctx = ctx
        self.label = bytearray(ctx.total)
        self.aplus: list[KSet] = []
        self.aminus: list[KSet] = []
        self.n_pos = 0
        self.n_neg = 0
        self.lstar: list[int] | None = None
        self.rstar: list[int] | None = None

    @property
    def n_undecided(self) -> int:
        return self.ctx.total - self.n_pos - self.n_neg

    def copy(self) -> "FamilyState":
        new = FamilyState.__new__(FamilyState)
        new.ctx = self.ctx
        new.label = bytearray(self.label)
        new.aplus = list(self.aplus)
        new.aminus = list(self.aminus)
        new.n_pos = self.n_pos
        new.n_neg = self.n_neg
        new.lstar = list(self.lstar) if self.lstar is not None else None
        new.rstar = list(self.rstar) if self.rstar is not None else None
        return new

    def undecided_ranks(self):
        label = self.label
        return (r for r in range(self.ctx.total) if label[r] == UNDECIDED)

    def is_undecided(self, s: KSet) -> bool:
        return self.label[self.ctx.rank[s]] == UNDECIDED

    # -- label mutation ------------------------------------------------

    def mark_negative(self, s: KSet) -> list[int]:
        """Label the right shift of s NEG; returns the newly NEG ranks.

        Raises ConflictError if the right shift touches POS, which callers
        treat exactly like an infeasible relaxation.
        """
        ctx = self.ctx
        r0 = ctx.rank[s]
        label = self.label
        if label[r0] == POS:
            raise ConflictError(f"{format_kset(s)} already forced nonnegative")
        if label[r0] == NEG:
            return []
        self.aminus.append(s)
        covers = ctx.right_covers
        new = []
        stack = [r0]
        while stack:
            r = stack.pop()
            if label[r] == NEG:
                continue
            if label[r] == POS:
                raise ConflictError(
                    f"right shift of {format_kset(s)} meets the positive closure")
            label[r] = NEG
            new.append(r)
            stack.extend(covers[r])
        self.n_neg += len(new)
        self.rstar = None  # recomputed lazily in bulk
        return new

    def mark_positive(self, s: KSet) -> list[int]:
        """Label the left shift of s POS; dual of mark_negative."""
        ctx = self.ctx
        r0 = ctx.rank[s]
        label = self.label
        if label[r0] == NEG:
            raise ConflictError(f"{format_kset(s)} already forced negative")
        if label[r0] == POS:
            return []
        self.aplus.append(s)
        new = self._flood_positive(r0)
        self.lstar = None
        return new

    def _flood_positive(self, r0: int) -> list[int]:
        label = self.label
        covers = self.ctx.left_covers
        new = []
        stack = [r0]
        while stack:
            r = stack.pop()
            if label[r] == POS:
                continue
            if label[r] == NEG:
                raise ConflictError(
                    f"left shift of {format_kset(self.ctx.sets[r0])} meets the negative closure")
            label[r] = POS
            new.append(r)
            stack.extend(covers[r])
        self.n_pos += len(new)
        return new

    # -- restricted shift counts ----------------------------------------

    def compute_lstar(self, strategy: str = "auto") -> list[int]:
        strategy = self.ctx.resolve_strategy(strategy)
        if strategy == "bfs":
            self.lstar = self._star_bfs(self.ctx.left_covers, POS, NEG)
        else:
            self.lstar = self._star_incexc(self.ctx.lstar_terms, POS,
                                           ascending=True)
        return self.lstar

    def compute_rstar(self, strategy: str = "auto") -> list[int]:
        strategy = self.ctx.resolve_strategy(strategy)
        if strategy == "bfs":
            self.rstar = self._star_bfs(self.ctx.right_covers, NEG, POS)
        else:
            self.rstar = self._star_incexc(self.ctx.rstar_terms, NEG,
                                           ascending=False)
        return self.rstar

    def _star_bfs(self, covers, closed, opposite) -> list[int]:
        """Per-set digraph walk counting shifts outside the closed class.

        For an undecided set no shift on this side can carry the opposite
        label (the closures are shift-closed); that coincidence is asserted
        rather than assumed.
        """
        label = self.label
        total = self.ctx.total
        out = [0] * total
        seen = [-1] * total
        for r0 in range(total):
            if label[r0] != UNDECIDED:
                continue
            count = 0
            stack = [r0]
            seen[r0] = r0
            while stack:
                r = stack.pop()
                lab = label[r]
                if lab == opposite:
                    raise AssertionError(
                        "shift of an undecided set carries the opposite label")
                if lab != closed:
                    count += 1
                for t in covers[r]:
                    if seen[t] != r0:
                        seen[t] = r0
                        stack.append(t)
            out[r0] = count
        return out

    def _star_incexc(self, terms, closed, ascending: bool) -> list[int]:
        label = self.label
        total = self.ctx.total
        out = [0] * total
        order = range(total) if ascending else range(total - 1, -1, -1)
        for r in order:
            if label[r] != UNDECIDED:
                continue  # closed sets contribute 0; opposite cannot occur
            acc = 1
            for sign, jr in terms[r]:
                acc += sign * out[jr]
            out[r] = acc
        return out

    def apply_positive_incremental(self, s: KSet) -> list[int]:
        """Move s into the positive generators, updating lstar in place.

        Requires a valid lstar cache for the current generators.  Undecided
        sets are visited in decreasing colex rank so that every join
        T v s still holds its pre-update value when read.  rstar does not
        depend on the positive side and stays valid.
        """
        if self.lstar is None:
            raise ValueError("lstar cache required before incremental update")
        ctx = self.ctx
        label = self.label
        lstar = self.lstar
        rank = ctx.rank
        sets = ctx.sets
        if label[rank[s]] != UNDECIDED:
            raise ConflictError(f"{format_kset(s)} is already decided")
        for r in range(ctx.total - 1, -1, -1):
            if label[r] != UNDECIDED:
                continue
            t = sets[r]
            jr = rank[tuple(a if a < b else b for a, b in zip(t, s))]
            dec = lstar[jr]
            if dec:
                lstar[r] -= dec
        self.aplus.append(s)
        new = self._flood_positive(rank[s])
        for r in new:
            lstar[r] = 0
        return new

    # -- diagnostics -----------------------------------------------------

    def audit(self) -> None:
        """Full check of the closure and count invariants (tests/debug)."""
        ctx = self.ctx
        label = self.label
        if self.n_pos != sum(1 for v in label if v == POS):
            raise AssertionError("POS count out of sync")
        if self.n_neg != sum(1 for v in label if v == NEG):
            raise AssertionError("NEG count out of sync")
        for r in range(ctx.total):
            if label[r] == POS:
                for t in ctx.left_covers[r]:
                    if label[t] != POS:
                        raise AssertionError("POS class not left-closed")
            elif label[r] == NEG:
                for t in ctx.right_covers[r]:
                    if label[t] != NEG:
                        raise AssertionError("NEG class not right-closed")

    def dump_lines(self):
        """Debug dump: one line '<rank> <label> <kset>' per set."""
        names = {UNDECIDED: "UNDECIDED", POS: "POS", NEG: "NEG"}
        for r, s in enumerate(self.ctx.sets):
            yield f"{r} {names[self.label[r]]} {format_kset(s)}"
