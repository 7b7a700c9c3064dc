"""Exact rational linear programming for k-sum feasibility systems.

The program family:

    minimize x_1
    subject to   sum_i x_i            >= 0
                 x_i - x_{i+1}        >= 0     (i = 1..n-1)
                 sum_{i in S} x_i     >= 0     (S in the nonnegative family)
                 sum_{i in T} x_i     <= -1    (T in the negative family)

with free real variables.  Everything is solved in exact arithmetic: the
simplex tableau keeps integer entries with a single positive denominator
(fraction-free pivoting, dividing by the previous pivot), Bland's rule
picks pivots, and verdicts carry witnesses.  A feasible verdict exposes an
optimal rational point; an infeasible verdict exposes nonnegative row
multipliers whose combination is the contradiction 0 >= positive.

Certificate convention: multipliers apply to the rows *normalized to >=
orientation* (a "<= -1" row becomes "-sum >= 1").  verify_certificate
recomputes both kinds of witness from scratch.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction
from math import comb, lcm
from typing import Optional, Sequence

from .kset import KSet, format_kset, validate_kset

OPTIMAL = "OPTIMAL"
INFEASIBLE = "INFEASIBLE"


@dataclass(frozen=True)
class LPRow:
    """One constraint: coeffs . x (sense) rhs, coefficients in {-1,0,1}."""

    coeffs: tuple[int, ...]
    sense: str  # '>=' or '<='
    rhs: int
    tag: str

    def normalized(self) -> tuple[tuple[int, ...], int]:
        """Return (coeffs, rhs) in >= orientation."""
        if self.sense == ">=":
            return self.coeffs, self.rhs
        return tuple(-c for c in self.coeffs), -self.rhs


@dataclass(frozen=True)
class LPInstance:
    n: int
    k: int
    aplus: tuple[KSet, ...]
    aminus: tuple[KSet, ...]
    rows: tuple[LPRow, ...]
    objective: tuple[int, ...]


@dataclass(frozen=True)
class LPResult:
    verdict: str
    x: Optional[tuple[Fraction, ...]] = None
    objective: Optional[Fraction] = None
    certificate: Optional[tuple[Fraction, ...]] = None

    def digest(self) -> str:
        payload = repr((self.verdict, self.x, self.objective, self.certificate))
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


def build_lp(n: int, k: int, aplus: Sequence[KSet], aminus: Sequence[KSet]) -> LPInstance:
    """Assemble the program; duplicate generators are dropped, a set in both
    families yields the contradictory pair of rows rather than an error."""
    rows = [LPRow(tuple(1 for _ in range(n)), ">=", 0, "TOTAL")]
    for i in range(n - 1):
        coeffs = [0] * n
        coeffs[i] = 1
        coeffs[i + 1] = -1
        rows.append(LPRow(tuple(coeffs), ">=", 0, f"ORD{i + 1}"))
    plus = _dedupe(aplus, n)
    minus = _dedupe(aminus, n)
    for s in plus:
        coeffs = [0] * n
        for e in s:
            coeffs[e - 1] = 1
        rows.append(LPRow(tuple(coeffs), ">=", 0, f"POS{format_kset(s)}"))
    for s in minus:
        coeffs = [0] * n
        for e in s:
            coeffs[e - 1] = 1
        rows.append(LPRow(tuple(coeffs), "<=", -1, f"NEG{format_kset(s)}"))
    objective = tuple(1 if i == 0 else 0 for i in range(n))
    return LPInstance(n, k, plus, minus, tuple(rows), objective)


def _dedupe(family: Sequence[KSet], n: int) -> tuple[KSet, ...]:
    seen = set()
    out = []
    for s in family:
        t = tuple(s)
        validate_kset(t, n)
        if t not in seen:
            seen.add(t)
            out.append(t)
    return tuple(out)


@dataclass
class MinimizeOutcome:
    status: str  # 'optimal' | 'stopped' | 'unbounded'
    x: Optional[tuple[Fraction, ...]] = None
    value: Optional[Fraction] = None
    duals: Optional[tuple[Fraction, ...]] = None


class ExactSimplex:
    """Two-phase fraction-free simplex over rows 'coeffs . x >= rhs', x free.

    Free variables are split x = p - q; each row gets a slack or surplus
    column, rows with positive right-hand side also an artificial.  The
    tableau T stores D times the true rational entries where D > 0 is the
    most recent pivot; a pivot on (r, c) maps every other row through
    T[i][j] <- (T[i][j]*piv - T[i][c]*T[r][j]) / D, which is an exact
    division.  Bland's rule guarantees termination and makes every run
    reproducible.
    """

    def __init__(self, rows_ge: Sequence[tuple[Sequence[int], int]], n: int):
        self.n = n
        self.m = len(rows_ge)
        self.rows_ge = [(tuple(c), int(b)) for c, b in rows_ge]
        self._build()
        self.feasible = self._phase1()
        self.farkas: Optional[tuple[Fraction, ...]] = None
        if not self.feasible:
            self.farkas = self._extract_farkas()
        else:
            self._evict_artificials()

    # -- construction ---------------------------------------------------

    def _build(self) -> None:
        n, m = self.n, self.m
        self.negated = []  # row stored with flipped sign (rhs <= 0 rows)
        self.art_cols: list[int] = []  # artificial column per row, -1 if none
        n_art = sum(1 for _, b in self.rows_ge if b > 0)
        self.width = 2 * n + m + n_art + 1  # last column = rhs
        self.rhs_col = self.width - 1
        self.T: list[list[int]] = []
        self.basis: list[int] = []
        self.D = 1
        next_art = 2 * n + m
        for i, (coeffs, b) in enumerate(self.rows_ge):
            row = [0] * self.width
            if b > 0:
                sign, self_col = 1, None
                row[2 * n + i] = -1  # surplus
                row[next_art] = 1
                self.art_cols.append(next_art)
                self.basis.append(next_art)
                next_art += 1
                self.negated.append(False)
                row[self.rhs_col] = b
            else:
                sign = -1  # store as -coeffs . x + s = -b, slack basic
                row[2 * n + i] = 1
                self.art_cols.append(-1)
                self.basis.append(2 * n + i)
                self.negated.append(True)
                row[self.rhs_col] = -b
            for j, c in enumerate(coeffs):
                if c:
                    row[j] = sign * c
                    row[n + j] = -sign * c
            self.T.append(row)
        self.obj = [0] * self.width
        self.fenced = [False] * self.width

    # -- pivoting core ----------------------------------------------------

    def _pivot(self, r: int, c: int) -> None:
        T, D = self.T, self.D
        prow = T[r]
        if prow[c] < 0:
            # only reached on degenerate basis-repair pivots (rhs 0); row
            # negation keeps the denominator positive
            T[r] = prow = [-v for v in prow]
        piv = prow[c]
        width = self.width
        for row in T:
            if row is prow:
                continue
            f = row[c]
            if f:
                for j in range(width):
                    row[j] = (row[j] * piv - f * prow[j]) // D
            elif piv != D:
                for j in range(width):
                    row[j] = row[j] * piv // D
        obj = self.obj
        f = obj[c]
        if f:
            for j in range(width):
                obj[j] = (obj[j] * piv - f * prow[j]) // D
        elif piv != D:
            for j in range(width):
                obj[j] = obj[j] * piv // D
        self.D = piv
        self.basis[r] = c

    def _set_objective_row(self, col_cost) -> None:
        """obj[j] = D * reduced cost of column j for costs col_cost(j)."""
        D, T, width = self.D, self.T, self.width
        obj = [D * col_cost(j) for j in range(width)]
        obj[self.rhs_col] = 0
        for i, row in enumerate(T):
            cb = col_cost(self.basis[i])
            if cb:
                for j in range(width):
                    obj[j] -= cb * row[j]
        self.obj = obj

    def _bland_step(self) -> str:
        """One simplex step; returns 'pivoted', 'optimal' or 'unbounded'."""
        obj, T, rhs_col = self.obj, self.T, self.rhs_col
        enter = -1
        for j in range(self.width - 1):
            if obj[j] < 0 and not self.fenced[j]:
                enter = j
                break
        if enter < 0:
            return "optimal"
        leave = -1
        best_num = best_den = 0
        for i, row in enumerate(T):
            a = row[enter]
            if a > 0:
                num = row[rhs_col]
                if leave < 0 or num * best_den < best_num * a or (
                        num * best_den == best_num * a
                        and self.basis[i] < self.basis[leave]):
                    leave, best_num, best_den = i, num, a
        if leave < 0:
            self._unbounded_col = enter
            return "unbounded"
        left_col = self.basis[leave]
        self._pivot(leave, enter)
        if self._drop_on_leave and left_col in self._art_set:
            self.fenced[left_col] = True
        return "pivoted"

    def _run(self) -> str:
        while True:
            res = self._bland_step()
            if res != "pivoted":
                return res

    # -- phase 1 ----------------------------------------------------------

    def _phase1(self) -> bool:
        self._art_set = {c for c in self.art_cols if c >= 0}
        self._drop_on_leave = True
        if not self._art_set:
            return True
        art = self._art_set
        self._set_objective_row(lambda j: 1 if j in art else 0)
        status = self._run()
        if status == "unbounded":  # cannot happen: objective bounded below by 0
            raise RuntimeError("phase-1 objective unbounded")
        return self.obj[self.rhs_col] == 0  # -D*z == 0 iff z == 0

    def _value(self) -> Fraction:
        return Fraction(-self.obj[self.rhs_col], self.D)

    def _duals(self, art_cost: int) -> list[Fraction]:
        """Multipliers u per stored row, from initial identity columns."""
        out = []
        for i in range(self.m):
            if self.art_cols[i] >= 0:
                col, cost = self.art_cols[i], art_cost
            else:
                col, cost = 2 * self.n + i, 0
            out.append(cost - Fraction(self.obj[col], self.D))
        return out

    def _to_original_multipliers(self, u: list[Fraction]) -> tuple[Fraction, ...]:
        return tuple(-ui if neg else ui for ui, neg in zip(u, self.negated))

    def _extract_farkas(self) -> tuple[Fraction, ...]:
        y = self._to_original_multipliers(self._duals(art_cost=1))
        if any(v < 0 for v in y):
            raise RuntimeError("negative multiplier in infeasibility certificate")
        return y

    def _evict_artificials(self) -> None:
        """Drive zero-valued artificials out of the basis; rows whose real
        columns are all zero are redundant and stay pinned at zero."""
        self._drop_on_leave = False
        nreal = 2 * self.n + self.m
        for i in range(self.m):
            col = self.basis[i]
            if col in self._art_set:
                row = self.T[i]
                for j in range(nreal):
                    if row[j]:
                        self._pivot(i, j)
                        break
        for c in self._art_set:
            self.fenced[c] = True

    # -- phase 2 ----------------------------------------------------------

    def minimize(self, c: Sequence[int],
                 stop_leq: Optional[int] = None) -> MinimizeOutcome:
        """Minimize c . x over the feasible region from the current basis.

        With stop_leq set, returns early ('stopped') as soon as a feasible
        point with value <= stop_leq is at hand; an unbounded ray is turned
        into such a point.  Without it, runs to optimality or reports
        'unbounded'.
        """
        if not self.feasible:
            raise RuntimeError("minimize called on infeasible system")
        n = self.n
        cvec = tuple(c)

        def col_cost(j: int) -> int:
            if j < n:
                return cvec[j]
            if j < 2 * n:
                return -cvec[j - n]
            return 0

        self._set_objective_row(col_cost)
        while True:
            if stop_leq is not None and self._value() <= stop_leq:
                return MinimizeOutcome("stopped", self._solution(), self._value())
            res = self._bland_step()
            if res == "optimal":
                u = self._duals(art_cost=0)
                return MinimizeOutcome("optimal", self._solution(), self._value(),
                                       self._to_original_multipliers(u))
            if res == "unbounded":
                if stop_leq is None:
                    return MinimizeOutcome("unbounded")
                x = self._ray_point(self._unbounded_col, col_cost, stop_leq)
                return MinimizeOutcome("stopped", x, None)

    def _solution(self) -> tuple[Fraction, ...]:
        vals = {}
        for i, col in enumerate(self.basis):
            vals[col] = Fraction(self.T[i][self.rhs_col], self.D)
        n = self.n
        return tuple(vals.get(j, Fraction(0)) - vals.get(n + j, Fraction(0))
                     for j in range(n))

    def _ray_point(self, enter: int, col_cost, stop_leq: int) -> tuple[Fraction, ...]:
        """Feasible point with value <= stop_leq along an improving ray."""
        n = self.n
        x = list(self._solution())
        d = [Fraction(0)] * n
        if enter < n:
            d[enter] += 1
        elif enter < 2 * n:
            d[enter - n] -= 1
        for i, col in enumerate(self.basis):
            step = Fraction(self.T[i][enter], self.D)
            if step and col < 2 * n:
                if col < n:
                    d[col] -= step
                else:
                    d[col - n] += step
        slope = Fraction(self.obj[enter], self.D)  # < 0 on an improving ray
        value = sum(Fraction(col_cost(j)) * x[j] for j in range(n))
        lam = (Fraction(stop_leq) - value) / slope
        if lam < 0:
            lam = Fraction(0)
        return tuple(xi + lam * di for xi, di in zip(x, d))


def solve(instance: LPInstance) -> LPResult:
    """Certified solve of the canonical program (minimize x_1)."""
    sx = ExactSimplex([row.normalized() for row in instance.rows], instance.n)
    if not sx.feasible:
        return LPResult(INFEASIBLE, certificate=sx.farkas)
    out = sx.minimize(instance.objective)
    if out.status != "optimal":
        # total-sum plus ordering force x_1 >= mean >= 0, so the canonical
        # objective cannot be unbounded; reaching here is a solver fault
        raise RuntimeError(f"unexpected status {out.status} for canonical objective")
    return LPResult(OPTIMAL, x=out.x, objective=out.value)


def verify_certificate(instance: LPInstance, result: LPResult) -> bool:
    """Recheck a verdict from scratch with rational arithmetic."""
    rows = [row.normalized() for row in instance.rows]
    if result.verdict == OPTIMAL:
        if result.x is None or len(result.x) != instance.n:
            return False
        for coeffs, rhs in rows:
            if sum(c * xi for c, xi in zip(coeffs, result.x) if c) < rhs:
                return False
        if result.objective is not None:
            obj = sum(c * xi for c, xi in zip(instance.objective, result.x))
            if obj != result.objective:
                return False
        return True
    if result.verdict == INFEASIBLE:
        y = result.certificate
        if y is None or len(y) != len(rows):
            return False
        if any(v < 0 for v in y):
            return False
        combo = [Fraction(0)] * instance.n
        rhs_total = Fraction(0)
        for mult, (coeffs, rhs) in zip(y, rows):
            if mult:
                for j, c in enumerate(coeffs):
                    if c:
                        combo[j] += mult * c
                rhs_total += mult * rhs
        return all(v == 0 for v in combo) and rhs_total > 0
    return False


def count_nonneg_ksums(x: Sequence, k: int) -> int:
    """Exact number of k-element subsets of x with nonnegative sum.

    Requires nonincreasing coordinates; prunes whole subtrees whenever the
    best completion (next k values) is already negative or the worst one
    (smallest k values) is already nonnegative.
    """
    n = len(x)
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k} n={n}")
    vals = [v if isinstance(v, (int, Fraction)) else Fraction(v) for v in x]
    if any(a < b for a, b in zip(vals, vals[1:])):
        raise ValueError("coordinates must be nonincreasing")
    denom = lcm(*(v.denominator for v in vals)) if vals else 1
    ints = [int(v * denom) for v in vals]
    prefix = [0]
    for v in ints:
        prefix.append(prefix[-1] + v)

    def rec(i: int, r: int, cur: int) -> int:
        if r == 0:
            return 1 if cur >= 0 else 0
        avail = n - i
        if avail < r:
            return 0
        if cur + prefix[i + r] - prefix[i] < 0:
            return 0
        if cur + prefix[n] - prefix[n - r] >= 0:
            return comb(avail, r)
        return rec(i + 1, r - 1, cur + ints[i]) + rec(i + 1, r, cur)

    return rec(0, k, 0)


def lp_format(instance: LPInstance) -> str:
    """Dump in LP interchange format for cross-checks with other solvers."""
    lines = [f"\\ k-sum program n={instance.n} k={instance.k}", "Minimize"]
    lines.append(" obj: " + _lp_expr(instance.objective))
    lines.append("Subject To")
    for idx, row in enumerate(instance.rows):
        lines.append(f" c{idx}: {_lp_expr(row.coeffs)} {row.sense} {row.rhs}")
    lines.append("Bounds")
    for j in range(instance.n):
        lines.append(f" x{j + 1} free")
    lines.append("End")
    return "\n".join(lines) + "\n"


def _lp_expr(coeffs: Sequence[int]) -> str:
    parts = []
    for j, c in enumerate(coeffs):
        if not c:
            continue
        sign = "+" if c > 0 else "-"
        mag = abs(c)
        term = f"x{j + 1}" if mag == 1 else f"{mag} x{j + 1}"
        parts.append(f"{sign} {term}" if parts else
                     (term if c > 0 else f"- {term}"))
    return " ".join(parts) if parts else "0 x1"
