"""k-subsets of [n] under the shift partial order.

A k-set is a tuple of strictly increasing integers from 1..n.  The shift
order compares k-sets positionwise: S is "to the left of" T when every
element of S is at most the corresponding element of T.  Under any
nonincreasing weighting x_1 >= ... >= x_n, a left set's element sum
dominates a right set's, which is what makes this order useful for
reasoning about k-element partial sums.

The order is a lattice: the join (least upper bound, leftmost common
left-bound) is the positionwise minimum and the meet is the positionwise
maximum.  Both lexicographic and colexicographic ranks are monotone with
respect to the order.  Colex rank does not depend on n, so it is used as
the canonical dense index for per-(n, k) arrays.
"""

from __future__ import annotations

from itertools import combinations
from math import comb
from typing import Iterable, Iterator, Optional

KSet = tuple[int, ...]


def validate_kset(s: KSet, n: int) -> None:
    """Raise ValueError unless s is strictly increasing inside [1, n]."""
    if len(s) == 0:
        raise ValueError("empty k-set")
    if any(b <= a for a, b in zip(s, s[1:])):
        raise ValueError(f"not strictly increasing: {s}")
    if s[0] < 1 or s[-1] > n:
        raise ValueError(f"elements of {s} outside [1, {n}]")


def shift_leq(s: KSet, t: KSet) -> bool:
    """True iff s is left of t (positionwise s[i] <= t[i])."""
    if len(s) != len(t):
        raise ValueError("cardinality mismatch")
    return all(a <= b for a, b in zip(s, t))


def join(family: Iterable[KSet]) -> KSet:
    """Positionwise minimum: the rightmost set left of every member."""
    return _lattice_op(family, min)


def meet(family: Iterable[KSet]) -> KSet:
    """Positionwise maximum: the leftmost set right of every member."""
    return _lattice_op(family, max)


def _lattice_op(family: Iterable[KSet], pick) -> KSet:
    members = list(family)
    if not members:
        raise ValueError("empty family")
    k = len(members[0])
    if any(len(m) != k for m in members):
        raise ValueError("cardinality mismatch in family")
    return tuple(pick(m[i] for m in members) for i in range(k))


def lex_rank(s: KSet, n: int) -> int:
    """Position of s in lexicographic order over all k-subsets of [n]."""
    k = len(s)
    r = 0
    prev = 0
    for pos, elem in enumerate(s, start=1):
        for j in range(prev + 1, elem):
            r += comb(n - j, k - pos)
        prev = elem
    return r


def colex_rank(s: KSet) -> int:
    """Position of s in colexicographic order; independent of n."""
    return sum(comb(e - 1, pos) for pos, e in enumerate(s, start=1))


def colex_unrank(r: int, n: int, k: int) -> KSet:
    """Inverse of colex_rank over the k-subsets of [n]."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not 0 <= r < comb(n, k):
        raise ValueError(f"rank {r} out of range for C({n},{k})")
    out = []
    for pos in range(k, 0, -1):
        # largest e with C(e-1, pos) <= r
        e = pos
        while comb(e, pos) <= r:
            e += 1
        out.append(e)
        r -= comb(e - 1, pos)
    return tuple(reversed(out))


def lex_successor(s: KSet, n: int) -> Optional[KSet]:
    """Next k-subset of [n] in lex order, or None at the last one."""
    k = len(s)
    lst = list(s)
    for i in range(k - 1, -1, -1):
        if lst[i] < n - (k - 1 - i):
            lst[i] += 1
            for j in range(i + 1, k):
                lst[j] = lst[j - 1] + 1
            return tuple(lst)
    return None


def colex_successor(s: KSet, n: int) -> Optional[KSet]:
    """Next k-subset of [n] in colex order, or None at the last one."""
    k = len(s)
    for i in range(k):
        ceiling = s[i + 1] if i + 1 < k else n + 1
        if s[i] + 1 < ceiling:
            return tuple(range(1, i + 1)) + (s[i] + 1,) + s[i + 1:]
    return None


def lex_iter(n: int, k: int) -> Iterator[KSet]:
    """All k-subsets of [n] in lex order."""
    return combinations(range(1, n + 1), k)


def colex_iter(n: int, k: int) -> Iterator[KSet]:
    """All k-subsets of [n] in colex order."""
    if k == 0:
        yield ()
        return
    for m in range(k, n + 1):
        for prefix in colex_iter(m - 1, k - 1):
            yield prefix + (m,)


def to_composition(s: KSet, n: int) -> tuple[int, ...]:
    """Gap encoding: k+1 positive parts summing to n+1.

    The prefix sums recover the elements of s, and the shift order maps to
    prefix-sum dominance between compositions.
    """
    validate_kset(s, n)
    parts = [s[0]]
    parts.extend(s[i] - s[i - 1] for i in range(1, len(s)))
    parts.append(n + 1 - s[-1])
    return tuple(parts)


def from_composition(parts: tuple[int, ...]) -> KSet:
    """Inverse of to_composition (drops the final part)."""
    if any(p < 1 for p in parts):
        raise ValueError("composition parts must be positive")
    acc = 0
    out = []
    for p in parts[:-1]:
        acc += p
        out.append(acc)
    return tuple(out)


def cover_neighbors(s: KSet, n: int, direction: str) -> list[KSet]:
    """Immediate neighbors in the Hasse diagram of the shift order.

    direction "left": sets covering s (one element moved down by 1);
    direction "right": sets s covers (one element moved up by 1).
    """
    validate_kset(s, n)
    k = len(s)
    out = []
    if direction == "left":
        for i in range(k):
            e = s[i] - 1
            if e >= 1 and (i == 0 or s[i - 1] < e):
                out.append(s[:i] + (e,) + s[i + 1:])
    elif direction == "right":
        for i in range(k):
            e = s[i] + 1
            if e <= n and (i == k - 1 or s[i + 1] > e):
                out.append(s[:i] + (e,) + s[i + 1:])
    else:
        raise ValueError(f"direction must be 'left' or 'right', got {direction!r}")
    return out


def reflect(s: KSet, n: int) -> KSet:
    """Mirror image n+1-e; swaps the roles of left and right."""
    return tuple(n + 1 - e for e in reversed(s))


def format_kset(s: KSet) -> str:
    """Brace syntax used in logs and on the command line: {1,6,11}."""
    return "{" + ",".join(str(e) for e in s) + "}"


def parse_kset(text: str) -> KSet:
    """Parse the brace syntax accepted by format_kset."""
    body = text.strip()
    if not (body.startswith("{") and body.endswith("}")):
        raise ValueError(f"expected braces around k-set, got {text!r}")
    try:
        elems = tuple(int(p) for p in body[1:-1].split(","))
    except ValueError as exc:
        raise ValueError(f"bad k-set literal {text!r}") from exc
    return elems
