"""Exact integer arithmetic on eventually periodic two-sided sequences.

A sequence a = (a_j), j in Z, is stored as a periodic left tail, an explicit
finite core, and a periodic right tail.  All values are Python ints, so every
operation here is exact; nothing in this module touches floating point.

The module also implements the algebra of the shift coinvariant quotient:
membership in Im(1-S) with an explicit witness, equality of coinvariant
classes, the interleave/split maps between a sequence and its even/odd parts,
and an exact division algorithm producing (b, c) with a - n*b = (1-S)c and
0 <= c_j < n everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Callable, Iterable, Optional

from .errors import ValidationError


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _minimal_period(word: tuple[int, ...]) -> int:
    """Smallest divisor d of len(word) such that word repeats its first d values."""
    n = len(word)
    for d in range(1, n + 1):
        if n % d:
            continue
        if all(word[i] == word[i % d] for i in range(n)):
            return d
    return n


class EventuallyPeriodicSeq:
    """An eventually periodic Z-indexed integer sequence in canonical form.

    Semantics of the stored data (left, offset, core, right):

      a_j = core[j - offset]                          offset <= j < offset+len(core)
      a_j = right[(j - core_end) % len(right)]        j >= core_end
      a_j = left[(j - offset) % len(left)]            j < offset

    where core_end = offset + len(core).  The constructor canonicalizes, so
    two instances compare equal iff they agree at every index: tail periods
    are minimal, the core is as short as possible, and when the core is empty
    the tail boundary is pinned (clamped toward index 0).
    """

    __slots__ = ("left", "offset", "core", "right")

    def __init__(self, left: Iterable[int], offset: int,
                 core: Iterable[int], right: Iterable[int]):
        left = tuple(int(v) for v in left)
        core = tuple(int(v) for v in core)
        right = tuple(int(v) for v in right)
        if not left or not right:
            raise ValidationError("tail period lists must be nonempty")
        lf, off, co, rt = _canonicalize(left, int(offset), core, right)
        object.__setattr__(self, "left", lf)
        object.__setattr__(self, "offset", off)
        object.__setattr__(self, "core", co)
        object.__setattr__(self, "right", rt)

    def __setattr__(self, name, value):
        raise AttributeError("EventuallyPeriodicSeq is immutable")

    # -- basic queries ----------------------------------------------------

    @property
    def core_end(self) -> int:
        return self.offset + len(self.core)

    def at(self, j: int) -> int:
        """Value a_j."""
        if j >= self.core_end:
            return self.right[(j - self.core_end) % len(self.right)]
        if j >= self.offset:
            return self.core[j - self.offset]
        return self.left[(j - self.offset) % len(self.left)]

    def is_zero(self) -> bool:
        return self == ZERO

    def __eq__(self, other) -> bool:
        if not isinstance(other, EventuallyPeriodicSeq):
            return NotImplemented
        return (self.left == other.left and self.offset == other.offset
                and self.core == other.core and self.right == other.right)

    def __hash__(self):
        return hash((self.left, self.offset, self.core, self.right))

    def __repr__(self):
        return (f"EventuallyPeriodicSeq({list(self.left)}, {self.offset}, "
                f"{list(self.core)}, {list(self.right)})")

    # -- group operations --------------------------------------------------

    def _combine(self, other: "EventuallyPeriodicSeq",
                 op: Callable[[int, int], int]) -> "EventuallyPeriodicSeq":
        lo = min(self.offset, other.offset)
        hi = max(self.core_end, other.core_end)
        pl = _lcm(len(self.left), len(other.left))
        pr = _lcm(len(self.right), len(other.right))
        return from_window(lambda j: op(self.at(j), other.at(j)), lo, hi, pl, pr)

    def add(self, other: "EventuallyPeriodicSeq") -> "EventuallyPeriodicSeq":
        return self._combine(other, lambda x, y: x + y)

    def sub(self, other: "EventuallyPeriodicSeq") -> "EventuallyPeriodicSeq":
        return self._combine(other, lambda x, y: x - y)

    def scale(self, n: int) -> "EventuallyPeriodicSeq":
        n = int(n)
        return EventuallyPeriodicSeq([n * v for v in self.left], self.offset,
                                     [n * v for v in self.core],
                                     [n * v for v in self.right])

    def exact_div(self, n: int) -> "EventuallyPeriodicSeq":
        """Divide every value by n; all values must be divisible exactly."""
        vals = self.left + self.core + self.right
        if any(v % n for v in vals):
            raise ValidationError(f"sequence is not divisible by {n}")
        return EventuallyPeriodicSeq([v // n for v in self.left], self.offset,
                                     [v // n for v in self.core],
                                     [v // n for v in self.right])

    def shift(self, k: int) -> "EventuallyPeriodicSeq":
        """Sequence r with r_j = a_{j+k} (k=1 is the left shift)."""
        return EventuallyPeriodicSeq(self.left, self.offset - int(k),
                                     self.core, self.right)

    def one_minus_s(self) -> "EventuallyPeriodicSeq":
        """a - Sa, i.e. j -> a_j - a_{j+1}."""
        return self.sub(self.shift(1))

    def block_sum(self, n: int) -> "EventuallyPeriodicSeq":
        """r_i = a_{ni} + a_{ni+1} + ... + a_{ni+n-1}, groups anchored at 0."""
        n = int(n)
        if n < 1:
            raise ValidationError("block size must be >= 1")
        lo = self.offset // n - 1
        hi = -(-self.core_end // n) + 1
        pl = len(self.left) // gcd(n, len(self.left))
        pr = len(self.right) // gcd(n, len(self.right))
        return from_window(lambda i: sum(self.at(n * i + t) for t in range(n)),
                           lo, hi, pl, pr)

    def reduce3(self) -> "EventuallyPeriodicSeq":
        """Collapse each 3-block onto its first index: the result carries
        a_{3i}+a_{3i+1}+a_{3i+2} at index 3i and 0 at 3i+1, 3i+2.  The result
        is congruent to a modulo Im(1-S)."""
        def val(j: int) -> int:
            if j % 3:
                return 0
            return self.at(j) + self.at(j + 1) + self.at(j + 2)
        lo = 3 * (self.offset // 3 - 1)
        hi = 3 * (-(-self.core_end // 3) + 1)
        pl = _lcm(3, len(self.left))
        pr = _lcm(3, len(self.right))
        return from_window(val, lo, hi, pl, pr)

    def __add__(self, other):
        return self.add(other)

    def __sub__(self, other):
        return self.sub(other)

    def __neg__(self):
        return self.scale(-1)

    def __rmul__(self, n):
        if isinstance(n, int):
            return self.scale(n)
        return NotImplemented


# -- canonicalization -------------------------------------------------------

def _canonicalize(left, offset, core, right):
    """Reduce to the canonical representation described on the class.

    The canonical data is intrinsic to the function j -> a_j: minimal tail
    periods, then the unique maximal agreement of a with its two periodic
    continuations, and a clamped boundary when the core is empty.
    """
    end = offset + len(core)
    dl = _minimal_period(left)
    dr = _minimal_period(right)

    def raw(j):
        if j >= end:
            return right[(j - end) % len(right)]
        if j >= offset:
            return core[j - offset]
        return left[(j - offset) % len(left)]

    def rcont(j):  # right-periodic continuation, valid for every j
        return right[(j - end) % dr]

    def lcont(j):  # left-periodic continuation
        return left[(j - offset) % dl]

    m = _lcm(dl, dr)

    # largest suffix [h_min, inf) on which a agrees with its right continuation
    j = end - 1
    while j >= offset - m and raw(j) == rcont(j):
        j -= 1
    h_min = None if j < offset - m else j + 1

    # largest prefix (-inf, lo_max) on which a agrees with its left continuation
    j = offset
    while j <= end - 1 + m and raw(j) == lcont(j):
        j += 1
    lo_max = None if j > end - 1 + m else j

    if h_min is None or lo_max is None:
        # globally periodic; both tails describe the same sequence
        d = min(dl, dr)
        lf = tuple(rcont(j) for j in range(-d, 0))
        rt = tuple(rcont(j) for j in range(0, d))
        return lf, 0, (), rt

    if lo_max >= h_min:
        t = min(max(h_min, 0), lo_max)
        lf = tuple(raw(j) for j in range(t - dl, t))
        rt = tuple(raw(j) for j in range(t, t + dr))
        return lf, t, (), rt

    cl, ch = lo_max, h_min
    lf = tuple(raw(j) for j in range(cl - dl, cl))
    co = tuple(raw(j) for j in range(cl, ch))
    rt = tuple(raw(j) for j in range(ch, ch + dr))
    return lf, cl, co, rt


def from_window(value_at: Callable[[int], int], lo: int, hi: int,
                left_len: int, right_len: int) -> EventuallyPeriodicSeq:
    """Build a sequence from an evaluation function.

    The caller guarantees value_at is left_len-periodic below lo and
    right_len-periodic at and above hi; [lo, hi) is taken as the explicit
    core and the result is canonicalized.
    """
    left = [value_at(j) for j in range(lo - left_len, lo)]
    core = [value_at(j) for j in range(lo, hi)]
    right = [value_at(j) for j in range(hi, hi + right_len)]
    return EventuallyPeriodicSeq(left, lo, core, right)


# -- common constructors -----------------------------------------------------

def constant(v: int) -> EventuallyPeriodicSeq:
    return EventuallyPeriodicSeq([v], 0, [], [v])


def delta(j: int = 0, v: int = 1) -> EventuallyPeriodicSeq:
    """Finitely supported sequence with value v at index j, zero elsewhere."""
    return EventuallyPeriodicSeq([0], j, [v], [0])


def alternating(t: int = 1) -> EventuallyPeriodicSeq:
    """(..., t, -t, t, -t, ...) with value t at index 0."""
    return EventuallyPeriodicSeq([t, -t], 0, [], [t, -t])


ZERO = constant(0)


# -- coinvariant algebra -----------------------------------------------------

@dataclass(frozen=True)
class MembershipResult:
    member: bool
    witness: Optional[EventuallyPeriodicSeq]


@dataclass(frozen=True)
class DivisionWitness:
    """Pair (b, c) with a - n*b = (1-S)c exactly and 0 <= c_j < n."""
    b: EventuallyPeriodicSeq
    c: EventuallyPeriodicSeq


def alpha_map(a: EventuallyPeriodicSeq):
    """Split a into ((a_{2j}+a_{2j+1})_j, (-a_{2j-1}-a_{2j})_j).

    The result is (0, 0) exactly when a is alternating with a_0 = -a_1 = ...
    """
    lo = a.offset // 2 - 2
    hi = -(-a.core_end // 2) + 2
    pl = len(a.left) // gcd(2, len(a.left))
    pr = len(a.right) // gcd(2, len(a.right))
    first = from_window(lambda j: a.at(2 * j) + a.at(2 * j + 1), lo, hi, pl, pr)
    second = from_window(lambda j: -a.at(2 * j - 1) - a.at(2 * j), lo, hi, pl, pr)
    return first, second


def beta_interleave(a: EventuallyPeriodicSeq,
                    b: EventuallyPeriodicSeq) -> EventuallyPeriodicSeq:
    """Interleave: r_{2j} = a_j, r_{2j+1} = b_j."""
    def val(j):
        return a.at(j // 2) if j % 2 == 0 else b.at((j - 1) // 2)
    lo = 2 * min(a.offset, b.offset) - 2
    hi = 2 * max(a.core_end, b.core_end) + 2
    pl = 2 * _lcm(len(a.left), len(b.left))
    pr = 2 * _lcm(len(a.right), len(b.right))
    return from_window(val, lo, hi, pl, pr)


def in_image_one_minus_s(a: EventuallyPeriodicSeq) -> MembershipResult:
    """Decide a in Im(1-S) and produce a witness c with c - Sc = a.

    Any solution satisfies c_{j+1} = c_j - a_j, so c is forced up to an
    additive constant; it is bounded exactly when the drift over one tail
    period vanishes on both sides.  The witness is anchored at c_0 = 0.
    """
    if sum(a.right) != 0 or sum(a.left) != 0:
        return MembershipResult(False, None)

    def c_val(j: int) -> int:
        if j >= 0:
            return -sum(a.at(k) for k in range(0, j))
        return sum(a.at(k) for k in range(j, 0))

    witness = from_window(c_val, a.offset, a.core_end,
                          len(a.left), len(a.right))
    return MembershipResult(True, witness)


def coinv_equal(a: EventuallyPeriodicSeq, b: EventuallyPeriodicSeq) -> bool:
    """Equality of the classes of a and b in the quotient by Im(1-S)."""
    return in_image_one_minus_s(a.sub(b)).member


def divide_class(a: EventuallyPeriodicSeq, n: int) -> DivisionWitness:
    """Divide the class of a by n: find (b, c) with a - n*b = (1-S)c exactly
    and 0 <= c_j < n for all j.

    The two-sided recursion c_0 = 0, c_{j+1} = c_j - a_j + n*b_j with b_j
    chosen to keep c_{j+1} in [0, n) pins c_j = (-prefix_j) mod n, where
    prefix_j is the partial sum of a between 0 and j.  On each tail the
    prefix drifts by a fixed amount per period, so c closes up with period
    (tail period) * n / gcd(drift, n) and b = (a - (1-S)c) / n is exact.
    """
    n = int(n)
    if n < 1:
        raise ValidationError("divisor must be a positive integer")

    def prefix(j: int) -> int:
        if j >= 0:
            return sum(a.at(k) for k in range(0, j))
        return -sum(a.at(k) for k in range(j, 0))

    def c_val(j: int) -> int:
        return (-prefix(j)) % n

    drift_r = sum(a.right) % n
    drift_l = sum(a.left) % n
    pr = len(a.right) * (n // gcd(drift_r, n))
    pl = len(a.left) * (n // gcd(drift_l, n))
    c = from_window(c_val, a.offset, a.core_end, pl, pr)
    b = a.sub(c.one_minus_s()).exact_div(n)
    return DivisionWitness(b=b, c=c)
