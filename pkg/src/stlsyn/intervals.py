"""Time intervals with open/closed endpoints, and finite unions of them.

Endpoint comparisons are exact float comparisons throughout; callers that
need boundary times to coincide (e.g. the planner) must produce them as the
same float values that appear in the specification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class TimeInterval:
    """A nonempty interval <lo, hi> over the nonnegative time axis.

    lo_closed/hi_closed select '[' vs '(' and ']' vs ')'.  hi may be
    math.inf, in which case hi_closed must be False.
    """

    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        if self.lo < 0:
            raise ValueError("interval starts before time 0: %r" % (self,))
        if self.lo > self.hi:
            raise ValueError("interval with lo > hi: %r" % (self,))
        if self.lo == self.hi and not (self.lo_closed and self.hi_closed):
            raise ValueError("empty punctual interval: %r" % (self,))
        if math.isinf(self.hi) and self.hi_closed:
            raise ValueError("closed endpoint at infinity: %r" % (self,))

    @staticmethod
    def make(lo, hi, lo_closed=True, hi_closed=True):
        """Build an interval, returning None when the description is empty."""
        if lo > hi:
            return None
        if lo == hi and not (lo_closed and hi_closed):
            return None
        return TimeInterval(lo, hi, lo_closed, hi_closed)

    @staticmethod
    def point(t):
        return TimeInterval(t, t, True, True)

    @property
    def is_punctual(self):
        return self.lo == self.hi

    @property
    def duration(self):
        return self.hi - self.lo

    def contains(self, t):
        if t < self.lo or (t == self.lo and not self.lo_closed):
            return False
        if t > self.hi or (t == self.hi and not self.hi_closed):
            return False
        return True

    def shift(self, dt):
        return TimeInterval(self.lo + dt, self.hi + dt, self.lo_closed, self.hi_closed)

    def intersect(self, other):
        """Intersection with another interval, or None when disjoint."""
        if self.lo > other.lo or (self.lo == other.lo and not self.lo_closed):
            lo, lc = self.lo, self.lo_closed
        else:
            lo, lc = other.lo, other.lo_closed
        if self.hi < other.hi or (self.hi == other.hi and not self.hi_closed):
            hi, hc = self.hi, self.hi_closed
        else:
            hi, hc = other.hi, other.hi_closed
        return TimeInterval.make(lo, hi, lc, hc)

    def abuts_or_overlaps(self, other):
        """True when union with `other` is a single interval."""
        lo, hi = (self, other) if (self.lo, not self.lo_closed) <= (other.lo, not other.lo_closed) else (other, self)
        if hi.lo < lo.hi:
            return True
        if hi.lo == lo.hi:
            return lo.hi_closed or hi.lo_closed
        return False

    def union_with(self, other):
        """Union with an overlapping/abutting interval (single interval)."""
        if not self.abuts_or_overlaps(other):
            raise ValueError("union of disjoint intervals is not an interval")
        if self.lo < other.lo or (self.lo == other.lo and self.lo_closed):
            lo, lc = self.lo, self.lo_closed
        else:
            lo, lc = other.lo, other.lo_closed
        if self.hi > other.hi or (self.hi == other.hi and self.hi_closed):
            hi, hc = self.hi, self.hi_closed
        else:
            hi, hc = other.hi, other.hi_closed
        return TimeInterval(lo, hi, lc, hc)

    def strictly_before(self, other):
        """True when every point of self precedes every point of other."""
        if self.hi < other.lo:
            return True
        if self.hi == other.lo:
            return not (self.hi_closed and other.lo_closed)
        return False

    def __str__(self):
        lb = "[" if self.lo_closed else "("
        rb = "]" if self.hi_closed else ")"
        hi = "inf" if math.isinf(self.hi) else fmt_num(self.hi)
        return "%s%s,%s%s" % (lb, fmt_num(self.lo), hi, rb)


def fmt_num(x):
    """Compact float rendering: 6.0 -> '6', 0.5 -> '0.5'."""
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


class TimeSet:
    """A finite union of disjoint, sorted TimeIntervals (a Boolean signal)."""

    __slots__ = ("parts",)

    def __init__(self, parts=()):
        self.parts = tuple(parts)

    @staticmethod
    def empty():
        return TimeSet(())

    @staticmethod
    def of(*intervals):
        return TimeSet.from_unsorted([iv for iv in intervals if iv is not None])

    @staticmethod
    def from_unsorted(intervals):
        ivs = sorted(intervals, key=lambda iv: (iv.lo, not iv.lo_closed))
        merged = []
        for iv in ivs:
            if merged and merged[-1].abuts_or_overlaps(iv):
                merged[-1] = merged[-1].union_with(iv)
            else:
                merged.append(iv)
        return TimeSet(merged)

    @property
    def is_empty(self):
        return not self.parts

    def contains(self, t):
        return any(p.contains(t) for p in self.parts)

    def intersect(self, other):
        out = []
        for a in self.parts:
            for b in other.parts:
                c = a.intersect(b)
                if c is not None:
                    out.append(c)
        return TimeSet(sorted(out, key=lambda iv: (iv.lo, not iv.lo_closed)))

    def intersect_interval(self, iv):
        return self.intersect(TimeSet((iv,)))

    def union(self, other):
        return TimeSet.from_unsorted(list(self.parts) + list(other.parts))

    def complement(self, upto=math.inf):
        """Complement within [0, upto)."""
        out = []
        cur_lo, cur_lc = 0.0, True
        for p in self.parts:
            iv = TimeInterval.make(cur_lo, p.lo, cur_lc, not p.lo_closed)
            if iv is not None:
                out.append(iv)
            cur_lo, cur_lc = p.hi, not p.hi_closed
            if math.isinf(cur_lo):
                return TimeSet(out)
        tail = TimeInterval.make(cur_lo, upto, cur_lc, False)
        if tail is not None:
            out.append(tail)
        return TimeSet(out)

    def first_point_at_or_after(self, t):
        """(time, attained) of the infimum of the set restricted to [t, inf).

        Returns (None, False) when the restriction is empty; `attained` tells
        whether the infimum itself belongs to the set.
        """
        for p in self.parts:
            if p.hi < t or (p.hi == t and not p.hi_closed):
                continue
            if p.contains(t):
                return t, True
            if p.lo >= t:
                return p.lo, p.lo_closed
        return None, False

    def __eq__(self, other):
        return isinstance(other, TimeSet) and self.parts == other.parts

    def __hash__(self):
        return hash(self.parts)

    def __str__(self):
        if not self.parts:
            return "{}"
        return " u ".join(str(p) for p in self.parts)
