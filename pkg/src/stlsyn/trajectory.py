"""Trajectories: piecewise-constant signals and dense ODE solutions.

Both kinds expose the same interface to the monitor: a state lookup and an
exact predicate truth set (a TimeSet).  Dense trajectories use cubic Hermite
interpolation between integration knots; predicate boundary crossings are
located by bisection to 1e-9 s.  Tangential sign dips shorter than the knot
spacing are not detected.
"""

from __future__ import annotations

import math

from .intervals import TimeInterval, TimeSet

BISECT_TOL = 1e-9


class Trajectory:
    """A state trajectory starting at t=0.

    kind 'steps':  stamps [(t_i, x_i)], state held on [t_i, t_{i+1}) and the
                   last state held forever (end_time is inf).
    kind 'dense':  segments [ (knots, u) ] with knots [(t, x, f(x,u))], each
                   segment produced under a constant control; end_time is the
                   last knot time.
    """

    def __init__(self, kind, stamps=None, segments=None):
        self.kind = kind
        if kind == "steps":
            if not stamps or stamps[0][0] != 0.0:
                raise ValueError("piecewise-constant trajectory must start at t=0")
            self.stamps = list(stamps)
            self.end_time = math.inf
        elif kind == "dense":
            if not segments:
                raise ValueError("dense trajectory needs at least one segment")
            self.segments = segments
            self.end_time = segments[-1][0][-1][0]
        else:
            raise ValueError("unknown trajectory kind %r" % kind)

    @staticmethod
    def piecewise_constant(stamps):
        """stamps: ordered [(t, x)] with t_0 = 0 and strictly increasing t."""
        for (t0, _), (t1, _) in zip(stamps, stamps[1:]):
            if t1 <= t0:
                raise ValueError("stamp times must be strictly increasing")
        return Trajectory("steps", stamps=list(stamps))

    @staticmethod
    def from_segments(segments):
        return Trajectory("dense", segments=segments)

    def state_at(self, t):
        if t < 0:
            raise ValueError("negative time")
        if self.kind == "steps":
            x = self.stamps[0][1]
            for ti, xi in self.stamps:
                if ti <= t:
                    x = xi
                else:
                    break
            return x
        if t > self.end_time:
            raise ValueError("time %g beyond trajectory end %g" % (t, self.end_time))
        for knots, _u in self.segments:
            if t <= knots[-1][0]:
                return _hermite_state(knots, t)
        return self.segments[-1][0][-1][1]

    def sample_times(self):
        if self.kind == "steps":
            return [t for t, _ in self.stamps]
        out = []
        for knots, _ in self.segments:
            for t, _x, _f in knots:
                if not out or t > out[-1]:
                    out.append(t)
        return out

    def truth_set(self, poly):
        """TimeSet over [0, end_time] (or [0, inf)) where poly(x(t)) >= 0."""
        if self.kind == "steps":
            parts = []
            for i, (ti, xi) in enumerate(self.stamps):
                if poly.eval(xi) >= 0.0:
                    hi = self.stamps[i + 1][0] if i + 1 < len(self.stamps) else math.inf
                    parts.append(TimeInterval(ti, hi, True, False))
            return TimeSet.from_unsorted(parts)
        return _dense_truth_set(self.segments, poly)


def _hermite_state(knots, t):
    lo, hi = 0, len(knots) - 1
    if t <= knots[0][0]:
        return knots[0][1]
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if knots[mid][0] <= t:
            lo = mid
        else:
            hi = mid
    t0, x0, f0 = knots[lo]
    t1, x1, f1 = knots[hi]
    if t1 == t0:
        return x1
    return hermite_eval(t0, x0, f0, t1, x1, f1, t)


def hermite_eval(t0, x0, f0, t1, x1, f1, t):
    """Cubic Hermite interpolant matching states and derivatives."""
    h = t1 - t0
    s = (t - t0) / h
    s2 = s * s
    s3 = s2 * s
    h00 = 2 * s3 - 3 * s2 + 1
    h10 = s3 - 2 * s2 + s
    h01 = -2 * s3 + 3 * s2
    h11 = s3 - s2
    return tuple(
        h00 * a + h10 * h * da + h01 * b + h11 * h * db
        for a, da, b, db in zip(x0, f0, x1, f1))


def _dense_truth_set(segments, poly):
    parts = []
    open_lo = None  # (time, lo_closed) of the currently open true-run

    def close(at, closed):
        nonlocal open_lo
        iv = TimeInterval.make(open_lo[0], at, open_lo[1], closed)
        if iv is not None:
            parts.append(iv)
        open_lo = None

    prev_t = None
    prev_val = None
    for knots, _u in segments:
        for i, (t, x, _f) in enumerate(knots):
            val = poly.eval(x)
            if prev_t is None:
                if val >= 0.0:
                    open_lo = (t, True)
            else:
                if (prev_val >= 0.0) != (val >= 0.0):
                    r = _bisect_root(knots if i > 0 else prev_knots, prev_t, t, poly,
                                     prev_val, val)
                    if val >= 0.0:
                        open_lo = (r, True)
                    else:
                        close(r, True)
            prev_t, prev_val = t, val
        prev_knots = knots
    if open_lo is not None:
        close(prev_t, True)
    return TimeSet.from_unsorted(parts)


def _bisect_root(knots, t0, t1, poly, v0, v1):
    """Bisect the sign switch of poly(x(t)) between two knot times."""
    a, b = t0, t1
    sa = v0 >= 0.0
    while b - a > BISECT_TOL:
        m = 0.5 * (a + b)
        vm = poly.eval(_hermite_state(knots, m))
        if (vm >= 0.0) == sa:
            a = m
        else:
            b = m
    return b if (v1 >= 0.0) else a
