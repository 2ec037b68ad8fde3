"""Exact STL_nn monitor over trajectories.

Evaluation is three-valued internally: a trajectory that ends before the
formula horizon may leave the verdict undetermined, in which case
stl_satisfies raises TrajectoryTooShortError instead of guessing.
Piecewise-constant trajectories hold their last state forever and are always
determined.
"""

from __future__ import annotations

import math

from .formula import (StlAnd, StlEventually, StlGlobally, StlNegUntil, StlNot,
                      StlOr, StlPred, StlTrue, StlUntil)
from .intervals import TimeInterval, TimeSet

TRUE, FALSE, UNKNOWN = 1, 0, -1


class TrajectoryTooShortError(ValueError):
    pass


def stl_satisfies(traj, f, t=0.0):
    """Boolean satisfaction of formula f by trajectory traj at time t."""
    v = _eval3(_MonitorCtx(traj), f, t)
    if v == UNKNOWN:
        raise TrajectoryTooShortError(
            "trajectory (end %g) too short to decide the formula at t=%g"
            % (traj.end_time, t))
    return v == TRUE


class _MonitorCtx:
    def __init__(self, traj):
        self.traj = traj
        self.end = traj.end_time
        self._sets = {}

    def prop_set(self, f):
        """Truth TimeSet of a propositional formula over the covered domain."""
        got = self._sets.get(f)
        if got is None:
            got = self._compute(f)
            self._sets[f] = got
        return got

    def _compute(self, f):
        if isinstance(f, StlTrue):
            return TimeSet.of(self._domain())
        if isinstance(f, StlPred):
            return self.traj.truth_set(f.pred.poly)
        if isinstance(f, StlNot):
            comp = self.prop_set(f.child).complement()
            return comp.intersect(TimeSet.of(self._domain()))
        if isinstance(f, StlAnd):
            out = self.prop_set(f.children[0])
            for c in f.children[1:]:
                out = out.intersect(self.prop_set(c))
            return out
        if isinstance(f, StlOr):
            out = self.prop_set(f.children[0])
            for c in f.children[1:]:
                out = out.union(self.prop_set(c))
            return out
        raise TypeError("not a propositional formula: %r" % (f,))

    def _domain(self):
        if math.isinf(self.end):
            return TimeInterval(0.0, math.inf, True, False)
        return TimeInterval(0.0, self.end, True, True)


def _not3(v):
    return UNKNOWN if v == UNKNOWN else (TRUE if v == FALSE else FALSE)


def _eval3(ctx, f, t):
    if isinstance(f, StlTrue):
        return TRUE
    if isinstance(f, StlNot):
        return _not3(_eval3(ctx, f.child, t))
    if isinstance(f, StlAnd):
        out = TRUE
        for c in f.children:
            v = _eval3(ctx, c, t)
            if v == FALSE:
                return FALSE
            if v == UNKNOWN:
                out = UNKNOWN
        return out
    if isinstance(f, StlOr):
        out = FALSE
        for c in f.children:
            v = _eval3(ctx, c, t)
            if v == TRUE:
                return TRUE
            if v == UNKNOWN:
                out = UNKNOWN
        return out
    if isinstance(f, StlPred):
        if t > ctx.end:
            return UNKNOWN
        return TRUE if ctx.prop_set(f).contains(t) else FALSE
    if isinstance(f, StlEventually):
        return _eval_until(ctx, StlTrue(), f.child, f.interval, t)
    if isinstance(f, StlGlobally):
        return _not3(_eval_until(ctx, StlTrue(), StlNot(f.child), f.interval, t))
    if isinstance(f, StlUntil):
        return _eval_until(ctx, f.left, f.right, f.interval, t)
    if isinstance(f, StlNegUntil):
        return _not3(_eval_until(ctx, f.left, f.right, f.interval, t))
    raise TypeError("cannot evaluate %r" % (f,))


def _eval_until(ctx, left, right, interval, t):
    """Until semantics: exists t' in <t+a, t+b> with right(t') and
    left holding on all of [t, t']."""
    if t > ctx.end:
        return UNKNOWN
    window = interval.shift(t)
    a_set = ctx.prop_set(left)
    b_set = ctx.prop_set(right)

    if not a_set.contains(t):
        # t itself is in [t, t'] for every witness, so left must hold now
        return FALSE
    comp_a = a_set.complement().intersect(TimeSet.of(ctx._domain()))
    e, attained = comp_a.first_point_at_or_after(t)
    if e is None:
        wit_hi = ctx.end
        wit_hi_closed = not math.isinf(ctx.end)
        prefix_unbroken = True
    else:
        wit_hi, wit_hi_closed = e, not attained
        prefix_unbroken = False
    wit = TimeInterval.make(t, wit_hi, True, wit_hi_closed)
    if wit is not None:
        found = b_set.intersect_interval(window).intersect_interval(wit)
        if not found.is_empty:
            return TRUE
    if window.hi > ctx.end and prefix_unbroken:
        return UNKNOWN
    return FALSE
