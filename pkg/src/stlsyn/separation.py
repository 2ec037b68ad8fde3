"""Syntactic time separation of STL_nn formulas into partitioned DNF clauses.

Pipeline: negation normal form -> per-operator separation at every partition
point inside the operator's interval -> DNF distribution -> per-clause
normalization into a chain of time cells.  Each resulting clause is a
conjunction of subformulas whose temporal windows are disjoint and ordered,
padded with trivially-true cells over uncovered interior stretches.

The separation identity used for Until guards the whole evaluation prefix:

    p U<a,b> q  ==  p U<a,tau] q
                    or ( G[0,tau)(p) and F[tau,tau](p and q) )
                    or ( G[0,tau](p) and p U(tau,b> q )

The guard runs from time 0, not from a: with the closed [t, t'] clause in the
Until semantics, a witness at or after tau needs p on all of [0, tau) as
well, which a guard starting at a would miss whenever a > 0.  For a = 0 the
two versions coincide.  The first disjunct is kept in right-closed form and
the punctual disjunct retained even when redundant, which is what yields the
customary three-clause reach-avoid decomposition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .formula import (StlAnd, StlEventually, StlGlobally, StlNegUntil, StlNot,
                      StlOr, StlPred, StlTrue, StlUntil, TEMPORAL,
                      formula_horizon, is_propositional, make_and, make_not,
                      make_or, predicates_of)
from .intervals import TimeInterval, TimeSet


class SeparationError(ValueError):
    pass


class DnfBlowupError(SeparationError):
    pass


MAX_CLAUSES = 4096


@dataclass(frozen=True)
class TimePartitionSet:
    points: tuple

    def __post_init__(self):
        pts = self.points
        if not pts or pts[0] != 0.0:
            raise SeparationError("partition must start at 0")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise SeparationError("partition points must be strictly increasing")

    @staticmethod
    def of(points):
        return TimePartitionSet(tuple(float(p) for p in points))


def minimal_partition_points(f):
    """All interval endpoints of temporal operators minus the maximum,
    with 0 included."""
    ends = set()

    def walk(g):
        if isinstance(g, TEMPORAL):
            ends.add(g.interval.lo)
            ends.add(g.interval.hi)
        elif isinstance(g, StlNot):
            walk(g.child)
        elif isinstance(g, (StlAnd, StlOr)):
            for c in g.children:
                walk(c)

    walk(f)
    pts = set(ends)
    if ends:
        pts.discard(max(ends))
    pts.add(0.0)
    return TimePartitionSet.of(sorted(pts))


# --- negation normal form ---------------------------------------------------

def prop_nnf(f, neg=False):
    """Push negation down to predicates inside a propositional formula."""
    if isinstance(f, StlTrue):
        return StlNot(StlTrue()) if neg else f
    if isinstance(f, StlPred):
        return StlNot(f) if neg else f
    if isinstance(f, StlNot):
        return prop_nnf(f.child, not neg)
    if isinstance(f, StlAnd):
        kids = [prop_nnf(c, neg) for c in f.children]
        return make_or(kids) if neg else make_and(kids)
    if isinstance(f, StlOr):
        kids = [prop_nnf(c, neg) for c in f.children]
        return make_and(kids) if neg else make_or(kids)
    raise TypeError("not propositional: %r" % (f,))


def nnf(f, neg=False):
    """Negation normal form at the formula level; negation over temporal
    operators flips them (F<->G, U<->NegU)."""
    if is_propositional(f):
        return prop_nnf(f, neg)
    if isinstance(f, StlNot):
        return nnf(f.child, not neg)
    if isinstance(f, StlAnd):
        kids = [nnf(c, neg) for c in f.children]
        return make_or(kids) if neg else make_and(kids)
    if isinstance(f, StlOr):
        kids = [nnf(c, neg) for c in f.children]
        return make_and(kids) if neg else make_or(kids)
    if isinstance(f, StlEventually):
        child = prop_nnf(f.child, neg)
        return StlGlobally(f.interval, child) if neg else StlEventually(f.interval, child)
    if isinstance(f, StlGlobally):
        child = prop_nnf(f.child, neg)
        return StlEventually(f.interval, child) if neg else StlGlobally(f.interval, child)
    if isinstance(f, (StlUntil, StlNegUntil)):
        left = prop_nnf(f.left)
        right = prop_nnf(f.right)
        flip = isinstance(f, StlNegUntil) != neg
        if isinstance(left, StlTrue):
            # true U q is eventually q; its negation is globally not-q
            if flip:
                return StlGlobally(f.interval, prop_nnf(right, True))
            return StlEventually(f.interval, right)
        cls = StlNegUntil if flip else StlUntil
        return cls(f.interval, left, right)
    raise TypeError("cannot normalize %r" % (f,))


# --- single-point separation -------------------------------------------------

def _guard(kind, hi, hi_closed, child):
    """G[0,hi> over the (possibly empty) guard window, or a dual F-piece."""
    iv = TimeInterval.make(0.0, hi, True, hi_closed)
    if iv is None:
        return StlTrue() if kind == "G" else StlNot(StlTrue())
    if kind == "G":
        return StlTrue() if isinstance(child, StlTrue) else StlGlobally(iv, child)
    return StlEventually(iv, child)


def _mk_until(interval, left, right):
    if isinstance(left, StlTrue):
        return StlEventually(interval, right)
    return StlUntil(interval, left, right)


def separate_until(f, tau):
    """Time separation of one temporal operator at a single point tau.

    Accepts Until/Eventually/Globally/NegUntil nodes; tau must lie within
    [lo, hi] of the node's interval.  Returns an equivalent formula whose
    temporal pieces have windows on either side of tau.
    """
    iv = f.interval
    a, b = iv.lo, iv.hi
    if not (a <= tau <= b):
        raise SeparationError("separation point %g outside [%g, %g]" % (tau, a, b))

    if isinstance(f, StlGlobally):
        pieces = []
        left = TimeInterval.make(a, tau, iv.lo_closed, False)
        if left is not None:
            pieces.append(StlGlobally(left, f.child))
        if iv.contains(tau):
            pieces.append(StlGlobally(TimeInterval.point(tau), f.child))
        right = TimeInterval.make(tau, b, False, iv.hi_closed)
        if right is not None:
            pieces.append(StlGlobally(right, f.child))
        return make_and(pieces) if pieces else StlGlobally(iv, f.child)

    if isinstance(f, (StlUntil, StlEventually)):
        if tau == b and not iv.hi_closed:
            return f
        phi = StlTrue() if isinstance(f, StlEventually) else f.left
        phi2 = f.child if isinstance(f, StlEventually) else f.right
        disjuncts = []
        if tau > a:
            # witnesses up to tau, in merged right-closed form (open at b itself)
            left = TimeInterval.make(a, tau, iv.lo_closed, tau < b)
            if left is not None:
                disjuncts.append(_mk_until(left, phi, phi2))
        if iv.contains(tau):
            disjuncts.append(make_and([
                _guard("G", tau, False, phi),
                StlEventually(TimeInterval.point(tau), make_and([phi, phi2]))]))
        if tau < b:
            right = TimeInterval(tau, b, False, iv.hi_closed)
            disjuncts.append(make_and([_guard("G", tau, True, phi),
                                       _mk_until(right, phi, phi2)]))
        if not disjuncts:
            return f
        return make_or(disjuncts)

    if isinstance(f, StlNegUntil):
        return nnf(separate_until(StlUntil(iv, f.left, f.right), tau), neg=True)

    raise TypeError("cannot separate %r" % (f,))


# --- full partition ----------------------------------------------------------

def _expand_operator(f, points):
    """Separate one temporal node at every relevant partition point, ascending.
    Punctual operator intervals are rewritten into guard + point obligation."""
    iv = f.interval
    if iv.is_punctual:
        return separate_until(f, iv.lo) if not isinstance(f, StlGlobally) else f
    pts = [p for p in points if p > 0.0 and iv.lo <= p <= iv.hi]
    out = f
    for tau in pts:
        out = _map_temporal(out, lambda g: separate_until(g, tau)
                            if g.interval.lo <= tau <= g.interval.hi and not g.interval.is_punctual
                            else g)
    return out


def _map_temporal(f, fn):
    if isinstance(f, TEMPORAL):
        return fn(f)
    if isinstance(f, StlAnd):
        return make_and([_map_temporal(c, fn) for c in f.children])
    if isinstance(f, StlOr):
        return make_or([_map_temporal(c, fn) for c in f.children])
    return f


def _dnf(f):
    """Lists of conjoined pieces; propositional subtrees stay atomic."""
    if is_propositional(f):
        return [[f]]
    if isinstance(f, TEMPORAL):
        return [[f]]
    if isinstance(f, StlOr):
        out = []
        for c in f.children:
            out.extend(_dnf(c))
            if len(out) > MAX_CLAUSES:
                raise DnfBlowupError("more than %d DNF clauses" % MAX_CLAUSES)
        return out
    if isinstance(f, StlAnd):
        out = [[]]
        for c in f.children:
            branch = _dnf(c)
            out = [blk + add for blk in out for add in branch]
            if len(out) > MAX_CLAUSES:
                raise DnfBlowupError("more than %d DNF clauses" % MAX_CLAUSES)
        return out
    raise TypeError("cannot convert %r" % (f,))


@dataclass(frozen=True)
class Cell:
    """One time slot of a clause: all conjunct pieces sharing this window."""
    interval: TimeInterval
    pieces: tuple

    def formula(self):
        return make_and(list(self.pieces))


@dataclass(frozen=True)
class PartitionedClause:
    cells: tuple

    @property
    def conjuncts(self):
        """Aggregated (subformula, interval) pairs, one per cell."""
        return [(c.formula(), c.interval) for c in self.cells]

    @property
    def pieces(self):
        """Flat (subformula, interval) pairs, one per separated piece."""
        return [(p, c.interval) for c in self.cells for p in c.pieces]

    def key(self):
        return tuple((c.interval, c.pieces) for c in self.cells)

    def __str__(self):
        return " & ".join(_piece_text(p) for c in self.cells for p in c.pieces)


def _piece_text(p):
    from .formula import to_text
    return to_text(p)


def _window_of(piece):
    if isinstance(piece, TEMPORAL):
        return piece.interval
    return TimeInterval.point(0.0)  # bare propositional obligation holds at t=0


def _retime(piece, interval):
    """Reattach a piece to a (sub)window of its own."""
    if isinstance(piece, StlGlobally):
        return StlGlobally(interval, piece.child)
    if interval == _window_of(piece):
        return piece
    raise SeparationError("cannot retime %r to %s" % (piece, interval))


def _is_anchor(piece):
    return not isinstance(piece, StlGlobally)


def time_partition(f, partition):
    """Separate f at the given partition points and return the DNF clauses.

    `partition` may be a TimePartitionSet or an iterable of points; it must
    contain every minimal partition point of f.
    """
    if not isinstance(partition, TimePartitionSet):
        partition = TimePartitionSet.of(sorted(set(partition)))
    horizon = formula_horizon(f)
    minimal = set(minimal_partition_points(f).points)
    have = set(partition.points)
    if not minimal <= have:
        raise SeparationError(
            "partition %s is missing required minimal points %s"
            % (sorted(have), sorted(minimal - have)))
    if any(p > 0 and p >= horizon for p in partition.points):
        raise SeparationError("partition points must lie below the formula horizon")

    g = nnf(f)
    g = _map_temporal(g, lambda node: _expand_operator(node, partition.points))
    raw = _dnf(g)

    def canon(cl):
        return tuple(sorted(set(cl), key=str))

    clauses = []
    processed = set()
    queue = [canon(cl) for cl in raw]
    while queue:
        cl = queue.pop()
        if cl in processed:
            continue
        processed.add(cl)
        if len(processed) > 8 * MAX_CLAUSES:
            raise DnfBlowupError("clause normalization exceeded %d clauses" % (8 * MAX_CLAUSES))
        split = _split_offending_anchor(cl)
        if split is None:
            norm = _normalize_clause(cl)
            if norm is not None:
                clauses.append(norm)
        else:
            queue.extend(canon(c) for c in split)

    seen = set()
    unique = []
    for cl in clauses:
        k = cl.key()
        if k not in seen:
            seen.add(k)
            unique.append(cl)
    if len(unique) > MAX_CLAUSES:
        raise DnfBlowupError("more than %d DNF clauses" % MAX_CLAUSES)
    unique.sort(key=lambda c: str(c))
    return unique


def _split_offending_anchor(pieces):
    """If two anchor pieces have intersecting unequal windows, split one of
    them and return the replacement clauses; None when the clause is clean."""
    anchors = [(i, p, _window_of(p)) for i, p in enumerate(pieces) if _is_anchor(p)]
    for ai in range(len(anchors)):
        for bi in range(ai + 1, len(anchors)):
            i1, p1, w1 = anchors[ai]
            i2, p2, w2 = anchors[bi]
            if w1 == w2 or w1.intersect(w2) is None:
                continue
            # split the wider window at a boundary point the windows disagree on
            for point, target in ((w2.lo, 1), (w2.hi, 1), (w1.lo, 2), (w1.hi, 2)):
                win, idx, piece = (w1, i1, p1) if target == 1 else (w2, i2, p2)
                other = w2 if target == 1 else w1
                if win.contains(point) and not (other.contains(point) and win.is_punctual):
                    if win.is_punctual or not isinstance(piece, TEMPORAL):
                        continue
                    rewritten = separate_until(piece, point)
                    if rewritten == piece:
                        continue
                    rest = [p for j, p in enumerate(pieces) if j != idx]
                    return [tuple(rest) + tuple(extra) for extra in _dnf(rewritten)]
    return None


def _normalize_clause(pieces):
    """Group a clause's pieces into ordered disjoint time cells.

    Globally pieces of the same child are merged across abutting windows and
    re-split around the anchors; uncovered interior stretches get true-cells;
    clauses with a propositionally contradictory punctual cell are dropped
    (returns None).
    """
    anchors = {}
    g_sets = {}
    for p in set(pieces):
        if isinstance(p, StlGlobally):
            child = p.child
            g_sets[child] = g_sets.get(child, TimeSet.empty()).union(TimeSet.of(p.interval))
        else:
            anchors.setdefault(_window_of(p), []).append(p)
    for w in anchors:
        anchors[w] = sorted(set(anchors[w]), key=str)

    endpoints = {0.0}
    for w in anchors:
        endpoints.add(w.lo)
        endpoints.add(w.hi)
    for ts in g_sets.values():
        for iv in ts.parts:
            endpoints.add(iv.lo)
            endpoints.add(iv.hi)
    pts = sorted(endpoints)

    atoms = []
    for i, p in enumerate(pts):
        atoms.append(TimeInterval.point(p))
        if i + 1 < len(pts):
            iv = TimeInterval.make(p, pts[i + 1], False, False)
            if iv is not None:
                atoms.append(iv)

    def signature(atom):
        anc = tuple(w for w in sorted(anchors, key=lambda w: (w.lo, w.hi))
                    if w.intersect(atom) is not None)
        for w in anc:
            if w.intersect(atom) != atom:
                raise SeparationError("anchor window %s straddles atom %s" % (w, atom))
        gs = tuple(sorted((str(ch) for ch, ts in g_sets.items()
                           if not ts.intersect_interval(atom).is_empty)))
        return anc, gs

    cells = []
    for atom in atoms:
        sig = signature(atom)
        if cells and cells[-1][1] == sig and cells[-1][0].abuts_or_overlaps(atom):
            cells[-1] = (cells[-1][0].union_with(atom), sig)
        else:
            cells.append((atom, sig))

    while cells and not cells[-1][1][0] and not cells[-1][1][1]:
        cells.pop()
    if not cells:
        return PartitionedClause((Cell(TimeInterval.point(0.0), (StlTrue(),)),))

    out = []
    for iv, (anc_windows, g_children) in cells:
        members = []
        for w in anc_windows:
            members.extend(anchors[w])
        for ch, ts in sorted(g_sets.items(), key=lambda kv: str(kv[0])):
            if not ts.intersect_interval(iv).is_empty:
                members.append(StlGlobally(iv, ch))
        if not members:
            members = [StlTrue()]
        cell = Cell(iv, tuple(members))
        if iv.is_punctual and not _punctual_cell_satisfiable(cell):
            return None
        out.append(cell)
    return PartitionedClause(tuple(out))


def _instantaneous(piece):
    """The proposition a piece imposes at a single instant."""
    if isinstance(piece, (StlGlobally, StlEventually)):
        return piece.child
    if isinstance(piece, StlUntil):
        return make_and([piece.left, piece.right])
    if isinstance(piece, StlNegUntil):
        return prop_nnf(make_and([piece.left, piece.right]), True)
    return piece


def _punctual_cell_satisfiable(cell):
    prop = make_and([_instantaneous(p) for p in cell.pieces])
    preds = predicates_of(prop)
    if len(preds) > 16:
        return True  # satisfiability check only attempted for small supports
    names = [p.name for p in preds]
    for mask in range(1 << len(names)):
        env = {n: bool(mask >> i & 1) for i, n in enumerate(names)}
        if _eval_prop(prop, env):
            return True
    return False


def _eval_prop(f, env):
    if isinstance(f, StlTrue):
        return True
    if isinstance(f, StlPred):
        return env[f.pred.name]
    if isinstance(f, StlNot):
        return not _eval_prop(f.child, env)
    if isinstance(f, StlAnd):
        return all(_eval_prop(c, env) for c in f.children)
    if isinstance(f, StlOr):
        return any(_eval_prop(c, env) for c in f.children)
    raise TypeError("not propositional: %r" % (f,))


# --- parse tree --------------------------------------------------------------

@dataclass(frozen=True)
class TreeNode:
    formula: object
    interval: TimeInterval


@dataclass(frozen=True)
class ParseTree:
    """Star of branches from a virtual root; one branch per clause, one node
    per time cell in window order."""
    branches: tuple

    @property
    def node_count(self):
        return sum(len(b) for b in self.branches)


def build_parse_tree(clauses):
    """One branch per clause; an empty clause list (everything contradictory)
    yields the empty tree, whose automaton has empty language."""
    branches = []
    for cl in clauses:
        branches.append(tuple(TreeNode(c.formula(), c.interval) for c in cl.cells))
    return ParseTree(tuple(branches))
