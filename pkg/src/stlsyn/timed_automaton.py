"""Timed NFAs over predicate-labelled symbols.

Construction: every parse-tree node's formula is stripped to LTLf and
translated to a DFA; the node's window becomes the invariant of each DFA
state; consecutive node automata are connected by linking the parent's
accepting states to the successors of the child's initial state; the leaf
decides acceptance, with a fresh absorbing state over (t_f, inf) when the
leaf's accepting state is not absorbing.

A transition (sigma, t) from q to q' requires q' in delta(q, sigma) and
t in Inv(q').  Every accepting state of an assembled automaton is absorbing
(true self-loop), so a timed word is accepted as soon as some run of a
prefix reaches an accepting state; symbols after that point carry no
further obligations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

from .intervals import TimeInterval
from .ltlf import atoms_of, ltlf_to_dfa, strip_time


@dataclass(frozen=True)
class Guard:
    """A Boolean function of the symbol, reduced to its relevant atoms:
    `allowed` holds the accepted projections onto `atoms`."""

    atoms: tuple
    allowed: frozenset

    def accepts(self, sigma):
        return frozenset(a for a in self.atoms if a in sigma) in self.allowed

    @property
    def is_top(self):
        return not self.atoms and self.allowed

    @staticmethod
    def top():
        return Guard((), frozenset({frozenset()}))

    @staticmethod
    def from_symbols(atoms, symbols):
        """Reduce (atoms, accepted symbol set) by dropping irrelevant atoms."""
        atoms = tuple(atoms)
        allowed = {frozenset(s) & frozenset(atoms) for s in symbols}
        changed = True
        while changed:
            changed = False
            for a in atoms:
                proj = {}
                for s in allowed:
                    proj.setdefault(frozenset(s - {a}), set()).add(a in s)
                if all(len(v) == 2 for v in proj.values()):
                    atoms = tuple(x for x in atoms if x != a)
                    allowed = set(proj.keys())
                    changed = True
                    break
        return Guard(tuple(atoms), frozenset(allowed))

    def __str__(self):
        if self.is_top:
            return "true"
        if not self.allowed:
            return "false"
        terms = []
        for s in sorted(self.allowed, key=lambda s: tuple(sorted(s))):
            lits = [a if a in s else "!" + a for a in self.atoms]
            terms.append("&".join(lits) if lits else "true")
        return " | ".join(terms)


class TimedNfa:
    def __init__(self, n_states, inv, initial, accepting, edges, meta=None):
        self.n_states = n_states
        self.inv = list(inv)                  # TimeInterval per state
        self.initial = frozenset(initial)
        self.accepting = frozenset(accepting)
        self.edges = list(edges)              # (src, Guard, dst)
        self.meta = meta or {}
        self._out = None

    def out_edges(self, q):
        if self._out is None:
            self._out = {}
            for src, g, dst in self.edges:
                self._out.setdefault(src, []).append((g, dst))
        return self._out.get(q, [])

    @property
    def atoms(self):
        out = set()
        for _s, g, _d in self.edges:
            out.update(g.atoms)
        return frozenset(out)

    def has_top_self_loop(self, q):
        return any(dst == q and g.is_top for _s, g, dst in self.edges if _s == q)

    def boundary_points(self):
        pts = set()
        for iv in self.inv:
            pts.add(iv.lo)
            if not math.isinf(iv.hi):
                pts.add(iv.hi)
        return sorted(pts)

    def max_finite_bound(self):
        pts = self.boundary_points()
        return pts[-1] if pts else 0.0

    def describe(self):
        lines = ["states: %d" % self.n_states]
        for q in range(self.n_states):
            tags = []
            if q in self.initial:
                tags.append("initial")
            if q in self.accepting:
                tags.append("accepting")
            lines.append("q%d inv=%s %s" % (q, self.inv[q], " ".join(tags)))
        for src, g, dst in sorted(self.edges, key=lambda e: (e[0], e[2], str(e[1]))):
            lines.append("q%d --[%s]--> q%d" % (src, g, dst))
        return "\n".join(lines)


def to_timed_dfa(dfa, interval):
    """Attach `interval` as the invariant of every DFA state."""
    edges = []
    grouped = {}
    for (q, sigma), q2 in dfa.transitions.items():
        grouped.setdefault((q, q2), set()).add(sigma)
    for (q, q2), symbols in sorted(grouped.items()):
        edges.append((q, Guard.from_symbols(dfa.atoms, symbols), q2))
    return TimedNfa(dfa.n_states, [interval] * dfa.n_states, {dfa.initial},
                    dfa.accepting, edges)


def connect_branch(parent, child):
    """Link parent accepting states to the successors of the child's initial
    state; acceptance moves to the child."""
    off = parent.n_states
    inv = parent.inv + child.inv
    edges = list(parent.edges)
    for src, g, dst in child.edges:
        edges.append((src + off, g, dst + off))
    child_init = next(iter(child.initial))
    for qf in parent.accepting:
        for src, g, dst in child.edges:
            if src == child_init:
                edges.append((qf, g, dst + off))
    accepting = {q + off for q in child.accepting}
    return TimedNfa(parent.n_states + child.n_states, inv, parent.initial,
                    accepting, edges)


def finalize_accepting(ta, leaf_interval):
    """Make acceptance absorbing: non-absorbing accepting states hand off to
    a fresh absorbing accepting state with invariant (t_f, inf)."""
    if not ta.accepting:
        ta.meta["unsatisfiable"] = True
        return ta
    absorbing = {q for q in ta.accepting if ta.has_top_self_loop(q)}
    pending = sorted(ta.accepting - absorbing)
    if not pending:
        return ta
    t_f = leaf_interval.hi
    fresh = ta.n_states
    # the tail opens exactly where the leaf window ends
    inv = ta.inv + [TimeInterval(t_f, math.inf, not leaf_interval.hi_closed, False)]
    edges = list(ta.edges)
    for q in pending:
        edges.append((q, Guard.top(), fresh))
    edges.append((fresh, Guard.top(), fresh))
    return TimedNfa(fresh + 1, inv, ta.initial, absorbing | {fresh}, edges,
                    dict(ta.meta))


def branch_automaton(branch):
    """Timed NFA of one parse-tree branch (chain of nodes)."""
    ta = None
    for node in branch:
        dfa = ltlf_to_dfa(strip_time((node.formula, node.interval)))
        nta = to_timed_dfa(dfa, node.interval)
        if dfa.language_empty:
            nta.meta["unsatisfiable"] = True
        ta = nta if ta is None else connect_branch(ta, nta)
        if nta.meta.get("unsatisfiable"):
            ta.meta["unsatisfiable"] = True
    return finalize_accepting(ta, branch[-1].interval)


def assemble(tree):
    """Union of all branch automata sharing one virtual initial set."""
    if not tree.branches:
        ta = TimedNfa(1, [TimeInterval(0.0, math.inf, True, False)], {0}, set(),
                      [(0, Guard.top(), 0)], {"branches": 0, "state_branch": [0]})
        ta.meta["warnings"] = ["formula is unsatisfiable: no clauses survive"]
        return ta
    parts = [branch_automaton(b) for b in tree.branches]
    n = 0
    inv = []
    initial = set()
    accepting = set()
    edges = []
    state_branch = []
    warnings = []
    for bi, part in enumerate(parts):
        for q in range(part.n_states):
            state_branch.append(bi)
        inv.extend(part.inv)
        initial.update(q + n for q in part.initial)
        accepting.update(q + n for q in part.accepting)
        edges.extend((s + n, g, d + n) for s, g, d in part.edges)
        if part.meta.get("unsatisfiable"):
            warnings.append("branch %d has empty language" % bi)
        n += part.n_states
    ta = TimedNfa(n, inv, initial, accepting, edges,
                  {"branches": len(parts), "state_branch": state_branch})
    if warnings:
        ta.meta["warnings"] = warnings
    return ta


def accepts_timed_word(ta, word):
    """Subset simulation; accepts as soon as some run reaches an accepting
    state (all accepting states are absorbing by construction)."""
    current = set(ta.initial)
    if current & ta.accepting:
        return True
    for sigma, t in word:
        sigma = frozenset(sigma)
        nxt = set()
        for q in current:
            for g, q2 in ta.out_edges(q):
                if q2 not in nxt and g.accepts(sigma) and ta.inv[q2].contains(t):
                    nxt.add(q2)
        if nxt & ta.accepting:
            return True
        if not nxt:
            return False
        current = nxt
    return False


def saturate_word(ta, word):
    """Make a timed word dense enough for run-based acceptance to coincide
    with the semantics of the signal it describes.

    The word's signal is constant between stamps; for every automaton window
    (state invariant) and every maximal constant segment of the signal, the
    overlap must contain a stamp, otherwise a run has no transition to
    witness that stretch.  Inserted stamps reuse the segment's label, so the
    signal itself is unchanged."""
    if not word or word[0][1] != 0.0:
        raise ValueError("timed words start with a stamp at t=0")
    segments = []
    for i, (sigma, t) in enumerate(word):
        hi = word[i + 1][1] if i + 1 < len(word) else math.inf
        iv = TimeInterval.make(t, hi, True, False)
        if iv is not None:
            segments.append((iv, sigma))

    windows = list(ta.inv)
    t_f = ta.max_finite_bound()
    windows.append(TimeInterval(t_f, math.inf, False, False))

    times = sorted(t for _s, t in word)
    extra = []
    for w in windows:
        for seg, sigma in segments:
            o = w.intersect(seg)
            if o is None:
                continue
            if any(o.contains(t) for t in times):
                continue
            if o.lo_closed:
                t = o.lo
            elif math.isinf(o.hi):
                t = o.lo + 1.0
            else:
                t = o.lo + 0.5 * (o.hi - o.lo)
            extra.append((sigma, t))
    out = sorted(word + extra, key=lambda st: st[1])
    return out


def word_of_region_labels(stamps):
    """[(label frozenset, t)] convenience constructor with validation."""
    word = [(frozenset(s), float(t)) for s, t in stamps]
    for (_, t0), (_, t1) in zip(word, word[1:]):
        if t1 < t0:
            raise ValueError("timed word stamps must be non-decreasing")
    return word


def guard_symbol_set(guard, alphabet_atoms):
    """All full-alphabet symbols a guard accepts (for tests/dumps)."""
    syms = []
    atoms = sorted(alphabet_atoms)
    for r in range(len(atoms) + 1):
        for combo in combinations(atoms, r):
            s = frozenset(combo)
            if guard.accepts(s):
                syms.append(s)
    return syms


def isomorphic(ta1, ta2, alphabet=None):
    """Graph isomorphism preserving initial/accepting/invariants and guard
    semantics over the given (or union) alphabet.  Exponential; test-sized
    automata only."""
    if ta1.n_states != ta2.n_states:
        return False
    atoms = sorted(set(alphabet or (ta1.atoms | ta2.atoms)))
    symbols = [frozenset(c) for r in range(len(atoms) + 1)
               for c in combinations(atoms, r)]

    def profile(ta):
        prof = []
        for q in range(ta.n_states):
            moves = {}
            for s in symbols:
                dests = frozenset(d for g, d in ta.out_edges(q) if g.accepts(s))
                moves[s] = dests
            prof.append(moves)
        return prof

    p1, p2 = profile(ta1), profile(ta2)

    def sig(ta, prof, q):
        return (q in ta.initial, q in ta.accepting, str(ta.inv[q]),
                tuple(sorted((tuple(sorted(map(tuple, s))), len(d))
                             for s, d in prof[q].items())))

    sig1 = [sig(ta1, p1, q) for q in range(ta1.n_states)]
    sig2 = [sig(ta2, p2, q) for q in range(ta2.n_states)]
    if sorted(sig1) != sorted(sig2):
        return False

    mapping = {}
    used = set()

    def extend(q):
        if q == ta1.n_states:
            return True
        for r in range(ta2.n_states):
            if r in used or sig1[q] != sig2[r]:
                continue
            ok = True
            for s in symbols:
                d1 = p1[q][s]
                d2 = p2[r][s]
                if len(d1) != len(d2):
                    ok = False
                    break
                for d in d1:
                    if d in mapping and mapping[d] not in d2:
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                mapping[q] = r
                used.add(r)
                if extend(q + 1):
                    return True
                del mapping[q]
                used.remove(r)
        return False

    return extend(0)
