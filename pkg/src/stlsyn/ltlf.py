"""LTLf over finite words: syntax, direct evaluation, and DFA translation.

Symbols are truth assignments over a set of named atoms, represented as
frozensets of the atoms that hold.  Translation goes by formula progression:
states are progressed formulas (canonicalized), which is already
deterministic, followed by Moore minimization and removal of dead states.

Empty-word convention: eps satisfies G(phi) and not F(phi); an atom is not
satisfied by eps and its negation is (there is no position to witness it).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .formula import (StlAnd, StlEventually, StlGlobally, StlNegUntil, StlNot,
                      StlOr, StlPred, StlTrue, StlUntil)


@dataclass(frozen=True)
class LTrue:
    pass


@dataclass(frozen=True)
class LFalse:
    pass


@dataclass(frozen=True)
class LAtom:
    name: str


@dataclass(frozen=True)
class LNot:
    child: object


@dataclass(frozen=True)
class LAnd:
    children: tuple


@dataclass(frozen=True)
class LOr:
    children: tuple


@dataclass(frozen=True)
class LNext:
    child: object


@dataclass(frozen=True)
class LNotEnd:
    """Holds iff at least one position remains (strong-next helper)."""


@dataclass(frozen=True)
class LUntil:
    left: object
    right: object


@dataclass(frozen=True)
class LEventually:
    child: object


@dataclass(frozen=True)
class LGlobally:
    child: object


def land(children):
    flat = []
    for c in children:
        if isinstance(c, LFalse):
            return LFalse()
        if isinstance(c, LTrue):
            continue
        if isinstance(c, LAnd):
            flat.extend(c.children)
        else:
            flat.append(c)
    flat = sorted(set(flat), key=repr)
    if not flat:
        return LTrue()
    if len(flat) == 1:
        return flat[0]
    return LAnd(tuple(flat))


def lor(children):
    flat = []
    for c in children:
        if isinstance(c, LTrue):
            return LTrue()
        if isinstance(c, LFalse):
            continue
        if isinstance(c, LOr):
            flat.extend(c.children)
        else:
            flat.append(c)
    flat = sorted(set(flat), key=repr)
    if not flat:
        return LFalse()
    if len(flat) == 1:
        return flat[0]
    return LOr(tuple(flat))


def lnot(f):
    if isinstance(f, LTrue):
        return LFalse()
    if isinstance(f, LFalse):
        return LTrue()
    if isinstance(f, LNot):
        return f.child
    return LNot(f)


def atoms_of(f):
    out = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, LAtom):
            out.add(g.name)
        elif isinstance(g, (LNot, LNext, LEventually, LGlobally)):
            stack.append(g.child)
        elif isinstance(g, (LAnd, LOr)):
            stack.extend(g.children)
        elif isinstance(g, LUntil):
            stack.append(g.left)
            stack.append(g.right)
    return frozenset(out)


def strip_time(conjunct):
    """Erase the time window of an interval-aligned STL conjunct, mapping
    predicates to atoms.  Until keeps its left operand alive at the witness
    (matching the closed [t, t'] clause of the timed semantics)."""
    f, _interval = conjunct
    return _strip(f)


def _strip(f):
    if isinstance(f, StlTrue):
        return LTrue()
    if isinstance(f, StlPred):
        return LAtom(f.pred.name)
    if isinstance(f, StlNot):
        return lnot(_strip(f.child))
    if isinstance(f, StlAnd):
        return land([_strip(c) for c in f.children])
    if isinstance(f, StlOr):
        return lor([_strip(c) for c in f.children])
    if isinstance(f, StlEventually):
        return LEventually(_strip(f.child))
    if isinstance(f, StlGlobally):
        return LGlobally(_strip(f.child))
    if isinstance(f, StlUntil):
        left = _strip(f.left)
        return LUntil(left, land([left, _strip(f.right)]))
    if isinstance(f, StlNegUntil):
        left = _strip(f.left)
        return lnot(LUntil(left, land([left, _strip(f.right)])))
    raise TypeError("cannot strip %r" % (f,))


def ltlf_eval(word, f, i=0):
    """Direct recursive semantics over a finite word (list of frozensets)."""
    n = len(word)
    if isinstance(f, LTrue):
        return True
    if isinstance(f, LFalse):
        return False
    if isinstance(f, LAtom):
        return i < n and f.name in word[i]
    if isinstance(f, LNot):
        return not ltlf_eval(word, f.child, i)
    if isinstance(f, LAnd):
        return all(ltlf_eval(word, c, i) for c in f.children)
    if isinstance(f, LOr):
        return any(ltlf_eval(word, c, i) for c in f.children)
    if isinstance(f, LNext):
        return i + 1 < n and ltlf_eval(word, f.child, i + 1)
    if isinstance(f, LNotEnd):
        return i < n
    if isinstance(f, LUntil):
        for j in range(i, n):
            if ltlf_eval(word, f.right, j):
                return all(ltlf_eval(word, f.left, k) for k in range(i, j))
        return False
    if isinstance(f, LEventually):
        return any(ltlf_eval(word, f.child, j) for j in range(i, n))
    if isinstance(f, LGlobally):
        return all(ltlf_eval(word, f.child, j) for j in range(i, n))
    raise TypeError("cannot evaluate %r" % (f,))


def _progress(f, sigma):
    if isinstance(f, (LTrue, LFalse)):
        return f
    if isinstance(f, LAtom):
        return LTrue() if f.name in sigma else LFalse()
    if isinstance(f, LNot):
        return lnot(_progress(f.child, sigma))
    if isinstance(f, LAnd):
        return land([_progress(c, sigma) for c in f.children])
    if isinstance(f, LOr):
        return lor([_progress(c, sigma) for c in f.children])
    if isinstance(f, LNext):
        return land([f.child, LNotEnd()])
    if isinstance(f, LNotEnd):
        return LTrue()
    if isinstance(f, LUntil):
        return lor([_progress(f.right, sigma), land([_progress(f.left, sigma), f])])
    if isinstance(f, LEventually):
        return lor([_progress(f.child, sigma), f])
    if isinstance(f, LGlobally):
        return land([_progress(f.child, sigma), f])
    raise TypeError("cannot progress %r" % (f,))


def _empty_accepts(f):
    if isinstance(f, LTrue):
        return True
    if isinstance(f, (LFalse, LAtom, LNext, LNotEnd, LUntil, LEventually)):
        return False
    if isinstance(f, LNot):
        return not _empty_accepts(f.child)
    if isinstance(f, LAnd):
        return all(_empty_accepts(c) for c in f.children)
    if isinstance(f, LOr):
        return any(_empty_accepts(c) for c in f.children)
    if isinstance(f, LGlobally):
        return True
    raise TypeError("cannot end-evaluate %r" % (f,))


class Dfa:
    """Deterministic automaton over assignments of `atoms`.

    Transitions are partial: a missing entry means the word is rejected
    (edges into the all-rejecting sink are pruned away).
    """

    def __init__(self, atoms, n_states, initial, transitions, accepting):
        self.atoms = tuple(atoms)
        self.n_states = n_states
        self.initial = initial
        self.transitions = transitions  # dict (state, frozenset) -> state
        self.accepting = frozenset(accepting)

    def symbols(self):
        out = []
        for r in range(len(self.atoms) + 1):
            for combo in combinations(self.atoms, r):
                out.append(frozenset(combo))
        return out

    def step(self, state, sigma):
        return self.transitions.get((state, frozenset(sigma) & frozenset(self.atoms)))

    def accepts(self, word):
        q = self.initial
        for sigma in word:
            q = self.step(q, sigma)
            if q is None:
                return False
        return q in self.accepting

    @property
    def language_empty(self):
        return not self.accepting

    def successors(self, state):
        out = {}
        for (q, sigma), q2 in self.transitions.items():
            if q == state:
                out.setdefault(q2, set()).add(sigma)
        return out


def _elements_of(f, out):
    """Top Boolean skeleton stops at atoms and temporal nodes (elements)."""
    if isinstance(f, (LTrue, LFalse)):
        return
    if isinstance(f, (LAtom, LNext, LNotEnd, LUntil, LEventually, LGlobally)):
        out.add(f)
        return
    if isinstance(f, LNot):
        _elements_of(f.child, out)
        return
    if isinstance(f, (LAnd, LOr)):
        for c in f.children:
            _elements_of(c, out)
        return
    raise TypeError("unexpected formula %r" % (f,))


def _bool_eval(f, env):
    if isinstance(f, LTrue):
        return True
    if isinstance(f, LFalse):
        return False
    if f in env:
        return env[f]
    if isinstance(f, LNot):
        return not _bool_eval(f.child, env)
    if isinstance(f, LAnd):
        return all(_bool_eval(c, env) for c in f.children)
    if isinstance(f, LOr):
        return any(_bool_eval(c, env) for c in f.children)
    raise TypeError("unexpected formula %r" % (f,))


def _state_key(f):
    """Canonical key: residuals that are Boolean-equivalent over their
    temporal/atomic elements collapse to one progression state."""
    elems = set()
    _elements_of(f, elems)
    elems = sorted(elems, key=repr)
    if len(elems) > 20:
        raise RuntimeError("progression closure too large (%d elements)" % len(elems))
    mask = 0
    relevant = [False] * len(elems)
    for bits in range(1 << len(elems)):
        env = {e: bool(bits >> i & 1) for i, e in enumerate(elems)}
        if _bool_eval(f, env):
            mask |= 1 << bits
    for i in range(len(elems)):
        for bits in range(1 << len(elems)):
            if not bits >> i & 1:
                lo = mask >> bits & 1
                hi = mask >> (bits | 1 << i) & 1
                if lo != hi:
                    relevant[i] = True
                    break
    kept = [e for i, e in enumerate(elems) if relevant[i]]
    if len(kept) != len(elems):
        # re-project the table onto the relevant elements
        sub = 0
        for bits in range(1 << len(kept)):
            full = 0
            j = 0
            for i, e in enumerate(elems):
                if relevant[i]:
                    if bits >> j & 1:
                        full |= 1 << i
                    j += 1
            if mask >> full & 1:
                sub |= 1 << bits
        mask = sub
    return tuple(repr(e) for e in kept), mask


def ltlf_to_dfa(f):
    """Translate an LTLf formula to its minimal partial DFA."""
    atoms = sorted(atoms_of(f))
    symbols = []
    for r in range(len(atoms) + 1):
        for combo in combinations(atoms, r):
            symbols.append(frozenset(combo))
    symbols.sort(key=lambda s: tuple(sorted(s)))

    key0 = _state_key(f)
    index = {key0: 0}
    rep = [f]
    transitions = {}
    frontier = [0]
    while frontier:
        qi = frontier.pop(0)
        g = rep[qi]
        for sigma in symbols:
            h = _progress(g, sigma)
            key = _state_key(h)
            if key not in index:
                if len(index) > 4096:
                    raise RuntimeError("progression state explosion")
                index[key] = len(rep)
                rep.append(h)
                frontier.append(index[key])
            transitions[(qi, sigma)] = index[key]
    accepting = {i for i, g in enumerate(rep) if _empty_accepts(g)}
    dfa = Dfa(atoms, len(rep), 0, transitions, accepting)
    return minimize_dfa(dfa)


def minimize_dfa(dfa):
    """Moore partition refinement, then prune states that cannot reach an
    accepting state, then relabel in BFS order for a canonical result."""
    symbols = dfa.symbols()
    sink = dfa.n_states  # implicit dead state for missing transitions

    def step_total(q, sigma):
        if q == sink:
            return sink
        return dfa.transitions.get((q, sigma), sink)

    states = list(range(dfa.n_states)) + [sink]
    block = {q: (1 if q in dfa.accepting else 0) for q in states}
    while True:
        sig = {}
        for q in states:
            sig[q] = (block[q],) + tuple(block[step_total(q, s)] for s in symbols)
        mapping = {}
        for q in states:
            mapping.setdefault(sig[q], len(mapping))
        new_block = {q: mapping[sig[q]] for q in states}
        if new_block == block:
            break
        block = new_block

    # canonical BFS relabel from the initial block, skipping dead blocks
    co_reach = _co_reachable(dfa, symbols, sink, step_total)
    init_block = block[dfa.initial]
    rep = {}
    for q in states:
        rep.setdefault(block[q], q)
    order = [init_block]
    seen = {init_block}
    new_id = {}
    transitions = {}
    accepting = set()
    pos = 0
    while pos < len(order):
        b = order[pos]
        pos += 1
        q = rep[b]
        if q == sink or q not in co_reach:
            continue
        if b not in new_id:
            new_id[b] = len(new_id)
        if q in dfa.accepting:
            accepting.add(new_id[b])
        for sigma in symbols:
            q2 = step_total(q, sigma)
            if q2 == sink or q2 not in co_reach:
                continue
            b2 = block[q2]
            if b2 not in seen:
                seen.add(b2)
                order.append(b2)
            transitions[(b, sigma)] = b2
    remapped = {(new_id[a], s): new_id[block[rep[b]]]
                for (a, s), b in transitions.items()}
    if not new_id:  # empty language: keep the bare initial state
        return Dfa(dfa.atoms, 1, 0, {}, set())
    return Dfa(dfa.atoms, len(new_id), 0, remapped, accepting)


def _co_reachable(dfa, symbols, sink, step_total):
    rev = {}
    for (q, sigma), q2 in dfa.transitions.items():
        rev.setdefault(q2, set()).add(q)
    frontier = list(dfa.accepting)
    seen = set(frontier)
    while frontier:
        q = frontier.pop()
        for p in rev.get(q, ()):
            if p not in seen:
                seen.add(p)
                frontier.append(p)
    return seen
