"""Product of the timed automaton with the abstraction graph, and the
weighted lead search over it.

A product state is a pair z = (q, d).  Moves follow the region adjacency and
the automaton transition on the source region's label:

    (q', d') in delta_p(q, d)  iff  (d, d') in E  and  q' in delta(q, L(d)).

High-level state weights follow the coverage/selection scheme

    w(q, d) = (cov + 1) * vol(d) * duration(q) / (distacc(q) * (numsel + 1)^2)

with distacc counted as 1 + hop count so accepting states stay well-defined
and maximally attractive; edge weights for the shortest-path search are
1 / (w(z1) * w(z2)).  Stats are mutated by the planner between searches.
"""

from __future__ import annotations

import heapq
import math


class NoLeadError(RuntimeError):
    pass


class ProductAutomaton:
    def __init__(self, ta, graph, t_max=60.0):
        self.ta = ta
        self.graph = graph
        self.t_max = float(t_max)
        self.cov = {}
        self.numsel = {}
        self._succ_q = {}      # (q, label) -> tuple of q'
        self._succ = {}        # (q, d) -> tuple of (q', d')
        self._dist_acc = dist_from_acc(ta)
        self._durations = [self._duration(q) for q in range(ta.n_states)]

    # -- structure ---------------------------------------------------------

    def automaton_moves(self, q, label):
        key = (q, label)
        got = self._succ_q.get(key)
        if got is None:
            got = tuple(sorted(dst for g, dst in self.ta.out_edges(q) if g.accepts(label)))
            self._succ_q[key] = got
        return got

    def successors(self, z):
        got = self._succ.get(z)
        if got is None:
            q, d = z
            label = self.graph.regions[d].label
            qs = self.automaton_moves(q, label)
            out = []
            for d2 in self.graph.neighbors(d):
                for q2 in qs:
                    out.append((q2, d2))
            got = tuple(sorted(out))
            self._succ[z] = got
        return got

    def dwell_moves(self, z, t):
        """Automaton advances available while staying in the same region,
        filtered by the target invariant at time t (planner-side relation,
        not part of delta_p)."""
        q, d = z
        label = self.graph.regions[d].label
        return [(q2, d) for q2 in self.automaton_moves(q, label)
                if self.ta.inv[q2].contains(t)]

    def is_accepting(self, z):
        return z[0] in self.ta.accepting

    def initial_states(self, d0):
        return sorted((q, d0) for q in self.ta.initial)

    # -- weights -----------------------------------------------------------

    def _duration(self, q):
        iv = self.ta.inv[q]
        if math.isinf(iv.hi):
            return max(self.t_max - iv.lo, 1e-3)
        return max(iv.duration, 1e-3)  # punctual windows keep a small mass

    def state_weight(self, z):
        q, d = z
        dist = self._dist_acc[q]
        if math.isinf(dist):
            return 0.0
        cov = self.cov.get(z, 0)
        numsel = self.numsel.get(z, 0)
        vol = self.graph.regions[d].volume
        return (cov + 1) * vol * self._durations[q] / (dist * (numsel + 1) ** 2)

    def update_stats(self, event, z):
        if z[0] >= self.ta.n_states or not (0 <= z[1] < len(self.graph.regions)):
            raise KeyError("unknown product state %r" % (z,))
        if event == "vertex_added":
            self.cov[z] = self.cov.get(z, 0) + 1
        elif event == "selected":
            self.numsel[z] = self.numsel.get(z, 0) + 1
        else:
            raise ValueError("unknown stats event %r" % event)

    # -- search --------------------------------------------------------------

    def compute_lead(self, available):
        """Dijkstra from the available states to an accepting product state
        under the reciprocal-weight edge costs.  Deterministic tie-breaking:
        lower cost, then smaller state id."""
        if not available:
            raise NoLeadError("no available product states")
        weights = {}

        def w(z):
            got = weights.get(z)
            if got is None:
                got = self.state_weight(z)
                weights[z] = got
            return got

        dist = {}
        prev = {}
        heap = []
        for z in sorted(set(available)):
            if w(z) <= 0.0:
                continue
            dist[z] = 0.0
            heapq.heappush(heap, (0.0, z))
        settled = set()
        goal = None
        while heap:
            d_z, z = heapq.heappop(heap)
            if z in settled or d_z > dist.get(z, math.inf):
                continue
            settled.add(z)
            if self.is_accepting(z):
                goal = z
                break
            wz = w(z)
            for z2 in self.successors(z):
                if z2 in settled:
                    continue
                w2 = w(z2)
                if w2 <= 0.0:
                    continue
                nd = d_z + 1.0 / (wz * w2)
                # strict relaxation + (cost, id)-ordered heap gives a
                # deterministic smallest-id tie-break
                if nd < dist.get(z2, math.inf):
                    dist[z2] = nd
                    prev[z2] = z
                    heapq.heappush(heap, (nd, z2))
        if goal is None:
            raise NoLeadError("accepting product states unreachable from the available set")
        path = [goal]
        while path[-1] in prev:
            path.append(prev[path[-1]])
        path.reverse()
        return Lead(tuple(path), dist[goal])

    def accepting_reachable(self, sources, with_dwell=True):
        """BFS feasibility check; dwell moves let the automaton advance in
        place, which delta_p alone cannot express."""
        frontier = list(dict.fromkeys(sources))
        seen = set(frontier)
        while frontier:
            z = frontier.pop()
            if self.is_accepting(z):
                return True
            nxt = list(self.successors(z))
            if with_dwell:
                q, d = z
                label = self.graph.regions[d].label
                nxt.extend((q2, d) for q2 in self.automaton_moves(q, label))
            for z2 in nxt:
                if z2 not in seen:
                    seen.add(z2)
                    frontier.append(z2)
        return False


class Lead:
    def __init__(self, states, cost):
        self.states = states
        self.cost = cost

    def __contains__(self, z):
        return z in set(self.states)

    def __iter__(self):
        return iter(self.states)

    def __len__(self):
        return len(self.states)

    def __repr__(self):
        return "Lead(%s, cost=%.4g)" % (list(self.states), self.cost)


def dist_from_acc(ta):
    """1 + shortest hop count to an accepting state, per automaton state;
    accepting states get 1, states with no path get +inf."""
    rev = {}
    for src, _g, dst in ta.edges:
        rev.setdefault(dst, set()).add(src)
    dist = [math.inf] * ta.n_states
    frontier = []
    for q in ta.accepting:
        dist[q] = 1.0
        frontier.append(q)
    while frontier:
        q = frontier.pop(0)
        for p in rev.get(q, ()):
            if dist[p] > dist[q] + 1:
                dist[p] = dist[q] + 1
                frontier.append(p)
    return dist


def build_product(ta, graph, t_max=60.0):
    return ProductAutomaton(ta, graph, t_max)
