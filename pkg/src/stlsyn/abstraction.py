"""Predicate abstraction: partition a box state space into regions on which
every predicate's truth value is constant, plus the adjacency graph.

Axis-aligned linear predicates get the exact hyperplane-arrangement grid.
Anything else falls back to adaptive box refinement with interval-arithmetic
sign certificates; cells still undecided at the depth limit are labeled by
their centroid and flagged impure (the planner re-validates states in such
cells against the exact predicates).

Cell ownership is half-open: a facet belongs to the cell on its upper side,
matching the h(x) >= 0 labeling convention, so the label of the owning cell
agrees with exact predicate evaluation on facets of axis-aligned cuts.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field


class AbstractionError(ValueError):
    pass


@dataclass
class Region:
    id: int
    box: tuple                 # ((lo, hi) per dim); None for polytope regions
    label: frozenset
    volume: float
    pure: bool
    vertices: tuple = None     # convex polytope alternative geometry

    def centroid(self):
        if self.box is not None:
            return tuple(0.5 * (lo + hi) for lo, hi in self.box)
        n = len(self.vertices)
        return tuple(sum(v[i] for v in self.vertices) / n
                     for i in range(len(self.vertices[0])))

def region_volume(region):
    """Exact volume: box product, or convex-hull volume for polytopes."""
    if region.box is not None:
        v = 1.0
        for lo, hi in region.box:
            v *= hi - lo
        return v
    from scipy.spatial import ConvexHull
    return float(ConvexHull(region.vertices).volume)


def polytope_region(rid, vertices, label=frozenset(), pure=True):
    r = Region(rid, None, frozenset(label), 0.0, pure, tuple(map(tuple, vertices)))
    r.volume = region_volume(r)
    return r


class AbstractionGraph:
    def __init__(self, bounds, predicates, regions, edges, kind, dim_cuts=None, tree=None):
        self.bounds = tuple(tuple(b) for b in bounds)
        self.predicates = list(predicates)
        self.regions = regions
        self.edges = edges                   # set of (i, j) with i < j
        self.kind = kind                     # 'grid' or 'tree'
        self._dim_cuts = dim_cuts
        self._tree = tree
        self._nbrs = None

    @property
    def gamma(self):
        return frozenset(p.name for p in self.predicates)

    def neighbors(self, rid):
        if self._nbrs is None:
            self._nbrs = {i: [] for i in range(len(self.regions))}
            for i, j in sorted(self.edges):
                self._nbrs[i].append(j)
                self._nbrs[j].append(i)
        return self._nbrs[rid]

    def label_of_state(self, x):
        """Exact predicate truth at a point, independent of the partition."""
        return frozenset(p.name for p in self.predicates if p.eval(x))

    def region_of(self, x):
        if any(x[i] < lo or x[i] > hi for i, (lo, hi) in enumerate(self.bounds)):
            raise AbstractionError("state %r outside the state space" % (x,))
        if self.kind == "grid":
            idx = []
            for i, cuts in enumerate(self._dim_cuts):
                idx.append(bisect_right(cuts, x[i]))
            return self.regions[self._grid_index(idx)]
        node = self._tree
        while node.children is not None:
            dim, mid = node.split
            node = node.children[0 if x[dim] < mid else 1]
        return self.regions[node.rid]

    def _grid_index(self, idx):
        flat = 0
        for i, cuts in enumerate(self._dim_cuts):
            flat = flat * (len(cuts) + 1) + idx[i]
        return flat

    def total_volume(self):
        return sum(r.volume for r in self.regions)

    def impure_volume_fraction(self):
        tot = self.total_volume()
        bad = sum(r.volume for r in self.regions if not r.pure)
        return bad / tot if tot else 0.0

    def describe(self):
        lines = ["regions: %d  edges: %d  kind: %s" % (len(self.regions), len(self.edges), self.kind)]
        for r in self.regions:
            lines.append("d%d box=%s label={%s} vol=%.6g %s"
                         % (r.id, r.box, ",".join(sorted(r.label)), r.volume,
                            "pure" if r.pure else "impure"))
        for i, j in sorted(self.edges):
            lines.append("d%d -- d%d" % (i, j))
        return "\n".join(lines)


@dataclass
class _TreeNode:
    box: tuple
    split: tuple = None
    children: tuple = None
    rid: int = -1


def decompose(bounds, predicates, max_depth=8, impure_threshold=0.2):
    """Partition `bounds` into predicate-truth-invariant regions."""
    bounds = tuple((float(lo), float(hi)) for lo, hi in bounds)
    if any(hi <= lo for lo, hi in bounds):
        raise AbstractionError("empty state-space box")
    if not predicates:
        raise AbstractionError("no predicates to abstract over")
    for p in predicates:
        if p.poly.is_zero:
            raise AbstractionError("predicate %r is identically zero" % p.name)
        if p.poly.nvars != len(bounds):
            raise AbstractionError("predicate %r arity %d != space dim %d"
                                   % (p.name, p.poly.nvars, len(bounds)))

    axis = [p.poly.axis_aligned_form() for p in predicates]
    if all(a is not None for a in axis):
        return _grid_decompose(bounds, predicates, axis)
    return _tree_decompose(bounds, predicates, max_depth, impure_threshold)


def _grid_decompose(bounds, predicates, axis_forms):
    dim_cuts = [[] for _ in bounds]
    for (i, c, b) in axis_forms:
        cut = -b / c
        lo, hi = bounds[i]
        if lo < cut < hi and cut not in dim_cuts[i]:
            dim_cuts[i].append(cut)
    dim_cuts = [sorted(c) for c in dim_cuts]

    slabs = []
    for (lo, hi), cuts in zip(bounds, dim_cuts):
        pts = [lo] + cuts + [hi]
        slabs.append([(pts[k], pts[k + 1]) for k in range(len(pts) - 1)])

    shape = [len(s) for s in slabs]
    regions = []
    idx = [0] * len(shape)
    while True:
        box = tuple(slabs[i][idx[i]] for i in range(len(shape)))
        mid = tuple(0.5 * (lo + hi) for lo, hi in box)
        label = frozenset(p.name for p in predicates if p.eval(mid))
        rid = len(regions)
        vol = 1.0
        for lo, hi in box:
            vol *= hi - lo
        regions.append(Region(rid, box, label, vol, True))
        k = len(shape) - 1
        while k >= 0:
            idx[k] += 1
            if idx[k] < shape[k]:
                break
            idx[k] = 0
            k -= 1
        if k < 0:
            break

    edges = set()
    strides = [0] * len(shape)
    s = 1
    for i in reversed(range(len(shape))):
        strides[i] = s
        s *= shape[i]
    for rid in range(len(regions)):
        rest = rid
        coord = []
        for i in range(len(shape)):
            coord.append(rest // strides[i])
            rest %= strides[i]
        for i in range(len(shape)):
            if coord[i] + 1 < shape[i]:
                edges.add((rid, rid + strides[i]))

    return AbstractionGraph(bounds, predicates, regions, edges, "grid", dim_cuts=dim_cuts)


def _tree_decompose(bounds, predicates, max_depth, impure_threshold):
    support = sorted(set().union(*(p.poly.support for p in predicates)))
    root = _TreeNode(bounds)
    leaves = []
    # max_depth counts halvings per dimension; the recursion splits one
    # (widest) support dimension at a time
    depth_limit = max_depth * len(support)

    def refine(node, depth):
        box = node.box
        label = set()
        undecided = False
        for p in predicates:
            lo, hi = p.poly.eval_interval(box)
            if lo >= 0.0:
                label.add(p.name)
            elif hi >= 0.0:
                undecided = True
                break
        if not undecided:
            leaves.append((node, frozenset(label), True))
            return
        if depth >= depth_limit:
            mid = tuple(0.5 * (lo + hi) for lo, hi in box)
            label = frozenset(p.name for p in predicates if p.eval(mid))
            leaves.append((node, label, False))
            return
        dim = max(support, key=lambda i: box[i][1] - box[i][0])
        mid = 0.5 * (box[dim][0] + box[dim][1])
        lo_box = tuple((lo, mid) if i == dim else (lo, hi)
                       for i, (lo, hi) in enumerate(box))
        hi_box = tuple((mid, hi) if i == dim else (lo, hi)
                       for i, (lo, hi) in enumerate(box))
        node.split = (dim, mid)
        node.children = (_TreeNode(lo_box), _TreeNode(hi_box))
        refine(node.children[0], depth + 1)
        refine(node.children[1], depth + 1)

    refine(root, 0)

    regions = []
    for node, label, pure in leaves:
        vol = 1.0
        for lo, hi in node.box:
            vol *= hi - lo
        node.rid = len(regions)
        regions.append(Region(node.rid, node.box, label, vol, pure))

    frac = sum(r.volume for r in regions if not r.pure) / max(
        sum(r.volume for r in regions), 1e-300)
    if frac > impure_threshold:
        raise AbstractionError(
            "refinement budget exceeded: impure-cell volume fraction %.1f%%"
            % (100 * frac))

    edges = _box_adjacency(regions)
    return AbstractionGraph(bounds, predicates, regions, edges, "tree", tree=root)


def _box_adjacency(regions):
    """Boxes sharing a positive-measure facet overlap are adjacent."""
    edges = set()
    by_plane = {}
    for r in regions:
        for dim, (lo, hi) in enumerate(r.box):
            by_plane.setdefault((dim, lo), []).append((r, "lo"))
            by_plane.setdefault((dim, hi), []).append((r, "hi"))
    for (dim, _coord), items in by_plane.items():
        his = [r for r, side in items if side == "hi"]
        los = [r for r, side in items if side == "lo"]
        for a in his:
            for b in los:
                if a.id == b.id:
                    continue
                if _facet_overlap(a.box, b.box, dim):
                    edges.add((min(a.id, b.id), max(a.id, b.id)))
    return edges


def _facet_overlap(box1, box2, skip_dim):
    for i, ((a0, a1), (b0, b1)) in enumerate(zip(box1, box2)):
        if i == skip_dim:
            continue
        if min(a1, b1) <= max(a0, b0):
            return False
    return True
