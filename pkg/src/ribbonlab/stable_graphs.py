"""Stable graphs: canonical forms, Betti numbers, edge contraction, enumeration.

A stable graph is a finite graph with leaves (unpaired half-edges) and a
loop defect o(v) >= 0 at every vertex, subject to the stability bound
(o(v) = 0 forces valence >= 3, o(v) = 1 forces valence >= 1, and every
vertex is nonempty).  An orientation is an ordering of the internal edges;
reversing it negates the generator.

Since vertices carry no cyclic structure, a stable graph is faithfully
described by its multigraph skeleton: an ordered edge list over vertex
indices plus per-vertex leaf counts and defects.  The half-edge incarnation
required by the interchange format is derived deterministically.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .algebra import FormalSum, TruncationProfile


@dataclass(frozen=True)
class StableGraph:
    """edges: tuple of (u, v) vertex pairs in orientation order (u <= v);
    leaves[v]: number of leaves at vertex v; o[v]: loop defect."""

    edges: tuple
    leaves: tuple
    o: tuple

    def __post_init__(self):
        nv = len(self.leaves)
        if len(self.o) != nv or nv == 0:
            raise ValueError("leaves and o must cover the same nonempty vertex set")
        for (u, v) in self.edges:
            if not (0 <= u <= v < nv):
                raise ValueError("edge endpoints out of range or unordered")
        for v in range(nv):
            size = self.valence(v)
            if size == 0:
                raise ValueError("empty vertex")
            if self.o[v] == 0 and size < 3:
                raise ValueError("vertex with zero defect must have valence >= 3")

    # -- basic statistics ----------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return len(self.leaves)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_leaves(self) -> int:
        return sum(self.leaves)

    @property
    def total_defect(self) -> int:
        return sum(self.o)

    def degree(self, v: int) -> int:
        return sum((u == v) + (w == v) for (u, w) in self.edges)

    def valence(self, v: int) -> int:
        return self.degree(v) + self.leaves[v]

    def is_connected(self) -> bool:
        nv = self.n_vertices
        if nv == 1:
            return True
        parent = list(range(nv))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for (u, v) in self.edges:
            parent[find(u)] = find(v)
        return len({find(v) for v in range(nv)}) == 1

    # -- half-edge view (interchange format) ---------------------------------

    def halfedge_view(self):
        """Return (vertices, sigma1, loop_defect, orientation) with explicit
        half-edge ids: each edge k occupies ids (2k, 2k+1), leaves follow."""
        at = [[] for _ in range(self.n_vertices)]
        sigma1 = {}
        for k, (u, v) in enumerate(self.edges):
            a, b = 2 * k, 2 * k + 1
            sigma1[a], sigma1[b] = b, a
            at[u].append(a)
            at[v].append(b)
        nxt = 2 * self.n_edges
        for v in range(self.n_vertices):
            for _ in range(self.leaves[v]):
                sigma1[nxt] = nxt
                at[v].append(nxt)
                nxt += 1
        vertices = tuple(tuple(sorted(h)) for h in at)
        orientation = tuple(range(self.n_edges))
        return vertices, sigma1, tuple(self.o), orientation


def from_halfedge_data(vertices, sigma1, loop_defect, orientation) -> tuple:
    """Build (StableGraph, sign) from half-edge data.

    `vertices`: iterable of iterables of half-edge ids; `sigma1`: mapping
    h -> h' with sigma1[sigma1[h]] = h; `orientation`: list of edges, each a
    pair (h, h') or an index into the discovered edge list.  The sign relates
    the given orientation to the returned edge-list order.
    """
    vertices = [tuple(v) for v in vertices]
    where = {}
    for i, v in enumerate(vertices):
        for h in v:
            if h in where:
                raise ValueError("half-edge in two vertices")
            where[h] = i
    for h, h2 in dict(sigma1).items():
        if sigma1[h2] != h:
            raise ValueError("sigma1 is not an involution")
    pairs = sorted({tuple(sorted((h, h2))) for h, h2 in dict(sigma1).items() if h != h2})
    leaves = [0] * len(vertices)
    for h, h2 in dict(sigma1).items():
        if h == h2:
            leaves[where[h]] += 1
    edge_of_pair = {p: k for k, p in enumerate(pairs)}
    order = []
    for e in orientation:
        if isinstance(e, int):
            order.append(e)
        else:
            order.append(edge_of_pair[tuple(sorted(e))])
    if sorted(order) != list(range(len(pairs))):
        raise ValueError("orientation must list each internal edge exactly once")
    edges = tuple(tuple(sorted((where[p[0]], where[p[1]]))) for p in (pairs[k] for k in order))
    g = StableGraph(edges=edges, leaves=tuple(leaves), o=tuple(loop_defect))
    return g, 1


def betti_number(g: StableGraph) -> int:
    """1 - v + e + sum of loop defects, for connected g."""
    if not g.is_connected():
        raise ValueError("betti_number requires a connected graph")
    return 1 - g.n_vertices + g.n_edges + g.total_defect


# -- canonical forms ---------------------------------------------------------


def _perm_parity(perm) -> int:
    """Parity (+1/-1) of a permutation given as a list of images."""
    seen = [False] * len(perm)
    sign = 1
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, clen = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            clen += 1
        if clen % 2 == 0:
            sign = -sign
    return sign


@dataclass(frozen=True)
class OrientedIsoClass:
    """Canonical representative plus the sign relating the input orientation
    to the canonical one; `is_zero` marks graphs with an orientation-reversing
    automorphism (their class is 0)."""

    canonical: object
    sign: int
    is_zero: bool

    @property
    def key(self):
        return self.canonical.edges, self.canonical.leaves, self.canonical.o


def _vertex_invariants(g: StableGraph):
    nbr = [[] for _ in range(g.n_vertices)]
    for (u, v) in g.edges:
        nbr[u].append(v)
        nbr[v].append(u)
    return [
        (g.o[v], g.leaves[v], g.degree(v), tuple(sorted(nbr[v])))
        for v in range(g.n_vertices)
    ]


@lru_cache(maxsize=200000)
def _canonicalize_skeleton(edges, leaves, o):
    """Minimal (sorted-edge-list, leaves, o) over vertex relabelings, plus
    the list of automorphism edge-parities.

    Returns (key, perm_to_canonical, is_zero).
    """
    g = StableGraph(edges, leaves, o)
    nv = g.n_vertices
    inv = _vertex_invariants(g)
    # group vertices by a relabeling-invariant part of their invariant
    rough = [(o[v], leaves[v], g.degree(v)) for v in range(nv)]
    cells = {}
    for v in range(nv):
        cells.setdefault(rough[v], []).append(v)
    blocks = [cells[k] for k in sorted(cells)]
    best = None
    best_perms = []
    for mix in itertools.product(*[itertools.permutations(b) for b in blocks]):
        target = [v for block in mix for v in block]
        # perm maps old vertex -> new label (its position in target order)
        perm = [0] * nv
        for newlabel, old in enumerate(target):
            perm[old] = newlabel
        new_edges = tuple(sorted(tuple(sorted((perm[u], perm[v]))) for (u, v) in edges))
        new_leaves = tuple(leaves[old] for old in target)
        new_o = tuple(o[old] for old in target)
        cand = (new_edges, new_leaves, new_o)
        if best is None or cand < best:
            best = cand
            best_perms = [perm]
        elif cand == best:
            best_perms.append(perm)

    # zero-class detection: duplicate edges give an odd edge swap
    ce = best[0]
    is_zero = any(ce[i] == ce[i + 1] for i in range(len(ce) - 1))
    if not is_zero and len(best_perms) > 1:
        # parity of the induced edge permutation for each automorphism
        ref = best_perms[0]
        ref_keys = [tuple(sorted((ref[u], ref[v]))) for (u, v) in edges]
        pos = {k: i for i, k in enumerate(ref_keys)}
        for perm in best_perms[1:]:
            keys = [tuple(sorted((perm[u], perm[v]))) for (u, v) in edges]
            if _perm_parity([pos[k] for k in keys]) < 0:
                is_zero = True
                break
    return best, tuple(best_perms[0]), is_zero


def canonicalize(g: StableGraph, orientation_sign: int = 1) -> OrientedIsoClass:
    """Canonical labeling with orientation sign tracked through the move to
    the canonical (sorted) edge order."""
    key, perm, is_zero = _canonicalize_skeleton(g.edges, g.leaves, g.o)
    canon = StableGraph(*key)
    if is_zero:
        return OrientedIsoClass(canon, 0, True)
    mapped = [tuple(sorted((perm[u], perm[v]))) for (u, v) in g.edges]
    pos = {k: i for i, k in enumerate(key[0])}
    sign = _perm_parity([pos[k] for k in mapped]) * orientation_sign
    return OrientedIsoClass(canon, sign, False)


# -- contraction & differential ----------------------------------------------


def contract_edge_graph(g: StableGraph, k: int):
    """Contract the edge at orientation position k.

    Returns an OrientedIsoClass (with the (-1)^k sign of moving the edge to
    the front of the orientation included), or None when contraction would
    empty a vertex (then the term is zero).
    """
    u, v = g.edges[k]
    rest = g.edges[:k] + g.edges[k + 1:]
    sign = -1 if k % 2 else 1
    if u == v:
        # delete the loop, bump the defect
        leaves, o = list(g.leaves), list(g.o)
        o[u] += 1
        remaining = sum((a == u) + (b == u) for (a, b) in rest) + leaves[u]
        if remaining == 0:
            return None
        return canonicalize(StableGraph(rest, tuple(leaves), tuple(o)), sign)
    # merge v into u, relabel vertices above v down by one
    def rl(x):
        if x == v:
            return u
        return x - 1 if x > v else x

    new_edges = tuple(tuple(sorted((rl(a), rl(b)))) for (a, b) in rest)
    leaves = list(g.leaves)
    o = list(g.o)
    leaves[u] += leaves[v]
    o[u] += o[v]
    del leaves[v], o[v]
    if sum((a == rl(u)) + (b == rl(u)) for (a, b) in new_edges) + leaves[rl(u)] == 0:
        return None
    return canonicalize(StableGraph(new_edges, tuple(leaves), tuple(o)), sign)


def boundary(g: StableGraph) -> FormalSum:
    """Chain differential: sum of all edge contractions with orientation signs."""
    out = FormalSum()
    for k in range(g.n_edges):
        cls = contract_edge_graph(g, k)
        if cls is not None and not cls.is_zero:
            out.add_term(cls.key, cls.sign)
    return out


def graph_differential(x: FormalSum) -> FormalSum:
    """Linear extension of the contraction differential to sums of classes."""
    out = FormalSum()
    for key, c in x.t.items():
        g = StableGraph(*key)
        for k2, c2 in boundary(g).t.items():
            out.add_term(k2, c * c2)
    return out


# -- enumeration ---------------------------------------------------------------


def _connected_skeletons(n_edges):
    """Canonical connected multigraph skeletons (edge multisets) with exactly
    n_edges edges; yields (sorted_edges, n_vertices)."""
    seen = set()
    max_v = max(1, n_edges + 1)
    for nv in range(1, max_v + 1):
        if nv > 1 and n_edges < nv - 1:
            continue
        pairs = [(i, j) for i in range(nv) for j in range(i, nv)]
        for combo in itertools.combinations_with_replacement(pairs, n_edges):
            g_edges = tuple(sorted(combo))
            touched = set()
            for (u, v) in g_edges:
                touched.add(u)
                touched.add(v)
            if nv > 1 and len(touched) < nv:
                continue
            # connectivity
            parent = list(range(nv))

            def find(x):
                while parent[x] != x:
                    parent[x] = parent[parent[x]]
                    x = parent[x]
                return x

            for (u, v) in g_edges:
                parent[find(u)] = find(v)
            if len({find(v) for v in range(nv)}) != 1:
                continue
            # canonical dedupe over vertex permutations
            best = min(
                tuple(sorted(tuple(sorted((p[u], p[v]))) for (u, v) in g_edges))
                for p in itertools.permutations(range(nv))
            )
            if (best, nv) not in seen:
                seen.add((best, nv))
                yield best, nv


def _skeleton_automorphisms(edges, nv):
    multiset = sorted(edges)
    auts = []
    for p in itertools.permutations(range(nv)):
        if sorted(tuple(sorted((p[u], p[v]))) for (u, v) in edges) == multiset:
            auts.append(p)
    return auts


def _compositions(total, parts):
    """All tuples of `parts` non-negative ints summing to exactly total."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_connected_graphs(profile: TruncationProfile):
    """One canonical representative per nonzero oriented iso class within the
    window (e <= max_edges, l <= max_leaves, total defect <= max_genus_defect)."""
    out = []
    seen = set()
    for e in range(profile.max_edges + 1):
        for edges, nv in _connected_skeletons(e):
            auts = _skeleton_automorphisms(edges, nv)
            deg = [0] * nv
            for (u, v) in edges:
                deg[u] += 1
                deg[v] += 1
            for ltotal in range(profile.max_leaves + 1):
                for leaves in _compositions(ltotal, nv):
                    for ototal in range(profile.max_genus_defect + 1):
                        for o in _compositions(ototal, nv):
                            ok = True
                            for v in range(nv):
                                size = deg[v] + leaves[v]
                                if size == 0 or (o[v] == 0 and size < 3):
                                    ok = False
                                    break
                            if not ok:
                                continue
                            # skip decorations not minimal in their skeleton-automorphism orbit
                            if any(
                                (tuple(leaves[p.index(i)] for i in range(nv)),
                                 tuple(o[p.index(i)] for i in range(nv))) < (leaves, o)
                                for p in auts
                            ):
                                continue
                            cls = canonicalize(StableGraph(edges, leaves, o))
                            if cls.is_zero or cls.key in seen:
                                continue
                            seen.add(cls.key)
                            out.append(OrientedIsoClass(cls.canonical, 1, False))
    out.sort(key=lambda c: c.key)
    return out
