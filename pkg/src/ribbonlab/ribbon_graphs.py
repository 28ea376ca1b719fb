"""B-colored stable ribbon graphs: faces, contraction, canonical forms.

Half-edges at a vertex are partitioned into cycles, each cyclically ordered
(the permutation sigma0); sigma1 is the edge involution.  Faces are the
orbits of sigma_b = sigma0^{-1} o sigma1.  Each vertex carries a genus
defect g(v) and a boundary defect b_c(v) per color c.

Coloring is stored as a corner color chi[h] for every half-edge h, where the
corner keyed by h sits between h and sigma0(h) in the vertex cycle.  Corners
in the same boundary arc (between two consecutive leaves of a face, or all
corners of a face without leaves) must share a color; that single shared
color is the color of the free boundary / empty face.  This encoding is
stable under edge contraction: surviving corners simply keep their color.

Stability: a vertex with g = 0, all b = 0 and a single cycle must have
valence >= 3; every vertex has at least one nonempty cycle.  Contractions
that would leave a vertex with no half-edges do not produce a stable object
and count as non-contractible (this extends the two explicitly
non-contractible configurations and keeps the projection to stable graphs a
chain map).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .algebra import FormalSum, TruncationProfile
from .stable_graphs import StableGraph, _perm_parity


class _NonContractible:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NonContractible"


NON_CONTRACTIBLE = _NonContractible()


class StableRibbonGraph:
    """Immutable stable ribbon graph over explicit half-edge ids.

    vertices: tuple of (cycles, g, b) where cycles is a tuple of tuples of
    half-edge ids (each tuple read in sigma0 order), g is the genus defect
    and b a sorted tuple of (color, count) pairs with positive counts.
    sigma1: dict-like mapping h -> partner (h itself for leaves).
    chi: mapping h -> color of the corner (h, sigma0(h)).
    orientation: tuple of edges in order; an edge is the frozenset-free
    normalized pair (min(h, h'), max(h, h')).
    """

    __slots__ = ("vertices", "sigma1", "chi", "orientation", "_s0", "_s0inv",
                 "_faces", "_key")

    def __init__(self, vertices, sigma1, chi, orientation, check=True):
        self.vertices = tuple(
            (tuple(tuple(c) for c in cycles), g, tuple(sorted(b)))
            for cycles, g, b in vertices
        )
        self.sigma1 = dict(sigma1)
        self.chi = dict(chi)
        self.orientation = tuple(tuple(sorted(e)) for e in orientation)
        s0 = {}
        for cycles, _, _ in self.vertices:
            for cyc in cycles:
                for i, h in enumerate(cyc):
                    s0[h] = cyc[(i + 1) % len(cyc)]
        self._s0 = s0
        self._s0inv = {v: k for k, v in s0.items()}
        self._faces = None
        self._key = None
        if check:
            self._validate()

    # -- structure access ------------------------------------------------------

    def halfedges(self):
        return sorted(self._s0)

    def sigma0(self, h):
        return self._s0[h]

    def sigma0_inv(self, h):
        return self._s0inv[h]

    def is_leaf(self, h):
        return self.sigma1[h] == h

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_edges(self):
        return len(self.orientation)

    @property
    def n_leaves(self):
        return sum(1 for h in self._s0 if self.is_leaf(h))

    @property
    def n_cycles(self):
        return sum(len(cycles) for cycles, _, _ in self.vertices)

    def genus_defect(self, v):
        return self.vertices[v][1]

    def boundary_defect(self, v):
        return dict(self.vertices[v][2])

    def total_defect(self):
        """Loop defect of the underlying stable graph: sum over vertices of
        2 g(v) + sum_c b_c(v) + c(v) - 1."""
        return sum(
            2 * g + sum(n for _, n in b) + len(cycles) - 1
            for cycles, g, b in self.vertices
        )

    def _validate(self):
        seen = set()
        for cycles, g, b in self.vertices:
            if not cycles:
                raise ValueError("vertex with no cycles")
            size = 0
            for cyc in cycles:
                if not cyc:
                    raise ValueError("empty cycle")
                size += len(cyc)
                for h in cyc:
                    if h in seen:
                        raise ValueError("half-edge used twice")
                    seen.add(h)
            if g == 0 and not b and len(cycles) == 1 and size < 3:
                raise ValueError("unstable vertex")
            if any(n <= 0 for _, n in b):
                raise ValueError("boundary defects must be positive")
        if set(self.sigma1) != seen:
            raise ValueError("sigma1 must cover exactly the half-edges")
        for h, h2 in self.sigma1.items():
            if self.sigma1[h2] != h:
                raise ValueError("sigma1 is not an involution")
        pairs = {tuple(sorted((h, h2))) for h, h2 in self.sigma1.items() if h != h2}
        if set(self.orientation) != pairs or len(self.orientation) != len(pairs):
            raise ValueError("orientation must list each internal edge exactly once")
        if set(self.chi) != seen:
            raise ValueError("chi must color every corner")
        for face in self.faces():
            arcs = self._arcs_of_face(face)
            for arc in arcs:
                colors = {self.chi[h] for h in arc}
                if len(colors) > 1:
                    raise ValueError("corner colors not constant along an arc")

    # -- faces -----------------------------------------------------------------

    def faces(self):
        """Orbits of sigma_b = sigma0^{-1} o sigma1, each a tuple of
        half-edges in traversal order starting from the minimal one."""
        if self._faces is not None:
            return self._faces
        out = []
        todo = set(self._s0)
        while todo:
            start = min(todo)
            face = [start]
            todo.discard(start)
            x = self._s0inv[self.sigma1[start]]
            while x != start:
                face.append(x)
                todo.discard(x)
                x = self._s0inv[self.sigma1[x]]
            out.append(tuple(face))
        self._faces = tuple(out)
        return self._faces

    def _arcs_of_face(self, face):
        """Split the corners of a face into boundary arcs.

        The corner keyed by h is crossed when the face traversal lands on h;
        the arc starting at a leaf x therefore collects the corner keys of
        the walk up to and including the next leaf.  A face without leaves is
        a single arc (an empty face)."""
        leaves_pos = [i for i, h in enumerate(face) if self.is_leaf(h)]
        n = len(face)
        if not leaves_pos:
            return [list(face)]
        arcs = []
        for idx, i in enumerate(leaves_pos):
            j = leaves_pos[(idx + 1) % len(leaves_pos)]
            arc = []
            k = (i + 1) % n
            while True:
                arc.append(face[k])
                if k == j:
                    break
                k = (k + 1) % n
            arcs.append(arc)
        return arcs

    def face_leaf_counts(self):
        return [sum(1 for h in f if self.is_leaf(h)) for f in self.faces()]

    def empty_faces(self):
        return [f for f in self.faces() if not any(self.is_leaf(h) for h in f)]

    def free_boundaries(self):
        """List of (face index, (leaf, next leaf), color) triples."""
        out = []
        for fi, face in enumerate(self.faces()):
            leaves = [h for h in face if self.is_leaf(h)]
            if not leaves:
                continue
            arcs = self._arcs_of_face(face)
            for (l, l2), arc in zip(
                [(leaves[i], leaves[(i + 1) % len(leaves)]) for i in range(len(leaves))],
                arcs,
            ):
                out.append((fi, (l, l2), self.chi[arc[0]]))
        return out

    def f_tot(self):
        """Total number of empty faces: boundary defects plus faces with no
        open boundaries."""
        return sum(sum(n for _, n in b) for _, _, b in self.vertices) + len(self.empty_faces())

    def nu_exponents(self):
        """Color -> multiplicity of the central weight this graph carries."""
        out = {}
        for _, _, b in self.vertices:
            for c, n in b:
                out[c] = out.get(c, 0) + n
        for f in self.empty_faces():
            c = self.chi[f[0]]
            out[c] = out.get(c, 0) + 1
        return out

    # -- numerical invariants ----------------------------------------------------

    def arithmetic_genus(self):
        v = self.n_vertices
        e = self.n_edges
        c = self.n_cycles
        f = len(self.faces())
        gsum = sum(g for _, g, _ in self.vertices)
        num = 2 * (1 - v) + (e + c - f) + 2 * gsum
        if num % 2:
            raise ValueError("non-integer arithmetic genus: inconsistent structure")
        return num // 2

    def stats(self):
        return RibbonStats(
            v=self.n_vertices,
            e=self.n_edges,
            l=self.n_leaves,
            c=self.n_cycles,
            f=len(self.faces()),
            f0=len(self.empty_faces()),
            f_tot=self.f_tot(),
            arithmetic_genus=self.arithmetic_genus(),
        )

    def key(self):
        if self._key is None:
            self._key = (
                self.vertices,
                tuple(sorted(self.sigma1.items())),
                tuple(sorted(self.chi.items())),
                self.orientation,
            )
        return self._key

    def __eq__(self, other):
        return isinstance(other, StableRibbonGraph) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"StableRibbonGraph(v={self.n_vertices}, e={self.n_edges}, l={self.n_leaves})"

    def is_connected(self):
        verts = list(range(self.n_vertices))
        vert_of = {}
        for vi, (cycles, _, _) in enumerate(self.vertices):
            for cyc in cycles:
                for h in cyc:
                    vert_of[h] = vi
        parent = verts[:]

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for (a, b) in self.orientation:
            parent[find(vert_of[a])] = find(vert_of[b])
        return len({find(v) for v in range(self.n_vertices)}) == 1

    def is_ribbon_graph(self):
        return all(g == 0 and not b and len(cycles) == 1 for cycles, g, b in self.vertices)

    def is_ribbon_tree(self):
        return (
            self.is_ribbon_graph()
            and len(self.faces()) == 1
            and self.arithmetic_genus() == 0
        )


@dataclass(frozen=True)
class RibbonStats:
    v: int
    e: int
    l: int
    c: int
    f: int
    f0: int
    f_tot: int
    arithmetic_genus: int


def faces(g: StableRibbonGraph):
    """Faces with per-face open-boundary counts: list of (cycle, count)."""
    return [(f, sum(1 for h in f if g.is_leaf(h))) for f in g.faces()]


def arithmetic_genus(g: StableRibbonGraph) -> int:
    if not g.is_connected():
        raise ValueError("arithmetic genus requires a connected graph")
    return g.arithmetic_genus()


def underlying_stable_graph(g: StableRibbonGraph):
    """Forget the cyclic structure; the loop defect of a vertex is
    2 g(v) + sum_c b_c(v) + c(v) - 1.  Orientation is transported edge by
    edge.  Returns (StableGraph, edge position map is identity)."""
    vert_of = {}
    for vi, (cycles, _, _) in enumerate(g.vertices):
        for cyc in cycles:
            for h in cyc:
                vert_of[h] = vi
    leaves = [0] * g.n_vertices
    for h in g.halfedges():
        if g.is_leaf(h):
            leaves[vert_of[h]] += 1
    o = [
        2 * gv + sum(n for _, n in b) + len(cycles) - 1
        for cycles, gv, b in g.vertices
    ]
    edges = tuple(tuple(sorted((vert_of[a], vert_of[b]))) for (a, b) in g.orientation)
    return StableGraph(edges=edges, leaves=tuple(leaves), o=tuple(o))


# -- contraction ---------------------------------------------------------------


def _rotate_to(cyc, h):
    i = cyc.index(h)
    return cyc[i:] + cyc[:i]


def contract_edge_ribbon(g: StableRibbonGraph, k: int):
    """Contract the edge at orientation position k; returns
    (StableRibbonGraph, sign) or NON_CONTRACTIBLE.

    The sign is (-1)^k for moving the edge to the front of the orientation;
    the remaining orientation keeps its order.  All defect bookkeeping
    follows the coalesce/split/delete case analysis; deleted colored faces
    turn into boundary defects for their color.
    """
    h, h2 = g.orientation[k]
    sign = -1 if k % 2 else 1
    rest_orientation = g.orientation[:k] + g.orientation[k + 1:]

    vert_of = {}
    cyc_of = {}
    for vi, (cycles, _, _) in enumerate(g.vertices):
        for ci, cyc in enumerate(cycles):
            for x in cyc:
                vert_of[x] = vi
                cyc_of[x] = (vi, ci)
    vu, vv = vert_of[h], vert_of[h2]

    def bump(btuple, color, n=1):
        d = dict(btuple)
        d[color] = d.get(color, 0) + n
        return tuple(sorted(d.items()))

    new_vertices = list(g.vertices)

    if vu != vv:
        cycles_u, gu, bu = g.vertices[vu]
        cycles_v, gv, bv = g.vertices[vv]
        cu = _rotate_to(cycles_u[cyc_of[h][1]], h)
        cv = _rotate_to(cycles_v[cyc_of[h2][1]], h2)
        rest_u = tuple(c for i, c in enumerate(cycles_u) if i != cyc_of[h][1])
        rest_v = tuple(c for i, c in enumerate(cycles_v) if i != cyc_of[h2][1])
        if len(cu) == 1 and len(cv) == 1:
            # the cycles bound an empty colored face; they are deleted
            if not rest_u and not rest_v:
                return NON_CONTRACTIBLE
            color = g.chi[h]
            merged_cycles = rest_u + rest_v
            bb = bump(tuple(sorted(dict(bu).items())), color)
            for c2, n in bv:
                bb = bump(bb, c2, n)
            merged = (merged_cycles, gu + gv, bb)
        else:
            spliced = tuple(cu[1:]) + tuple(cv[1:])
            merged_cycles = rest_u + rest_v + ((spliced,) if spliced else ())
            bb = tuple(sorted((dict((c, n) for c, n in bu)).items()))
            for c2, n in bv:
                bb = bump(bb, c2, n)
            merged = (merged_cycles, gu + gv, bb)
        keep = [vert for i, vert in enumerate(new_vertices) if i not in (vu, vv)]
        new_vertices = keep + [merged]
    else:
        cycles_v, gv, bv = g.vertices[vu]
        ci_h, ci_h2 = cyc_of[h][1], cyc_of[h2][1]
        if ci_h != ci_h2:
            # loop joining two distinct cycles of the same vertex
            cu = _rotate_to(cycles_v[ci_h], h)
            cv = _rotate_to(cycles_v[ci_h2], h2)
            rest = tuple(c for i, c in enumerate(cycles_v) if i not in (ci_h, ci_h2))
            if len(cu) == 1 and len(cv) == 1:
                if not rest:
                    # would leave an empty vertex: not a stable object
                    return NON_CONTRACTIBLE
                color = g.chi[h]
                merged = (rest, gv + 1, bump(bv, color))
            else:
                spliced = tuple(cu[1:]) + tuple(cv[1:])
                merged = (rest + ((spliced,) if spliced else ()), gv + 1, bv)
            new_vertices[vu] = merged
        else:
            # loop inside a single cycle
            cyc = _rotate_to(cycles_v[ci_h], h)
            pos2 = cyc.index(h2)
            xs = cyc[1:pos2]
            ys = cyc[pos2 + 1:]
            rest = tuple(c for i, c in enumerate(cycles_v) if i != ci_h)
            if not xs and not ys:
                # the cycle is exactly the loop: two empty colored faces die
                if not rest:
                    return NON_CONTRACTIBLE
                merged = (rest, gv, bump(bump(bv, g.chi[h]), g.chi[h2]))
            elif not xs:
                merged = (rest + (tuple(ys),), gv, bump(bv, g.chi[h]))
            elif not ys:
                merged = (rest + (tuple(xs),), gv, bump(bv, g.chi[h2]))
            else:
                merged = (rest + (tuple(xs), tuple(ys)), gv, bv)
            new_vertices[vu] = merged

    gone = {h, h2}
    sigma1 = {a: b for a, b in g.sigma1.items() if a not in gone}
    chi = {a: c for a, c in g.chi.items() if a not in gone}
    out = StableRibbonGraph(new_vertices, sigma1, chi, rest_orientation)
    return out, sign


def ribbon_boundary(g: StableRibbonGraph) -> FormalSum:
    """Chain differential: signed sum of canonical classes of contractions."""
    out = FormalSum()
    for k in range(g.n_edges):
        res = contract_edge_ribbon(g, k)
        if res is NON_CONTRACTIBLE:
            continue
        gg, sign = res
        cls = canonicalize_ribbon(gg)
        if not cls.is_zero:
            out.add_term(cls.key, sign * cls.sign)
    return out


def ribbon_differential(x: FormalSum) -> FormalSum:
    out = FormalSum()
    for key, c in x.t.items():
        g = ribbon_from_key(key)
        for k2, c2 in ribbon_boundary(g).t.items():
            out.add_term(k2, c * c2)
    return out


# -- canonical forms -----------------------------------------------------------


@dataclass(frozen=True)
class OrientedRibbonClass:
    canonical: StableRibbonGraph
    sign: int
    is_zero: bool

    @property
    def key(self):
        return self.canonical.key()


def _candidate_encoding(g: StableRibbonGraph, anchor):
    """Label half-edges by a deterministic traversal from `anchor`, branching
    over sibling-cycle choices; yields (encoding, label map)."""
    vert_of = {}
    cyc_id = {}
    cycles_at = []
    for vi, (cycles, _, _) in enumerate(g.vertices):
        cycles_at.append(cycles)
        for ci, cyc in enumerate(cycles):
            for x in cyc:
                vert_of[x] = vi
                cyc_id[x] = (vi, ci)

    def label_all(choices):
        """choices: iterator of indices used at sibling branch points; returns
        (encoding, labels) or ('need', n_options) when a choice is missing."""
        labels = {}
        order = []

        def label_cycle(start):
            cyc = _rotate_to(cycles_at[cyc_id[start][0]][cyc_id[start][1]], start)
            for x in cyc:
                labels[x] = len(order)
                order.append(x)

        label_cycle(anchor)
        qi = 0
        choice_idx = 0
        while True:
            while qi < len(order):
                x = order[qi]
                qi += 1
                p = g.sigma1[x]
                if p not in labels:
                    label_cycle(p)
            if len(order) == len(vert_of):
                break
            # sibling cycles at partially labeled vertices
            opts = []
            for vi in sorted(
                {vert_of[x] for x in order},
                key=lambda vi: min(
                    labels[x] for cyc in cycles_at[vi] for x in cyc if x in labels
                ),
            ):
                for cyc in cycles_at[vi]:
                    if not any(x in labels for x in cyc):
                        opts.extend((c,) for c in cyc)
                if opts:
                    break
            if not opts:
                return None  # disconnected
            if choice_idx >= len(choices):
                return ("need", len(opts))
            start = opts[choices[choice_idx]][0]
            choice_idx += 1
            label_cycle(start)
        # encoding
        n = len(order)
        vert_first = {}
        vid = {}
        for x in order:
            vi = vert_of[x]
            if vi not in vid:
                vid[vi] = len(vid)
        enc_cells = []
        for x in order:
            enc_cells.append((labels[g.sigma0(x)], labels[g.sigma1[x]], vid[vert_of[x]], g.chi[x]))
        vdata = [None] * len(vid)
        for vi, new in vid.items():
            _, gv, bv = g.vertices[vi]
            vdata[new] = (gv, bv)
        return (tuple(enc_cells), tuple(vdata)), labels

    results = []
    stack = [()]
    while stack:
        choices = stack.pop()
        res = label_all(choices)
        if res is None:
            return []
        if isinstance(res, tuple) and res and res[0] == "need":
            for c in range(res[1]):
                stack.append(choices + (c,))
            continue
        results.append(res)
    return results


def canonicalize_ribbon(g: StableRibbonGraph) -> OrientedRibbonClass:
    """Minimal traversal encoding over all anchors and sibling choices;
    the orientation sign tracks the permutation taking the input edge order
    to the canonical (sorted) one; orientation-reversing automorphisms make
    the class zero."""
    best = None
    best_labelings = []
    for anchor in g.halfedges():
        for enc, labels in _candidate_encoding(g, anchor):
            if best is None or enc < best:
                best = enc
                best_labelings = [labels]
            elif enc == best:
                best_labelings.append(labels)
    if best is None:
        raise ValueError("canonicalize_ribbon requires a connected graph")

    lab0 = best_labelings[0]
    canon_edges = sorted(
        tuple(sorted((lab0[a], lab0[b]))) for (a, b) in g.orientation
    )
    pos = {e: i for i, e in enumerate(canon_edges)}
    mapped = [tuple(sorted((lab0[a], lab0[b]))) for (a, b) in g.orientation]
    sign = _perm_parity([pos[e] for e in mapped]) if canon_edges else 1

    is_zero = False
    for lab in best_labelings[1:]:
        mapped_i = [tuple(sorted((lab[a], lab[b]))) for (a, b) in g.orientation]
        rel = [pos[e] for e in mapped_i]
        base = [pos[e] for e in mapped]
        # automorphism = lab o lab0^{-1}; its action on edges is rel o base^{-1}
        inv = [0] * len(base)
        for i, x in enumerate(base):
            inv[x] = i
        if _perm_parity([rel[inv[i]] for i in range(len(base))]) < 0:
            is_zero = True
            break

    canon = _relabel(g, lab0, canon_edges)
    if is_zero:
        return OrientedRibbonClass(canon, 0, True)
    return OrientedRibbonClass(canon, sign, False)


def _relabel(g: StableRibbonGraph, labels, canon_edges):
    new_vertices = []
    for vi, (cycles, gv, bv) in enumerate(g.vertices):
        new_cycles = []
        for cyc in cycles:
            lab = [labels[x] for x in cyc]
            m = lab.index(min(lab))
            new_cycles.append(tuple(lab[m:] + lab[:m]))
        new_cycles.sort()
        new_vertices.append(((tuple(new_cycles), gv, bv), min(min(c) for c in new_cycles)))
    new_vertices.sort(key=lambda t: t[1])
    sigma1 = {labels[a]: labels[b] for a, b in g.sigma1.items()}
    chi = {labels[a]: c for a, c in g.chi.items()}
    return StableRibbonGraph(
        [v for v, _ in new_vertices], sigma1, chi, canon_edges, check=False
    )


def ribbon_from_key(key) -> StableRibbonGraph:
    vertices, sigma1_items, chi_items, orientation = key
    return StableRibbonGraph(vertices, dict(sigma1_items), dict(chi_items), orientation, check=False)


# -- gluing ---------------------------------------------------------------------


def colors_match(g1: StableRibbonGraph, l1, g2: StableRibbonGraph, l2) -> bool:
    """Gluing two leaves merges the arc ending at one with the arc starting
    at the other; both merges must join equal colors."""
    return (
        g1.chi[l1] == g2.chi[g2.sigma0_inv(l2)]
        and g1.chi[g1.sigma0_inv(l1)] == g2.chi[l2]
    )


def glue_leaves_disjoint(g1: StableRibbonGraph, l1, g2: StableRibbonGraph, l2):
    """Glue leaf l1 of g1 to leaf l2 of g2 (disjoint graphs).  The new edge
    is inserted between the two orientation blocks: edges of g1, the new
    edge, then edges of g2.  Returns None on a color mismatch."""
    if not colors_match(g1, l1, g2, l2):
        return None
    off = max(g1.halfedges(), default=-1) + 1
    sh = lambda h: h + off
    vertices = list(g1.vertices) + [
        (tuple(tuple(sh(x) for x in cyc) for cyc in cycles), gv, bv)
        for cycles, gv, bv in g2.vertices
    ]
    sigma1 = dict(g1.sigma1)
    for a, b in g2.sigma1.items():
        sigma1[sh(a)] = sh(b)
    sigma1[l1] = sh(l2)
    sigma1[sh(l2)] = l1
    chi = dict(g1.chi)
    for a, c in g2.chi.items():
        chi[sh(a)] = c
    orientation = (
        list(g1.orientation)
        + [tuple(sorted((l1, sh(l2))))]
        + [tuple(sorted((sh(a), sh(b)))) for (a, b) in g2.orientation]
    )
    return StableRibbonGraph(vertices, sigma1, chi, orientation)


def self_glue_leaves(g: StableRibbonGraph, l1, l2):
    """Glue two distinct leaves of g; the new edge comes first in the
    orientation.  Returns None on a color mismatch."""
    if l1 == l2 or not g.is_leaf(l1) or not g.is_leaf(l2):
        raise ValueError("need two distinct leaves")
    if not colors_match(g, l1, g, l2):
        return None
    sigma1 = dict(g.sigma1)
    sigma1[l1], sigma1[l2] = l2, l1
    orientation = [tuple(sorted((l1, l2)))] + list(g.orientation)
    return StableRibbonGraph(g.vertices, sigma1, g.chi, orientation)


def same_face(g: StableRibbonGraph, l1, l2) -> bool:
    for f in g.faces():
        if l1 in f:
            return l2 in f
    raise ValueError("leaf not found")


# -- enumeration -----------------------------------------------------------------


def _vertex_cycle_structures(nonloop_tokens, n_loops, n_leaves, max_cycles):
    """Canonical local cyclic structures at one vertex.

    Tokens: distinct `('e', t)` for non-loop edge ends, `('p', i, half)` for
    the halves of same-vertex loops (named by first appearance), `("L",)` for
    leaves (identical).  Yields tuples of cycles.  Structures are filtered to
    a self-canonical representative to strip rotation and ordering duplicates.
    """
    results = set()
    nonloop = sorted(nonloop_tokens)

    def close_cycle(cycles, cyc):
        return cycles + (tuple(cyc),)

    def rec(cycles, cyc, rem_nonloop, fresh_loop, open_halves, rem_leaves):
        total_left = len(rem_nonloop) + 2 * (n_loops - fresh_loop) + len(open_halves) + rem_leaves
        if total_left == 0 and not cyc:
            if cycles and len(cycles) <= max_cycles:
                results.add(_local_canonical(cycles))
            return
        if not cyc:
            if len(cycles) >= max_cycles:
                return
        # choices for the next slot in the current cycle (or to start one)
        options = []
        if rem_nonloop:
            for i, t in enumerate(rem_nonloop):
                options.append(("e", i))
        if fresh_loop < n_loops:
            options.append(("fresh", None))
        for idx in range(len(open_halves)):
            options.append(("open", idx))
        if rem_leaves:
            options.append(("leaf", None))
        for kind, arg in options:
            if kind == "e":
                t = rem_nonloop[arg]
                nxt = rem_nonloop[:arg] + rem_nonloop[arg + 1:]
                step(cycles, cyc + [("e", t)], nxt, fresh_loop, open_halves, rem_leaves)
            elif kind == "fresh":
                tok = ("p", fresh_loop, 0)
                step(cycles, cyc + [tok], rem_nonloop, fresh_loop + 1,
                     open_halves + [fresh_loop], rem_leaves)
            elif kind == "open":
                li = open_halves[arg]
                rest = open_halves[:arg] + open_halves[arg + 1:]
                step(cycles, cyc + [("p", li, 1)], rem_nonloop, fresh_loop, rest, rem_leaves)
            else:
                step(cycles, cyc + [("L",)], rem_nonloop, fresh_loop, open_halves, rem_leaves - 1)

    def step(cycles, cyc, rem_nonloop, fresh_loop, open_halves, rem_leaves):
        # either keep extending the current cycle or close it
        rec(close_cycle(cycles, cyc), [], rem_nonloop, fresh_loop, open_halves, rem_leaves)
        rec(cycles, cyc, rem_nonloop, fresh_loop, open_halves, rem_leaves)

    rec((), [], nonloop, 0, [], n_leaves)
    return sorted(results)


def _local_canonical(cycles):
    """Canonical representative of a local structure under cycle rotations,
    cycle reordering and renaming of same-vertex loops/halves."""
    best = None
    variants = []
    rots = []
    for cyc in cycles:
        rots.append([cyc[i:] + cyc[:i] for i in range(len(cyc))])
    for perm in itertools.permutations(range(len(cycles))):
        for combo in itertools.product(*[rots[i] for i in perm]):
            variants.append(combo)
    for var in variants:
        rename = {}
        out = []
        for cyc in var:
            c2 = []
            for tok in cyc:
                if tok[0] in ("L", "e"):
                    c2.append(tok)
                else:
                    _, li, _ = tok
                    if li not in rename:
                        rename[li] = len(rename)
                        c2.append(("p", rename[li], 0))
                    else:
                        c2.append(("p", rename[li], 1))
            out.append(tuple(c2))
        cand = tuple(out)
        if best is None or cand < best:
            best = cand
    return best


def enumerate_connected_ribbon(profile: TruncationProfile, colors):
    """One canonical representative per nonzero oriented iso class of
    connected B-colored stable ribbon graphs with e <= max_edges,
    l <= max_leaves and total defect (in the underlying-stable-graph sense)
    <= max_genus_defect, over the given color set."""
    from .stable_graphs import _connected_skeletons, _compositions

    colors = tuple(sorted(colors))
    out = []
    seen = set()
    for e in range(profile.max_edges + 1):
        for edges, nv in _connected_skeletons(e):
            for ltotal in range(profile.max_leaves + 1):
                for leaves in _compositions(ltotal, nv):
                    for g in _assemblies(edges, nv, leaves, profile.max_genus_defect, colors):
                        cls = canonicalize_ribbon(g)
                        if cls.is_zero or cls.key in seen:
                            continue
                        seen.add(cls.key)
                        out.append(OrientedRibbonClass(cls.canonical, 1, False))
    out.sort(key=lambda c: c.key)
    return out


def _assemblies(edges, nv, leaves, defect_budget, colors):
    """All decorated ribbon structures over a fixed multigraph skeleton."""
    # slot tokens per vertex
    nonloop_at = [[] for _ in range(nv)]
    loops_at = [[] for _ in range(nv)]
    for k, (u, v) in enumerate(edges):
        if u == v:
            loops_at[u].append(k)
        else:
            nonloop_at[u].append((k, 0))
            nonloop_at[v].append((k, 1))

    locals_per_vertex = []
    for v in range(nv):
        nl = [("e", t) for t in nonloop_at[v]]
        budget_here = defect_budget + 1  # cycles bounded by defect budget + 1
        structs = _vertex_cycle_structures(
            [t for _, t in nl], len(loops_at[v]), leaves[v], budget_here
        )
        if not structs:
            return
        locals_per_vertex.append(structs)

    for combo in itertools.product(*locals_per_vertex):
        extra_cycles = sum(len(st) - 1 for st in combo)
        if extra_cycles > defect_budget:
            continue
        # distribute genus and boundary defects within the remaining budget
        room = defect_budget - extra_cycles
        for gdist, bdist in _defect_distributions(nv, room, colors):
            g = _build_ribbon(edges, nv, leaves, loops_at, combo, gdist, bdist)
            if g is None:
                continue
            yield from _colorings(g, colors)


def _defect_distributions(nv, room, colors):
    """(g(v)) and (b_c(v)) tuples with sum of 2g + sum b <= room."""
    from .stable_graphs import _compositions

    for gtotal in range(room // 2 + 1):
        for gdist in _compositions(gtotal, nv):
            brem = room - 2 * gtotal
            for btotal in range(brem + 1):
                for flat in _compositions(btotal, nv * len(colors)):
                    bdist = []
                    for v in range(nv):
                        chunk = flat[v * len(colors):(v + 1) * len(colors)]
                        bdist.append(tuple(
                            (c, n) for c, n in zip(colors, chunk) if n
                        ))
                    yield gdist, tuple(bdist)


def _build_ribbon(edges, nv, leaves, loops_at, combo, gdist, bdist):
    """Instantiate half-edge ids for a choice of local structures."""
    ne = len(edges)
    next_leaf = 2 * ne
    vertices = []
    for v in range(nv):
        structs = combo[v]
        loop_ids = sorted(loops_at[v])
        cycles = []
        for cyc in structs:
            ch = []
            for tok in cyc:
                if tok[0] == "L":
                    ch.append(next_leaf)
                    next_leaf += 1
                elif tok[0] == "e":
                    k, end = tok[1]
                    ch.append(2 * k + end)
                else:
                    _, li, half = tok
                    ch.append(2 * loop_ids[li] + half)
            cycles.append(tuple(ch))
        vd = (tuple(cycles), gdist[v], bdist[v])
        # stability check
        size = sum(len(c) for c in cycles)
        if gdist[v] == 0 and not bdist[v] and len(cycles) == 1 and size < 3:
            return None
        vertices.append(vd)
    sigma1 = {}
    for k in range(ne):
        sigma1[2 * k], sigma1[2 * k + 1] = 2 * k + 1, 2 * k
    for h in range(2 * ne, next_leaf):
        sigma1[h] = h
    orientation = [(2 * k, 2 * k + 1) for k in range(ne)]
    chi0 = {h: None for h in sigma1}
    g = StableRibbonGraph(vertices, sigma1, chi0, orientation, check=False)
    return g


def _colorings(g: StableRibbonGraph, colors):
    """All corner colorings constant on arcs."""
    arcs = []
    for face in g.faces():
        arcs.extend(g._arcs_of_face(face))
    for assignment in itertools.product(colors, repeat=len(arcs)):
        chi = {}
        for arc, c in zip(arcs, assignment):
            for h in arc:
                chi[h] = c
        yield StableRibbonGraph(g.vertices, g.sigma1, chi, g.orientation, check=False)
