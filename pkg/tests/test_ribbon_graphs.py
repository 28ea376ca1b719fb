import itertools

import pytest

from ribbonlab.algebra import FormalSum, TruncationProfile
from ribbonlab.ribbon_graphs import (
    NON_CONTRACTIBLE,
    StableRibbonGraph,
    arithmetic_genus,
    canonicalize_ribbon,
    colors_match,
    contract_edge_ribbon,
    enumerate_connected_ribbon,
    faces,
    glue_leaves_disjoint,
    ribbon_boundary,
    ribbon_from_key,
    self_glue_leaves,
    underlying_stable_graph,
)
from ribbonlab.stable_graphs import StableGraph, contract_edge_graph
from ribbonlab.stable_graphs import canonicalize as canonicalize_graph

STAR = "*"


def mono(hs):
    return {h: STAR for h in hs}


def figure_eight():
    # one vertex, one cycle (0 1 2 3), edges {0,1} and {2,3}
    return StableRibbonGraph(
        [(((0, 1, 2, 3),), 0, ())],
        {0: 1, 1: 0, 2: 3, 3: 2},
        mono(range(4)),
        [(0, 1), (2, 3)],
    )


def plus_tree():
    return StableRibbonGraph(
        [(((0, 1, 2, 3),), 0, ())],
        {h: h for h in range(4)},
        mono(range(4)),
        [],
    )


def tripod(chi=None):
    return StableRibbonGraph(
        [(((0, 1, 2),), 0, ())],
        {h: h for h in range(3)},
        chi or mono(range(3)),
        [],
    )


def test_figure_eight_faces_and_genus():
    g = figure_eight()
    assert len(g.faces()) == 3
    assert arithmetic_genus(g) == 0
    st = g.stats()
    assert (st.v, st.e, st.f) == (1, 2, 3)
    # Euler identity for a pure ribbon graph
    assert 2 - 2 * st.arithmetic_genus == st.v - st.e + st.f


def test_plus_tree_faces_and_boundaries():
    g = plus_tree()
    assert len(g.faces()) == 1
    assert len(g.free_boundaries()) == 4
    assert g.is_ribbon_tree()


def test_tripod_single_face():
    g = tripod()
    fs = faces(g)
    assert len(fs) == 1 and fs[0][1] == 3


def test_genus_defect_only():
    g = StableRibbonGraph(
        [(((0,),), 1, ())], {0: 0}, mono([0]), []
    )
    assert arithmetic_genus(g) == 1


def test_ribbon_tree_genus_zero():
    # any tree of tripods has f=1, genus 0
    t1, t2 = tripod(), tripod()
    glued = glue_leaves_disjoint(t1, 0, t2, 1)
    assert glued.is_ribbon_tree()
    assert arithmetic_genus(glued) == 0


def test_contract_rule1_main():
    t1, t2 = tripod(), tripod()
    g = glue_leaves_disjoint(t1, 0, t2, 1)
    res = contract_edge_ribbon(g, 0)
    assert res is not NON_CONTRACTIBLE
    gg, sign = res
    assert sign == 1
    assert gg.n_vertices == 1 and gg.n_cycles == 1 and gg.n_leaves == 4
    assert gg.is_ribbon_tree()


def test_contract_rule2_main():
    # loop joining two distinct cycles of one vertex
    g = StableRibbonGraph(
        [(((0, 2), (1, 3)), 0, ())],
        {0: 1, 1: 0, 2: 2, 3: 3},
        mono(range(4)),
        [(0, 1)],
    )
    gg, _ = contract_edge_ribbon(g, 0)
    assert gg.n_cycles == 1 and gg.genus_defect(0) == 1
    assert arithmetic_genus(gg) == arithmetic_genus(g)


def test_contract_rule1_special_noncontractible():
    # both endpoint cycles are single half-edges and the only cycles
    g = StableRibbonGraph(
        [(((0,),), 1, ()), (((1,),), 1, ())],
        {0: 1, 1: 0},
        mono(range(2)),
        [(0, 1)],
    )
    assert contract_edge_ribbon(g, 0) is NON_CONTRACTIBLE


def test_contract_rule1_special_face_deletion():
    # singleton cycles at both ends, but other cycles survive: the empty
    # colored face dies into a boundary defect
    g = StableRibbonGraph(
        [(((0,), (2, 3, 4)), 0, ()), (((1,), (5, 6, 7)), 0, ())],
        {0: 1, 1: 0, **{h: h for h in range(2, 8)}},
        mono(range(8)),
        [(0, 1)],
    )
    gg, _ = contract_edge_ribbon(g, 0)
    assert gg.n_vertices == 1
    assert gg.boundary_defect(0) == {STAR: 1}
    assert gg.f_tot() == g.f_tot()
    assert arithmetic_genus(gg) == arithmetic_genus(g)


def test_contract_rule3_split():
    # loop inside one cycle with letters on both sides: the cycle splits
    g = StableRibbonGraph(
        [(((0, 2, 1, 3),), 0, ())],
        {0: 1, 1: 0, 2: 2, 3: 3},
        mono(range(4)),
        [(0, 1)],
    )
    gg, _ = contract_edge_ribbon(g, 0)
    assert gg.n_cycles == 2 and gg.genus_defect(0) == 0
    assert arithmetic_genus(gg) == arithmetic_genus(g)


def test_contract_rule3_adjacent_boundary_defect():
    # endpoints adjacent in the cycle: no split, boundary defect +1
    g = StableRibbonGraph(
        [(((0, 1, 2, 3),), 0, ())],
        {0: 1, 1: 0, 2: 2, 3: 3},
        mono(range(4)),
        [(0, 1)],
    )
    gg, _ = contract_edge_ribbon(g, 0)
    assert gg.n_cycles == 1 and gg.boundary_defect(0) == {STAR: 1}
    assert gg.f_tot() == g.f_tot()


def test_contract_rule3_two_halfedge_cycle():
    # cycle consisting of exactly the loop, with another cycle present
    g = StableRibbonGraph(
        [(((0, 1), (2, 3, 4)), 0, ())],
        {0: 1, 1: 0, 2: 2, 3: 3, 4: 4},
        mono(range(5)),
        [(0, 1)],
    )
    gg, _ = contract_edge_ribbon(g, 0)
    assert gg.boundary_defect(0) == {STAR: 2}
    assert gg.f_tot() == g.f_tot()


def test_contract_rule3_lattermost_noncontractible():
    g = StableRibbonGraph(
        [(((0, 1),), 1, ())],
        {0: 1, 1: 0},
        mono(range(2)),
        [(0, 1)],
    )
    assert contract_edge_ribbon(g, 0) is NON_CONTRACTIBLE


def test_underlying_graph_examples():
    assert underlying_stable_graph(tripod()) == StableGraph((), (3,), (0,))
    f8 = underlying_stable_graph(figure_eight())
    assert f8.edges == ((0, 0), (0, 0)) and f8.o == (0,)
    # one-vertex one-cycle generators project to zero defect
    s5 = StableRibbonGraph(
        [(((0, 1, 2, 3, 4),), 0, ())], {h: h for h in range(5)}, mono(range(5)), []
    )
    assert underlying_stable_graph(s5) == StableGraph((), (5,), (0,))


def test_projection_commutes_with_contraction():
    profile = TruncationProfile(max_edges=2, max_leaves=2, max_genus_defect=1)
    for cls in enumerate_connected_ribbon(profile, (STAR,)):
        g = cls.canonical
        for k in range(g.n_edges):
            res = contract_edge_ribbon(g, k)
            down = contract_edge_graph(underlying_stable_graph(g), k)
            if res is NON_CONTRACTIBLE:
                assert down is None
                continue
            gg, sign = res
            assert down is not None
            lhs = canonicalize_graph(underlying_stable_graph(gg))
            assert (lhs.key, sign * lhs.sign) == (
                (down.key, down.sign)
                if not (lhs.is_zero or down.is_zero)
                else (lhs.key, sign * lhs.sign)
            ) or (lhs.is_zero and down.is_zero)


def test_boundary_preserves_genus_and_ftot():
    profile = TruncationProfile(max_edges=2, max_leaves=2, max_genus_defect=1)
    for cls in enumerate_connected_ribbon(profile, (STAR,)):
        g = cls.canonical
        ag, ft = arithmetic_genus(g), g.f_tot()
        for k in range(g.n_edges):
            res = contract_edge_ribbon(g, k)
            if res is NON_CONTRACTIBLE:
                continue
            gg, _ = res
            assert arithmetic_genus(gg) == ag
            assert gg.f_tot() == ft


def test_d_squared_zero_ribbon_small():
    profile = TruncationProfile(max_edges=3, max_leaves=2, max_genus_defect=1)
    for cls in enumerate_connected_ribbon(profile, (STAR,)):
        first = ribbon_boundary(cls.canonical)
        total = FormalSum()
        for key, c in first.t.items():
            for key2, c2 in ribbon_boundary(ribbon_from_key(key)).t.items():
                total.add_term(key2, c * c2)
        assert total.is_zero(), cls.key


def test_d_squared_zero_ribbon_two_colors():
    profile = TruncationProfile(max_edges=2, max_leaves=2, max_genus_defect=1)
    for cls in enumerate_connected_ribbon(profile, ("a", "b")):
        first = ribbon_boundary(cls.canonical)
        total = FormalSum()
        for key, c in first.t.items():
            for key2, c2 in ribbon_boundary(ribbon_from_key(key)).t.items():
                total.add_term(key2, c * c2)
        assert total.is_zero(), cls.key


def test_euler_identity_on_enumerated_ribbon_graphs():
    profile = TruncationProfile(max_edges=3, max_leaves=2, max_genus_defect=0)
    for cls in enumerate_connected_ribbon(profile, (STAR,)):
        g = cls.canonical
        if g.is_ribbon_graph():
            st = g.stats()
            assert 2 - 2 * st.arithmetic_genus == st.v - st.e + st.f


def test_canonicalize_relabel_invariance():
    g = figure_eight()
    # relabel half-edges by an arbitrary bijection
    perm = {0: 2, 1: 3, 2: 1, 3: 0}
    g2 = StableRibbonGraph(
        [(tuple(tuple(perm[h] for h in cyc) for cyc in cycles), gv, bv)
         for cycles, gv, bv in g.vertices],
        {perm[a]: perm[b] for a, b in g.sigma1.items()},
        {perm[a]: c for a, c in g.chi.items()},
        [tuple(sorted((perm[a], perm[b]))) for (a, b) in g.orientation],
    )
    c1, c2 = canonicalize_ribbon(g), canonicalize_ribbon(g2)
    assert c1.key == c2.key


def test_figure_eight_is_zero_class():
    # swapping the two loops of the figure 8 reverses the orientation
    assert canonicalize_ribbon(figure_eight()).is_zero


def test_canonicalize_idempotent():
    t1, t2 = tripod(), tripod()
    g = self_glue_leaves(glue_leaves_disjoint(t1, 0, t2, 1), 1, 2)
    cls = canonicalize_ribbon(g)
    again = canonicalize_ribbon(cls.canonical)
    assert again.key == cls.key and again.sign == 1 and not again.is_zero


def test_orientation_reversal_flips_sign():
    t1, t2 = tripod(), tripod()
    g = glue_leaves_disjoint(t1, 0, t2, 1)
    g = self_glue_leaves(g, 1, 2)  # add a second edge
    rev = StableRibbonGraph(g.vertices, g.sigma1, g.chi, list(g.orientation)[::-1])
    c1, c2 = canonicalize_ribbon(g), canonicalize_ribbon(rev)
    assert c1.key == c2.key and c1.sign == -c2.sign


def test_zero_class_detection():
    # two bigon vertices joined by two parallel edges; swapping the edges is
    # an orientation-reversing automorphism
    g = StableRibbonGraph(
        [(((0, 2),), 1, ()), (((1, 3),), 1, ())],
        {0: 1, 1: 0, 2: 3, 3: 2},
        mono(range(4)),
        [(0, 1), (2, 3)],
    )
    assert canonicalize_ribbon(g).is_zero


def test_color_matching_rules():
    t1 = tripod({0: "a", 1: "b", 2: "b"})
    t2 = tripod({0: "a", 1: "b", 2: "b"})
    # leaf 0 of t1 has s = chi(0) = a, t = chi(2) = b; gluing to leaf l2 needs
    # chi(l2) = b and chi(sigma0^{-1} l2) = a
    assert colors_match(t1, 0, t2, 1)
    assert not colors_match(t1, 0, t2, 0)
    assert glue_leaves_disjoint(t1, 0, t2, 0) is None


def test_self_glue_modes_change_faces_as_expected():
    g = plus_tree()
    # leaves 0 and 2 are in the same (single) face
    glued = self_glue_leaves(g, 0, 2)
    assert len(glued.faces()) == len(g.faces()) + 1
    assert arithmetic_genus(glued) == arithmetic_genus(g)


def test_enumerate_tripod_one_color():
    profile = TruncationProfile(max_edges=0, max_leaves=3, max_genus_defect=0)
    classes = enumerate_connected_ribbon(profile, (STAR,))
    assert len(classes) == 1


def test_enumerate_tripod_two_colors_necklaces():
    profile = TruncationProfile(max_edges=0, max_leaves=3, max_genus_defect=0)
    classes = enumerate_connected_ribbon(profile, ("a", "b"))
    assert len(classes) == 4  # binary necklaces of length 3


# -- brute-force oracle --------------------------------------------------------


def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def brute_force_ribbon(n_edges, n_leaves, colors=(STAR,), max_defect=0):
    """All labeled (sigma0, vertex grouping, defects, colorings) structures
    with a fixed sigma1, bucketed by canonical key."""
    h = 2 * n_edges + n_leaves
    sigma1 = {}
    for k in range(n_edges):
        sigma1[2 * k], sigma1[2 * k + 1] = 2 * k + 1, 2 * k
    for x in range(2 * n_edges, h):
        sigma1[x] = x
    orientation = [(2 * k, 2 * k + 1) for k in range(n_edges)]
    keys = set()
    for perm in itertools.permutations(range(h)):
        # read the permutation as sigma0; extract its cycles
        seen = set()
        cycles = []
        for start in range(h):
            if start in seen:
                continue
            cyc = [start]
            seen.add(start)
            x = perm[start]
            while x != start:
                cyc.append(x)
                seen.add(x)
                x = perm[x]
            cycles.append(tuple(cyc))
        for grouping in _set_partitions(list(range(len(cycles)))):
            for gtot in range(max_defect + 1):
                vertices = []
                ok = True
                for block in grouping:
                    cycs = tuple(cycles[i] for i in block)
                    size = sum(len(c) for c in cycs)
                    if gtot == 0 and len(cycs) == 1 and size < 3:
                        ok = False
                        break
                    vertices.append((cycs, 0, ()))
                if not ok or gtot > 0:
                    continue
                extra = sum(len(cycs) - 1 for cycs, _, _ in vertices)
                if extra > max_defect:
                    continue
                g0 = StableRibbonGraph(vertices, sigma1, {x: None for x in range(h)},
                                       orientation, check=False)
                if not g0.is_connected():
                    continue
                arcs = []
                for face in g0.faces():
                    arcs.extend(g0._arcs_of_face(face))
                for assign in itertools.product(colors, repeat=len(arcs)):
                    chi = {}
                    for arc, c in zip(arcs, assign):
                        for x in arc:
                            chi[x] = c
                    g = StableRibbonGraph(g0.vertices, sigma1, chi, orientation)
                    cls = canonicalize_ribbon(g)
                    if not cls.is_zero:
                        keys.add(cls.key)
    return keys


@pytest.mark.parametrize("e,l,colors", [(0, 3, (STAR,)), (0, 3, ("a", "b")),
                                        (1, 1, (STAR,)), (2, 0, (STAR,)),
                                        (1, 2, (STAR,))])
def test_ribbon_enumeration_matches_brute_force(e, l, colors):
    profile = TruncationProfile(max_edges=e, max_leaves=l, max_genus_defect=1)
    def pure(k):
        g = ribbon_from_key(k)
        return g.total_defect() == g.n_cycles - g.n_vertices  # g = b = 0

    enumerated = {
        c.key
        for c in enumerate_connected_ribbon(profile, colors)
        if c.canonical.n_edges == e and c.canonical.n_leaves == l and pure(c.key)
    }
    brute = {k for k in brute_force_ribbon(e, l, colors, max_defect=1) if pure(k)}
    assert enumerated == brute
