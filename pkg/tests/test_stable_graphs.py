import itertools

import pytest

from ribbonlab.algebra import FormalSum, TruncationProfile
from ribbonlab.stable_graphs import (
    StableGraph,
    betti_number,
    boundary,
    canonicalize,
    contract_edge_graph,
    enumerate_connected_graphs,
    from_halfedge_data,
    graph_differential,
)

TRIPOD = StableGraph(edges=(), leaves=(3,), o=(0,))


def G(n, g):
    """One vertex, no edges, n leaves, loop defect g."""
    return StableGraph(edges=(), leaves=(n,), o=(g,))


def test_betti_tripod():
    assert betti_number(TRIPOD) == 0


def test_betti_single_loop():
    g = StableGraph(edges=((0, 0),), leaves=(1,), o=(0,))
    assert betti_number(g) == 1


@pytest.mark.parametrize("n,g", [(1, 1), (2, 1), (3, 0), (4, 2)])
def test_betti_generator_family(n, g):
    # direct evaluation of the Betti formula on one-vertex generators
    assert betti_number(G(n, g)) == 1 - 1 + 0 + g


def test_betti_requires_connected():
    g = StableGraph(edges=(), leaves=(3, 3), o=(0, 0))
    with pytest.raises(ValueError):
        betti_number(g)


def test_stability_validation():
    with pytest.raises(ValueError):
        StableGraph(edges=(), leaves=(2,), o=(0,))
    with pytest.raises(ValueError):
        StableGraph(edges=(), leaves=(0,), o=(1,))
    StableGraph(edges=(), leaves=(1,), o=(1,))  # o=1 permits valence 1


def test_contract_two_vertex_tree():
    g = StableGraph(edges=((0, 1),), leaves=(2, 2), o=(0, 0))
    cls = contract_edge_graph(g, 0)
    assert cls.canonical == StableGraph(edges=(), leaves=(4,), o=(0,))
    assert cls.sign == 1


def test_contract_loop():
    g = StableGraph(edges=((0, 0),), leaves=(3,), o=(0,))
    cls = contract_edge_graph(g, 0)
    assert cls.canonical == G(3, 1)


def test_contract_would_empty_vertex_is_zero():
    g = StableGraph(edges=((0, 0),), leaves=(0,), o=(1,))
    assert contract_edge_graph(g, 0) is None
    two = StableGraph(edges=((0, 1),), leaves=(0, 0), o=(1, 1))
    assert contract_edge_graph(two, 0) is None


def test_contraction_orientation_parity():
    # two orientations of the same 2-edge graph differ by the edge swap
    g1 = StableGraph(edges=((0, 1), (1, 2)), leaves=(2, 1, 2), o=(0, 0, 0))
    g2 = StableGraph(edges=((1, 2), (0, 1)), leaves=(2, 1, 2), o=(0, 0, 0))
    c1 = contract_edge_graph(g1, 1)
    c2 = contract_edge_graph(g2, 0)
    assert c1.canonical == c2.canonical
    assert c1.sign == -c2.sign


def test_canonicalize_idempotent_and_sign():
    g = StableGraph(edges=((0, 1),), leaves=(3, 2), o=(0, 1))
    cls = canonicalize(g)
    again = canonicalize(cls.canonical)
    assert again.canonical == cls.canonical and again.sign == 1


def test_zero_class_parallel_edges():
    g = StableGraph(edges=((0, 1), (0, 1)), leaves=(1, 1), o=(0, 0))
    assert canonicalize(g).is_zero


def test_zero_class_double_loop():
    g = StableGraph(edges=((0, 0), (0, 0)), leaves=(0,), o=(0,))
    assert canonicalize(g).is_zero


def test_differential_no_edges_is_zero():
    assert boundary(TRIPOD).is_zero()


def test_differential_single_term():
    g = StableGraph(edges=((0, 1),), leaves=(2, 2), o=(0, 0))
    d = boundary(g)
    key = canonicalize(StableGraph(edges=(), leaves=(4,), o=(0,))).key
    assert d.t == {key: 1}


def test_from_halfedge_data_roundtrip():
    g = StableGraph(edges=((0, 1), (1, 1)), leaves=(2, 1), o=(0, 1))
    verts, s1, o, orient = g.halfedge_view()
    g2, _ = from_halfedge_data(verts, s1, o, orient)
    assert canonicalize(g2).key == canonicalize(g).key


# -- independent brute-force oracle ------------------------------------------


def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def brute_force_classes(n_edges, n_leaves, max_defect):
    """Enumerate every labeled half-edge structure with exactly n_edges edges
    and n_leaves leaves, bucket by canonical key."""
    h = 2 * n_edges + n_leaves
    ids = list(range(h))
    keys = set()
    for internal in itertools.combinations(ids, 2 * n_edges):
        external = [i for i in ids if i not in internal]
        for matching in _perfect_matchings(list(internal)):
            for part in _set_partitions(ids):
                nv = len(part)
                where = {}
                for vi, block in enumerate(part):
                    for x in block:
                        where[x] = vi
                for ototal in range(max_defect + 1):
                    for o in _compositions(ototal, nv):
                        try:
                            sigma1 = {i: i for i in external}
                            for (a, b) in matching:
                                sigma1[a], sigma1[b] = b, a
                            g, _ = from_halfedge_data(part, sigma1, o, list(range(n_edges)))
                        except ValueError:
                            continue
                        if not g.is_connected():
                            continue
                        cls = canonicalize(g)
                        if not cls.is_zero:
                            keys.add(cls.key)
    return keys


def _perfect_matchings(items):
    if not items:
        yield []
        return
    first = items[0]
    for i in range(1, len(items)):
        pair = (first, items[i])
        rest = items[1:i] + items[i + 1:]
        for m in _perfect_matchings(rest):
            yield [pair] + m


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@pytest.mark.parametrize(
    "e,l,o",
    [(0, 3, 0), (0, 1, 1), (1, 1, 1), (1, 2, 0), (2, 0, 1), (2, 1, 0)],
)
def test_enumeration_matches_brute_force(e, l, o):
    profile = TruncationProfile(max_edges=e, max_leaves=l, max_genus_defect=o)
    enumerated = {
        c.key
        for c in enumerate_connected_graphs(profile)
        if c.canonical.n_edges == e and c.canonical.n_leaves == l
    }
    brute = brute_force_classes(e, l, o)
    assert enumerated == brute


def test_enumerate_tripod_window():
    profile = TruncationProfile(max_edges=0, max_leaves=3, max_genus_defect=0)
    classes = enumerate_connected_graphs(profile)
    assert len(classes) == 1 and classes[0].canonical == TRIPOD


def test_enumerate_g11_window():
    profile = TruncationProfile(max_edges=0, max_leaves=1, max_genus_defect=1)
    classes = enumerate_connected_graphs(profile)
    assert len(classes) == 1 and classes[0].canonical == G(1, 1)


def test_d_squared_zero_small_window():
    profile = TruncationProfile(max_edges=3, max_leaves=3, max_genus_defect=1)
    for cls in enumerate_connected_graphs(profile):
        x = FormalSum({cls.key: 1})
        assert graph_differential(graph_differential(x)).is_zero()


def test_betti_invariant_under_contraction():
    profile = TruncationProfile(max_edges=2, max_leaves=2, max_genus_defect=1)
    for cls in enumerate_connected_graphs(profile):
        g = cls.canonical
        b = betti_number(g)
        for k in range(g.n_edges):
            c = contract_edge_graph(g, k)
            if c is not None and not c.is_zero:
                assert betti_number(c.canonical) == b
