import pytest

from ribbonint.mapcore import circle_graph, disk, exceptional, face_tag, ghost, trace
from ribbonint.nodal import (
    EdgeRecord,
    NodalError,
    assemble,
    edge_inventory,
    is_odd,
    nodal_aut_order,
    nodal_canonical_code,
    smooth,
)


def marked_verts(comp):
    return sorted(comp.marked)


def tau0_sigma0_graph():
    """disk(0,1,1) noded to exceptional(1): the <tau_0 sigma_0> graph."""
    d, e = disk(), exceptional(1)
    return assemble([d, e], [((0, marked_verts(d)[0]), (1, marked_verts(e)[0]))])


def sigma0_cubed_graph():
    """ghost with its three marked points noded to three exceptional(1)."""
    g = ghost()
    comps = [g, exceptional(1), exceptional(1), exceptional(1)]
    nodes = [
        ((0, v), (i + 1, marked_verts(comps[i + 1])[0]))
        for i, v in enumerate(marked_verts(g))
    ]
    return assemble(comps, nodes)


def bigon_disk():
    """The (0,2,1) graph: two marked points on the boundary of one face."""
    return circle_graph(2, face_tag(1))


def test_assemble_examples():
    g = tau0_sigma0_graph()
    assert len(g.nodes) == 1
    assert g.free_marked == frozenset()
    g3 = sigma0_cubed_graph()
    assert len(g3.nodes) == 3


def test_assemble_ghost_with_illegal_rejected():
    g, d = ghost(), disk()
    with pytest.raises(NodalError, match="ghost-with-illegal"):
        assemble([g, d], [((1, marked_verts(d)[0]), (0, marked_verts(g)[0]))])


def test_assemble_exceptional_with_legal_rejected():
    e, d = exceptional(1), disk()
    with pytest.raises(NodalError, match="exceptional-with-legal"):
        assemble([e, d], [((0, marked_verts(e)[0]), (1, marked_verts(d)[0]))])


def test_assemble_duplicate_endpoint_rejected():
    b = bigon_disk()
    e = exceptional(2)
    v = marked_verts(b)[0]
    w1, w2 = marked_verts(e)
    with pytest.raises(NodalError, match="duplicate"):
        assemble([b, e], [((0, v), (1, w1)), ((0, v), (1, w2))])


def test_assemble_disconnected_rejected():
    with pytest.raises(NodalError, match="disconnected"):
        assemble([disk(), circle_graph(1, face_tag(2))], [])


def test_is_odd_examples():
    assert is_odd(tau0_sigma0_graph(), "extended")
    assert is_odd(sigma0_cubed_graph(), "extended")
    # disk with 2 legal endpoints on its boundary: even count
    b = bigon_disk()
    e = exceptional(2)
    v1, v2 = marked_verts(b)
    w1, w2 = marked_verts(e)
    g = assemble([b, e], [((0, v1), (1, w1)), ((0, v2), (1, w2))])
    assert not is_odd(g, "extended")
    # bare disk with its free marked point: odd in critical mode
    bare = assemble([disk()], [])
    assert is_odd(bare, "critical")


def test_smooth_two_disks_one_node():
    d1, d2 = disk(), circle_graph(1, face_tag(2))
    g = assemble([d1, d2], [((0, marked_verts(d1)[0]), (1, marked_verts(d2)[0]))])
    prof = smooth(g)
    assert (prof.b, prof.genus) == (1, 0)


def test_smooth_self_node_annulus():
    b = bigon_disk()
    v, w = marked_verts(b)
    g = assemble([b], [((0, v), (0, w))])
    prof = smooth(g)
    assert (prof.b, prof.genus) == (2, 1)
    assert prof.kbar == (0, 0)


def test_smooth_ghost_plus_three_exceptional():
    prof = smooth(sigma0_cubed_graph())
    assert (prof.b, prof.genus) == (1, 0)
    assert prof.exc == (0, 0, 0)


def test_smooth_free_marks_partition():
    bare_ghost = assemble([ghost()], [])
    prof = smooth(bare_ghost)
    assert (prof.b, prof.genus, prof.kbar) == (1, 0, (3,))


def test_smooth_genus_crosscheck():
    # genus equals 1 - chi with chi = sum(1 - g_i) - nodes, for every example
    for g in (tau0_sigma0_graph(), sigma0_cubed_graph(), assemble([ghost()], [])):
        prof = smooth(g)
        chi = sum(1 - trace(c).genus for c in g.components) - len(g.nodes)
        assert prof.genus == 1 - chi
        assert prof.b <= prof.genus + 1
        assert (prof.b - prof.genus) % 2 == 1
        assert sum(prof.kbar) == len(g.free_marked)


def test_nodal_aut_orders():
    assert nodal_aut_order(tau0_sigma0_graph()) == 1
    assert nodal_aut_order(sigma0_cubed_graph()) == 3
    # single component graph: the free mark pins nothing extra
    assert nodal_aut_order(assemble([ghost()], [])) == 3
    # self-node on the bigon: the rotation exchanges legal and illegal sides
    b = bigon_disk()
    v, w = marked_verts(b)
    assert nodal_aut_order(assemble([b], [((0, v), (0, w))])) == 1


def test_nodal_codes_identify_isomorphs():
    # attach the ghost's marked points to three exceptionals in two different
    # orders: isomorphic assemblies, equal codes
    g = ghost()
    vs = marked_verts(g)
    comps = [g, exceptional(1), exceptional(1), exceptional(1)]
    w = [marked_verts(c)[0] for c in comps[1:]]
    g1 = assemble(comps, [((0, vs[i]), (i + 1, w[i])) for i in range(3)])
    g2 = assemble(
        comps,
        [((0, vs[1]), (1, w[0])), ((0, vs[2]), (2, w[1])), ((0, vs[0]), (3, w[2]))],
    )
    assert nodal_canonical_code(g1) == nodal_canonical_code(g2)
    # a structurally different pairing: bigon with self-node vs bare bigon
    b = bigon_disk()
    v, wv = marked_verts(b)
    self_noded = assemble([b], [((0, v), (0, wv))])
    assert nodal_canonical_code(self_noded) != nodal_canonical_code(assemble([b], []))


def test_edge_inventory_tau0_sigma0():
    recs = edge_inventory(tau0_sigma0_graph())
    assert recs == [EdgeRecord("boundary", (1,), 0)]


def test_edge_inventory_ghost_edges_weightless():
    recs = edge_inventory(sigma0_cubed_graph())
    assert len(recs) == 3
    assert all(r.kind == "boundary" and r.faces == (None,) and r.m == 0 for r in recs)


def test_edge_inventory_self_node_bigon():
    b = bigon_disk()
    v, w = marked_verts(b)
    g = assemble([b], [((0, v), (0, w))])
    recs = edge_inventory(g)
    assert recs == [EdgeRecord("boundary", (1,), 1)]
