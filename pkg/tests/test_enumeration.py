import pytest

from ribbonint.enumeration import (
    Bounds,
    BoundsError,
    component_dart_bound,
    gen_components,
    gen_extended,
    gen_kp,
    gen_nodal,
    run_partitioned,
)
from ribbonint.mapcore import automorphism_order, canonical_code, classify, trace
from ribbonint.nodal import is_odd, nodal_canonical_code, smooth


def test_components_disk_sector():
    graphs = gen_components(0, 1, 1)
    assert len(graphs) == 1
    cls = classify(graphs[0])
    assert (cls.kind, cls.genus, cls.k, cls.l) == ("critical", 0, 1, 1)


def test_components_ghost_sector():
    graphs = gen_components(0, 3, 0)
    assert len(graphs) == 1
    assert classify(graphs[0]).kind == "ghost"


def test_components_stability():
    assert gen_components(0, 0, 1) == []
    assert gen_components(0, 2, 0) == []
    assert gen_components(1, 0, 0) == []


def test_components_revalidate_and_dedup():
    for params in ((0, 2, 1), (1, 1, 1), (0, 0, 2), (1, 0, 1)):
        graphs = gen_components(*params)
        codes = [canonical_code(g) for g in graphs]
        assert codes == sorted(set(codes))
        for g in graphs:
            cls = classify(g)
            assert cls.kind in ("critical", "ghost")
            assert (cls.genus, cls.k, cls.l) == params
            tr = trace(g)
            assert tr.genus == 1 - (tr.v - tr.e + tr.f_int)
            assert tr.b <= tr.genus + 1 and (tr.b - tr.genus) % 2 == 1
            assert g.dart_count <= component_dart_bound(*params)
            assert g.dart_count % automorphism_order(g) == 0


def test_kp_minimal_sectors():
    assert gen_kp(1, 0) == []  # Euler count: v = 2(g-1+n) = 0, no valid map
    one_face = gen_kp(1, 1)
    assert len(one_face) == 1
    tr = trace(one_face[0])
    assert (tr.genus, tr.b, tr.f_int) == (1, 2, 1)
    assert automorphism_order(one_face[0]) == 2
    two_faces = gen_kp(2, 0)
    assert len(two_faces) == 3
    for g in two_faces:
        assert classify(g).kind == "critical"
        assert len(g.marked) == 0


def test_kp_duplicate_free_and_sorted():
    graphs = gen_kp(2, 1)
    codes = [canonical_code(g) for g in graphs]
    assert codes == sorted(set(codes))
    for g in graphs:
        tr = trace(g)
        e = g.dart_count // 2
        assert e == 3 * (tr.genus - 1 + tr.f_int)


def test_bounds_refusal():
    with pytest.raises(BoundsError) as err:
        gen_components(0, 1, 1, bounds=Bounds(dart_max=1))
    assert err.value.required == 2
    # a sufficient bound is accepted
    assert len(gen_components(0, 1, 1, bounds=Bounds(dart_max=2))) == 1


def test_extended_sectors():
    assert len(gen_extended(0, 1, (0,))) == 1
    assert len(gen_extended(0, 0, (0, 0, 0))) == 1
    assert gen_extended(0, 0, ()) == []
    for g in gen_extended(1, 1, ()):
        assert is_odd(g, "extended")
        prof = smooth(g)
        assert prof.genus == 1
        assert prof.kbar == (0,) * prof.b
        assert prof.b <= prof.genus + 1 and (prof.b - prof.genus) % 2 == 1


def test_nodal_sectors():
    bare_ghost = gen_nodal(0, 0, kbar=(3,))
    assert len(bare_ghost) == 1
    assert len(bare_ghost[0].nodes) == 0
    disk_sector = gen_nodal(0, 1, kbar=(1,))
    assert len(disk_sector) == 1
    assert len(disk_sector[0].components) == 1
    for g in gen_nodal(1, 1, k=0, b=2):
        assert is_odd(g, "critical")
        assert smooth(g).b == 2


def test_nodal_parity_filter():
    # b and genus of opposite parity is a hard constraint of the family
    assert gen_nodal(0, 1, k=1, b=2) == []
    assert gen_nodal(1, 1, k=0, b=1) == []


def test_nodal_kbar_vs_kb_consistency():
    by_kb = gen_nodal(0, 2, k=1, b=1)
    by_kbar = gen_nodal(0, 2, kbar=(1,))
    assert [nodal_canonical_code(g) for g in by_kb] == [
        nodal_canonical_code(g) for g in by_kbar
    ]


def test_generation_deterministic_across_threads():
    def worker(params):
        graphs = gen_components(*params)
        return {canonical_code(g): g.to_json() for g in graphs}

    tasks = [(0, 1, 1), (0, 2, 1), (0, 0, 2), (1, 1, 1)]
    serial = run_partitioned(tasks, worker, threads=1)
    threaded = run_partitioned(tasks, worker, threads=4)
    assert serial == threaded
    # repeat runs are bit-identical
    assert run_partitioned(tasks, worker, threads=2) == serial
