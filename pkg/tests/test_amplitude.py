from fractions import Fraction

import pytest

from ribbonint.amplitude import (
    CorrelatorKey,
    CorrelatorTable,
    SpuriousMonomialError,
    component_constant,
    contribution,
    edge_weight,
    ext_value,
    extended_table,
    kp_contribution,
    kp_table,
    refined_table,
    verify_collapse,
    verify_conjecture,
    verify_dilaton,
    verify_parity,
    verify_partition_sum,
    verify_string,
    very_refined_table,
)
from ribbonint.exactmath import EdgeFactor, NPoly
from ribbonint.mapcore import circle_graph, disk, exceptional, face_tag, ghost
from ribbonint.nodal import EdgeRecord, assemble

N = NPoly.n_power(1)
N2_HALF = NPoly.n_power(2, Fraction(1, 2))


def test_edge_weight_dictionary():
    assert edge_weight(EdgeRecord("internal", (1, 2))) == EdgeFactor.inverse_sum(0, 1)
    # boundary edge of face 1 with m = 2: (1/3) C(4,2) = 2 times lambda^-5
    w = edge_weight(EdgeRecord("boundary", (1,), 2))
    assert w == EdgeFactor.pure_power(0, -5, 2)
    assert edge_weight(EdgeRecord("boundary", (None,), 0)) == EdgeFactor.unit(1)


def test_component_constants():
    assert component_constant(ghost()) == Fraction(1, 2)
    assert component_constant(disk()) == 1
    assert component_constant(exceptional(4)) == Fraction(1, 6)
    assert component_constant(exceptional(1)) == 1
    # bigon disk: e_I=0, v_I=0, v_B3=0, v_BM=2, b=1 -> 2^-1
    assert component_constant(circle_graph(2, face_tag(1))) == Fraction(1, 2)


def test_contribution_tau0_sigma0():
    d, e = disk(), exceptional(1)
    g = assemble([d, e], [((0, 0), (1, 0))])
    c = contribution(g)
    assert c.scalar == 1
    assert c.n_power == 1
    assert c.s_monomial == (0,)
    assert c.factors == (EdgeFactor.pure_power(0, -1),)


def test_contribution_sigma0_cubed():
    gh = ghost()
    comps = [gh] + [exceptional(1)] * 3
    nodes = [((0, v), (i + 1, 0)) for i, v in enumerate(sorted(gh.marked))]
    g = assemble(comps, nodes)
    c = contribution(g)
    assert c.scalar == Fraction(1, 6)
    assert c.n_power == 1
    assert c.s_monomial == (0, 0, 0)
    assert all(f.kind == "unit" for f in c.factors)


def test_contribution_bare_ghost():
    c = contribution(assemble([ghost()], []))
    assert c.scalar == Fraction(1, 6)
    assert c.n_power == 1


def test_foundational_values():
    ext = extended_table(6)
    assert ext_value(ext, (0,), (0,)) == N
    assert ext_value(ext, (), (0, 0, 0)) == N
    assert ext_value(ext, (0, 0), (1,)) == N
    assert ext_value(ext, (1,), ()) == N2_HALF
    kp = kp_table(2, 3)
    assert kp.get(CorrelatorKey("kp", 0, thetas=(1, 2))) == NPoly.n_power(1, 2)
    assert kp.get(CorrelatorKey("kp", 1, thetas=(3,))) == NPoly.n_power(2, Fraction(3, 2))


def test_dimension_violations_are_absent():
    ext = extended_table(6)
    assert ext_value(ext, (0,), ()).is_zero()  # degree 1 not divisible by 3
    assert ext_value(ext, (0, 0), ()).is_zero()


def test_refined_very_refined_ghost_sector():
    ref = refined_table(6)
    assert ref.get(CorrelatorKey("refined", 0, taus=(), k=3, b=1)) == N
    vref = very_refined_table(6)
    assert vref.get(
        CorrelatorKey("very_refined", 0, taus=(), k=3, kbar=(3,))
    ) == N


def test_identities_at_degree_six():
    ext = extended_table(6)
    kp = kp_table(3, 6)
    ref = refined_table(6)
    vref = very_refined_table(6)
    assert verify_string(ext, 6).passed
    assert verify_dilaton(ext, 6).passed
    assert verify_parity([ext, kp, ref, vref]).passed
    assert verify_collapse(ext, ref, 6).passed
    assert verify_partition_sum(ref, vref).passed
    conj = verify_conjecture(ext, kp, 6)
    assert conj.passed
    assert all(e["match"] for e in conj.evidence)


def test_string_detects_corruption():
    ext = extended_table(6)
    key = CorrelatorKey("extended", 0, taus=(0,), sigmas=(0,))
    ext.put(key, NPoly.n_power(1, 7))
    report = verify_string(ext, 6)
    assert not report.passed


def test_parity_detects_corruption():
    table = CorrelatorTable()
    table.put(CorrelatorKey("extended", 0, taus=(0,), sigmas=(0,)), NPoly.constant(1))
    assert not verify_parity([table]).passed


def test_table_serialization_round_trip():
    ext = extended_table(3)
    rows = ext.to_json()
    assert rows
    for row in rows:
        assert set(row) >= {"family", "genus", "taus", "sigmas", "value"}
    csv_rows = ext.to_csv_rows()
    assert csv_rows[0] == ["family", "genus", "insertions", "value"]
    assert len(csv_rows) == len(rows) + 1


def test_spurious_window_guard():
    # an incomplete "sector" (single lollipop without its partners) leaves
    # weight outside the target basis and must be rejected
    from ribbonint.amplitude import Contribution, _extract_open, _sum_sector

    lone = Contribution(
        factors=(
            EdgeFactor.pure_power(0, -1),
            EdgeFactor.inverse_sum(0, 1),
            EdgeFactor.inverse_sum(0, 0),
        ),
        n_power=1,
        s_monomial=(),
        scalar=Fraction(1),
    )
    total = _sum_sector([lone], 2)
    with pytest.raises(SpuriousMonomialError):
        _extract_open(total, 2, 3)
