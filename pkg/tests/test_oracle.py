from fractions import Fraction

import pytest

from ribbonint.amplitude import CorrelatorKey, kp_table
from ribbonint.exactmath import NPoly
from ribbonint.oracle import (
    OracleError,
    VertexSpec,
    diagram,
    gaussian_pair,
    kp_free_energy,
    matchings,
    miwa_extract,
    oracle_table,
    vertex_specs,
    _miwa_monomials,
)


def test_propagator_base_case():
    # one det vertex of degree 2 at M=1 reduces to the one-variable Gaussian
    # moment <h^2> = 1/lambda: value N/2 * lambda^-2 * (1/lambda)
    part = gaussian_pair(VertexSpec(0, (2,)), 1)
    assert part == {(-3,): NPoly.n_power(1, Fraction(1, 2))}


def test_matching_count_is_double_factorial():
    assert len(matchings(VertexSpec(1, (1,)))) == 3  # 4 half-edges: 3!!
    assert len(matchings(VertexSpec(2, (2,)))) == 105  # 8 half-edges: 7!!
    assert len(matchings(VertexSpec(0, (1, 1)))) == 1


def test_connectivity_excludes_split_diagrams():
    # two degree-1 det vertices must pair with each other: connected
    spec = VertexSpec(0, (1, 1))
    diags = [diagram(spec, m) for m in matchings(spec)]
    assert all(d.connected for d in diags)
    # two separate degree-2 det vertices: the disconnected matching exists
    spec = VertexSpec(0, (2, 2))
    flags = sorted(diagram(spec, m).connected for m in matchings(spec))
    assert flags.count(False) >= 1


def test_n_power_equals_det_vertex_count():
    for spec in vertex_specs(3):
        part = gaussian_pair(spec, 2)
        r = len(spec.det_degrees)
        for value in part.values():
            assert all(
                c == 0 for i, c in enumerate(value.coeffs) if i != r
            ), "every diagram carries N^r exactly"


def test_free_energy_degree_three_coefficient():
    slices = kp_free_energy(3, 3)
    # coefficient of lambda_1^-1 lambda_2^-2 equals <theta_1 theta_2>/(1*2)
    assert slices[3][(-1, -2, 0)] == NPoly.n_power(1)


def test_symmetry_of_slices():
    slices = kp_free_energy(3, 3)
    data = slices[3]
    for mono, value in data.items():
        assert data[tuple(sorted(mono))] == value


def test_miwa_requires_enough_variables():
    with pytest.raises(OracleError):
        kp_free_energy(2, 3)
    with pytest.raises(OracleError):
        miwa_extract({}, 3, 2)


def test_miwa_extract_degree_three():
    table = miwa_extract(kp_free_energy(3, 3), 3, 3)
    assert table.get(CorrelatorKey("kp", 0, thetas=(1, 2))) == NPoly.n_power(1, 2)
    assert table.get(CorrelatorKey("kp", 1, thetas=(3,))) == NPoly.n_power(
        2, Fraction(3, 2)
    )


def test_miwa_round_trip():
    M, D = 3, 3
    slices = kp_free_energy(M, D)
    table = miwa_extract(slices, D, M)
    # rebuild the degree-3 slice from the extracted correlators
    rebuilt = {}
    for key, value in table.entries.items():
        if sum(key.thetas) != 3 or not value:
            continue
        for mono, c in _miwa_monomials(key.thetas, M).items():
            cur = rebuilt.get(mono, NPoly())
            new = cur + value * c
            if new:
                rebuilt[mono] = new
            elif mono in rebuilt:
                del rebuilt[mono]
    assert rebuilt == slices[3]


def test_oracle_matches_graph_sum_at_degree_three():
    oracle = oracle_table(3)
    graph_side = kp_table(2, 3)
    keys = set(oracle.entries) | set(graph_side.entries)
    for key in keys:
        assert oracle.get(key) == graph_side.get(key), key
