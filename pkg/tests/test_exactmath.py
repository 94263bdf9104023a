from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ribbonint.exactmath import (
    EdgeFactor,
    NPoly,
    SingularMatrixError,
    VariableCountError,
    coefficient_of,
    double_factorial,
    expand_window,
    npoly_parity,
    rational_from_str,
    rational_to_str,
    solve_linear,
)


def test_rational_strings_round_trip():
    assert rational_to_str(Fraction(0)) == "0/1"
    assert rational_to_str(Fraction(-3, 6)) == "-1/2"
    assert rational_from_str("7/4") == Fraction(7, 4)
    assert rational_from_str(rational_to_str(Fraction(22, -8))) == Fraction(-11, 4)


def test_double_factorial_convention():
    assert double_factorial(-1) == 1
    assert double_factorial(0) == 1
    assert double_factorial(1) == 1
    assert double_factorial(5) == 15
    assert double_factorial(6) == 48
    with pytest.raises(ValueError):
        double_factorial(-3)


def test_npoly_parity_examples():
    assert npoly_parity(NPoly.n_power(1)) == "odd"
    assert npoly_parity(NPoly.n_power(2, Fraction(1, 2))) == "even"
    assert npoly_parity(NPoly()) == "zero"
    assert npoly_parity(NPoly([1, 1])) == "mixed"
    assert npoly_parity(NPoly.constant(3)) == "even"


def test_npoly_basics():
    p = NPoly([1, 2, 0, 0])
    assert p.degree == 1
    assert p.coefficient(1) == 2
    assert p.coefficient(5) == 0
    assert p.evaluate(3) == 7
    assert (p - p).is_zero()
    assert NPoly.from_json(p.to_json()) == p
    assert NPoly([0, Fraction(3, 2)]).render() == "3/2*N"
    assert NPoly([1, 0, 2]).render() == "1 + 2*N^2"


rationals = st.fractions(min_value=-8, max_value=8, max_denominator=12)
npolys = st.lists(rationals, max_size=5).map(NPoly)


@given(npolys, npolys, npolys)
def test_npoly_ring_laws(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


def test_coefficient_of_spec_values():
    inv = [EdgeFactor.inverse_sum(0, 1)]
    assert coefficient_of(inv, (-1, 0)) == NPoly.constant(1)
    assert coefficient_of(inv, (-3, 2)) == NPoly.constant(1)
    assert coefficient_of(inv, (-2, 1)) == NPoly.constant(-1)
    two_boundary = [EdgeFactor.pure_power(0, -1), EdgeFactor.pure_power(0, -1)]
    assert coefficient_of(two_boundary, (-2,)) == NPoly.constant(1)


def test_coefficient_of_diagonal_inverse_sum():
    # 1/(l+l) = 1/(2l)
    assert coefficient_of([EdgeFactor.inverse_sum(0, 0)], (-1,)) == NPoly.constant(
        Fraction(1, 2)
    )


def test_coefficient_of_homogeneity():
    facs = [EdgeFactor.inverse_sum(0, 1), EdgeFactor.pure_power(1, -3)]
    # total degree -4; any target of different total degree vanishes
    assert coefficient_of(facs, (-1, -2)).is_zero()
    assert coefficient_of(facs, (-1, -3)) == NPoly.constant(1)


def test_coefficient_of_errors():
    with pytest.raises(VariableCountError):
        coefficient_of([EdgeFactor.inverse_sum(0, 2)], (-1, 0))


@given(st.integers(1, 5), st.fractions(min_value=-4, max_value=4, max_denominator=5))
def test_coefficient_of_linear_in_factor_coefficient(k, c):
    if c == 0:
        c = Fraction(1)
    base = [EdgeFactor.inverse_sum(0, 1), EdgeFactor.pure_power(0, -1)]
    scaled = [EdgeFactor.inverse_sum(0, 1, c), EdgeFactor.pure_power(0, -1)]
    target = (-1 - k, k - 1)
    assert coefficient_of(scaled, target) == coefficient_of(base, target) * c


def test_coefficient_of_multiplicative_on_disjoint_vars():
    f1 = [EdgeFactor.pure_power(0, -3, 5)]
    f2 = [EdgeFactor.inverse_sum(1, 2)]
    got = coefficient_of(f1 + f2, (-3, -2, 1))
    left = coefficient_of(f1, (-3, 0, 0))
    right = coefficient_of(f2, (0, -2, 1))
    assert got == left * right
    assert got == NPoly.constant(-5)


def test_expand_window_theta_disk_cancellation():
    # Weight sums of a two-face sector: the poles and spurious monomials of
    # individual graphs cancel, leaving only the target basis.
    theta = [
        EdgeFactor.pure_power(0, -1),
        EdgeFactor.pure_power(1, -1),
        EdgeFactor.inverse_sum(0, 1),
    ]
    lol_a = [
        EdgeFactor.pure_power(1, -1),
        EdgeFactor.inverse_sum(0, 1),
        EdgeFactor.inverse_sum(1, 1),
    ]
    lol_b = [
        EdgeFactor.pure_power(0, -1),
        EdgeFactor.inverse_sum(0, 1),
        EdgeFactor.inverse_sum(0, 0),
    ]
    total: dict = {}
    for facs, scale in ((theta, Fraction(2)), (lol_a, Fraction(2)), (lol_b, Fraction(2))):
        for mono, c in expand_window(facs, 2).items():
            total[mono] = total.get(mono, Fraction(0)) + c * scale
    total = {m: c for m, c in total.items() if c}
    assert total == {(-1, -2): Fraction(1), (-2, -1): Fraction(1)}


def test_solve_linear_spec_examples():
    n = NPoly.n_power(1)
    n2_half = NPoly.n_power(2, Fraction(1, 2))
    assert solve_linear([[1, 0], [0, 1]], [n, n2_half]) == [n, n2_half]
    assert solve_linear([[2]], [NPoly.n_power(1, 4)]) == [NPoly.n_power(1, 2)]
    assert solve_linear([[1, 1], [1, -1]], [NPoly.n_power(1, 2), NPoly()]) == [n, n]


def test_solve_linear_singular_reports_rank():
    with pytest.raises(SingularMatrixError) as err:
        solve_linear([[1, 2], [2, 4]], [NPoly(), NPoly()])
    assert err.value.rank == 1


@given(
    st.lists(
        st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=4), min_size=3, max_size=3),
        min_size=3,
        max_size=3,
    ),
    st.lists(st.lists(rationals, max_size=3).map(NPoly), min_size=3, max_size=3),
)
def test_solve_linear_back_substitution(matrix, rhs):
    try:
        x = solve_linear(matrix, rhs)
    except SingularMatrixError:
        return
    for row, want in zip(matrix, rhs):
        acc = NPoly()
        for a, xi in zip(row, x):
            acc = acc + xi * a
        assert acc == want
