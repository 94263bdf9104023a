r"""
Exact arithmetic substrate: rationals, polynomials in N, targeted Laurent
coefficient extraction, and dense linear solving over the rationals.

Everything here is exact; no floats appear anywhere in this package.

Laurent extraction works in the fixed ordered regime

    lambda_1 >> lambda_2 >> ... >> lambda_l,

where each inverse-sum factor 1/(lambda_i + lambda_j) with i < j expands as

    sum_{k >= 0} (-1)^k lambda_j^k lambda_i^{-k-1}.

Graph-family generating series are equalities of series in this regime, with
the target coefficients carried by monomials whose exponents are all
negative; the regime choice drops out after summation over graphs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def rational_to_str(q: Rational) -> str:
    """Canonical "p/q" form with q > 0 and gcd(|p|, q) = 1 ("0/1" for zero)."""
    return f"{q.numerator}/{q.denominator}"


def rational_from_str(s: str) -> Rational:
    num, _, den = s.partition("/")
    return Fraction(int(num), int(den) if den else 1)


def double_factorial(n: int) -> int:
    """n!! with the convention (-1)!! = 1."""
    if n < -1:
        raise ValueError(f"double factorial undefined for {n}")
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


class NPoly:
    """Polynomial in the formal variable N with exact rational coefficients.

    Coefficients are indexed by the power of N and stored with the trailing
    coefficient nonzero (the zero polynomial has no coefficients).
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Rational | int] = ()):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @staticmethod
    def constant(c: Rational | int) -> "NPoly":
        return NPoly([Fraction(c)])

    @staticmethod
    def n_power(b: int, c: Rational | int = 1) -> "NPoly":
        """c * N^b."""
        return NPoly([0] * b + [Fraction(c)])

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        """Degree in N; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def __add__(self, other: "NPoly") -> "NPoly":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return NPoly(out)

    def __sub__(self, other: "NPoly") -> "NPoly":
        return self + (other * Fraction(-1))

    def __mul__(self, other: "NPoly | Rational | int") -> "NPoly":
        if isinstance(other, NPoly):
            if not self.coeffs or not other.coeffs:
                return NPoly()
            out = [ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, a in enumerate(self.coeffs):
                if a:
                    for j, b in enumerate(other.coeffs):
                        out[i + j] += a * b
            return NPoly(out)
        return NPoly([c * Fraction(other) for c in self.coeffs])

    __rmul__ = __mul__

    def __neg__(self) -> "NPoly":
        return self * Fraction(-1)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, NPoly) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def coefficient(self, power: int) -> Rational:
        if 0 <= power < len(self.coeffs):
            return self.coeffs[power]
        return ZERO

    def evaluate(self, n_value: Rational | int) -> Rational:
        x = Fraction(n_value)
        acc = ZERO
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def parity(self) -> str:
        """One of 'zero', 'even', 'odd', 'mixed' by which N-powers appear."""
        powers = {i % 2 for i, c in enumerate(self.coeffs) if c}
        if not powers:
            return "zero"
        if powers == {0}:
            return "even"
        if powers == {1}:
            return "odd"
        return "mixed"

    def to_json(self) -> list:
        return [rational_to_str(c) for c in self.coeffs]

    @staticmethod
    def from_json(data: Sequence[str]) -> "NPoly":
        return NPoly([rational_from_str(s) for s in data])

    def render(self) -> str:
        """Human form "c0 + c1*N + c2*N^2 + ..." used by the CSV mirror."""
        if not self.coeffs:
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            if i == 0:
                parts.append(str(c))
            elif i == 1:
                parts.append(f"{c}*N")
            else:
                parts.append(f"{c}*N^{i}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"NPoly({self.render()})"


N_POLY_N = NPoly.n_power(1)


def npoly_parity(p: NPoly) -> str:
    return p.parity()


# ---------------------------------------------------------------------------
# Edge factors and Laurent extraction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EdgeFactor:
    """One multiplicative factor of a graph weight.

    kind 'inverse-sum'  : coeff / (lambda_i + lambda_j), i <= j allowed
                          (i = j is rewritten on the fly as coeff/2 * lambda_i^-1)
    kind 'pure-power'   : coeff * lambda_i^e  (e < 0 and odd in graph weights)
    kind 'unit'         : coeff  (ghost boundary edges)

    Variable indices are 0-based.  The rational coefficient carries the
    Catalan-type prefactor of boundary edges.
    """

    kind: str
    i: int = -1
    j: int = -1
    e: int = 0
    coeff: Rational = ONE

    @staticmethod
    def inverse_sum(i: int, j: int, coeff: Rational | int = 1) -> "EdgeFactor":
        if i > j:
            i, j = j, i
        return EdgeFactor("inverse-sum", i=i, j=j, coeff=Fraction(coeff))

    @staticmethod
    def pure_power(i: int, e: int, coeff: Rational | int = 1) -> "EdgeFactor":
        return EdgeFactor("pure-power", i=i, e=e, coeff=Fraction(coeff))

    @staticmethod
    def unit(coeff: Rational | int = 1) -> "EdgeFactor":
        return EdgeFactor("unit", coeff=Fraction(coeff))

    @property
    def degree(self) -> int:
        """Total homogeneous degree in the lambda variables."""
        if self.kind == "inverse-sum":
            return -1
        if self.kind == "pure-power":
            return self.e
        return 0

    def max_var(self) -> int:
        if self.kind == "inverse-sum":
            return self.j
        if self.kind == "pure-power":
            return self.i
        return -1


def product_degree(factors: Sequence[EdgeFactor]) -> int:
    return sum(f.degree for f in factors)


class VariableCountError(ValueError):
    pass


def _normalize(factors: Sequence[EdgeFactor], nvars: int) -> tuple[Fraction, list[EdgeFactor]]:
    """Fold units and diagonal inverse-sums into scalar/pure-power form."""
    scalar = ONE
    out: list[EdgeFactor] = []
    for f in factors:
        if f.kind == "unit":
            scalar *= f.coeff
            continue
        vars_used = (f.i, f.j) if f.kind == "inverse-sum" else (f.i,)
        if any(v < 0 or v >= nvars for v in vars_used):
            raise VariableCountError(
                f"factor {f} references a variable outside 0..{nvars - 1}"
            )
        if f.kind == "inverse-sum" and f.i == f.j:
            out.append(EdgeFactor.pure_power(f.i, -1, f.coeff / 2))
        else:
            out.append(f)
    return scalar, out


def _expand(
    factors: Sequence[EdgeFactor],
    nvars: int,
    exponent_range,
) -> dict[tuple[int, ...], Fraction]:
    """Shared engine for coefficient extraction.

    ``exponent_range(v)`` yields the admissible exponents of variable v.
    Variables are processed from the last one down to the first: at step v
    every factor whose largest variable is v is expanded, its lambda_v part
    is consumed, and the residual power of the smaller variable accumulates
    into the pending monomial.  The per-factor expansion order k is finite
    because the exponent of lambda_v is pinned to the requested range.
    """
    scalar, live = _normalize(factors, nvars)
    ordered = tuple(sorted(live, key=lambda f: (f.max_var(), f.kind, f.i, f.j, f.e)))

    # states: (pending exponents on unprocessed vars, remaining factors,
    #          exponents already produced for processed vars) -> coefficient
    states: dict[tuple[tuple[int, ...], tuple[EdgeFactor, ...], tuple[int, ...]], Fraction]
    states = {((0,) * nvars, ordered, ()): scalar}

    for v in range(nvars - 1, -1, -1):
        allowed = list(exponent_range(v))
        new_states: dict = {}
        for (pending, facs, exps), coeff in states.items():
            here = [f for f in facs if f.max_var() == v]
            rest = tuple(f for f in facs if f.max_var() != v)
            inv = [f for f in here if f.kind == "inverse-sum"]
            fixed = pending[v]
            pow_coeff = ONE
            for f in here:
                if f.kind == "pure-power":
                    fixed += f.e
                    pow_coeff *= f.coeff
            for target_e in allowed:
                ks_total = target_e - fixed
                if ks_total < 0:
                    continue
                for ks in _compositions(ks_total, len(inv)):
                    c = coeff * pow_coeff
                    pend = list(pending)
                    pend[v] = 0
                    for f, k in zip(inv, ks):
                        c *= f.coeff * (-1) ** k
                        pend[f.i] += -1 - k
                    key = (tuple(pend), rest, (target_e,) + exps)
                    new_states[key] = new_states.get(key, ZERO) + c
        states = {k: c for k, c in new_states.items() if c != 0}

    result: dict[tuple[int, ...], Fraction] = {}
    for (_pend, rest, exps), c in states.items():
        assert not rest
        result[exps] = result.get(exps, ZERO) + c
    return {k: v for k, v in result.items() if v != 0}


def _compositions(total: int, parts: int):
    """Weak compositions of ``total`` into ``parts`` non-negative summands."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for tail in _compositions(total - first, parts - 1):
            yield (first,) + tail


def coefficient_of(factors: Sequence[EdgeFactor], target: Sequence[int], nvars: int | None = None) -> NPoly:
    """Exact coefficient of prod lambda_i^{target_i} in the regime expansion.

    The factor product must be homogeneous; when the target degree does not
    match the product degree the coefficient is zero by homogeneity.
    """
    if nvars is None:
        nvars = len(target)
    if len(target) != nvars:
        raise VariableCountError(
            f"target has {len(target)} exponents for {nvars} variables"
        )
    if sum(target) != product_degree(factors):
        return NPoly()
    table = _expand(factors, nvars, lambda v: (target[v],))
    c = table.get(tuple(target), ZERO)
    return NPoly.constant(c)


def expand_window(
    factors: Sequence[EdgeFactor], nvars: int
) -> dict[tuple[int, ...], Fraction]:
    """All monomials with every exponent in [-d, 0], d the product degree.

    This window contains the full target basis of every graph family plus
    the spurious monomials that must cancel after graph summation.
    """
    d = -product_degree(factors)
    if d < 0:
        raise ValueError("expand_window expects non-positive total degree")
    return _expand(factors, nvars, lambda v: range(-d, 1))


# ---------------------------------------------------------------------------
# Exact linear solving
# ---------------------------------------------------------------------------


class SingularMatrixError(ValueError):
    def __init__(self, rank: int, size: int):
        super().__init__(f"singular system: rank {rank} < size {size}")
        self.rank = rank
        self.size = size


def solve_linear(matrix: Sequence[Sequence[Rational]], rhs: Sequence[NPoly]) -> list[NPoly]:
    """Solve A x = rhs exactly for a square nonsingular rational matrix.

    The right-hand side entries are polynomials in N, so the solution is a
    vector of NPoly.  Raises SingularMatrixError (carrying the rank) when no
    unique solution exists.
    """
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise ValueError("matrix must be square")
    if len(rhs) != n:
        raise ValueError("rhs length must match matrix size")
    a = [[Fraction(x) for x in row] for row in matrix]
    b = [p for p in rhs]

    rank = 0
    for col in range(n):
        pivot = next((r for r in range(rank, n) if a[r][col] != 0), None)
        if pivot is None:
            raise SingularMatrixError(rank, n)
        a[rank], a[pivot] = a[pivot], a[rank]
        b[rank], b[pivot] = b[pivot], b[rank]
        inv = 1 / a[rank][col]
        a[rank] = [x * inv for x in a[rank]]
        b[rank] = b[rank] * inv
        for r in range(n):
            if r != rank and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[rank])]
                b[r] = b[r] - b[rank] * f
        rank += 1
    return b


def solve_rectangular(
    matrix: Sequence[Sequence[Rational]], rhs: Sequence[NPoly]
) -> list[NPoly]:
    """Solve a consistent overdetermined system with full column rank.

    Used by the Miwa extraction, where every window monomial yields one
    equation.  Inconsistency or rank deficiency raises SingularMatrixError.
    """
    rows = len(matrix)
    if rows == 0:
        return []
    cols = len(matrix[0])
    a = [[Fraction(x) for x in row] for row in matrix]
    b = list(rhs)
    rank = 0
    pivot_cols = []
    for col in range(cols):
        pivot = next((r for r in range(rank, rows) if a[r][col] != 0), None)
        if pivot is None:
            continue
        a[rank], a[pivot] = a[pivot], a[rank]
        b[rank], b[pivot] = b[pivot], b[rank]
        inv = 1 / a[rank][col]
        a[rank] = [x * inv for x in a[rank]]
        b[rank] = b[rank] * inv
        for r in range(rows):
            if r != rank and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[rank])]
                b[r] = b[r] - b[rank] * f
        pivot_cols.append(col)
        rank += 1
    if rank < cols:
        raise SingularMatrixError(rank, cols)
    for r in range(rank, rows):
        if b[r]:
            raise SingularMatrixError(rank, cols)
    out = [NPoly()] * cols
    for r, col in enumerate(pivot_cols):
        out[col] = b[r]
    return out
