r"""
Independent ground truth for the Kontsevich-Penner correlators.

The free energy is computed as a formal Gaussian integral over Hermitian
M x M matrices: cubic vertices from (1/6) tr H^3, determinant vertices from
N tr((1/Lambda H)^k)/k, propagator

    <h_ij h_kl> = 2 delta_il delta_jk / (lambda_i + lambda_j),

and connectedness enforced on the Wick matchings themselves.  No graph
isomorphism, canonical code or 1/|Aut| factor appears anywhere: symmetry is
handled entirely by the labeled-diagram combinatorics and the Taylor
prefactors 1/p!, (1/6)^p, (N/k)^m / m!.

Faces of a matching are the orbits of half-edge -> successor(partner);
each determinant-vertex corner on a face contributes one inverse power of
that face's lambda, and each edge contributes 2/(lambda_a + lambda_b) for
the lambdas assigned to its two sides.  Summing over all assignments of
face indices in [M] yields a symmetric function; correlators are read off
by solving the linear system against the Miwa basis T_k = (1/k) tr
Lambda^(-k), which requires M >= D for independence.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .exactmath import (
    EdgeFactor,
    NPoly,
    expand_window,
    solve_rectangular,
)
from .amplitude import CorrelatorKey, CorrelatorTable


class OracleError(ValueError):
    pass


@dataclass(frozen=True)
class VertexSpec:
    """p cubic vertices plus determinant vertices of the given degrees."""

    cubic_count: int
    det_degrees: tuple  # sorted, each >= 1

    @property
    def half_edges(self) -> int:
        return 3 * self.cubic_count + sum(self.det_degrees)

    @property
    def lambda_degree(self) -> int:
        """Total degree: one per propagator plus one per det slot."""
        return self.half_edges // 2 + sum(self.det_degrees)

    def prefactor(self) -> Fraction:
        out = Fraction(1, factorial(self.cubic_count)) * Fraction(1, 6) ** self.cubic_count
        for k, grp in itertools.groupby(self.det_degrees):
            m = len(list(grp))
            out *= Fraction(1, k) ** m * Fraction(1, factorial(m))
        return out


def vertex_specs(max_degree: int):
    """All specs with at least one det vertex and lambda-degree <= cap.

    The pure-cubic (N^0) part is the closed free energy and is discarded
    here by construction.
    """
    out = []
    for p in range(0, 2 * max_degree // 3 + 1):
        dets = _det_multisets(max_degree, p)
        for det in dets:
            spec = VertexSpec(p, det)
            if spec.half_edges % 2 == 0 and spec.lambda_degree <= max_degree:
                out.append(spec)
    return sorted(out, key=lambda s: (s.lambda_degree, s.cubic_count, s.det_degrees))


def _det_multisets(max_degree: int, p: int):
    out = []

    def rec(minimum, acc):
        if acc:
            out.append(tuple(acc))
        total = sum(acc)
        k = minimum
        while True:
            # twice the lambda-degree with one more det vertex of degree k
            doubled = (3 * p + total + k) + 2 * (total + k)
            if doubled > 2 * max_degree:
                break
            rec(k, acc + [k])
            k += 1

    rec(1, [])
    return out


@dataclass
class PairingDiagram:
    """One Wick matching together with its traced face loops."""

    matching: dict
    loops: list  # lists of half-edges
    loop_of: dict
    det_corners: list  # per loop, number of det-vertex corners
    connected: bool


def _layout(spec: VertexSpec):
    """Half-edge successor map and vertex bookkeeping for a spec."""
    successor = {}
    vertex_of = {}
    is_det_vertex = []
    h = 0
    v = 0
    for _ in range(spec.cubic_count):
        slots = [h, h + 1, h + 2]
        for i, s in enumerate(slots):
            successor[s] = slots[(i + 1) % 3]
            vertex_of[s] = v
        is_det_vertex.append(False)
        h += 3
        v += 1
    for k in spec.det_degrees:
        slots = list(range(h, h + k))
        for i, s in enumerate(slots):
            successor[s] = slots[(i + 1) % k]
            vertex_of[s] = v
        is_det_vertex.append(True)
        h += k
        v += 1
    return successor, vertex_of, is_det_vertex


def matchings(spec: VertexSpec):
    """All perfect matchings of the half-edges (lowest unpaired first)."""
    n = spec.half_edges
    results = []
    partner = [-1] * n

    def rec(free):
        if not free:
            results.append(dict(enumerate(partner)))
            return
        a = free[0]
        for b in free[1:]:
            partner[a] = b
            partner[b] = a
            rec([x for x in free[1:] if x != b])
            partner[a] = -1
            partner[b] = -1

    rec(list(range(n)))
    return results


def diagram(spec: VertexSpec, matching: dict) -> PairingDiagram:
    successor, vertex_of, is_det_vertex = _layout(spec)
    n = spec.half_edges

    loops = []
    loop_of = {}
    det_corners = []
    seen = set()
    for h0 in range(n):
        if h0 in seen:
            continue
        loop = []
        corners = 0
        h = h0
        while h not in seen:
            seen.add(h)
            loop.append(h)
            p = matching[h]
            if is_det_vertex[vertex_of[p]]:
                corners += 1
            h = successor[p]
        idx = len(loops)
        for h in loop:
            loop_of[h] = idx
        loops.append(loop)
        det_corners.append(corners)

    # connectivity over vertices through matched edges
    n_vertices = len(is_det_vertex)
    parent = list(range(n_vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in matching.items():
        parent[find(vertex_of[a])] = find(vertex_of[b])
    connected = len({find(x) for x in range(n_vertices)}) == 1
    return PairingDiagram(matching, loops, loop_of, det_corners, connected)


def gaussian_pair(spec: VertexSpec, M: int, _cache=None) -> dict:
    """Connected Wick expansion of one vertex spec.

    Returns {lambda-exponent tuple: NPoly} restricted to the window of
    monomials with non-positive exponents; positive-exponent monomials are
    projected away (they cancel in the degree slice of the full sum).
    """
    if spec.half_edges % 2:
        return {}
    if _cache is None:
        _cache = {}
    pref = spec.prefactor()
    n_power = len(spec.det_degrees)
    out: dict[tuple, Fraction] = {}
    _, vertex_of, _ = _layout(spec)

    for matching in matchings(spec):
        diag = diagram(spec, matching)
        if not diag.connected:
            continue
        edges = sorted(
            (min(a, b), max(a, b)) for a, b in matching.items() if a < b
        )
        r = len(diag.loops)
        for assignment in itertools.product(range(M), repeat=r):
            factors = []
            for a, b in edges:
                i = assignment[diag.loop_of[a]]
                j = assignment[diag.loop_of[b]]
                factors.append(EdgeFactor.inverse_sum(min(i, j), max(i, j), 2))
            for idx, corners in enumerate(diag.det_corners):
                if corners:
                    factors.append(
                        EdgeFactor.pure_power(assignment[idx], -corners)
                    )
            key = tuple(sorted(factors, key=repr))
            expansion = _cache.get(key)
            if expansion is None:
                expansion = expand_window(factors, M)
                _cache[key] = expansion
            for mono, c in expansion.items():
                out[mono] = out.get(mono, Fraction(0)) + c
    return {
        mono: NPoly.n_power(n_power, pref * c)
        for mono, c in out.items()
        if c
    }


def kp_free_energy(M: int, max_degree: int) -> dict:
    """Degree slices of the positive-N part of the free energy.

    Returns {degree: {monomial: NPoly}} for the lambda-degree slices up to
    the cap, with M symbolic variables.  Requires M >= max_degree so the
    Miwa extraction has an independent basis.
    """
    if M < max_degree:
        raise OracleError(f"need M >= D, got M={M}, D={max_degree}")
    slices: dict[int, dict] = {}
    cache: dict = {}
    for spec in vertex_specs(max_degree):
        part = gaussian_pair(spec, M, cache)
        if not part:
            continue
        d = spec.lambda_degree
        dest = slices.setdefault(d, {})
        for mono, val in part.items():
            cur = dest.get(mono, NPoly())
            new = cur + val
            if new:
                dest[mono] = new
            elif mono in dest:
                del dest[mono]
    return slices


def _partitions(total: int):
    """Multisets of integers >= 1 with the given sum (any length)."""
    out = []

    def rec(minimum, left, acc):
        if left == 0:
            out.append(tuple(acc))
            return
        for a in range(minimum, left + 1):
            rec(a, left - a, acc + [a])

    rec(1, total, [])
    return out


def _miwa_monomials(parts: tuple, M: int) -> dict:
    """Expansion of prod_a T_a / prod(mult!) at T_a = (1/a) sum lambda^-a."""
    coeff = Fraction(1)
    for a, grp in itertools.groupby(parts):
        m = len(list(grp))
        coeff *= Fraction(1, a) ** m * Fraction(1, factorial(m))
    out = {tuple([0] * M): coeff}
    for a in parts:
        new: dict = {}
        for mono, c in out.items():
            for i in range(M):
                key = list(mono)
                key[i] -= a
                key = tuple(key)
                new[key] = new.get(key, Fraction(0)) + c
        out = new
    return out


def miwa_extract(slices: dict, max_degree: int, M: int) -> CorrelatorTable:
    """Correlators from free-energy slices by exact linear solving.

    For each degree d the unknowns are the partitions of d; the equations
    are the coefficients of every monomial in the window.  The system is
    overdetermined and must be exactly consistent; a leftover residual or a
    rank defect reports a misconfiguration (D > M aliasing).
    """
    if M < max_degree:
        raise OracleError(f"need M >= D, got M={M}, D={max_degree}")
    table = CorrelatorTable()
    for d in range(1, max_degree + 1):
        data = slices.get(d, {})
        parts = _partitions(d)
        basis = [_miwa_monomials(p, M) for p in parts]
        monomials = sorted(set(data) | {m for b in basis for m in b})
        if not monomials:
            continue
        matrix = [
            [b.get(mono, Fraction(0)) for b in basis] for mono in monomials
        ]
        rhs = [data.get(mono, NPoly()) for mono in monomials]
        solution = solve_rectangular(matrix, rhs)
        for p, value in zip(parts, solution):
            n = len(p)
            if (d % 3) or (d // 3 + 1 - n) < 0:
                if value:
                    raise OracleError(
                        f"nonzero correlator {p} outside the genus grading"
                    )
                continue
            genus = d // 3 + 1 - n
            table.put(CorrelatorKey("kp", genus, thetas=p), value)
    return table


def oracle_table(max_degree: int, M: int | None = None) -> CorrelatorTable:
    """End-to-end oracle: Wick expansion then Miwa extraction."""
    if M is None:
        M = max_degree
    return miwa_extract(kp_free_energy(M, max_degree), max_degree, M)
