r"""
Per-graph weights and correlator tables.

Every family is evaluated the same way: enumerate the graphs of a sector,
multiply the edge weight dictionary over the edges,

    internal edge between faces i, j   ->  1/(lambda_i + lambda_j)
    boundary edge of face i, m illegal ->  binom(2m, m)/(m+1) * lambda_i^(-2m-1)
    boundary edge of a ghost           ->  1

scale by c(G)/|Aut(G)| and N^b(G), sum the expansions, and read the bracket
values off the coefficients of the target basis

    prod_i (2 a_i - 1)!! / lambda_i^(2 a_i + 1)     (open families)
    prod_i 1 / (a_i lambda_i^(a_i))                 (Kontsevich-Penner)

with the multiset bookkeeping that turns generating-series coefficients
into plain bracket values.  Monomials outside the target basis must cancel
in every sector sum; a surviving one aborts the build, since it can only
come from an enumeration or weight bug.

Stored refined and very refined values carry their N^b factor, so every
table value satisfies the same parity and degree law in N.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial

from .exactmath import (
    EdgeFactor,
    NPoly,
    double_factorial,
    expand_window,
    product_degree,
)
from .mapcore import (
    EXCEPTIONAL,
    GHOST,
    RibbonGraph,
    automorphism_order,
    trace,
)
from .nodal import (
    EdgeRecord,
    NodalGraph,
    edge_inventory,
    nodal_aut_order,
    smooth,
)
from . import enumeration


class SpuriousMonomialError(ValueError):
    """A sector sum carried weight outside its target basis."""


class DegreeIdentityError(ValueError):
    """A single graph violated its family's degree identity."""


# ---------------------------------------------------------------------------
# Weights
# ---------------------------------------------------------------------------


def edge_weight(record: EdgeRecord) -> EdgeFactor:
    """EdgeFactor of one edge record (variables are 0-based face labels)."""
    if record.kind == "internal":
        i, j = record.faces
        return EdgeFactor.inverse_sum(i - 1, j - 1)
    (face,) = record.faces
    if face is None:
        return EdgeFactor.unit(1)
    m = record.m
    coeff = Fraction(comb(2 * m, m), m + 1)
    return EdgeFactor.pure_power(face - 1, -2 * m - 1, coeff)


def component_constant(comp: RibbonGraph) -> Fraction:
    """c(G_i): 1/2 for ghosts, 1/m! for exceptionals with m+1 vertices, and
    2^(e_I - v_I - v_B3 - v_BM + b) otherwise.

    v_BM counts all boundary marked points of the standalone component,
    including the ones later consumed as node endpoints.
    """
    if comp.kind == GHOST:
        return Fraction(1, 2)
    if comp.kind == EXCEPTIONAL:
        return Fraction(1, factorial(len(comp.marked) - 1))
    tr = trace(comp)
    e_boundary = sum(
        1 for d in range(comp.dart_count) if d < comp.alpha[d] and comp.is_boundary_edge(d)
    )
    e_internal = tr.e - e_boundary
    v_bm = len(comp.marked)
    v_b3 = len(tr.boundary_vertices) - v_bm
    v_i = len(tr.interior_vertices)
    return Fraction(2) ** (e_internal - v_i - v_b3 - v_bm + tr.b)


@dataclass(frozen=True)
class Contribution:
    """One nodal graph's term of a family sum."""

    factors: tuple
    n_power: int
    s_monomial: tuple  # sorted sigma indices (exceptional profile)
    scalar: Fraction


def contribution(graph: NodalGraph) -> Contribution:
    prof = smooth(graph)
    scalar = Fraction(1)
    for comp in graph.components:
        scalar *= component_constant(comp)
    scalar /= nodal_aut_order(graph)
    factors = tuple(edge_weight(r) for r in edge_inventory(graph))

    # -deg(prod lambda(e)) + sum(2m+2) over exceptionals
    #   = 3*(g - 1 + l + #exceptionals) + #free marked points
    # (the free-mark term drops out for extended graphs)
    l = sum(len(trace(c).labels) for c in graph.components)
    deg = product_degree(factors)
    lhs = -deg + sum(2 * m + 2 for m in prof.exc)
    rhs = 3 * (prof.genus - 1 + l + len(prof.exc)) + len(graph.free_marked)
    if lhs != rhs:
        raise DegreeIdentityError(
            f"degree identity fails: -deg={-deg}, exc={prof.exc}, g={prof.genus}, l={l}"
        )
    return Contribution(factors, prof.b, prof.exc, scalar)


def kp_contribution(graph: RibbonGraph) -> Contribution:
    tr = trace(graph)
    e_boundary = sum(
        1
        for d in range(graph.dart_count)
        if d < graph.alpha[d] and graph.is_boundary_edge(d)
    )
    e_internal = tr.e - e_boundary
    v_i = len(tr.interior_vertices)
    scalar = Fraction(2) ** (e_internal - v_i) / automorphism_order(graph)
    records = [
        EdgeRecord("boundary", (graph.tags[graph.alpha[d]][1],), 0)
        for d in range(graph.dart_count)
        if graph.is_boundary_dart(d)
    ]
    for d in range(graph.dart_count):
        o = graph.alpha[d]
        if d < o and not graph.is_boundary_edge(d):
            records.append(
                EdgeRecord(
                    "internal",
                    tuple(sorted((graph.tags[d][1], graph.tags[o][1]))),
                )
            )
    factors = tuple(edge_weight(r) for r in records)
    if -product_degree(factors) != 3 * (tr.genus - 1 + tr.f_int):
        raise DegreeIdentityError("KP degree identity fails")
    return Contribution(factors, tr.b, (), scalar)


# ---------------------------------------------------------------------------
# Correlator tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class CorrelatorKey:
    family: str  # 'extended' | 'refined' | 'very_refined' | 'kp'
    genus: int
    taus: tuple = ()
    sigmas: tuple = ()  # extended
    k: int = 0  # refined / very refined
    b: int = 0  # refined
    kbar: tuple = ()  # very refined
    thetas: tuple = ()  # kp

    def to_json(self) -> dict:
        out = {"family": self.family, "genus": self.genus}
        if self.family == "kp":
            out["thetas"] = list(self.thetas)
            return out
        out["taus"] = list(self.taus)
        if self.family == "extended":
            out["sigmas"] = list(self.sigmas)
        elif self.family == "refined":
            out["b"] = self.b
            out["k"] = self.k
        elif self.family == "very_refined":
            out["kbar"] = list(self.kbar)
        return out


@dataclass
class CorrelatorTable:
    entries: dict = field(default_factory=dict)

    def get(self, key: CorrelatorKey) -> NPoly:
        return self.entries.get(key, NPoly())

    def put(self, key: CorrelatorKey, value: NPoly):
        self.entries[key] = value

    def update(self, other: "CorrelatorTable"):
        self.entries.update(other.entries)

    def __len__(self):
        return len(self.entries)

    def to_json(self) -> list:
        rows = []
        for key in sorted(self.entries):
            row = key.to_json()
            row["value"] = self.entries[key].to_json()
            rows.append(row)
        return rows

    def to_csv_rows(self) -> list:
        rows = [["family", "genus", "insertions", "value"]]
        for key in sorted(self.entries):
            if key.family == "kp":
                ins = " ".join(f"theta_{a}" for a in key.thetas)
            else:
                ins = " ".join(f"tau_{a}" for a in key.taus)
                if key.family == "extended":
                    ins += "".join(f" sigma_{c}" for c in key.sigmas)
                elif key.family == "refined":
                    ins += f" sigma^{key.k} b={key.b}"
                elif key.family == "very_refined":
                    ins += f" kbar={','.join(map(str, key.kbar))}"
            rows.append([key.family, str(key.genus), ins.strip(), self.entries[key].render()])
        return rows


def _tau_multisets(total_degree: int, length: int):
    """Multisets {a_1..a_length}, a_i >= 0, with sum(2 a_i + 1) = total."""
    if (total_degree - length) % 2 or total_degree < length:
        return []
    target = (total_degree - length) // 2  # sum of a_i
    out = []

    def rec(remaining, parts, minimum, acc):
        if parts == 0:
            if remaining == 0:
                out.append(tuple(acc))
            return
        for a in range(minimum, remaining + 1):
            rec(remaining - a, parts - 1, a, acc + [a])

    rec(target, length, 0, [])
    return out


def _sum_sector(graphs_factors, nvars: int):
    """Accumulate scalar * N^b * expansion over the given contributions."""
    total: dict[tuple, NPoly] = {}
    for contrib in graphs_factors:
        scale = NPoly.n_power(contrib.n_power, contrib.scalar)
        for mono, c in expand_window(contrib.factors, nvars).items():
            cur = total.get(mono, NPoly())
            total[mono] = cur + scale * c
    return {m: v for m, v in total.items() if v}


def _extract_open(total, nvars, degree):
    """Bracket coefficients from an open-family window sum.

    Returns {tau multiset: NPoly} with the double-factorial basis divided
    out; verifies permutation symmetry and the absence of monomials outside
    the target basis.
    """
    valid = {}
    for taus in _tau_multisets(degree, nvars):
        rep = tuple(sorted(-(2 * a + 1) for a in taus))
        valid[rep] = taus
    groups: dict[tuple, dict] = {}
    for mono, value in total.items():
        rep = tuple(sorted(mono))
        if rep not in valid:
            raise SpuriousMonomialError(f"monomial {mono} outside the target basis")
        groups.setdefault(rep, {})[mono] = value
    out = {}
    for rep, taus in valid.items():
        seen = groups.get(rep, {})
        values = set(seen.values())
        if len(values) > 1:
            raise SpuriousMonomialError(f"asymmetric coefficients on {rep}")
        value = values.pop() if values else NPoly()
        divisor = Fraction(1)
        for a in taus:
            divisor *= double_factorial(2 * a - 1)
        out[taus] = value * (1 / divisor)
    return out


def extended_table(degree_cap: int, threads: int = 1) -> CorrelatorTable:
    """All extended sectors with insertion degree <= cap.

    A sector is a triple (genus, l, sigma multiset); its values are stored
    with the multiset bookkeeping already applied, so the entries are the
    intersection numbers themselves.
    """

    def sector_entries(sector):
        genus, l, sigmas = sector
        d_ins = 3 * (genus - 1 + l + len(sigmas))
        d_lambda = d_ins - sum(2 * c + 2 for c in sigmas)
        targets = _tau_multisets(d_lambda, l)
        if not targets:
            return {}
        graphs = enumeration.gen_extended(genus, l, sigmas)
        total = _sum_sector((contribution(g) for g in graphs), l)
        values = _extract_open(total, l, d_lambda)
        sigma_mult = Fraction(1)
        for _, grp in itertools.groupby(sorted(sigmas)):
            sigma_mult *= factorial(len(list(grp)))
        return {
            CorrelatorKey(
                "extended", genus, taus=tuple(sorted(taus)), sigmas=tuple(sorted(sigmas))
            ): value * sigma_mult
            for taus, value in values.items()
        }

    table = CorrelatorTable()
    merged = enumeration.run_partitioned(
        list(_extended_sectors(degree_cap)), sector_entries, threads
    )
    table.entries.update(merged)
    return table


def _extended_sectors(degree_cap: int):
    """(genus, l, sigma multiset) triples with insertion degree <= cap."""
    for d_ins in range(3, degree_cap + 1, 3):
        unit = d_ins // 3  # genus - 1 + l + k
        for l in range(0, unit + 2):
            for k in range(0, unit + 2 - l):
                genus = unit + 1 - l - k
                if genus < 0 or l + k == 0:
                    continue
                sigma_budget = d_ins - l  # tau insertions weigh at least 1
                for sigmas in _sigma_multisets(k, sigma_budget):
                    yield genus, l, sigmas


def _sigma_multisets(k: int, degree_budget: int):
    """Multisets {c_1..c_k}, c_j >= 0, with sum(2 c_j + 2) <= budget."""
    out = []

    def rec(parts, minimum, budget, acc):
        if parts == 0:
            out.append(tuple(acc))
            return
        c = minimum
        while 2 * c + 2 <= budget - 2 * (parts - 1):
            rec(parts - 1, c, budget - (2 * c + 2), acc + [c])
            c += 1

    rec(k, 0, degree_budget, [])
    return out


def refined_table(
    degree_cap: int,
    k_max: int | None = None,
    genus_max: int | None = None,
    threads: int = 1,
) -> CorrelatorTable:
    """Refined sectors (genus, b, k, l) within the insertion-degree cap.

    Stored values are N^b * k! * (graph sum), i.e. the bracket against
    numbered boundary marked points, times the boundary-count variable.
    """

    def sector_entries(sector):
        genus, l, k, b = sector
        d_lambda = 3 * genus - 3 + 3 * l + k
        graphs = enumeration.gen_nodal(genus, l, k=k, b=b)
        total = _sum_sector((contribution(g) for g in graphs), l)
        values = _extract_open(total, l, d_lambda)
        return {
            CorrelatorKey("refined", genus, taus=tuple(sorted(taus)), k=k, b=b):
            value * factorial(k)
            for taus, value in values.items()
        }

    sectors = []
    for genus, l, k in _open_sectors(degree_cap, k_max, genus_max):
        if not _tau_multisets(3 * genus - 3 + 3 * l + k, l):
            continue
        for b in range(1, genus + 2):
            if (b - genus) % 2 == 1:
                sectors.append((genus, l, k, b))
    table = CorrelatorTable()
    table.entries.update(enumeration.run_partitioned(sectors, sector_entries, threads))
    return table


def very_refined_table(
    degree_cap: int,
    k_max: int | None = None,
    genus_max: int | None = None,
    threads: int = 1,
) -> CorrelatorTable:
    """Very refined sectors (genus, kbar, l); same conventions as refined."""

    def sector_entries(sector):
        genus, l, k, kbar = sector
        d_lambda = 3 * genus - 3 + 3 * l + k
        graphs = enumeration.gen_nodal(genus, l, kbar=kbar)
        total = _sum_sector((contribution(g) for g in graphs), l)
        values = _extract_open(total, l, d_lambda)
        return {
            CorrelatorKey(
                "very_refined", genus, taus=tuple(sorted(taus)), k=k, kbar=kbar
            ): value * factorial(k)
            for taus, value in values.items()
        }

    sectors = []
    for genus, l, k in _open_sectors(degree_cap, k_max, genus_max):
        if not _tau_multisets(3 * genus - 3 + 3 * l + k, l):
            continue
        for b in range(1, genus + 2):
            if (b - genus) % 2 == 1:
                for kbar in partitions_into(k, b):
                    sectors.append((genus, l, k, kbar))
    table = CorrelatorTable()
    table.entries.update(enumeration.run_partitioned(sectors, sector_entries, threads))
    return table


def _open_sectors(degree_cap: int, k_max: int | None, genus_max: int | None):
    """(genus, l, k) with sigma^k insertion degree within the cap."""
    for d_ins in range(3, degree_cap + 1, 3):
        unit = d_ins // 3
        for l in range(0, unit + 2):
            for k in range(0, unit + 2 - l):
                genus = unit + 1 - l - k
                if genus < 0:
                    continue
                if k_max is not None and k > k_max:
                    continue
                if genus_max is not None and genus > genus_max:
                    continue
                if 2 * genus - 2 + k + 2 * l <= 0:
                    continue
                yield genus, l, k


def partitions_into(k: int, b: int):
    """Unordered b-tuples of non-negative integers summing to k."""
    out = []

    def rec(remaining, parts, minimum, acc):
        if parts == 0:
            if remaining == 0:
                out.append(tuple(acc))
            return
        for piece in range(minimum, remaining + 1):
            rec(remaining - piece, parts - 1, piece, acc + [piece])

    rec(k, b, 0, [])
    return out


def kp_table(n_max: int, degree_cap: int, threads: int = 1) -> CorrelatorTable:
    """Kontsevich-Penner correlators <theta_{a_1}...theta_{a_n}> with
    n <= n_max and sum(a_i) <= cap, from the graph sum."""

    def sector_entries(sector):
        n, genus, degree = sector
        graphs = [
            g for g in enumeration.gen_kp(n, genus) if trace(g).genus == genus
        ]
        total = _sum_sector((kp_contribution(g) for g in graphs), n)
        part = CorrelatorTable()
        _store_kp(part, total, n, genus, degree)
        return part.entries

    sectors = []
    for n in range(1, n_max + 1):
        genus = 0
        while True:
            degree = 3 * (genus - 1 + n)
            if degree > degree_cap:
                break
            if degree >= n and genus - 1 + n > 0:
                sectors.append((n, genus, degree))
            genus += 1
    table = CorrelatorTable()
    table.entries.update(enumeration.run_partitioned(sectors, sector_entries, threads))
    return table


def _store_kp(table: CorrelatorTable, total: dict, n: int, genus: int, degree: int):
    valid = {}

    def rec(remaining, parts, minimum, acc):
        if parts == 0:
            if remaining == 0:
                tup = tuple(acc)
                valid[tuple(sorted(-a for a in tup))] = tup
            return
        for a in range(minimum, remaining + 1):
            rec(remaining - a, parts - 1, a, acc + [a])

    rec(degree, n, 1, [])

    groups: dict[tuple, dict] = {}
    for mono, value in total.items():
        rep = tuple(sorted(mono))
        if rep not in valid:
            raise SpuriousMonomialError(f"KP monomial {mono} outside the target basis")
        groups.setdefault(rep, {})[mono] = value
    for rep, thetas in valid.items():
        seen = groups.get(rep, {})
        values = set(seen.values())
        if len(values) > 1:
            raise SpuriousMonomialError(f"asymmetric KP coefficients on {rep}")
        value = values.pop() if values else NPoly()
        mult = Fraction(1)
        for a in thetas:
            mult *= a
        key = CorrelatorKey("kp", genus, thetas=tuple(sorted(thetas)))
        table.put(key, value * mult)


# ---------------------------------------------------------------------------
# Identity suite
# ---------------------------------------------------------------------------


@dataclass
class VerifyReport:
    identity: str
    checked: int = 0
    failures: list = field(default_factory=list)
    evidence: list = field(default_factory=list)  # informational (genus >= 2)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "identity": self.identity,
            "checked": self.checked,
            "failures": self.failures,
            "evidence": self.evidence,
            "passed": self.passed,
        }


def extended_genus(taus, sigmas) -> int | None:
    """Genus pinned by the dimension constraint, None when no genus fits."""
    d = sum(2 * a + 1 for a in taus) + sum(2 * c + 2 for c in sigmas)
    if d % 3:
        return None
    g = d // 3 + 1 - len(taus) - len(sigmas)
    return g if g >= 0 else None


def ext_value(table: CorrelatorTable, taus, sigmas) -> NPoly:
    g = extended_genus(taus, sigmas)
    if g is None:
        return NPoly()
    return table.get(
        CorrelatorKey("extended", g, taus=tuple(sorted(taus)), sigmas=tuple(sorted(sigmas)))
    )


def _insertion_multisets(degree_cap: int):
    """All (taus, sigmas) multisets with total insertion degree <= cap."""
    tau_lists = [()]

    def rec_tau(minimum, budget, acc):
        for a in range(minimum, (budget - 1) // 2 + 1):
            cur = acc + [a]
            tau_lists.append(tuple(cur))
            rec_tau(a, budget - (2 * a + 1), cur)

    rec_tau(0, degree_cap, [])
    out = []
    for taus in tau_lists:
        used = sum(2 * a + 1 for a in taus)
        for sigmas in _all_sigma_multisets(degree_cap - used):
            out.append((taus, sigmas))
    return out


def _all_sigma_multisets(budget: int):
    out = [()]

    def rec(minimum, left, acc):
        for c in range(minimum, (left - 2) // 2 + 1):
            cur = acc + [c]
            out.append(tuple(cur))
            rec(c, left - (2 * c + 2), cur)

    if budget >= 2:
        rec(0, budget, [])
    return out


def _lowerings(multiset):
    """(index value lowered once) per instance, as new sorted multisets."""
    out = []
    for i, x in enumerate(multiset):
        if x >= 1:
            lowered = list(multiset)
            lowered[i] = x - 1
            out.append(tuple(sorted(lowered)))
    return out


def verify_string(table: CorrelatorTable, degree_cap: int) -> VerifyReport:
    """<tau_0 X> = sum of single lowerings of X plus N when X = sigma_0."""
    report = VerifyReport("string")
    for taus, sigmas in _insertion_multisets(degree_cap - 1):
        lhs = ext_value(table, tuple(sorted(taus + (0,))), sigmas)
        rhs = NPoly()
        for lowered in _lowerings(taus):
            rhs = rhs + ext_value(table, lowered, sigmas)
        for i, c in enumerate(sigmas):
            if c >= 1:
                lowered = list(sigmas)
                lowered[i] = c - 1
                rhs = rhs + ext_value(table, taus, tuple(sorted(lowered)))
        if not taus and sigmas == (0,):
            rhs = rhs + NPoly.n_power(1)
        report.checked += 1
        if lhs != rhs:
            report.failures.append(
                {
                    "taus": list(taus),
                    "sigmas": list(sigmas),
                    "lhs": lhs.render(),
                    "rhs": rhs.render(),
                }
            )
    return report


def verify_dilaton(table: CorrelatorTable, degree_cap: int) -> VerifyReport:
    """<tau_1 X> = (g - 1 + l + k) <X> plus N^2/2 when X is empty."""
    report = VerifyReport("dilaton")
    for taus, sigmas in _insertion_multisets(degree_cap - 3):
        lhs = ext_value(table, tuple(sorted(taus + (1,))), sigmas)
        g = extended_genus(tuple(sorted(taus + (1,))), sigmas)
        rhs = NPoly()
        if g is not None:
            factor = g - 1 + len(taus) + len(sigmas)
            rhs = ext_value(table, taus, sigmas) * factor
        if not taus and not sigmas:
            rhs = rhs + NPoly.n_power(2, Fraction(1, 2))
        report.checked += 1
        if lhs != rhs:
            report.failures.append(
                {
                    "taus": list(taus),
                    "sigmas": list(sigmas),
                    "lhs": lhs.render(),
                    "rhs": rhs.render(),
                }
            )
    return report


def verify_parity(tables) -> VerifyReport:
    """Every stored value has N-degree <= g+1 and parity opposite to g."""
    report = VerifyReport("parity")
    for table in tables:
        for key, value in table.entries.items():
            report.checked += 1
            if value.is_zero():
                continue
            expected = "odd" if key.genus % 2 == 0 else "even"
            if value.degree > key.genus + 1 or value.parity() != expected:
                report.failures.append(
                    {"key": key.to_json(), "value": value.render()}
                )
    return report


def verify_collapse(
    ext: CorrelatorTable, refined: CorrelatorTable, degree_cap: int
) -> VerifyReport:
    """Extended values with all sigma indices zero against sum_b of the
    stored refined values (which carry N^b)."""
    report = VerifyReport("collapse")
    for taus, sigmas in _insertion_multisets(degree_cap):
        if any(c != 0 for c in sigmas):
            continue
        g = extended_genus(taus, sigmas)
        if g is None:
            continue
        k = len(sigmas)
        lhs = ext_value(ext, taus, sigmas)
        rhs = NPoly()
        for b in range(1, g + 2):
            if (b - g) % 2 == 0:
                continue
            rhs = rhs + refined.get(
                CorrelatorKey("refined", g, taus=tuple(sorted(taus)), k=k, b=b)
            )
        report.checked += 1
        if lhs != rhs:
            report.failures.append(
                {
                    "taus": list(taus),
                    "k": k,
                    "lhs": lhs.render(),
                    "rhs": rhs.render(),
                }
            )
    return report


def verify_partition_sum(
    refined: CorrelatorTable, very_refined: CorrelatorTable
) -> VerifyReport:
    """refined(g,b,k) equals the sum of very_refined(g,kbar) over P(k,b)."""
    report = VerifyReport("partition_sum")
    for key, value in refined.entries.items():
        rhs = NPoly()
        for kbar in partitions_into(key.k, key.b):
            rhs = rhs + very_refined.get(
                CorrelatorKey(
                    "very_refined", key.genus, taus=key.taus, k=key.k, kbar=kbar
                )
            )
        report.checked += 1
        if value != rhs:
            report.failures.append(
                {"key": key.to_json(), "lhs": value.render(), "rhs": rhs.render()}
            )
    return report


def verify_conjecture(
    ext: CorrelatorTable, kp: CorrelatorTable, degree_cap: int
) -> VerifyReport:
    """Extended side against the Kontsevich-Penner side.

    Genus 0 and 1 are hard assertions; higher genus is reported as
    experimental evidence with both sides printed.
    """
    report = VerifyReport("conjecture")
    for key in sorted(ext.entries):
        thetas = tuple(
            sorted([2 * a + 1 for a in key.taus] + [2 * c + 2 for c in key.sigmas])
        )
        if sum(thetas) > degree_cap or not thetas:
            continue
        denom = Fraction(1)
        for a in key.taus:
            denom *= double_factorial(2 * a + 1)
        for c in key.sigmas:
            denom *= Fraction(2) ** (c + 1) * factorial(c + 1)
        kp_value = kp.get(CorrelatorKey("kp", key.genus, thetas=thetas))
        lhs = ext.entries[key]
        rhs = kp_value * (1 / denom)
        entry = {
            "taus": list(key.taus),
            "sigmas": list(key.sigmas),
            "genus": key.genus,
            "extended": lhs.render(),
            "kp_side": rhs.render(),
            "match": lhs == rhs,
        }
        if key.genus <= 1:
            report.checked += 1
            if lhs != rhs:
                report.failures.append(entry)
        else:
            report.evidence.append(entry)
    return report
