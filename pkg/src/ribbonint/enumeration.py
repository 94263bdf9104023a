r"""
Isomorph-free exhaustive generation of the graph families.

All generators are exhaustive within Euler-derived bounds and emit exactly
one representative (the canonically relabeled form) per isomorphism class,
sorted by canonical code.

Counting.  A critical (g,k,l) graph with l >= 1 labeled faces has

    trivalent vertices  v3 = 2(g + l - 1),
    edges               e  = k + 3(g + l - 1),

forced by trivalence and the Euler formula, so the dart count 2e certifies
finiteness.  Graphs with no boundary marked points (the Kontsevich-Penner
family) obey v = 2(g - 1 + n), e = 3(g - 1 + n) with n labeled faces.

Generation is boundary-first: boundary circles are laid down with their
marked/trivalent vertex patterns, interior trivalent vertices carry a fixed
rotation, and the dangling half-edges are matched by a depth-first search
that prunes on the number of closed interior faces.  Interior vertices are
interchangeable, so a fresh vertex is always entered through its first dart;
duplicates that survive the pruning are removed by canonical codes.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

from .mapcore import (
    GHOST,
    EXCEPTIONAL,
    REGULAR,
    RibbonGraph,
    TAG_BOUNDARY,
    MapError,
    canonical_code,
    canonical_form,
    classify,
    exceptional,
    face_tag,
    ghost,
    relabel_faces,
    trace,
)
from .nodal import (
    NodalError,
    NodalGraph,
    assemble,
    is_odd,
    nodal_canonical_code,
    smooth,
)


@dataclass(frozen=True)
class Bounds:
    """Optional execution bounds.

    ``dart_max`` caps the dart count of a single generated component; the
    generator refuses (rather than silently truncates) when the certified
    requirement exceeds it.
    """

    dart_max: int | None = None


class BoundsError(ValueError):
    def __init__(self, required: int, given: int):
        super().__init__(
            f"exhaustiveness requires a dart bound of {required}, got {given}"
        )
        self.required = required
        self.given = given


def _check_bounds(required: int, bounds: Bounds | None):
    if bounds is not None and bounds.dart_max is not None and bounds.dart_max < required:
        raise BoundsError(required, bounds.dart_max)


def component_dart_bound(g: int, k: int, l: int) -> int:
    """Certified dart count of any critical (g,k,l) graph."""
    if (g, k, l) == (0, 3, 0):
        return 6
    return 2 * (k + 3 * (g + l - 1))


# ---------------------------------------------------------------------------
# Boundary-first map construction
# ---------------------------------------------------------------------------


@dataclass
class _Scaffold:
    sigma: list
    alpha: list  # -1 where undecided
    cap_darts: list
    marked_reps: list  # circle vertex darts marked (s-dart of the vertex)
    boundary_stubs: list
    interior_first: int  # first dart index of interior stubs
    interior_count: int


def _build_scaffold(patterns: list[tuple[str, ...]], interior_count: int) -> _Scaffold:
    """Lay down boundary circles for the given M/T patterns.

    Returns the fixed rotation, the partially decided involution (boundary
    edges pre-paired), cap darts, marked vertex s-darts, dangling boundary
    stubs, and the dart range reserved for interior vertices.
    """
    sigma: dict[int, int] = {}
    alpha: dict[int, int] = {}
    cap_darts = []
    marked = []
    boundary_stubs = []

    base = 0
    stub_base = 2 * sum(len(p) for p in patterns)
    next_stub = stub_base
    for pattern in patterns:
        n = len(pattern)
        s = [base + 2 * i for i in range(n)]
        t = [base + 2 * i + 1 for i in range(n)]
        for i in range(n):
            alpha[s[i]] = t[i]
            alpha[t[i]] = s[i]
            cap_darts.append(t[i])
        for i in range(n):
            t_prev = t[(i - 1) % n]
            if pattern[i] == "T":
                stub = next_stub
                next_stub += 1
                boundary_stubs.append(stub)
                sigma[t_prev] = stub
                sigma[stub] = s[i]
                sigma[s[i]] = t_prev
            else:
                sigma[t_prev] = s[i]
                sigma[s[i]] = t_prev
                marked.append(s[i])
        base += 2 * n

    interior_first = next_stub
    for v in range(interior_count):
        x = interior_first + 3 * v
        sigma[x] = x + 1
        sigma[x + 1] = x + 2
        sigma[x + 2] = x

    n_darts = interior_first + 3 * interior_count
    sig = [sigma[d] for d in range(n_darts)]
    alp = [alpha.get(d, -1) for d in range(n_darts)]
    return _Scaffold(
        sig, alp, cap_darts, marked, boundary_stubs, interior_first, interior_count
    )


def _match_stubs(scaffold: _Scaffold, faces_target: int):
    """Yield completed involutions with exactly ``faces_target`` interior
    faces, pruning on closed-face counts."""
    sigma = scaffold.sigma
    alpha = list(scaffold.alpha)
    cap = set(scaffold.cap_darts)

    def closed_cycle_through(d):
        """1 if the face cycle through d is fully decided, else 0."""
        start = d
        while True:
            a = alpha[d]
            if a < 0:
                return 0
            d = sigma[a]
            if d == start:
                return 1

    # interior faces made entirely of pre-paired boundary-edge darts
    initial_closed = 0
    visited = set(cap)
    for d0 in range(len(sigma)):
        if d0 in visited or alpha[d0] < 0:
            continue
        members = _cycle_members(sigma, alpha, d0)
        if closed_cycle_through(d0):
            visited |= members
            initial_closed += 1

    results = []

    def rec(unpaired, allocated, closed):
        if not unpaired:
            if allocated == scaffold.interior_count and closed == faces_target:
                results.append(tuple(alpha))
            return
        s = unpaired[0]
        rest = unpaired[1:]
        candidates = list(rest)
        fresh_dart = scaffold.interior_first + 3 * allocated
        if allocated < scaffold.interior_count:
            candidates.append(fresh_dart)
        for q in candidates:
            fresh = q == fresh_dart
            alpha[s] = q
            alpha[q] = s
            new_closed = closed + closed_cycle_through(s)
            if q not in _cycle_members(sigma, alpha, s):
                new_closed += closed_cycle_through(q)
            new_alloc = allocated + 1 if fresh else allocated
            if fresh:
                new_unpaired = sorted(rest + [fresh_dart + 1, fresh_dart + 2])
            else:
                new_unpaired = [d for d in rest if d != q]
            ok = new_closed <= faces_target
            if ok and new_closed == faces_target and (
                new_unpaired or new_alloc < scaffold.interior_count
            ):
                ok = False
            if ok:
                rec(new_unpaired, new_alloc, new_closed)
            alpha[s] = -1
            alpha[q] = -1

    rec(sorted(scaffold.boundary_stubs), 0, initial_closed)
    return results


def _cycle_members(sigma, alpha, d):
    """Darts on the partial face path through d (follows decided alpha)."""
    out = {d}
    cur = d
    while True:
        a = alpha[cur]
        if a < 0:
            return out
        cur = sigma[a]
        if cur in out:
            return out
        out.add(cur)


def _finalize(scaffold: _Scaffold, alpha: tuple, l: int, kind: str = REGULAR):
    """All labeled RibbonGraphs for one completed matching (l! labelings)."""
    sigma = tuple(scaffold.sigma)
    n = len(sigma)
    cap = set(scaffold.cap_darts)
    phi = [sigma[alpha[d]] for d in range(n)]
    cycles = []
    seen = set()
    for d0 in range(n):
        if d0 in seen:
            continue
        cyc = []
        d = d0
        while d not in seen:
            seen.add(d)
            cyc.append(d)
            d = phi[d]
        cycles.append(cyc)
    interior = [c for c in cycles if c[0] not in cap]
    if len(interior) != l:
        return
    base_tags = [None] * n
    for d in cap:
        base_tags[d] = TAG_BOUNDARY

    marked_reps = None
    for labels in itertools.permutations(range(1, l + 1)):
        tags = list(base_tags)
        for cyc, lab in zip(interior, labels):
            for d in cyc:
                tags[d] = face_tag(lab)
        try:
            g = RibbonGraph(tuple(sigma), tuple(alpha), tuple(tags))
        except MapError:
            return
        if marked_reps is None:
            marked_reps = frozenset(g.vertex_of[d] for d in scaffold.marked_reps)
        g = RibbonGraph(g.sigma, g.alpha, g.tags, marked_reps, kind)
        try:
            trace(g)
        except MapError:
            return  # disconnected or malformed: same for all labelings
        yield g


def _boundary_distributions(k: int, t: int, b: int):
    """Multisets of per-circle (marked, trivalent) counts, each circle
    nonempty."""
    def rec(k_left, t_left, circles_left, prev):
        if circles_left == 0:
            if k_left == 0 and t_left == 0:
                yield ()
            return
        for kc in range(k_left + 1):
            for tc in range(t_left + 1):
                if kc + tc == 0:
                    continue
                cur = (kc, tc)
                if prev is not None and cur > prev:
                    continue
                for tail in rec(k_left - kc, t_left - tc, circles_left - 1, cur):
                    yield (cur,) + tail

    return rec(k, t, b, None)


def _circle_patterns(kc: int, tc: int):
    """Distinct cyclic M/T patterns with kc marked and tc trivalent slots."""
    seen = set()
    for positions in itertools.combinations(range(kc + tc), kc):
        word = ["T"] * (kc + tc)
        for p in positions:
            word[p] = "M"
        rotations = min(
            tuple(word[i:] + word[:i]) for i in range(len(word))
        )
        seen.add(rotations)
    return sorted(seen)


def _generate_maps(g: int, k: int, l: int, kind: str = REGULAR):
    """All critical iso-classes with the given counts (l >= 1)."""
    v3 = 2 * (g + l - 1)
    if v3 < 0:
        return []
    out: dict[bytes, RibbonGraph] = {}
    for b in range(1, g + 2):
        if (b - g) % 2 == 0:
            continue
        for t in range(v3 + 1):
            interior = v3 - t
            if k + t < b:
                continue
            for dist in _boundary_distributions(k, t, b):
                pattern_choices = [_circle_patterns(kc, tc) for kc, tc in dist]
                for patterns in itertools.product(*pattern_choices):
                    scaffold = _build_scaffold(list(patterns), interior)
                    for alpha in _match_stubs(scaffold, l):
                        for graph in _finalize(scaffold, alpha, l, kind):
                            cls = classify(graph)
                            if cls.kind != "critical" or (cls.genus, cls.k, cls.l) != (g, k, l):
                                continue
                            code = canonical_code(graph)
                            if code not in out:
                                out[code] = canonical_form(graph)
    return [out[c] for c in sorted(out)]


@lru_cache(maxsize=None)
def _component_pool(g: int, k: int, l: int) -> tuple:
    return tuple(gen_components(g, k, l))


def gen_components(g: int, k: int, l: int, bounds: Bounds | None = None) -> list[RibbonGraph]:
    """Critical (g,k,l) iso-classes, exhaustive, sorted by canonical code.

    The ghost is the unique l = 0 output (at (0,3,0)); exceptional graphs
    are built by :func:`ribbonint.mapcore.exceptional`, not generated here.
    """
    if g < 0 or k < 0 or l < 0:
        return []
    if 2 * g - 2 + k + 2 * l <= 0:
        return []
    _check_bounds(component_dart_bound(g, k, l), bounds)
    if l == 0:
        return [ghost()] if (g, k) == (0, 3) else []
    return _generate_maps(g, k, l)


def kp_dart_bound(n: int, genus_max: int) -> int:
    return 2 * 3 * (genus_max - 1 + n)


def gen_kp(n: int, genus_max: int, bounds: Bounds | None = None) -> list[RibbonGraph]:
    """Labeled-face trivalent graphs with no marked points, genus <= max."""
    if n < 1:
        raise ValueError("n >= 1 required")
    _check_bounds(max(kp_dart_bound(n, genus_max), 0), bounds)
    out: dict[bytes, RibbonGraph] = {}
    for g in range(genus_max + 1):
        if g - 1 + n <= 0:
            continue  # empty graph: no valid map
        for graph in _generate_maps(g, 0, n):
            out[canonical_code(graph)] = graph
    return [out[c] for c in sorted(out)]


# ---------------------------------------------------------------------------
# Nodal families
# ---------------------------------------------------------------------------
#
# Component spec bookkeeping.  Every non-ghost critical component (g_i, k_i,
# l_i >= 1) contributes
#
#     cost_i = k_i + 3*(g_i + l_i - 1) + (# illegal sides on it)
#
# to the total lambda-degree of the weight product (internal edges plus one
# per boundary vertex plus two per illegal side, minus the arcs merged away),
# while ghosts contribute 0 and exceptional components only their sigma
# degree.  The smoothing genus is sum(g_i) + nodes - components + 1.  These
# two identities bound every admissible component multiset, which is what
# certifies exhaustiveness for the nodal generators.


@dataclass(frozen=True)
class _Spec:
    is_ghost: bool
    g: int = 0
    l: int = 0
    k: int = 0
    legal: int = 0
    illegal: int = 0
    free: int = 0

    @property
    def cost(self) -> int:
        if self.is_ghost:
            return 0
        return self.k + 3 * (self.g + self.l - 1) + self.illegal


def _spec_candidates(budget: int, l_max: int, extended: bool):
    """All single-component specs within the degree budget."""
    out = []
    # ghosts: free + legal = 3, no illegal
    if extended:
        out.append(_Spec(is_ghost=True, k=3, legal=3))
    else:
        for legal in range(4):
            out.append(_Spec(is_ghost=True, k=3, legal=legal, free=3 - legal))
    for l_i in range(1, l_max + 1):
        for g_i in range(0, budget // 3 + 2):
            base = 3 * (g_i + l_i - 1)
            if base > budget:
                break
            for k_i in range(1, budget - base + 1):
                if 2 * g_i - 2 + k_i + 2 * l_i <= 0:
                    continue
                for ill in range(0, min(k_i, budget - base - k_i) + 1):
                    max_legal = k_i - ill
                    for legal in range(0 if not extended else 1, max_legal + 1):
                        free = k_i - ill - legal
                        if extended and free:
                            continue
                        if legal + free < 1:
                            continue  # no circle could be odd
                        out.append(
                            _Spec(False, g_i, l_i, k_i, legal, ill, free)
                        )
    return out


def _spec_multisets(specs, budget, l_total, genus, k_free, exc_slots):
    """Yield spec multisets satisfying all global identities.

    budget: total weight degree; l_total: labeled faces; genus: smoothing
    genus; k_free: total free marked points; exc_slots: the sigma-index
    multiset of the exceptional components, whose vertices provide illegal
    sides.  Every ghost or component adds at least one unit of free, legal
    or cost, so the recursion terminates.
    """
    n_exc = len(exc_slots)
    sum_exc = sum(m + 1 for m in exc_slots)
    legal_cap = budget + sum_exc  # every non-exceptional illegal side costs 1

    specs = sorted(specs, key=lambda s: (s.is_ghost, s.g, s.l, s.k, s.legal, s.illegal))

    def rec(idx, budget_left, l_left, legal, illegal, free, gsum, ncomp, chosen):
        if (
            budget_left == 0
            and l_left == 0
            and free == k_free
            and legal == illegal + sum_exc
            and gsum + legal - (ncomp + n_exc) + 1 == genus
            and ncomp + n_exc >= 1
        ):
            yield tuple(chosen)
        if idx >= len(specs):
            return
        s = specs[idx]
        # skip this spec entirely
        yield from rec(idx + 1, budget_left, l_left, legal, illegal, free, gsum, ncomp, chosen)
        # or take one more copy (stay at idx to allow repeats)
        if (
            s.cost <= budget_left
            and s.l <= l_left
            and free + s.free <= k_free
            and legal + s.legal <= legal_cap
        ):
            yield from rec(
                idx,
                budget_left - s.cost,
                l_left - s.l,
                legal + s.legal,
                illegal + s.illegal,
                free + s.free,
                gsum + s.g,
                ncomp + 1,
                chosen + [s],
            )

    yield from rec(0, budget, l_total, 0, 0, 0, 0, 0, [])


def _assign_labels(l_sizes, l_total):
    """Ordered partitions of {1..l_total} into blocks of the given sizes."""
    labels = list(range(1, l_total + 1))

    def rec(sizes, pool):
        if not sizes:
            yield ()
            return
        first, rest = sizes[0], sizes[1:]
        for combo in itertools.combinations(pool, first):
            remaining = [x for x in pool if x not in combo]
            for tail in rec(rest, remaining):
                yield (combo,) + tail

    return rec(list(l_sizes), labels)


def _realize_multiset(spec_tuple, exc_slots, l_total, mode):
    """Yield assembled candidate NodalGraphs for one spec multiset."""
    exc_comps = [exceptional(m + 1) for m in exc_slots]

    pools = []
    for s in spec_tuple:
        if s.is_ghost:
            pools.append([ghost()])
        else:
            pools.append(list(_component_pool(s.g, s.k, s.l)))
    if any(not p for p in pools):
        return

    # choose graphs per spec (combinations with repetition over equal specs)
    spec_groups: dict[_Spec, list[int]] = {}
    for i, s in enumerate(spec_tuple):
        spec_groups.setdefault(s, []).append(i)

    graph_choices_per_group = []
    group_order = list(spec_groups.items())
    for s, idxs in group_order:
        graph_choices_per_group.append(
            list(itertools.combinations_with_replacement(range(len(pools[idxs[0]])), len(idxs)))
        )

    for group_pick in itertools.product(*graph_choices_per_group):
        comps: list = [None] * len(spec_tuple)
        for (s, idxs), picks in zip(group_order, group_pick):
            for pos, pick in zip(idxs, picks):
                comps[pos] = pools[pos][pick]

        l_sizes = [s.l for s in spec_tuple]
        for label_blocks in _assign_labels(l_sizes, l_total):
            labeled = []
            for comp, block in zip(comps, label_blocks):
                local = sorted(trace(comp).labels)
                mapping = {old: new for old, new in zip(local, sorted(block))}
                labeled.append(relabel_faces(comp, mapping) if mapping else comp)
            all_comps = labeled + exc_comps

            # role assignment: per component, which marked are legal/illegal
            role_choices = []
            for ci, (s, comp) in enumerate(zip(spec_tuple, labeled)):
                marks = sorted(comp.marked)
                opts = []
                for legal_set in itertools.combinations(marks, s.legal):
                    rem = [v for v in marks if v not in legal_set]
                    for ill_set in itertools.combinations(rem, s.illegal):
                        opts.append((legal_set, ill_set))
                role_choices.append(opts)

            for roles in itertools.product(*role_choices):
                legal_eps = [
                    (ci, v) for ci, (ls, _) in enumerate(roles) for v in ls
                ]
                illegal_eps = [
                    (ci, v) for ci, (_, il) in enumerate(roles) for v in il
                ]
                for ei, comp in enumerate(exc_comps):
                    illegal_eps.extend(
                        (len(labeled) + ei, v) for v in sorted(comp.marked)
                    )
                if len(legal_eps) != len(illegal_eps):
                    continue
                for perm in itertools.permutations(range(len(illegal_eps))):
                    nodes = [
                        (legal_eps[i], illegal_eps[perm[i]])
                        for i in range(len(legal_eps))
                    ]
                    try:
                        g = assemble(all_comps, nodes)
                    except NodalError:
                        continue
                    yield g


def gen_extended(genus: int, l: int, exc, bounds: Bounds | None = None) -> list[NodalGraph]:
    """Odd extended critical iso-classes with the given exceptional profile.

    ``exc`` is the multiset of sigma indices: one exceptional component with
    m+1 boundary vertices per entry m.
    """
    exc_slots = tuple(sorted(exc))
    d_ins = 3 * (genus - 1 + l + len(exc_slots))
    d_lambda = d_ins - sum(2 * m + 2 for m in exc_slots)
    if d_lambda < 0 or genus < 0:
        return []
    specs = _spec_candidates(d_lambda, l, extended=True)
    out: dict[bytes, NodalGraph] = {}
    for multiset in _spec_multisets(specs, d_lambda, l, genus, 0, exc_slots):
        for cand in _realize_multiset(multiset, exc_slots, l, "extended"):
            if not is_odd(cand, "extended"):
                continue
            prof = smooth(cand)
            if prof.genus != genus or prof.exc != exc_slots:
                continue
            code = nodal_canonical_code(cand)
            if code not in out:
                out[code] = cand
    return [out[c] for c in sorted(out)]


def gen_nodal(
    genus: int,
    l: int,
    k: int | None = None,
    b: int | None = None,
    kbar=None,
    bounds: Bounds | None = None,
) -> list[NodalGraph]:
    """Odd critical nodal iso-classes whose smoothing matches the target.

    Either ``kbar`` (multiset of per-circle free-mark counts) or the pair
    ``(k, b)`` selects the family; with only ``(k, b)`` every distribution
    is accepted.
    """
    if kbar is not None:
        kbar = tuple(sorted(kbar))
        if k is not None and sum(kbar) != k:
            raise ValueError("sum(kbar) must equal k")
        if b is not None and len(kbar) != b:
            raise ValueError("len(kbar) must equal b")
        k = sum(kbar)
        b = len(kbar)
    if k is None or b is None:
        raise ValueError("need kbar or both k and b")
    if genus < 0 or b < 1 or b > genus + 1 or (b - genus) % 2 == 0:
        return []
    d_lambda = 3 * genus - 3 + 3 * l + k
    if d_lambda < 0:
        return []
    specs = _spec_candidates(d_lambda, l, extended=False)
    out: dict[bytes, NodalGraph] = {}
    for multiset in _spec_multisets(specs, d_lambda, l, genus, k, ()):
        for cand in _realize_multiset(multiset, (), l, "critical"):
            if not is_odd(cand, "critical"):
                continue
            prof = smooth(cand)
            if prof.genus != genus or prof.b != b:
                continue
            if kbar is not None and prof.kbar != kbar:
                continue
            code = nodal_canonical_code(cand)
            if code not in out:
                out[code] = cand
    return [out[c] for c in sorted(out)]


# ---------------------------------------------------------------------------
# Deterministic parallel driver
# ---------------------------------------------------------------------------


def run_partitioned(tasks, worker, threads: int = 1):
    """Apply ``worker`` to each task and merge dict results deterministically.

    Results must be dicts keyed by canonical codes; the merged dict is
    independent of the thread count and of completion order.
    """
    if threads <= 1:
        parts = [worker(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(worker, tasks))
    merged: dict = {}
    for part in parts:
        merged.update(part)
    return {k: merged[k] for k in sorted(merged)}
