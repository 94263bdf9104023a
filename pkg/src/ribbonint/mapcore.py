r"""
Combinatorial maps for ribbon graphs on oriented surfaces with boundary.

A graph is a pair of permutations on darts 0..n-1: ``sigma`` (counterclockwise
rotation at each vertex) and ``alpha`` (fixed-point-free edge involution).
Vertices are sigma-cycles, edges are alpha-pairs, and the cycles of the face
permutation phi = sigma o alpha decompose into

  * labeled faces  (tag ('F', label), label in 1..l),
  * ghost faces    (tag ('G',), the unmarked disk of ghosts and exceptionals),
  * boundary caps  (tag ('B',), the walks along the surface boundary).

The surface is recovered by capping each boundary cycle with a disk, so the
doubled genus is g = 1 - (v - e + f_int) with f_int counting labeled plus
ghost faces only, and b is the number of cap cycles.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

REGULAR = "regular"
GHOST = "ghost"
EXCEPTIONAL = "exceptional"

TAG_BOUNDARY = ("B",)
TAG_GHOST = ("G",)


def face_tag(label: int) -> tuple:
    return ("F", label)


class MapError(ValueError):
    pass


def permutation_cycles(perm: Sequence[int]) -> list[tuple[int, ...]]:
    seen = [False] * len(perm)
    cycles = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        cyc = []
        d = start
        while not seen[d]:
            seen[d] = True
            cyc.append(d)
            d = perm[d]
        cycles.append(tuple(cyc))
    return cycles


@dataclass(frozen=True)
class RibbonGraph:
    """Immutable dart-permutation model of a ribbon graph with boundary.

    ``tags`` assigns to every dart the tag of its phi-cycle; ``marked`` holds
    vertex representatives (the smallest dart of the sigma-cycle).  Marked
    vertices are unordered; face labels are a bijection with 1..l.
    """

    sigma: tuple[int, ...]
    alpha: tuple[int, ...]
    tags: tuple[tuple, ...]
    marked: frozenset = frozenset()
    kind: str = REGULAR

    def __post_init__(self):
        n = len(self.sigma)
        if n == 0 or n % 2:
            raise MapError("dart count must be even and positive")
        if sorted(self.sigma) != list(range(n)) or sorted(self.alpha) != list(range(n)):
            raise MapError("sigma and alpha must be permutations of the darts")
        for d in range(n):
            if self.alpha[d] == d or self.alpha[self.alpha[d]] != d:
                raise MapError("alpha must be a fixed-point-free involution")
        if len(self.tags) != n:
            raise MapError("one tag per dart required")

    @property
    def dart_count(self) -> int:
        return len(self.sigma)

    def phi(self, d: int) -> int:
        return self.sigma[self.alpha[d]]

    @cached_property
    def face_permutation(self) -> tuple[int, ...]:
        return tuple(self.sigma[self.alpha[d]] for d in range(self.dart_count))

    @cached_property
    def vertex_of(self) -> tuple[int, ...]:
        out = [0] * self.dart_count
        for cyc in permutation_cycles(self.sigma):
            rep = min(cyc)
            for d in cyc:
                out[d] = rep
        return tuple(out)

    @cached_property
    def vertices(self) -> tuple[tuple[int, ...], ...]:
        return tuple(permutation_cycles(self.sigma))

    def degree(self, vertex_rep: int) -> int:
        return sum(1 for d in range(self.dart_count) if self.vertex_of[d] == vertex_rep)

    def is_boundary_dart(self, d: int) -> bool:
        return self.tags[d] == TAG_BOUNDARY

    def is_boundary_edge(self, d: int) -> bool:
        """An edge is boundary iff exactly one of its darts lies on a cap."""
        return self.is_boundary_dart(d) != self.is_boundary_dart(self.alpha[d])

    def relabel(self, perm: Sequence[int]) -> "RibbonGraph":
        """Image under the dart relabeling d -> perm[d]."""
        n = self.dart_count
        inv = [0] * n
        for d in range(n):
            inv[perm[d]] = d
        sigma = tuple(perm[self.sigma[inv[d]]] for d in range(n))
        alpha = tuple(perm[self.alpha[inv[d]]] for d in range(n))
        tags = tuple(self.tags[inv[d]] for d in range(n))
        marked_darts = {d for d in range(n) if self.vertex_of[d] in self.marked}
        new_marked = set()
        g = RibbonGraph(sigma, alpha, tags, frozenset(), self.kind)
        for d in marked_darts:
            new_marked.add(g.vertex_of[perm[d]])
        return RibbonGraph(sigma, alpha, tags, frozenset(new_marked), self.kind)

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        flags = []
        labels = {}
        for cyc in permutation_cycles(self.face_permutation):
            rep = min(cyc)
            tag = self.tags[rep]
            if tag == TAG_BOUNDARY:
                flags.append([rep, "boundary"])
            elif tag == TAG_GHOST:
                flags.append([rep, "ghost"])
            else:
                flags.append([rep, "face"])
                labels[str(rep)] = tag[1]
        return {
            "darts": self.dart_count,
            "sigma": list(self.sigma),
            "alpha": list(self.alpha),
            "flags": sorted(flags),
            "face_labels": labels,
            "marked": sorted(self.marked),
            "kind": self.kind,
        }

    @staticmethod
    def from_json(data: dict) -> "RibbonGraph":
        n = data["darts"]
        sigma = tuple(data["sigma"])
        alpha = tuple(data["alpha"])
        by_rep = {rep: flag for rep, flag in data["flags"]}
        labels = {int(k): v for k, v in data["face_labels"].items()}
        tags = [None] * n
        phi = [sigma[alpha[d]] for d in range(n)]
        for cyc in permutation_cycles(phi):
            rep = min(cyc)
            flag = by_rep[rep]
            if flag == "boundary":
                tag = TAG_BOUNDARY
            elif flag == "ghost":
                tag = TAG_GHOST
            else:
                tag = face_tag(labels[rep])
            for d in cyc:
                tags[d] = tag
        return RibbonGraph(
            sigma, alpha, tuple(tags), frozenset(data["marked"]), data["kind"]
        )


@dataclass
class TraceResult:
    faces: list  # (cycle, tag) for labeled and ghost faces
    boundaries: list  # cycles of cap darts
    v: int
    e: int
    f_int: int
    b: int
    genus: int
    degrees: dict
    boundary_vertices: frozenset
    interior_vertices: frozenset
    labels: list = field(default_factory=list)


def trace(graph: RibbonGraph) -> TraceResult:
    """Face/boundary decomposition, counts and doubled genus.

    Raises MapError when the dart set is disconnected, when a phi-cycle
    carries inconsistent tags, or when the cap cycles fail to form the
    boundary of a surface (each edge boundary or internal, each boundary
    vertex with exactly two boundary edge-ends).
    """
    n = graph.dart_count
    # connectivity under <sigma, alpha>
    seen = {0}
    stack = [0]
    while stack:
        d = stack.pop()
        for nxt in (graph.sigma[d], graph.alpha[d]):
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    if len(seen) != n:
        raise MapError("disconnected dart set")

    faces = []
    boundaries = []
    labels = []
    for cyc in permutation_cycles(graph.face_permutation):
        tag = graph.tags[cyc[0]]
        if any(graph.tags[d] != tag for d in cyc):
            raise MapError("tags differ along a face cycle")
        if tag == TAG_BOUNDARY:
            boundaries.append(cyc)
        else:
            faces.append((cyc, tag))
            if tag != TAG_GHOST:
                labels.append(tag[1])
    if not boundaries:
        raise MapError("a surface with boundary needs at least one cap cycle")
    # labels must be distinct positive integers; they are a bijection with
    # [l] globally, which assemble checks across nodal components
    if len(set(labels)) != len(labels) or any(x < 1 for x in labels):
        raise MapError(f"face labels {sorted(labels)} are not distinct positives")

    # boundary edges: exactly one dart on a cap
    cap_darts = {d for cyc in boundaries for d in cyc}
    for d in cap_darts:
        if graph.alpha[d] in cap_darts:
            raise MapError("edge with both sides on the boundary")

    v = len(graph.vertices)
    e = n // 2
    f_int = len(faces)
    b = len(boundaries)
    genus = 1 - (v - e + f_int)

    degrees = {}
    boundary_ends = {}
    for cyc in graph.vertices:
        rep = min(cyc)
        degrees[rep] = len(cyc)
        boundary_ends[rep] = sum(1 for d in cyc if graph.is_boundary_edge(d))
    boundary_vertices = frozenset(r for r, k in boundary_ends.items() if k)
    for r in boundary_vertices:
        if boundary_ends[r] != 2:
            raise MapError("boundary vertex without exactly two boundary edge-ends")
    interior_vertices = frozenset(degrees) - boundary_vertices

    return TraceResult(
        faces=faces,
        boundaries=boundaries,
        v=v,
        e=e,
        f_int=f_int,
        b=b,
        genus=genus,
        degrees=degrees,
        boundary_vertices=boundary_vertices,
        interior_vertices=interior_vertices,
        labels=sorted(labels),
    )


@dataclass(frozen=True)
class Classification:
    kind: str  # 'critical' | 'ghost' | 'exceptional' | 'invalid'
    genus: int = 0
    k: int = 0
    l: int = 0
    reason: str = ""


def classify(graph: RibbonGraph) -> Classification:
    """Match a graph against the critical / ghost / exceptional families.

    Returns an 'invalid' classification carrying the first violated clause
    instead of raising.
    """
    try:
        tr = trace(graph)
    except MapError as err:
        return Classification("invalid", reason=str(err))

    k = len(graph.marked)
    l = len(tr.labels)
    ghost_faces = sum(1 for _, tag in tr.faces if tag == TAG_GHOST)

    for rep in graph.marked:
        if rep not in tr.degrees:
            return Classification("invalid", reason="marked vertex missing")
        if tr.degrees[rep] != 2:
            return Classification("invalid", reason="vertex degree")
        if rep not in tr.boundary_vertices:
            return Classification("invalid", reason="marked vertex off the boundary")
    for rep, deg in tr.degrees.items():
        if rep in graph.marked:
            continue
        if deg != 3:
            return Classification("invalid", reason="vertex degree")

    if graph.kind == EXCEPTIONAL:
        if l != 0 or tr.genus != 0 or k < 1:
            return Classification("invalid", reason="exceptional parameters")
        if tr.b != 1 or ghost_faces != 1:
            return Classification("invalid", reason="exceptional topology")
        if any(not graph.is_boundary_edge(d) for d in range(graph.dart_count)):
            return Classification("invalid", reason="exceptional internal edge")
        if len(graph.marked) != tr.v:
            return Classification("invalid", reason="exceptional unmarked vertex")
        return Classification("exceptional", genus=0, k=k, l=0)

    if graph.kind == GHOST:
        if (l, tr.genus, k, tr.b, ghost_faces) != (0, 0, 3, 1, 1):
            return Classification("invalid", reason="ghost parameters")
        return Classification("ghost", genus=0, k=3, l=0)

    # regular critical graphs: every internal face labeled
    if ghost_faces:
        return Classification("invalid", reason="ghost face on a regular graph")
    if l == 0:
        return Classification("invalid", reason="regular graph needs labeled faces")
    return Classification("critical", genus=tr.genus, k=k, l=l)


# ---------------------------------------------------------------------------
# Canonical codes and automorphisms
# ---------------------------------------------------------------------------


def _rooted_labeling(graph: RibbonGraph, root: int) -> list[int]:
    """BFS dart labeling from the root using (sigma, alpha) successors."""
    n = graph.dart_count
    label = [-1] * n
    order = [root]
    label[root] = 0
    head = 0
    while head < len(order):
        d = order[head]
        head += 1
        for nxt in (graph.sigma[d], graph.alpha[d]):
            if label[nxt] < 0:
                label[nxt] = len(order)
                order.append(nxt)
    return label


def _rooted_code(graph: RibbonGraph, root: int) -> tuple:
    label = _rooted_labeling(graph, root)
    n = graph.dart_count
    inv = [0] * n
    for d in range(n):
        inv[label[d]] = d
    rows = []
    for x in range(n):
        d = inv[x]
        rows.append(
            (
                label[graph.sigma[d]],
                label[graph.alpha[d]],
                graph.tags[d],
                graph.vertex_of[d] in graph.marked,
            )
        )
    return (graph.kind, tuple(rows))


def _code_to_bytes(code: tuple) -> bytes:
    return repr(code).encode()


def canonical_code(graph: RibbonGraph) -> bytes:
    """Deterministic byte code equal across all dart relabelings.

    The code is the minimum over root darts of the rooted BFS serialization
    of (sigma, alpha, face tags, marked flags, kind); isomorphic graphs
    (preserving labels, marks and flags) share it.
    """
    best = min(_rooted_code(graph, r) for r in range(graph.dart_count))
    return _code_to_bytes(best)


def canonical_roots(graph: RibbonGraph) -> list[int]:
    codes = [(_rooted_code(graph, r), r) for r in range(graph.dart_count)]
    best = min(c for c, _ in codes)
    return [r for c, r in codes if c == best]


def automorphism_order(graph: RibbonGraph) -> int:
    """Order of the orientation-preserving automorphism group.

    Automorphisms of a connected map act freely on darts, so the order is
    the number of root darts whose rooted serialization is canonical.
    """
    return len(canonical_roots(graph))


def automorphisms(graph: RibbonGraph) -> list[tuple[int, ...]]:
    """All automorphisms as dart permutations (identity included)."""
    roots = canonical_roots(graph)
    base = _rooted_labeling(graph, roots[0])
    n = graph.dart_count
    inv_base = [0] * n
    for d in range(n):
        inv_base[base[d]] = d
    out = []
    for r in roots:
        lab = _rooted_labeling(graph, r)
        inv = [0] * n
        for d in range(n):
            inv[lab[d]] = d
        # map dart d (position x in base labeling) to the dart at position x
        # in the labeling rooted at r
        perm = tuple(inv[base[d]] for d in range(n))
        out.append(perm)
    return out


def canonical_form(graph: RibbonGraph) -> "RibbonGraph":
    """The canonically relabeled representative of the isomorphism class."""
    root = canonical_roots(graph)[0]
    return graph.relabel(_rooted_labeling(graph, root))


# ---------------------------------------------------------------------------
# Elementary builders
# ---------------------------------------------------------------------------


def circle_graph(
    n_vertices: int,
    inner_tag: tuple,
    kind: str = REGULAR,
    marked: Iterable[int] | None = None,
) -> RibbonGraph:
    """A single boundary circle with ``n_vertices`` degree-2 vertices.

    Edge i runs from vertex i to vertex i+1 (mod n) with darts (2i, 2i+1);
    the inner phi-cycle carries ``inner_tag`` and the outer one is the cap.
    ``marked`` lists marked vertex positions (defaults to all).
    """
    n = n_vertices
    if n < 1:
        raise MapError("a boundary circle needs at least one vertex")
    sigma = [0] * (2 * n)
    alpha = [0] * (2 * n)
    for i in range(n):
        s, t = 2 * i, 2 * i + 1
        alpha[s] = t
        alpha[t] = s
        t_prev = 2 * ((i - 1) % n) + 1
        sigma[t_prev] = s
        sigma[s] = t_prev
    tags = [None] * (2 * n)
    for i in range(n):
        tags[2 * i] = inner_tag
        tags[2 * i + 1] = TAG_BOUNDARY
    g = RibbonGraph(tuple(sigma), tuple(alpha), tuple(tags), frozenset(), kind)
    if marked is None:
        marked_positions = range(n)
    else:
        marked_positions = marked
    reps = set()
    for i in marked_positions:
        s = 2 * i
        reps.add(g.vertex_of[s])
    return RibbonGraph(g.sigma, g.alpha, g.tags, frozenset(reps), kind)


def ghost() -> RibbonGraph:
    """The unique (0,3,0) graph: three marked points on a circle."""
    return circle_graph(3, TAG_GHOST, kind=GHOST)


def exceptional(k: int) -> RibbonGraph:
    """The unique exceptional graph with k >= 1 boundary vertices."""
    if k < 1:
        raise MapError("exceptional graphs need k >= 1")
    return circle_graph(k, TAG_GHOST, kind=EXCEPTIONAL)


def disk() -> RibbonGraph:
    """The (0,1,1) graph: one marked point on the boundary of one face."""
    return circle_graph(1, face_tag(1))


def relabel_faces(graph: RibbonGraph, mapping: dict) -> RibbonGraph:
    """New graph with face label x replaced by mapping[x]."""
    tags = tuple(
        face_tag(mapping[t[1]]) if t not in (TAG_BOUNDARY, TAG_GHOST) else t
        for t in graph.tags
    )
    return RibbonGraph(graph.sigma, graph.alpha, tags, graph.marked, graph.kind)


# ---------------------------------------------------------------------------
# Boundary walks (used by smoothing and edge weights)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundaryStep:
    """One step of a boundary walk: the vertex entered, then the arc left
    along.  ``inner_tag`` is the face tag on the surface side of the arc."""

    vertex: int
    arc_dart: int  # cap dart of the arc
    inner_tag: tuple


def boundary_walks(graph: RibbonGraph) -> list[list[BoundaryStep]]:
    """Each boundary circle as its cyclic sequence of (vertex, arc) steps.

    The walk follows the cap cycles of the face permutation; consecutive
    arcs share the vertex recorded on the later step.
    """
    tr = trace(graph)
    walks = []
    for cyc in tr.boundaries:
        steps = []
        for d in cyc:
            steps.append(
                BoundaryStep(
                    vertex=graph.vertex_of[d],
                    arc_dart=d,
                    inner_tag=graph.tags[graph.alpha[d]],
                )
            )
        walks.append(steps)
    return walks
