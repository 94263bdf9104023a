r"""
Nodal ribbon graphs: components joined along ordered pairs of boundary
marked points, oddness predicates, and the smoothing trace.

A node is an ordered pair (legal side, illegal side) of boundary marked
points on the components.  Smoothing replaces each node by an external
ribbon edge: the boundary walk entering the legal side continues from the
illegal side's outgoing arc and vice versa.  The number of boundary circles
b and the distribution kbar of the surviving marked points over them are
read off the rewired walk.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .mapcore import (
    EXCEPTIONAL,
    GHOST,
    RibbonGraph,
    TAG_GHOST,
    automorphisms,
    boundary_walks,
    canonical_code,
    canonical_roots,
    trace,
    _rooted_labeling,
)

Endpoint = tuple[int, int]  # (component index, vertex representative)
Node = tuple[Endpoint, Endpoint]  # legal side first


class NodalError(ValueError):
    pass


@dataclass(frozen=True)
class NodalGraph:
    components: tuple[RibbonGraph, ...]
    nodes: tuple[Node, ...]

    @property
    def legal_endpoints(self) -> frozenset:
        return frozenset(n[0] for n in self.nodes)

    @property
    def illegal_endpoints(self) -> frozenset:
        return frozenset(n[1] for n in self.nodes)

    @property
    def free_marked(self) -> frozenset:
        used = self.legal_endpoints | self.illegal_endpoints
        out = set()
        for ci, comp in enumerate(self.components):
            for v in comp.marked:
                if (ci, v) not in used:
                    out.add((ci, v))
        return frozenset(out)

    def role_of(self, endpoint: Endpoint) -> str:
        if endpoint in self.legal_endpoints:
            return "legal"
        if endpoint in self.illegal_endpoints:
            return "illegal"
        ci, v = endpoint
        if v in self.components[ci].marked:
            return "free"
        return "plain"

    def to_json(self) -> dict:
        return {
            "components": [c.to_json() for c in self.components],
            "nodes": [[list(a), list(b)] for a, b in self.nodes],
        }

    @staticmethod
    def from_json(data: dict) -> "NodalGraph":
        comps = tuple(RibbonGraph.from_json(c) for c in data["components"])
        nodes = tuple(
            ((a[0], a[1]), (b[0], b[1])) for a, b in data["nodes"]
        )
        return assemble(comps, nodes)


def assemble(components, nodes) -> NodalGraph:
    """Validated nodal graph, or NodalError carrying the violated clause."""
    comps = tuple(components)
    node_list = tuple((tuple(a), tuple(b)) for a, b in nodes)

    endpoints = [ep for pair in node_list for ep in pair]
    if len(set(endpoints)) != len(endpoints):
        raise NodalError("duplicate endpoint")
    for ci, v in endpoints:
        if not 0 <= ci < len(comps):
            raise NodalError("endpoint component out of range")
        if v not in comps[ci].marked:
            raise NodalError("endpoint is not a boundary marked point")
    for legal, illegal in node_list:
        if comps[illegal[0]].kind == GHOST:
            raise NodalError("ghost-with-illegal")
        if comps[legal[0]].kind == EXCEPTIONAL:
            raise NodalError("exceptional-with-legal")

    labels = [tr_label for c in comps for tr_label in trace(c).labels]
    if len(set(labels)) != len(labels):
        raise NodalError("face labels repeat across components")

    # connectivity of the component graph through nodes
    parent = list(range(len(comps)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for (ci, _), (cj, _) in node_list:
        parent[find(ci)] = find(cj)
    if len({find(i) for i in range(len(comps))}) != 1:
        raise NodalError("disconnected")

    return NodalGraph(comps, node_list)


def is_odd(graph: NodalGraph, mode: str) -> bool:
    """Oddness of a nodal graph.

    critical: every boundary circle of every component carries an odd number
    of free marked points plus legal node sides.  extended: every boundary
    circle of every non-exceptional component carries an odd number of legal
    node sides.
    """
    if mode not in ("critical", "extended"):
        raise ValueError(f"unknown mode {mode!r}")
    for ci, comp in enumerate(graph.components):
        if mode == "extended" and comp.kind == EXCEPTIONAL:
            continue
        for walk in boundary_walks(comp):
            count = 0
            for step in walk:
                role = graph.role_of((ci, step.vertex))
                if role == "legal":
                    count += 1
                elif role == "free" and mode == "critical":
                    count += 1
            if count % 2 == 0:
                return False
    return True


@dataclass(frozen=True)
class SmoothingProfile:
    b: int
    kbar: tuple[int, ...]  # sorted, one entry per smoothed boundary circle
    genus: int
    exc: tuple[int, ...]  # sorted m-values of exceptional components

    def to_json(self) -> dict:
        return {
            "b": self.b,
            "kbar": list(self.kbar),
            "genus": self.genus,
            "exc": list(self.exc),
        }


def smooth(graph: NodalGraph) -> SmoothingProfile:
    """Boundary trace of the smoothing.

    Cuts every component boundary walk at the node endpoints, cross-joins
    the arcs at each node, and counts the resulting circles together with
    the free-marked distribution.  The genus is recomputed from the Euler
    characteristic and cross-checked against the component sum.
    """
    out_arc: dict[Endpoint, tuple[int, int]] = {}
    succ_raw: dict[tuple[int, int], Endpoint] = {}
    free_at: dict[Endpoint, tuple[int, int]] = {}
    for ci, comp in enumerate(graph.components):
        for walk in boundary_walks(comp):
            for pos, step in enumerate(walk):
                arc = (ci, step.arc_dart)
                vertex = (ci, step.vertex)
                out_arc[vertex] = arc
                nxt = walk[(pos + 1) % len(walk)]
                succ_raw[arc] = (ci, nxt.vertex)
                if graph.role_of(vertex) == "free":
                    free_at[vertex] = arc

    partner = {}
    for legal, illegal in graph.nodes:
        partner[legal] = illegal
        partner[illegal] = legal

    def succ(arc):
        entered = succ_raw[arc]
        return out_arc[partner.get(entered, entered)]

    cycles = []
    remaining = set(out_arc.values())
    arc_cycle = {}
    while remaining:
        start = min(remaining)
        cyc = []
        a = start
        while a in remaining:
            remaining.discard(a)
            arc_cycle[a] = len(cycles)
            cyc.append(a)
            a = succ(a)
        cycles.append(cyc)

    counts = [0] * len(cycles)
    for vertex, arc in free_at.items():
        counts[arc_cycle[arc]] += 1

    comps_genus = [trace(c).genus for c in graph.components]
    m = len(graph.nodes)
    genus = sum(comps_genus) + m - len(graph.components) + 1
    chi = sum(1 - g for g in comps_genus) - m
    if genus != 1 - chi:
        raise NodalError("genus bookkeeping mismatch")

    b = len(cycles)
    if b > genus + 1 or (b - genus) % 2 == 0:
        raise NodalError(f"impossible boundary count b={b} for genus {genus}")

    exc = sorted(
        len(c.marked) - 1 for c in graph.components if c.kind == EXCEPTIONAL
    )
    return SmoothingProfile(b=b, kbar=tuple(sorted(counts)), genus=genus, exc=tuple(exc))


# ---------------------------------------------------------------------------
# Edge inventory (weights are attached in the amplitude layer)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EdgeRecord:
    """A weight-carrying edge of a nodal graph.

    kind 'internal': faces (i, j) with labels 1-based, i <= j.
    kind 'boundary': face label (None on a ghost) and the illegal count m.
    """

    kind: str
    faces: tuple = ()
    m: int = 0


def edge_inventory(graph: NodalGraph) -> list[EdgeRecord]:
    """All weighted edges: internal edges of the components plus boundary
    segments between successive non-illegal boundary vertices.

    Exceptional components contribute nothing.  Ghost boundary edges are
    recorded with face None and always weigh 1.
    """
    records = []
    for ci, comp in enumerate(graph.components):
        if comp.kind == EXCEPTIONAL:
            continue
        for d in range(comp.dart_count):
            o = comp.alpha[d]
            if d > o or comp.is_boundary_edge(d) or comp.is_boundary_dart(d):
                continue
            tag_a, tag_b = comp.tags[d], comp.tags[o]
            if TAG_GHOST in (tag_a, tag_b):
                raise NodalError("internal edge bordering a ghost face")
            records.append(EdgeRecord("internal", tuple(sorted((tag_a[1], tag_b[1])))))

        for walk in boundary_walks(comp):
            roles = [graph.role_of((ci, step.vertex)) for step in walk]
            splits = [p for p, r in enumerate(roles) if r != "illegal"]
            if splits:
                runs = []
                for idx, p in enumerate(splits):
                    q = splits[(idx + 1) % len(splits)]
                    span = q - p if q > p else q - p + len(walk)
                    runs.append([(p + s) % len(walk) for s in range(span)])
            else:
                # a circle carrying only illegal sides: one closed edge
                runs = [list(range(len(walk)))]
            for run in runs:
                tags = {walk[p].inner_tag for p in run}
                if len(tags) != 1:
                    raise NodalError("boundary edge borders several faces")
                tag = tags.pop()
                m = len(run) - 1 if splits else len(run)
                face = None if tag == TAG_GHOST else tag[1]
                if face is None and m:
                    raise NodalError("illegal side on a ghost")
                records.append(EdgeRecord("boundary", (face,), m))
    return records


# ---------------------------------------------------------------------------
# Nodal canonical codes and automorphism order
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _component_data(comp: RibbonGraph):
    """Canonical code, a canonical vertex relabeling, and the vertex maps of
    all automorphisms of the canonically relabeled form."""
    code = canonical_code(comp)
    root = canonical_roots(comp)[0]
    labeling = _rooted_labeling(comp, root)
    cf = comp.relabel(labeling)
    # vertex map original -> canonical
    vmap = {}
    for v_cycle in comp.vertices:
        rep = min(v_cycle)
        vmap[rep] = cf.vertex_of[labeling[rep]]
    auto_vertex_maps = []
    for perm in automorphisms(cf):
        vm = {}
        for v_cycle in cf.vertices:
            rep = min(v_cycle)
            vm[rep] = cf.vertex_of[perm[rep]]
        auto_vertex_maps.append(vm)
    return code, vmap, tuple(
        tuple(sorted(vm.items())) for vm in auto_vertex_maps
    )


def _decoration_images(graph: NodalGraph):
    """All images of the node/free-mark decoration under code-respecting
    relabelings.

    Components are placed into canonical slots sorted by canonical code;
    within a group of equal codes every slot assignment is taken, combined
    with every per-component automorphism of the canonical form.  The
    candidates form a group, so every image occurs the same number of times
    and that multiplicity is the nodal automorphism order.
    """
    data = [_component_data(c) for c in graph.components]
    groups: dict[bytes, list[int]] = {}
    for i, d in enumerate(data):
        groups.setdefault(d[0], []).append(i)
    group_list = sorted(groups.items())
    slot_base = {}
    base = 0
    for code, members in group_list:
        slot_base[code] = base
        base += len(members)
    sorted_codes = tuple(
        code for code, members in group_list for _ in members
    )

    images = []
    per_group_perms = [
        list(itertools.permutations(range(len(members))))
        for _, members in group_list
    ]
    for choice in itertools.product(*per_group_perms):
        pi = {}
        for (code, members), perm in zip(group_list, choice):
            for pos, i in enumerate(members):
                pi[i] = slot_base[code] + perm[pos]
        aut_choices = [
            [dict(vm) for vm in data[i][2]] for i in range(len(graph.components))
        ]
        for auts in itertools.product(*aut_choices):
            def image(ep):
                ci, v = ep
                return (pi[ci], auts[ci][data[ci][1][v]])

            nodes = tuple(sorted((image(a), image(b)) for a, b in graph.nodes))
            frees = tuple(sorted(image(ep) for ep in graph.free_marked))
            images.append((sorted_codes, nodes, frees))
    return images


def nodal_aut_order(graph: NodalGraph) -> int:
    """Order of the automorphism group: tuples of component isomorphisms
    (component permutation respecting canonical codes plus per-component
    map automorphisms) preserving the ordered node pairing."""
    images = _decoration_images(graph)
    return images.count(min(images))


def nodal_canonical_code(graph: NodalGraph) -> bytes:
    """Byte code shared exactly by isomorphic nodal graphs.

    Minimizes, over all code-respecting component orderings and component
    automorphisms, the serialization of the sorted component codes plus the
    node pairing and free marked set in canonical vertex coordinates.
    """
    return repr(min(_decoration_images(graph))).encode()
