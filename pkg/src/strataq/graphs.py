"""Stable graphs: validation, canonical forms, automorphism counts, enumeration.

A stable graph is the dual graph of a nodal marked curve: each vertex carries
a genus, each edge records a node, and each leg records a labeled marked
point.  Half-edges are indexed ``0..H-1``; ``incidence[h]`` is the vertex
carrying half-edge ``h`` and ``involution[h]`` is its partner.  Fixed points
of the involution are legs, 2-cycles are edges (a 2-cycle with both halves on
one vertex is a loop).

The genus of a graph is ``h1 + sum of vertex genera`` with
``h1 = #edges - #vertices + 1``, and every vertex must satisfy the stability
condition ``2*g(v) - 2 + n(v) > 0`` where ``n(v)`` counts incident half-edges.

Canonicalization is an exact search: iterative color refinement on vertex
invariants followed by exhaustive tie-breaking inside refined color classes.
Graphs at the scale this library targets have at most a handful of vertices,
so the search is cheap and needs no heuristics.  The same engine accepts
per-vertex and per-half-edge decorations so that twisted/level graphs can be
canonicalized with the identical code path (see ``twists``).
"""

from __future__ import annotations

import json
from itertools import combinations_with_replacement, permutations, product
from math import factorial


class StableGraph:
    """Immutable stable graph.

    Parameters
    ----------
    genus_list : iterable of int
        Genus of each vertex; vertex indices are positions in this list.
    incidence : iterable of int
        ``incidence[h]`` = index of the vertex carrying half-edge ``h``.
    involution : iterable of int
        ``involution[h]`` = partner half-edge; fixed points are legs.
    legs : mapping or iterable of (half_edge, label)
        Marking labels ``1..n`` on the fixed points of the involution.
    """

    __slots__ = ("genus_list", "incidence", "involution", "leg_items")

    def __init__(self, genus_list, incidence, involution, legs):
        self.genus_list = tuple(int(x) for x in genus_list)
        self.incidence = tuple(int(x) for x in incidence)
        self.involution = tuple(int(x) for x in involution)
        items = legs.items() if isinstance(legs, dict) else legs
        self.leg_items = tuple(sorted((int(h), int(label)) for h, label in items))

    # ------------------------------------------------------------------
    # basic accessors

    @property
    def legs(self):
        """Dict half-edge -> marking label."""
        return dict(self.leg_items)

    @property
    def num_vertices(self):
        return len(self.genus_list)

    @property
    def num_half_edges(self):
        return len(self.incidence)

    @property
    def num_markings(self):
        return len(self.leg_items)

    def edges(self):
        """One ``(h, h')`` pair per edge, with ``h < h'``."""
        return [
            (h, self.involution[h])
            for h in range(len(self.involution))
            if self.involution[h] > h
        ]

    def num_edges(self):
        return len(self.edges())

    def half_edges_at(self, v):
        return [h for h, w in enumerate(self.incidence) if w == v]

    def vertex_degree(self, v):
        return sum(1 for w in self.incidence if w == v)

    def loops_at(self, v):
        return [
            (h, hp)
            for (h, hp) in self.edges()
            if self.incidence[h] == v and self.incidence[hp] == v
        ]

    def h1(self):
        """First Betti number ``#edges - #vertices + 1`` (graph connected)."""
        return self.num_edges() - self.num_vertices + 1

    def key(self):
        return (self.genus_list, self.incidence, self.involution, self.leg_items)

    def __eq__(self, other):
        return isinstance(other, StableGraph) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return "StableGraph(genus_list=%r, incidence=%r, involution=%r, legs=%r)" % (
            self.genus_list,
            self.incidence,
            self.involution,
            list(self.leg_items),
        )


class CanonicalForm:
    """Canonical byte encoding of an isomorphism class plus |Aut|."""

    __slots__ = ("canonical_bytes", "automorphism_count")

    def __init__(self, canonical_bytes, automorphism_count):
        self.canonical_bytes = canonical_bytes
        self.automorphism_count = automorphism_count

    def __eq__(self, other):
        return (
            isinstance(other, CanonicalForm)
            and self.canonical_bytes == other.canonical_bytes
            and self.automorphism_count == other.automorphism_count
        )

    def __hash__(self):
        return hash(self.canonical_bytes)

    def __repr__(self):
        return "CanonicalForm(%r, automorphism_count=%d)" % (
            self.canonical_bytes,
            self.automorphism_count,
        )


# ----------------------------------------------------------------------
# validation


def genus(graph):
    """Total genus ``h1 + sum of vertex genera`` of a valid graph."""
    return graph.h1() + sum(graph.genus_list)


def validate_stable_graph(graph, expected_genus=None):
    """Check all stable-graph invariants.

    Returns a list of violation strings; the empty list means the graph is
    valid.  When ``expected_genus`` is given, genus bookkeeping is checked
    against it as well.
    """
    violations = []
    H = len(graph.incidence)
    if len(graph.involution) != H:
        violations.append("involution and incidence index different half-edge sets")
        return violations
    if any(not (0 <= h < H) for h in graph.involution):
        violations.append("involution maps outside the half-edge set")
        return violations
    if any(not (0 <= v < graph.num_vertices) for v in graph.incidence):
        violations.append("incidence maps outside the vertex set")
        return violations
    for h in range(H):
        if graph.involution[graph.involution[h]] != h:
            violations.append("non-involutive at half-edge %d" % h)
            return violations

    fixed = {h for h in range(H) if graph.involution[h] == h}
    leg_halves = {h for h, _ in graph.leg_items}
    if leg_halves != fixed:
        violations.append(
            "legs %s do not match involution fixed points %s"
            % (sorted(leg_halves), sorted(fixed))
        )
    labels = sorted(label for _, label in graph.leg_items)
    if labels != list(range(1, len(labels) + 1)):
        violations.append("leg labels %s are not 1..n" % labels)

    for v, gv in enumerate(graph.genus_list):
        if gv < 0:
            violations.append("negative genus at vertex %d" % v)
        if 2 * gv - 2 + graph.vertex_degree(v) <= 0:
            violations.append("unstable vertex %d" % v)

    if graph.num_vertices and not _is_connected(graph):
        violations.append("disconnected")

    if expected_genus is not None and not violations:
        if genus(graph) != expected_genus:
            violations.append(
                "genus mismatch: computed %d, expected %d"
                % (genus(graph), expected_genus)
            )
    return violations


def _is_connected(graph):
    V = graph.num_vertices
    if V <= 1:
        return True
    neighbors = {v: set() for v in range(V)}
    for h, hp in graph.edges():
        u, v = graph.incidence[h], graph.incidence[hp]
        neighbors[u].add(v)
        neighbors[v].add(u)
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for w in neighbors[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == V


# ----------------------------------------------------------------------
# canonical labeling engine (shared with decorated graphs)


def canonical_data(graph, vertex_extra=None, half_edge_extra=None):
    """Canonical encoding and automorphism count of a decorated graph.

    ``vertex_extra`` (per vertex) and ``half_edge_extra`` (per half-edge) are
    optional decorations that isomorphisms must preserve; twisted and level
    graphs canonicalize through here.  Returns ``(order, encoding, aut)``
    where ``order`` lists the original vertex indices in canonical position
    order, ``encoding`` is a hashable tuple identifying the isomorphism
    class, and ``aut`` is the order of the automorphism group (isomorphisms
    fix leg labels and preserve all decorations).
    """
    V = graph.num_vertices
    vx = tuple(vertex_extra) if vertex_extra is not None else (None,) * V
    hx = (
        tuple(half_edge_extra)
        if half_edge_extra is not None
        else (None,) * graph.num_half_edges
    )

    legs_at = {v: [] for v in range(V)}
    for h, label in graph.leg_items:
        legs_at[graph.incidence[h]].append((label, hx[h]))
    for v in legs_at:
        legs_at[v].sort(key=_sort_key)

    loops_at = {v: [] for v in range(V)}
    plain_edges = []  # (u, v, dec_u, dec_v) with u != v
    for h, hp in graph.edges():
        u, v = graph.incidence[h], graph.incidence[hp]
        if u == v:
            loops_at[u].append(tuple(sorted((hx[h], hx[hp]), key=_sort_key)))
        else:
            plain_edges.append((u, v, hx[h], hx[hp]))
    for v in loops_at:
        loops_at[v].sort(key=_sort_key)

    base = {
        v: (
            graph.genus_list[v],
            vx[v],
            graph.vertex_degree(v),
            tuple(legs_at[v]),
            tuple(loops_at[v]),
        )
        for v in range(V)
    }

    # iterative refinement on (own invariant, multiset of neighbor invariants)
    color = _dense_colors(base)
    while True:
        signature = {}
        for v in range(V):
            around = []
            for (u, w, du, dw) in plain_edges:
                if u == v:
                    around.append((color[w], du, dw))
                if w == v:
                    around.append((color[u], dw, du))
            signature[v] = (color[v], base[v], tuple(sorted(around, key=_sort_key)))
        new_color = _dense_colors(signature)
        if new_color == color:
            break
        color = new_color

    classes = {}
    for v in range(V):
        classes.setdefault(color[v], []).append(v)
    ordered_classes = [classes[c] for c in sorted(classes)]

    best = None
    for order in _class_orders(ordered_classes):
        pos = {v: i for i, v in enumerate(order)}
        enc = _encode(graph, order, pos, vx, legs_at, loops_at, plain_edges)
        if best is None or enc < best[1]:
            best = (order, enc)
    order, encoding = best

    aut = _count_vertex_autos(
        ordered_classes, base, plain_edges
    ) * _edge_kernel_size(loops_at, plain_edges)
    return order, encoding, aut


def _sort_key(item):
    """Total order on heterogeneous decoration tuples (None-safe)."""
    if isinstance(item, tuple):
        return (1, tuple(_sort_key(x) for x in item))
    if item is None:
        return (0, ())
    if isinstance(item, int):
        return (2, item)
    return (3, str(item))


def _dense_colors(mapping):
    ranked = sorted(set(mapping.values()), key=_sort_key)
    rank = {key: i for i, key in enumerate(ranked)}
    return {v: rank[key] for v, key in mapping.items()}


def _class_orders(ordered_classes):
    """All vertex orders that respect refined color classes."""
    pools = [list(permutations(cls)) for cls in ordered_classes]
    for choice in product(*pools):
        yield [v for cls in choice for v in cls]


def _encode(graph, order, pos, vx, legs_at, loops_at, plain_edges):
    verts = tuple((graph.genus_list[v], _sort_key(vx[v])) for v in order)
    legs = tuple(
        sorted(
            (label, pos[v], _sort_key(dec))
            for v in range(graph.num_vertices)
            for (label, dec) in legs_at[v]
        )
    )
    rows = []
    for (u, v, du, dv) in plain_edges:
        if pos[u] < pos[v]:
            rows.append((pos[u], pos[v], _sort_key(du), _sort_key(dv)))
        else:
            rows.append((pos[v], pos[u], _sort_key(dv), _sort_key(du)))
    for v in range(graph.num_vertices):
        for pair in loops_at[v]:
            rows.append((pos[v], pos[v]) + tuple(_sort_key(d) for d in pair))
    return (verts, legs, tuple(sorted(rows)))


def _count_vertex_autos(ordered_classes, base, plain_edges):
    """Number of vertex bijections preserving all decorated invariants."""
    pair_multiset = {}
    for (u, v, du, dv) in plain_edges:
        a, b = (u, v) if u < v else (v, u)
        da, db = (du, dv) if u < v else (dv, du)
        pair_multiset.setdefault((a, b), []).append((_sort_key(da), _sort_key(db)))
    for key in pair_multiset:
        pair_multiset[key].sort()

    def bundle(a, b):
        if a <= b:
            return tuple(pair_multiset.get((a, b), []))
        return tuple(sorted((db, da) for (da, db) in pair_multiset.get((b, a), [])))

    count = 0
    pools = [list(permutations(cls)) for cls in ordered_classes]
    for choice in product(*pools):
        tau = {}
        for cls, image in zip(ordered_classes, choice):
            for v, w in zip(cls, image):
                tau[v] = w
        if any(base[v] != base[tau[v]] for v in tau):
            continue
        vs = sorted(tau)
        ok = True
        for i, u in enumerate(vs):
            for v in vs[i:]:
                if bundle(u, v) != bundle(tau[u], tau[v]):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            count += 1
    return count


def _edge_kernel_size(loops_at, plain_edges):
    """Automorphisms fixing every vertex: parallel-edge and loop symmetries."""
    groups = {}
    for (u, v, du, dv) in plain_edges:
        a, b = (u, v) if u < v else (v, u)
        da, db = (du, dv) if u < v else (dv, du)
        key = (a, b, _sort_key(da), _sort_key(db))
        groups[key] = groups.get(key, 0) + 1
    size = 1
    for m in groups.values():
        size *= factorial(m)
    for v, loops in loops_at.items():
        seen = {}
        for pair in loops:
            seen[pair] = seen.get(pair, 0) + 1
        for pair, m in seen.items():
            size *= factorial(m)
        for pair in loops:
            if len(pair) == 2 and pair[0] == pair[1]:
                size *= 2
    return size


# ----------------------------------------------------------------------
# canonical form and JSON encoding


def canonical_form(graph):
    """Canonical byte encoding of the isomorphism class plus |Aut|.

    Two valid stable graphs have identical ``canonical_bytes`` iff they are
    isomorphic as marked graphs (bijections of vertices and half-edges
    preserving genus, incidence, involution, and leg labels).
    """
    violations = validate_stable_graph(graph)
    if violations:
        raise ValueError("invalid stable graph: %s" % "; ".join(violations))
    order, _, aut = canonical_data(graph)
    rep = relabel_graph(graph, order)
    return CanonicalForm(canonical_json_bytes(rep), aut)


def relabel_graph(graph, order, half_edge_extra=None):
    """Rebuild the graph with vertices in ``order`` and normalized half-edges.

    Edge half-edges come first, as consecutive pairs ``(2k, 2k+1)`` sorted by
    endpoint positions (and half-edge decorations, when given); legs follow in
    label order.  Returns the relabeled ``StableGraph`` or, when
    ``half_edge_extra`` is given, a pair of it and the transported decoration
    list.
    """
    pos = {v: i for i, v in enumerate(order)}
    hx = half_edge_extra

    def deckey(h):
        return _sort_key(hx[h]) if hx is not None else ()

    oriented = []
    for h, hp in graph.edges():
        u, v = graph.incidence[h], graph.incidence[hp]
        if (pos[v], deckey(hp)) < (pos[u], deckey(h)):
            h, hp, u, v = hp, h, v, u
        oriented.append(((pos[u], pos[v], deckey(h), deckey(hp)), h, hp))
    oriented.sort(key=lambda row: row[0])

    genus_list = [graph.genus_list[v] for v in order]
    incidence = []
    new_extra = []
    for _, h, hp in oriented:
        incidence.append(pos[graph.incidence[h]])
        incidence.append(pos[graph.incidence[hp]])
        if hx is not None:
            new_extra.append(hx[h])
            new_extra.append(hx[hp])
    involution = []
    for k in range(len(oriented)):
        involution.extend([2 * k + 1, 2 * k])
    legs = []
    base = 2 * len(oriented)
    for i, (h, label) in enumerate(sorted(graph.leg_items, key=lambda x: x[1])):
        incidence.append(pos[graph.incidence[h]])
        involution.append(base + i)
        legs.append((base + i, label))
        if hx is not None:
            new_extra.append(hx[h])
    rebuilt = StableGraph(genus_list, incidence, involution, legs)
    if hx is not None:
        return rebuilt, new_extra
    return rebuilt


def to_json_dict(graph):
    """Plain JSON object: genus_list, legs, edges, incidence (arrays sorted)."""
    return {
        "genus_list": list(graph.genus_list),
        "legs": sorted([h, label] for h, label in graph.leg_items),
        "edges": sorted(sorted([h, hp]) for h, hp in graph.edges()),
        "incidence": list(graph.incidence),
    }


def from_json_dict(data):
    H = len(data["incidence"])
    involution = list(range(H))
    for h, hp in data["edges"]:
        involution[h] = hp
        involution[hp] = h
    return StableGraph(data["genus_list"], data["incidence"], involution, data["legs"])


def canonical_json_bytes(graph):
    return json.dumps(to_json_dict(graph), sort_keys=True, separators=(",", ":")).encode()


# ----------------------------------------------------------------------
# enumeration


def enumerate_stable_graphs(g, n, max_loops):
    """All stable graphs of genus ``g`` with ``n`` markings and ``h1 <= max_loops``.

    Returns exactly one representative per isomorphism class (the canonical
    representative), sorted by canonical bytes.
    """
    if g < 0 or n < 0 or 2 * g - 2 + n <= 0:
        raise ValueError("unstable (g, n) = (%d, %d)" % (g, n))
    if max_loops < 0:
        raise ValueError("max_loops must be non-negative")

    found = {}
    max_vertices = 2 * g - 2 + n
    for h1 in range(min(max_loops, g) + 1):
        genus_budget = g - h1
        for V in range(1, max_vertices + 1):
            E = h1 + V - 1
            slots = [
                (u, v) for u in range(V) for v in range(u, V)
            ]
            for genus_tuple in _compositions(genus_budget, V):
                for leg_map in product(range(V), repeat=n):
                    for edge_choice in combinations_with_replacement(slots, E):
                        graph = _build(genus_tuple, leg_map, edge_choice)
                        if graph is None:
                            continue
                        if validate_stable_graph(graph, expected_genus=g):
                            continue
                        form = canonical_form(graph)
                        if form.canonical_bytes not in found:
                            found[form.canonical_bytes] = from_json_dict(
                                json.loads(form.canonical_bytes.decode())
                            )
    return [found[key] for key in sorted(found)]


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _build(genus_tuple, leg_map, edge_choice):
    """Assemble a StableGraph; cheap stability/connectivity pre-filter."""
    V = len(genus_tuple)
    degree = [0] * V
    for (u, v) in edge_choice:
        degree[u] += 1
        degree[v] += 1
    for v in leg_map:
        degree[v] += 1
    for v in range(V):
        if 2 * genus_tuple[v] - 2 + degree[v] <= 0:
            return None
    parent = list(range(V))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for (u, v) in edge_choice:
        parent[find(u)] = find(v)
    if len({find(v) for v in range(V)}) != 1:
        return None

    incidence = []
    for (u, v) in edge_choice:
        incidence.extend([u, v])
    involution = []
    for k in range(len(edge_choice)):
        involution.extend([2 * k + 1, 2 * k])
    legs = []
    base = 2 * len(edge_choice)
    for i, v in enumerate(leg_map):
        incidence.append(v)
        involution.append(base + i)
        legs.append((base + i, i + 1))
    return StableGraph(genus_tuple, incidence, involution, legs)
