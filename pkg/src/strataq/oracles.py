"""Brute-force oracles: slow, exhaustive reference implementations.

These deliberately take a different route from the production enumerators so
that agreement is meaningful evidence:

- stable graphs are generated as raw incidence structures over a fixed
  standard involution (half-edges ``2k, 2k+1`` paired, legs last), with only
  a first-appearance symmetry reduction on vertex names;
- automorphism counts come from checking every edge permutation and flip;
- leveled twisted graphs come from decorating every enumerated stable graph
  with every level map and every twist solution of the per-vertex degree
  equations, then filtering through the full validator.

Everything is deduplicated by canonical form and returned as a dict from
canonical bytes to one representative.
"""

from __future__ import annotations

from itertools import permutations, product

from .graphs import (
    StableGraph,
    canonical_form,
    enumerate_stable_graphs,
    validate_stable_graph,
)
from .twists import TwistedLevelGraph, canonical_twisted, validate_twist


def _first_appearance_maps(num_vertices, length):
    """Sequences over 0..num_vertices-1 of the given length, using each value,
    with first appearances in increasing order (one per vertex-naming orbit)."""

    def grow(prefix, used):
        if len(prefix) == length:
            # every vertex must appear, except that a single vertex needs no
            # half-edges at all (the smooth graph)
            if used == num_vertices or num_vertices == 1:
                yield tuple(prefix)
            return
        remaining = length - len(prefix)
        if used + remaining < num_vertices:
            return
        for v in range(min(used + 1, num_vertices)):
            prefix.append(v)
            yield from grow(prefix, used + (1 if v == used else 0))
            prefix.pop()

    yield from grow([], 0)


def brute_force_stable_graphs(g, n, max_loops):
    """Exhaustive stable-graph enumeration; dict canonical bytes -> graph."""
    if 2 * g - 2 + n <= 0:
        raise ValueError("unstable (g, n)")
    found = {}
    for h1 in range(min(max_loops, g) + 1):
        genus_budget = g - h1
        for V in range(1, 2 * g - 2 + n + 1):
            E = h1 + V - 1
            involution = []
            for k in range(E):
                involution.extend([2 * k + 1, 2 * k])
            legs = []
            for i in range(n):
                involution.append(2 * E + i)
                legs.append((2 * E + i, i + 1))
            for genus_tuple in product(range(genus_budget + 1), repeat=V):
                if sum(genus_tuple) != genus_budget:
                    continue
                for incidence in _first_appearance_maps(V, 2 * E + n):
                    graph = StableGraph(genus_tuple, incidence, involution, legs)
                    if validate_stable_graph(graph, expected_genus=g):
                        continue
                    form = canonical_form(graph)
                    found.setdefault(form.canonical_bytes, graph)
    return found


def brute_force_automorphism_count(graph):
    """|Aut| by checking every edge permutation and orientation flip.

    Automorphisms fix legs pointwise (labels are part of the structure) and
    must induce a genus-preserving vertex bijection.
    """
    edges = graph.edges()
    E = len(edges)
    V = graph.num_vertices
    leg_vertices = {graph.incidence[h] for h, _ in graph.leg_items}
    count = 0
    for perm in permutations(range(E)):
        for flips in product((False, True), repeat=E):
            vmap = {}
            ok = True
            for i in range(E):
                h, hp = edges[i]
                h2, hp2 = edges[perm[i]]
                if flips[i]:
                    h2, hp2 = hp2, h2
                for a, b in ((h, h2), (hp, hp2)):
                    va, vb = graph.incidence[a], graph.incidence[b]
                    if vmap.setdefault(va, vb) != vb:
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                continue
            for v in leg_vertices:
                if vmap.setdefault(v, v) != v:
                    ok = False
                    break
            if not ok:
                continue
            if len(vmap) != V or set(vmap.values()) != set(range(V)):
                # vertices uncovered only in the edgeless single-vertex case
                if V == 1 and not vmap:
                    pass
                else:
                    continue
            if any(
                graph.genus_list[v] != graph.genus_list[w] for v, w in vmap.items()
            ):
                continue
            count += 1
    return count


# ----------------------------------------------------------------------
# leveled twisted graphs


def _twist_solutions(graph, Z, levels):
    """All twist vectors compatible with the level map.

    Legs carry the prescribed twists; every edge descends, so its upper half
    carries a twist >= 0 and the lower half the complement; the degree
    equations at negative-level vertices fix the admissible sums per vertex.
    Yields complete twist tuples (the full validator re-checks everything).
    """
    H = graph.num_half_edges
    twist = [None] * H
    for h, label in graph.leg_items:
        twist[h] = Z[label - 1]

    # orient each edge downward; reject same-level edges entirely
    upper_half = {}
    for h, hp in graph.edges():
        lu, lv = levels[graph.incidence[h]], levels[graph.incidence[hp]]
        if lu == lv:
            return
        upper_half[(h, hp)] = h if lu > lv else hp

    # group the unknown upper twists by the vertex whose degree equation
    # binds them most tightly: process levels bottom-up
    order = sorted(set(levels))  # most negative first
    unknown_at = {v: [] for v in range(graph.num_vertices)}
    for (h, hp), up in upper_half.items():
        down = hp if up == h else h
        unknown_at[graph.incidence[down]].append((up, down))

    def solve(level_index, twist_vec):
        if level_index == len(order):
            yield tuple(twist_vec)
            return
        lv = order[level_index]
        if lv == 0:
            # top level: no degree condition; all unknowns already set
            yield from solve(level_index + 1, twist_vec)
            return
        verts = [v for v in range(graph.num_vertices) if levels[v] == lv]

        def per_vertex(idx, twist_vec):
            if idx == len(verts):
                yield from solve(level_index + 1, twist_vec)
                return
            v = verts[idx]
            pairs = unknown_at[v]
            target = 2 * graph.genus_list[v] - 2
            known = 0
            for h in graph.half_edges_at(v):
                if twist_vec[h] is not None:
                    known += twist_vec[h]
            # each unknown pair contributes -(up) - 2 at this vertex
            residual = known - target - 2 * len(pairs)
            # residual must equal sum of the upper twists, each >= 0
            if residual < 0:
                return
            for split in _compositions_nonneg(residual, len(pairs)):
                for (up, down), val in zip(pairs, split):
                    twist_vec[up] = val
                    twist_vec[down] = -val - 2
                yield from per_vertex(idx + 1, twist_vec)
                for (up, down) in pairs:
                    twist_vec[up] = None
                    twist_vec[down] = None

        yield from per_vertex(0, twist_vec)

    yield from solve(0, twist)


def _compositions_nonneg(total, parts):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(total + 1):
        for rest in _compositions_nonneg(total - first, parts - 1):
            yield (first,) + rest


def brute_force_leveled(g, Z, depth, required_levels):
    """Decorate-and-filter oracle for leveled twisted graphs.

    ``depth``: 1 for bi-colored, 2 for tri-colored.  ``required_levels`` maps
    marking labels to the level their leg must sit on.  Returns a dict from
    canonical bytes to one representative TwistedLevelGraph.
    """
    n = len(Z)
    level_values = tuple(range(0, -depth - 1, -1))
    found = {}
    for graph in enumerate_stable_graphs(g, n, max_loops=g):
        leg_vertex = {label: graph.incidence[h] for h, label in graph.leg_items}
        for levels in product(level_values, repeat=graph.num_vertices):
            if set(levels) != set(level_values):
                continue
            if any(levels[leg_vertex[m]] != lv for m, lv in required_levels.items()):
                continue
            for twist in _twist_solutions(graph, Z, levels):
                cand = TwistedLevelGraph(graph, twist, levels)
                if validate_twist(cand, Z):
                    continue
                key, _, rep = canonical_twisted(cand)
                found.setdefault(key, rep)
    return found


def brute_force_bicolored(g, Z, anchor, variant="anchored_down", co_anchor=None):
    """Oracle counterpart of :func:`strataq.twists.enumerate_bicolored`
    (connected profiles)."""
    marks = list(range(1, len(Z) + 1))
    if variant == "anchored_down":
        fixed = [{anchor: -1}]
    elif variant == "anchored_both":
        if co_anchor == anchor:
            raise ValueError("anchors must be distinct")
        fixed = [{anchor: -1, co_anchor: -1}]
    elif variant == "anchored_split":
        if co_anchor == anchor:
            raise ValueError("anchors must be distinct")
        fixed = [{anchor: -1, co_anchor: 0}]
    else:
        raise ValueError("unknown variant %r" % (variant,))
    found = {}
    for req in fixed:
        found.update(brute_force_leveled(g, Z, 1, req))
    return found


def brute_force_tricolored(g, Z, lower, middle):
    """Oracle counterpart of :func:`strataq.twists.enumerate_tricolored`."""
    if lower == middle:
        raise ValueError("anchors must be distinct")
    if len(Z) < 2:
        return {}
    return brute_force_leveled(g, Z, 2, {lower: -2, middle: -1})
