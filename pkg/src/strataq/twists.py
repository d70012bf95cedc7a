"""Twisted and level structures on stable graphs.

A *twist* assigns an integer to every half-edge such that the two halves of
each edge satisfy ``twist(h) + twist(h') = -2``; legs carry the prescribed
twists ``Z``.  A *level* function assigns to every vertex a non-positive
integer, attaining every value between 0 and its minimum.  An edge is
*horizontal* when both halves have twist ``-1``; level graphs here never
contain horizontal edges, and along every other edge the level strictly
decreases from the side with non-negative twist to the side with twist
``<= -2``.  In particular a loop, whose two halves would both need twist
``-1``, can never appear in a level graph.

Degree bookkeeping: at a vertex ``v`` the twists of all incident half-edges
(legs included) sum to ``2*g(v) - 2``.  For a bare twisted graph (no level
function) this is required at *every* vertex; for a level graph it is
required at every vertex of negative level, while top-level vertices are
exempt (their markings need not carry a complete twist profile).

The edge multiplicity is ``|twist(h) + 1|`` (the same number from either
side) and the multiplicity of a graph is the product over its edges.

Bi-colored graphs have levels {0, -1}; tri-colored graphs have levels
{0, -1, -2}.  Enumeration is constructive, level by level, anchored at a
marking required to sit at the lowest (or an intermediate) level; an
exhaustive decorate-and-filter oracle cross-checks it in the test suite.
"""

from __future__ import annotations

import json
from itertools import product

from .graphs import (
    StableGraph,
    canonical_data,
    relabel_graph,
    to_json_dict,
    validate_stable_graph,
)


class TwistedLevelGraph:
    """A stable graph with a twist on each half-edge and optional levels.

    ``twist`` is a tuple indexed by half-edge; ``level`` is either ``None``
    (bare twisted graph) or a tuple indexed by vertex.
    """

    __slots__ = ("base", "twist", "level")

    def __init__(self, base, twist, level=None):
        self.base = base
        self.twist = tuple(int(t) for t in twist)
        self.level = None if level is None else tuple(int(l) for l in level)

    def leg_twists(self):
        """Dict marking label -> twist of its leg."""
        return {label: self.twist[h] for h, label in self.base.leg_items}

    def key(self):
        return (self.base.key(), self.twist, self.level)

    def __eq__(self, other):
        return isinstance(other, TwistedLevelGraph) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return "TwistedLevelGraph(%r, twist=%r, level=%r)" % (
            self.base,
            self.twist,
            self.level,
        )


class BiColoredGraph:
    """A (possibly disconnected) leveled twisted graph, one leveled component.

    ``components`` is a tuple of :class:`TwistedLevelGraph`; in the connected
    setting there is exactly one.  In the disconnected setting all components
    except the anchored one are trivial: a single vertex at level 0 carrying
    all of that component's legs.
    """

    __slots__ = ("components",)

    def __init__(self, components):
        self.components = tuple(components)

    def multiplicity(self):
        m = 1
        for comp in self.components:
            m *= multiplicity(comp)
        return m

    def key(self):
        return tuple(comp.key() for comp in self.components)

    def __eq__(self, other):
        return isinstance(other, BiColoredGraph) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return "BiColoredGraph(%r)" % (self.components,)


# ----------------------------------------------------------------------
# validation and multiplicity


def validate_twist(tw, Z=None):
    """Check twist/level invariants; returns a list of violation strings.

    For bare twisted graphs (``level is None``) the degree condition
    ``sum of twists at v == 2 g(v) - 2`` is enforced at every vertex; for
    level graphs only at vertices of negative level.  When ``Z`` is given,
    leg ``i`` must carry twist ``Z[i-1]``.
    """
    graph = tw.base
    violations = validate_stable_graph(graph)
    if violations:
        return ["base graph invalid: %s" % v for v in violations]
    if len(tw.twist) != graph.num_half_edges:
        return ["twist vector does not index the half-edge set"]
    if tw.level is not None and len(tw.level) != graph.num_vertices:
        return ["level vector does not index the vertex set"]

    for h, hp in graph.edges():
        if tw.twist[h] + tw.twist[hp] != -2:
            violations.append(
                "edge (%d,%d): twists %d,%d do not sum to -2"
                % (h, hp, tw.twist[h], tw.twist[hp])
            )

    if Z is not None:
        legs = tw.leg_twists()
        if len(Z) != len(legs):
            violations.append("leg count %d does not match |Z|=%d" % (len(legs), len(Z)))
        else:
            for i, z in enumerate(Z, start=1):
                if legs[i] != z:
                    violations.append(
                        "leg %d carries twist %d, prescribed %d" % (i, legs[i], z)
                    )

    if tw.level is None:
        check_degree = range(graph.num_vertices)
    else:
        lv = tw.level
        if any(l > 0 for l in lv):
            violations.append("levels must be <= 0")
        else:
            used = set(lv)
            if 0 not in used:
                violations.append("no vertex at level 0")
            if used != set(range(min(lv), 1)):
                violations.append("levels %s skip a value" % sorted(used))
        for h, hp in graph.edges():
            a, b = tw.twist[h], tw.twist[hp]
            if a == -1 and b == -1:
                violations.append("horizontal edge (%d,%d)" % (h, hp))
                continue
            if a + b != -2:
                continue
            top, bottom = (h, hp) if a >= 0 else (hp, h)
            if not lv[graph.incidence[top]] > lv[graph.incidence[bottom]]:
                violations.append(
                    "edge (%d,%d) does not descend with its twists" % (h, hp)
                )
        check_degree = [v for v in range(graph.num_vertices) if lv[v] < 0]

    for v in check_degree:
        total = sum(tw.twist[h] for h in graph.half_edges_at(v))
        if total != 2 * graph.genus_list[v] - 2:
            violations.append(
                "vertex %d: twists sum to %d, expected %d"
                % (v, total, 2 * graph.genus_list[v] - 2)
            )
    return violations


def multiplicity(tw):
    """Product over edges of ``|twist(h) + 1|`` (0 iff a horizontal edge)."""
    if isinstance(tw, BiColoredGraph):
        return tw.multiplicity()
    m = 1
    for h, _ in tw.base.edges():
        m *= abs(tw.twist[h] + 1)
    return m


# ----------------------------------------------------------------------
# canonical forms for twisted graphs


def canonical_twisted(tw):
    """(canonical bytes, |Aut|) for a twisted (level) graph.

    Isomorphisms preserve leg labels, twists, and levels; the encoding is the
    plain-graph JSON extended with sorted ``twists`` and (when present)
    ``levels`` arrays.
    """
    vextra = tw.level if tw.level is not None else None
    order, _, aut = canonical_data(tw.base, vertex_extra=vextra, half_edge_extra=tw.twist)
    rebuilt, new_twist = relabel_graph(tw.base, order, half_edge_extra=tw.twist)
    new_level = None
    if tw.level is not None:
        new_level = tuple(tw.level[v] for v in order)
    rep = TwistedLevelGraph(rebuilt, new_twist, new_level)
    return twisted_json_bytes(rep), aut, rep


def twisted_to_json_dict(tw):
    data = to_json_dict(tw.base)
    data["twists"] = [[h, t] for h, t in enumerate(tw.twist)]
    if tw.level is not None:
        data["levels"] = [[v, l] for v, l in enumerate(tw.level)]
    return data


def twisted_from_json_dict(data):
    from .graphs import from_json_dict

    base = from_json_dict(data)
    twist = [0] * base.num_half_edges
    for h, t in data["twists"]:
        twist[h] = t
    level = None
    if "levels" in data:
        level = [0] * base.num_vertices
        for v, l in data["levels"]:
            level[v] = l
    return TwistedLevelGraph(base, twist, level)


def twisted_json_bytes(tw):
    return json.dumps(
        twisted_to_json_dict(tw), sort_keys=True, separators=(",", ":")
    ).encode()


def bicolored_to_json_dict(bc):
    if len(bc.components) == 1:
        return twisted_to_json_dict(bc.components[0])
    return {"components": [twisted_to_json_dict(c) for c in bc.components]}


# ----------------------------------------------------------------------
# small combinatorial helpers


def _set_partitions(items):
    """All partitions of ``items`` (a sorted list) into nonempty blocks."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
        yield [[first]] + part


def _partitions_min2(total, parts):
    """Multisets (non-increasing tuples) of ``parts`` integers >= 2 summing to total."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    # largest part first, at least as large as the rest and >= 2
    for first in range(total - 2 * (parts - 1), 1, -1):
        for rest in _partitions_min2(total - first, parts - 1):
            if not rest or first >= rest[0]:
                yield (first,) + rest


def _compositions(total, parts):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _bottom_options(z_sum, genus_cap):
    """Solutions of the degree condition at a lowest-level vertex.

    Yields ``(g_v, parts)`` where ``parts`` is the non-increasing tuple of
    edge magnitudes ``m >= 2`` (bottom-side twist ``-m``, upper-side twist
    ``m - 2``) with ``sum(parts) == z_sum - 2*g_v + 2``.
    """
    for g_v in range(genus_cap + 1):
        budget = z_sum - 2 * g_v + 2
        if budget < 2:
            continue
        for e in range(1, budget // 2 + 1):
            for parts in _partitions_min2(budget, e):
                yield g_v, parts


def _connected(num_vertices, vertex_pairs):
    if num_vertices <= 1:
        return True
    parent = list(range(num_vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in vertex_pairs:
        parent[find(u)] = find(v)
    return len({find(v) for v in range(num_vertices)}) == 1


def single_bubble_graph(g, Z, I):
    """The one-edge bi-colored graph with bubble markings ``I``.

    A genus-0 vertex at level -1 carries the legs in ``I`` (twists taken
    from ``Z``) and one edge up to a genus-``g`` vertex at level 0 carrying
    the remaining legs.  Its multiplicity is ``1 + sum of the bubble
    twists``, the coefficient this graph contributes to a twist-increment
    step at any of its bubble markings.
    """
    n = len(Z)
    I = tuple(sorted(I))
    if g < 1:
        raise ValueError("genus must be >= 1")
    if len(I) < 2 or len(set(I)) != len(I):
        raise ValueError("bubble needs at least two distinct markings")
    if any(j < 1 or j > n for j in I):
        raise ValueError("bubble markings out of range")
    z_sum = sum(Z[j - 1] for j in I)
    edge_rows = [(0, 1, z_sum, -z_sum - 2)]
    leg_rows = [(1 if j in I else 0, j, Z[j - 1]) for j in range(1, n + 1)]
    tw = _assemble((g, 0), (0, -1), edge_rows, leg_rows)
    problems = validate_twist(tw, Z)
    assert not problems, problems
    return tw


def _assemble(genus_list, levels, edge_rows, leg_rows):
    """Build a TwistedLevelGraph from edge rows ``(u, v, tw_u, tw_v)`` and
    leg rows ``(v, label, tw)``."""
    incidence = []
    twist = []
    involution = []
    for k, (u, v, tu, tv) in enumerate(edge_rows):
        incidence.extend([u, v])
        twist.extend([tu, tv])
        involution.extend([2 * k + 1, 2 * k])
    base_index = 2 * len(edge_rows)
    legs = []
    for i, (v, label, tz) in enumerate(sorted(leg_rows, key=lambda r: r[1])):
        incidence.append(v)
        twist.append(tz)
        involution.append(base_index + i)
        legs.append((base_index + i, label))
    base = StableGraph(genus_list, incidence, involution, legs)
    return TwistedLevelGraph(base, twist, levels)


# ----------------------------------------------------------------------
# bi-colored enumeration


def enumerate_bicolored(g, Z, anchor, variant="anchored_down", co_anchor=None):
    """All two-level twisted graphs (levels {0, -1}) for the profile ``(g, Z)``.

    ``anchor`` is a marking required to lie at level -1.  Variants:

    - ``"anchored_down"``: only ``anchor`` is constrained.
    - ``"anchored_both"``: ``co_anchor`` must also lie at level -1.
    - ``"anchored_split"``: ``co_anchor`` must lie at level 0.

    Degree equality is enforced at level -1 only; level-0 vertices are
    exempt, so markings at level 0 need not complete a twist profile.  In
    the disconnected setting (``g`` a tuple, ``Z`` a tuple of tuples,
    anchors ``(component, marking)`` pairs) all components except the
    anchored one are trivial single vertices at level 0.

    Returns a list of :class:`BiColoredGraph`, one canonical representative
    per isomorphism class, sorted by canonical bytes.
    """
    ambient, comp_idx, anchor_j, co = _normalize_profile(g, Z, anchor, co_anchor)
    g_c, Z_c = ambient[comp_idx]

    if variant not in ("anchored_down", "anchored_both", "anchored_split"):
        raise ValueError("unknown variant %r" % (variant,))
    if variant == "anchored_down":
        required_down, required_up = {anchor_j}, set()
    else:
        if co is None:
            raise ValueError("variant %r needs a second anchor" % (variant,))
        co_comp, co_j = co
        if (co_comp, co_j) == (comp_idx, anchor_j):
            raise ValueError("anchors must be distinct")
        if co_comp != comp_idx:
            # The co-anchor sits on a trivial component, which lives at
            # level 0: the split condition holds automatically and the
            # both condition can never hold.
            if variant == "anchored_both":
                return []
            required_down, required_up = {anchor_j}, set()
        elif variant == "anchored_both":
            required_down, required_up = {anchor_j, co_j}, set()
        else:
            required_down, required_up = {anchor_j}, {co_j}

    markings = list(range(1, len(Z_c) + 1))
    found = {}
    free = [j for j in markings if j not in required_down and j not in required_up]
    for picks in product([False, True], repeat=len(free)):
        down = set(required_down)
        down.update(j for j, pick in zip(free, picks) if pick)
        for tw in _bicolored_with_down_set(g_c, Z_c, sorted(down)):
            wrapped = _wrap_component(ambient, comp_idx, tw)
            key = tuple(comp[0] for comp in wrapped)
            if key not in found:
                found[key] = BiColoredGraph([comp[1] for comp in wrapped])
    return [found[key] for key in sorted(found)]


def _normalize_profile(g, Z, anchor, co_anchor):
    """Accept connected (int genus, flat Z, marking anchors) and disconnected
    (tuple genus, nested Z, (component, marking) anchors) profiles."""
    if isinstance(g, int):
        if Z and isinstance(Z[0], (tuple, list)):
            raise ValueError("connected profile needs a flat twist vector")
        ambient = [(g, tuple(Z))]
        comp_idx, anchor_j = 0, int(anchor)
        co = None if co_anchor is None else (0, int(co_anchor))
    else:
        if len(g) != len(Z):
            raise ValueError("component genera and twist profiles differ in length")
        ambient = [(int(gi), tuple(zi)) for gi, zi in zip(g, Z)]
        # components are indexed 1..k in the disconnected setting
        comp_idx, anchor_j = int(anchor[0]) - 1, int(anchor[1])
        co = None if co_anchor is None else (int(co_anchor[0]) - 1, int(co_anchor[1]))
    if not (0 <= comp_idx < len(ambient)):
        raise ValueError("anchor component out of range")
    n_c = len(ambient[comp_idx][1])
    if not (1 <= anchor_j <= n_c):
        raise ValueError("anchor marking out of range")
    if co is not None:
        ci, cj = co
        if not (0 <= ci < len(ambient)) or not (1 <= cj <= len(ambient[ci][1])):
            raise ValueError("co-anchor out of range")
    for gi, zi in ambient:
        if 2 * gi - 2 + len(zi) <= 0:
            raise ValueError("unstable component (g, n) = (%d, %d)" % (gi, len(zi)))
    return ambient, comp_idx, anchor_j, co


def _wrap_component(ambient, comp_idx, tw):
    """Surround the enumerated component with trivial level-0 components."""
    rows = []
    for i, (gi, zi) in enumerate(ambient):
        if i == comp_idx:
            key_bytes, _, rep = canonical_twisted(tw)
            rows.append((key_bytes, rep))
        else:
            trivial = _assemble(
                [gi], (0,), [], [(0, j, z) for j, z in enumerate(zi, start=1)]
            )
            rows.append((twisted_json_bytes(trivial), trivial))
    return rows


def _bicolored_with_down_set(g, Z, down_marks):
    """Connected two-level graphs whose level -1 markings are exactly
    ``down_marks`` (nonempty)."""
    if not down_marks:
        return
    up_marks = [j for j in range(1, len(Z) + 1) if j not in down_marks]
    for blocks in _set_partitions(down_marks):
        per_block = []
        for block in blocks:
            z_sum = sum(Z[j - 1] for j in block)
            options = [
                (g_v, parts)
                for g_v, parts in _bottom_options(z_sum, g)
                if 2 * g_v - 2 + len(block) + len(parts) > 0
            ]
            per_block.append(options)
        if any(not options for options in per_block):
            continue
        for combo in product(*per_block):
            bottom_genus = [g_v for g_v, _ in combo]
            if sum(bottom_genus) > g:
                continue
            stubs = []  # (bottom vertex index, magnitude m)
            for b, (_, parts) in enumerate(combo):
                stubs.extend((b, m) for m in parts)
            yield from _attach_tops(
                g, Z, blocks, bottom_genus, (-1,) * len(blocks), stubs, up_marks
            )


def _attach_tops(g, Z, blocks, low_genus, low_levels, stubs, up_marks, extra_rows=None):
    """Finish an enumeration by building the level-0 layer.

    ``blocks``/``low_genus``/``low_levels`` describe the already-built
    negative-level vertices (vertex ``b`` carries ``blocks[b]`` markings,
    genus ``low_genus[b]``, level ``low_levels[b % len(low_levels)]`` —
    callers pass per-vertex levels via ``extra_rows``-free convention below);
    ``stubs`` is a list of ``(low vertex, magnitude)`` pairs for edges that
    must end at level 0; ``extra_rows`` carries already-fixed edge rows among
    negative levels (tri-colored case).
    """
    B = len(low_genus)
    E_up = len(stubs)
    genus_low = sum(low_genus)
    assert len(low_levels) == B, "one level per negative-level vertex"
    levels_low = list(low_levels)
    extra_rows = extra_rows or []
    for T in range(1, E_up + 1):
        V = B + T
        h1 = (E_up + len(extra_rows)) - V + 1
        if h1 < 0:
            continue
        top_budget = g - h1 - genus_low
        if top_budget < 0:
            continue
        for stub_map in product(range(T), repeat=E_up):
            if set(stub_map) != set(range(T)):
                continue
            for mark_map in product(range(T), repeat=len(up_marks)):
                for top_genus in _compositions(top_budget, T):
                    degree_ok = True
                    for t in range(T):
                        deg = sum(1 for x in stub_map if x == t) + sum(
                            1 for x in mark_map if x == t
                        )
                        if 2 * top_genus[t] - 2 + deg <= 0:
                            degree_ok = False
                            break
                    if not degree_ok:
                        continue
                    pairs = [
                        (b, B + t) for (b, _), t in zip(stubs, stub_map)
                    ] + [(u, v) for (u, v, _, _) in extra_rows]
                    if not _connected(V, pairs):
                        continue
                    edge_rows = list(extra_rows)
                    for (b, m), t in zip(stubs, stub_map):
                        edge_rows.append((B + t, b, m - 2, -m))
                    leg_rows = []
                    for b, block in enumerate(blocks):
                        for j in block:
                            leg_rows.append((b, j, Z[j - 1]))
                    for j, t in zip(up_marks, mark_map):
                        leg_rows.append((B + t, j, Z[j - 1]))
                    levels = tuple(levels_low) + (0,) * T
                    tw = _assemble(
                        list(low_genus) + list(top_genus), levels, edge_rows, leg_rows
                    )
                    assert not validate_twist(tw, Z), validate_twist(tw, Z)
                    yield tw


# ----------------------------------------------------------------------
# tri-colored enumeration


def enumerate_tricolored(g, Z, lower, middle):
    """All three-level twisted graphs (levels {0, -1, -2}) for ``(g, Z)``.

    ``lower`` is a marking required at level -2 and ``middle`` a distinct
    marking required at level -1.  Degree equality holds at both negative
    levels; edges may join any strictly decreasing pair of levels (0 to -1,
    -1 to -2, or 0 to -2 directly).  With fewer than two markings the
    required pair cannot exist and the result is empty.  Disconnected
    profiles follow the same convention as :func:`enumerate_bicolored`.

    Returns canonical representatives sorted by canonical bytes.
    """
    ambient, comp_idx, lower_j, mid = _normalize_profile(g, Z, lower, middle)
    if mid is None:
        raise ValueError("a middle anchor is required")
    mid_comp, mid_j = mid
    if (mid_comp, mid_j) == (comp_idx, lower_j):
        raise ValueError("anchors must be distinct")
    if mid_comp != comp_idx:
        # the middle anchor would sit on a trivial level-0 component
        return []
    g_c, Z_c = ambient[comp_idx]
    if len(Z_c) < 2:
        return []

    found = {}
    markings = list(range(1, len(Z_c) + 1))
    free = [j for j in markings if j not in (lower_j, mid_j)]
    # split the free markings over the three levels
    for assignment in product((-2, -1, 0), repeat=len(free)):
        at = {lower_j: -2, mid_j: -1}
        at.update(dict(zip(free, assignment)))
        m2 = sorted(j for j in markings if at[j] == -2)
        m1 = sorted(j for j in markings if at[j] == -1)
        for tw in _tricolored_with_sets(g_c, Z_c, m2, m1):
            wrapped = _wrap_component(ambient, comp_idx, tw)
            key = tuple(comp[0] for comp in wrapped)
            if key not in found:
                found[key] = BiColoredGraph([comp[1] for comp in wrapped])
    return [found[key] for key in sorted(found)]


def _tricolored_with_sets(g, Z, m2_marks, m1_marks):
    """Connected three-level graphs with prescribed marking levels."""
    if not m2_marks:
        return
    up_marks = [
        j for j in range(1, len(Z) + 1) if j not in m2_marks and j not in m1_marks
    ]
    for blocks2 in _set_partitions(m2_marks):
        per_block = []
        for block in blocks2:
            z_sum = sum(Z[j - 1] for j in block)
            options = [
                (g_v, parts)
                for g_v, parts in _bottom_options(z_sum, g)
                if 2 * g_v - 2 + len(block) + len(parts) > 0
            ]
            per_block.append(options)
        if any(not options for options in per_block):
            continue
        for combo in product(*per_block):
            low_genus = [g_v for g_v, _ in combo]
            if sum(low_genus) > g:
                continue
            stubs2 = []  # (level -2 vertex, magnitude)
            for b, (_, parts) in enumerate(combo):
                stubs2.extend((b, m) for m in parts)
            # each stub from level -2 ends at level -1 or level 0
            for dest in product((-1, 0), repeat=len(stubs2)):
                to_mid = [s for s, d in zip(stubs2, dest) if d == -1]
                to_top2 = [s for s, d in zip(stubs2, dest) if d == 0]
                yield from _grow_middle(
                    g, Z, blocks2, low_genus, to_mid, to_top2, m1_marks, up_marks
                )


def _grow_middle(g, Z, blocks2, low_genus, to_mid, to_top2, m1_marks, up_marks):
    """Build the level -1 layer on top of a fixed level -2 layer."""
    for blocks1 in _set_partitions(list(m1_marks)):
        # legless level -1 vertices are possible when they capture down-edges
        max_extra = len(to_mid)
        for extra in range(max_extra + 1):
            M = len(blocks1) + extra
            if M == 0:
                continue
            if len(to_mid) == 0 and extra > 0:
                break
            for down_map in product(range(M), repeat=len(to_mid)):
                # legless vertices must each receive at least one down-edge
                hit = set(down_map)
                if any(len(blocks1) + k not in hit for k in range(extra)):
                    continue
                yield from _solve_middle(
                    g,
                    Z,
                    blocks2,
                    low_genus,
                    blocks1,
                    extra,
                    to_mid,
                    down_map,
                    to_top2,
                    up_marks,
                )


def _solve_middle(
    g, Z, blocks2, low_genus, blocks1, extra, to_mid, down_map, to_top2, up_marks
):
    """Fix genera and up-edges of the level -1 vertices, then attach tops."""
    B2 = len(low_genus)
    M = len(blocks1) + extra
    per_vertex = []
    for i in range(M):
        legs_sum = sum(Z[j - 1] for j in blocks1[i]) if i < len(blocks1) else 0
        received = sum(m - 2 for (_, m), t in zip(to_mid, down_map) if t == i)
        deg_down = sum(1 for t in down_map if t == i)
        n_legs = len(blocks1[i]) if i < len(blocks1) else 0
        options = []
        genus_room = g - sum(low_genus)
        for g_v in range(genus_room + 1):
            budget = legs_sum + received - 2 * g_v + 2
            if budget < 0 or budget == 1:
                continue
            ups = [()] if budget == 0 else [
                parts
                for e in range(1, budget // 2 + 1)
                for parts in _partitions_min2(budget, e)
            ]
            for parts in ups:
                deg = n_legs + deg_down + len(parts)
                if 2 * g_v - 2 + deg > 0:
                    options.append((g_v, parts))
        if not options:
            return
        per_vertex.append(options)

    for combo in product(*per_vertex):
        mid_genus = [g_v for g_v, _ in combo]
        if sum(low_genus) + sum(mid_genus) > g:
            continue
        stubs_up = []  # (global mid vertex index, magnitude) going to level 0
        for i, (_, parts) in enumerate(combo):
            stubs_up.extend((B2 + i, m) for m in parts)
        stubs_top = [(b, m) for (b, m) in to_top2] + stubs_up
        if not stubs_top:
            continue  # level 0 would be unreachable / empty
        inner_rows = []
        for (b, m), t in zip(to_mid, down_map):
            inner_rows.append((B2 + t, b, m - 2, -m))
        blocks_all = list(blocks2) + list(blocks1) + [[] for _ in range(extra)]
        levels = (-2,) * B2 + (-1,) * M
        yield from _attach_tops(
            g,
            Z,
            blocks_all,
            list(low_genus) + list(mid_genus),
            levels,
            stubs_top,
            up_marks,
            extra_rows=inner_rows,
        )
