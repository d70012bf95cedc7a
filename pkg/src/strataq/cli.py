"""Command-line surface: enumeration, computation, verification, tables.

Subcommands
-----------

- ``enumerate-graphs``: stable-graph isomorphism classes with |Aut|.
- ``enumerate-bicolored``: two-level twisted graphs for a profile.
- ``alpha-rt``: the rational-tails stratum class, rendered deterministically.
- ``coeff-table``: the triangular w/u tables and the a_g column.
- ``verify``: invariant suites (graphs, twists, rt, coeffs, all).

Conventions: JSON output is newline-delimited records; CSV uses the exact
rational ``p/q`` rendering; identical invocations with identical cache state
produce byte-identical stdout (``--stats`` goes to stderr).  Exit status is
0 on success, 1 on verification failure, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from fractions import Fraction
from itertools import permutations, product

from .coeffs import CoeffTable, a_g, odd_spin_count, u_seq, w_seq
from .graphs import canonical_form, enumerate_stable_graphs, to_json_dict
from .oracles import (
    brute_force_automorphism_count,
    brute_force_bicolored,
    brute_force_stable_graphs,
    brute_force_tricolored,
)
from .rtring import (
    RTClass,
    a_symbolic,
    alpha_rt,
    format_xipoly,
    increment_delta_rows,
    _format_term,
)
from .twists import (
    bicolored_to_json_dict,
    canonical_twisted,
    enumerate_bicolored,
    enumerate_tricolored,
    multiplicity,
    single_bubble_graph,
    twisted_json_bytes,
)

FORMATS = ("json", "csv", "text")


def _rational(value):
    value = Fraction(value)
    return "%d/%d" % (value.numerator, value.denominator)


def _parse_profile(text):
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(
            "expected a comma-separated list of integers, got %r" % text
        )


def cell_value(table, g, z, n, fallback="none"):
    """A coefficient by table recursion, optionally falling back to the
    symbolic route for cells the recursion cannot reach."""
    try:
        return table.value(g, z, n)
    except ValueError:
        if fallback == "symbolic":
            return a_symbolic(g, z, n)
        raise


# ----------------------------------------------------------------------
# emission helpers


def _csv_writer(stream):
    return csv.writer(stream, lineterminator="\n")


def _emit_records(fmt, rows, columns, stream):
    """rows: list of dicts sharing ``columns``; trailing count on all formats."""
    if fmt == "json":
        for row in rows:
            doc = {key: value for key, value in row.items() if key != "_text"}
            stream.write(json.dumps(doc, sort_keys=True) + "\n")
        stream.write(json.dumps({"count": len(rows)}) + "\n")
    elif fmt == "csv":
        writer = _csv_writer(stream)
        writer.writerow(("kind",) + columns)
        for row in rows:
            writer.writerow(("class",) + tuple(row[c] for c in columns))
        writer.writerow(("count", len(rows)) + ("",) * (len(columns) - 1))
    else:
        for row in rows:
            stream.write(row["_text"] + "\n")
        stream.write("count=%d\n" % len(rows))


# ----------------------------------------------------------------------
# subcommands


def cmd_enumerate_graphs(args, stream):
    max_loops = args.max_loops if args.max_loops is not None else args.g
    graphs = enumerate_stable_graphs(args.g, args.n, max_loops=max_loops)
    rows = []
    for graph in graphs:
        form = canonical_form(graph)
        doc = to_json_dict(graph)
        doc_json = json.dumps(doc, sort_keys=True, separators=(",", ":"))
        rows.append(
            {
                "automorphisms": form.automorphism_count,
                "graph": doc,
                "_text": "%s  |Aut|=%d" % (doc_json, form.automorphism_count),
            }
        )
    if args.format == "csv":
        for row in rows:
            row["graph"] = json.dumps(row["graph"], sort_keys=True, separators=(",", ":"))
    _emit_records(args.format, rows, ("automorphisms", "graph"), stream)
    return 0


def cmd_enumerate_bicolored(args, stream):
    classes = enumerate_bicolored(
        args.g, args.Z, anchor=args.anchor, variant=args.variant, co_anchor=args.co_anchor
    )
    rows = []
    for bc in classes:
        aut = 1
        for comp in bc.components:
            aut *= canonical_twisted(comp)[1]
        doc = bicolored_to_json_dict(bc)
        doc_json = json.dumps(doc, sort_keys=True, separators=(",", ":"))
        rows.append(
            {
                "automorphisms": aut,
                "multiplicity": bc.multiplicity(),
                "graph": doc,
                "_text": "%s  m=%d |Aut|=%d" % (doc_json, bc.multiplicity(), aut),
            }
        )
    if args.format == "csv":
        for row in rows:
            row["graph"] = json.dumps(row["graph"], sort_keys=True, separators=(",", ":"))
    _emit_records(args.format, rows, ("automorphisms", "multiplicity", "graph"), stream)
    return 0


def _term_to_json(term, coeff):
    kappa, psi, bubbles = term
    return {
        "coeff": _rational(coeff),
        "kappa": [[m, e] for m, e in kappa],
        "psi": [[list(site), e] for site, e in psi],
        "bubbles": [list(I) for I in bubbles],
    }


def cmd_alpha_rt(args, stream):
    poly = alpha_rt(args.g, args.Z)
    if args.format == "text":
        stream.write(format_xipoly(poly) + "\n")
        return 0
    powers = sorted(poly.coeffs, reverse=True)
    if args.format == "json":
        for k in powers:
            cls = poly.coeffs[k]
            terms = [
                _term_to_json(term, coeff)
                for term, coeff in sorted(cls.terms.items())
            ]
            stream.write(json.dumps({"xi": k, "terms": terms}, sort_keys=True) + "\n")
    else:
        writer = _csv_writer(stream)
        writer.writerow(("xi", "term", "coefficient"))
        for k in powers:
            cls = poly.coeffs[k]
            for term, coeff in sorted(cls.terms.items()):
                writer.writerow((k, "*".join(_format_term(term)) or "1", _rational(coeff)))
    return 0


def cmd_coeff_table(args, stream):
    if args.G < 1:
        raise ValueError("genus bound must be >= 1")
    table = CoeffTable(args.cache)
    rows = []
    for g in range(1, args.G + 1):
        rows.append(("a", g, g - 1, cell_value(table, g, 1, g - 1, args.fallback)))
        for n in range(g):
            rows.append(("w", g, n, cell_value(table, g, g - 1 - n, n, args.fallback)))
        for n in range(g):
            rows.append(("u", g, n, cell_value(table, g, g - n, n, args.fallback)))
    if args.cache:
        table.save(args.cache)
    if args.format == "json":
        for kind, g, n, value in rows:
            stream.write(
                json.dumps(
                    {"kind": kind, "g": g, "n": n, "value": _rational(value)},
                    sort_keys=True,
                )
                + "\n"
            )
    elif args.format == "csv":
        writer = _csv_writer(stream)
        writer.writerow(("kind", "g", "n", "value"))
        for kind, g, n, value in rows:
            writer.writerow((kind, g, n, _rational(value)))
    else:
        for kind, g, n, value in rows:
            if kind == "a":
                stream.write("a_%d=%s\n" % (g, value))
            else:
                stream.write("%s_{%d,%d}=%s\n" % (kind, g, n, value))
    if args.stats:
        print(
            "stats: computed_cells=%d loaded_cells=%d"
            % (table.computed_cells, table.loaded_cells),
            file=sys.stderr,
        )
    return 0


# ----------------------------------------------------------------------
# verify suites


def _rt_order_case(case):
    """Worker for one order-independence evaluation (picklable top level)."""
    g, z, n, order = case
    return str(a_symbolic(g, z, n, order=order))


def _distinct_orders(Z):
    """All distinct increment orders for the profile ``Z``."""
    base = [j for j in range(1, len(Z) + 1) for _ in range(Z[j - 1])]
    return sorted(set(permutations(base)))


def _check(label, condition, detail=""):
    if not condition:
        raise AssertionError(detail or label)


def _suite_graphs(args):
    dim = args.dim
    checks = []
    cells = []
    g = 0
    while 3 * g - 3 <= dim:
        n_low = max(0, 3 - 2 * g)
        for n in range(n_low, dim - (3 * g - 3) + 1):
            if 2 * g - 2 + n > 0:
                cells.append((g, n))
        g += 1

    def oracle_cell(g, n):
        def run():
            produced = enumerate_stable_graphs(g, n, max_loops=g)
            expected = brute_force_stable_graphs(g, n, max_loops=g)
            produced_bytes = {canonical_form(G).canonical_bytes for G in produced}
            _check(
                "count",
                len(produced) == len(expected),
                "(%d,%d): produced %d classes, oracle %d"
                % (g, n, len(produced), len(expected)),
            )
            _check(
                "forms",
                produced_bytes == set(expected),
                "(%d,%d): canonical forms differ" % (g, n),
            )

        return run

    for g, n in cells:
        checks.append(("graphs oracle agreement (g=%d, n=%d)" % (g, n), oracle_cell(g, n)))

    def automorphisms():
        for g, n in [(1, 2), (2, 0), (0, 4)]:
            for G in enumerate_stable_graphs(g, n, max_loops=g):
                fast = canonical_form(G).automorphism_count
                slow = brute_force_automorphism_count(G)
                _check(
                    "aut",
                    fast == slow,
                    "(%d,%d): |Aut| %d vs brute-force %d" % (g, n, fast, slow),
                )

    checks.append(("automorphism counts match brute force", automorphisms))

    def determinism():
        for g, n in [(1, 2), (2, 0)]:
            first = [canonical_form(G).canonical_bytes for G in enumerate_stable_graphs(g, n, g)]
            second = [canonical_form(G).canonical_bytes for G in enumerate_stable_graphs(g, n, g)]
            _check("determinism", first == second, "(%d,%d): order not reproducible" % (g, n))

    checks.append(("enumeration order is reproducible", determinism))
    return checks


def _twist_profiles(max_size):
    for g in (1, 2):
        for n in (1, 2):
            for Z in product(range(max_size + 1), repeat=n):
                if sum(Z) <= max_size:
                    yield g, Z


def _suite_twists(args):
    size = args.max_size if args.max_size is not None else 3
    checks = []

    def oracle_profile(g, Z):
        def run():
            produced = enumerate_bicolored(g, Z, anchor=1)
            expected = brute_force_bicolored(g, Z, anchor=1)
            produced_bytes = {canonical_twisted(bc.components[0])[0] for bc in produced}
            _check(
                "bicolored",
                produced_bytes == set(expected),
                "(%s, %s): %d classes vs oracle %d"
                % (g, Z, len(produced), len(expected)),
            )
            for bc in produced:
                _check("multiplicity>=1", bc.multiplicity() >= 1, "m < 1 for (%s, %s)" % (g, Z))

        return run

    for g, Z in _twist_profiles(size):
        checks.append(("bicolored oracle agreement (g=%d, Z=%s)" % (g, Z), oracle_profile(g, Z)))

    def variants():
        for g, Z in _twist_profiles(min(size, 3)):
            if len(Z) != 2:
                continue
            down = {c.key() for c in _flatten(enumerate_bicolored(g, Z, anchor=1))}
            both = {
                c.key()
                for c in _flatten(
                    enumerate_bicolored(g, Z, anchor=1, variant="anchored_both", co_anchor=2)
                )
            }
            split = {
                c.key()
                for c in _flatten(
                    enumerate_bicolored(g, Z, anchor=1, variant="anchored_split", co_anchor=2)
                )
            }
            _check(
                "partition",
                down == both | split and not (both & split),
                "(%s, %s): variant partition fails" % (g, Z),
            )
            expected_both = brute_force_bicolored(
                g, Z, anchor=1, variant="anchored_both", co_anchor=2
            )
            _check(
                "both-oracle",
                len(both) == len(expected_both),
                "(%s, %s): anchored_both disagrees with oracle" % (g, Z),
            )

    checks.append(("variant partition: down = both + split", variants))

    def tricolored():
        for g, Z in [(1, (1, 1)), (2, (1, 1)), (2, (2, 1)), (2, (3, 1)), (1, (2, 2))]:
            produced = enumerate_tricolored(g, Z, lower=1, middle=2)
            expected = brute_force_tricolored(g, Z, lower=1, middle=2)
            produced_bytes = {canonical_twisted(bc.components[0])[0] for bc in produced}
            _check(
                "tricolored",
                produced_bytes == set(expected),
                "(%s, %s): %d classes vs oracle %d"
                % (g, Z, len(produced), len(expected)),
            )

    checks.append(("tricolored oracle agreement", tricolored))

    def bubble_multiplicity():
        for current, j in [((0, 0), 1), ((1, 1, 0), 2), ((3, 1, 2, 0), 3), ((2, 2), 2)]:
            for c_I, I in increment_delta_rows(list(current), j):
                graph = single_bubble_graph(2, current, I)
                m = multiplicity(graph)
                _check(
                    "provenance",
                    Fraction(m) == c_I,
                    "profile %s, I=%s: coefficient %s vs multiplicity %d"
                    % (current, I, c_I, m),
                )

    checks.append(("delta coefficients equal bubble multiplicities", bubble_multiplicity))

    def determinism():
        for g, Z in [(2, (2,)), (1, (2, 2))]:
            first = [twisted_json_bytes(bc.components[0]) for bc in enumerate_bicolored(g, Z, anchor=1)]
            second = [twisted_json_bytes(bc.components[0]) for bc in enumerate_bicolored(g, Z, anchor=1)]
            _check("determinism", first == second, "(%s, %s) output not reproducible" % (g, Z))

    checks.append(("enumeration output is byte-reproducible", determinism))
    return checks


def _flatten(classes):
    out = []
    for bc in classes:
        out.extend(bc.components)
    return out


def _suite_rt(args):
    size = args.max_size if args.max_size is not None else 6
    checks = []

    def product_formula():
        # expand prod_{j=1..z} (xi + j psi_1) independently via elementary
        # symmetric functions: the xi^(z-k) coefficient is e_k(1..z) psi_1^k
        for g in (1, 2, 5):
            for z in range(min(size, 6) + 1):
                poly = alpha_rt(g, (z,))
                e = [Fraction(1)] + [Fraction(0)] * z
                for j in range(1, z + 1):
                    for k in range(min(j, z), 0, -1):
                        e[k] += j * e[k - 1]
                expected = {}
                for k in range(z + 1):
                    if e[k]:
                        term = ((), ((("m", 1), k),), ()) if k else ((), (), ())
                        expected[z - k] = RTClass(g, 1, {term: e[k]})
                _check(
                    "product",
                    poly.coeffs.keys() == expected.keys()
                    and all(poly.coeffs[k] == expected[k] for k in expected),
                    "alpha(g=%d, (%d)) differs from the product expansion" % (g, z),
                )

    checks.append(("single-marking class equals the rising product", product_formula))

    def homogeneity_and_monic():
        for g, Z in [(2, (2, 2)), (3, (1, 2, 0)), (2, (0, 0)), (4, (3, 1))]:
            poly = alpha_rt(g, Z)
            total = sum(Z)
            _check("monic", total in poly.coeffs, "missing top power for %s" % (Z,))
            top = poly.coeffs[total]
            _check(
                "monic",
                top == RTClass.unit(g, len(Z)),
                "top coefficient not the fundamental class for %s" % (Z,),
            )
            for k, cls in poly.coeffs.items():
                deg = cls.degree()
                _check(
                    "homogeneous",
                    deg is None or deg == total - k,
                    "xi^%d coefficient of %s has degree %s" % (k, Z, deg),
                )

    checks.append(("classes are monic in xi and homogeneous", homogeneity_and_monic))

    def order_independence():
        cases = []
        labels = []
        for g in (2, 3):
            for n in range(0, 4):
                for z in range(0, size - 2 * n + 1):
                    Z = (z,) + (2,) * n
                    for order in _distinct_orders(Z):
                        cases.append((g, z, n, order))
                        labels.append((g, z, n))
        if args.jobs and args.jobs > 1:
            from concurrent.futures import ProcessPoolExecutor

            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                results = list(pool.map(_rt_order_case, cases, chunksize=8))
        else:
            results = [_rt_order_case(case) for case in cases]
        by_cell = {}
        for (g, z, n), value in zip(labels, results):
            by_cell.setdefault((g, z, n), set()).add(value)
        for cell, values in sorted(by_cell.items()):
            _check(
                "order-independence",
                len(values) == 1,
                "cell %s yields %d distinct values across orders" % (cell, len(values)),
            )

    checks.append(("increment order does not change the pushforward", order_independence))

    def two_route():
        table = CoeffTable()
        for g in (1, 2, 3):
            for n in range(0, 4):
                for z in range(0, size - 2 * n + 1):
                    if not (n == 0 or (n <= g - 1 and z + n >= g - 1)):
                        continue
                    symbolic = a_symbolic(g, z, n)
                    recursive = table.value(g, z, n)
                    _check(
                        "two-route",
                        symbolic == recursive,
                        "a(%d,%d,%d): symbolic %s vs recursion %s"
                        % (g, z, n, symbolic, recursive),
                    )

    checks.append(("symbolic and recursive coefficients agree", two_route))
    return checks


def _suite_coeffs(args):
    G = args.G if args.G is not None else 12
    checks = []
    table = CoeffTable(args.cache)

    def headline():
        for g in range(1, G + 1):
            expected = 2 ** (g - 1) * g
            _check("a_g", a_g(g) == expected, "a_%d = %s, expected %d" % (g, a_g(g), expected))
            via_table = cell_value(table, g, 1, g - 1, args.fallback)
            _check("a_g table", via_table == expected, "table a_%d = %s" % (g, via_table))

    checks.append(("headline constants a_g = 2^(g-1) g", headline))

    def odd_spin():
        for g in range(1, G + 1):
            lhs = cell_value(table, g, 0, g - 1, args.fallback)
            rhs = odd_spin_count(g)
            _check("odd spin", lhs == rhs, "a(%d,0,%d) = %s, expected %s" % (g, g - 1, lhs, rhs))

    checks.append(("boundary column counts odd spin structures", odd_spin))

    def closed_form():
        for g in range(1, G + 1):
            for n in range(g):
                rhs = sum(Fraction(-2) ** i * w_seq(g, n - i) for i in range(n + 1))
                _check(
                    "closed form",
                    u_seq(g, n) == rhs,
                    "u(%d,%d) = %s, alternating sum %s" % (g, n, u_seq(g, n), rhs),
                )

    checks.append(("alternating closed form for u", closed_form))

    def replay():
        problems = table.replay_check()
        _check("replay", not problems, "; ".join(problems[:3]))

    checks.append(("cached cells replay exactly", replay))
    return checks


def cmd_verify(args, stream):
    suites = {
        "graphs": _suite_graphs,
        "twists": _suite_twists,
        "rt": _suite_rt,
        "coeffs": _suite_coeffs,
    }
    names = list(suites) if args.suite == "all" else [args.suite]
    checks = []
    for name in names:
        for label, thunk in suites[name](args):
            checks.append(("%s: %s" % (name, label), thunk))

    started = time.time()
    failures = []
    results = []
    for label, thunk in checks:
        try:
            thunk()
        except Exception as exc:  # noqa: BLE001 - verification must report, not crash
            detail = str(exc) or type(exc).__name__
            failures.append((label, detail))
            results.append({"check": label, "status": "fail", "detail": detail})
        else:
            results.append({"check": label, "status": "ok"})

    if args.format == "json":
        for row in results:
            stream.write(json.dumps(row, sort_keys=True) + "\n")
        stream.write(
            json.dumps({"failed": len(failures), "passed": len(results) - len(failures)})
            + "\n"
        )
    elif args.format == "csv":
        writer = _csv_writer(stream)
        writer.writerow(("status", "check", "detail"))
        for row in results:
            writer.writerow((row["status"], row["check"], row.get("detail", "")))
    else:
        for row in results:
            if row["status"] == "ok":
                stream.write("ok   %s\n" % row["check"])
            else:
                stream.write("FAIL %s: %s\n" % (row["check"], row["detail"]))
        stream.write(
            "%s: %d/%d checks passed\n"
            % ("FAIL" if failures else "pass", len(results) - len(failures), len(results))
        )
    if args.stats:
        print(
            "stats: checks=%d failures=%d elapsed=%.1fs"
            % (len(results), len(failures), time.time() - started),
            file=sys.stderr,
        )
    return 1 if failures else 0


# ----------------------------------------------------------------------
# parser


def build_parser():
    parser = argparse.ArgumentParser(
        prog="strataq",
        description="Stable graphs, twisted level graphs, rational-tails classes, "
        "and coefficient tables.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--format", choices=FORMATS, default="text")

    p = sub.add_parser("enumerate-graphs", help="stable-graph isomorphism classes")
    p.add_argument("-g", type=int, required=True, help="genus")
    p.add_argument("-n", type=int, required=True, help="number of markings")
    p.add_argument("--max-loops", type=int, default=None, help="bound on loop rank (default: g)")
    add_common(p)
    p.set_defaults(func=cmd_enumerate_graphs)

    p = sub.add_parser("enumerate-bicolored", help="two-level twisted graphs")
    p.add_argument("-g", type=int, required=True, help="genus")
    p.add_argument("-Z", type=_parse_profile, required=True, help="comma-separated twist profile")
    p.add_argument("--anchor", type=int, required=True, help="marking forced to the bottom level")
    p.add_argument(
        "--variant",
        choices=("anchored_down", "anchored_both", "anchored_split"),
        default="anchored_down",
    )
    p.add_argument("--co-anchor", dest="co_anchor", type=int, default=None)
    add_common(p)
    p.set_defaults(func=cmd_enumerate_bicolored)

    p = sub.add_parser("alpha-rt", help="rational-tails stratum class")
    p.add_argument("-g", type=int, required=True, help="genus")
    p.add_argument("-Z", type=_parse_profile, required=True, help="comma-separated twist profile")
    add_common(p)
    p.set_defaults(func=cmd_alpha_rt)

    p = sub.add_parser("coeff-table", help="w/u triangles and the a_g column")
    p.add_argument("-G", type=int, required=True, help="largest genus")
    p.add_argument("--cache", default=None, help="coefficient cache file")
    p.add_argument("--fallback", choices=("none", "symbolic"), default="none")
    p.add_argument("--stats", action="store_true", help="print cache counters to stderr")
    add_common(p)
    p.set_defaults(func=cmd_coeff_table)

    p = sub.add_parser("verify", help="run an invariant suite")
    p.add_argument("suite", choices=("graphs", "twists", "rt", "coeffs", "all"))
    p.add_argument("-G", type=int, default=None, help="genus bound for coeffs (default 12)")
    p.add_argument("--dim", type=int, default=3, help="moduli dimension bound for graphs")
    p.add_argument(
        "--max-size",
        dest="max_size",
        type=int,
        default=None,
        help="size bound: rt profile weight (default 6), twist profile weight (default 3)",
    )
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1, help="worker processes")
    p.add_argument("--cache", default=None, help="coefficient cache file")
    p.add_argument("--fallback", choices=("none", "symbolic"), default="none")
    p.add_argument("--stats", action="store_true", help="print timing to stderr")
    add_common(p)
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, sys.stdout)
    except ValueError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except OSError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
