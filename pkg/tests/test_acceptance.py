"""Acceptance gate: the eight headline checks, exact, one line each.

Every criterion asserts exact equality (zero tolerance) and a wall-clock
budget; each prints a single ``PASS``/``FAIL`` line straight to the terminal.
"""

import time
from fractions import Fraction
from itertools import permutations, product

from strataq.coeffs import CoeffTable, a_g, a_rec, odd_spin_count, u_seq, w_seq
from strataq.graphs import canonical_form, enumerate_stable_graphs
from strataq.oracles import brute_force_stable_graphs
from strataq.rtring import RTClass, a_symbolic, alpha_rt, increment_delta_rows
from strataq.twists import multiplicity, single_bubble_graph


def _criterion(capsys, number, description, budget_seconds, body):
    started = time.time()
    try:
        body()
    except BaseException:
        with capsys.disabled():
            print("FAIL criterion %d: %s" % (number, description))
        raise
    elapsed = time.time() - started
    ok = elapsed < budget_seconds
    with capsys.disabled():
        print(
            "%s criterion %d: %s (%.2fs, budget %ds)"
            % ("PASS" if ok else "FAIL", number, description, elapsed, budget_seconds)
        )
    assert ok, "criterion %d exceeded %ds budget" % (number, budget_seconds)


def test_criterion_1_headline_constant(capsys):
    def body():
        for g in range(1, 13):
            assert a_g(g) == 2 ** (g - 1) * g, g

    _criterion(capsys, 1, "a_g = 2^(g-1) g for 1 <= g <= 12", 1, body)


def test_criterion_2_odd_spin_boundary(capsys):
    def body():
        table = CoeffTable()
        for g in range(1, 13):
            expected = 2 ** (g - 1) * (2**g - 1)
            assert odd_spin_count(g) == expected, g
            assert a_rec(g, 0, g - 1, table=table) == expected, g

    _criterion(
        capsys, 2, "a(g,0,g-1) counts odd spin structures for 1 <= g <= 12", 1, body
    )


def test_criterion_3_closed_form(capsys):
    def body():
        for g in range(1, 13):
            for n in range(g):
                rhs = sum((-2) ** i * w_seq(g, n - i) for i in range(n + 1))
                assert u_seq(g, n) == rhs, (g, n)

    _criterion(
        capsys, 3, "u(g,n) equals the alternating w-sum for 0 <= n <= g-1 <= 11", 1, body
    )


def test_criterion_4_two_route_agreement(capsys):
    def body():
        table = CoeffTable()
        checked = 0
        for g in range(1, 5):
            for n in range(0, 5):
                for z in range(0, 9):
                    if z + 2 * n > 8:
                        continue
                    if not (n == 0 or (n <= g - 1 and z + n >= g - 1)):
                        continue
                    assert a_symbolic(g, z, n) == table.value(g, z, n), (g, z, n)
                    checked += 1
        assert checked == 66

    _criterion(
        capsys,
        4,
        "symbolic route equals recursion on all reachable cells (g <= 4, z+2n <= 8)",
        300,
        body,
    )


def test_criterion_5_product_formula(capsys):
    def body():
        for g in (1, 2, 3, 7):
            for z in range(7):
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
                assert poly.coeffs == expected, (g, z)

    _criterion(
        capsys,
        5,
        "alpha(g,(z)) expands to the rising product of (xi + j psi_1) for z <= 6",
        1,
        body,
    )


def test_criterion_6_order_independence(capsys):
    def body():
        checked = 0
        for g in (2, 3):
            for n in range(0, 4):
                for z in range(0, 7):
                    if z + 2 * n > 6:
                        continue
                    Z = (z,) + (2,) * n
                    base = [
                        j for j in range(1, len(Z) + 1) for _ in range(Z[j - 1])
                    ]
                    values = {
                        a_symbolic(g, z, n, order=order)
                        for order in sorted(set(permutations(base)))
                    }
                    assert len(values) == 1, (g, z, n, values)
                    checked += 1
        assert checked == 32

    _criterion(
        capsys,
        6,
        "extracted values are increment-order independent (weight <= 6, n <= 3)",
        120,
        body,
    )


def test_criterion_7_delta_provenance(capsys):
    def body():
        checked = 0
        for length in range(2, 5):
            for current in product(range(7), repeat=length):
                if sum(current) > 6:
                    continue
                for j in range(1, length + 1):
                    for c_I, I in increment_delta_rows(list(current), j):
                        graph = single_bubble_graph(2, current, I)
                        assert Fraction(multiplicity(graph)) == c_I, (current, j, I)
                        checked += 1
        assert checked > 1000

    _criterion(
        capsys,
        7,
        "delta coefficients equal bubble multiplicities on every tested increment",
        60,
        body,
    )


def test_criterion_8_enumeration_oracle(capsys):
    def body():
        cells = [(0, 3), (0, 4), (0, 5), (0, 6), (1, 1), (1, 2), (1, 3), (2, 0)]
        for g, n in cells:
            produced = enumerate_stable_graphs(g, n, max_loops=g)
            expected = brute_force_stable_graphs(g, n, max_loops=g)
            assert len(produced) == len(expected), (g, n)
            forms = {canonical_form(G).canonical_bytes for G in produced}
            assert forms == set(expected), (g, n)
        assert len(enumerate_stable_graphs(2, 0, max_loops=2)) == 7

    _criterion(
        capsys,
        8,
        "stable-graph enumeration matches the oracle on every cell of dimension <= 3",
        120,
        body,
    )
