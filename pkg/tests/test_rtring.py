"""Rational-tails ring: algebra, pruning, pushforward, two routes."""

from fractions import Fraction
from itertools import permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strataq.coeffs import CoeffTable
from strataq.rtring import (
    RTClass,
    XiPoly,
    a_symbolic,
    alpha_rt,
    forget_last,
    format_rtclass,
    format_xipoly,
    increment_delta_rows,
    mul_delta,
    mul_psi,
)
from strataq.twists import multiplicity, single_bubble_graph


def test_unit_and_zero():
    one = RTClass.unit(2, 3)
    assert not one.is_zero()
    assert one.scalar_part() == 1
    assert one.degree() == 0
    zero = one - one
    assert zero.is_zero()
    assert zero.scalar_part() == 0


def test_mul_psi_builds_powers():
    one = RTClass.unit(2, 2)
    p = mul_psi(mul_psi(one, 1), 1)
    (term, coeff), = p.terms.items()
    assert coeff == 1
    kappa, psi, bubbles = term
    assert kappa == () and bubbles == ()
    assert psi == ((("m", 1), 2),)
    assert p.degree() == 2


def test_mul_psi_validates_marking():
    with pytest.raises(ValueError):
        mul_psi(RTClass.unit(2, 2), 3)


def test_delta_squared_expands_to_psi_sum():
    # delta_I^2 = -(psi_up + psi_down) delta_I; on a 2-marking bubble the
    # bubble side is 3-valent so its psi term is pruned to zero
    one = RTClass.unit(2, 2)
    d = mul_delta(one, (1, 2))
    dd = mul_delta(d, (1, 2))
    (term, coeff), = dd.terms.items()
    assert coeff == -1
    kappa, psi, bubbles = term
    assert bubbles == ((1, 2),)
    assert psi == ((("eu", (1, 2)), 1),)


def test_delta_squared_keeps_bubble_side_when_not_pruned():
    # with a 3-marking bubble the bubble side has 4 special points
    one = RTClass.unit(2, 3)
    d = mul_delta(one, (1, 2, 3))
    dd = mul_delta(d, (1, 2, 3))
    sites = sorted(site for term in dd.terms for site, _ in term[1])
    assert ("ed", (1, 2, 3)) in sites and ("eu", (1, 2, 3)) in sites
    assert all(c == -1 for c in dd.terms.values())


def test_crossing_bubbles_vanish():
    one = RTClass.unit(2, 3)
    d = mul_delta(one, (1, 2))
    assert mul_delta(d, (2, 3)).is_zero()


def test_nested_and_disjoint_bubbles_allowed():
    one = RTClass.unit(2, 4)
    nested = mul_delta(mul_delta(one, (1, 2, 3)), (1, 2))
    assert not nested.is_zero()
    disjoint = mul_delta(mul_delta(one, (1, 2)), (3, 4))
    assert not disjoint.is_zero()


def test_pruning_small_bubble_psi():
    # psi on the bubble side of a 2-marking bubble exceeds dim 0
    one = RTClass.unit(2, 2)
    d = mul_delta(one, (1, 2))
    assert mul_psi(d, ("ed", (1, 2))).is_zero()
    # psi at a marking sitting on that bubble is pruned likewise
    assert mul_psi(d, 1).is_zero()
    # the parent side lives on the root and survives
    assert not mul_psi(d, ("eu", (1, 2))).is_zero()


def test_rendering_pinned():
    assert format_xipoly(alpha_rt(3, (2,))) == "xi^2 + 3*xi*psi_1 + 2*psi_1^2"
    assert format_xipoly(alpha_rt(2, (0, 0))) == "1"
    assert format_xipoly(alpha_rt(1, (1,))) == "xi + psi_1"
    one = RTClass.unit(2, 2)
    assert format_rtclass(one) == "1"
    assert format_rtclass(one.scale(Fraction(-3, 2))) == "-3/2"


def test_product_formula_small():
    # alpha(g, (z)) = prod_{j=1..z} (xi + j psi_1): xi^(z-k) coefficient is
    # e_k(1..z) psi_1^k
    for z in range(7):
        poly = alpha_rt(2, (z,))
        e = [Fraction(1)] + [Fraction(0)] * z
        for j in range(1, z + 1):
            for k in range(min(j, z), 0, -1):
                e[k] += j * e[k - 1]
        assert sorted(poly.coeffs) == list(range(z + 1))
        for k in range(z + 1):
            cls = poly.coeffs[z - k]
            expected_term = ((), ((("m", 1), k),), ()) if k else ((), (), ())
            assert cls.terms == {expected_term: e[k]}


def test_alpha_rt_monic_and_homogeneous():
    for g, Z in [(2, (2, 2)), (3, (1, 2)), (2, (1, 1, 1))]:
        poly = alpha_rt(g, Z)
        total = sum(Z)
        assert poly.coeffs[total] == RTClass.unit(g, len(Z))
        for k, cls in poly.coeffs.items():
            assert cls.degree() == total - k


def test_alpha_rt_rejects_bad_input():
    with pytest.raises(ValueError):
        alpha_rt(0, (2,))
    with pytest.raises(ValueError):
        alpha_rt(2, (-1,))
    with pytest.raises(ValueError):
        alpha_rt(2, (1, 1), order=[1, 1])


def test_increment_delta_rows_match_bubble_multiplicities():
    for current, j in [((0, 0), 1), ((1, 1, 0), 2), ((3, 1, 2, 0), 3), ((2, 2), 2)]:
        rows = increment_delta_rows(list(current), j)
        subsets = {I for _, I in rows}
        # every subset contains j and at least one other marking
        assert all(j in I and len(I) >= 2 for I in subsets)
        for c_I, I in rows:
            graph = single_bubble_graph(3, current, I)
            assert Fraction(multiplicity(graph)) == c_I


def test_forget_last_on_unit_gives_dilaton_scalar():
    # pushing the unit class forward multiplies by nothing; extracting
    # the kappa_0 scalar happens only through the (alpha)-family with A = 1,
    # which needs a kappa or psi factor, so the unit pushes to zero... the
    # numbers below pin the actual normalization through a_symbolic instead
    assert a_symbolic(2, 1, 1) == 4
    assert a_symbolic(2, 0, 1) == 6
    assert a_symbolic(3, 1, 2) == 12
    assert a_symbolic(4, 0, 3) == 120


def test_forget_last_requires_matching_marking():
    cls = RTClass.unit(2, 2)
    assert forget_last(cls).n == 1
    with pytest.raises(ValueError):
        forget_last(cls, last=1)


A_SYMBOLIC_PINNED = {
    (1, 1, 0): 1,
    (2, 1, 1): 4,
    (2, 0, 1): 6,
    (2, 3, 0): 1,
    (3, 0, 2): 28,
    (3, 1, 1): 10,
    (3, 2, 1): 8,
    (3, 1, 2): 12,
    (4, 0, 3): 120,
}


def test_a_symbolic_pinned_values():
    for (g, z, n), expected in A_SYMBOLIC_PINNED.items():
        assert a_symbolic(g, z, n) == expected, (g, z, n)


def test_two_routes_agree_on_reachable_cells():
    table = CoeffTable()
    for g in (1, 2, 3):
        for n in range(0, 3):
            for z in range(0, 5):
                if not (n == 0 or (n <= g - 1 and z + n >= g - 1)):
                    continue
                assert a_symbolic(g, z, n) == table.value(g, z, n), (g, z, n)


def test_order_independence_exhaustive_small():
    # The extracted coefficient never depends on the insertion order.
    for g, z, n in [(2, 1, 1), (2, 2, 1), (2, 0, 2), (3, 0, 2)]:
        Z = (z,) + (2,) * n
        base = [j for j in range(1, len(Z) + 1) for _ in range(Z[j - 1])]
        values = {
            a_symbolic(g, z, n, order=order)
            for order in sorted(set(permutations(base)))
        }
        assert len(values) == 1, (g, z, n, values)


def test_order_changes_representative_but_not_value():
    # With two markings every order yields the same formal polynomial; pin
    # that stronger coincidence where it holds.
    for g, Z in [(2, (1, 2)), (2, (2, 2)), (3, (2, 2))]:
        base = [j for j in range(1, len(Z) + 1) for _ in range(Z[j - 1])]
        renders = {
            format_xipoly(alpha_rt(g, Z, order=order))
            for order in sorted(set(permutations(base)))
        }
        assert len(renders) == 1, (g, Z)
    # With three markings the formal representative genuinely depends on the
    # order (the delta-supported corrections land on different bases) even
    # though the extracted value above does not; keep a witness so a future
    # "simplification" to representative-level comparison trips this test.
    base = [1, 2, 2, 3, 3]
    renders = {
        format_xipoly(alpha_rt(2, (1, 2, 2), order=order))
        for order in sorted(set(permutations(base)))
    }
    assert len(renders) > 1


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_order_independence_random(data):
    g = data.draw(st.sampled_from([2, 3]))
    n = data.draw(st.integers(1, 3))
    z = data.draw(st.integers(0, max(0, 6 - 2 * n)))
    Z = (z,) + (2,) * (n - 1)
    base = [j for j in range(1, len(Z) + 1) for _ in range(Z[j - 1])]
    order = data.draw(st.permutations(base))
    default = a_symbolic(g, z, n - 1)
    shuffled = a_symbolic(g, z, n - 1, order=order)
    assert default == shuffled


def test_xipoly_algebra():
    poly = alpha_rt(2, (2, 1))
    assert isinstance(poly, XiPoly)
    assert poly.g == 2 and poly.n == 2
    # the scalar part of the top coefficient is 1, lower ones are classes
    assert poly.coeffs[3].scalar_part() == 1
