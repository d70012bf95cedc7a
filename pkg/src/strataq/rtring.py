"""The rational-tails fragment of the tautological ring, and the inductive
stratum-class construction.

Classes live on the rational-tails locus of a genus-``g`` space with
markings ``1..n``.  Every boundary stratum that survives there is a tree:
a root component of genus ``g`` with trees of genus-0 *bubbles* hanging off
it, each bubble recorded by the subset of markings it carries (size >= 2).
A monomial *term* is

- a ``kappa`` part: powers of kappa classes, all on the root component;
- a ``psi`` part: powers of cotangent classes at *sites* — a marking
  ``("m", j)``, the parent side ``("eu", I)`` of the node attaching bubble
  ``I``, or the bubble side ``("ed", I)``;
- a ``bubbles`` part: a laminar family of marking subsets (pairwise nested
  or disjoint), the product of the corresponding boundary divisors.

Terms are pruned exactly: a genus-0 bubble with ``s`` special points has
moduli of dimension ``s - 3``, so any term whose psi-load on that bubble
exceeds ``s - 3`` vanishes.  The root is never pruned.

``alpha_rt`` builds the stratum class by incrementing one twist at a time:

    alpha(g, Z') = (xi + z'_j psi_j) alpha(g, Z)
                   - sum_I (1 + sum_{i in I} z_i) delta_I alpha(g, Z)

where ``Z'`` raises entry ``j`` of ``Z`` by one, the sum runs over subsets
``I`` containing ``j`` with ``|I| >= 2``, and the delta coefficient is the
multiplicity of the single-edge one-bubble graph with the pre-increment
profile.  The result is a polynomial in the tautological line class ``xi``
with term-level coefficients (:class:`XiPoly`); the coefficient of
``xi^k`` is homogeneous of degree ``|Z| - k``.

``forget_last`` is the exact pushforward along the map forgetting the last
marking, computed factor by factor (string/dilaton-type expansions on the
root, boundary rewriting and contraction on bubbles).  ``a_symbolic``
combines the two: the number ``a(g, z, n)`` is ``1/n!`` times the
``xi^(z+n)`` coefficient of the class for profile ``(z, 2, ..., 2)`` pushed
forward ``n`` times, which is a degree-0 class, i.e. an exact rational
multiple of the fundamental class.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product
from math import comb, factorial

_EMPTY_TERM = ((), (), ())


class RTClass:
    """A finite sum of monomial terms with exact rational coefficients.

    ``g`` is the ambient genus, ``n`` the number of markings, ``terms`` a
    mapping from term keys to nonzero :class:`fractions.Fraction` values.
    """

    __slots__ = ("g", "n", "terms")

    def __init__(self, g, n, terms=None):
        self.g = int(g)
        self.n = int(n)
        self.terms = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for key, coeff in items:
                c = Fraction(coeff)
                if c:
                    acc = self.terms.get(key, 0) + c
                    if acc:
                        self.terms[key] = acc
                    else:
                        self.terms.pop(key, None)

    # -- ring-module structure ----------------------------------------

    @classmethod
    def unit(cls, g, n):
        return cls(g, n, {_EMPTY_TERM: Fraction(1)})

    @classmethod
    def zero(cls, g, n):
        return cls(g, n)

    def is_zero(self):
        return not self.terms

    def copy(self):
        out = RTClass(self.g, self.n)
        out.terms = dict(self.terms)
        return out

    def scale(self, c):
        c = Fraction(c)
        out = RTClass(self.g, self.n)
        if c:
            out.terms = {key: val * c for key, val in self.terms.items()}
        return out

    def __add__(self, other):
        self._check_compatible(other)
        out = self.copy()
        for key, val in other.terms.items():
            acc = out.terms.get(key, 0) + val
            if acc:
                out.terms[key] = acc
            else:
                out.terms.pop(key, None)
        return out

    def __sub__(self, other):
        return self + other.scale(-1)

    def _check_compatible(self, other):
        if not isinstance(other, RTClass) or (self.g, self.n) != (other.g, other.n):
            raise ValueError("classes live on different spaces")

    def __eq__(self, other):
        return (
            isinstance(other, RTClass)
            and (self.g, self.n) == (other.g, other.n)
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.g, self.n, frozenset(self.terms.items())))

    def degree(self):
        """Common degree of all terms (None when zero); raises if mixed."""
        degrees = {_term_degree(key) for key in self.terms}
        if not degrees:
            return None
        if len(degrees) > 1:
            raise ValueError("inhomogeneous class of degrees %s" % sorted(degrees))
        return degrees.pop()

    def scalar_part(self):
        """Coefficient of the fundamental class; raises if other terms remain."""
        extra = [key for key in self.terms if key != _EMPTY_TERM]
        if extra:
            raise ValueError("class is not a multiple of the fundamental class")
        return self.terms.get(_EMPTY_TERM, Fraction(0))

    def __repr__(self):
        return "RTClass(g=%d, n=%d, %s)" % (self.g, self.n, format_rtclass(self))


def _term_degree(term):
    kappa, psi, bubbles = term
    return (
        sum(m * p for m, p in kappa)
        + sum(p for _, p in psi)
        + len(bubbles)
    )


def _freeze(kappa_d, psi_d, bubbles):
    kappa = tuple(sorted((m, p) for m, p in kappa_d.items() if p))
    psi = tuple(sorted((s, p) for s, p in psi_d.items() if p))
    bub = tuple(sorted(tuple(sorted(b)) for b in bubbles))
    return (kappa, psi, bub)


def _prunes(term):
    """True iff the term vanishes on dimension grounds on some bubble."""
    _, psi, bubbles = term
    if not bubbles:
        return False
    psi_d = dict(psi)
    sets = [set(b) for b in bubbles]
    for idx, I in enumerate(bubbles):
        Iset = sets[idx]
        children = [
            bubbles[k]
            for k, K in enumerate(sets)
            if K < Iset and not any(K < L < Iset for L in sets)
        ]
        exposed = Iset.difference(*[set(c) for c in children]) if children else Iset
        points = len(exposed) + len(children) + 1
        load = sum(psi_d.get(("m", j), 0) for j in exposed)
        load += sum(psi_d.get(("eu", c), 0) for c in children)
        load += psi_d.get(("ed", I), 0)
        if load > points - 3:
            return True
    return False


def _emit(out, term, coeff):
    if not coeff or _prunes(term):
        return
    acc = out.get(term, 0) + coeff
    if acc:
        out[term] = acc
    else:
        out.pop(term, None)


# ----------------------------------------------------------------------
# products with psi and boundary classes


def _normalize_site(site):
    if isinstance(site, int):
        return ("m", site)
    if (
        isinstance(site, tuple)
        and len(site) == 2
        and site[0] in ("m", "eu", "ed")
    ):
        if site[0] == "m":
            return ("m", int(site[1]))
        return (site[0], tuple(sorted(int(x) for x in site[1])))
    raise ValueError("unrecognized site %r" % (site,))


def mul_psi(cls, site):
    """Multiply by the psi class at ``site`` (a marking or an edge site)."""
    site = _normalize_site(site)
    if site[0] == "m" and not (1 <= site[1] <= cls.n):
        raise ValueError("marking %d out of range" % site[1])
    out = {}
    for term, coeff in cls.terms.items():
        kappa, psi, bubbles = term
        if site[0] != "m" and site[1] not in bubbles:
            raise ValueError("site %r names an absent bubble" % (site,))
        psi_d = dict(psi)
        psi_d[site] = psi_d.get(site, 0) + 1
        _emit(out, _freeze(dict(kappa), psi_d, bubbles), coeff)
    result = RTClass(cls.g, cls.n)
    result.terms = out
    return result


def mul_delta(cls, I):
    """Multiply by the boundary divisor of the one-bubble graph on ``I``.

    ``I`` is a set of markings of size >= 2.  Per term: if ``I`` crosses an
    existing bubble the product vanishes (no tree carries both); if ``I`` is
    already a bubble the excess-intersection rule contributes
    ``-(psi_up + psi_down)`` at the corresponding node; otherwise ``I`` is
    inserted with coefficient 1 (the gluing is unique on rational tails).
    """
    I = tuple(sorted(int(x) for x in I))
    if len(set(I)) != len(I) or len(I) < 2:
        raise ValueError("a bubble needs at least two distinct markings")
    if not all(1 <= j <= cls.n for j in I):
        raise ValueError("bubble %r leaves the marking range" % (I,))
    Iset = set(I)
    out = {}
    for term, coeff in cls.terms.items():
        kappa, psi, bubbles = term
        if I in bubbles:
            for node_side in ("eu", "ed"):
                psi_d = dict(psi)
                key = (node_side, I)
                psi_d[key] = psi_d.get(key, 0) + 1
                _emit(out, _freeze(dict(kappa), psi_d, bubbles), -coeff)
            continue
        crossing = any(
            Iset & set(B) and not Iset <= set(B) and not set(B) <= Iset
            for B in bubbles
        )
        if crossing:
            continue
        _emit(out, _freeze(dict(kappa), dict(psi), bubbles + (I,)), coeff)
    result = RTClass(cls.g, cls.n)
    result.terms = out
    return result


# ----------------------------------------------------------------------
# the pushforward forgetting the last marking


def forget_last(cls, last=None):
    """Exact pushforward along the map forgetting the last marking.

    Only the highest marking label may be forgotten (``last`` defaults to it
    and is validated).  Lowers every term's degree by one.
    """
    n = cls.n
    if last is not None and last != n:
        raise ValueError("only the last marking (%d) can be forgotten" % n)
    if n < 1:
        raise ValueError("no marking left to forget")
    out = {}
    for term, coeff in cls.terms.items():
        _push_term(cls.g, n, term, coeff, out)
    result = RTClass(cls.g, n - 1)
    result.terms = out
    return result


def _push_term(g, n, term, coeff, out):
    _, _, bubbles = term
    containing = [I for I in bubbles if n in I]
    if not containing:
        _push_root(g, n, term, coeff, out)
    else:
        J = min(containing, key=len)
        _push_bubble(g, n, term, coeff, J, out)


def _root_points(term, n):
    """Markings and maximal bubbles sitting on the root component."""
    _, _, bubbles = term
    in_bubble = set()
    for I in bubbles:
        in_bubble.update(I)
    root_marks = [j for j in range(1, n + 1) if j not in in_bubble]
    maximal = [
        I for I in bubbles if not any(set(I) < set(K) for K in bubbles)
    ]
    return root_marks, maximal


def _push_root(g, n, term, coeff, out):
    """Marking ``n`` sits on the root: kappa/psi comparisons on the root
    factor, all other factors pulled back."""
    kappa, psi, bubbles = term
    psi_d = dict(psi)
    a = psi_d.pop(("m", n), 0)
    root_marks, maximal = _root_points(term, n)
    K = len(root_marks) + len(maximal)  # root valency including n

    kappa_items = sorted(dict(kappa).items())
    # family (alpha): some power of psi_n survives and pushes to a kappa
    ranges = [range(c + 1) for _, c in kappa_items]
    for t_choice in product(*ranges):
        A = a + sum(m * t for (m, _), t in zip(kappa_items, t_choice))
        if A < 1:
            continue
        w = Fraction(coeff)
        kappa_d = {}
        for (m, c), t in zip(kappa_items, t_choice):
            w *= comb(c, t)
            if c - t:
                kappa_d[m] = c - t
        if A == 1:
            w *= 2 * g - 2 + (K - 1)
        else:
            kappa_d[A - 1] = kappa_d.get(A - 1, 0) + 1
        _emit(out, _freeze(kappa_d, psi_d, bubbles), w)

    # family (beta): no psi_n, no kappa correction; one root site loses a power
    if a == 0:
        root_sites = {("m", j) for j in root_marks if j != n}
        root_sites.update(("eu", M) for M in maximal)
        for site in sorted(root_sites & psi_d.keys()):
            if psi_d[site] >= 1:
                new_psi = dict(psi_d)
                new_psi[site] -= 1
                _emit(out, _freeze(dict(kappa), new_psi, bubbles), coeff)


def _bubble_points(term, J):
    """(exposed markings, children) of bubble ``J`` in the term."""
    _, _, bubbles = term
    Jset = set(J)
    children = [
        I
        for I in bubbles
        if set(I) < Jset and not any(set(I) < set(K) < Jset for K in bubbles)
    ]
    exposed = sorted(Jset.difference(*[set(c) for c in children]) if children else Jset)
    return exposed, children


def _strip_marking(term, n, drop_bubble=None):
    """Remove marking ``n`` from every bubble subset (rekeying psi sites);
    optionally delete one bubble entirely.  Returns (kappa, psi dict, bubbles
    tuple) with the rekeying applied."""
    kappa, psi, bubbles = term
    rename = {}
    new_bubbles = []
    for I in bubbles:
        if drop_bubble is not None and I == drop_bubble:
            continue
        stripped = tuple(j for j in I if j != n)
        rename[I] = stripped
        new_bubbles.append(stripped)
    assert len(set(new_bubbles)) == len(new_bubbles), "bubble collision"
    psi_d = {}
    for (tag, body), p in psi:
        if tag == "m":
            psi_d[(tag, body)] = p
        else:
            if drop_bubble is not None and body == drop_bubble:
                raise AssertionError("psi on a contracted bubble edge")
            psi_d[(tag, rename.get(body, body))] = p
    return dict(kappa), psi_d, tuple(new_bubbles)


def _push_bubble(g, n, term, coeff, J, out):
    """Marking ``n`` is exposed on bubble ``J``."""
    kappa, psi, bubbles = term
    psi_d = dict(psi)
    a = psi_d.get(("m", n), 0)
    exposed, children = _bubble_points(term, J)
    s = len(exposed) + len(children) + 1  # special points of J's factor

    if a >= 1:
        # rewrite one factor of psi_n as a sum of boundary divisors of J's
        # genus-0 factor separating n from the node and one reference point
        others = [("m", j) for j in exposed if j != n] + [
            ("c", C) for C in children
        ]
        if not others:
            return  # 3-valent with a psi: vanishes (also caught by pruning)
        reference = others[0]
        pool = [pt for pt in others[1:]]
        base_psi = dict(psi_d)
        base_psi[("m", n)] = a - 1
        for r in range(len(pool) + 1):
            for chosen in combinations(pool, r):
                # T = {n} plus the chosen points; need |T| >= 2
                if not chosen:
                    continue
                new_set = {n}
                for tag, body in chosen:
                    if tag == "m":
                        new_set.add(body)
                    else:
                        new_set.update(body)
                I_T = tuple(sorted(new_set))
                assert I_T not in bubbles
                new_term = _freeze(dict(kappa), base_psi, bubbles + (I_T,))
                if not _prunes(new_term):
                    _push_term(g, n, new_term, coeff, out)
        return

    if s == 3:
        # J becomes 2-pointed after forgetting n: it contracts; the psi
        # power on the parent side of J's node transfers to the survivor
        b_J = psi_d.pop(("eu", J), 0)
        assert psi_d.get(("ed", J), 0) == 0, "pruning should have removed this"
        psi_d.pop(("ed", J), None)
        survivors = [("m", j) for j in exposed if j != n] + [("c", C) for C in children]
        assert len(survivors) == 1
        tag, body = survivors[0]
        kappa_d, new_psi, new_bubbles = _strip_marking(
            (kappa, tuple(sorted(psi_d.items())), bubbles), n, drop_bubble=J
        )
        if b_J:
            site = ("m", body) if tag == "m" else ("eu", body)
            new_psi[site] = new_psi.get(site, 0) + b_J
        _emit(out, _freeze(kappa_d, new_psi, new_bubbles), coeff)
        return

    # s >= 4: string equation on J's genus-0 factor
    sites = [("m", j) for j in exposed if j != n]
    sites += [("eu", C) for C in children]
    sites += [("ed", J)]
    for site in sites:
        if psi_d.get(site, 0) >= 1:
            new_psi = dict(psi_d)
            new_psi[site] -= 1
            stripped = _strip_marking(
                (kappa, tuple(sorted(new_psi.items())), bubbles), n
            )
            kappa_d, renamed_psi, new_bubbles = stripped
            _emit(out, _freeze(kappa_d, renamed_psi, new_bubbles), coeff)
    # no psi to absorb: the pushforward of a pulled-back class vanishes


# ----------------------------------------------------------------------
# xi-polynomials


class XiPoly:
    """Polynomial in the tautological line class xi with RTClass coefficients."""

    __slots__ = ("g", "n", "coeffs")

    def __init__(self, g, n, coeffs=None):
        self.g = int(g)
        self.n = int(n)
        self.coeffs = {}
        if coeffs:
            for k, cls in coeffs.items():
                if not cls.is_zero():
                    self.coeffs[int(k)] = cls

    @classmethod
    def unit(cls, g, n):
        return cls(g, n, {0: RTClass.unit(g, n)})

    def coeff(self, k):
        return self.coeffs.get(k, RTClass.zero(self.g, self.n))

    def __eq__(self, other):
        return (
            isinstance(other, XiPoly)
            and (self.g, self.n) == (other.g, other.n)
            and self.coeffs == other.coeffs
        )

    def __repr__(self):
        return "XiPoly(g=%d, n=%d, %s)" % (self.g, self.n, format_xipoly(self))


def _xipoly_step(poly, j, z_next, delta_rows):
    """One twist increment: multiply by (xi + z_next * psi_j) and subtract
    the listed (coefficient, subset) boundary corrections."""
    out = {}

    def add(k, cls):
        if cls.is_zero():
            return
        if k in out:
            out[k] = out[k] + cls
            if out[k].is_zero():
                del out[k]
        else:
            out[k] = cls

    for k, cls in poly.coeffs.items():
        add(k + 1, cls)
        add(k, mul_psi(cls, j).scale(z_next))
        for c_I, I in delta_rows:
            add(k, mul_delta(cls, I).scale(-c_I))
    return XiPoly(poly.g, poly.n, out)


def increment_delta_rows(current, j):
    """The boundary corrections for one twist increment at marking ``j``.

    Given the pre-increment profile ``current``, returns a list of
    ``(coefficient, subset)`` rows, one per marking subset ``I`` containing
    ``j`` with ``|I| >= 2``.  The coefficient ``1 + sum_{i in I} current[i-1]``
    is the multiplicity of the single-edge one-bubble graph whose bubble
    carries exactly the markings in ``I``.
    """
    n = len(current)
    rows = []
    for size in range(1, n):
        for rest in combinations([i for i in range(1, n + 1) if i != j], size):
            I = tuple(sorted((j,) + rest))
            c_I = 1 + sum(current[i - 1] for i in I)
            rows.append((Fraction(c_I), I))
    return rows


def alpha_rt(g, Z, order=None):
    """The rational-tails stratum class for genus ``g`` and twist profile ``Z``.

    Entries of ``Z`` must be non-negative integers and ``g >= 1``.  The class
    is built by incrementing twists one at a time starting from the zero
    profile; ``order``, when given, lists the marking incremented at each
    step (it must contain marking ``j`` exactly ``Z[j-1]`` times).  The
    result does not depend on the order.
    """
    if g < 1:
        raise ValueError("genus must be >= 1")
    Z = tuple(int(z) for z in Z)
    n = len(Z)
    if any(z < 0 for z in Z):
        raise ValueError("twist profile entries must be >= 0")
    if order is None:
        order = [j for j in range(1, n + 1) for _ in range(Z[j - 1])]
    else:
        order = [int(j) for j in order]
        if sorted(order) != sorted(
            j for j in range(1, n + 1) for _ in range(Z[j - 1])
        ):
            raise ValueError("order is not an increment sequence for Z")

    current = [0] * n
    poly = XiPoly.unit(g, n)
    for j in order:
        poly = _xipoly_step(poly, j, current[j - 1] + 1, increment_delta_rows(current, j))
        current[j - 1] += 1
        if __debug__:
            total = sum(current)
            for k, cls in poly.coeffs.items():
                deg = cls.degree()
                assert deg is None or deg == total - k, (
                    "xi^%d coefficient has degree %s, expected %d"
                    % (k, deg, total - k)
                )
    return poly


def forget_last_xipoly(poly):
    """Pushforward of an xi-polynomial (xi commutes with the pushforward)."""
    out = {}
    for k, cls in poly.coeffs.items():
        pushed = forget_last(cls)
        if not pushed.is_zero():
            out[k] = pushed
    return XiPoly(poly.g, poly.n - 1, out)


def a_symbolic(g, z, n, order=None):
    """The coefficient ``a(g, z, n)`` computed through the symbolic route.

    Builds the class for profile ``(z, 2, ..., 2)`` (``n`` twos), pushes
    forward ``n`` times, and reads off the ``xi^(z+n)`` coefficient, which is
    a degree-0 class; the result is that exact rational multiple divided by
    ``n!``.
    """
    if z < 0 or n < 0:
        raise ValueError("need z >= 0 and n >= 0")
    Z = (z,) + (2,) * n
    poly = alpha_rt(g, Z, order=order)
    for _ in range(n):
        poly = forget_last_xipoly(poly)
    cls = poly.coeff(z + n)
    return cls.scalar_part() / factorial(n)


# ----------------------------------------------------------------------
# rendering


def _format_site(site):
    tag, body = site
    if tag == "m":
        return "psi_%d" % body
    name = "psiu" if tag == "eu" else "psid"
    return "%s_{%s}" % (name, ",".join(str(j) for j in body))


def _format_term(term):
    kappa, psi, bubbles = term
    parts = []
    for m, p in kappa:
        parts.append("kappa_%d" % m + ("^%d" % p if p > 1 else ""))
    for site, p in psi:
        parts.append(_format_site(site) + ("^%d" % p if p > 1 else ""))
    for I in bubbles:
        parts.append("delta_{%s}" % ",".join(str(j) for j in I))
    return parts


def _format_coeff(c):
    return str(c)  # Fraction renders as p or p/q


def format_rtclass(cls, xi_power=None):
    """Render a class as a sum of monomials (deterministic term order)."""
    if cls.is_zero():
        return "0"
    chunks = []
    for term in sorted(cls.terms):
        coeff = cls.terms[term]
        parts = _format_term(term)
        if xi_power:
            parts = (["xi" + ("^%d" % xi_power if xi_power > 1 else "")]) + parts
        body = "*".join(parts) if parts else "1"
        mag = abs(coeff)
        if mag == 1 and parts:
            piece = body
        else:
            piece = "%s*%s" % (_format_coeff(mag), body) if parts else _format_coeff(mag)
        chunks.append((piece, coeff < 0))
    text = chunks[0][0] if not chunks[0][1] else "-" + chunks[0][0]
    for piece, negative in chunks[1:]:
        text += (" - " if negative else " + ") + piece
    return text


def format_xipoly(poly):
    """Render an xi-polynomial, xi powers descending."""
    if not poly.coeffs:
        return "0"
    chunks = []
    for k in sorted(poly.coeffs, reverse=True):
        rendered = format_rtclass(poly.coeffs[k], xi_power=k)
        chunks.append(rendered)
    text = chunks[0]
    for piece in chunks[1:]:
        if piece.startswith("-"):
            text += " - " + piece[1:]
        else:
            text += " + " + piece
    return text
