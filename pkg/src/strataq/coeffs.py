"""Exact coefficient recursions, closed forms, and the persistent cell cache.

The central quantity is the integer ``a(g, z, n)`` (the normalized
``xi^(z+n)`` coefficient of the pushed-forward stratum class for profile
``(z, 2, ..., 2)``; see :mod:`strataq.rtring` for the symbolic route).  The
recursion route computes it from four identities, tried in this order:

- ``base``:       a(g, z, 0) = 1;
- ``identity3``:  a(g, 0, g-1) = 2^(g-1) (2^g - 1)  (odd spin count);
- ``identity4``:  a(g, z, n) = a(g-1, z-1, n) + 4 a(g-1, z, n-1)
                  on the diagonal z + n = g - 1 with 1 <= n <= g-2;
- ``identity2``:  a(g, z, n) = a(g, z-1, n) - 2 a(g, z+1, n-1)
                  for z >= 1, n >= 1.

These reach exactly the cells with ``n == 0`` or
``n <= g-1 and z+n >= g-1``; other cells raise.  A parallel pair of
sequences mirrors the diagonal recursion in closed form:

- ``w(g, n)``: w(g, 0) = 1, w(g, g-1) = odd spin count,
               w(g, n) = w(g-1, n) + 4 w(g-1, n-1) for 0 < n < g-1;
- ``u(g, n)``: u(g, 0) = 1, u(g, n) = w(g, n) - 2 u(g, n-1),
               equivalently u(g, n) = sum_i (-2)^i w(g, n-i).

The headline number is ``a_g = u(g, g-1) = 2^(g-1) g``.

:class:`CoeffTable` memoizes cells with their provenance and can persist
them to a text cache (one ``g,z,n,p/q,provenance`` line per cell, written
atomically, loaded eagerly).  Every stored value can be re-derived by
replaying its recorded identity against the other stored cells
(:meth:`CoeffTable.replay_check`).
"""

from __future__ import annotations

import os
import tempfile
from fractions import Fraction

_PROVENANCES = ("base", "identity2", "identity3", "identity4")


def odd_spin_count(g):
    """Number of odd spin structures in genus ``g``: 2^(g-1) (2^g - 1)."""
    if g < 1:
        raise ValueError("genus must be >= 1")
    return 2 ** (g - 1) * (2**g - 1)


def elliptic_count(z, z_prime):
    """Degree of the one-marked elliptic correction class: (z')^2."""
    if z < 0 or z_prime < 0:
        raise ValueError("twists must be >= 0")
    return z_prime * z_prime


def _in_domain(g, z, n):
    if g < 1 or z < 0 or n < 0:
        return False
    return n == 0 or (n <= g - 1 and z + n >= g - 1)


class CoeffTable:
    """Memo table for the coefficient recursion, with provenance and cache.

    ``path`` (optional) names a cache file loaded eagerly at construction;
    :meth:`save` rewrites it atomically.  ``computed_cells`` counts cells
    derived in this process, ``loaded_cells`` those read from the cache.
    """

    def __init__(self, path=None):
        self.values = {}
        self.provenance = {}
        self.computed_cells = 0
        self.loaded_cells = 0
        self.path = path
        if path is not None and os.path.exists(path):
            self.load(path)

    # -- recursion ------------------------------------------------------

    def value(self, g, z, n):
        """The exact value ``a(g, z, n)``, computing and memoizing as needed."""
        g, z, n = int(g), int(z), int(n)
        if not _in_domain(g, z, n):
            raise ValueError(
                "cell (g, z, n) = (%d, %d, %d) is not reachable by the recursion"
                % (g, z, n)
            )
        key = (g, z, n)
        if key in self.values:
            return self.values[key]
        if n == 0:
            result, how = Fraction(1), "base"
        elif z == 0 and n == g - 1:
            result, how = Fraction(odd_spin_count(g)), "identity3"
        elif z + n == g - 1:
            result = self.value(g - 1, z - 1, n) + 4 * self.value(g - 1, z, n - 1)
            how = "identity4"
        else:
            result = self.value(g, z - 1, n) - 2 * self.value(g, z + 1, n - 1)
            how = "identity2"
        self.values[key] = result
        self.provenance[key] = how
        self.computed_cells += 1
        return result

    def replay_check(self):
        """Re-derive every stored cell from its provenance; returns problems.

        The invariant: each stored value equals the result of replaying its
        recorded identity against the other stored cells.  Returns a list of
        violation strings (empty when the table is consistent).
        """
        problems = []
        for key in sorted(self.values):
            g, z, n = key
            how = self.provenance.get(key)
            value = self.values[key]
            try:
                if how == "base":
                    expect = Fraction(1) if n == 0 else None
                elif how == "identity3":
                    expect = (
                        Fraction(odd_spin_count(g))
                        if z == 0 and n == g - 1
                        else None
                    )
                elif how == "identity4":
                    if z + n == g - 1 and 1 <= n <= g - 2:
                        expect = self.values[(g - 1, z - 1, n)] + 4 * self.values[
                            (g - 1, z, n - 1)
                        ]
                    else:
                        expect = None
                elif how == "identity2":
                    if z >= 1 and n >= 1:
                        expect = self.values[(g, z - 1, n)] - 2 * self.values[
                            (g, z + 1, n - 1)
                        ]
                    else:
                        expect = None
                else:
                    expect = None
            except KeyError as missing:
                problems.append("cell %r: missing dependency %s" % (key, missing))
                continue
            if expect is None:
                problems.append("cell %r: provenance %r inapplicable" % (key, how))
            elif expect != value:
                problems.append(
                    "cell %r: stored %s, replay gives %s" % (key, value, expect)
                )
        return problems

    # -- persistence ------------------------------------------------------

    def load(self, path):
        with open(path, "r", encoding="ascii") as fh:
            for line_no, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                fields = line.split(",")
                if len(fields) != 5:
                    raise ValueError("%s:%d: expected 5 fields" % (path, line_no))
                g, z, n = (int(x) for x in fields[:3])
                value = Fraction(fields[3])
                how = fields[4]
                if how not in _PROVENANCES:
                    raise ValueError(
                        "%s:%d: unknown provenance %r" % (path, line_no, how)
                    )
                self.values[(g, z, n)] = value
                self.provenance[(g, z, n)] = how
                self.loaded_cells += 1

    def save(self, path=None):
        """Write all cells, sorted, to the cache file (atomic replace)."""
        path = path or self.path
        if path is None:
            raise ValueError("no cache path given")
        lines = []
        for (g, z, n) in sorted(self.values):
            value = self.values[(g, z, n)]
            lines.append(
                "%d,%d,%d,%d/%d,%s"
                % (
                    g,
                    z,
                    n,
                    value.numerator,
                    value.denominator,
                    self.provenance[(g, z, n)],
                )
            )
        directory = os.path.dirname(os.path.abspath(path))
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".coeffs-", text=True)
        try:
            with os.fdopen(fd, "w", encoding="ascii") as fh:
                fh.write("\n".join(lines) + ("\n" if lines else ""))
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise


def a_rec(g, z, n, table=None):
    """The coefficient ``a(g, z, n)`` via the identity recursion route."""
    if table is None:
        table = CoeffTable()
    return table.value(g, z, n)


def w_seq(g, n):
    """The auxiliary sequence w(g, n); see the module docstring."""
    if g < 1 or not (0 <= n <= g - 1):
        raise ValueError("w(g, n) needs g >= 1 and 0 <= n <= g-1")
    if n == 0:
        return 1
    if n == g - 1:
        return odd_spin_count(g)
    return w_seq(g - 1, n) + 4 * w_seq(g - 1, n - 1)


def u_seq(g, n):
    """The alternating partial sums u(g, n) = sum_i (-2)^i w(g, n-i)."""
    if g < 1 or not (0 <= n <= g - 1):
        raise ValueError("u(g, n) needs g >= 1 and 0 <= n <= g-1")
    if n == 0:
        return 1
    return w_seq(g, n) - 2 * u_seq(g, n - 1)


def a_g(g):
    """The headline coefficient a_g = u(g, g-1)."""
    if g < 1:
        raise ValueError("genus must be >= 1")
    return u_seq(g, g - 1)
