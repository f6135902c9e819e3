"""Finite groups as multiplication tables, and phase tables indexed by them.

Group elements are integers ``0..order-1`` with ``0`` the identity.  A group
may act on a finite label set; the action is stored as a table of
permutations.  Phase tables hold complex scalars indexed by element tuples
and support the cocycle checks used throughout the pipeline.
"""

from __future__ import annotations

import itertools
import json

import numpy as np

from .errors import NotACocycle, NotAGroup

DEFAULT_TOL = 1e-9


class Group:
    """A finite group given by its multiplication table.

    ``mult[g][h]`` is the product gh.  Element 0 must be the identity.
    """

    def __init__(self, mult):
        mult = [list(row) for row in mult]
        n = len(mult)
        for row in mult:
            if len(row) != n:
                raise NotAGroup("multiplication table is not square")
        self.order = n
        self.mult = mult
        self._validate()
        self.inv = [0] * n
        for g in range(n):
            for h in range(n):
                if mult[g][h] == 0:
                    self.inv[g] = h
                    break

    def _validate(self):
        n = self.order
        for g in range(n):
            if self.mult[0][g] != g or self.mult[g][0] != g:
                raise NotAGroup("element 0 is not the identity")
        for g in range(n):
            if sorted(self.mult[g]) != list(range(n)):
                raise NotAGroup(f"row {g} is not a permutation")
            if sorted(self.mult[h][g] for h in range(n)) != list(range(n)):
                raise NotAGroup(f"column {g} is not a permutation")
        for g in range(n):
            if 0 not in self.mult[g]:
                raise NotAGroup(f"element {g} has no inverse")
        for g in range(n):
            for h in range(n):
                for k in range(n):
                    if (self.mult[self.mult[g][h]][k]
                            != self.mult[g][self.mult[h][k]]):
                        raise NotAGroup(
                            f"associativity fails at ({g}, {h}, {k})")

    def op(self, g, h):
        return self.mult[g][h]

    def elements(self):
        return range(self.order)

    def element_order(self, g):
        k, x = 1, g
        while x != 0:
            x = self.op(x, g)
            k += 1
        return k

    # ------------------------------------------------------------------
    # constructions
    # ------------------------------------------------------------------
    @staticmethod
    def cyclic(n):
        return Group([[(a + b) % n for b in range(n)] for a in range(n)])

    @staticmethod
    def direct_product(g1, g2):
        """Direct product; element (a, b) is encoded as a * |G2| + b."""
        n1, n2 = g1.order, g2.order
        mult = [[0] * (n1 * n2) for _ in range(n1 * n2)]
        for a1, b1 in itertools.product(range(n1), range(n2)):
            for a2, b2 in itertools.product(range(n1), range(n2)):
                mult[a1 * n2 + b1][a2 * n2 + b2] = (
                    g1.op(a1, a2) * n2 + g2.op(b1, b2))
        return Group(mult)

    @staticmethod
    def from_permutations(perms):
        """Group generated by a list of permutations (tuples of ints).

        Elements are numbered in BFS discovery order starting from the
        identity, so element 0 is always the identity.
        """
        if not perms:
            raise NotAGroup("no generators")
        deg = len(perms[0])
        ident = tuple(range(deg))
        elems = [ident]
        index = {ident: 0}
        frontier = [ident]
        while frontier:
            nxt = []
            for p in frontier:
                for gen in perms:
                    q = tuple(p[gen[i]] for i in range(deg))
                    if q not in index:
                        index[q] = len(elems)
                        elems.append(q)
                        nxt.append(q)
            frontier = nxt
        n = len(elems)
        mult = [[0] * n for _ in range(n)]
        for i, p in enumerate(elems):
            for j, q in enumerate(elems):
                r = tuple(p[q[k]] for k in range(deg))
                mult[i][j] = index[r]
        return Group(mult)

    # ------------------------------------------------------------------
    # actions and subgroups
    # ------------------------------------------------------------------
    def check_action(self, action, n_labels):
        """Validate ``action[g][x]`` as a left action on ``range(n_labels)``."""
        for g in self.elements():
            if sorted(action[g]) != list(range(n_labels)):
                raise NotAGroup(f"action of {g} is not a permutation")
        for x in range(n_labels):
            if action[0][x] != x:
                raise NotAGroup("identity does not act trivially")
        for g in self.elements():
            for h in self.elements():
                for x in range(n_labels):
                    if action[self.op(g, h)][x] != action[g][action[h][x]]:
                        raise NotAGroup(
                            f"action not compatible at ({g}, {h}, {x})")

    def stabilizer(self, action, x):
        """Elements fixing label ``x``, in increasing order."""
        return [g for g in self.elements() if action[g][x] == x]

    def coset_representatives(self, action, x0):
        """Deterministic transversal ``k_x`` with ``k_x . x0 = x`` for every
        label in the orbit of ``x0``.

        BFS over group elements in increasing order; the representative of a
        label is the first element reaching it.  ``k_{x0}`` is the identity.
        """
        reps = {x0: 0}
        frontier = [x0]
        while frontier:
            nxt = []
            for x in frontier:
                for g in sorted(self.elements()):
                    y = action[g][x]
                    if y not in reps:
                        reps[y] = self.op(g, reps[x])
                        nxt.append(y)
            frontier = nxt
        return reps

    def subgroup_table(self, elements):
        """Multiplication table of a subgroup, with its own numbering.

        ``elements`` must contain the identity and be closed; the identity is
        renumbered to 0 and the remaining elements keep their relative order.
        Returns ``(subgroup, embedding)`` where ``embedding[i]`` is the parent
        element of subgroup element ``i``.
        """
        elems = sorted(elements)
        if 0 not in elems:
            raise NotAGroup("subgroup must contain the identity")
        elems = [0] + [e for e in elems if e != 0]
        index = {e: i for i, e in enumerate(elems)}
        n = len(elems)
        mult = [[0] * n for _ in range(n)]
        for i, a in enumerate(elems):
            for j, b in enumerate(elems):
                p = self.op(a, b)
                if p not in index:
                    raise NotAGroup("set is not closed under multiplication")
                mult[i][j] = index[p]
        return Group(mult), elems

    # ------------------------------------------------------------------
    # serialization
    # ------------------------------------------------------------------
    def to_json_dict(self, action=None):
        d = {"order": self.order, "mult": self.mult}
        if action is not None:
            d["action"] = [list(row) for row in action]
        return d

    @staticmethod
    def from_json_dict(d):
        g = Group(d["mult"])
        if g.order != d.get("order", g.order):
            raise NotAGroup("declared order disagrees with table size")
        action = d.get("action")
        if action is not None:
            g.check_action(action, len(action[0]))
        return g, d.get("action")


class PhaseTable:
    """Complex scalars indexed by tuples of group elements (and labels).

    Used for 2- and 3-cocycles, L-symbols and zeta tables.  Keys are plain
    tuples; values are complex numbers.
    """

    def __init__(self, values=None):
        self.values = dict(values or {})

    def __getitem__(self, key):
        return self.values[key]

    def __setitem__(self, key, val):
        self.values[key] = complex(val)

    def __contains__(self, key):
        return key in self.values

    def items(self):
        return self.values.items()

    def unimodular_residual(self):
        return max(abs(abs(v) - 1.0) for v in self.values.values())

    def to_json_dict(self):
        return {
            "entries": [
                {"key": list(k), "value": [v.real, v.imag]}
                for k, v in sorted(self.values.items())
            ]
        }

    @staticmethod
    def from_json_dict(d):
        t = PhaseTable()
        for e in d["entries"]:
            t[tuple(e["key"])] = complex(e["value"][0], e["value"][1])
        return t

    def to_json(self):
        return json.dumps(self.to_json_dict())


def check_3cocycle(group, omega, tol=DEFAULT_TOL):
    """Max deviation of a PhaseTable (g,h,k) -> omega from the 3-cocycle
    condition; raises if above tolerance.
    """
    worst = 0.0
    for g, h, k, l in itertools.product(group.elements(), repeat=4):
        lhs = (omega[(h, k, l)] * omega[(g, group.op(h, k), l)]
               * omega[(g, h, k)])
        rhs = omega[(group.op(g, h), k, l)] * omega[(g, h, group.op(k, l))]
        worst = max(worst, abs(lhs - rhs))
    if worst > tol:
        raise NotACocycle(f"3-cocycle condition violated by {worst:.3e}")
    return worst


def check_2cocycle(group, psi, tol=DEFAULT_TOL):
    """Max deviation from psi(g,h) psi(gh,k) = psi(h,k) psi(g,hk)."""
    worst = 0.0
    for g, h, k in itertools.product(group.elements(), repeat=3):
        lhs = psi[(g, h)] * psi[(group.op(g, h), k)]
        rhs = psi[(h, k)] * psi[(g, group.op(h, k))]
        worst = max(worst, abs(lhs - rhs))
    if worst > tol:
        raise NotACocycle(f"2-cocycle condition violated by {worst:.3e}")
    return worst


def check_L_compatibility(group, action, labels, L, omega, tol=DEFAULT_TOL):
    """Max deviation from the pentagon-type relation tying L-symbols to omega:

        L^x_{g,hk} L^x_{h,k} = omega(g,h,k) L^{kx}_{g,h} L^x_{gh,k}
    """
    worst = 0.0
    for g, h, k in itertools.product(group.elements(), repeat=3):
        for x in labels:
            lhs = L[(g, group.op(h, k), x)] * L[(h, k, x)]
            rhs = (omega[(g, h, k)] * L[(g, h, action[k][x])]
                   * L[(group.op(g, h), k, x)])
            worst = max(worst, abs(lhs - rhs))
    if worst > tol:
        raise NotACocycle(
            f"L/omega compatibility violated by {worst:.3e}")
    return worst
