"""Group-cohomology computations over roots of unity.

Phases are snapped to roots of unity and handled additively as integer
exponent vectors mod n.  Linear questions (is this cocycle a coboundary?
does a cocycle on a subgroup extend?) become integer linear systems solved
through the Smith normal form.  Strictly positive cocycles are trivialized
separately in log space, where the problem is ordinary least squares.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import NoSolution, NotARoot
from .groups import PhaseTable

DEFAULT_MAX_ORDER = 720


def snap_to_root(z, max_order=DEFAULT_MAX_ORDER, tol=1e-7):
    """Snap a unimodular complex number to exp(2 pi i p / q).

    Returns the fraction p/q in lowest terms with 0 <= p < q <= max_order.
    Raises NotARoot when no admissible root is within tolerance.
    """
    if abs(abs(z) - 1.0) > 1e-6:
        raise NotARoot(f"|z| = {abs(z):.6f} is not unimodular")
    angle = math.atan2(z.imag, z.real) / (2 * math.pi) % 1.0
    frac = Fraction(angle).limit_denominator(max_order)
    snapped = math.e ** 0j  # placeholder to keep complex type
    snapped = complex(math.cos(2 * math.pi * float(frac)),
                      math.sin(2 * math.pi * float(frac)))
    if abs(snapped - z) > tol:
        raise NotARoot(
            f"phase {angle:.9f} not within {tol:.1e} of a root of order "
            f"<= {max_order}")
    p = frac.numerator % frac.denominator
    return p, frac.denominator


# ----------------------------------------------------------------------
# integer linear algebra
# ----------------------------------------------------------------------
def smith_normal_form(a):
    """Smith normal form with transforms: returns (u, s, v) with u a v = s.

    ``u`` and ``v`` are unimodular integer matrices; ``s`` is diagonal with
    s[i, i] dividing s[i+1, i+1].  Uses Python ints throughout to avoid
    overflow.
    """
    s = [[int(x) for x in row] for row in np.asarray(a)]
    m = len(s)
    n = len(s[0]) if m else 0
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    v = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        s[i], s[j] = s[j], s[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in s:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(i, j, c):
        # row_i += c * row_j
        s[i] = [x + c * y for x, y in zip(s[i], s[j])]
        u[i] = [x + c * y for x, y in zip(u[i], u[j])]

    def add_col(i, j, c):
        for row in s:
            row[i] += c * row[j]
        for row in v:
            row[i] += c * row[j]

    def negate_row(i):
        s[i] = [-x for x in s[i]]
        u[i] = [-x for x in u[i]]

    def clear_block(t):
        """Reduce block (t..) until s[t][t] divides everything below/right
        on its row and column, clearing them to zero."""
        while True:
            # pivot: nonzero entry of least magnitude in the block
            piv = None
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if s[i][j] != 0 and (best is None
                                         or abs(s[i][j]) < best):
                        best = abs(s[i][j])
                        piv = (i, j)
            if piv is None:
                return False
            swap_rows(t, piv[0])
            swap_cols(t, piv[1])
            dirty = False
            for i in range(t + 1, m):
                if s[i][t] != 0:
                    add_row(i, t, -(s[i][t] // s[t][t]))
                    if s[i][t] != 0:
                        dirty = True
            for j in range(t + 1, n):
                if s[t][j] != 0:
                    add_col(j, t, -(s[t][j] // s[t][t]))
                    if s[t][j] != 0:
                        dirty = True
            if dirty:
                continue
            # row and column are clear; check the pivot divides the rest
            offender = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if s[i][j] % s[t][t] != 0:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                if s[t][t] < 0:
                    negate_row(t)
                return True
            add_row(t, offender, 1)

    t = 0
    while t < min(m, n):
        if not clear_block(t):
            break
        t += 1
    return u, s, v


@dataclass
class ModNSystem:
    """The linear system A x = b (mod n), rows tagged for diagnostics."""

    n: int
    rows: list = field(default_factory=list)
    rhs: list = field(default_factory=list)
    tags: list = field(default_factory=list)
    num_vars: int = 0

    def add_row(self, coeffs, b, tag=""):
        """``coeffs`` is a dict {var index: integer coefficient}."""
        self.rows.append(dict(coeffs))
        self.rhs.append(int(b) % self.n)
        self.tags.append(tag)
        if coeffs:
            self.num_vars = max(self.num_vars, max(coeffs) + 1)

    def matrix(self):
        a = [[0] * self.num_vars for _ in self.rows]
        for i, row in enumerate(self.rows):
            for j, c in row.items():
                a[i][j] = int(c) % self.n
        return a


def smith_solve(system):
    """Solve A x = b (mod n) via the Smith normal form.

    Writes A = U^-1 S V^-1, turns the system into the diagonal problem
    S w = U b (mod n) and solves each scalar congruence by extended gcd.
    Returns one solution vector (list of ints in [0, n)), or raises
    NoSolution naming a diagnosed constraint.
    """
    n = system.n
    a = system.matrix()
    m = len(a)
    k = system.num_vars
    if m == 0 or k == 0:
        if any(b % n for b in system.rhs):
            raise NoSolution(f"inconsistent empty system mod {n}")
        return [0] * k
    u, s, v = smith_normal_form(a)
    b = system.rhs
    ub = [sum(u[i][j] * b[j] for j in range(m)) % n for i in range(m)]
    r = min(m, k)
    w = [0] * k
    for i in range(m):
        d = (s[i][i] % n) if i < r else 0
        rhs = ub[i]
        if d == 0:
            if rhs != 0:
                raise NoSolution(
                    f"inconsistent system mod {n}: zero row with rhs {rhs} "
                    f"(tags sample: {system.tags[:2]})")
            continue
        g = math.gcd(d, n)
        if rhs % g != 0:
            raise NoSolution(
                f"inconsistent system mod {n}: {rhs} not divisible by "
                f"gcd({d}, {n}) = {g}")
        w[i] = (rhs // g) * pow(d // g, -1, n // g) % (n // g)
    x = [sum(v[i][j] * w[j] for j in range(k)) % n for i in range(k)]
    # verify
    for i, row in enumerate(system.rows):
        acc = sum(c * x[j] for j, c in row.items()) % n
        if acc != system.rhs[i] % n:
            raise NoSolution(
                f"solver self-check failed on row {i} ({system.tags[i]})")
    return x


def kernel_basis(system):
    """Generators of {x : A x = 0 (mod n)} as vectors mod n.

    With A = U^-1 S V^-1 the solutions are x = V w where each w_i ranges
    over multiples of n / gcd(s_i, n) (free when s_i vanishes); the columns
    of V scaled accordingly generate the solution module.
    """
    n = system.n
    a = system.matrix()
    m = len(a)
    k = system.num_vars
    if m == 0:
        return [[1 if j == i else 0 for j in range(k)] for i in range(k)]
    u, s, v = smith_normal_form(a)
    gens = []
    for j in range(k):
        d = s[j][j] if j < min(m, k) else 0
        step = n // math.gcd(d % n, n) if d % n else 1
        vec = [(v[i][j] * step) % n for i in range(k)]
        if any(vec):
            gens.append(vec)
    return gens


# ----------------------------------------------------------------------
# cocycle trivialization over roots of unity
# ----------------------------------------------------------------------
def _exponentize(group, table, keys, max_order):
    """Snap every phase to a root; return (exponents dict, common modulus n).

    Exponents are expressed in units of 2 pi / n with
    n = lcm(|G|, all snapped denominators).
    """
    fracs = {}
    n = group.order
    for key in keys:
        p, q = snap_to_root(table[key], max_order=max_order)
        fracs[key] = (p, q)
        n = n * q // math.gcd(n, q)
    return {k: (p * (n // q)) % n for k, (p, q) in fracs.items()}, n


def trivialize_3cocycle(group, omega, max_order=DEFAULT_MAX_ORDER,
                        normalized_gauge=True):
    """Decide whether a 3-cocycle is a coboundary; return beta or raise.

    Solves omega(g,h,k) = beta(h,k) beta(g,hk) / (beta(gh,k) beta(g,h))
    over roots of unity.  With ``normalized_gauge`` the solution is
    constrained to beta(g,e) = beta(e,g) = beta(g, g^-1) = 1, the gauge
    freedom left to fusion tensors after their end-point normalization.

    Returns (beta PhaseTable, n) on success; raises NoSolution when the
    class is nontrivial (the symmetry is anomalous).
    """
    G = list(group.elements())
    keys = list(itertools.product(G, repeat=3))
    exps, n = _exponentize(group, omega, keys, max_order)
    idx = {(g, h): i for i, (g, h) in
           enumerate(itertools.product(G, repeat=2))}
    sys_ = ModNSystem(n)
    sys_.num_vars = len(idx)
    for g, h, k in keys:
        coeffs = {}
        for key, sign in (((h, k), 1), ((g, group.op(h, k)), 1),
                          ((group.op(g, h), k), -1), ((g, h), -1)):
            coeffs[idx[key]] = coeffs.get(idx[key], 0) + sign
        sys_.add_row(coeffs, exps[(g, h, k)], tag=f"d beta = omega {g},{h},{k}")
    if normalized_gauge:
        for g in G:
            sys_.add_row({idx[(g, 0)]: 1}, 0, tag=f"beta({g},e)=1")
            sys_.add_row({idx[(0, g)]: 1}, 0, tag=f"beta(e,{g})=1")
            sys_.add_row({idx[(g, group.inv[g])]: 1}, 0,
                         tag=f"beta({g},{g}^-1)=1")
    x = smith_solve(sys_)
    beta = PhaseTable()
    for (g, h), i in idx.items():
        beta[(g, h)] = complex(math.cos(2 * math.pi * x[i] / n),
                               math.sin(2 * math.pi * x[i] / n))
    return beta, n


def is_coboundary_3(group, omega, max_order=DEFAULT_MAX_ORDER,
                    normalized_gauge=True):
    try:
        trivialize_3cocycle(group, omega, max_order, normalized_gauge)
        return True
    except NoSolution:
        if normalized_gauge:
            # the normalized gauge is always reachable for trivial classes,
            # but fall back to the unconstrained system to be safe
            try:
                trivialize_3cocycle(group, omega, max_order, False)
                return True
            except NoSolution:
                return False
        return False


def trivialize_2cocycle(group, psi, max_order=DEFAULT_MAX_ORDER):
    """Write a 2-cocycle as a coboundary psi(g,h) = f(g) f(h) / f(gh).

    Returns (f PhaseTable keyed by g, n) or raises NoSolution.
    """
    G = list(group.elements())
    keys = list(itertools.product(G, repeat=2))
    exps, n = _exponentize(group, psi, keys, max_order)
    sys_ = ModNSystem(n)
    sys_.num_vars = group.order
    for g, h in keys:
        coeffs = {}
        for key, sign in ((g, 1), (h, 1), (group.op(g, h), -1)):
            coeffs[key] = coeffs.get(key, 0) + sign
        sys_.add_row(coeffs, exps[(g, h)], tag=f"d f = psi {g},{h}")
    x = smith_solve(sys_)
    f = PhaseTable()
    for g in G:
        f[(g,)] = complex(math.cos(2 * math.pi * x[g] / n),
                          math.sin(2 * math.pi * x[g] / n))
    return f, n


def extend_2cocycle(group, subgroup_elements, psi,
                    max_order=DEFAULT_MAX_ORDER, multiplier=1):
    """Extend a 2-cocycle psi on a subgroup H to the whole group.

    Seeks a 2-cocycle Psi on G and a 1-cochain phi on H with
    Psi|_H = psi * d phi, as a single linear system mod n.  Returns
    (Psi PhaseTable, n) or raises NoSolution — the latter is the
    block-independence obstruction.  ``multiplier`` enlarges the working
    modulus, admitting extensions whose values need finer roots than psi
    itself.
    """
    G = list(group.elements())
    H = sorted(subgroup_elements)
    hkeys = list(itertools.product(H, repeat=2))
    exps, n = _exponentize(group, psi, hkeys, max_order)
    if multiplier != 1:
        n *= multiplier
        exps = {k: v * multiplier for k, v in exps.items()}
    # variables: Psi(g,h) for all g,h in G, then phi(h) for h in H
    idx = {(g, h): i for i, (g, h) in
           enumerate(itertools.product(G, repeat=2))}
    base = len(idx)
    phi_idx = {h: base + i for i, h in enumerate(H)}
    sys_ = ModNSystem(n)
    sys_.num_vars = base + len(H)
    # cocycle condition on G
    for g, h, k in itertools.product(G, repeat=3):
        coeffs = {}
        for key, sign in (((g, h), 1), ((group.op(g, h), k), 1),
                          ((h, k), -1), ((g, group.op(h, k)), -1)):
            coeffs[idx[key]] = coeffs.get(idx[key], 0) + sign
        sys_.add_row(coeffs, 0, tag=f"d Psi = 1 at {g},{h},{k}")
    # restriction condition on H
    for h1, h2 in hkeys:
        coeffs = {idx[(h1, h2)]: 1}
        for key, sign in ((h1, -1), (h2, -1), (group.op(h1, h2), 1)):
            coeffs[phi_idx[key]] = coeffs.get(phi_idx[key], 0) + sign
        sys_.add_row(coeffs, exps[(h1, h2)],
                     tag=f"Psi|H = psi d phi at {h1},{h2}")
    x = smith_solve(sys_)
    Psi = PhaseTable()
    for (g, h), i in idx.items():
        Psi[(g, h)] = complex(math.cos(2 * math.pi * x[i] / n),
                              math.sin(2 * math.pi * x[i] / n))
    return Psi, n


def cocycle_classes_2(group, n, cap=4096):
    """All classes of Z^2(G, Z_n) / B^2(G, Z_n) as exponent vectors.

    Enumerates the quotient by BFS over kernel generators of the cocycle
    condition modulo coboundaries.  Used as the brute-force cross-check of
    extension (im)possibility.  Raises NoSolution if the quotient exceeds
    ``cap`` classes.
    """
    G = list(group.elements())
    idx = {(g, h): i for i, (g, h) in
           enumerate(itertools.product(G, repeat=2))}
    sys_ = ModNSystem(n)
    sys_.num_vars = len(idx)
    for g, h, k in itertools.product(G, repeat=3):
        coeffs = {}
        for key, sign in (((g, h), 1), ((group.op(g, h), k), 1),
                          ((h, k), -1), ((g, group.op(h, k)), -1)):
            coeffs[idx[key]] = coeffs.get(idx[key], 0) + sign
        sys_.add_row(coeffs, 0)
    gens = kernel_basis(sys_)
    # coboundary generators: for each f-basis vector e_g, d e_g
    cob = []
    for g0 in G:
        vec = [0] * len(idx)
        for (g, h), i in idx.items():
            s = (1 if g == g0 else 0) + (1 if h == g0 else 0) \
                - (1 if group.op(g, h) == g0 else 0)
            vec[i] = s % n
        cob.append(vec)

    def reduce_mod_cob(vec):
        # canonical representative modulo the coboundary lattice: solve a
        # small system to subtract the closest coboundary is overkill; use
        # BFS over classes with tuples as identifiers instead.
        return tuple(v % n for v in vec)

    # close the coboundary subgroup first
    zero = tuple([0] * len(idx))
    cob_set = {zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for v in frontier:
            for c in cob:
                w = tuple((a + b) % n for a, b in zip(v, c))
                if w not in cob_set:
                    if len(cob_set) >= cap * 64:
                        raise NoSolution("coboundary subgroup too large")
                    cob_set.add(w)
                    nxt.append(w)
        frontier = nxt

    def class_id(vec):
        return min(tuple((a + b) % n for a, b in zip(vec, c))
                   for c in cob_set)

    classes = {class_id([0] * len(idx)): [0] * len(idx)}
    frontier = list(classes.values())
    while frontier:
        nxt = []
        for v in frontier:
            for gvec in gens:
                w = [(a + b) % n for a, b in zip(v, gvec)]
                cid = class_id(w)
                if cid not in classes:
                    if len(classes) >= cap:
                        raise NoSolution("cohomology quotient too large")
                    classes[cid] = w
                    nxt.append(w)
        frontier = nxt
    return list(classes.values()), idx


def trivialize_positive_2cocycle(group, labels, action, eta):
    """Split a strictly positive label-indexed 2-cocycle as a coboundary.

    ``eta`` maps (g, h, x) -> positive real with the twisted condition
    eta^x_{g,hk} eta^x_{h,k} = eta^{kx}_{g,h} eta^x_{gh,k}.  Returns a
    positive table chi(g, x) with eta^x_{g,h} = chi^{hx}_g chi^x_h / chi^x_{gh}
    obtained by least squares in log space; positivity of cocycles makes the
    system exactly solvable, which is verified and enforced.
    """
    G = list(group.elements())
    var = {(g, x): i for i, (g, x) in
           enumerate(itertools.product(G, labels))}
    rows, rhs = [], []
    for g, h in itertools.product(G, repeat=2):
        for x in labels:
            row = np.zeros(len(var))
            row[var[(g, action[h][x])]] += 1
            row[var[(h, x)]] += 1
            row[var[(group.op(g, h), x)]] -= 1
            rows.append(row)
            rhs.append(math.log(float(eta[(g, h, x)])))
    a = np.array(rows)
    b = np.array(rhs)
    sol, *_ = np.linalg.lstsq(a, b, rcond=None)
    resid = float(np.max(np.abs(a @ sol - b)))
    if resid > 1e-7:
        raise NoSolution(
            f"positive cocycle is not a coboundary (residual {resid:.3e})")
    chi = PhaseTable()
    for (g, x), i in var.items():
        chi[(g, x)] = math.exp(sol[i])
    return chi


def determinant_trivialization(group, omega2):
    """Explicit witness that the |G|-th power of a 2-cocycle is a coboundary.

    For a 2-cocycle Omega on G, the function chi(g) = det X_g with
    X_g |h> = Omega(g, h) |gh> satisfies d chi = Omega^{|G|}.  Returns the
    chi PhaseTable; used as an independent oracle for the linear solver.
    """
    n = group.order
    chi = PhaseTable()
    for g in group.elements():
        x = np.zeros((n, n), dtype=complex)
        for h in group.elements():
            x[group.op(g, h), h] = omega2[(g, h)]
        chi[(g,)] = complex(np.linalg.det(x))
    return chi
