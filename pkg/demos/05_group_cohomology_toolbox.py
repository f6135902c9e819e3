"""The finite-group cohomology machinery behind the symmetry invariants.

Deciding whether a 3-cocycle is a coboundary, trivializing 2-cocycles,
and extending a subgroup 2-cocycle to the full group are all finite
linear problems over roots of unity; they reduce to integer linear
systems solved by the Smith normal form.
"""

import numpy as np

from mpugauge import Group, build_rep, compute_omega, get_model
from mpugauge.cohomology import (NoSolution, cocycle_classes_2,
                                 extend_2cocycle, is_coboundary_3,
                                 trivialize_3cocycle)

# 1. The cube of any extracted 3-cocycle phase table is a coboundary for
#    the groups here (|G| annihilates H^3), and trivialization finds the
#    explicit 2-cochain.
rep = build_rep(get_model("czx"))
omega = compute_omega(rep)
group = rep.group
power = {k: v ** group.order for k, v in omega.values.items()}
print(f"omega(g,g,g) = {omega[(1, 1, 1)].real:+.0f}; "
      f"omega^|G| coboundary: {is_coboundary_3(group, power)}")
print(f"omega itself a coboundary: {is_coboundary_3(group, omega)}")

# 2. H^2(Z2 x Z2, U(1)) = Z2: two classes, detected by the discrete
#    invariant of each representative.
g22 = Group.direct_product(Group.cyclic(2), Group.cyclic(2))
classes = cocycle_classes_2(g22, 2)
print(f"\n2-cocycle classes of Z2 x Z2 over {{+1,-1}}: {len(classes)}")

# 3. The anticommutation cocycle of the Z2 x Z2 inside Z4 x Z2 does not
#    extend: the obstruction behind a block-dependent gauging example.
z4z2 = Group.direct_product(Group.cyclic(4), Group.cyclic(2))
sub = [g for g in z4z2.elements()
       if z4z2.op(g, g) == 0]          # the Z2 x Z2 of involutions
sub = sorted(sub)
i2 = {e: k for k, e in enumerate(sub)}
psi = {}
for a in sub:
    for b in sub:
        # the nontrivial class on Z2 x Z2: a sign bilinear in the labels
        psi[(a, b)] = (-1.0 + 0j) ** (i2[a] % 2 * (i2[b] // 2))
try:
    extend_2cocycle(z4z2, sub, psi)
    print("extends (unexpected)")
except NoSolution:
    print("the nontrivial 2-cocycle of the involution subgroup admits no "
          "extension to Z4 x Z2")
