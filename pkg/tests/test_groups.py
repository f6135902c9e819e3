import numpy as np
import pytest
from hypothesis import given, strategies as st

from mpugauge.errors import NotACocycle, NotAGroup
from mpugauge.groups import (Group, PhaseTable, check_2cocycle,
                             check_3cocycle)


@given(st.integers(min_value=1, max_value=12))
def test_cyclic_group_axioms(n):
    g = Group.cyclic(n)
    assert g.order == n
    for a in g.elements():
        assert g.op(a, g.inv[a]) == 0
        assert g.op(0, a) == a
    for a in g.elements():
        for b in g.elements():
            assert g.op(a, b) == (a + b) % n


def test_direct_product():
    g = Group.direct_product(Group.cyclic(4), Group.cyclic(2))
    assert g.order == 8
    orders = sorted(g.element_order(a) for a in g.elements())
    assert orders == [1, 2, 2, 2, 4, 4, 4, 4]


def test_from_permutations_symmetric_group():
    s3 = Group.from_permutations([(1, 0, 2), (0, 2, 1)])
    assert s3.order == 6
    # S3 is nonabelian
    assert any(s3.op(a, b) != s3.op(b, a)
               for a in s3.elements() for b in s3.elements())


def test_invalid_table_rejected():
    with pytest.raises(NotAGroup):
        Group([[0, 1], [1, 1]])


def test_element_order_divides_group_order():
    g = Group.direct_product(Group.cyclic(2), Group.cyclic(3))
    for a in g.elements():
        assert g.order % g.element_order(a) == 0


def test_check_action():
    g = Group.cyclic(2)
    g.check_action([[0, 1], [1, 0]], 2)
    with pytest.raises(Exception):
        g.check_action([[0, 1], [0, 1]], 2)


def test_stabilizer_and_cosets():
    g = Group.cyclic(4)
    action = [[x for x in range(2)], [1, 0], [0, 1], [1, 0]]
    stab = g.stabilizer(action, 0)
    assert sorted(stab) == [0, 2]
    reps = g.coset_representatives(action, 0)
    assert len(reps) == 2


def test_phase_table_json_round_trip():
    t = PhaseTable()
    t[(0, 1)] = 1j
    t[(1, 1)] = -1.0 + 0j
    t2 = PhaseTable.from_json_dict(t.to_json_dict())
    assert set(t2.values) == set(t.values)
    for k, v in t.values.items():
        assert abs(t2[k] - v) < 1e-15


def test_unimodular_residual():
    t = PhaseTable()
    t[(0,)] = np.exp(0.3j)
    assert t.unimodular_residual() < 1e-12
    t[(1,)] = 1.5
    assert t.unimodular_residual() > 0.4


def test_cocycle_checks():
    g = Group.cyclic(2)
    omega = {k: 1.0 + 0j for k in
             [(a, b, c) for a in range(2) for b in range(2)
              for c in range(2)]}
    omega[(1, 1, 1)] = -1.0 + 0j
    check_3cocycle(g, omega)  # the CZX class satisfies the condition
    bad = dict(omega)
    bad[(1, 1, 0)] = -1.0 + 0j
    with pytest.raises(NotACocycle):
        check_3cocycle(g, bad)
    psi = {(a, b): (-1.0 + 0j) ** (a * b) for a in range(2)
           for b in range(2)}
    check_2cocycle(g, psi)
