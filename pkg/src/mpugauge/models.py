"""Built-in worked examples and random instances.

Each constructor returns a :class:`ModelSpec` bundling the group, its action
on the MPS blocks, the MPU tensors of the symmetry representation, the
invariant MPS, and a table of expected analysis results used by the test
suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .groups import Group
from .errors import NotInjective
from .mps import BlockMps
from .mpu import Mpu

I2 = np.eye(2, dtype=complex)
PX = np.array([[0, 1], [1, 0]], dtype=complex)
PY = np.array([[0, -1j], [1j, 0]], dtype=complex)
PZ = np.array([[1, 0], [0, -1]], dtype=complex)
H2 = np.array([[1, 1], [1, -1]], dtype=complex)  # sqrt(2) * Hadamard
CZ = np.diag([1, 1, 1, -1]).astype(complex)
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0],
                 [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


@dataclass
class ModelSpec:
    """A group symmetry acting on an invariant MPS by MPUs."""

    name: str
    group: Group
    mpus: dict                      # g -> Mpu
    mps: BlockMps
    action: list                    # action[g][x] on block labels
    expected: dict = field(default_factory=dict)
    onsite: dict | None = None      # g -> unitary matrix, if onsite
    virtual_rep: dict | None = None  # g -> S_g on the bond, if onsite
    virtual_cocycle: dict | None = None  # (g, h) -> Omega(g, h)

    def to_json_dict(self):
        return {
            "name": self.name,
            "group": self.group.to_json_dict(self.action),
            "mpus": {str(g): m.to_json_dict() for g, m in self.mpus.items()},
            "mps": self.mps.to_json_dict(),
        }


def _onsite_mpu(u):
    """Bond-1 MPU tensor from an onsite unitary."""
    return Mpu(np.asarray(u, dtype=complex)[None, None, :, :]
               .transpose(0, 1, 2, 3).copy()
               .reshape(1, 1, u.shape[0], u.shape[1]))


def kron(*ops):
    out = np.array([[1.0 + 0j]])
    for o in ops:
        out = np.kron(out, o)
    return out


def onsite_model(group, u_table, s_table=None, omega=None, mps=None,
                 name="onsite", action=None):
    """Model with an onsite unitary representation u_g.

    ``s_table`` optionally provides virtual operators S_g with
    S_g S_h = Omega(g, h) S_{gh}; ``omega`` is that 2-cocycle table.
    ``action`` defaults to the trivial permutation of blocks.
    """
    mpus = {g: _onsite_mpu(u_table[g]) for g in group.elements()}
    if mps is None:
        raise ValueError("onsite_model needs an invariant MPS")
    if action is None:
        action = [[x for x in range(mps.num_blocks)]
                  for _ in group.elements()]
    return ModelSpec(name=name, group=group, mpus=mpus, mps=mps,
                     action=action, onsite=dict(u_table),
                     virtual_rep=dict(s_table) if s_table else None,
                     virtual_cocycle=dict(omega) if omega else None)


def onsite_z2_cluster_like():
    """Z2 acting by X on each site of a simple injective invariant MPS.

    The MPS tensor intertwines the physical X with a virtual X, giving a
    trivial virtual 2-cocycle.
    """
    group = Group.cyclic(2)
    u = {0: I2, 1: PX}
    s = {0: I2, 1: PX}
    om = {(g, h): 1.0 + 0j for g in range(2) for h in range(2)}
    # A^p = M^p with X M^0 X-conj = M^1: pick M^0 = 1 + 0.4 Z, M^1 = X M^0 X
    m0 = I2 + 0.4 * PZ + 0.2 * PX
    m1 = PX @ m0 @ PX
    a = np.stack([m0, m1])
    mps = BlockMps([a])
    spec = onsite_model(group, u, s, om, mps, name="onsite-z2")
    spec.expected = {"sigma": {1: 1.0}, "bi": True,
                     "projectors_commute": True}
    return spec


def onsite_z2z2_cluster():
    """Z2 x Z2 cluster-like model: virtual Pauli representation with a
    nontrivial 2-cocycle (the nontrivial SPT phase).

    Elements are encoded (a, b) -> 2a + b; u_(a,b) acts on a two-qubit site
    as X^a (x) X^b, and the virtual operators are the Paulis Z^a X^b whose
    commutation produces Omega.
    """
    z2 = Group.cyclic(2)
    group = Group.direct_product(z2, z2)
    u = {}
    s = {}
    for e in group.elements():
        a, b = divmod(e, 2)
        u[e] = kron(np.linalg.matrix_power(PX, a),
                    np.linalg.matrix_power(PX, b))
        s[e] = np.linalg.matrix_power(PZ, a) @ np.linalg.matrix_power(PX, b)
    om = {}
    for g in group.elements():
        for h in group.elements():
            gh = group.op(g, h)
            prod = s[g] @ s[h]
            om[(g, h)] = complex(np.vdot(s[gh], prod) / 2.0)
    # cluster-state chain blocked in pairs: T^{ij} = M^i H2 M^j H2 with the
    # copy-tensor matrices M^i; satisfies u_g T = S_g T S_g^dagger
    m = [np.diag([1.0, 0.0]).astype(complex),
         np.diag([0.0, 1.0]).astype(complex)]
    ts = []
    for i in range(2):
        for j in range(2):
            ts.append(m[i] @ H2 @ m[j] @ H2)
    mps = BlockMps([np.stack(ts)])
    spec = onsite_model(group, u, s, om, mps, name="onsite-z2z2-cluster")
    spec.expected = {"bi": True, "projectors_commute": True,
                     "virtual_cocycle_nontrivial": True}
    return spec


def onsite_z3_random(seed=7):
    """Z3 with a random onsite representation and a symmetrized injective
    invariant MPS; deterministic per seed."""
    group = Group.cyclic(3)
    rng = np.random.default_rng(seed)
    d, dd = 3, 3
    w = np.exp(2j * np.pi / 3)
    for attempt in range(20):
        qp, _ = np.linalg.qr(rng.normal(size=(d, d))
                             + 1j * rng.normal(size=(d, d)))
        qv, _ = np.linalg.qr(rng.normal(size=(dd, dd))
                             + 1j * rng.normal(size=(dd, dd)))
        phys_ch = rng.integers(0, 3, d)
        virt_ch = rng.integers(0, 3, dd)
        u = {g: qp @ np.diag(w ** (g * phys_ch)) @ qp.conj().T
             for g in range(3)}
        s = {g: qv @ np.diag(w ** (g * virt_ch)) @ qv.conj().T
             for g in range(3)}
        a0 = rng.normal(size=(d, dd, dd)) + 1j * rng.normal(size=(d, dd, dd))
        a = np.zeros_like(a0)
        for g in range(3):
            a += np.einsum("qp,plr->qlr",
                           u[g], np.einsum("ab,pbc,cd->pad",
                                           s[g].conj().T, a0, s[g])) / 3.0
        mps = BlockMps([a])
        if mps.is_injective() or mps.block_sites(2).is_injective():
            om = {(g, h): 1.0 + 0j for g in range(3) for h in range(3)}
            spec = onsite_model(group, u, s, om, mps,
                                name="onsite-z3-random")
            spec.expected = {"bi": True, "projectors_commute": True}
            return spec
        rng = np.random.default_rng(seed + 1000 + attempt)
    raise RuntimeError("failed to build an injective symmetrized MPS")


def cz_z2_model():
    """Z2 generated by the product of controlled-Z gates on all bonds.

    The generator is a diagonal bond-2 MPU; the invariant MPS and its defect
    partner are given by explicit 3 x 3 matrices, and the expected Gauss law
    is CZ (x) X (x) X.
    """
    group = Group.cyclic(2)
    ucz = np.zeros((2, 2, 2, 2), dtype=complex)
    for l in range(2):
        for i in range(2):
            ucz[l, i, i, i] = (-1.0) ** (l * i)
    mpus = {0: _onsite_mpu(I2), 1: Mpu(ucz)}
    a = np.array([
        [[1, 0, 0], [0, 0, 0], [0, 1, 1]],
        [[0, 1, -1], [-1, 0, 0], [0, 0, 0]],
    ], dtype=complex)
    a_g = np.array([
        [[0, -1, -1], [0, 0, 0], [-1, 0, 0]],
        [[1, 0, 0], [0, -1, 1], [0, 0, 0]],
    ], dtype=complex)
    mps = BlockMps([a])
    spec = ModelSpec(name="cz-z2", group=group, mpus=mpus, mps=mps,
                     action=[[0], [0]])
    spec.expected = {
        "defect_matrices": a_g,
        "gauss_law": kron(CZ, PX, PX),  # (matter1, matter2, gaugeL, gaugeR)
        "bi": True,
        "projectors_commute": True,
    }
    return spec


def czx_mpu_tensor():
    """The anomalous Z2 generator on two-qubit sites.

    Per site (qubits o1 o2 / i1 i2, bond l r):
      U[l, r, (o1 o2), (i1 i2)] = delta_{o1, 1-i1} delta_{o2, 1-i2}
          delta_{l, o1} (-1)^(o1 + o2 + o1 o2) (-1)^(o2 r)
    i.e. an X layer, internal controlled-Z structure tied to the bonds, and
    a Z layer.
    """
    u = np.zeros((2, 2, 4, 4), dtype=complex)
    for l in range(2):
        for r in range(2):
            for i1 in range(2):
                for i2 in range(2):
                    o1, o2 = 1 - i1, 1 - i2
                    if l != o1:
                        continue
                    ph = (-1.0) ** (o1 + o2 + o1 * o2) * (-1.0) ** (o2 * r)
                    u[l, r, 2 * o1 + o2, 2 * i1 + i2] = ph
    return u


def czx_model():
    """The anomalous Z2 model: sigma = -1, omega(g,g,g) = -1.

    The invariant state is the two-block GHZ state on two-qubit sites
    (blocks |00> and |11>).
    """
    group = Group.cyclic(2)
    mpus = {0: _onsite_mpu(np.eye(4)), 1: Mpu(czx_mpu_tensor())}
    b0 = np.zeros((4, 1, 1), dtype=complex)
    b0[0, 0, 0] = 1.0
    b1 = np.zeros((4, 1, 1), dtype=complex)
    b1[3, 0, 0] = 1.0
    mps = BlockMps([b0, b1])
    spec = ModelSpec(name="czx", group=group, mpus=mpus, mps=mps,
                     action=[[0, 1], [1, 0]])
    spec.expected = {
        "sigma": {1: -1.0},
        "omega_ggg": -1.0,
        "L": {(1, 1, 0): -1.0, (1, 1, 1): 1.0},
        "bi": False,
        "projectors_commute": False,
        "lambda_tilde_correction": "Z1",
    }
    return spec


def ghz_cluster_z4z2_model():
    """Z4 x Z2 onsite symmetry of GHZ (x) blocked-cluster, two blocks.

    Site = (GHZ qubit, cluster qubit A, cluster qubit B), d = 8.  Group
    elements (a, b) are encoded as 2a + b.  Generators:
    U_(1,0) = (X_1 x X_2) CNOT_{1->2}, U_(0,1) = X_3.  The stabilizer of a
    block is H = {(a, b) : a even} = Z2 x Z2, carrying a nontrivial
    2-cocycle that does not extend to the full group, so the model is not
    block independent.
    """
    z4, z2 = Group.cyclic(4), Group.cyclic(2)
    group = Group.direct_product(z4, z2)
    g10 = kron(PX, PX, I2) @ kron(CNOT, I2)
    g01 = kron(I2, I2, PX)
    u = {}
    for e in group.elements():
        a, b = divmod(e, 2)
        u[e] = (np.linalg.matrix_power(g10, a)
                @ np.linalg.matrix_power(g01, b))
    mpus = {e: _onsite_mpu(u[e]) for e in group.elements()}
    # action on blocks: U_(1,0) flips the GHZ qubit
    action = []
    for e in group.elements():
        a, b = divmod(e, 2)
        action.append([(x + a) % 2 for x in range(2)])
    # cluster chain blocked in pairs (bond 2), tensored with the GHZ label
    m = [np.diag([1.0, 0.0]).astype(complex),
         np.diag([0.0, 1.0]).astype(complex)]
    blocks = []
    for x in range(2):
        ts = []
        for q in range(2):
            for i in range(2):
                for j in range(2):
                    if q == x:
                        ts.append(m[i] @ H2 @ m[j] @ H2)
                    else:
                        ts.append(np.zeros((2, 2), dtype=complex))
        blocks.append(np.stack(ts))
    mps = BlockMps(blocks)
    spec = ModelSpec(name="ghz-cluster-z4z2", group=group, mpus=mpus,
                     mps=mps, action=action, onsite=u)
    spec.expected = {
        "bi": False,
        "L_values": {1.0, -1.0, 1.0j, -1.0j},
        "action_gamma_x0": {2: PX, 1: PZ, 3: PY},  # elements (2,0),(0,1),(1,1)... keyed by encoding
        "standard_law_fails": True,
        "modified_projectors_commute": False,
    }
    return spec


def random_instance(seed, group=None, d=3, bond=3):
    """Random onsite representation with a symmetrized injective invariant
    MPS; deterministic per seed."""
    if group is None:
        group = Group.cyclic(3)
    rng = np.random.default_rng(seed)
    n = group.order
    for attempt in range(20):
        # random unitary 1d-character representations conjugated randomly
        qp, _ = np.linalg.qr(rng.normal(size=(d, d))
                             + 1j * rng.normal(size=(d, d)))
        qv, _ = np.linalg.qr(rng.normal(size=(bond, bond))
                             + 1j * rng.normal(size=(bond, bond)))
        # regular-representation blocks conjugated by random unitaries
        u = {}
        s = {}
        for g in range(n):
            # permutation representation from group multiplication, padded
            up = np.zeros((d, d), dtype=complex)
            sv = np.zeros((bond, bond), dtype=complex)
            if d >= n:
                for j in range(d):
                    if j < n:
                        up[group.op(g, j), j] = 1.0
                    else:
                        up[j, j] = 1.0
            else:
                up = np.eye(d, dtype=complex)
            for j in range(bond):
                if j < n and bond >= n:
                    sv[group.op(g, j), j] = 1.0
                else:
                    sv[j, j] = 1.0
            u[g] = qp @ up @ qp.conj().T
            s[g] = qv @ sv @ qv.conj().T
        a0 = (rng.normal(size=(d, bond, bond))
              + 1j * rng.normal(size=(d, bond, bond)))
        a = np.zeros_like(a0)
        for g in range(n):
            a += np.einsum("qp,plr->qlr", u[g],
                           np.einsum("ab,pbc,cd->pad",
                                     s[g].conj().T, a0, s[g])) / n
        mps = BlockMps([a])
        try:
            blockable = bool(mps.ensure_injective(max_blocking=2))
        except NotInjective:
            blockable = False
        if blockable and float(np.linalg.norm(a)) > 1e-3:
            om = {(g, h): 1.0 + 0j for g in range(n) for h in range(n)}
            spec = onsite_model(group, u, s, om, mps,
                                name=f"random-{seed}")
            spec.expected = {"bi": True, "projectors_commute": True}
            return spec
        rng = np.random.default_rng(seed + 1000 + attempt)
    raise RuntimeError("failed to build a random injective instance")


def ghz_z2_model():
    """GHZ state with the onsite Z2 flip: two injective blocks swapped by
    the symmetry (maximal symmetry breaking: only e fixes a block)."""
    group = Group.cyclic(2)
    u = {0: I2, 1: PX}
    b0 = np.array([[[1.0 + 0j]], [[0.0]]])
    b1 = np.array([[[0.0 + 0j]], [[1.0]]])
    mps = BlockMps([b0, b1])
    spec = onsite_model(group, u, mps=mps, name="ghz-z2",
                        action=[[0, 1], [1, 0]])
    spec.expected = {"bi": True, "projectors_commute": True}
    return spec


BUILTIN_MODELS = {
    "onsite-z2": onsite_z2_cluster_like,
    "ghz-z2": ghz_z2_model,
    "onsite-z2z2-cluster": onsite_z2z2_cluster,
    "onsite-z3-random": onsite_z3_random,
    "cz-z2": cz_z2_model,
    "czx": czx_model,
    "ghz-cluster-z4z2": ghz_cluster_z4z2_model,
}


def get_model(name, seed=0):
    if name in BUILTIN_MODELS:
        return BUILTIN_MODELS[name]()
    raise KeyError(f"unknown model {name!r}; "
                   f"builtins: {sorted(BUILTIN_MODELS)}")


def model_from_json_dict(d):
    group, action = Group.from_json_dict(d["group"])
    mps = BlockMps.from_json_dict(d["mps"])
    mpus = {int(g): Mpu.from_json_dict(m) for g, m in d["mpus"].items()}
    if sorted(mpus) != list(group.elements()):
        raise ValueError("MPU table does not cover the group")
    if action is None:
        action = [[x for x in range(mps.num_blocks)]
                  for _ in group.elements()]
    return ModelSpec(name=d.get("name", "json-model"), group=group,
                     mpus=mpus, mps=mps, action=action)


def load_model(source, seed=0):
    """A builtin model by name, or a ModelSpec read from a JSON file."""
    import json
    import os
    if source in BUILTIN_MODELS:
        return get_model(source, seed=seed)
    if os.path.exists(source):
        with open(source) as fh:
            return model_from_json_dict(json.load(fh))
    raise KeyError(f"no builtin model or file named {source!r}; "
                   f"builtins: {sorted(BUILTIN_MODELS)}")
