"""Matrix product states with periodic boundaries and block structure.

A site tensor is stored as an array ``A[p, l, r]`` (physical, left bond,
right bond).  A state may consist of several injective blocks ``A_x`` with
positive weights ``mu_x``; the full tensor is the weighted direct sum.  All
dense computations have an explicit amplitude-count guard.
"""

from __future__ import annotations

import numpy as np

from .errors import NotInjective, TooLarge
from .tensor import Tensor

DENSE_GUARD = 2 ** 26


def _as_block(a):
    a = np.asarray(a, dtype=complex)
    if a.ndim != 3 or a.shape[1] != a.shape[2]:
        raise ValueError(f"block tensor must be (d, D, D), got {a.shape}")
    return a


def transfer_matrix(a, b=None):
    """Mixed transfer matrix E[(l, l'), (r, r')] = sum_p A^p (x) conj(B^p)."""
    b = a if b is None else b
    e = np.einsum("plr,pms->lmrs", a, b.conj())
    dl, dm = a.shape[1], b.shape[1]
    return e.reshape(dl * dm, a.shape[2] * b.shape[2])


def leading_eig(e, hermitian_fp=False):
    """Leading eigenpair of a dense transfer matrix (largest modulus)."""
    vals, vecs = np.linalg.eig(e)
    i = int(np.argmax(np.abs(vals)))
    return vals[i], vecs[:, i]


def fixed_point_matrix(vec, dl, dr, make_positive=True):
    """Reshape an eigenvector to a matrix; optionally rotate its phase so the
    matrix is (close to) positive semidefinite Hermitian."""
    m = vec.reshape(dl, dr)
    if make_positive:
        # phase such that the trace is real positive, then hermitize
        tr = np.trace(m)
        if abs(tr) > 1e-14:
            m = m * (abs(tr) / tr)
        m = 0.5 * (m + m.conj().T)
    return m


def chain_tensor(a, n):
    """Contract ``n`` copies into T[(p_1..p_n), l, r] with open bonds."""
    t = a
    for _ in range(n - 1):
        t = np.einsum("plm,qmr->pqlr", t, a).reshape(
            t.shape[0] * a.shape[0], t.shape[1], a.shape[2])
    return t


def injectivity_rank(a):
    """Rank of the map from the virtual pair (l, r) to the physical index."""
    d, dl, dr = a.shape
    m = a.reshape(d, dl * dr)
    s = np.linalg.svd(m, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > 1e-10 * s[0]))


class BlockMps:
    """A PBC MPS made of square blocks with positive weights."""

    def __init__(self, blocks, weights=None):
        self.blocks = [_as_block(b) for b in blocks]
        d = {b.shape[0] for b in self.blocks}
        if len(d) != 1:
            raise ValueError("all blocks must share the physical dimension")
        self.d = d.pop()
        if weights is None:
            weights = [1.0] * len(self.blocks)
        self.weights = [float(w) for w in weights]
        if len(self.weights) != len(self.blocks) or min(self.weights) <= 0:
            raise ValueError("need one positive weight per block")

    @property
    def num_blocks(self):
        return len(self.blocks)

    def bond_dims(self):
        return [b.shape[1] for b in self.blocks]

    def block_sites(self, k):
        """Group ``k`` consecutive sites into one (physical dim d**k)."""
        return BlockMps([chain_tensor(b, k) for b in self.blocks],
                        self.weights)

    def is_injective(self, x=0):
        """Single-site injectivity of block ``x``: virtual-to-physical map
        has full rank D**2."""
        b = self.blocks[x]
        return injectivity_rank(b) == b.shape[1] ** 2

    def ensure_injective(self, max_blocking=4):
        """Block sites until every block is injective; raises NotInjective."""
        st = self
        for _ in range(max_blocking + 1):
            if all(st.is_injective(x) for x in range(st.num_blocks)):
                return st
            st = st.block_sites(2)
        raise NotInjective(
            f"blocks not injective after {max_blocking} blockings")

    def dense_state(self, n, guard=DENSE_GUARD):
        """Dense PBC state of ``n`` sites as a vector of length d**n."""
        if self.d ** n > guard:
            raise TooLarge(f"d^n = {self.d ** n} exceeds guard {guard}")
        out = np.zeros(self.d ** n, dtype=complex)
        for b, w in zip(self.blocks, self.weights):
            t = chain_tensor(b, n)
            out += (w ** n) * np.einsum("pll->p", t)
        return out

    def transfer_fixed_points(self, x=0):
        """Leading eigenvalue and left/right fixed-point matrices of block x.

        Returns (lam, l, r) with sum_p A^p+ l A^p = lam l and
        sum_p A^p r A^p+ = lam r, both Hermitian positive for a normal block.
        """
        b = self.blocks[x]
        e = transfer_matrix(b)
        lam_r, vr = leading_eig(e)
        lam_l, vl = leading_eig(e.conj().T)
        dd = b.shape[1]
        r = fixed_point_matrix(vr, dd, dd)
        l = fixed_point_matrix(vl.conj(), dd, dd)
        return lam_r, l, r

    def canonicalize_block(self, x=0):
        """Gauge block x so the left fixed point is the identity and the
        right one is diagonal positive with unit trace; the transfer
        eigenvalue is absorbed so the leading eigenvalue becomes 1.

        Returns a new single-block BlockMps and the diagonal right fixed
        point.
        """
        b = self.blocks[x]
        lam, l, r = self.transfer_fixed_points(x)
        lam = lam.real
        # left fixed point decomposition l = m+ m
        lvals, lvecs = np.linalg.eigh(l)
        lvals = np.clip(lvals, 1e-14, None)
        m = np.diag(np.sqrt(lvals)) @ lvecs.conj().T
        minv = lvecs @ np.diag(1.0 / np.sqrt(lvals))
        a1 = np.einsum("ab,pbc,cd->pad", m, b, minv) / np.sqrt(lam)
        # rotate so the right fixed point is diagonal
        e = transfer_matrix(a1)
        _, vr = leading_eig(e)
        dd = b.shape[1]
        rho = fixed_point_matrix(vr, dd, dd)
        rvals, rvecs = np.linalg.eigh(rho)
        order = np.argsort(rvals)[::-1]
        rvals, rvecs = rvals[order], rvecs[:, order]
        a2 = np.einsum("ab,pbc,cd->pad", rvecs.conj().T, a1, rvecs)
        rho_d = np.diag(np.clip(rvals, 0, None))
        rho_d = rho_d / np.trace(rho_d)
        return BlockMps([a2], [self.weights[x]]), rho_d

    def local_orthogonality(self):
        """Max overlap between physical ranges of distinct blocks:

            max_{x != y} |sum_p A_x^p[a,b] conj(A_y^p[c,d])|

        Zero means the blocks can be distinguished by one physical index.
        """
        worst = 0.0
        for x in range(self.num_blocks):
            for y in range(self.num_blocks):
                if x == y:
                    continue
                ov = np.einsum("pab,pcd->abcd", self.blocks[x],
                               self.blocks[y].conj())
                worst = max(worst, float(np.max(np.abs(ov))))
        return worst

    # ------------------------------------------------------------------
    # serialization
    # ------------------------------------------------------------------
    def to_json_dict(self):
        return {
            "d": self.d,
            "blocks": [Tensor(b, ["p", "l", "r"]).to_json_dict()
                       for b in self.blocks],
            "weights": self.weights,
        }

    @staticmethod
    def from_json_dict(dct):
        blocks = [Tensor.from_json_dict(b).transpose(["p", "l", "r"]).data
                  for b in dct["blocks"]]
        st = BlockMps(blocks, dct.get("weights"))
        if st.d != dct["d"]:
            raise ValueError("declared physical dimension disagrees")
        return st
