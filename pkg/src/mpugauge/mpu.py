"""Matrix product operators that are unitary at every length (MPUs).

The site tensor is stored as ``U[l, r, o, i]`` (left bond, right bond,
physical out, physical in).  The module provides the canonical form with
identity left fixed point, the simplicity test, and the splitting of the
tensor across its two diagonal bipartitions into the three-legged factors
``X1, Y1, X2, Y2`` whose gate combinations ``u, v, w_L, w_R`` are unitary.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import NotInjective, NotSimple, NotUnitaryFamily, TooLarge
from .mps import DENSE_GUARD, fixed_point_matrix, leading_eig
from .tensor import Tensor

SIMPLE_TOL = 1e-8


def _as_mpu_tensor(u):
    u = np.asarray(u, dtype=complex)
    if u.ndim != 4 or u.shape[0] != u.shape[1] or u.shape[2] != u.shape[3]:
        raise ValueError(f"MPU tensor must be (D, D, d, d), got {u.shape}")
    return u


def mpo_dense(u, n, guard=DENSE_GUARD):
    """Dense PBC operator of ``n`` sites, shape (d**n, d**n)."""
    d = u.shape[2]
    if d ** (2 * n) > guard:
        raise TooLarge(f"d^2n = {d ** (2 * n)} exceeds guard {guard}")
    # t[l, r, (o...), (i...)]
    t = u.transpose(0, 1, 2, 3)
    for _ in range(n - 1):
        t = np.einsum("lmab,mrcd->lracbd", t, u)
        sh = t.shape
        t = t.reshape(sh[0], sh[1], sh[2] * sh[3], sh[4] * sh[5])
    return np.einsum("llab->ab", t)


class Mpu:
    """An MPU site tensor together with its physical and bond dimensions."""

    def __init__(self, u):
        self.u = _as_mpu_tensor(u)
        self.D = self.u.shape[0]
        self.d = self.u.shape[2]

    def dense_operator(self, n, guard=DENSE_GUARD):
        return mpo_dense(self.u, n, guard)

    def check_unitary(self, lengths=(1, 2, 3, 4), tol=1e-9):
        """Verify the generated operators are unitary; returns max residual."""
        worst = 0.0
        for n in lengths:
            if self.d ** (2 * n) > DENSE_GUARD:
                continue
            o = self.dense_operator(n)
            res = float(np.linalg.norm(o @ o.conj().T - np.eye(o.shape[0])))
            worst = max(worst, res)
        if worst > tol:
            raise NotUnitaryFamily(
                f"operator family not unitary, residual {worst:.3e}",
                residual=worst)
        return worst

    def block_sites(self, k):
        """Group ``k`` consecutive sites into one."""
        t = self.u
        for _ in range(k - 1):
            t = np.einsum("lmab,mrcd->lracbd", t, self.u)
            sh = t.shape
            t = t.reshape(sh[0], sh[1], sh[2] * sh[3], sh[4] * sh[5])
        return Mpu(t)

    def is_injective(self):
        """Rank of the virtual-to-physical map (l, r) -> (o, i) is D**2."""
        m = self.u.transpose(2, 3, 0, 1).reshape(self.d ** 2, self.D ** 2)
        s = np.linalg.svd(m, compute_uv=False)
        if s.size == 0 or s[0] == 0:
            return False
        return int(np.sum(s > 1e-10 * s[0])) == self.D ** 2

    def to_cfii(self):
        """Gauge the tensor so the left transfer fixed point is the identity
        (eigenvalue d) and the right one is diagonal positive, trace one.

        Returns (Mpu, rho).  Requires an injective tensor.
        """
        if not self.is_injective():
            raise NotInjective("CFII requires an injective MPU tensor")
        u = self.u
        e = np.einsum("lroi,msoi->lmrs", u, u.conj()).reshape(
            self.D ** 2, self.D ** 2)
        lam_r, vr = leading_eig(e)
        _, vl = leading_eig(e.conj().T)
        lam = lam_r.real
        left = fixed_point_matrix(vl.conj(), self.D, self.D)
        if np.trace(left).real < 0:
            left = -left
        lvals, lvecs = np.linalg.eigh(left)
        lvals = np.clip(lvals, 1e-14, None)
        m = np.diag(np.sqrt(lvals)) @ lvecs.conj().T
        minv = lvecs @ np.diag(1.0 / np.sqrt(lvals))
        # only a gauge on the bond: the dense operator is unchanged
        u1 = np.einsum("ab,bcoi,cd->adoi", m, u, minv)
        # normalize the gauge so the left fixed point is exactly 1 * (lam/d)
        e1 = np.einsum("lroi,msoi->lmrs", u1, u1.conj()).reshape(
            self.D ** 2, self.D ** 2)
        _, vr1 = leading_eig(e1)
        rho = fixed_point_matrix(vr1, self.D, self.D)
        if np.trace(rho).real < 0:
            rho = -rho
        rvals, rvecs = np.linalg.eigh(rho)
        order = np.argsort(rvals)[::-1]
        rvals, rvecs = rvals[order], rvecs[:, order]
        u2 = np.einsum("ab,bcoi,cd->adoi", rvecs.conj().T, u1, rvecs)
        rho_d = np.diag(np.clip(rvals, 0.0, None))
        rho_d /= np.trace(rho_d).real
        return Mpu(u2), rho_d, lam

    def ensure_simple(self, max_blocking=4, tol=SIMPLE_TOL):
        """Block sites until the tensor is injective and simple.

        Returns (mpu, xy) where ``xy`` is the XYDecomposition.
        """
        m = self
        for _ in range(max_blocking + 1):
            if m.is_injective():
                try:
                    return m, xy_decompose(m, tol=tol)
                except NotSimple:
                    pass
            m = m.block_sites(2)
        raise NotSimple(
            f"tensor not simple after {max_blocking} blockings")

    # ------------------------------------------------------------------
    # serialization
    # ------------------------------------------------------------------
    def to_json_dict(self):
        d = Tensor(self.u, ["l", "r", "o", "i"]).to_json_dict()
        d["d"] = self.d
        d["D"] = self.D
        return d

    @staticmethod
    def from_json_dict(dct):
        t = Tensor.from_json_dict(dct).transpose(["l", "r", "o", "i"])
        m = Mpu(t.data)
        if m.d != dct["d"] or m.D != dct["D"]:
            raise ValueError("declared dimensions disagree with tensor")
        return m


@dataclass
class XYDecomposition:
    """Splitting of a simple MPU tensor across its two diagonal cuts.

    Matrix layouts (row-major fused indices):
      X2[(l, o), t]   t the thick internal leg, dim d_l
      Y2[t, (i, r)]
      X1[(o, r), s]   s the curly internal leg, dim d_r
      Y1[s, (i, l)]
    with the weighted matricizations satisfying, in the canonical gauge:
      X2+ X2 = 1,  X1+ (1 x rho) X1 = 1,
      Y1 Y1+ = (d/d_r) 1,  Y2 (1 x rho) Y2+ = (d/d_l) 1.
    """

    mpu: Mpu
    rho: np.ndarray
    x1: np.ndarray
    y1: np.ndarray
    x2: np.ndarray
    y2: np.ndarray
    d_l: int
    d_r: int

    @property
    def d(self):
        return self.mpu.d

    @property
    def D(self):
        return self.mpu.D

    def index_ratio(self):
        """The topological index as the reduced fraction d_r / d_l; its log
        vanishes exactly for MPU group representations."""
        return Fraction(self.d_r, self.d_l)

    # gate combinations; all returned as matrices (out, in)
    def gate_u(self):
        """u: d (x) d -> d_l (x) d_r, contracting Y2 (left) with Y1 (right)
        over the shared bond."""
        y2 = self.y2.reshape(self.d_l, self.d, self.D)
        y1 = self.y1.reshape(self.d_r, self.d, self.D)
        u = np.einsum("tac,sbc->tsab", y2, y1)
        return u.reshape(self.d_l * self.d_r, self.d * self.d)

    def gate_v(self):
        """v: d_r (x) d_l -> d (x) d, contracting X1 (left) with X2 (right)."""
        x1 = self.x1.reshape(self.d, self.D, self.d_r)
        x2 = self.x2.reshape(self.D, self.d, self.d_l)
        v = np.einsum("acs,cbt->abst", x1, x2)
        return v.reshape(self.d * self.d, self.d_r * self.d_l)

    def gate_wl(self):
        """w_L: d (x) d_l -> d_l (x) d, contracting Y2 (left) with X2
        (right)."""
        y2 = self.y2.reshape(self.d_l, self.d, self.D)
        x2 = self.x2.reshape(self.D, self.d, self.d_l)
        w = np.einsum("tac,cbu->tbau", y2, x2)
        return w.reshape(self.d_l * self.d, self.d * self.d_l)

    def gate_wr(self):
        """w_R: d_r (x) d -> d (x) d_r, contracting X1 (left) with Y1
        (right)."""
        x1 = self.x1.reshape(self.d, self.D, self.d_r)
        y1 = self.y1.reshape(self.d_r, self.d, self.D)
        w = np.einsum("acs,ubc->ausb", x1, y1)
        return w.reshape(self.d * self.d_r, self.d_r * self.d)

    def check_identities(self, tol=1e-9):
        """Residuals of the structural identities; raises NotSimple if any
        exceeds the tolerance.  Keys name the contraction pattern."""
        d, dl, dr, D = self.d, self.d_l, self.d_r, self.D
        rho = self.rho
        out = {}
        x2 = self.x2
        out["X2+ X2 = 1"] = np.linalg.norm(
            x2.conj().T @ x2 - np.eye(dl))
        x1 = self.x1.reshape(d, D, dr)
        g = np.einsum("acs,cb,abt->st", x1.conj(), rho, x1)
        out["X1+ (1xrho) X1 = 1"] = np.linalg.norm(g - np.eye(dr))
        y1 = self.y1
        out["Y1 Y1+ = (d/d_r) 1"] = np.linalg.norm(
            y1 @ y1.conj().T - (d / dr) * np.eye(dr))
        y2 = self.y2.reshape(dl, d, D)
        g = np.einsum("tac,cb,uab->tu", y2, rho, y2.conj())
        out["Y2 (1xrho) Y2+ = (d/d_l) 1"] = np.linalg.norm(
            g - (d / dl) * np.eye(dl))
        y1r = self.y1.reshape(dr, d, D)
        g = np.einsum("sac,sbc->ab", y1r.conj(), y1r)
        out["tr_s Y1+ Y1 = 1"] = np.linalg.norm(g - np.eye(d))
        g = np.einsum("tac,cb,tdb->ad", y2, rho, y2.conj())
        out["tr_t Y2 (1xrho) Y2+ = 1"] = np.linalg.norm(g - np.eye(d))
        x1 = self.x1.reshape(d, D, dr)
        g = np.einsum("acs,cb,dbs->ad", x1, rho, x1.conj())
        out["tr_s X1 (1xrho) X1+ = (d_r/d) 1"] = np.linalg.norm(
            g - (dr / d) * np.eye(d))
        x2r = self.x2.reshape(D, d, dl)
        g = np.einsum("cat,cbt->ab", x2r, x2r.conj())
        out["tr_t X2 X2+ = (d_l/d) 1"] = np.linalg.norm(
            g - (dl / d) * np.eye(d))
        for name, mat in (("u", self.gate_u()), ("v", self.gate_v()),
                          ("w_L", self.gate_wl()), ("w_R", self.gate_wr())):
            out[f"{name} unitary"] = np.linalg.norm(
                mat @ mat.conj().T - np.eye(mat.shape[0]))
        out = {k: float(v) for k, v in out.items()}
        worst = max(out.values())
        if worst > tol:
            bad = max(out, key=out.get)
            raise NotSimple(
                f"structural identity '{bad}' fails with {out[bad]:.3e}")
        return out


def _fix_column_phases(q, wh):
    """Deterministic phases: make the largest entry of each row of ``wh``
    real positive, compensating in the columns of ``q``."""
    for k in range(wh.shape[0]):
        row = wh[k]
        j = int(np.argmax(np.abs(row)))
        ph = row[j] / abs(row[j]) if abs(row[j]) > 0 else 1.0
        wh[k] /= ph
        q[:, k] *= ph
    return q, wh


def xy_decompose(mpu, tol=SIMPLE_TOL):
    """Split a simple MPU tensor across its two diagonal bipartitions.

    The tensor is first brought to the canonical gauge.  Simplicity is the
    statement that both rho-weighted matricizations are proportional to
    partial isometries; the nonzero singular values must cluster at
    sqrt(d/d_l) and sqrt(d/d_r).  Raises NotSimple otherwise.
    """
    mpu_c, rho, lam = mpu.to_cfii()
    u = mpu_c.u
    D, d = mpu_c.D, mpu_c.d
    rvals = np.clip(np.diag(rho).real, 0.0, None)
    if np.min(rvals) < 1e-12:
        raise NotSimple("right fixed point is singular")
    rh = np.sqrt(rvals)

    # cut 2: rows (l, o), cols (i, r); weight sqrt(rho) on r
    m2 = np.einsum("lroi,r->loir", u, rh).reshape(D * d, d * D)
    q2, s2, w2 = np.linalg.svd(m2, full_matrices=False)
    keep = s2 > 1e-8 * s2[0]
    q2, s2, w2 = q2[:, keep], s2[keep], w2[keep]
    d_l = int(s2.size)

    # cut 1: rows (o, r), cols (i, l); weight sqrt(rho) on r
    m1 = np.einsum("lroi,r->oril", u, rh).reshape(d * D, d * D)
    q1, s1, w1 = np.linalg.svd(m1, full_matrices=False)
    keep = s1 > 1e-8 * s1[0]
    q1, s1, w1 = q1[:, keep], s1[keep], w1[keep]
    d_r = int(s1.size)

    if d_l * d_r != d * d:
        raise NotSimple(
            f"cut ranks d_l = {d_l}, d_r = {d_r} violate d_l d_r = d^2")
    dev2 = float(np.max(np.abs(s2 - np.sqrt(d / d_l))))
    dev1 = float(np.max(np.abs(s1 - np.sqrt(d / d_r))))
    if max(dev1, dev2) > 1e-6:
        raise NotSimple(
            f"weighted cuts are not partial isometries "
            f"(deviations {dev1:.3e}, {dev2:.3e})")

    q2, w2 = _fix_column_phases(q2, w2)
    q1, w1 = _fix_column_phases(q1, w1)

    rinv = 1.0 / rh
    # X2 isometry; Y2 carries the singular values and the rho-unweighting
    x2 = q2
    y2 = (s2[:, None] * w2).reshape(d_l, d, D) * rinv[None, None, :]
    y2 = y2.reshape(d_l, d * D)
    # X1 carries the rho-unweighting; Y1 the singular values
    x1 = (q1.reshape(d, D, d_r) * rinv[None, :, None]).reshape(d * D, d_r)
    y1 = s1[:, None] * w1

    xy = XYDecomposition(mpu_c, rho, x1, y1, x2, y2, d_l, d_r)
    # reconstruction check on both cuts
    rec2 = (x2 @ y2).reshape(D, d, d, D)
    err2 = np.linalg.norm(rec2 - u.transpose(0, 2, 3, 1))
    rec1 = (x1 @ y1).reshape(d, D, d, D)
    err1 = np.linalg.norm(rec1 - u.transpose(2, 1, 3, 0))
    if max(err1, err2) > 1e-7 * np.linalg.norm(u):
        raise NotSimple(
            f"X/Y reconstruction fails ({err1:.3e}, {err2:.3e})")
    return xy


def _ring_product(b, n, o_sites, i_sites):
    """Trace of a ring of ``n`` copies of ``b[t, t', o, i]`` over the
    threading leg, with per-gate output/input legs reassigned to the sites
    given by ``o_sites``/``i_sites`` (both functions of the gate index)."""
    acc = b
    for _ in range(n - 1):
        acc = np.tensordot(acc, b, axes=([1], [0]))
        acc = np.moveaxis(acc, acc.ndim - 3, 1)
    acc = np.trace(acc, axis1=0, axis2=1)
    # axes come out as (o_0, i_0, o_1, i_1, ...) labelled by gate index
    o_of = {o_sites(k): 2 * k for k in range(n)}
    i_of = {i_sites(k): 2 * k + 1 for k in range(n)}
    perm = [o_of[s] for s in range(n)] + [i_of[s] for s in range(n)]
    d = b.shape[2]
    return acc.transpose(perm).reshape(d ** n, d ** n)


def staircase_dense(xy, n, side="L", guard=DENSE_GUARD):
    """Dense PBC operator of ``n`` sites assembled from the staircase of
    ``w_L`` (or ``w_R``) gates, threading the internal leg around the
    ring.  Works at any ``n``; agrees with ``mpo_dense`` for simple
    tensors."""
    d = xy.d
    if d ** (2 * n) > guard:
        raise TooLarge(f"d^2n = {d ** (2 * n)} exceeds guard {guard}")
    if side == "L":
        # w_L[(t, b), (a, u)]: (input of site k, thread) -> (thread,
        # output of site k+1)
        b = xy.gate_wl().reshape(xy.d_l, d, d, xy.d_l).transpose(0, 3, 1, 2)
        return _ring_product(b, n, lambda k: (k + 1) % n, lambda k: k)
    if side == "R":
        # w_R[(a, u), (s, b)]: (thread, input of site k+1) -> (output of
        # site k, thread)
        b = xy.gate_wr().reshape(d, xy.d_r, xy.d_r, d).transpose(2, 1, 0, 3)
        return _ring_product(b, n, lambda k: k, lambda k: (k + 1) % n)
    raise ValueError(f"side must be 'L' or 'R', got {side!r}")


def two_layer_dense(xy, n, guard=DENSE_GUARD):
    """Dense PBC operator of ``n`` sites (``n`` even) as the depth-two
    circuit: a layer of ``u`` gates on pairs (0,1), (2,3), ... followed by
    a layer of ``v`` gates on the shifted pairs (1,2), ..., (n-1,0)."""
    if n % 2:
        raise ValueError("the u/v brickwork tiles only even-length rings")
    d = xy.d
    if d ** (2 * n) > guard:
        raise TooLarge(f"d^2n = {d ** (2 * n)} exceeds guard {guard}")
    u = xy.gate_u().reshape(xy.d_l, xy.d_r, d, d)
    v = xy.gate_v().reshape(d, d, xy.d_r, xy.d_l)
    pairs = n // 2
    # transfer tensor of one brick pair, threading the d_l leg that the
    # wrapping v gate consumes:
    # t[a(d_l of pair k), c(d_l of pair k+1), o_{2k+1}, o_{2k+2}, i_{2k},
    #   i_{2k+1}]
    t = np.einsum("abij,xybc->acxyij", u, v)
    acc = t
    for _ in range(pairs - 1):
        acc = np.tensordot(acc, t, axes=([1], [0]))
        acc = np.moveaxis(acc, acc.ndim - 5, 1)
    acc = np.trace(acc, axis1=0, axis2=1)
    # axes by pair k: o_{2k+1}, o_{2k+2 mod n}, i_{2k}, i_{2k+1}
    o_of = {}
    i_of = {}
    for k in range(pairs):
        o_of[(2 * k + 1) % n] = 4 * k
        o_of[(2 * k + 2) % n] = 4 * k + 1
        i_of[2 * k] = 4 * k + 2
        i_of[2 * k + 1] = 4 * k + 3
    perm = [o_of[s] for s in range(n)] + [i_of[s] for s in range(n)]
    return acc.transpose(perm).reshape(d ** n, d ** n)
