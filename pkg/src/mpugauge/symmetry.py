"""Analysis of MPU representations of a finite group acting on an MPS.

The entry point is :func:`build_rep`, which blocks the chain until every
group element's MPU tensor is simple, fixes the canonical gauge with the
tensor of g^-1 equal to the adjoint tensor of g, extracts the antiunitary
data (T_g, sigma_g), and exposes fusion tensors, the anomaly 3-cocycle
omega, the zeta scalars, and spatially truncated symmetry operators.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (NotARepresentation, NotInjective, NotProportional,
                     NotRankOne, NotSimple)
from .mps import BlockMps, leading_eig
from .mpu import Mpu, XYDecomposition, xy_decompose

DEFAULT_TOL = 1e-9


def _mpo_dagger(u):
    """Adjoint MPO tensor: conjugate and swap the physical legs."""
    return u.transpose(0, 1, 3, 2).conj()


def _polar_unitary(m):
    uu, _, vv = np.linalg.svd(m)
    return uu @ vv


@dataclass
class SymmetryRep:
    """A canonicalized MPU representation acting on a block MPS."""

    group: object
    mps: BlockMps
    action: list
    mpus: dict                  # g -> Mpu in the canonical gauge
    xys: dict                   # g -> XYDecomposition
    rhos: dict                  # g -> right fixed point (diagonal matrix)
    t_op: dict                  # g -> T_g on the bond of U_g
    sigma: dict                 # g -> +-1 (only meaningful for g = g^-1)
    blocking: int = 1
    fusion_lt: dict = field(default_factory=dict)   # (g,h) -> F< tensor
    fusion_gt: dict = field(default_factory=dict)   # (g,h) -> F> tensor

    @property
    def d(self):
        return self.mps.d

    def bond_dim(self, g):
        return self.mpus[g].D

    def dense_u(self, g, n):
        return self.mpus[g].dense_operator(n)


def _stacked_tensor(ug, uh):
    """Tensor of the product MPO U_g U_h (g applied after h):
    W[(lg lh), (rg rh), o, i]."""
    w = np.einsum("LRom,lrmi->LlRroi", ug, uh)
    s = w.shape
    return w.reshape(s[0] * s[1], s[2] * s[3], s[4], s[5])


def _chain_map(u, n):
    """Matrix of the n-site open chain: rows phys (o..o, i..i), cols
    (l, r)."""
    t = u
    for _ in range(n - 1):
        t = np.einsum("lmab,mrcd->lracbd", t, u)
        s = t.shape
        t = t.reshape(s[0], s[1], s[2] * s[3], s[4] * s[5])
    # t[l, r, O, I] -> rows (O, I), cols (l, r)
    s = t.shape
    return t.transpose(2, 3, 0, 1).reshape(s[2] * s[3], s[0] * s[1])


def mixed_gauge_operator(ua, ub, tol=1e-7):
    """Find the bond operator T with ua^{oi} = T^+ ub^{oi} T, given two
    injective MPO tensors generating the same operator family.

    Uses the leading eigenvector of the mixed transfer matrix; T is
    normalized to be unitary with det argument in [0, 2 pi / D).
    """
    if ua.shape != ub.shape:
        raise NotARepresentation("mixed gauge needs equal bond dimensions")
    D = ua.shape[0]
    d = ua.shape[2]
    # relation ua = T^+ ub T means sum_oi ub^{oi} T conj(ua^{oi}) ... use the
    # mixed transfer E[(l l'), (r r')] = sum ub[l,r,o,i] conj(ua[l',r',o,i]);
    # its leading eigenvector (eigenvalue d) reshapes to T with
    # ub^{oi} T = T ua^{oi}  =>  ua = T^-1 ub T.
    e = np.einsum("lroi,msoi->lmrs", ub, ua.conj()).reshape(D * D, D * D)
    # T is the conjugate of the leading *left* eigenvector
    lam, v = leading_eig(e.T)
    v = v.conj()
    if abs(lam - d) > tol * d:
        raise NotARepresentation(
            f"mixed transfer eigenvalue {lam:.6f} differs from d = {d}")
    t = v.reshape(D, D)
    # unitarize: T fixed point is unique up to scale for injective tensors
    u_, s_, v_ = np.linalg.svd(t)
    if s_[0] <= 0 or (s_.max() - s_.min()) > tol * s_.max():
        raise NotARepresentation("mixed gauge operator is not proportional "
                                 "to a unitary")
    t = u_ @ v_
    # fix the phase so arg(det T) lies in [0, 2 pi / D)
    det = np.linalg.det(t)
    ang = np.angle(det) % (2 * np.pi)
    t = t * np.exp(-1j * (ang - ang % (2 * np.pi / D)) / D)
    # residual check
    res = np.linalg.norm(np.einsum("lroi,rs->lsoi", ub, t)
                         - np.einsum("lr,rsoi->lsoi", t, ua))
    if res > 1e-6 * np.linalg.norm(ua):
        raise NotARepresentation(
            f"bond gauge relation fails with residual {res:.3e}")
    return t


def _enforce_adjoint_compat(xy, t, sig):
    """Adjust the internal unitary freedom of an involution's X/Y factors so
    that X1 = (Y2)^+ decorated with T^+ on the red leg, and
    Y1 = sigma T (X2)^+ (the sign sigma tracks T T* = sigma 1).

    Only valid for group MPUs (d_l = d_r = d).  Returns a new
    XYDecomposition; raises NotSimple if the freedom cannot absorb it.
    """
    d, D = xy.d, xy.D
    dl, dr = xy.d_l, xy.d_r
    rho = xy.rho
    # candidate X1' from Y2: X1'[(o,r), s] = sum_r' conj(Y2[s,(o,r')]) T+[r',r]
    y2 = xy.y2.reshape(dl, d, D)
    cand_x1 = np.einsum("sor,rq->oqs", y2.conj(), t.conj().T)
    cand_x1 = cand_x1.reshape(d * D, dl)
    # W1 = X1^+ cand, with X1^+ = X1^+(1 x rho)
    x1 = xy.x1.reshape(d, D, dr)
    x1_inv = np.einsum("ors,rq->soq", x1.conj(), rho).reshape(dr, d * D)
    w1 = _polar_unitary(x1_inv @ cand_x1)
    new_x1 = xy.x1 @ w1
    new_y1 = w1.conj().T @ xy.y1
    # candidate Y1' = sigma T (X2)^+ with T acting on the red leg
    cand_y1 = sig * np.einsum("lis,lq->siq",
                              xy.x2.reshape(D, d, dl).conj(), t)
    cand_y1 = cand_y1.reshape(dl, d * D)
    res1 = np.linalg.norm(new_x1 - cand_x1)
    res2 = np.linalg.norm(new_y1 - cand_y1)
    if max(res1, res2) > 1e-6 * np.linalg.norm(xy.x1):
        raise NotSimple(
            f"adjoint-compatible X/Y gauge not reachable "
            f"(residuals {res1:.3e}, {res2:.3e})")
    return XYDecomposition(xy.mpu, rho, new_x1, new_y1, xy.x2, xy.y2,
                           dl, dr)


def _onsite_xy(xy):
    """Canonical X/Y factors for a bond-dimension-one tensor: the singular
    values of its splittings are fully degenerate, so the generic
    decomposition returns an arbitrary basis; fix it to x1 = y2 = 1,
    y1 = x2 = u."""
    u = xy.mpu.u[0, 0]
    d = u.shape[0]
    eye = np.eye(d, dtype=complex)
    return XYDecomposition(xy.mpu, xy.rho, eye, u.copy(),
                           u.copy(), eye, d, d)


def _dagger_xy(xy, mpu_dag):
    """X/Y factors of the adjoint tensor, derived from those of the original
    (valid when d_l = d_r = d)."""
    d, D = xy.d, xy.D
    x1 = xy.y2.conj().T                    # [(o, r), s'] from [t, (i, r)]
    y1 = xy.x2.reshape(D, d, xy.d_l).conj().transpose(2, 1, 0) \
        .reshape(xy.d_l, d * D)            # [t, (i, l)]
    x2 = xy.y1.reshape(xy.d_r, d, D).conj().transpose(2, 1, 0) \
        .reshape(D * d, xy.d_r)
    y2 = xy.x1.conj().T
    rho = xy.rho.conj()
    # the left/right split ranks swap under the adjoint
    return XYDecomposition(mpu_dag, rho, x1, y1, x2, y2, xy.d_r, xy.d_l)


def build_rep(model, tol=DEFAULT_TOL, max_blocking=4):
    """Canonicalize a model's MPU family into a SymmetryRep.

    Blocks the chain so every tensor is simple and every MPS block
    injective, verifies the dense representation property at three sites,
    chooses the adjoint gauge U_{g^-1} = U_g^+ for g != g^-1, and computes
    (T_g, sigma_g) for involutions.
    """
    group = model.group
    for g in group.elements():
        model.mpus[g].check_unitary(lengths=(1, 2, 3), tol=max(tol, 1e-9))

    def try_blocking(k):
        mps_k = model.mps if k == 1 else model.mps.block_sites(k)
        if not mps_k.is_injective():
            return None
        raw_k = {}
        for g in group.elements():
            mb = model.mpus[g] if k == 1 else model.mpus[g].block_sites(k)
            if not mb.is_injective():
                return None
            try:
                xy_decompose(mb)
            except NotSimple:
                return None
            raw_k[g] = mb
        return mps_k, raw_k

    # smallest common blocking with every MPU simple and the MPS injective
    found = None
    for k in range(1, 2 ** max_blocking + 1):
        found = try_blocking(k)
        if found is not None:
            blocking = k
            break
    if found is None:
        raise NotSimple("no common blocking makes every MPU simple and "
                        "the MPS injective")
    mps, raw = found

    # representation property ||U_g U_h - U_gh|| at N = 3, PBC, computed
    # from transfer-matrix traces (never materializes the dense operators)
    d = mps.d
    for g in group.elements():
        for h in group.elements():
            w = _stacked_tensor(raw[g].u, raw[h].u)
            c = raw[group.op(g, h)].u
            aa = np.trace(np.linalg.matrix_power(_mixed_transfer(w, w), 3))
            ab = np.trace(np.linalg.matrix_power(_mixed_transfer(w, c), 3))
            bb = np.trace(np.linalg.matrix_power(_mixed_transfer(c, c), 3))
            res = np.sqrt(max((aa - 2 * ab.real + bb).real, 0.0))
            if res > 1e-7 * np.sqrt(bb.real):
                raise NotARepresentation(
                    f"U_{g} U_{h} differs from U_{group.op(g, h)} at three "
                    f"sites (residual {res:.3e})")

    mpus, xys, rhos, t_op, sigma = {}, {}, {}, {}, {}
    for g in sorted(group.elements()):
        gi = group.inv[g]
        if g in mpus:
            continue
        xy = xy_decompose(raw[g])
        if xy.D == 1:
            xy = _onsite_xy(xy)
        mpu_c = xy.mpu
        if gi == g:
            # involution: T from the adjoint relation on the same tensor
            udag = _mpo_dagger(mpu_c.u)
            if g == 0:
                t = np.eye(mpu_c.D, dtype=complex)
            else:
                t = mixed_gauge_operator(udag, mpu_c.u)
            sig = 1.0
            if mpu_c.D > 0:
                prod = t @ t.conj()
                sig = float(np.sign(np.real(np.trace(prod)) / mpu_c.D))
                if np.linalg.norm(prod - sig * np.eye(mpu_c.D)) > 1e-6:
                    raise NotARepresentation(
                        "T T* is not proportional to the identity")
            if g != 0:
                xy = _enforce_adjoint_compat(xy, t, sig)
            mpus[g], xys[g], rhos[g] = xy.mpu, xy, xy.rho
            t_op[g], sigma[g] = t, sig
        else:
            mpus[g], xys[g], rhos[g] = mpu_c, xy, xy.rho
            t_op[g], sigma[g] = np.eye(mpu_c.D, dtype=complex), 1.0
            # adjoint gauge for the inverse
            mpu_d = Mpu(_mpo_dagger(mpu_c.u))
            xyd = _dagger_xy(xy, mpu_d)
            mpus[gi], xys[gi], rhos[gi] = mpu_d, xyd, xyd.rho
            t_op[gi] = np.eye(mpu_c.D, dtype=complex)
            sigma[gi] = 1.0

    rep = SymmetryRep(group=group, mps=mps, action=model.action,
                      mpus=mpus, xys=xys, rhos=rhos, t_op=t_op,
                      sigma=sigma, blocking=blocking)
    return rep


# ----------------------------------------------------------------------
# fusion tensors
# ----------------------------------------------------------------------
def _mixed_transfer(a, b):
    """E[(la lb), (ra rb)] = sum_oi conj(a[la,ra,o,i]) b[lb,rb,o,i]."""
    da, db = a.shape[0], b.shape[0]
    e = np.einsum("lroi,msoi->lmrs", a.conj(), b)
    return e.reshape(da * db, da * db)


def _boundary_overlap(a, b, left_a, left_b, right_a, right_b, n):
    """<(left_a a-chain right_a), (left_b b-chain right_b)> over n sites,
    contracting physical legs, via the mixed transfer matrix."""
    e = _mixed_transfer(a, b)
    t = np.linalg.matrix_power(e, n)
    da, db = a.shape[0], b.shape[0]
    lv = np.einsum("am,bm->ab", left_a.conj(), left_b).reshape(da * db)
    rv = np.einsum("am,bm->ab", right_a.conj(), right_b).reshape(da * db)
    return complex(lv @ t @ rv)


def _fusion_residual(w, c, fl, fg, n):
    """Norm residual of [F< . w-chain . F>] = c-chain over n sites,
    computed in bond space (no physical-space materialization).

    fl is F<[m, (ab)] as a (Dc x DwDw) matrix; fg is F>[(ab), m]."""
    dw, dc = w.shape[0], c.shape[0]
    idw = np.eye(dw)
    idc = np.eye(dc)
    # <FwF, FwF>: boundaries fl (left, rows index the chain bond) and fg
    aa = _boundary_overlap(w, w, fl.T, fl.T, fg, fg, n)
    ac = _boundary_overlap(w, c, fl.T, idc, fg, idc, n)
    cc = _boundary_overlap(c, c, idc, idc, idc, idc, n)
    val = aa.real - 2 * ac.real + cc.real
    return float(np.sqrt(max(val, 0.0)) / max(np.sqrt(cc.real), 1e-30))


def _solve_boundary_intertwiner(w, c, n, guard=2 ** 26):
    """Minimum-norm K[(lw, rw), (lc, rc)] with sum K * chain(w) = chain(c)
    contracted over physical indices of an n-site open chain."""
    dw, dc = w.shape[0], c.shape[0]
    d = w.shape[2]
    if d ** (2 * n) * (dw * dw + dc * dc) > guard:
        raise NotInjective("fusion chain too large to materialize")
    mw = _chain_map(w, n)            # rows phys, cols (lw, rw)
    mc = _chain_map(c, n)
    k, *_ = np.linalg.lstsq(mw, mc, rcond=1e-10)
    res = np.linalg.norm(mw @ k - mc) / max(np.linalg.norm(mc), 1e-30)
    if res > 1e-7:
        raise NotProportional(
            f"boundary intertwiner relation fails ({res:.3e})",
            residual=res)
    return k.reshape(dw, dw, dc, dc)


def fusion_tensors(rep, g, h, tol=DEFAULT_TOL):
    """Fusion tensors (F<, F>) with F< . [U_g over U_h chain] . F> equal to
    the U_{gh} chain.

    F< maps the gh bond into the (g, h) bond pair at the left end, F> maps
    the pair back at the right end.  Stored as F<[m, a, b] and F>[a, b, m].
    Results are cached on the rep; end-point normalizations (identity
    elements and inverse pairs) are applied before caching.
    """
    key = (g, h)
    if key in rep.fusion_lt:
        return rep.fusion_lt[key], rep.fusion_gt[key]
    group = rep.group
    gh = group.op(g, h)
    ug, uh, ugh = rep.mpus[g].u, rep.mpus[h].u, rep.mpus[gh].u
    w = _stacked_tensor(ug, uh)
    dg, dh, dgh = rep.bond_dim(g), rep.bond_dim(h), rep.bond_dim(gh)
    last_exc = None
    fl = fg = None
    for n in range(1, 4):
        try:
            k = _solve_boundary_intertwiner(w, ugh, n)
        except (NotProportional, NotInjective) as exc:
            last_exc = exc
            continue
        # K[(lg lh), (rg rh), lgh, rgh] should equal F<[lgh, (lg lh)] *
        # F>[(rg rh), rgh]; split across ((lg lh, lgh) | (rg rh, rgh))
        km = k.transpose(0, 2, 1, 3).reshape(dg * dh * dgh, dg * dh * dgh)
        uu, ss, vv = np.linalg.svd(km)
        if ss.size > 1 and ss[1] > 1e-7 * ss[0]:
            last_exc = NotRankOne(
                "fusion boundary operator is not rank one",
                second_singular=float(ss[1] / ss[0]))
            continue
        fl_m = uu[:, 0].reshape(dg * dh, dgh).T        # F<[m, (a b)]
        fg_m = (ss[0] * vv[0]).reshape(dg * dh, dgh)   # F>[(a b), m]
        # verify the defining relation beyond the solve length, to rule out
        # spurious minimum-norm components of the underdetermined solve
        res = max(_fusion_residual(w, ugh, fl_m, fg_m, m)
                  for m in (n, n + 1, n + 2))
        if res > 1e-7:
            last_exc = NotProportional(
                f"fusion relation fails on longer chains ({res:.3e})",
                residual=res)
            continue
        fl, fg = fl_m, fg_m
        break
    if fl is None:
        raise last_exc
    # deterministic phase: largest entry of F> real positive
    j = int(np.argmax(np.abs(fg)))
    ph = fg.flat[j] / abs(fg.flat[j])
    fg = fg / ph
    fl = fl * ph
    fl = fl.reshape(dgh, dg, dh)
    fg = fg.reshape(dg, dh, dgh)
    fl, fg = _normalize_fusion(rep, g, h, fl, fg, tol)
    rep.fusion_lt[key] = fl
    rep.fusion_gt[key] = fg
    return fl, fg


def _rescale_pair(fl, fg, target_fl, what):
    """Rescale (F<, F>) -> (c F<, F>/c) so F< equals the target exactly."""
    num = np.vdot(fl, target_fl)
    den = np.vdot(fl, fl)
    c = num / den
    res = np.linalg.norm(c * fl - target_fl) / np.linalg.norm(target_fl)
    if res > 1e-6:
        raise NotProportional(
            f"{what}: canonical form not proportional (residual {res:.3e})",
            residual=res)
    return c * fl, fg / c


def _normalize_fusion(rep, g, h, fl, fg, tol):
    """End-point conventions: identity fusions are trivial embeddings, and
    the (g, g^-1) fusion is the T-decorated cup/cap pair."""
    group = rep.group
    dg, dh = rep.bond_dim(g), rep.bond_dim(h)
    if h == 0:
        target = np.eye(dg).reshape(dg, dg, 1)
        fl, fg = _rescale_pair(fl, fg, target, f"F<({g}, e)")
    elif g == 0:
        target = np.eye(dh).reshape(dh, 1, dh)
        fl, fg = _rescale_pair(fl, fg, target, f"F<(e, {h})")
    elif group.op(g, h) == 0:
        # F<_{g, g^-1}[0, a, b] = T_g^+[a, b] (a cup decorated with T on the
        # g leg); F> then carries rho by the defining relation
        t = rep.t_op[g] if group.inv[g] == g else np.eye(dg, dtype=complex)
        target = t.conj().T.reshape(1, dg, dh)
        fl, fg = _rescale_pair(fl, fg, target, f"F<({g}, {g}^-1)")
    return fl, fg


def _right_boundary_scalar(w, rx, ry, n):
    """Given right boundary maps rx, ry on an n-site w-chain with the left
    boundary open, return (c, residual) with w-chain . rx = c w-chain . ry.

    Boundary maps are only determined modulo the chain's kernel, so the
    comparison must happen on the chain rather than entrywise."""
    dw = w.shape[0]
    idw = np.eye(dw)
    xx = _boundary_overlap(w, w, idw, idw, rx, rx, n).real
    yy = _boundary_overlap(w, w, idw, idw, ry, ry, n).real
    yx = _boundary_overlap(w, w, idw, idw, ry, rx, n)
    c = yx / yy
    res2 = xx - abs(yx) ** 2 / yy
    res = float(np.sqrt(max(res2, 0.0)) / np.sqrt(max(xx, 1e-30)))
    return c, res


def compute_omega(rep, tol=DEFAULT_TOL, n=3):
    """The associator 3-cocycle from fusion-tensor composites acting as
    right boundaries of the triply stacked chain:

        F>_{gh,k} (F>_{g,h} x 1) = omega(g,h,k) F>_{g,hk} (1 x F>_{h,k})
    """
    from .groups import PhaseTable
    group = rep.group
    omega = PhaseTable()
    for g in group.elements():
        for h in group.elements():
            for k in group.elements():
                gh, hk = group.op(g, h), group.op(h, k)
                _, f_gh = fusion_tensors(rep, g, h)
                _, f_ghk1 = fusion_tensors(rep, gh, k)
                _, f_hk = fusion_tensors(rep, h, k)
                _, f_ghk2 = fusion_tensors(rep, g, hk)
                dghk = rep.bond_dim(group.op(gh, k))
                lhs = np.einsum("abm,mcn->abcn", f_gh, f_ghk1)
                rhs = np.einsum("bcs,asn->abcn", f_hk, f_ghk2)
                lhs = lhs.reshape(-1, dghk)
                rhs = rhs.reshape(-1, dghk)
                w3 = _stacked_tensor(rep.mpus[g].u,
                                     _stacked_tensor(rep.mpus[h].u,
                                                     rep.mpus[k].u))
                val, res = _right_boundary_scalar(w3, lhs, rhs, n)
                if res > 1e-6:
                    raise NotProportional(
                        f"associator not scalar at ({g},{h},{k}): "
                        f"{res:.3e}", residual=res)
                omega[(g, h, k)] = val
    return omega


def compute_zeta(rep, tol=DEFAULT_TOL, n=3):
    """Scalars zeta_{g,h} relating daggered fusion tensors of inverses to
    fusion tensors, as left boundaries of the stacked (g, h) chain closed
    with F>_{g,h} on the right:

        T-decorated (F<_{h^-1,g^-1})^+ = zeta_{g,h} F<_{g,h}.

    The T decorations convert each inverse-element bond into the bond of
    the original element (they are the identity except at involutions).
    """
    from .groups import PhaseTable
    group = rep.group
    zeta = PhaseTable()
    for g in group.elements():
        for h in group.elements():
            gh = group.op(g, h)
            gi, hi, ghi = group.inv[g], group.inv[h], group.inv[gh]
            fl_inv, _ = fusion_tensors(rep, hi, gi)
            fl, fg = fusion_tensors(rep, g, h)
            # (F<_{h^-1, g^-1})^+ maps the (h^-1, g^-1) pair to the (gh)^-1
            # bond; after conjugation relabel legs to (g, h) order and dress:
            # T_{(gh)^-1} on the gh leg, T_{g^-1}^+ on the g leg,
            # T_{h^-1}^+ on the h leg.
            z = fl_inv.conj()                      # [m, b(h^-1), a(g^-1)]
            z = np.einsum("mn,nba->mba", rep.t_op[ghi].T, z)
            z = np.einsum("mba,bc->mca", z, rep.t_op[hi].conj())
            z = np.einsum("mca,ad->mcd", z, rep.t_op[gi].conj())
            z = z.transpose(0, 2, 1)               # [m, a(g), b(h)]
            dg, dh, dgh = (rep.bond_dim(g), rep.bond_dim(h),
                           rep.bond_dim(gh))
            w = _stacked_tensor(rep.mpus[g].u, rep.mpus[h].u)
            zl = z.reshape(dgh, dg * dh).T         # [(ab), m]
            fll = fl.reshape(dgh, dg * dh).T
            fgm = fg.reshape(dg * dh, dgh)
            x_num = _boundary_overlap(w, w, fll, zl, fgm, fgm, n)
            x_den = _boundary_overlap(w, w, fll, fll, fgm, fgm, n).real
            x_zz = _boundary_overlap(w, w, zl, zl, fgm, fgm, n).real
            val = x_num / x_den
            res2 = x_zz - abs(x_num) ** 2 / x_den
            res = float(np.sqrt(max(res2, 0.0))
                        / np.sqrt(max(x_zz, 1e-30)))
            if res > 1e-6:
                raise NotProportional(
                    f"zeta relation not scalar at ({g},{h}): {res:.3e}",
                    residual=res)
            zeta[(g, h)] = val
    return zeta


# ----------------------------------------------------------------------
# truncated symmetries
# ----------------------------------------------------------------------
def truncated_symmetry(rep, g, length):
    """Dense operator of the spatially truncated symmetry on ``length``
    sites: Y2 at the left end, bulk MPU tensors, Y1 at the right end.

    Output legs are (thick, phys, ..., phys, curly); for MPU group
    representations all these spaces have dimension d.
    """
    xy = rep.xys[g]
    d, D = xy.d, xy.D
    if length < 2:
        raise ValueError("truncated symmetry needs at least 2 sites")
    y2 = xy.y2.reshape(xy.d_l, d, D)       # [t, i, r]
    y1 = xy.y1.reshape(xy.d_r, d, D)       # [s, i, l]
    u = xy.mpu.u
    # accumulate from the left: t[out..., in..., bond]
    cur = y2.transpose(0, 1, 2)            # [t, i1, b]
    out_dim, in_dim = xy.d_l, d
    for _ in range(length - 2):
        cur = np.einsum("OIb,bcoi->OoIic", cur, u)
        s = cur.shape
        cur = cur.reshape(s[0] * s[1], s[2] * s[3], s[4])
        out_dim *= d
        in_dim *= d
    cur = np.einsum("OIb,sib->OsIi", cur, y1)
    s = cur.shape
    mat = cur.reshape(s[0] * s[1], s[2] * s[3])
    return mat
