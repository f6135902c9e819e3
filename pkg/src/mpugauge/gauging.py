"""Gauging a matrix-product state along its defect system: the gauged
tensor, Gauss-law operators built from fusion operators, gauge
projectors, and the modified (state-level) construction that survives
block-dependent L-symbols.

Site layout of the gauged chain: each site carries a gauge leg (dim |G|)
followed by a matter leg (dim d).  A Gauss-law element acts on the window
(gauge_j, matter_j, matter_{j+1}, gauge_{j+1}).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (MissingDefect, NonCommutingProjectors,
                     NotARepresentation, NotLocallyOrthogonal,
                     NotProportional, SpanDegenerate, TooLarge)

DEFAULT_TOL = 1e-9
DENSE_GUARD = 2 ** 24


@dataclass
class GaugedMps:
    """MPS with a gauge leg added to every site: the g-component of block
    x is the defect tensor g[x], the identity component the original
    block."""

    rep: object
    tensor: np.ndarray        # [|G|, d, M_total, M_total]
    offsets: list             # bond-space offset of each block

    @property
    def n_gauge(self):
        return self.tensor.shape[0]

    @property
    def d(self):
        return self.tensor.shape[1]

    def dense_state(self, n):
        """PBC state vector on n sites, indices (g_1, s_1, ..., g_n, s_n)."""
        ng, d, m, _ = self.tensor.shape
        if (ng * d) ** n > DENSE_GUARD:
            raise TooLarge(f"gauged dense state of {n} sites exceeds guard")
        t = self.tensor.reshape(ng * d, m, m)
        cur = t
        for _ in range(n - 1):
            cur = np.einsum("pab,qbc->pqac", cur, t)
            s = cur.shape
            cur = cur.reshape(s[0] * s[1], s[2], s[3])
        return np.einsum("paa->p", cur)


def promote(ds):
    """Gauged MPS from a defect system; bond dimension is the sum of the
    block bond dimensions, exactly as in the input state."""
    rep = ds.rep
    group = rep.group
    nb = len(rep.mps.blocks)
    dims = [rep.mps.blocks[x].shape[1] for x in range(nb)]
    offsets = list(np.concatenate([[0], np.cumsum(dims)]))
    m = offsets[-1]
    d = rep.d
    c = np.zeros((group.order, d, m, m), dtype=complex)
    for g in group.elements():
        for x in range(nb):
            if (g, x) not in ds.defects:
                raise MissingDefect(f"no defect tensor for ({g}, {x})")
            gx = rep.action[g][x]
            t = ds.defect(g, x)        # [M_gx, d, M_x]
            c[g, :,
              offsets[gx]:offsets[gx] + dims[gx],
              offsets[x]:offsets[x] + dims[x]] = t.transpose(1, 0, 2)
    return GaugedMps(rep=rep, tensor=c, offsets=offsets)


# ----------------------------------------------------------------------
# Gauss laws
# ----------------------------------------------------------------------
@dataclass
class GaussLaw:
    """Per-element local constraint operators.  For each g and each pair
    of gauge values (a, b), ``blocks[g][(a, b)]`` is
    (a g^-1, g b, two-site matter operator)."""

    group: object
    d: int
    blocks: dict
    variant: str = "standard"

    def dense(self, g, order="window"):
        """The operator for one element as a dense matrix (small groups /
        dimensions only).  ``order="window"`` uses the exported leg order
        (gauge_L, matter_1, matter_2, gauge_R); ``order="chain"`` uses the
        two-site chain order (gauge_1, matter_1, gauge_2, matter_2)."""
        ng, d = self.group.order, self.d
        dim = ng * d * d * ng
        if dim > 2 ** 13:
            raise TooLarge("dense Gauss-law window exceeds guard")
        op = np.zeros((ng, d, d, ng, ng, d, d, ng), dtype=complex)
        for (a, b), (an, bn, lam) in self.blocks[g].items():
            op[an, :, :, bn, a, :, :, b] = lam.reshape(d, d, d, d)
        if order == "chain":
            op = op.transpose(0, 1, 3, 2, 4, 5, 7, 6)
        return op.reshape(dim, dim)

    def representation_residual(self):
        """Max deviation of G_g G_h from G_{gh}, computed blockwise."""
        group = self.group
        worst = 0.0
        for g in group.elements():
            for h in group.elements():
                gh = group.op(g, h)
                for (a, b), (am, bm, lam_h) in self.blocks[h].items():
                    an, bn, lam_g = self.blocks[g][(am, bm)]
                    at, bt, lam_gh = self.blocks[gh][(a, b)]
                    if (an, bn) != (at, bt):
                        raise NotARepresentation(
                            "gauge relabelling does not compose")
                    worst = max(worst, float(np.linalg.norm(
                        lam_g @ lam_h - lam_gh)))
        return worst

    def unitarity_residual(self):
        d2 = self.d * self.d
        eye = np.eye(d2)
        return max(float(np.linalg.norm(lam.conj().T @ lam - eye))
                   for g in self.group.elements()
                   for (_, _, lam) in self.blocks[g].values())


def _pair_table(group, lam_r):
    """lambda^{c,d}_{a,b} = (lam_R(c,d))^+ lam_R(a,b), defined whenever
    cd = ab."""
    def op(c, dd, a, b):
        return lam_r[(c, dd)].conj().T @ lam_r[(a, b)]
    return op


def _absorb_block_independent_l(ds):
    """Fusion operators in the gauge with trivial L-symbols: each
    lambda_R(g, h) carries a free phase, and when the L-symbol does not
    depend on the block it can be divided out entirely.  Block-dependent
    L-symbols are left in place (that failure mode is the point of the
    modified construction)."""
    rep = ds.rep
    group = rep.group
    nb = len(rep.mps.blocks)
    scale = {}
    for g in group.elements():
        for h in group.elements():
            ls = [ds.action_data.L.values[(g, h, x)] for x in range(nb)]
            if any(abs(l - ls[0]) > 1e-8 for l in ls):
                # mixed rescaling would break associativity up to a
                # scalar, and with it projector commutation
                return dict(ds.lambda_r)
            scale[(g, h)] = ls[0]
    return {k: v / scale[k] for k, v in ds.lambda_r.items()}


def gauss_laws(ds, variant="standard", lam_r=None, tol=DEFAULT_TOL):
    """Gauss-law operators G_g = sum_{a,b} lambda^{a g^-1, g b}_{a,b}
    (x) |a g^-1, g b><a, b| on (gauge_L, matter_1, matter_2, gauge_R)."""
    rep = ds.rep
    group = rep.group
    if lam_r is None:
        lam_r = _absorb_block_independent_l(ds)
    pair = _pair_table(group, lam_r)
    blocks = {}
    for g in group.elements():
        gi = group.inv[g]
        bg = {}
        for a in group.elements():
            for b in group.elements():
                an, bn = group.op(a, gi), group.op(g, b)
                bg[(a, b)] = (an, bn, pair(an, bn, a, b))
        blocks[g] = bg
    law = GaussLaw(group=group, d=rep.d, blocks=blocks, variant=variant)
    res = law.representation_residual()
    if res > 1e-6:
        raise NotARepresentation(
            f"Gauss-law operators do not compose ({res:.3e})")
    if law.unitarity_residual() > 1e-6:
        raise NotARepresentation("Gauss-law operators are not unitary")
    return law


def onsite_gauss_laws(ds, omega=None, tol=DEFAULT_TOL):
    """Gauss law for onsite representations in closed form: u_g on one
    matter leg and the left/right regular representations twisted by the
    2-cocycle on the gauge legs (L^Omega_g = sum_h |gh><h| / Omega(g,h),
    R^Omega_g = sum_h |h g^-1><h| / Omega(h, g^-1)).  In chain order the
    matter leg carrying u_g is the second one of the window.

    ``omega`` defaults to the extracted L-symbols of block 0, which for an
    onsite model form exactly that 2-cocycle.
    """
    rep = ds.rep
    group = rep.group
    if any(rep.mpus[g].D != 1 for g in group.elements()):
        raise NotProportional("onsite Gauss law needs bond-1 MPUs")
    if omega is None:
        omega = {(g, h): ds.action_data.L.values[(g, h, 0)]
                 for g in group.elements() for h in group.elements()}
    d = rep.d
    blocks = {}
    for g in group.elements():
        gi = group.inv[g]
        u = rep.mpus[g].u[0, 0]
        bg = {}
        for a in group.elements():
            for b in group.elements():
                an, bn = group.op(a, gi), group.op(g, b)
                ph = omega[(a, gi)] * omega[(g, b)]
                bg[(a, b)] = (an, bn, np.kron(np.eye(d), u) / ph)
        blocks[g] = bg
    law = GaussLaw(group=group, d=d, blocks=blocks, variant="onsite")
    if law.representation_residual() > 1e-6:
        raise NotARepresentation("onsite Gauss law does not compose")
    return law


def apply_gauss(law, g, state, j, n):
    """Apply G_g at window (j, j+1) of an n-site PBC gauged state
    (indices g_1, s_1, ..., g_n, s_n)."""
    ng, d = law.group.order, law.d
    t = state.reshape([ng, d] * n)
    # bring the window to the front as (gauge_j, gauge_j+1, matter_j,
    # matter_j+1, rest)
    k = (j + 1) % n
    perm = [2 * j, 2 * k, 2 * j + 1, 2 * k + 1]
    perm += [ax for ax in range(2 * n) if ax not in perm]
    t = t.transpose(perm).copy()
    t = t.reshape(ng, ng, d * d, -1)
    out = np.zeros_like(t)
    for (a, b), (an, bn, lam) in law.blocks[g].items():
        out[an, bn] += lam @ t[a, b]
    # current axis order is (g_j, g_{j+1}, s_j, s_{j+1}, rest) = perm
    out = out.reshape([ng, ng, d, d] + [ng, d] * (n - 2))
    out = out.transpose(np.argsort(perm))
    return out.reshape(state.shape)


def check_local_invariance(gauged, law, n, tol=DEFAULT_TOL):
    """Max over sites and elements of the relative change of the gauged
    state under a single Gauss-law operator."""
    psi = gauged.dense_state(n).ravel()
    nrm = np.linalg.norm(psi)
    worst = 0.0
    for g in law.group.elements():
        for j in range(n):
            out = apply_gauss(law, g, psi, j, n)
            worst = max(worst, float(np.linalg.norm(out - psi) / nrm))
    return worst


# ----------------------------------------------------------------------
# projectors
# ----------------------------------------------------------------------
@dataclass
class ProjectorReport:
    variant: str
    hermiticity: float
    idempotency: float
    commutator: float
    commuting: bool
    invariant_dimension: int = None

    def to_json_dict(self):
        return {
            "variant": self.variant,
            "hermiticity": self.hermiticity,
            "idempotency": self.idempotency,
            "commutator": self.commutator,
            "commuting": self.commuting,
            "invariant_dimension": self.invariant_dimension,
        }


def _projector_window(law):
    """P as a dense operator on one (gauge, matter, matter, gauge)
    window."""
    group = law.group
    p = None
    for g in group.elements():
        dg = law.dense(g, order="chain")
        p = dg if p is None else p + dg
    return p / group.order


def projector_report(law, n_probe=6, seed=5, tol=DEFAULT_TOL):
    """Projector diagnostics on a three-site window: hermiticity,
    idempotency, and the norm of the commutator of projectors on
    neighbouring windows (probed on random vectors when the window is too
    large to materialize)."""
    group = law.group
    ng, d = group.order, law.d
    site = ng * d
    p = _projector_window(law)
    herm = float(np.linalg.norm(p - p.conj().T))
    idem = float(np.linalg.norm(p @ p - p))
    rng = np.random.default_rng(seed)
    comm = 0.0
    if site ** 3 <= 2 ** 12:
        p1 = np.kron(p, np.eye(site))
        p2 = np.kron(np.eye(site), p)
        comm = float(np.linalg.norm(p1 @ p2 - p2 @ p1))
    else:
        for _ in range(n_probe):
            v = (rng.standard_normal(site ** 3)
                 + 1j * rng.standard_normal(site ** 3))
            v /= np.linalg.norm(v)
            a = _apply_window(p, _apply_window(p, v, site, 1), site, 0)
            b = _apply_window(p, _apply_window(p, v, site, 0), site, 1)
            comm = max(comm, float(np.linalg.norm(a - b)) * site ** 1.5)
    return ProjectorReport(variant=law.variant, hermiticity=herm,
                           idempotency=idem, commutator=comm,
                           commuting=bool(comm < 1e-8 * site ** 2))


def _apply_window(op, v, site, pos):
    t = v.reshape(site ** pos, site * site, -1)
    return np.einsum("ab,ibj->iaj", op, t).ravel()


def invariant_subspace_dimension(law, n, tol=1e-8):
    """Rank of the product of all window projectors on an n-site ring
    (small systems only)."""
    ng, d = law.group.order, law.d
    if (ng * d) ** n > 2 ** 12:
        raise TooLarge("invariant-subspace computation exceeds guard")
    dim = (ng * d) ** n
    proj = np.eye(dim, dtype=complex)
    cols = [apply_all_projectors(law, proj[:, k], n) for k in range(dim)]
    m = np.array(cols).T
    sv = np.linalg.svd(m, compute_uv=False)
    return int(np.sum(sv > tol * max(sv[0], 1.0)))


def apply_all_projectors(law, state, n):
    out = state
    for j in range(n):
        acc = np.zeros_like(out)
        for g in law.group.elements():
            acc += apply_gauss(law, g, out, j, n)
        out = acc / law.group.order
    return out


def project_to_neutral(gauged, n):
    """Contract every gauge leg with <e|; returns the dense matter state
    (the original MPS state, exactly, by construction)."""
    ng, d = gauged.n_gauge, gauged.d
    psi = gauged.dense_state(n).reshape([ng, d] * n)
    for _ in range(n):
        psi = psi[0]            # gauge index e, then advance to next site
        psi = np.moveaxis(psi, 0, -1)
    return psi.reshape(-1)


def projection_gauging(mps_state, gauged, law, n, tol=DEFAULT_TOL):
    """Top-down gauging: dress the matter state with identity gauge fields
    and apply every window projector; report the overlap with the
    bottom-up gauged state."""
    rep = gauged.rep
    report = projector_report(law)
    if not report.commuting:
        raise NonCommutingProjectors(
            f"window projectors do not commute "
            f"(norm {report.commutator:.3e})")
    ng, d = gauged.n_gauge, gauged.d
    if (ng * d) ** n > DENSE_GUARD:
        raise TooLarge("projection gauging exceeds guard")
    full = np.zeros([ng, d] * n, dtype=complex)
    sl = tuple(s for _ in range(n) for s in (0, slice(None)))
    full[sl] = mps_state.reshape([d] * n)
    out = apply_all_projectors(law, full.reshape(-1), n)
    target = gauged.dense_state(n).ravel()
    ov = np.vdot(target, out) / (np.linalg.norm(target)
                                 * max(np.linalg.norm(out), 1e-300))
    resid = float(np.linalg.norm(
        out / max(np.linalg.norm(out), 1e-300)
        - (ov / abs(ov)) * target / np.linalg.norm(target)))
    return out, {"overlap": complex(ov), "proportional": bool(resid < 1e-8),
                 "residual": resid}


# ----------------------------------------------------------------------
# state-level (modified) gauging
# ----------------------------------------------------------------------
def check_local_orthogonality(mps, tol=DEFAULT_TOL):
    """Whether distinct blocks have orthogonal physical column spaces,
    site by site."""
    mats = [b.reshape(b.shape[0], -1) for b in mps.blocks]
    worst = 0.0
    for i, mi in enumerate(mats):
        for mj in mats[i + 1:]:
            worst = max(worst, float(np.linalg.norm(mi.conj().T @ mj)))
    return worst


def _defect_pair_map(ds, g, h, x):
    """v(g, h, x): the two-site patch of defects g[hx], h[x] as a map from
    the virtual pair (M_ghx (x) M_x) to the physical pair."""
    rep = ds.rep
    hx = rep.action[h][x]
    t1 = ds.defect(g, hx)       # [M_g.hx, d, M_hx]
    t2 = ds.defect(h, x)        # [M_hx, d, M_x]
    v = np.einsum("apm,mqb->pqab", t1, t2)
    s = v.shape
    return v.reshape(s[0] * s[1], s[2] * s[3])


def modified_fusion_operators(ds, tol=DEFAULT_TOL):
    """lambda-tilde: unitaries mapping every defect pair patch v(g, h, x)
    to the fused patch v(e, gh, x) with no L-symbol factor, completed
    deterministically on the orthogonal complement."""
    rep = ds.rep
    group = rep.group
    worst = check_local_orthogonality(rep.mps)
    if worst > 1e-8:
        raise NotLocallyOrthogonal(
            f"blocks are not locally orthogonal ({worst:.3e})")
    d = rep.d
    lam_t = {}
    for g in group.elements():
        for h in group.elements():
            gh = group.op(g, h)
            vs = np.hstack([_defect_pair_map(ds, g, h, x)
                            for x in range(len(rep.mps.blocks))])
            vt = np.hstack([_defect_pair_map(ds, 0, gh, x)
                            for x in range(len(rep.mps.blocks))])
            gram_s = vs.conj().T @ vs
            gram_t = vt.conj().T @ vt
            if np.linalg.norm(gram_s - gram_t) > 1e-6 * max(
                    np.linalg.norm(gram_s), 1.0):
                raise SpanDegenerate(
                    f"patch Gram matrices differ at ({g},{h}); no isometry "
                    "maps the source span to the target span")
            # orthonormalize the source span; carry the target with the
            # same coefficients
            q, r = np.linalg.qr(vs)
            keep = np.abs(np.diag(r)) > 1e-10 * max(
                1.0, float(np.abs(np.diag(r)).max()))
            if not np.all(keep[:int(np.sum(keep))]):
                raise SpanDegenerate(
                    f"defect patches at ({g},{h}) are rank deficient in a "
                    "non-leading position")
            k = int(np.sum(keep))
            qs = q[:, :k]
            rr = r[:k, :]
            qt, resid, *_ = np.linalg.lstsq(rr.conj().T,
                                            vt.conj().T, rcond=None)
            qt = qt.conj().T
            if np.linalg.norm(qt.conj().T @ qt - np.eye(k)) > 1e-6:
                raise SpanDegenerate(
                    f"target patches at ({g},{h}) are not isometric to the "
                    "source span")
            # deterministic completion: QR of the projected identity
            lam = qt @ qs.conj().T
            if k < d * d:
                comp_s = _complement_basis(qs)
                comp_t = _complement_basis(qt)
                lam = lam + comp_t @ comp_s.conj().T
            if np.linalg.norm(lam.conj().T @ lam - np.eye(d * d)) > 1e-6:
                raise SpanDegenerate(
                    f"lambda-tilde completion at ({g},{h}) is not unitary")
            lam_t[(g, h)] = lam
    return lam_t


def _complement_basis(q):
    """Orthonormal basis of the orthogonal complement of the columns of q,
    chosen deterministically (QR of the projected identity in index
    order)."""
    dim, k = q.shape
    qq, _ = np.linalg.qr(np.hstack([q, np.eye(dim)]))
    return qq[:, k:]


def state_level_gauging(ds, tol=DEFAULT_TOL):
    """Modified fusion operators plus the Gauss law they generate; the
    law is verified to be a representation and (by the caller) to leave
    the gauged state invariant."""
    lam_t = modified_fusion_operators(ds, tol=tol)
    law = gauss_laws(ds, variant="modified", lam_r=lam_t, tol=tol)
    return lam_t, law
