"""Dense complex tensors with named legs.

A :class:`Tensor` is a thin wrapper around a ``numpy`` array that carries a
name for every leg.  Contractions are requested by leg name, so callers never
juggle axis positions.  The JSON form stores complex entries as ``[re, im]``
pairs in row-major order and round-trips bit exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import LegMismatch, NotProportional, ShapeMismatch

DEFAULT_TOL = 1e-9
# relative singular-value cutoff used by rank decisions and pseudo-inverses
SVD_CUTOFF = 1e-10


@dataclass
class ProportionalityResult:
    """Outcome of testing A ~= c * B.

    ``scalar`` is the least-squares coefficient <B, A> / <B, B> and
    ``residual`` is ||A - c B|| / ||B|| in Frobenius norm.
    """

    scalar: complex
    residual: float
    ok: bool


class Tensor:
    """A dense complex array with one name per leg."""

    def __init__(self, data, legs):
        data = np.asarray(data, dtype=complex)
        legs = list(legs)
        if data.ndim != len(legs):
            raise ShapeMismatch(
                f"{data.ndim} axes but {len(legs)} leg names {legs}")
        if len(set(legs)) != len(legs):
            raise LegMismatch(f"duplicate leg names in {legs}")
        self.data = data
        self.legs = legs

    @property
    def shape(self):
        return self.data.shape

    def dim(self, leg):
        return self.data.shape[self.legs.index(leg)]

    def copy(self):
        return Tensor(self.data.copy(), list(self.legs))

    def relabel(self, mapping):
        """Return a copy with legs renamed according to ``mapping``."""
        return Tensor(self.data, [mapping.get(l, l) for l in self.legs])

    def transpose(self, legs):
        """Return a copy with legs reordered to the given sequence."""
        if sorted(legs) != sorted(self.legs):
            raise LegMismatch(f"cannot reorder {self.legs} to {legs}")
        perm = [self.legs.index(l) for l in legs]
        return Tensor(self.data.transpose(perm), list(legs))

    def fuse(self, groups):
        """Reorder and reshape into one leg per group.

        ``groups`` is a list of ``(new_name, [old names])``; the new leg
        dimension is the product of the old ones, grouped in row-major order.
        """
        order = [l for _, olds in groups for l in olds]
        t = self.transpose(order)
        shape = []
        names = []
        i = 0
        for name, olds in groups:
            dim = 1
            for _ in olds:
                dim *= t.data.shape[i]
                i += 1
            shape.append(dim)
            names.append(name)
        return Tensor(t.data.reshape(shape), names)

    def split(self, leg, parts):
        """Inverse of :meth:`fuse` for one leg.

        ``parts`` is a list of ``(name, dim)`` whose dims multiply to the
        dimension of ``leg``.
        """
        ax = self.legs.index(leg)
        dims = [d for _, d in parts]
        if int(np.prod(dims)) != self.data.shape[ax]:
            raise ShapeMismatch(
                f"cannot split leg {leg} of dim {self.data.shape[ax]} "
                f"into {parts}")
        shape = (self.data.shape[:ax] + tuple(dims)
                 + self.data.shape[ax + 1:])
        legs = self.legs[:ax] + [n for n, _ in parts] + self.legs[ax + 1:]
        return Tensor(self.data.reshape(shape), legs)

    def to_matrix(self, row_legs, col_legs):
        """Flatten to a matrix with the given legs as rows and columns."""
        t = self.fuse([("__r", list(row_legs)), ("__c", list(col_legs))])
        return t.data

    @staticmethod
    def from_matrix(mat, row_parts, col_parts):
        """Rebuild a tensor from a matrix and named leg factorizations."""
        t = Tensor(np.asarray(mat, dtype=complex), ["__r", "__c"])
        t = t.split("__r", row_parts)
        return t.split("__c", col_parts)

    def dagger(self, pairs):
        """Hermitian adjoint: conjugate and swap the leg names in ``pairs``.

        ``pairs`` is a list of ``(in_name, out_name)`` tuples; each member of
        a pair is renamed to the other.  Unlisted legs keep their names.
        """
        mapping = {}
        for a, b in pairs:
            mapping[a] = b
            mapping[b] = a
        return Tensor(self.data.conj(),
                      [mapping.get(l, l) for l in self.legs])

    def norm(self):
        return float(np.linalg.norm(self.data))

    def __mul__(self, scalar):
        return Tensor(self.data * scalar, list(self.legs))

    __rmul__ = __mul__

    def __add__(self, other):
        other = other.transpose(self.legs)
        return Tensor(self.data + other.data, list(self.legs))

    def __sub__(self, other):
        other = other.transpose(self.legs)
        return Tensor(self.data - other.data, list(self.legs))

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, legs={self.legs})"

    # ------------------------------------------------------------------
    # serialization
    # ------------------------------------------------------------------
    def to_json_dict(self):
        flat = self.data.reshape(-1)
        return {
            "shape": list(self.data.shape),
            "legs": list(self.legs),
            "data": [[float(z.real), float(z.imag)] for z in flat],
        }

    @staticmethod
    def from_json_dict(d):
        shape = tuple(d["shape"])
        flat = np.array([complex(re, im) for re, im in d["data"]],
                        dtype=complex)
        if flat.size != int(np.prod(shape)) if shape else flat.size != 1:
            raise ShapeMismatch("data length does not match shape")
        return Tensor(flat.reshape(shape), d["legs"])

    def to_json(self):
        return json.dumps(self.to_json_dict())

    @staticmethod
    def from_json(s):
        return Tensor.from_json_dict(json.loads(s))


def contract(a, b, pairs, allow_shared=False):
    """Contract two tensors over the named leg ``pairs``.

    ``pairs`` is a list of ``(leg_of_a, leg_of_b)``.  The remaining legs keep
    their names; a clash between survivors raises :class:`LegMismatch` unless
    renamed first.
    """
    a_axes = []
    b_axes = []
    for la, lb in pairs:
        if la not in a.legs or lb not in b.legs:
            raise LegMismatch(f"no legs ({la}, {lb}) in {a.legs} x {b.legs}")
        ia, ib = a.legs.index(la), b.legs.index(lb)
        if a.data.shape[ia] != b.data.shape[ib]:
            raise LegMismatch(
                f"dim mismatch on ({la}, {lb}): "
                f"{a.data.shape[ia]} vs {b.data.shape[ib]}")
        a_axes.append(ia)
        b_axes.append(ib)
    out = np.tensordot(a.data, b.data, axes=(a_axes, b_axes))
    a_rest = [l for i, l in enumerate(a.legs) if i not in a_axes]
    b_rest = [l for i, l in enumerate(b.legs) if i not in b_axes]
    if set(a_rest) & set(b_rest):
        raise LegMismatch(
            f"surviving legs clash: {set(a_rest) & set(b_rest)}")
    return Tensor(out, a_rest + b_rest)


def trace(t, pairs):
    """Partial trace over named leg pairs of a single tensor."""
    data = t.data
    legs = list(t.legs)
    for la, lb in pairs:
        ia, ib = legs.index(la), legs.index(lb)
        data = np.trace(data, axis1=ia, axis2=ib)
        legs = [l for i, l in enumerate(legs) if i not in (ia, ib)]
    return Tensor(data, legs) if legs else complex(data)


def svd(t, row_legs, col_legs, cutoff=SVD_CUTOFF):
    """SVD across the named bipartition, truncating relative to sigma_max.

    Returns ``(U, s, Vh)`` where ``U`` has legs ``row_legs + ["__s"]`` and
    ``Vh`` has legs ``["__s"] + col_legs``.
    """
    mat = t.to_matrix(row_legs, col_legs)
    u, s, vh = np.linalg.svd(mat, full_matrices=False)
    if s.size and cutoff is not None:
        keep = s > cutoff * s[0]
        keep[0] = True
        u, s, vh = u[:, keep], s[keep], vh[keep]
    row_parts = [(l, t.dim(l)) for l in row_legs]
    col_parts = [(l, t.dim(l)) for l in col_legs]
    ut = Tensor(u, ["__r", "__s"]).split("__r", row_parts)
    vt = Tensor(vh, ["__s", "__c"]).split("__c", col_parts)
    return ut, s, vt


def pseudo_inverse(t, row_legs, col_legs, cutoff=SVD_CUTOFF):
    """Moore-Penrose inverse as a tensor mapping ``row_legs`` back.

    The result has the column legs first; contracting it with ``t`` over
    ``row_legs`` yields the projector onto the row space.
    """
    mat = t.to_matrix(row_legs, col_legs)
    u, s, vh = np.linalg.svd(mat, full_matrices=False)
    keep = s > cutoff * s[0] if s.size else s > 0
    inv = (vh[keep].conj().T / s[keep]) @ u[:, keep].conj().T
    row_parts = [(l, t.dim(l)) for l in row_legs]
    col_parts = [(l, t.dim(l)) for l in col_legs]
    return Tensor.from_matrix(inv, col_parts, row_parts)


def proportionality(a, b, tol=DEFAULT_TOL):
    """Test whether ``a`` equals a scalar multiple of ``b``.

    Legs are matched by name.  The fitted scalar is <b, a>/<b, b>; the
    residual is ||a - c b|| / ||b||.
    """
    a = a.transpose(b.legs)
    denom = np.vdot(b.data, b.data)
    if abs(denom) == 0:
        raise NotProportional("reference tensor is zero")
    c = np.vdot(b.data, a.data) / denom
    residual = float(np.linalg.norm(a.data - c * b.data)
                     / np.linalg.norm(b.data))
    return ProportionalityResult(complex(c), residual, residual <= tol)


def require_proportional(a, b, tol=DEFAULT_TOL, what="tensors"):
    res = proportionality(a, b, tol)
    if not res.ok:
        raise NotProportional(
            f"{what}: residual {res.residual:.3e} exceeds {tol:.1e}",
            residual=res.residual)
    return res.scalar
