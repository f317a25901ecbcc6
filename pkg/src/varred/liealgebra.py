"""Decompositions of rational matrices over constant Lie algebras.

A rational matrix A(x) is written as a finite sum  A = sum_k a_k(x) * M_k
with Q-linearly independent coefficient functions a_k and constant matrices
M_k.  The Lie algebra generated by the M_k bounds what gauge transformations
can remove from A, so everything downstream starts from this decomposition.
"""
from __future__ import annotations

from dataclasses import dataclass

from .rationals import QQ0, QQ1
from .poly import Poly, poly_lcm
from .ratfun import RatFun
from .matrices import ConstMat, RatMat, SpanQQ, comm, nullspace, rref
from .errors import PreconditionFailure


@dataclass
class WeiNormanTerm:
    func: RatFun
    mat: ConstMat


class WeiNormanDecomp:
    """A(x) = sum of func_k(x) * mat_k with independent coefficient functions."""

    def __init__(self, terms, rows, cols):
        self.terms = terms
        self.rows = rows
        self.cols = cols

    @property
    def dim(self) -> int:
        return len(self.terms)

    def functions(self):
        return [t.func for t in self.terms]

    def matrices(self):
        return [t.mat for t in self.terms]

    def recombine(self) -> RatMat:
        out = RatMat.zeros(self.rows, self.cols)
        for t in self.terms:
            for i in range(self.rows):
                row = t.mat.data[i]
                orow = out.data[i]
                for j in range(self.cols):
                    if row[j]:
                        orow[j] = orow[j] + t.func.scale(row[j])
        return out


def _reduce_against(w, rows):
    """Eliminate w at every stored pivot; returns the multipliers used."""
    mults = []
    for k, (p, row) in enumerate(rows):
        c = w[p]
        if c:
            f = c / row[p]
            for idx, ri in enumerate(row):
                if ri:
                    w[idx] -= f * ri
            mults.append((k, f))
        else:
            mults.append((k, QQ0))
    return mults


def wei_norman(a: RatMat) -> WeiNormanDecomp:
    """Decompose a rational matrix as sum a_k(x) * M_k, constant M_k.

    The construction is deterministic: all nonzero entries are brought over
    their common denominator (the monic lcm), the numerator coefficient
    vectors are reduced greedily in row-major order of first appearance, and
    each nonzero residual, divided back by the common denominator, becomes a
    coefficient function.  The residuals are kept unnormalized, which makes
    the resulting functions independent of the denominator representative.
    """
    entries = []
    for i in range(a.rows):
        for j in range(a.cols):
            f = a.data[i][j]
            if not f.is_zero:
                entries.append((i, j, f))
    if not entries:
        return WeiNormanDecomp([], a.rows, a.cols)
    den = Poly.const(QQ1)
    for _, _, f in entries:
        den = poly_lcm(den, f.den)
    nums = [f.num * den.exact_div(f.den) for _, _, f in entries]
    length = max(p.degree for p in nums) + 1
    vectors = [list(p.coeffs) + [QQ0] * (length - len(p.coeffs)) for p in nums]
    rows = []  # (pivot, residual vector), in order of acceptance
    for v in vectors:
        w = list(v)
        _reduce_against(w, rows)
        piv = next((idx for idx, c in enumerate(w) if c), None)
        if piv is not None:
            rows.append((piv, w))
    mats = [ConstMat.zeros(a.rows, a.cols) for _ in rows]
    for (i, j, _), v in zip(entries, vectors):
        w = list(v)
        for k, f in _reduce_against(w, rows):
            if f:
                mats[k].data[i][j] = f
    funcs = [RatFun(Poly(row), den) for _, row in rows]
    terms = [WeiNormanTerm(f, m) for f, m in zip(funcs, mats)]
    return WeiNormanDecomp(terms, a.rows, a.cols)


# ---- Lie closure ---------------------------------------------------------------


@dataclass
class LieBasis:
    """Basis of a matrix Lie algebra over Q with its structure table.

    mats[0:n_generators] are the independent generators in input order; the
    rest are brackets in the order they were discovered.  structure maps a
    pair (i, j) with i < j to the coordinates of [mats[i], mats[j]] in mats.
    """

    mats: list
    structure: dict
    n_generators: int

    @property
    def dim(self) -> int:
        return len(self.mats)

    def is_abelian(self) -> bool:
        return all(not any(c) for c in self.structure.values())

    def first_noncommuting_pair(self):
        """Smallest (i, j) with [mats[i], mats[j]] != 0, or None."""
        for key in sorted(self.structure):
            if any(self.structure[key]):
                return key
        return None


def lie_closure(generators) -> LieBasis:
    """Smallest Lie algebra over Q containing the given constant matrices.

    Brackets are taken breadth-first in a fixed order -- pair (i, j) before
    (i', j') when (j, i) < (j', i') -- so the basis that comes out is
    reproducible.  Terminates because everything lives inside gl_n.
    """
    gens = list(generators)
    if not gens:
        return LieBasis([], {}, 0)
    span = SpanQQ(gens[0].rows * gens[0].cols, track=True)
    basis = []
    for g in gens:
        if span.add(g.flatten()):
            basis.append(g)
    n_gen = len(basis)
    structure = {}
    j = 1
    while j < len(basis):
        for i in range(j):
            b = comm(basis[i], basis[j])
            flat = b.flatten()
            if span.add(flat):
                basis.append(b)
                coords = [QQ0] * len(basis)
                coords[-1] = QQ1
                structure[(i, j)] = coords
            else:
                structure[(i, j)] = span.coords_in_added(flat)
        j += 1
    dim = len(basis)
    for key, coords in structure.items():
        if len(coords) < dim:
            structure[key] = coords + [QQ0] * (dim - len(coords))
    return LieBasis(basis, structure, n_gen)


def pairwise_commute(mats) -> bool:
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            if not comm(mats[i], mats[j]).is_zero:
                return False
    return True


# ---- block structure ------------------------------------------------------------


def split_diag_sub(mats, d1: int):
    """Split block lower-triangular matrices along the (d1, n-d1) partition.

    Returns (diag_basis, sub_basis): a basis of the projections of the input
    span onto the block-diagonal part, and a basis of its intersection with
    the strictly sub-diagonal part.  Both are full-size matrices.  The input
    matrices must be independent and block lower triangular; a nonzero entry
    in the upper-right block raises PreconditionFailure.
    """
    if not mats:
        return [], []
    n = mats[0].rows
    d2 = n - d1
    for m in mats:
        for i in range(d1):
            for j in range(d1, n):
                if m.data[i][j]:
                    raise PreconditionFailure(
                        f"matrix is not block lower triangular at the ({d1},{d2}) "
                        f"split: entry ({i + 1},{j + 1}) is nonzero"
                    )

    def diag_part(m):
        out = ConstMat.zeros(n, n)
        for i in range(d1):
            out.data[i][:d1] = m.data[i][:d1]
        for i in range(d1, n):
            out.data[i][d1:] = m.data[i][d1:]
        return out

    projs = [diag_part(m) for m in mats]
    span = SpanQQ(n * n)
    diag_basis = [p for p in projs if span.add(p.flatten())]
    # combinations whose diagonal projection vanishes stay strictly sub-diagonal
    proj_rows = [p.flatten() for p in projs]
    kernel = nullspace([list(col) for col in zip(*proj_rows)], len(mats))
    sub_basis = []
    for c in kernel:
        out = ConstMat.zeros(n, n)
        for k, ck in enumerate(c):
            if ck:
                out = out + mats[k].scale(ck)
        sub_basis.append(out)
    return diag_basis, sub_basis


def adjoint_on_sub(d0: ConstMat, sub_basis) -> ConstMat:
    """Matrix of B |-> [d0, B] in the coordinates of sub_basis.

    Column j holds the coordinates of [d0, sub_basis[j]].  The bracket must
    stay inside the span (it does whenever d0 is the diagonal projection of
    an element of a Lie algebra containing the span).
    """
    if not sub_basis:
        return ConstMat.zeros(0, 0)
    span = SpanQQ(sub_basis[0].rows * sub_basis[0].cols, track=True)
    for b in sub_basis:
        if not span.add(b.flatten()):
            raise ValueError("sub_basis is linearly dependent")
    k = len(sub_basis)
    out = ConstMat.zeros(k, k)
    for j, b in enumerate(sub_basis):
        c = span.coords_in_added(comm(d0, b).flatten())
        if c is None:
            raise PreconditionFailure(
                "bracket with the diagonal generator leaves the sub-diagonal space"
            )
        for i in range(k):
            if c[i]:
                out.data[i][j] = c[i]
    return out


class DualFrame:
    """Coordinates of rational matrices over a fixed constant basis.

    A set of pivot entry positions (one per basis element) is chosen once,
    together with the inverse of the pivot system; reading a matrix off the
    frame then costs only those entries, plus one full recombination check
    that catches matrices outside the span.
    """

    def __init__(self, basis):
        basis = list(basis)
        if not basis:
            raise ValueError("empty basis")
        self.basis = basis
        k = len(basis)
        flats = [b.flatten() for b in basis]
        span = SpanQQ(len(flats[0]))
        for f in flats:
            if not span.add(f):
                raise ValueError("basis matrices are linearly dependent")
        self.pivots = [p for p, _ in span.rows]
        aug = []
        for r in range(k):
            row = [flats[c][self.pivots[r]] for c in range(k)]
            row.extend(QQ1 if i == r else QQ0 for i in range(k))
            aug.append(row)
        red, _ = rref(aug)
        self.sinv = [row[k:] for row in red]

    def coords(self, a: RatMat, verify: bool = True):
        """Coefficients c with a = sum c_k * basis[k]; ValueError if outside."""
        k = len(self.basis)
        zero = RatFun.const(0)
        coords = []
        for r in range(k):
            acc = zero
            for c in range(k):
                s = self.sinv[r][c]
                if s:
                    i, j = divmod(self.pivots[c], a.cols)
                    acc = acc + a.data[i][j].scale(s)
            coords.append(acc)
        if verify:
            check = RatMat.zeros(a.rows, a.cols)
            for ck, b in zip(coords, self.basis):
                if ck.is_zero:
                    continue
                for i in range(a.rows):
                    brow = b.data[i]
                    crow = check.data[i]
                    for j in range(a.cols):
                        if brow[j]:
                            crow[j] = crow[j] + ck.scale(brow[j])
            if not check == a:
                raise ValueError("matrix is outside the span of the basis")
        return coords


def coefficient_functions(a: RatMat, basis):
    """Write a(x) = sum_k c_k(x) * basis[k] and return the c_k."""
    return DualFrame(basis).coords(a)
