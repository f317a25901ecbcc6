"""Wei-Norman decompositions, Lie closures, and block splitting."""

import random
from fractions import Fraction

import pytest

from varred.errors import PreconditionFailure
from varred.liealgebra import (
    DualFrame,
    adjoint_on_sub,
    coefficient_functions,
    lie_closure,
    pairwise_commute,
    split_diag_sub,
    wei_norman,
)
from varred.matrices import ConstMat, RatMat, SpanQQ, comm
from varred.poly import Poly
from varred.ratfun import RatFun, parse_ratfun


def rand_const(rng, n, m=None, lo=-3, hi=3):
    m = n if m is None else m
    return ConstMat([[Fraction(rng.randint(lo, hi)) for _ in range(m)]
                     for _ in range(n)])


def rand_ratfun(rng, deg=2):
    num = Poly([Fraction(rng.randint(-4, 4)) for _ in range(deg + 1)])
    den = Poly([Fraction(rng.randint(-4, 4)) for _ in range(deg)]
               + [Fraction(1)])
    return RatFun(num, den)


def brute_closure_dim(gens):
    """Reference Lie closure: keep bracketing every pair until stable."""
    span = SpanQQ(gens[0].rows * gens[0].cols)
    basis = []
    for g in gens:
        if span.add(g.flatten()):
            basis.append(g)
    changed = True
    while changed:
        changed = False
        for i in range(len(basis)):
            for j in range(len(basis)):
                b = comm(basis[i], basis[j])
                if span.add(b.flatten()):
                    basis.append(b)
                    changed = True
    return len(basis)


def test_wei_norman_recombines_to_input():
    rng = random.Random(301)
    for _ in range(60):
        n = rng.randint(1, 4)
        a = RatMat([[rand_ratfun(rng) for _ in range(n)] for _ in range(n)])
        wn = wei_norman(a)
        assert wn.recombine() == a


def test_wei_norman_coefficients_are_independent():
    """Decomposing a recombination of the terms never changes the count."""
    rng = random.Random(302)
    for _ in range(40):
        n = rng.randint(2, 4)
        a = RatMat([[rand_ratfun(rng) for _ in range(n)] for _ in range(n)])
        wn = wei_norman(a)
        again = wei_norman(wn.recombine())
        assert again.dim == wn.dim


def test_wei_norman_known_split():
    a = RatMat([[parse_ratfun("1/x"), parse_ratfun("1/x + x")],
                [parse_ratfun("0"), parse_ratfun("x")]])
    wn = wei_norman(a)
    assert wn.dim == 2
    assert wn.recombine() == a


def test_wei_norman_zero_matrix():
    assert wei_norman(RatMat.zeros(3, 3)).dim == 0


def test_lie_closure_matches_brute_force():
    """50 random generator pairs, closure dimension against the naive
    fixed-point reference."""
    rng = random.Random(303)
    for _ in range(50):
        n = rng.randint(2, 3)
        gens = [rand_const(rng, n, lo=-2, hi=2) for _ in range(2)]
        if all(g.is_zero for g in gens):
            continue
        lie = lie_closure(gens)
        assert lie.dim == brute_closure_dim([g for g in gens
                                             if not g.is_zero])


def test_lie_closure_structure_table():
    rng = random.Random(304)
    for _ in range(30):
        n = rng.randint(2, 3)
        gens = [rand_const(rng, n, lo=-2, hi=2) for _ in range(2)]
        if all(g.is_zero for g in gens):
            continue
        lie = lie_closure(gens)
        for (i, j), coords in lie.structure.items():
            want = comm(lie.mats[i], lie.mats[j])
            got = ConstMat.zeros(n, n)
            for c, m in zip(coords, lie.mats):
                if c:
                    got = got + m.scale(c)
            assert got == want


def test_lie_closure_abelian_detection():
    e1 = ConstMat([[Fraction(1), Fraction(0)], [Fraction(0), Fraction(0)]])
    e2 = ConstMat([[Fraction(0), Fraction(0)], [Fraction(0), Fraction(1)]])
    lie = lie_closure([e1, e2])
    assert lie.dim == 2
    assert lie.is_abelian()
    assert lie.first_noncommuting_pair() is None
    assert pairwise_commute([e1, e2])


def test_lie_closure_empty():
    assert lie_closure([]).dim == 0


def test_split_diag_sub_dimension_identity():
    """dim(span) = dim(diagonal projections) + dim(span intersect sub)."""
    rng = random.Random(305)
    for _ in range(40):
        d1 = rng.randint(1, 3)
        d2 = rng.randint(1, 3)
        n = d1 + d2
        mats = []
        for _ in range(rng.randint(1, 5)):
            m = rand_const(rng, n)
            for i in range(d1):
                for j in range(d1, n):
                    m.data[i][j] = Fraction(0)
            mats.append(m)
        span = SpanQQ(n * n)
        indep = [m for m in mats if span.add(m.flatten())]
        if not indep:
            continue
        diag_basis, sub_basis = split_diag_sub(indep, d1)
        assert len(diag_basis) + len(sub_basis) == len(indep)
        for s in sub_basis:
            # strictly sub-diagonal: zero outside the lower-left block
            for i in range(n):
                for j in range(n):
                    inside = i >= d1 and j < d1
                    assert inside or s.data[i][j] == 0
        for m in indep:
            check = SpanQQ(n * n)
            for b in diag_basis:
                check.add(b.flatten())
            # the diagonal projection of every input lies in the span
            proj = ConstMat.zeros(n, n)
            for i in range(d1):
                proj.data[i][:d1] = m.data[i][:d1]
            for i in range(d1, n):
                proj.data[i][d1:] = m.data[i][d1:]
            assert not check.add(proj.flatten()) or proj.is_zero


def test_split_diag_sub_rejects_upper_entries():
    m = ConstMat([[Fraction(0), Fraction(1)], [Fraction(0), Fraction(0)]])
    with pytest.raises(PreconditionFailure):
        split_diag_sub([m], 1)


def test_adjoint_on_sub_columns_are_bracket_coordinates():
    rng = random.Random(306)
    for _ in range(30):
        d1 = rng.randint(1, 3)
        d2 = rng.randint(1, 3)
        n = d1 + d2
        # block-diagonal generator and the full strictly-lower block space
        d0 = ConstMat.zeros(n, n)
        d0.data = rand_const(rng, n).data
        for i in range(d1):
            for j in range(d1, n):
                d0.data[i][j] = Fraction(0)
        for i in range(d1, n):
            for j in range(d1):
                d0.data[i][j] = Fraction(0)
        basis = []
        for i in range(d1, n):
            for j in range(d1):
                e = ConstMat.zeros(n, n)
                e.data[i][j] = Fraction(1)
                basis.append(e)
        psi = adjoint_on_sub(d0, basis)
        assert psi.rows == len(basis)
        for j, b in enumerate(basis):
            want = comm(d0, b)
            got = ConstMat.zeros(n, n)
            for i in range(len(basis)):
                if psi.data[i][j]:
                    got = got + basis[i].scale(psi.data[i][j])
            assert got == want


def test_dual_frame_reads_back_random_combinations():
    rng = random.Random(307)
    for _ in range(40):
        n = rng.randint(2, 4)
        k = rng.randint(1, 3)
        basis = []
        span = SpanQQ(n * n)
        while len(basis) < k:
            b = rand_const(rng, n)
            if span.add(b.flatten()):
                basis.append(b)
        funcs = [rand_ratfun(rng) for _ in range(k)]
        a = RatMat.zeros(n, n)
        for f, b in zip(funcs, basis):
            lifted = RatMat([[RatFun(Poly([v]), Poly([1])) for v in row]
                             for row in b.data])
            a = a + lifted.scale(f)
        frame = DualFrame(basis)
        assert frame.coords(a) == funcs
        assert coefficient_functions(a, basis) == funcs


def test_dual_frame_rejects_outside_matrices():
    e11 = ConstMat([[Fraction(1), Fraction(0)], [Fraction(0), Fraction(0)]])
    frame = DualFrame([e11])
    outside = RatMat([[parse_ratfun("0"), parse_ratfun("1")],
                      [parse_ratfun("0"), parse_ratfun("0")]])
    with pytest.raises(ValueError):
        frame.coords(outside)
