"""Constant and rational matrices: elimination, spans, Jordan chains."""

import random
from fractions import Fraction

import pytest

from varred.matrices import (
    ConstMat,
    RatMat,
    SpanQQ,
    charpoly,
    comm,
    const_mul_ratmat,
    coordinates_in_span,
    nilpotent_jordan_chains,
    nullspace,
    rational_eigenvalues,
    ratmat_mul_const,
)
from varred.poly import Poly
from varred.ratfun import RatFun, parse_ratfun


def rand_const(rng, n, m=None, lo=-5, hi=5):
    m = n if m is None else m
    return ConstMat([[Fraction(rng.randint(lo, hi)) for _ in range(m)]
                     for _ in range(n)])


def rand_ratmat(rng, n, deg=2):
    out = []
    for _ in range(n):
        row = []
        for _ in range(n):
            num = Poly([Fraction(rng.randint(-4, 4)) for _ in range(deg + 1)])
            den = Poly([Fraction(rng.randint(-4, 4)) for _ in range(deg)]
                       + [Fraction(1)])
            row.append(RatFun(num, den))
        out.append(row)
    return RatMat(out)


def test_const_ring_identities():
    rng = random.Random(201)
    for _ in range(100):
        n = rng.randint(1, 5)
        a = rand_const(rng, n)
        b = rand_const(rng, n)
        c = rand_const(rng, n)
        assert (a + b) * c == a * c + b * c
        assert comm(a, b) == -(comm(b, a))
        # Jacobi identity
        assert (comm(a, comm(b, c)) + comm(b, comm(c, a))
                + comm(c, comm(a, b))).is_zero


def test_spanqq_dimension_and_membership():
    rng = random.Random(202)
    for _ in range(60):
        n = rng.randint(2, 6)
        vecs = [[Fraction(rng.randint(-3, 3)) for _ in range(n)]
                for _ in range(rng.randint(1, n + 2))]
        span = SpanQQ(n)
        added = []
        for v in vecs:
            if span.add(list(v)):
                added.append(v)
        assert span.dim == len(added)
        # every original vector is inside the closed span now
        for v in vecs:
            assert not span.add(list(v))


def test_spanqq_tracked_coordinates():
    rng = random.Random(203)
    for _ in range(60):
        n = rng.randint(2, 5)
        span = SpanQQ(n, track=True)
        basis = []
        for _ in range(n):
            v = [Fraction(rng.randint(-3, 3)) for _ in range(n)]
            if span.add(list(v)):
                basis.append(v)
        if not basis:
            continue
        coeffs = [Fraction(rng.randint(-4, 4)) for _ in basis]
        target = [sum(c * v[k] for c, v in zip(coeffs, basis))
                  for k in range(n)]
        got = span.coords_in_added(list(target))
        assert got == coeffs


def test_coordinates_in_span_matches_recombination():
    rng = random.Random(204)
    for _ in range(60):
        n = rng.randint(2, 4)
        basis = [rand_const(rng, n) for _ in range(rng.randint(1, 3))]
        coeffs = [Fraction(rng.randint(-3, 3)) for _ in basis]
        target = ConstMat.zeros(n, n)
        for c, b in zip(coeffs, basis):
            target = target + b.scale(c)
        got = coordinates_in_span(target, basis)
        assert got is not None
        rebuilt = ConstMat.zeros(n, n)
        for c, b in zip(got, basis):
            rebuilt = rebuilt + b.scale(c)
        assert rebuilt == target


def test_coordinates_in_span_outside():
    e11 = ConstMat([[Fraction(1), Fraction(0)], [Fraction(0), Fraction(0)]])
    e22 = ConstMat([[Fraction(0), Fraction(0)], [Fraction(0), Fraction(1)]])
    assert coordinates_in_span(e22, [e11]) is None


def test_nullspace_vectors_annihilate():
    rng = random.Random(205)
    for _ in range(60):
        n = rng.randint(2, 5)
        m = rand_const(rng, rng.randint(1, 5), n)
        basis = nullspace([list(r) for r in m.data], n)
        span = SpanQQ(n)
        for v in basis:
            assert all(sum(row[j] * v[j] for j in range(n)) == 0
                       for row in m.data)
            assert span.add(list(v))
        # rank-nullity
        rspan = SpanQQ(n)
        for row in m.data:
            rspan.add(list(row))
        assert rspan.dim + len(basis) == n


def test_ratmat_inverse_and_det():
    rng = random.Random(206)
    done = 0
    while done < 25:
        a = rand_ratmat(rng, rng.randint(1, 3), deg=1)
        try:
            inv = a.inverse()
        except ValueError:
            assert a.det().is_zero
            continue
        n = a.rows
        ident = RatMat.identity(n)
        assert a * inv == ident
        assert inv * a == ident
        assert not a.det().is_zero
        done += 1


def test_ratmat_const_product_helpers():
    rng = random.Random(207)
    for _ in range(40):
        n = rng.randint(1, 4)
        a = rand_ratmat(rng, n, deg=1)
        c = rand_const(rng, n)
        lifted = RatMat([[RatFun(Poly([v]), Poly([1])) for v in row]
                         for row in c.data])
        assert ratmat_mul_const(a, c) == a * lifted
        assert const_mul_ratmat(c, a) == lifted * a


def test_charpoly_cayley_hamilton():
    rng = random.Random(208)
    for _ in range(40):
        n = rng.randint(1, 4)
        a = rand_const(rng, n)
        p = charpoly(a)
        acc = ConstMat.zeros(n, n)
        power = ConstMat.identity(n)
        for c in p.coeffs:
            acc = acc + power.scale(c)
            power = power * a
        assert acc.is_zero


def test_rational_eigenvalues_on_triangular():
    rng = random.Random(209)
    for _ in range(40):
        n = rng.randint(1, 5)
        a = rand_const(rng, n)
        for i in range(n):
            for j in range(i + 1, n):
                a.data[i][j] = Fraction(0)
        counts = {}
        for i in range(n):
            counts[a.data[i][i]] = counts.get(a.data[i][i], 0) + 1
        got = rational_eigenvalues(a)
        assert sorted(got) == sorted(counts.items())


def test_nilpotent_jordan_chains_random_block_shapes():
    """Chains rebuilt as psi-orbits must match the declared lengths and span
    everything; kernel elements close each chain."""
    rng = random.Random(210)
    for _ in range(40):
        sizes = sorted((rng.randint(1, 4)
                        for _ in range(rng.randint(1, 3))), reverse=True)
        n = sum(sizes)
        m = ConstMat.zeros(n, n)
        # shift blocks on the diagonal
        pos = 0
        for s in sizes:
            for k in range(s - 1):
                m.data[pos + k + 1][pos + k] = Fraction(1)
            pos += s
        # conjugate by a random invertible integer matrix to hide the basis
        while True:
            g = rand_const(rng, n, lo=-2, hi=2)
            for i in range(n):
                g.data[i][i] = g.data[i][i] + Fraction(1 + (i % 2))
            lifted = RatMat([[RatFun(Poly([v]), Poly([1])) for v in row]
                             for row in g.data])
            if not lifted.det().is_zero:
                break
        ginv = lifted.inverse().to_const()
        hidden = g * m * ginv
        chains = nilpotent_jordan_chains(hidden)
        assert sorted(chains.block_sizes, reverse=True) == sizes
        span = SpanQQ(n)
        for chain in chains.chains:
            assert len(chain) >= 1
            # chain starts at the kernel: psi(chain[0]) == 0
            head = hidden.apply(chain[0])
            assert all(v == 0 for v in head)
            for k in range(1, len(chain)):
                assert hidden.apply(chain[k]) == chain[k - 1]
            for v in chain:
                assert span.add(list(v))
        assert span.dim == n


def test_nilpotent_jordan_chains_rejects_non_nilpotent():
    m = ConstMat([[Fraction(1), Fraction(0)], [Fraction(0), Fraction(0)]])
    with pytest.raises(ValueError):
        nilpotent_jordan_chains(m)


def test_ratmat_blocks_and_submatrix():
    a = RatMat.zeros(4, 4)
    b = RatMat([[parse_ratfun("1/x"), parse_ratfun("x")],
                [parse_ratfun("0"), parse_ratfun("2")]])
    a.set_block(2, 0, b)
    assert a.submatrix(2, 4, 0, 2) == b
    assert a.submatrix(0, 2, 0, 2).is_zero
