"""Rational functions in one variable over Q, and the calculus on them that
the reduction steps consume: partial fractions, the Hermite split of a
function into a derivative part plus a simple-pole part, and rational
solutions of first order equations y' = gamma*y + beta.

Canonical form: numerator and denominator coprime, denominator monic.  The
add/mul routines follow the gcd-avoiding scheme of the stdlib Fraction type
(Henrici), which keeps the polynomial gcds small.
"""
from __future__ import annotations

from dataclasses import dataclass

from .rationals import QQ, QQ0, QQ1, is_integer
from .poly import (
    Poly,
    factor_irreducible,
    poly_gcd,
    poly_lcm,
    poly_xgcd,
    squarefree_decomposition,
)
from .expr import ExprError, parse_expression, poly_to_text, _is_bare_atom

_ONE = Poly((QQ1,))


class RatFun:
    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if not isinstance(num, Poly):
            num = Poly.const(num)
        if den is None:
            den = _ONE
        elif not isinstance(den, Poly):
            den = Poly.const(den)
        if den.is_zero:
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero:
            self.num, self.den = Poly(), _ONE
            return
        g = poly_gcd(num, den)
        if not g.is_one:
            num = num.exact_div(g)
            den = den.exact_div(g)
        lc = den.lc
        if lc != 1:
            inv = QQ1 / lc
            num = num.scale(inv)
            den = den.scale(inv)
        self.num, self.den = num, den

    @staticmethod
    def _raw(num: Poly, den: Poly) -> "RatFun":
        f = object.__new__(RatFun)
        f.num, f.den = num, den
        return f

    @staticmethod
    def const(c) -> "RatFun":
        return RatFun._raw(Poly.const(c), _ONE)

    @staticmethod
    def variable() -> "RatFun":
        return RatFun._raw(Poly.variable(), _ONE)

    @staticmethod
    def from_poly(p: Poly) -> "RatFun":
        return RatFun._raw(p, _ONE)

    # ---- structure -----------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    @property
    def is_constant(self) -> bool:
        return self.num.is_constant and self.den.is_one

    @property
    def is_polynomial(self) -> bool:
        return self.den.is_one

    def constant_value(self):
        if not self.is_constant:
            raise ValueError("not a constant")
        return self.num.lc

    def __bool__(self):
        return not self.num.is_zero

    def __eq__(self, other):
        return (
            isinstance(other, RatFun)
            and self.num.coeffs == other.num.coeffs
            and self.den.coeffs == other.den.coeffs
        )

    def __hash__(self):
        return hash((self.num.coeffs, self.den.coeffs))

    def __repr__(self):
        return f"RatFun({self.render()})"

    # ---- arithmetic ------------------------------------------------------

    def __add__(self, other):
        na, da = self.num, self.den
        nb, db = other.num, other.den
        if na.is_zero:
            return other
        if nb.is_zero:
            return self
        if da == db:
            num = na + nb
            if num.is_zero:
                return _ZERO
            g = poly_gcd(num, da)
            if g.is_one:
                return RatFun._raw(num, da)
            return RatFun._raw(num.exact_div(g), da.exact_div(g))
        g = poly_gcd(da, db)
        if g.is_one:
            num = na * db + nb * da
            if num.is_zero:
                return _ZERO
            return RatFun._raw(num, da * db)
        da_r = da.exact_div(g)
        db_r = db.exact_div(g)
        t = na * db_r + nb * da_r
        if t.is_zero:
            return _ZERO
        g2 = poly_gcd(t, g)
        if g2.is_one:
            return RatFun._raw(t, da_r * db)
        return RatFun._raw(t.exact_div(g2), da_r * db.exact_div(g2))

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return RatFun._raw(-self.num, self.den)

    def __mul__(self, other):
        na, da = self.num, self.den
        nb, db = other.num, other.den
        if na.is_zero or nb.is_zero:
            return _ZERO
        g1 = poly_gcd(na, db)
        if not g1.is_one:
            na = na.exact_div(g1)
            db = db.exact_div(g1)
        g2 = poly_gcd(nb, da)
        if not g2.is_one:
            nb = nb.exact_div(g2)
            da = da.exact_div(g2)
        return RatFun._raw(na * nb, da * db)

    def __truediv__(self, other):
        if other.num.is_zero:
            raise ZeroDivisionError("division by the zero rational function")
        na, da = self.num, self.den
        nb, db = other.num, other.den
        if na.is_zero:
            return _ZERO
        g1 = poly_gcd(na, nb)
        if not g1.is_one:
            na = na.exact_div(g1)
            nb = nb.exact_div(g1)
        g2 = poly_gcd(db, da)
        if not g2.is_one:
            db = db.exact_div(g2)
            da = da.exact_div(g2)
        num, den = na * db, da * nb
        lc = den.lc
        if lc != 1:
            inv = QQ1 / lc
            num, den = num.scale(inv), den.scale(inv)
        return RatFun._raw(num, den)

    def scale(self, c) -> "RatFun":
        c = QQ(c)
        if not c:
            return _ZERO
        return RatFun._raw(self.num.scale(c), self.den)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of rational function; use division")
        if n == 0:
            return RatFun.const(1)
        if self.is_zero:
            return _ZERO
        return RatFun._raw(self.num**n, self.den**n)

    def derivative(self) -> "RatFun":
        n, d = self.num, self.den
        if d.is_one:
            return RatFun._raw(n.derivative(), _ONE)
        cand = n.derivative() * d - n * d.derivative()
        if cand.is_zero:
            return _ZERO
        # common factors with d^2 all live in d * gcd(d, d')
        g = poly_gcd(cand, d * poly_gcd(d, d.derivative()))
        if g.is_one:
            return RatFun._raw(cand, d * d)
        return RatFun._raw(cand.exact_div(g), (d * d).exact_div(g))

    # ---- text ------------------------------------------------------------

    def render(self, var: str = "x") -> str:
        """Canonical expression text; integer-primitive numerator/denominator."""
        if self.is_zero:
            return "0"
        cn, n_int = self.num.primitive_int()
        cd, d_int = self.den.primitive_int()
        c = cn / cd  # rational scalar, denominator positive after this split
        num = Poly(n_int).scale(c.numerator)
        den = Poly(d_int).scale(c.denominator)
        if den.lc < 0:
            num, den = num.scale(-1), den.scale(-1)
        ns = poly_to_text(num, var)
        if den.is_one:
            return ns
        ds = poly_to_text(den, var)
        if not _is_bare_atom(ns):
            ns = f"({ns})"
        if not _is_bare_atom(ds):
            ds = f"({ds})"
        return f"{ns}/{ds}"


_ZERO = RatFun._raw(Poly(), _ONE)


def parse_ratfun(text: str, var: str = "x") -> RatFun:
    """Parse expression text into a rational function of the given variable."""

    def resolve(name):
        return RatFun.variable() if name == var else None

    return parse_expression(text, resolve, RatFun.const)


# ---- partial fractions -----------------------------------------------------


@dataclass
class PFTerm:
    factor: Poly  # monic irreducible
    power: int  # >= 1
    numerator: Poly  # deg < deg factor, nonzero


@dataclass
class PFDecomp:
    poly_part: Poly
    terms: list  # of PFTerm, deterministic order

    def recombine(self) -> RatFun:
        out = RatFun.from_poly(self.poly_part)
        for t in self.terms:
            out = out + RatFun(t.numerator, t.factor**t.power)
        return out


def partial_fractions(f: RatFun) -> PFDecomp:
    """Full partial fraction decomposition over Q.

    Terms are grouped by irreducible factor of the denominator (sorted by
    degree, then coefficient tuple) with powers descending inside each group.
    """
    polypart, rem = f.num.divmod(f.den)
    terms = []
    if not rem.is_zero:
        _, factors = factor_irreducible(f.den)
        den = f.den
        for q, mult in factors:
            qm = q**mult
            rest = den.exact_div(qm)
            # component of rem/den living over q^mult: rem * inv(rest) mod q^mult
            g, s, _ = poly_xgcd(rest, qm)
            if not g.is_one:
                raise ValueError("denominator factors not coprime")
            comp = (rem * s) % qm
            # expand comp in powers of q
            power = mult
            while not comp.is_zero and power >= 1:
                comp, low = comp.divmod(q)
                if not low.is_zero:
                    terms.append(PFTerm(q, power, low))
                power -= 1
    return PFDecomp(polypart, terms)


# ---- Hermite split ----------------------------------------------------------


@dataclass
class HermiteSplit:
    r: RatFun  # rational part: f = r' + l
    l: RatFun  # only simple poles, zero or with squarefree denominator


def hermite_split(f: RatFun) -> HermiteSplit:
    """Split f = R' + L with L having only simple poles.

    Uses the squarefree decomposition of the denominator only -- no
    irreducible factorization.  L collects the residue parts; the polynomial
    part of f integrates into R.
    """
    polypart, rem = f.num.divmod(f.den)
    r = RatFun.from_poly(polypart.antiderivative())
    l = _ZERO
    if not rem.is_zero:
        for q, mult in squarefree_decomposition(f.den):
            qm = q**mult
            rest = f.den.exact_div(qm)
            if rest.is_one:
                comp = rem
            else:
                _, s, _ = poly_xgcd(rest, qm)
                comp = (rem * s) % qm
            dq = q.derivative()
            _, s2, t2 = poly_xgcd(q, dq)  # s2*q + t2*q' = 1, q squarefree
            for j in range(mult, 1, -1):
                # comp/q^j = (-b/((j-1) q^(j-1)))' + (comp*s2 + h*q' + b'/(j-1)) / q^(j-1)
                # where comp*t2 = h*q + b
                h, b = (comp * t2).divmod(q)
                r = r + RatFun(b.scale(QQ(-1, j - 1)), q ** (j - 1))
                comp = comp * s2 + h * dq + b.derivative().scale(QQ(1, j - 1))
            hh, low = comp.divmod(q)
            r = r + RatFun.from_poly(hh.antiderivative())
            if not low.is_zero:
                l = l + RatFun(low, q)
    return HermiteSplit(r, l)


# ---- logarithmic derivative recognition -------------------------------------


def as_log_derivative(f: RatFun):
    """If f = c * w'/w with c rational and w a rational function, return (c, w).

    Otherwise None.  Normalized so the integer exponent vector of w has
    gcd 1 and positive first exponent (factors ordered as in
    partial_fractions).
    """
    if f.is_zero:
        return None
    pf = partial_fractions(f)
    if not pf.poly_part.is_zero or not pf.terms:
        return None
    lambdas = []
    factors = []
    for t in pf.terms:
        if t.power != 1:
            return None
        dq = t.factor.derivative()
        # numerator must be a rational multiple of q'
        lam = t.numerator.lc / dq.lc
        if t.numerator != dq.scale(lam):
            return None
        lambdas.append(lam)
        factors.append(t.factor)
    # write lambda_i = c * e_i with e_i coprime integers, e_1 > 0
    from math import gcd as igcd

    den_lcm = 1
    for lam in lambdas:
        d = int(lam.denominator)
        den_lcm = den_lcm * d // igcd(den_lcm, d)
    ints = [int(lam * den_lcm) for lam in lambdas]
    g = 0
    for v in ints:
        g = igcd(g, v)
    if ints[0] < 0:
        g = -g
    exps = [v // g for v in ints]
    c = QQ(g, den_lcm)
    wn, wd = _ONE, _ONE
    for q, e in zip(factors, exps):
        if e > 0:
            wn = wn * q**e
        else:
            wd = wd * q ** (-e)
    return c, RatFun._raw(wn, wd)


# ---- first order rational solutions ------------------------------------------


def _pole_order(den_factors, q):
    for fac, mult in den_factors:
        if fac == q:
            return mult
    return 0


def solve_first_order_rational(gamma: RatFun, beta: RatFun):
    """A rational solution g of g' = gamma*g + beta, or None if none exists.

    Completeness: a denominator bound is assembled from the poles of gamma
    and beta (with the usual residue refinement at simple poles of gamma),
    a degree bound from the behaviour at infinity, and the remaining linear
    system over Q is solved exactly.  Any returned solution is verified by
    substitution.
    """
    if gamma.is_zero:
        split = hermite_split(beta)
        if split.l.is_zero:
            return split.r
        return None
    _, gden_factors = factor_irreducible(gamma.den)
    _, bden_factors = factor_irreducible(beta.den)
    qs = {q: m for q, m in bden_factors}
    for q, m in gden_factors:
        qs.setdefault(q, 0)
    den_bound = _ONE
    for q in sorted(qs, key=lambda p: (p.degree, p.coeffs)):
        a = _pole_order(gden_factors, q)
        b = qs[q]
        if a >= 2:
            k = max(b - a, 0)
        else:
            k = max(b - 1, 0)
            if a == 1:
                # residue refinement: gamma ~ rho*q'/q locally allows order -rho
                gd_rest = gamma.den.exact_div(q)
                _, s, _ = poly_xgcd(gd_rest, q)
                loc = (gamma.num * s) % q
                _, sq, _ = poly_xgcd(q.derivative() % q, q)
                rho = (loc * sq) % q
                if rho.is_constant and not rho.is_zero:
                    val = -rho.lc
                    if is_integer(val) and int(val) > k:
                        k = int(val)
        if k:
            den_bound = den_bound * q**k
    # degree bound at infinity for u with g = u/den_bound
    def inf_deg(h: RatFun):
        if h.is_zero:
            return None
        return (h.num.degree if h.num.degree is not None else 0) - h.den.degree

    e = inf_deg(gamma)
    fdeg = inf_deg(beta)
    candidates = [0]
    if fdeg is not None:
        if e is not None and e >= 0:
            candidates.append(fdeg - e)
        else:
            candidates.append(fdeg + 1)
    if e == -1:
        c = gamma.num.lc / gamma.den.lc
        if is_integer(c) and int(c) > 0:
            candidates.append(int(c))
    delta = max(candidates)
    w = den_bound
    udeg = delta + (w.degree or 0)
    if udeg < 0:
        return None
    # (u'w - u w') * Gd * Bd = Gn * u * w * Bd + Bn * Gd * w^2, linear in u
    gn, gd = gamma.num, gamma.den
    bn, bd = beta.num, beta.den
    rhs_const = bn * gd * w * w
    lhs_rows = []
    wp = w.derivative()
    for i in range(udeg + 1):
        xi = Poly((QQ0,) * i + (QQ1,))
        xip = xi.derivative()
        row = (xip * w - xi * wp) * gd * bd - gn * xi * w * bd
        lhs_rows.append(row)
    ncols = 0
    for p in lhs_rows + [rhs_const]:
        if p.degree is not None:
            ncols = max(ncols, p.degree + 1)
    # solve sum u_i * lhs_rows[i] = rhs_const coefficientwise
    mat = [[QQ0] * (udeg + 1) for _ in range(ncols)]
    rhs = [QQ0] * ncols
    for i, p in enumerate(lhs_rows):
        for k, ck in enumerate(p.coeffs):
            mat[k][i] = ck
    for k, ck in enumerate(rhs_const.coeffs):
        rhs[k] = ck
    sol = _solve_linear(mat, rhs)
    if sol is None:
        return None
    u = Poly(sol)
    g = RatFun(u, w)
    if g.derivative() != gamma * g + beta:
        return None
    return g


def _solve_linear(mat, rhs):
    """One exact solution of mat*x = rhs over Q (free variables set to 0)."""
    m = len(mat)
    n = len(mat[0]) if m else 0
    rows = [list(r) + [v] for r, v in zip(mat, rhs)]
    pivots = []
    rank = 0
    for col in range(n):
        piv = None
        for r in range(rank, m):
            if rows[r][col]:
                piv = r
                break
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        pr = rows[rank]
        inv = QQ1 / pr[col]
        for j in range(col, n + 1):
            pr[j] = pr[j] * inv
        for r in range(m):
            if r != rank and rows[r][col]:
                f = rows[r][col]
                for j in range(col, n + 1):
                    rows[r][j] -= f * pr[j]
        pivots.append(col)
        rank += 1
    for r in range(rank, m):
        if rows[r][n]:
            return None
    x = [QQ0] * n
    for r, col in enumerate(pivots):
        x[col] = rows[r][n]
    return x
