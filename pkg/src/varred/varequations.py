"""Hamiltonian fields and their variational systems along a rational curve.

Given a polynomial Hamiltonian H(q, p) with n degrees of freedom and a
particular solution whose components are rational in the independent
variable x (after a change of time scale dt = dx / sigma(x)), this module
builds the linearized flow on monomials of the variations up to a chosen
degree m.  States of degree k are the monomials delta^alpha with |alpha| = k;
blocks are ordered by decreasing degree, which makes the system matrix block
lower triangular and literally self-similar: the trailing blocks form the
order m-1 system.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .rationals import QQ, QQ0, QQ1
from .ratfun import RatFun
from .matrices import RatMat
from .gauge import SymIndex
from .expr import parse_expression
from .errors import PreconditionFailure


class MPoly:
    """Polynomial in several variables over Q, as {exponent tuple: coeff}."""

    __slots__ = ("n_vars", "terms")

    def __init__(self, n_vars: int, terms=None):
        self.n_vars = n_vars
        self.terms = {}
        if terms:
            for e, c in terms.items():
                c = QQ(c)
                if c:
                    self.terms[tuple(e)] = c

    @staticmethod
    def const(n_vars: int, value) -> "MPoly":
        return MPoly(n_vars, {(0,) * n_vars: value})

    @staticmethod
    def variable(n_vars: int, i: int) -> "MPoly":
        e = [0] * n_vars
        e[i] = 1
        return MPoly(n_vars, {tuple(e): QQ1})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def constant_value(self):
        if not self.terms:
            return QQ0
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return next(iter(self.terms.values()))

    def render(self, names) -> str:
        """Canonical text form (highest total degree first), parseable back."""
        if not self.terms:
            return "0"
        items = sorted(self.terms.items(),
                       key=lambda t: (-sum(t[0]), tuple(-e for e in t[0])))
        parts = []
        for e, c in items:
            factors = []
            for name, k in zip(names, e):
                if k == 1:
                    factors.append(name)
                elif k > 1:
                    factors.append("%s^%d" % (name, k))
            body = "*".join(factors)
            mag = abs(c)
            if not body:
                term = str(mag)
            elif mag == 1:
                term = body
            else:
                term = "%s*%s" % (mag, body)
            parts.append(("-" if c < 0 else "+", term))
        sign, term = parts[0]
        text = ("-" if sign == "-" else "") + term
        for sign, term in parts[1:]:
            text += " %s %s" % (sign, term)
        return text

    def __eq__(self, other):
        return (
            isinstance(other, MPoly)
            and self.n_vars == other.n_vars
            and self.terms == other.terms
        )

    def __repr__(self):
        return f"MPoly({self.n_vars} vars, {len(self.terms)} terms)"

    def __add__(self, other):
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, QQ0) + c
            if s:
                out[e] = s
            elif e in out:
                del out[e]
        r = MPoly(self.n_vars)
        r.terms = out
        return r

    def __neg__(self):
        r = MPoly(self.n_vars)
        r.terms = {e: -c for e, c in self.terms.items()}
        return r

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        out = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                s = out.get(e, QQ0) + ca * cb
                if s:
                    out[e] = s
                elif e in out:
                    del out[e]
        r = MPoly(self.n_vars)
        r.terms = out
        return r

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        r = MPoly.const(self.n_vars, QQ1)
        b = self
        while n:
            if n & 1:
                r = r * b
            b = b * b
            n >>= 1
        return r

    def __truediv__(self, other):
        if isinstance(other, MPoly):
            if not other.is_constant():
                raise ValueError("division by a non-constant polynomial")
            other = other.constant_value()
        c = QQ(other)
        if not c:
            raise ZeroDivisionError("division by zero")
        return self.scale(QQ1 / c)

    def scale(self, c) -> "MPoly":
        c = QQ(c)
        r = MPoly(self.n_vars)
        if c:
            r.terms = {e: v * c for e, v in self.terms.items()}
        return r

    def diff(self, i: int) -> "MPoly":
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                d = list(e)
                d[i] -= 1
                out[tuple(d)] = c * e[i]
        r = MPoly(self.n_vars)
        r.terms = out
        return r

    def eval_rational(self, point) -> RatFun:
        """Evaluate at a point with rational-function coordinates."""
        powers = [{0: RatFun.const(1)} for _ in range(self.n_vars)]

        def pw(i, k):
            cache = powers[i]
            if k not in cache:
                cache[k] = pw(i, k - 1) * point[i]
            return cache[k]

        acc = RatFun.const(0)
        for e, c in self.terms.items():
            term = RatFun.const(c)
            for i, k in enumerate(e):
                if k:
                    term = term * pw(i, k)
            acc = acc + term
        return acc


def parse_mpoly(text: str, names) -> MPoly:
    """Parse a polynomial expression in the given variable names."""
    names = list(names)
    nv = len(names)
    lookup = {nm: MPoly.variable(nv, i) for i, nm in enumerate(names)}
    return parse_expression(text, lookup.get, lambda v: MPoly.const(nv, v))


# ---- Hamiltonian structure -----------------------------------------------------


def canonical_names(dof: int):
    """Phase-space variable names, position block first: q1..qn, p1..pn."""
    return [f"q{i + 1}" for i in range(dof)] + [f"p{i + 1}" for i in range(dof)]


def hamiltonian_vector_field(h: MPoly, dof: int):
    """X_H = (dH/dp, -dH/dq) in the (q, p) ordering."""
    if h.n_vars != 2 * dof:
        raise ValueError("variable count does not match the degrees of freedom")
    field = [h.diff(dof + i) for i in range(dof)]
    field += [-h.diff(i) for i in range(dof)]
    return field


def poisson_bracket(f: MPoly, g: MPoly, dof: int) -> MPoly:
    out = MPoly(f.n_vars)
    for i in range(dof):
        out = out + f.diff(i) * g.diff(dof + i) - f.diff(dof + i) * g.diff(i)
    return out


@dataclass
class ParticularSolution:
    """A curve x -> (q(x), p(x)) with the time rescaling d/dt = sigma d/dx."""

    components: list
    sigma: RatFun


def check_solution(field, sol: ParticularSolution) -> None:
    """Verify sigma * phi' = X(phi) exactly; PreconditionFailure otherwise."""
    names = canonical_names(len(field) // 2)
    for i, xi in enumerate(field):
        lhs = sol.sigma * sol.components[i].derivative()
        rhs = xi.eval_rational(sol.components)
        if not lhs == rhs:
            raise PreconditionFailure(
                f"curve is not a solution of the Hamiltonian field: "
                f"component {names[i]} fails the substitution check"
            )


@dataclass
class HamiltonianSystem:
    dof: int
    hamiltonian: MPoly
    field: list
    solution: ParticularSolution

    @staticmethod
    def build(h: MPoly, dof: int, components, sigma: RatFun) -> "HamiltonianSystem":
        field = hamiltonian_vector_field(h, dof)
        sol = ParticularSolution(list(components), sigma)
        check_solution(field, sol)
        return HamiltonianSystem(dof, h, field, sol)


# ---- variational systems -------------------------------------------------------


def lve_block_sizes(n_vars: int, order: int):
    """Sizes of the degree blocks, highest degree first."""
    return [math.comb(n_vars + k - 1, k) for k in range(order, 0, -1)]


def lve_dimension(n_vars: int, order: int) -> int:
    return sum(lve_block_sizes(n_vars, order))


@dataclass
class BlockSystem:
    """A variational system of some order with its degree-block structure."""

    order: int
    matrix: RatMat
    block_sizes: list


def _taylor_coefficients(p: MPoly, point):
    """Nonzero (d^beta p / beta!)(point) for |beta| >= 1, as {beta: RatFun}."""
    nv = p.n_vars
    out = {}
    seen = set()
    stack = [((0,) * nv, p)]
    while stack:
        beta, q = stack.pop()
        for i in range(nv):
            d = list(beta)
            d[i] += 1
            nb = tuple(d)
            if nb in seen:
                continue
            seen.add(nb)
            dq = q.diff(i)
            if dq.is_zero:
                continue
            val = dq.eval_rational(point)
            fact = QQ1
            for k in nb:
                fact *= math.factorial(k)
            if not val.is_zero:
                out[nb] = val.scale(QQ1 / fact)
            stack.append((nb, dq))
    return out


def variational_matrix(field, sol: ParticularSolution, order: int) -> RatMat:
    """System matrix of the order-m variational equations along the curve.

    Row alpha of degree k collects (1/sigma) * alpha_i * (d^beta X_i)(phi)/beta!
    at column mu = alpha - e_i + beta, for every mu of degree between k and
    the truncation order.  Degree blocks are ordered highest first.
    """
    nv = len(field)
    indices = [SymIndex(nv, k) for k in range(order, 0, -1)]
    exps = []
    pos = {}
    for block in indices:
        for alpha in block.exponents:
            pos[alpha] = len(exps)
            exps.append(alpha)
    size = len(exps)
    out = RatMat.zeros(size, size)
    inv_sigma = RatFun.const(1) / sol.sigma
    taylor = [_taylor_coefficients(xi, sol.components) for xi in field]
    for r, alpha in enumerate(exps):
        orow = out.data[r]
        for i in range(nv):
            ai = alpha[i]
            if not ai:
                continue
            for beta, val in taylor[i].items():
                mu = tuple(a - e + b for a, e, b in zip(alpha, _unit(nv, i), beta))
                if min(mu) < 0:
                    continue
                c = pos.get(mu)
                if c is None:  # degree above the truncation order
                    continue
                orow[c] = orow[c] + (val * inv_sigma).scale(QQ(ai))
    return out


def _unit(nv, i):
    e = [0] * nv
    e[i] = 1
    return tuple(e)


def first_variational(field, sol: ParticularSolution) -> RatMat:
    """Jacobian of the field along the curve, in the rescaled time."""
    return variational_matrix(field, sol, 1)


def build_lve(system: HamiltonianSystem, order: int):
    """Variational systems of orders 1..order as BlockSystem values."""
    nv = 2 * system.dof
    out = []
    for m in range(1, order + 1):
        mat = variational_matrix(system.field, system.solution, m)
        out.append(BlockSystem(m, mat, lve_block_sizes(nv, m)))
    return out
