"""Partial reduction of block-triangular variational systems.

The entry point is reduce_variational_tower, which walks the orders of a
variational hierarchy: at each order the diagonal blocks are reduced by
recycling the gauges of the lower orders, and the subdiagonal block is then
cleaned generator by generator along the adjoint chains of the diagonal
term.  Every gauge applied on the way is recorded as a ReductionStep, so a
report can be replayed: composing the recorded gauges and applying them to
the initial matrix reproduces the final matrix exactly.

What cannot be removed is kept honestly: Hermite residues with simple poles
stay as coefficients of their generators, and they are what a later
obstruction certificate points at.
"""

import time
from dataclasses import dataclass, field

from .errors import PreconditionFailure, ReductionTimeout, UnsupportedRegime
from .gauge import (
    GaugeMatrix,
    apply_gauge,
    block_diag_gauge,
    exp_sub_nilpotent,
    sym_power_group,
)
from .liealgebra import (
    DualFrame,
    LieBasis,
    WeiNormanDecomp,
    adjoint_on_sub,
    lie_closure,
    split_diag_sub,
    wei_norman,
)
from .matrices import (
    ConstMat,
    RatMat,
    SpanQQ,
    comm,
    const_mul_ratmat,
    coordinates_in_span,
    nilpotent_jordan_chains,
    nullspace,
    rational_eigenvalues,
    ratmat_mul_const,
)
from .poly import Poly, factor_irreducible
from .rationals import QQ0, QQ1
from .ratfun import (
    RatFun,
    as_log_derivative,
    hermite_split,
    solve_first_order_rational,
)
from .varequations import BlockSystem, build_lve

_RF_ZERO = RatFun.const(0)
_RF_ONE = RatFun.const(1)


# ---- recorded steps ----------------------------------------------------------


@dataclass
class ReductionStep:
    """One recorded frame change (or the refusal to make one).

    kind is "diagonal-assembly" for the block-diagonal gauge that recycles
    the lower-order reductions, "chain-removal" when a generator coefficient
    was removed completely, and "hermite-partial" when only the derivative
    part could be removed and a simple-pole residue stays behind.  A step
    with gauge None changed nothing (unresolved, or residue-only).
    """

    kind: str
    gauge: GaugeMatrix | None = None
    generator: ConstMat | None = None
    removed_generator: ConstMat | None = None
    solved_g: RatFun | None = None
    residual_l: RatFun | None = None
    new_poles: list = field(default_factory=list)
    note: str = ""


@dataclass
class ObstructionCertificate:
    """A re-checkable witness that the final Lie algebra is non-abelian.

    witness holds two basis matrices of the final algebra whose commutator
    is the (nonzero) bracket; residuals lists the simple-pole coefficient
    parts that could not be integrated away during the reduction.
    """

    witness_indices: tuple
    witness: tuple
    bracket: ConstMat
    residuals: list


@dataclass
class TowerElement:
    """One step of the formal integral tower over the base field.

    integrand_coeff * integrand_symbol (or just the coefficient when the
    symbol is None) is the derivative of the new symbol `name`.  depth
    counts the nesting of symbols; recognized_as is a cosmetic tag
    ("log", "polylog-k" or "unclassified") and argument the function the
    tag refers to.
    """

    name: str
    depth: int
    integrand_coeff: RatFun
    integrand_symbol: str | None
    recognized_as: str
    argument: RatFun | None = None

    def integrand_text(self, var: str = "x") -> str:
        text = self.integrand_coeff.render(var)
        if self.integrand_symbol is not None:
            text = "(%s) * %s" % (text, self.integrand_symbol)
        return text


@dataclass
class ReductionReport:
    """Everything the reduction of one order produced.

    system.matrix is the matrix the recorded gauges start from; composing
    the step gauges in order and applying the result to it reproduces
    final_matrix exactly.
    """

    order: int
    system: BlockSystem
    steps: list
    final_matrix: RatMat
    final_wei_norman: WeiNormanDecomp
    final_lie: LieBasis
    abelian: bool
    reduced_certified: bool
    certificate: ObstructionCertificate | None
    verdict: str
    tower: list | None
    total_gauge: GaugeMatrix
    initial_wei_norman_dim: int
    initial_lie_dim: int
    diag_dim: int
    sub_dim: int
    jordan_block_sizes: list
    residual_pole_factors: list


# ---- small helpers -----------------------------------------------------------


def _check_deadline(deadline):
    if deadline is not None and time.monotonic() > deadline:
        raise ReductionTimeout("time budget exhausted during reduction")


def _diag_projection(a: RatMat, d1: int) -> RatMat:
    out = RatMat.zeros(a.rows, a.cols)
    out.set_block(0, 0, a.submatrix(0, d1, 0, d1))
    out.set_block(d1, d1, a.submatrix(d1, a.rows, d1, a.cols))
    return out


def _sub_projection(a: RatMat, d1: int) -> RatMat:
    out = RatMat.zeros(a.rows, a.cols)
    out.set_block(d1, 0, a.submatrix(d1, a.rows, 0, d1))
    return out


def _const_sub_projection(m: ConstMat, d1: int) -> ConstMat:
    out = ConstMat.zeros(m.rows, m.cols)
    for i in range(d1, m.rows):
        for j in range(d1):
            out.data[i][j] = m.data[i][j]
    return out


def _working_sub_space(d0: ConstMat, closure_mats, sub_basis, d1: int):
    """Ambient space for the chain elimination, closed under ad(d0).

    The subdiagonal part of the system lives in the span of the sub
    projections of the algebra, which can be strictly bigger than the
    algebra's own subdiagonal part (the pure diagonal generator need not be
    an algebra element).  Seeding with sub_basis keeps those vectors as the
    leading basis elements whenever they already span everything.
    """
    n = d0.rows
    span = SpanQQ(n * n)
    basis = []
    queue = list(sub_basis) + [_const_sub_projection(b, d1) for b in closure_mats]
    i = 0
    while i < len(queue):
        w = queue[i]
        i += 1
        if w.is_zero or not span.add(w.flatten()):
            continue
        basis.append(w)
        queue.append(comm(d0, w))
    return basis


def _new_pole_factors(l: RatFun, beta0: RatFun):
    """Irreducible factors of den(l) that den(beta0) does not already carry."""
    if l is None or l.is_zero:
        return []
    base = beta0.den
    out = []
    for q, _ in factor_irreducible(l.den)[1]:
        if not (base % q).is_zero:
            out.append(q)
    return out


def _pole_factor_set(funcs):
    """Sorted irreducible denominator factors across a list of functions."""
    seen = []
    for f in funcs:
        for q, _ in factor_irreducible(f.den)[1]:
            if q not in seen:
                seen.append(q)
    seen.sort(key=lambda p: (p.degree, p.coeffs))
    return seen


def _compose_steps(n: int, steps) -> GaugeMatrix:
    total = None
    for st in steps:
        if st.gauge is None:
            continue
        if total is None:
            total = st.gauge
        elif st.generator is not None and st.solved_g is not None:
            # total . (Id + g C) touches only the columns C feeds
            p = total.p + ratmat_mul_const(total.p, st.generator).scale(st.solved_g)
            p_inv = total.p_inv - const_mul_ratmat(
                st.generator, total.p_inv
            ).scale(st.solved_g)
            total = GaugeMatrix(p, p_inv, check=False)
        else:
            total = total.compose(st.gauge)
    return total if total is not None else GaugeMatrix.identity(n)


# ---- diagonal assembly ---------------------------------------------------------


def reduce_diagonal(system: BlockSystem, p1: GaugeMatrix, p_prev: GaugeMatrix | None):
    """Reduce the diagonal blocks of one order by recycling lower gauges.

    The top block is conjugated by the symmetric power of the first-order
    gauge, the trailing blocks by the full gauge of the previous order.
    Returns the partially reduced system together with the recorded step.
    """
    m = system.order
    if m == 1:
        q = p1
    else:
        if p_prev is None:
            raise PreconditionFailure(
                "diagonal assembly at order %d needs the gauge of order %d"
                % (m, m - 1)
            )
        top = GaugeMatrix(
            sym_power_group(p1.p, m), sym_power_group(p1.p_inv, m), check=False
        )
        q = block_diag_gauge([top, p_prev])
    if q.p.rows != system.matrix.rows:
        raise PreconditionFailure(
            "diagonal gauge size %d does not match system size %d"
            % (q.p.rows, system.matrix.rows)
        )
    reduced = apply_gauge(system.matrix, q)
    step = ReductionStep(kind="diagonal-assembly", gauge=q)
    return BlockSystem(m, reduced, list(system.block_sizes)), step


# ---- one elimination gauge -----------------------------------------------------


def remove_generator(
    a: RatMat,
    d1: int,
    beta0: RatFun,
    subframe: DualFrame,
    index: int,
    lam=QQ0,
    coords=None,
):
    """Try to remove the coefficient of one subdiagonal generator.

    The generator is subframe.basis[index]; lam is the eigenvalue of the
    diagonal adjoint on it.  For lam = 0 the Hermite split removes the
    derivative part and keeps the simple-pole residue; for lam != 0 a full
    rational solution of g' = lam*beta0*g + coeff is required, and when none
    exists the generator is retained and the step marked unresolved.

    Returns (new matrix, step, coordinates of the new subdiagonal part).
    Postconditions are checked: the target coefficient equals the recorded
    residue and the diagonal blocks are untouched.
    """
    if coords is None:
        coords = subframe.coords(_sub_projection(a, d1))
    gen = subframe.basis[index]
    coeff = coords[index]
    if coeff.is_zero:
        return a, ReductionStep(kind="chain-removal", generator=gen), coords

    if lam != QQ0:
        g = solve_first_order_rational(beta0.scale(lam), coeff)
        if g is None:
            step = ReductionStep(
                kind="unresolved",
                generator=gen,
                note="no rational solution of g' = (%s) g + (%s); generator retained"
                % (beta0.scale(lam).render(), coeff.render()),
            )
            return a, step, coords
        expected = _RF_ZERO
        residual = None
        kind = "chain-removal"
    else:
        split = hermite_split(coeff)
        g = split.r
        expected = split.l
        residual = None if split.l.is_zero else split.l
        kind = "chain-removal" if residual is None else "hermite-partial"
        if g.is_zero:
            # nothing to gauge away; the whole coefficient is already residue
            step = ReductionStep(
                kind=kind,
                generator=gen,
                residual_l=residual,
                new_poles=_new_pole_factors(residual, beta0),
            )
            return a, step, coords

    p = exp_sub_nilpotent(g, gen)
    a2 = apply_gauge(a, p)
    coords2 = subframe.coords(_sub_projection(a2, d1))
    if coords2[index] != expected:
        raise RuntimeError(
            "elimination postcondition failed: coefficient %d is %r, expected %r"
            % (index, coords2[index], expected)
        )
    if _diag_projection(a2, d1) != _diag_projection(a, d1):
        raise RuntimeError("elimination postcondition failed: diagonal moved")
    step = ReductionStep(
        kind=kind,
        gauge=p,
        generator=gen,
        removed_generator=gen if residual is None else None,
        solved_g=g,
        residual_l=residual,
        new_poles=_new_pole_factors(residual, beta0),
    )
    return a2, step, coords2


def reduce_jordan_block(
    a: RatMat,
    d1: int,
    beta0: RatFun,
    subframe: DualFrame,
    positions,
    lam=QQ0,
    deadline=None,
    coords=None,
):
    """Clean one adjoint chain from its top position downwards.

    positions indexes the chain inside subframe.basis, kernel element first.
    Working downwards means a gauge at position s only feeds position s-1,
    which is handled next, so nothing is ever re-introduced.  Returns the
    new matrix, the recorded steps and the current coordinates.
    """
    steps = []
    for s in range(len(positions) - 1, -1, -1):
        _check_deadline(deadline)
        a, step, coords = remove_generator(
            a, d1, beta0, subframe, positions[s], lam=lam, coords=coords
        )
        if step.gauge is not None or step.residual_l is not None or step.note:
            steps.append(step)
    return a, steps, coords


# ---- eigen-structure of the diagonal adjoint -----------------------------------


def _eigen_chains(psi: ConstMat):
    """Jordan chain vectors of psi, grouped as (eigenvalue, chain) pairs.

    Chains are coordinate vectors ordered kernel-first.  All eigenvalues
    must be rational; a single eigenvalue zero takes the direct nilpotent
    route, otherwise each generalized eigenspace is split off separately.
    """
    n = psi.rows
    if n == 0:
        return []
    eigen = rational_eigenvalues(psi)
    if len(eigen) == 1 and eigen[0][0] == 0:
        return [(QQ0, ch) for ch in nilpotent_jordan_chains(psi).chains]
    out = []
    eye = ConstMat.identity(n)
    for lam, mult in eigen:
        shifted = psi - eye.scale(lam)
        power = shifted
        for _ in range(mult - 1):
            power = power * shifted
        vecs = nullspace(power.data, n)
        span = SpanQQ(n, track=True)
        for v in vecs:
            span.add(v)
        k = len(vecs)
        cols = []
        for v in vecs:
            image = shifted.apply(v)
            c = span.coords_in_added(image)
            if c is None:
                raise RuntimeError("generalized eigenspace is not invariant")
            cols.append(c)
        restriction = ConstMat([[cols[j][i] for j in range(k)] for i in range(k)])
        for ch in nilpotent_jordan_chains(restriction).chains:
            chain_vecs = []
            for u in ch:
                vec = [QQ0] * n
                for l, ul in enumerate(u):
                    if ul:
                        base = vecs[l]
                        for t in range(n):
                            if base[t]:
                                vec[t] += ul * base[t]
                chain_vecs.append(vec)
            out.append((lam, chain_vecs))
    return out


def _chain_matrices(chain_vecs, sub_basis):
    mats = []
    for v in chain_vecs:
        m = ConstMat.zeros(sub_basis[0].rows, sub_basis[0].cols)
        for k, c in enumerate(v):
            if c:
                m = m + sub_basis[k].scale(c)
        mats.append(m)
    return mats


# ---- the subdiagonal driver -----------------------------------------------------


def reduce_subdiagonal(
    system: BlockSystem,
    pre_steps=(),
    initial_matrix: RatMat | None = None,
    deadline=None,
) -> ReductionReport:
    """Reduce the subdiagonal block of a system whose diagonal is reduced.

    The Lie algebra generated by the coefficient matrix is split along the
    block-diagonal; a single diagonal generator is required (anything bigger
    raises UnsupportedRegime).  Its adjoint organizes the subdiagonal
    generators into chains, each cleaned top-down with one gauge per
    position.  The returned report carries the full recorded trace; when
    pre_steps are given (the diagonal assembly), initial_matrix must be the
    matrix those steps start from.
    """
    a0 = system.matrix
    n = a0.rows
    d1 = system.block_sizes[0]
    steps = list(pre_steps)
    _check_deadline(deadline)

    wn0 = wei_norman(a0)
    lie0 = lie_closure(wn0.matrices())
    diag_basis, sub_basis = split_diag_sub(lie0.mats, d1)
    if len(diag_basis) > 1:
        raise UnsupportedRegime(
            "diagonal algebra is not monogenous (dimension %d)" % len(diag_basis)
        )

    a = a0
    jordan_sizes = []
    if diag_basis:
        work_basis = _working_sub_space(diag_basis[0], lie0.mats, sub_basis, d1)
    else:
        work_basis = list(sub_basis)
    if diag_basis and work_basis:
        d0 = diag_basis[0]
        diag_frame = DualFrame([d0])
        beta0 = diag_frame.coords(_diag_projection(a, d1))[0]
        psi = adjoint_on_sub(d0, work_basis)
        chains = _eigen_chains(psi)
        chains.sort(key=lambda t: -len(t[1]))
        jordan_sizes = [len(ch) for _, ch in chains]
        chain_mats = []
        chain_slices = []
        for lam, ch in chains:
            mats = _chain_matrices(ch, work_basis)
            start = len(chain_mats)
            chain_mats.extend(mats)
            chain_slices.append((lam, list(range(start, start + len(mats)))))
        # sanity: the chain matrices realize the adjoint action
        for lam, pos in chain_slices:
            for s, idx in enumerate(pos):
                want = chain_mats[idx].scale(lam)
                if s > 0:
                    want = want + chain_mats[pos[s - 1]]
                if comm(d0, chain_mats[idx]) != want:
                    raise RuntimeError("adjoint chain relation failed")
        subframe = DualFrame(chain_mats)
        coords = None
        for lam, pos in chain_slices:
            _check_deadline(deadline)
            a, chain_steps, coords = reduce_jordan_block(
                a, d1, beta0, subframe, pos, lam=lam, deadline=deadline, coords=coords
            )
            steps.extend(chain_steps)
    elif work_basis:
        # zero diagonal: every generator is its own chain, pure antidifferentiation
        beta0 = _RF_ZERO
        jordan_sizes = [1] * len(work_basis)
        subframe = DualFrame(work_basis)
        coords = None
        for idx in range(len(work_basis)):
            _check_deadline(deadline)
            a, step, coords = remove_generator(
                a, d1, beta0, subframe, idx, coords=coords
            )
            if step.gauge is not None or step.residual_l is not None or step.note:
                steps.append(step)

    wn_final = wei_norman(a)
    lie_final = lie_closure(wn_final.matrices())
    abelian = lie_final.is_abelian()

    tower = None
    try:
        tower = picard_vessiot_tower(a)
    except UnsupportedRegime:
        tower = None
    certified = tower is not None and len(tower) == lie_final.dim

    initial = initial_matrix if initial_matrix is not None else a0
    report = ReductionReport(
        order=system.order,
        system=BlockSystem(system.order, initial, list(system.block_sizes)),
        steps=steps,
        final_matrix=a,
        final_wei_norman=wn_final,
        final_lie=lie_final,
        abelian=abelian,
        reduced_certified=certified,
        certificate=None,
        verdict="",
        tower=tower,
        total_gauge=_compose_steps(n, steps),
        initial_wei_norman_dim=wn0.dim,
        initial_lie_dim=lie0.dim,
        diag_dim=len(diag_basis),
        sub_dim=len(sub_basis),
        jordan_block_sizes=jordan_sizes,
        residual_pole_factors=_pole_factor_set(wn_final.functions()),
    )
    report.certificate = detect_obstruction(report)
    report.verdict = _verdict(report)
    return report


def _verdict(report: ReductionReport) -> str:
    if report.abelian:
        return "abelian: no obstruction at this order"
    if report.reduced_certified:
        return (
            "non-integrable: the final Lie algebra is non-abelian "
            "in a certified reduced form"
        )
    return "non-abelianity -- candidate obstruction (reduced form not certified)"


# ---- certification and obstruction ----------------------------------------------


def certify_monogenous_reduced(a: RatMat) -> bool:
    """True when a = f(x) M with a single generator and non-integrable f.

    The Hermite residue of the only coefficient must be nonzero; otherwise
    the remaining coefficient integrates rationally and the system is not in
    reduced form (one more gauge would trivialize it).
    """
    wn = wei_norman(a)
    if wn.dim != 1:
        return False
    return not hermite_split(wn.terms[0].func).l.is_zero


def detect_obstruction(report: ReductionReport):
    """Build the non-abelianity certificate for a report, or None."""
    if report.abelian:
        return None
    i, j = report.final_lie.first_noncommuting_pair()
    mats = report.final_lie.mats
    bracket = comm(mats[i], mats[j])
    residuals = [
        st.residual_l
        for st in report.steps
        if st.residual_l is not None and not st.residual_l.is_zero
    ]
    return ObstructionCertificate(
        witness_indices=(i, j),
        witness=(mats[i], mats[j]),
        bracket=bracket,
        residuals=residuals,
    )


# ---- formal integral tower ------------------------------------------------------


def _classify_integrand(coeff: RatFun, base: TowerElement | None):
    """Cosmetic tag for a new tower symbol: log, polylog ladder, or neither."""
    if base is None:
        lg = as_log_derivative(coeff)
        if lg is not None:
            return "log", lg[1]
        return "unclassified", None
    if base.recognized_as == "log" and base.argument is not None:
        u = base.argument - _RF_ONE
        if not u.is_zero and u.num.lc < 0:
            u = -u
        level = 2
    elif base.recognized_as.startswith("polylog-") and base.argument is not None:
        u = base.argument
        level = int(base.recognized_as.split("-")[1]) + 1
    else:
        return "unclassified", None
    du = u.derivative()
    if u.is_zero or du.is_zero:
        return "unclassified", None
    ratio = coeff * u / du
    if ratio.is_constant:
        return "polylog-%d" % level, u
    return "unclassified", None


class _TowerBuilder:
    def __init__(self):
        self.elements = []
        self.by_name = {}

    def new_symbol(self, coeff: RatFun, symbol: str | None) -> str:
        base = self.by_name[symbol] if symbol is not None else None
        depth = 1 if base is None else base.depth + 1
        tag, argument = _classify_integrand(coeff, base)
        name = "I%d" % (len(self.elements) + 1)
        el = TowerElement(
            name=name,
            depth=depth,
            integrand_coeff=coeff,
            integrand_symbol=symbol,
            recognized_as=tag,
            argument=argument,
        )
        self.elements.append(el)
        self.by_name[name] = el
        return name

    def _key_order(self, key):
        return (-1,) if key is None else (self.elements.index(self.by_name[key]),)

    def primitive(self, formal: dict) -> dict:
        """Formal antiderivative of {symbol: coefficient}, naming new symbols.

        Pure rational parts are Hermite-split so only simple-pole residues
        become integrands; products with an existing symbol always get a
        fresh symbol one level deeper.
        """
        out = {}
        for key in sorted(formal, key=self._key_order):
            coeff = formal[key]
            if coeff.is_zero:
                continue
            if key is None:
                split = hermite_split(coeff)
                if not split.r.is_zero:
                    out[None] = out.get(None, _RF_ZERO) + split.r
                if not split.l.is_zero:
                    out[self.new_symbol(split.l, None)] = _RF_ONE
            else:
                out[self.new_symbol(coeff, key)] = _RF_ONE
        return out


def picard_vessiot_tower(final: RatMat):
    """Integral tower splitting the solutions of a reduced system.

    Requires the coefficient matrix to have a leading generator whose
    adjoint acts nilpotently on the remaining basis of the Lie algebra,
    all of whose elements commute with each other.  Eliminating the
    non-leading coefficients top-down along the adjoint chains then only
    ever needs antiderivatives, and each one that is not rational becomes a
    named tower symbol.  Raises UnsupportedRegime when the structure does
    not have this shape.
    """
    wn = wei_norman(final)
    if wn.dim == 0:
        return []
    lie = lie_closure(wn.matrices())
    basis = lie.mats
    nb = lie.dim

    chosen = None
    for cand in range(nb):
        ok = True
        for i in range(nb):
            if i == cand or not ok:
                continue
            for j in range(i + 1, nb):
                if j == cand:
                    continue
                if not comm(basis[i], basis[j]).is_zero:
                    ok = False
                    break
        if not ok:
            continue
        others = [k for k in range(nb) if k != cand]
        cols = []
        for k in others:
            coords = coordinates_in_span(comm(basis[cand], basis[k]), basis)
            if coords is None or coords[cand]:
                ok = False
                break
            cols.append([coords[o] for o in others])
        if not ok:
            continue
        ad = ConstMat(
            [[cols[j][i] for j in range(len(others))] for i in range(len(others))]
        )
        try:
            chains = nilpotent_jordan_chains(ad).chains
        except UnsupportedRegime:
            continue
        chosen = (cand, others, chains)
        break
    if chosen is None:
        raise UnsupportedRegime(
            "final system lacks the nilpotent adjoint-chain structure "
            "needed for the integral tower"
        )
    cand, others, chains = chosen

    gens = []
    for ch in chains:
        for u in ch:
            m = ConstMat.zeros(final.rows, final.cols)
            for l, ul in enumerate(u):
                if ul:
                    m = m + basis[others[l]].scale(ul)
            gens.append(m)
    for g in gens:
        if not (g * g).is_zero:
            raise UnsupportedRegime("tower gauges need square-zero generators")
        for b in basis:
            if not (g * (b * g)).is_zero:
                raise UnsupportedRegime("tower gauges need isolated generators")

    frame = DualFrame([basis[cand]] + gens) if gens else DualFrame([basis[cand]])
    coords = frame.coords(final)
    beta = coords[0]

    builder = _TowerBuilder()
    lead_split = hermite_split(beta)
    if not lead_split.l.is_zero:
        builder.new_symbol(lead_split.l, None)

    formal = [{None: c} if not c.is_zero else {} for c in coords[1:]]
    pos = 0
    for ch in chains:
        idxs = list(range(pos, pos + len(ch)))
        pos += len(ch)
        for s in range(len(ch) - 1, -1, -1):
            cur = formal[idxs[s]]
            if not cur:
                continue
            prim = builder.primitive(cur)
            formal[idxs[s]] = {}
            if s > 0:
                target = formal[idxs[s - 1]]
                for key, val in prim.items():
                    add = beta * val
                    if add.is_zero:
                        continue
                    target[key] = target.get(key, _RF_ZERO) + add
                    if target[key].is_zero:
                        del target[key]
    if any(formal):
        raise RuntimeError("formal elimination left coefficients behind")
    return builder.elements


# ---- the full pipeline -----------------------------------------------------------


def reduce_block_systems(systems, p1: GaugeMatrix, max_seconds=None):
    """Reduce a nested family of block systems, given lowest order first.

    p1 reduces the first-order system; higher orders reuse it through
    symmetric powers together with the accumulated gauge of the previous
    order.  Returns one ReductionReport per order, lowest first.
    """
    deadline = None
    if max_seconds is not None:
        deadline = time.monotonic() + max_seconds
    reports = []
    prev_gauge = None
    for bs in systems:
        _check_deadline(deadline)
        partial, step = reduce_diagonal(bs, p1, prev_gauge)
        report = reduce_subdiagonal(
            partial, pre_steps=[step], initial_matrix=bs.matrix, deadline=deadline
        )
        reports.append(report)
        prev_gauge = report.total_gauge
    return reports


def reduce_variational_tower(system, order: int, p1: GaugeMatrix, max_seconds=None):
    """Build and reduce the variational systems of a Hamiltonian up to order."""
    return reduce_block_systems(build_lve(system, order), p1, max_seconds)
