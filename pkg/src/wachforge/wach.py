"""Wach-module matrices: the specialised Frobenius matrix Pi and the Gamma-action G.

The defining equation is ``Pi * phi(G) = G * gamma(Pi)`` in ``M_2`` of the
product series ring, with ``G = Id mod pi``.  Writing ``G = G_known + pi^d H``
with ``H`` constant, the degree-``d`` coefficient of the defect
``G*gamma(Pi) - Pi*phi(G)`` changes by ``H[j] P[j] - p^d P[j] H[j+1]`` in
coordinate ``j`` (``P = Pi mod pi``).  Degrees below ``k_max`` are solved as a
coupled ``4f``-unknown system over O_E; from ``k_max`` on the system is
rewritten as ``H[j] - P[j] H[j+1] T[j] = Rbar[j]`` with
``T[j] = p^d P[j]^{-1}`` integral and consolidated to four unknowns.

Solving happens in a working context carrying ``guard`` extra p-adic digits;
a conservative running loss is tracked and the solve is repeated with more
guard digits when the loss could reach the reported precision.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .family import (TypedMatrixFamily, adj2_raw, det2_raw, identity_raw,
                     mat_add_raw, mat_mul_raw, mat_scale_raw, position_of,
                     type_shape)
from .padic import INF, GlobalContext, NoSolution, PrecisionError, solve_linear_raw
from .series import Series, TauMatrix, apply_gamma, apply_phi, q_element


class Obstruction(Exception):
    """No integral degree-d coefficient exists for the current z choice."""

    def __init__(self, degree: int, detail: str, z=None):
        super().__init__(f"degree {degree}: {detail}")
        self.degree = degree
        self.detail = detail
        self.z = z


# ---------------------------------------------------------------------------
# Pi


@dataclass
class PiData:
    ctx: GlobalContext
    family: TypedMatrixFamily
    a: list                     # per position, raw O_E elements in m_E
    z: list                     # per position, integer coefficient lists
    Pi: TauMatrix               # coordinate j holds Pi_{j+1}
    A_hat: TauMatrix | None = None

    @property
    def f(self) -> int:
        return self.family.f

    def P(self) -> list:
        """Pi mod pi as raw matrices per coordinate."""
        return self.Pi.coeff(0)

    def at(self, ctx: GlobalContext) -> "PiData":
        """Rebuild at another precision (same parameters)."""
        out = build_pi(ctx, self.family, self.a, self.z)
        if self.A_hat is not None:
            Ah = self.A_hat.with_context(ctx)
            out.Pi = (TauMatrix.identity(ctx, self.f) + Ah) * out.Pi
            out.A_hat = Ah
        return out


def build_pi(ctx: GlobalContext, family: TypedMatrixFamily, a: Sequence,
             z: Sequence | None = None) -> PiData:
    """Specialise Pi at parameters ``a`` (indexed by position)."""
    p, f = ctx.p, family.f
    if z is None:
        z = [[p ** family.m_k] for _ in range(f)]
    z = [list(zi) for zi in z]
    for i, zi in enumerate(z):
        if zi[0] % ctx.modulus != p ** family.m_k % ctx.modulus:
            raise ValueError(f"z_{i} must be congruent to p^{family.m_k} mod pi")
        if len(zi) > max(family.spec.weights.k_max, 1):
            raise ValueError(f"z_{i} has degree above k-1")
    a = [ctx.const(x) if isinstance(x, int) else tuple(x) for x in a]
    for i, ai in enumerate(a):
        if ctx.valuation(ai) < 1:
            raise ValueError(f"a_{i} must lie in the maximal ideal")
    q = q_element(ctx)
    coords = []
    for j in range(f):
        i = position_of(j, f)
        qk = q ** family.k[i] * family.spec.unit(i)
        s_entry = Series.from_ints(ctx, z[i]).phi().scale(a[i])
        shape = type_shape(family.types[i], s_entry, qk)
        coords.append([[Series.constant(ctx, 1) if v == "1" else
                        Series.zero(ctx) if v == "0" else v for v in row] for row in shape])
    return PiData(ctx, family, a, z, TauMatrix(coords))


def perturb_pi(pi: PiData, A_hat: TauMatrix) -> PiData:
    """Pi_Ahat = (Id + Ahat) Pi."""
    ctx = pi.ctx
    Ah = A_hat.with_context(ctx)
    new = (TauMatrix.identity(ctx, pi.f) + Ah) * pi.Pi
    return PiData(ctx, pi.family, pi.a, pi.z, new, Ah)


# ---------------------------------------------------------------------------
# solution container


@dataclass
class GammaSolution:
    G: TauMatrix
    chi: int
    achieved_degree: int
    residual_valuation: float
    losses: list = field(default_factory=list)      # per degree d >= 1
    H_log: dict = field(default_factory=dict)       # degree -> raw blocks per coordinate
    R_log: dict = field(default_factory=dict)       # degree -> Rbar blocks (lift phase)
    guard: int = 0
    z: list | None = None
    G_work: TauMatrix | None = None   # same G with every digit that is known

    @property
    def margin(self) -> int:
        N = self.G.ctx.N
        v = self.residual_valuation
        return N if v == INF else int(min(v, N))

    @property
    def total_loss(self) -> int:
        return max([c for _, c in self.losses], default=0)


def defect(pi: PiData, G: TauMatrix, chi: int) -> TauMatrix:
    """G * gamma(Pi) - Pi * phi(G)."""
    return G * apply_gamma(pi.Pi, chi) - pi.Pi * apply_phi(G)


# ---------------------------------------------------------------------------
# linear systems for one degree


def _block_system(ctx, P: list, d: int, rhs: list):
    """Rows/columns for H[j] P[j] - p^d P[j] H[j+1] = rhs[j] (4f unknowns)."""
    f = len(P)
    n = 4 * f
    pd = ctx.p ** d
    M = [[ctx.zero] * n for _ in range(n)]
    b = []

    def var(j, r, c):
        return 4 * (j % f) + 2 * r + c

    for j in range(f):
        Pj = P[j]
        for r in range(2):
            for c in range(2):
                row = M[4 * j + 2 * r + c]
                # (H[j] P[j])_{rc} = sum_t H[j]_{rt} P[j]_{tc}
                for t in range(2):
                    idx = var(j, r, t)
                    row[idx] = ctx.add(row[idx], Pj[t][c])
                # -p^d (P[j] H[j+1])_{rc} = -p^d sum_t P[j]_{rt} H[j+1]_{tc}
                for t in range(2):
                    idx = var(j + 1, t, c)
                    row[idx] = ctx.sub(row[idx], ctx.scale(Pj[r][t], pd))
                b.append(rhs[j][r][c])
    return M, b


def _unflatten(x: list, f: int) -> list:
    return [[[x[4 * j], x[4 * j + 1]], [x[4 * j + 2], x[4 * j + 3]]] for j in range(f)]


def solve_degree_direct(ctx, P: list, d: int, rhs: list):
    """Solve the coupled degree-d system; returns (H blocks, loss)."""
    M, b = _block_system(ctx, P, d, rhs)
    sol = solve_linear_raw(ctx, M, b)
    return _unflatten(sol.x, len(P)), sol.loss


def _inverse_data(ctx, Pj):
    """(v, adj * unit^{-1}) with P^{-1} = p^{-v} * that."""
    det = det2_raw(ctx, Pj)
    v, u = ctx.unit_part(det)
    if v == INF:
        raise PrecisionError("singular coordinate matrix")
    return v, mat_scale_raw(ctx, adj2_raw(ctx, Pj), ctx.inv(u))


def solve_degree_lift(ctx, P: list, d: int, delta_prime: list):
    """Consolidated solve for a degree ``d >= max v(det P_j)``.

    ``delta_prime[j]`` is the degree-d coefficient of ``Pi phi(G) - G gamma(Pi)``.
    Returns (H blocks, Rbar blocks, loss).
    """
    f = len(P)
    Rbar, T, vmax = [], [], 0
    for j in range(f):
        v, inv_scaled = _inverse_data(ctx, P[j])
        if d < v:
            raise ValueError("lift step below the weight")
        vmax = max(vmax, v)
        R = mat_mul_raw(ctx, delta_prime[j], inv_scaled)
        Rbar.append([[ctx.div_p_power(x, v) for x in row] for row in R])
        T.append(mat_scale_raw(ctx, inv_scaled, ctx.p ** (d - v)))
    # H[0] = V + Q H[0] W
    Q = identity_raw(ctx)
    W = identity_raw(ctx)
    V = [row[:] for row in Rbar[0]]
    for j in range(1, f):
        Q = mat_mul_raw(ctx, Q, P[j - 1])
        W = mat_mul_raw(ctx, T[j - 1], W)
        V = mat_add_raw(ctx, V, mat_mul_raw(ctx, mat_mul_raw(ctx, Q, Rbar[j]), W))
    Q = mat_mul_raw(ctx, Q, P[f - 1])
    W = mat_mul_raw(ctx, T[f - 1], W)
    # linear map H -> H - Q H W on the 4 entries
    M = [[ctx.zero] * 4 for _ in range(4)]
    for r in range(2):
        for c in range(2):
            row = M[2 * r + c]
            row[2 * r + c] = ctx.add(row[2 * r + c], ctx.one)
            for s in range(2):
                for t in range(2):
                    idx = 2 * s + t
                    row[idx] = ctx.sub(row[idx], ctx.mul(Q[r][s], W[t][c]))
    sol = solve_linear_raw(ctx, M, [V[0][0], V[0][1], V[1][0], V[1][1]])
    H = [None] * f
    H[0] = [[sol.x[0], sol.x[1]], [sol.x[2], sol.x[3]]]
    nxt = H[0]
    for j in range(f - 1, 0, -1):
        H[j] = mat_add_raw(ctx, Rbar[j], mat_mul_raw(ctx, mat_mul_raw(ctx, P[j], nxt), T[j]))
        nxt = H[j]
    return H, Rbar, vmax + sol.loss


# ---------------------------------------------------------------------------
# driver


def _add_degree(G: TauMatrix, H: list, d: int) -> TauMatrix:
    ctx = G.ctx
    Hs = TauMatrix.from_constants(ctx, H).shift(d)
    return G + Hs


def _increment(pi: PiData, gPi: TauMatrix, H: list, d: int) -> TauMatrix:
    """Change of the defect when pi^d H is added to G."""
    ctx = pi.ctx
    Hc = TauMatrix.from_constants(ctx, H)
    first = (Hc * gPi).shift(d)
    phi_pi_d = (Series.monomial(ctx, 1).phi()) ** d
    shifted = TauMatrix.from_constants(ctx, [H[(j + 1) % pi.f] for j in range(pi.f)])
    second = pi.Pi * shifted.map(lambda s: s * phi_pi_d)
    return first - second


def run_degrees(pi: PiData, chi: int, seed_G: TauMatrix | None, seed_degree: int,
         stop_base: int, use_lift: bool, log: bool):
    ctx = pi.ctx
    f = pi.f
    D = ctx.D
    G = seed_G.truncate(seed_degree) if seed_G is not None else TauMatrix.identity(ctx, f)
    gPi = apply_gamma(pi.Pi, chi)
    delta = G * gPi - pi.Pi * apply_phi(G)
    P = pi.P()
    losses, H_log, R_log = [], {}, {}
    cum = 0
    for d in range(1, D):
        if d < seed_degree:
            continue
        known = delta.coeff(d)
        if d < stop_base or not use_lift:
            rhs = [[[ctx.neg(x) for x in row] for row in blk] for blk in known]
            try:
                H, loss = solve_degree_direct(ctx, P, d, rhs)
            except NoSolution as exc:
                raise Obstruction(d, str(exc), pi.z) from exc
            R = None
        else:
            dprime = [[[ctx.neg(x) for x in row] for row in blk] for blk in known]
            try:
                H, R, loss = solve_degree_lift(ctx, P, d, dprime)
            except NoSolution as exc:
                raise Obstruction(d, f"lift step inconsistent: {exc}", pi.z) from exc
        cum += loss
        losses.append((d, cum))
        if log:
            H_log[d] = H
            if R is not None:
                R_log[d] = R
        G = _add_degree(G, H, d)
        delta = delta + _increment(pi, gPi, H, d)
    return G, losses, H_log, R_log, cum


def solve_gamma(pi: PiData, chi: int | None = None, *, seed_G: TauMatrix | None = None,
                seed_degree: int = 1, use_lift: bool = True, guard: int | None = None,
                headroom: int | None = None, max_guard: int = 512) -> GammaSolution:
    """Solve Pi phi(G) = G gamma(Pi) mod pi^D with G = Id mod pi.

    ``seed_G`` fixes the coefficients of degrees below ``seed_degree``.
    ``headroom`` extra correct digits beyond N are kept in ``G_work``.
    Raises :class:`Obstruction` if some degree has no integral solution.
    """
    ctx = pi.ctx
    chi = ctx.chi_delta if chi is None else chi
    k = pi.family.spec.weights.k_max
    if headroom is None:
        from .family import alpha_of
        headroom = ctx.margin + alpha_of(ctx.p, max(k - 1, 0))
    guard = guard if guard is not None else 2 * ctx.N
    while True:
        wctx = ctx.with_precision(ctx.N + guard)
        wpi = pi.at(wctx)
        seed = seed_G.with_context(wctx) if seed_G is not None else None
        G, losses, H_log, R_log, cum = run_degrees(wpi, chi, seed, seed_degree, k, use_lift, True)
        if cum + headroom <= guard:
            break
        if guard >= max_guard:
            raise PrecisionError(f"cumulative loss {cum} exceeds guard {guard}")
        guard *= 2
    return finish_solution(pi, chi, G, losses, H_log, R_log, guard, cum)


def finish_solution(pi: PiData, chi: int, G: TauMatrix, losses, H_log, R_log,
                    guard: int, cum: int) -> GammaSolution:
    """Reduce a working-precision solve to ``pi.ctx`` and measure the defect."""
    ctx = pi.ctx
    work_ctx = G.ctx.with_precision(max(G.ctx.N - cum, ctx.N))
    G_work = G.with_context(work_ctx)
    G = G.with_context(ctx)
    red = lambda blocks: [[[tuple(c % ctx.modulus for c in x) for x in row] for row in blk]
                          for blk in blocks]
    H_log = {d: red(H) for d, H in H_log.items()}
    R_log = {d: red(R) for d, R in R_log.items()}
    res = defect(pi, G, chi).valuation()
    return GammaSolution(G, chi, ctx.D, res, losses, H_log, R_log, guard, pi.z, G_work)


def solve_base(pi: PiData, chi: int | None = None, **kw) -> GammaSolution:
    """Degrees 1..k_max-1 only (the truncation is lowered to k_max)."""
    ctx = pi.ctx
    k = pi.family.spec.weights.k_max
    small = ctx.with_truncation(max(k, 2))
    sol = solve_gamma(pi.at(small), chi, **kw)
    sol.achieved_degree = small.D
    return sol


def lift_gamma(pi: PiData, base: GammaSolution, chi: int | None = None) -> GammaSolution:
    """Extend a base solution (degrees < k_max) to the full truncation."""
    k = pi.family.spec.weights.k_max
    seed = base.G_work if base.G_work is not None else base.G
    return solve_gamma(pi, chi, seed_G=seed.with_truncation_of(pi.ctx), seed_degree=k)


# ---------------------------------------------------------------------------
# z search


def linearized_z(ctx: GlobalContext, family: TypedMatrixFamily, *, extra_degrees: int | None = None,
                 prec: int | None = None) -> list:
    """z making the part of the equation linear in the parameters integrally solvable.

    Writes Pi = Pi_0 + S Pi_1(b) and G = G_0 + S G_1 with S^2 = 0, where the
    unknown z coefficients b enter Pi_1 linearly, and solves for (b, G_1) over
    O_E jointly through a truncation above D (a z found only through D can
    fail to extend).  Free unknowns are set to zero.
    """
    f, k, p = family.f, family.spec.weights.k_max, ctx.p
    if k <= 1:
        return [[p ** family.m_k] for _ in range(f)]
    extra = 2 * k if extra_degrees is None else extra_degrees
    wctx = ctx.with_truncation(ctx.D + extra).with_precision(prec or 4 * ctx.N)
    D = wctx.D
    zero_a = [wctx.zero] * f
    pi0 = build_pi(wctx, family, zero_a)
    G0 = solve_gamma(pi0).G
    chi = wctx.chi_delta
    gpi0 = apply_gamma(pi0.Pi, chi)
    nb = f * (k - 1)

    def pi1(b):
        coords = []
        for j in range(f):
            i = position_of(j, f)
            z = [p ** family.m_k] + list(b[i * (k - 1):(i + 1) * (k - 1)])
            s_entry = Series.from_ints(wctx, z).phi()
            shape = type_shape(family.types[i], s_entry, Series.zero(wctx))
            coords.append([[Series.zero(wctx) if v in ("0", "1") else v for v in row]
                           for row in shape])
        return TauMatrix(coords)

    def flatten(T):
        out = []
        for d in range(1, D):
            for blk in T.coeff(d):
                for row in blk:
                    out.extend(row)
        return out

    # affine part and columns for b
    def b_part(b):
        P1 = pi1(b)
        return G0 * apply_gamma(P1, chi) - P1 * apply_phi(G0)

    base = flatten(b_part([0] * nb))
    cols = []
    for u in range(nb):
        b = [0] * nb
        b[u] = 1
        cols.append([wctx.sub(x, y) for x, y in zip(flatten(b_part(b)), base)])
    # columns for G_1: unit matrices at each (coordinate, entry, degree)
    for j in range(f):
        for r in range(2):
            for c in range(2):
                for d in range(1, D):
                    blocks = [[[Series.zero(wctx) for _ in range(2)] for _ in range(2)]
                              for _ in range(f)]
                    blocks[j][r][c] = Series.monomial(wctx, d)
                    E = TauMatrix(blocks)
                    cols.append(flatten(E * gpi0 - pi0.Pi * apply_phi(E)))
    M = [[cols[c][r] for c in range(len(cols))] for r in range(len(base))]
    sol = solve_linear_raw(wctx, M, [wctx.neg(x) for x in base])
    b = []
    for x in sol.x[:nb]:
        if any(x[1:]):
            raise ValueError("derived z coefficient outside Z_p")
        b.append(x[0])
    return [[p ** family.m_k] + b[i * (k - 1):(i + 1) * (k - 1)] for i in range(f)]


def _grid_candidates(p: int, m_k: int, k: int, f: int):
    """Breadth-first grid: z_i = p^{m_k} + sum b_ij pi^j, b_ij in {1..p-1} p^t."""
    positions = [(i, j) for i in range(f) for j in range(1, k)]
    values = [v * p ** t for t in range(0, 3) for v in range(1, p)]
    base = [[p ** m_k] + [0] * (k - 1) for _ in range(f)]
    for support in range(1, len(positions) + 1):
        for chosen in itertools.combinations(positions, support):
            for vals in itertools.product(values, repeat=support):
                z = [list(zi) for zi in base]
                for (i, j), v in zip(chosen, vals):
                    z[i][j] = v
                yield z


def z_candidates(ctx: GlobalContext, family: TypedMatrixFamily):
    """Constant z first, then the linearised z, then the grid."""
    k = max(family.spec.weights.k_max, 1)
    yield "constant", [[ctx.p ** family.m_k] for _ in range(family.f)]
    yield "linearized", linearized_z(ctx, family)
    for z in _grid_candidates(ctx.p, family.m_k, k, family.f):
        yield "grid", z


@dataclass
class ZChoice:
    z: list
    source: str
    tried: int
    failures: list          # (source, degree) of rejected candidates


def search_z(ctx: GlobalContext, family: TypedMatrixFamily, probes: Sequence,
             budget: int = 200, chi: int | None = None) -> ZChoice:
    """First candidate z for which every probe parameter vector solves to degree D.

    The choice is made once per family (all probes must succeed), so that
    every member shares one Pi.  ``budget`` bounds the candidates tried after
    the constant one.  Raises the last :class:`Obstruction` when exhausted.
    """
    last = None
    failures = []
    tried = 0
    for source, z in z_candidates(ctx, family):
        if tried > budget:
            break
        tried += 1
        try:
            for a in probes:
                solve_gamma(build_pi(ctx, family, a, z), chi)
            return ZChoice(z, source, tried, failures)
        except Obstruction as exc:
            last = exc
            failures.append((source, exc.degree))
    if last is None:
        last = Obstruction(0, "empty search budget")
    last.tried = tried
    raise last


# ---------------------------------------------------------------------------
# axiom checks


@dataclass
class CocycleReport:
    power: int
    margin: int
    loss: int


def cocycle_check(pi: PiData, sol: GammaSolution, power: int = 2) -> CocycleReport:
    """Compare G for chi^power solved directly with the cocycle product."""
    ctx = pi.ctx
    chi = sol.chi
    if power == 1:
        return CocycleReport(1, ctx.N, 0)
    direct = solve_gamma(pi, chi ** power)
    # G_{g^n} = G_g * g(G_g) * ... * g^{n-1}(G_g)
    prod = sol.G
    acc_c = chi
    for _ in range(power - 1):
        prod = prod * apply_gamma(sol.G, acc_c)
        acc_c *= chi
    v = (direct.G - prod).valuation()
    return CocycleReport(power, ctx.N if v == INF else int(v), direct.total_loss)


@dataclass
class LatticeReport:
    ok: bool
    witnesses: list        # per coordinate: the integral matrix W with Pi_j W = q^k Id


def lattice_condition_check(pi: PiData) -> LatticeReport:
    """q^{k - k_i} * adj(Pi_i) / unit is integral and Pi_i * W = q^k Id."""
    ctx = pi.ctx
    fam = pi.family
    k = fam.spec.weights.k_max
    q = q_element(ctx)
    wit, ok = [], True
    for j, M in enumerate(pi.Pi.coords):
        i = position_of(j, pi.f)
        sign = 1 if fam.types[i] in ("t1", "t3") else -1
        unit = Series.constant(ctx, sign * fam.spec.unit(i))
        if pi.A_hat is not None:
            IA = [[(Series.constant(ctx, 1) if r == c else Series.zero(ctx)) + pi.A_hat.coords[j][r][c]
                   for c in range(2)] for r in range(2)]
            unit = unit * (IA[0][0] * IA[1][1] - IA[0][1] * IA[1][0])
        det = M[0][0] * M[1][1] - M[0][1] * M[1][0]
        good = (det - unit * q ** fam.k[i]).valuation() >= ctx.N
        adj = [[M[1][1], -M[0][1]], [-M[1][0], M[0][0]]]
        scale = q ** (k - fam.k[i]) * unit.inverse()
        W = [[x * scale for x in row] for row in adj]
        prod = [[M[r][0] * W[0][c] + M[r][1] * W[1][c] for c in range(2)] for r in range(2)]
        qk = q ** k
        for r in range(2):
            for c in range(2):
                target = qk if r == c else Series.zero(ctx)
                good = good and (prod[r][c] - target).valuation() >= ctx.N
        ok = ok and good
        wit.append(W)
    return LatticeReport(ok, wit)

