"""Lifting a constant perturbation A to a series A_hat compatible with G.

``A_hat = A + A^1 pi + ... + A^{k-1} pi^{k-1}`` is chosen so that
``(Id + A_hat) G gamma(Id + A_hat)^{-1} = G mod pi^k``.  The coefficient of
``pi^j`` in ``(Id + A_hat) G - G gamma(Id + A_hat)`` is
``(1 - chi^j) A^j + r_j`` where ``r_j`` only involves ``A^{<j}``, so

    A^j = -r_j / (1 - chi^j),   r_j = [(Id + A_<j) G - G gamma(Id + A_<j)]_j.

For ``j = 1`` this is ``(G_1 A - A G_1) / (1 - chi)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .family import TypedMatrixFamily, alpha_of
from .padic import GlobalContext, NoSolution, PrecisionError, vp_int
from .series import TauMatrix, apply_gamma
from .wach import (GammaSolution, PiData, finish_solution, perturb_pi, run_degrees,
                   solve_gamma)


class PerturbationError(ValueError):
    """A lies outside the disk where the lift stays integral."""


@dataclass
class PerturbationData:
    A: list                 # per position, raw 2x2 over O_E
    A_hat: TauMatrix        # coordinate layout, degrees < k
    regime: int             # c in {0, 1}
    losses: list = field(default_factory=list)   # (j, v_p(1 - chi^j))
    valuations: list = field(default_factory=list)  # (j, v(A^j))

    @property
    def total_loss(self) -> int:
        return sum(v for _, v in self.losses)


def A_to_tau(ctx: GlobalContext, A: list) -> TauMatrix:
    """Position-indexed constant matrices -> TauMatrix in coordinate layout."""
    f = len(A)
    coords = [A[(j + 1) % f] for j in range(f)]
    return TauMatrix.from_constants(ctx, coords)


def _check_disk(ctx: GlobalContext, family: TypedMatrixFamily, A: list, regime: int) -> None:
    need = regime + alpha_of(ctx.p, family.spec.weights.k_max - 1)
    for i in range(family.f):
        for row in A[i]:
            for x in row:
                if ctx.valuation(x) < need:
                    raise PerturbationError(
                        f"entry of A_{i} has valuation {ctx.valuation(x)} < {need}")


def lift_A(G: TauMatrix, A: list, chi: int, k: int, regime: int = 0):
    """A_hat at the context of ``G`` (truncation kept); returns (A_hat, losses, valuations)."""
    wctx = G.ctx
    f = G.f
    p = wctx.p
    Id = TauMatrix.identity(wctx, f)
    Ahat = A_to_tau(wctx, [[[tuple(c % wctx.modulus for c in x) for x in row] for row in blk]
                           for blk in A])
    losses, vals = [], [(0, Ahat.valuation())]
    for j in range(1, k):
        M = Id + Ahat
        r = (M * G - G * apply_gamma(M, chi)).coeff(j)
        u = 1 - chi ** j
        v = int(vp_int(u, p))
        unit_inv = pow(u // p ** v, -1, wctx.modulus)
        blocks = []
        for blk in r:
            nb = []
            for row in blk:
                nr = []
                for x in row:
                    try:
                        y = wctx.div_p_power(x, v)
                    except NoSolution as exc:
                        raise PerturbationError(
                            f"coefficient {j} not divisible by p^{v}; A outside the disk") from exc
                    nr.append(wctx.neg(wctx.scale(y, unit_inv)))
                nb.append(nr)
            blocks.append(nb)
        Aj = TauMatrix.from_constants(wctx, blocks).shift(j)
        Ahat = Ahat + Aj
        losses.append((j, v))
        vals.append((j, Aj.valuation()))
    if Ahat.valuation() < regime:
        raise PerturbationError(f"A_hat has valuation {Ahat.valuation()} < {regime}")
    return Ahat, losses, vals


def build_A_hat(ctx: GlobalContext, family: TypedMatrixFamily, A: list,
                sol: GammaSolution, regime: int = 0) -> PerturbationData:
    """Construct A_hat from A and a solved G (digits beyond ``sol.G_work`` are not used)."""
    _check_disk(ctx, family, A, regime)
    G = sol.G_work if sol.G_work is not None else sol.G
    Ahat, losses, vals = lift_A(G, A, sol.chi, family.spec.weights.k_max, regime)
    return PerturbationData(A, Ahat.with_context(ctx), regime, losses, vals)


def perturbed_solution(pi: PiData, A: list, regime: int = 0, chi: int | None = None,
                       guard: int | None = None, max_guard: int = 1024):
    """Unperturbed solve, A_hat and the perturbed solve in one working precision.

    The perturbed solve keeps the unperturbed coefficients below degree k and
    lifts from there.  All three stages are charged to one guard so every
    reported digit is correct.  Returns (sol, pdata, sol_A).
    """
    ctx = pi.ctx
    family = pi.family
    _check_disk(ctx, family, A, regime)
    chi = ctx.chi_delta if chi is None else chi
    k = family.spec.weights.k_max
    guard = 3 * ctx.N if guard is None else guard
    while True:
        wctx = ctx.with_precision(ctx.N + guard)
        wpi = pi.at(wctx)
        G, losses, H_log, R_log, cum0 = run_degrees(wpi, chi, None, 1, k, True, True)
        Ahat, a_losses, vals = lift_A(G, A, chi, k, regime)
        cum_a = cum0 + sum(v for _, v in a_losses)
        wpiA = perturb_pi(wpi, Ahat)
        GA, lossesA, H_A, R_A, cum1 = run_degrees(wpiA, chi, G, k, k, True, True)
        total = cum_a + cum1
        if total + ctx.margin <= guard:
            break
        if guard >= max_guard:
            raise PrecisionError(f"cumulative loss {total} exceeds guard {guard}")
        guard *= 2
    sol = finish_solution(pi, chi, G, losses, H_log, R_log, guard, cum0)
    pdata = PerturbationData(A, Ahat.with_context(ctx), regime, a_losses, vals)
    piA = perturb_pi(pi, pdata.A_hat)
    sol_A = finish_solution(piA, chi, GA, lossesA, H_A, R_A, guard, total)
    return sol, pdata, sol_A


@dataclass
class ConjugationReport:
    first_degree: float
    margin: float
    mod_p_zero: bool
    k: int

    @property
    def ok(self) -> bool:
        return self.first_degree >= self.k


def verify_conjugation(ctx: GlobalContext, pdata: PerturbationData, sol: GammaSolution,
                       k: int) -> ConjugationReport:
    """(Id + A_hat) G gamma(Id + A_hat)^{-1} - G, first nonzero degree and valuation."""
    G = sol.G
    f = G.f
    M = TauMatrix.identity(ctx, f) + pdata.A_hat
    conj = M * G * apply_gamma(M, sol.chi).inverse2()
    diff = conj - G
    return ConjugationReport(diff.order(), diff.valuation(), diff.valuation() >= 1, k)


def solve_perturbed(pi: PiData, pdata: PerturbationData, base: GammaSolution,
                    chi: int | None = None) -> GammaSolution:
    """Solve for Pi_A_hat, keeping degrees below k from the unperturbed solution."""
    k = pi.family.spec.weights.k_max
    piA = perturb_pi(pi, pdata.A_hat)
    seed = base.G_work if base.G_work is not None else base.G
    return solve_gamma(piA, chi, seed_G=seed, seed_degree=k)


@dataclass
class ChainReport:
    steps: list             # (degree, H equal mod p, Rbar equal mod p)

    @property
    def ok(self) -> bool:
        return all(h and r for _, h, r in self.steps)


def _eq_mod_p(ctx, X, Y) -> bool:
    p = ctx.p
    for bx, by in zip(X, Y):
        for rx, ry in zip(bx, by):
            for x, y in zip(rx, ry):
                if any((a - b) % p for a, b in zip(x, y)):
                    return False
    return True


def verify_mod_I_chain(ctx: GlobalContext, sol: GammaSolution, sol_A: GammaSolution) -> ChainReport:
    """H and Rbar of each lift step agree mod p between the two solves."""
    steps = []
    for d in sorted(sol_A.R_log):
        if d not in sol.R_log:
            continue
        steps.append((d, _eq_mod_p(ctx, sol.H_log[d], sol_A.H_log[d]),
                      _eq_mod_p(ctx, sol.R_log[d], sol_A.R_log[d])))
    return ChainReport(steps)
