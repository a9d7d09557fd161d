"""Constancy of the residual Wach data (Pi mod p, G mod p) across a sampled family."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from .family import FamilySpec, TypedMatrixFamily, alpha_of, build_family, sample_a, sample_A
from .filtered import ReductionExponents, reduction_exponents
from .padic import GlobalContext
from .perturbation import PerturbationError, perturbed_solution, verify_mod_I_chain
from .series import TauMatrix
from .wach import build_pi, perturb_pi, search_z


@dataclass
class Residual:
    """Exact Pi_A_hat and G_A at one sample; the mod-p images are derived on demand."""
    Pi: TauMatrix
    G: TauMatrix
    chain_ok: bool = True

    def mod_p(self):
        return self.Pi.residue(), self.G.residue()


@dataclass
class Comparison:
    label: str               # "ii" (fixed A, varying a) or "iii" (varying both)
    regime: int | None
    a: list
    A: list | None
    equal: bool
    margin: float            # min valuation of the differences of Pi and G
    chain_ok: bool = True

    @property
    def ok(self) -> bool:
        return self.equal and self.chain_ok


@dataclass
class ReductionReport:
    baseline: tuple          # (Pi(0) mod p, G(0) mod p)
    comparisons: list
    exponents: ReductionExponents
    z_source: str = ""

    @property
    def verdict(self) -> bool:
        return all(c.ok for c in self.comparisons if c.label in ("ii", "iii"))


def zero_A(ctx: GlobalContext, f: int) -> list:
    return [[[ctx.zero, ctx.zero], [ctx.zero, ctx.zero]] for _ in range(f)]


def solve_sample(ctx: GlobalContext, family: TypedMatrixFamily, z, a, A, regime: int) -> Residual:
    """Solve the perturbed equation at (a, A); the chain compares against A = 0 at the same a."""
    pi = build_pi(ctx, family, a, z)
    sol, pdata, sol_A = perturbed_solution(pi, A if A is not None else zero_A(ctx, family.f),
                                           regime)
    chain = verify_mod_I_chain(ctx, sol, sol_A).ok
    return Residual(perturb_pi(pi, pdata.A_hat).Pi, sol_A.G, chain)


def _task(args):
    return solve_sample(*args)


def _diff_margin(x: Residual, y: Residual) -> float:
    return min((x.Pi - y.Pi).valuation(), (x.G - y.G).valuation())


def run_tasks(tasks: list, jobs: int = 1) -> list:
    """Solve independent samples, optionally in a process pool; order is preserved."""
    if jobs <= 1 or len(tasks) <= 1:
        return [_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_task, tasks))


def compare_family(spec: FamilySpec, samples_a: Sequence, samples_A: dict, ctx: GlobalContext,
                   *, z=None, jobs: int = 1, regime_iii_a: int = 3, family=None) -> ReductionReport:
    """Regime ii: for each regime c, A = samples_A[c][0] fixed, every a against a = 0.
    Regime iii: every A in samples_A[1] times the first ``regime_iii_a`` a's against
    the global (a = 0, A = 0) baseline, with the per-step mod-p chain.
    """
    family = build_family(spec, ctx.p) if family is None else family
    f = family.f
    zsrc = "given"
    if z is None:
        zc = search_z(ctx, family, list(samples_a))
        z, zsrc = zc.z, zc.source
    a0 = [ctx.zero] * f
    plan = [("base", None, a0, None)]
    for c in sorted(samples_A):
        if not samples_A[c]:
            continue
        A = samples_A[c][0]
        plan.append(("anchor", c, a0, A))
        plan.extend(("ii", c, a, A) for a in samples_a)
    for A in samples_A.get(1, []):
        plan.extend(("iii", 1, a, A) for a in list(samples_a)[:regime_iii_a])
    tasks = [(ctx, family, z, a, A, c or 0) for _, c, a, A in plan]
    results = run_tasks(tasks, jobs)
    base = results[0]
    anchors = {plan[i][1]: results[i] for i in range(len(plan)) if plan[i][0] == "anchor"}
    comparisons = [Comparison("base", None, a0, None, True, _diff_margin(base, base))]
    for (label, c, a, A), res in zip(plan, results):
        if label == "ii":
            ref = anchors[c]
        elif label == "iii":
            ref = base
        else:
            continue
        m = _diff_margin(res, ref)
        comparisons.append(Comparison(label, c, a, A, m >= 1, m,
                                      res.chain_ok if label == "iii" else True))
    return ReductionReport(base.mod_p(), comparisons, reduction_exponents(spec, ctx.p), zsrc)


def edge_A(ctx: GlobalContext, family: TypedMatrixFamily, rng, c: int) -> list:
    """Like ``sample_A`` but with one entry of valuation exactly c + alpha(k-1)."""
    A = sample_A(ctx, family, rng, c)
    v = c + alpha_of(ctx.p, family.spec.weights.k_max - 1)
    A[0][0][0] = ctx.scale(ctx.random_unit(rng), ctx.p ** v)
    return A


@dataclass
class NegativeControl:
    moved_margin: float          # c = 0 sample against the A = 0 baseline
    moved: bool                  # residual actually differs mod p (expected, not promised)
    fixed_A_margin: float        # two a values, same c = 0 A
    fixed_A_equal: bool
    outside_disk_rejected: bool | None   # None when alpha(k-1) = 0 leaves no room
    details: dict = field(default_factory=dict)

    @property
    def harness_ok(self) -> bool:
        return self.fixed_A_equal and self.outside_disk_rejected is not False


def negative_control(spec: FamilySpec, ctx: GlobalContext, rng, *, z=None, samples_a=None,
                     family=None) -> NegativeControl:
    """Perturb at the edge of the disk (c = 0) where no constancy against A = 0 is promised."""
    family = build_family(spec, ctx.p) if family is None else family
    f = family.f
    if samples_a is None:
        samples_a = [sample_a(ctx, family, rng) for _ in range(2)]
    if z is None:
        z = search_z(ctx, family, list(samples_a)).z
    a0 = [ctx.zero] * f
    A = edge_A(ctx, family, rng, 0)
    base = solve_sample(ctx, family, z, a0, None, 0)
    r0 = solve_sample(ctx, family, z, a0, A, 0)
    r1 = solve_sample(ctx, family, z, samples_a[0], A, 0)
    moved = _diff_margin(r0, base)
    fixed = _diff_margin(r1, r0)
    outside = None
    if alpha_of(ctx.p, spec.weights.k_max - 1) > 0:
        bad = edge_A(ctx, family, rng, -1)
        try:
            perturbed_solution(build_pi(ctx, family, a0, z), bad, 0)
            outside = False
        except PerturbationError:
            outside = True
    return NegativeControl(moved, moved < 1, fixed, fixed >= 1, outside,
                           {"A": A, "a": samples_a[0]})
