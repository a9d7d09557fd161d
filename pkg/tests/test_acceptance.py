"""Acceptance criteria C1-C10 at the three pinned configurations.

Each test records one PASS/FAIL line (repeated in the terminal summary).
Run alone with ``pytest tests/test_acceptance.py -v`` or
``python3 tests/test_acceptance.py``.
"""
import random
import time

import pytest

from wachforge.config import RunConfig
from wachforge.family import sample_A
from wachforge.filtered import (extract_filtration, filtered_module, hodge_tate_type,
                                reduction_exponents, weak_admissibility)
from wachforge.perturbation import A_to_tau, perturbed_solution, verify_conjugation
from wachforge.pipeline import alpha_suite, run_solve, run_verify, scalar_A
from wachforge.reduction import compare_family
from wachforge.report import dumps
from wachforge.residue import residue_suite
from wachforge.wach import build_pi

NAMES = ("K1", "K2", "K3")

RUN_CONFIGS = {
    "K1": dict(p=3, weights=[5], case="induced", ell=[0, 5], N=16, D=12, seed=7),
    "K2": dict(p=3, weights=[5, 3], case="induced", ell=[0, 3, 5, 0], N=16, D=14, seed=7),
    "K3": dict(p=3, weights=[3, 3], case="split", ell=[3, 0, 0, 3], twist_c=2, N=14, D=10,
               seed=7),
}

_reports = {}


def reduction_report(setup):
    """One compare_family run per config: regime ii (one A per regime, 5 a's) and
    regime iii (3 A's in the c = 1 disk times 3 a's)."""
    if setup.name not in _reports:
        rng = random.Random(31)
        ctx, fam = setup.ctx, setup.family
        sA = {0: [sample_A(ctx, fam, rng, 0)], 1: [sample_A(ctx, fam, rng, 1) for _ in range(3)]}
        t = time.perf_counter()
        rep = compare_family(setup.spec, setup.samples_a, sA, ctx, z=setup.z, family=fam,
                             regime_iii_a=3)
        _reports[setup.name] = (rep, time.perf_counter() - t)
    return _reports[setup.name][0]


def test_C1_alpha_formula(record):
    t = time.perf_counter()
    bad = alpha_suite((3, 5, 7), 50)
    dt = time.perf_counter() - t
    ok = not bad and dt < 1.0
    record("C1", ok, f"closed form = direct sum for p in 3,5,7, ell <= 50; "
                     f"mismatches {bad[:3]}; {dt:.2f}s")
    assert ok


def test_C2_residue_lemma(record):
    t = time.perf_counter()
    rows = residue_suite(3, (1, 2, 3))
    dt = time.perf_counter() - t
    bad_tag = [r for r in rows if r.tag not in ("E12", "E21")]
    bad_claim = [r for r in rows if r.tag in ("E12", "E21") and not r.claim_a.literal]
    bad_trace = [r for r in rows if not r.trace.nonconstant]
    bad_surj = [r for r in rows if not r.surjective.surjective]
    ok = all(r.passed for r in rows) and dt < 5.0
    record("C2", ok, f"{len(rows)} type vectors: tag outside E12/E21 {len(bad_tag)}, "
                     f"Claim A literal sign fails {len(bad_claim)} (sign +1 observed), "
                     f"trace constant {len(bad_trace)}, non-surjective {len(bad_surj)}; {dt:.2f}s")
    assert ok


def test_C3_wach_axioms(record):
    details, ok = [], True
    for name in NAMES:
        t = time.perf_counter()
        body = run_solve(RunConfig(**RUN_CONFIGS[name]))
        dt = time.perf_counter() - t
        m = min(r["margin"] for r in body["members"])
        c = min(r["cocycle_margin"] for r in body["members"])
        good = body["verdict"] and dt < 120
        ok &= good
        details.append(f"{name} defect {m}/cocycle {c} (need {body['threshold']}) "
                       f"lattice {all(r['lattice_ok'] for r in body['members'])} {dt:.0f}s")
    record("C3", ok, "; ".join(details))
    assert ok


def test_C4_weak_admissibility(k_setup, record):
    t = time.perf_counter()
    ok, details = True, []
    for name in NAMES:
        s = k_setup(name)
        rng = random.Random(41)
        As = [sample_A(s.ctx, s.family, rng, 0) for _ in range(3)]
        total = sum(s.family.k)
        n_lines = 0
        for a in s.samples_a:
            ht = hodge_tate_type(extract_filtration(build_pi(s.ctx, s.family, a, s.z)))
            ok &= ht == [sorted([0, k]) for k in s.family.k]
            for A in As:
                wa = weak_admissibility(filtered_module(s.ctx, s.family, a, A))
                ok &= wa.t_N == wa.t_H == total and all(l.ok for l in wa.lines)
                n_lines += len(wa.lines)
        details.append(f"{name} t_N = t_H = {total}, {n_lines} stable lines checked")
    dt = time.perf_counter() - t
    ok &= dt < 300
    record("C4", ok, "; ".join(details) + f"; {dt:.0f}s")
    assert ok


def test_C5_constancy_fixed_A(k_setup, record):
    ok, details = True, []
    for name in NAMES:
        rep = reduction_report(k_setup(name))
        rows = [c for c in rep.comparisons if c.label == "ii"]
        ok &= len(rows) == 10 and all(c.equal for c in rows)
        details.append(f"{name} {sum(c.equal for c in rows)}/{len(rows)} "
                       f"(min margin {min(c.margin for c in rows)})")
    record("C5", ok, "residuals vs a = 0 at fixed A: " + "; ".join(details))
    assert ok


def test_C6_constancy_varying_A(k_setup, record):
    ok, details = True, []
    for name in NAMES:
        rep = reduction_report(k_setup(name))
        rows = [c for c in rep.comparisons if c.label == "iii"]
        ok &= len(rows) == 9 and all(c.equal and c.chain_ok for c in rows)
        details.append(f"{name} equal {sum(c.equal for c in rows)}/{len(rows)}, "
                       f"chain {sum(c.chain_ok for c in rows)}/{len(rows)}")
    dt = sum(_reports[name][1] for name in NAMES)
    ok &= dt < 600
    record("C6", ok, "vs global baseline: " + "; ".join(details) + f"; {dt:.0f}s")
    assert ok


def test_C7_perturbation_lemma(k_setup, record):
    ok, details = True, []
    for name in NAMES:
        s = k_setup(name)
        ctx, fam = s.ctx, s.family
        k = fam.spec.weights.k_max
        rng = random.Random(53)
        n = 0
        for c in (0, 1):
            for i in range(5):
                A = sample_A(ctx, fam, rng, c)
                pi = build_pi(ctx, fam, s.samples_a[i], s.z)
                sol, pdata, _ = perturbed_solution(pi, A, c)
                conj = verify_conjugation(ctx, pdata, sol, k)
                ok &= pdata.A_hat.coeff(0) == A_to_tau(ctx, A).coeff(0)
                ok &= conj.first_degree >= k
                if c == 1:
                    ok &= conj.mod_p_zero
                n += 1
            A = scalar_A(ctx, fam, rng, c)
            _, pdata, _ = perturbed_solution(build_pi(ctx, fam, s.samples_a[0], s.z), A, c)
            ok &= (pdata.A_hat - A_to_tau(ctx, A)).valuation() == float("inf")
        details.append(f"{name} {n} lifts + 2 scalar")
    record("C7", ok, "; ".join(details))
    assert ok


def test_C8_filtration_agreement(k_setup, record):
    ok, n = True, 0
    for name in NAMES:
        s = k_setup(name)
        for a in [[s.ctx.zero] * s.family.f] + s.samples_a:
            rep = extract_filtration(build_pi(s.ctx, s.family, a, s.z))
            ok &= all(rep.agree)
            n += 1
    record("C8", ok, f"Wach-side lines equal the closed-form pairs on {n} members")
    assert ok


def test_C9_exponents(k_setup, record):
    s = k_setup("K1")
    p, f = 3, 1
    # independent integer arithmetic: beta = -(0 * 1 + 5 * 3) mod (3^2 - 1)
    beta = -(0 * p ** 0 + 5 * p ** 1) % (p ** (2 * f) - 1)
    want = (beta, p ** f * beta % (p ** (2 * f) - 1))
    assert want == (1, 3)
    ex = reduction_exponents(s.spec, p)
    ok = (ex.beta, ex.beta_prime, ex.modulus) == (1, 3, 8)
    # the sampled-family report carries the same exponents for every config
    for name in NAMES:
        t = k_setup(name)
        ok &= reduction_report(t).exponents == reduction_exponents(t.spec, 3)
    record("C9", ok, f"K1 (beta, p^f beta) = ({ex.beta}, {ex.beta_prime}) mod {ex.modulus}")
    assert ok


def test_C10_determinism(record):
    a = dumps(run_solve(RunConfig(**RUN_CONFIGS["K1"])))
    b = dumps(run_solve(RunConfig(**RUN_CONFIGS["K1"])))
    cfg = dict(RUN_CONFIGS["K3"], samples_a=2, samples_A=2)
    c = run_verify(RunConfig(**cfg))
    d = run_verify(RunConfig(**cfg))
    ok = a == b and dumps(c) == dumps(d)
    record("C10", ok, "solve (K1) and verify (K3) reports byte-identical on rerun")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v", "-s"]))
