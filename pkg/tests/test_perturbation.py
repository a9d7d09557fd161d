import random

import pytest
from hypothesis import given, settings, strategies as st

from wachforge.family import alpha_of, sample_A
from wachforge.padic import INF
from wachforge.perturbation import (A_to_tau, PerturbationError, build_A_hat, perturbed_solution,
                                    verify_conjugation, verify_mod_I_chain)
from wachforge.pipeline import scalar_A
from wachforge.reduction import edge_A
from wachforge.wach import build_pi, solve_gamma


@settings(max_examples=6, deadline=None)
@given(st.integers(0, 2 ** 32), st.sampled_from([0, 1]), st.sampled_from(["K1", "K3"]))
def test_lift_properties(k_setup, seed, c, name):
    s = k_setup(name)
    ctx, fam = s.ctx, s.family
    rng = random.Random(seed)
    A = sample_A(ctx, fam, rng, c)
    pi = build_pi(ctx, fam, s.samples_a[seed % 5], s.z)
    sol, pdata, sol_A = perturbed_solution(pi, A, c)
    k = fam.spec.weights.k_max
    assert pdata.A_hat.coeff(0) == A_to_tau(ctx, A).coeff(0)
    conj = verify_conjugation(ctx, pdata, sol, k)
    assert conj.first_degree >= k
    if c == 1:
        assert conj.mod_p_zero
        assert verify_mod_I_chain(ctx, sol, sol_A).ok
    assert sol_A.margin == ctx.N


def test_scalar_A_is_fixed(k_setup):
    s = k_setup("K1")
    A = scalar_A(s.ctx, s.family, random.Random(0), 0)
    pi = build_pi(s.ctx, s.family, s.samples_a[0], s.z)
    _, pdata, _ = perturbed_solution(pi, A, 0)
    assert (pdata.A_hat - A_to_tau(s.ctx, A)).valuation() == INF


def test_outside_disk_rejected(k_setup):
    s = k_setup("K1")
    assert alpha_of(3, 4) == 2
    bad = edge_A(s.ctx, s.family, random.Random(0), -1)
    pi = build_pi(s.ctx, s.family, s.samples_a[0], s.z)
    with pytest.raises(PerturbationError):
        perturbed_solution(pi, bad, 0)
    sol = solve_gamma(pi)
    with pytest.raises(PerturbationError):
        build_A_hat(s.ctx, s.family, bad, sol, 0)


def test_regime_one_needs_extra_valuation(k_setup):
    s = k_setup("K3")
    A = edge_A(s.ctx, s.family, random.Random(4), 0)
    pi = build_pi(s.ctx, s.family, s.samples_a[0], s.z)
    with pytest.raises(PerturbationError):
        perturbed_solution(pi, A, 1)
