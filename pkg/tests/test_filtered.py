import random

import pytest
from hypothesis import given, strategies as st

from wachforge.family import FamilySpec, alphas_from_a, sample_A
from wachforge.filtered import (extract_filtration, fil_dimension, filtered_module,
                                hodge_tate_type, jumps_from_dims, negative_control,
                                reduction_exponents, weak_admissibility)
from wachforge.wach import build_pi


def test_exponents_K1():
    ex = reduction_exponents(FamilySpec.make("induced", (0, 5), (5,)), 3)
    # -(0 + 5*3) = -15 = 1 mod 8, paired with 3 * 1
    assert (ex.kind, ex.beta, ex.beta_prime, ex.modulus) == ("induced", 1, 3, 8)


def test_exponents_split_and_zero():
    ex = reduction_exponents(FamilySpec.make("split", (1, 0, 0, 1), (1, 1)), 3)
    assert (ex.beta, ex.beta_prime, ex.modulus) == (7, 5, 8)
    ex0 = reduction_exponents(FamilySpec.make("induced", (0, 0), (0,)), 3)
    assert ex0.beta == 0 and ex0.beta_prime == 0


@given(st.integers(0, 12), st.integers(0, 12))
def test_induced_pair_relation(k0, k1):
    spec = FamilySpec.make("induced", (0, k1, k0, 0), (k0, k1))
    ex = reduction_exponents(spec, 3)
    assert ex.beta_prime == 9 * ex.beta % 80
    assert ex.beta == -(k1 * 3 + k0 * 9) % 80


def test_jumps_from_dims():
    assert jumps_from_dims([2, 1, 1, 0]) == [0, 2]
    assert jumps_from_dims([2, 0, 0]) == [0, 0]
    assert jumps_from_dims([2, 2, 0]) == [1, 1]


def test_filtration_K2_matches_display(k_setup):
    s = k_setup("K2")
    for a in [[s.ctx.zero] * 2] + s.samples_a:
        rep = extract_filtration(build_pi(s.ctx, s.family, a, s.z))
        assert all(rep.agree), rep.margins
        assert hodge_tate_type(rep) == [[0, 5], [0, 3]]


def test_type_two_pair_is_one_minus_alpha(k_setup):
    # K3 has t2 at both positions; the Wach-side line is (1, -alpha)
    s = k_setup("K3")
    ctx = s.ctx
    a = s.samples_a[0]
    rep = extract_filtration(build_pi(ctx, s.family, a, s.z))
    alphas = alphas_from_a(ctx, s.family, a)
    for i, line in enumerate(rep.lines):
        x, y = line
        assert ctx.valuation(x) == 0
        assert ctx.valuation(ctx.add(y, ctx.mul(x, alphas[i]))) >= ctx.N


def test_fil_below_one_is_everything(k_setup):
    s = k_setup("K1")
    pi = build_pi(s.ctx, s.family, [s.ctx.zero], s.z)
    assert fil_dimension(s.ctx, pi.Pi.coords[0], 0)[0] == 2


def test_split_zero_has_two_stable_lines(k_setup):
    s = k_setup("K3")
    fmd = filtered_module(s.ctx, s.family, [s.ctx.zero] * 2)
    wa = weak_admissibility(fmd)
    assert wa.status == "lines" and len(wa.lines) == 2
    assert all(l.ok for l in wa.lines)
    assert wa.t_N == wa.t_H == 6
    assert wa.verdict


@pytest.mark.parametrize("name", ["K1", "K2", "K3"])
def test_weak_admissibility_and_control(k_setup, name):
    s = k_setup(name)
    rng = random.Random(9)
    total = sum(s.family.k)
    for a in s.samples_a[:3]:
        A = sample_A(s.ctx, s.family, rng, 0)
        fmd = filtered_module(s.ctx, s.family, a, A)
        wa = weak_admissibility(fmd)
        assert wa.verdict and wa.t_N == wa.t_H == total
        assert not negative_control(fmd).verdict


def test_pairs_depend_only_on_alpha(k_setup):
    s = k_setup("K1")
    ctx = s.ctx
    A = sample_A(ctx, s.family, random.Random(1), 1)
    with_A = filtered_module(ctx, s.family, s.samples_a[0], A)
    without = filtered_module(ctx, s.family, s.samples_a[0])
    assert with_A.fil_pairs == without.fil_pairs
    assert with_A.frobenius != without.frobenius
