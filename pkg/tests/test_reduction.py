import random

from wachforge.family import sample_A
from wachforge.reduction import compare_family, negative_control


def test_compare_family_K3(k_setup):
    s = k_setup("K3")
    rng = random.Random(3)
    sA = {c: [sample_A(s.ctx, s.family, rng, c) for _ in range(2)] for c in (0, 1)}
    rep = compare_family(s.spec, s.samples_a[:3], sA, s.ctx, z=s.z, family=s.family,
                         regime_iii_a=2)
    assert rep.verdict
    labels = [c.label for c in rep.comparisons]
    assert labels.count("ii") == 6 and labels.count("iii") == 4
    base = rep.comparisons[0]
    assert base.label == "base" and base.margin == float("inf")
    assert all(c.margin >= 1 for c in rep.comparisons)
    assert (rep.exponents.beta, rep.exponents.beta_prime) == (5, 7)


def test_compare_family_parallel_matches_serial(k_setup):
    s = k_setup("K1")
    rng = random.Random(8)
    sA = {1: [sample_A(s.ctx, s.family, rng, 1)]}
    kw = dict(z=s.z, family=s.family, regime_iii_a=2)
    one = compare_family(s.spec, s.samples_a[:2], sA, s.ctx, jobs=1, **kw)
    two = compare_family(s.spec, s.samples_a[:2], sA, s.ctx, jobs=2, **kw)
    assert [(c.label, c.margin) for c in one.comparisons] == \
        [(c.label, c.margin) for c in two.comparisons]
    assert one.baseline[1] == two.baseline[1]


def test_negative_control_K1(k_setup):
    s = k_setup("K1")
    nc = negative_control(s.spec, s.ctx, random.Random(0), z=s.z, samples_a=s.samples_a,
                          family=s.family)
    assert nc.fixed_A_equal
    assert nc.outside_disk_rejected is True
    assert nc.harness_ok
