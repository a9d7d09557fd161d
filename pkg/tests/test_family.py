import pytest
from hypothesis import given, strategies as st

from wachforge.family import (FamilySpec, SpecError, WeightProfile, alpha_brute, alpha_of,
                              alphas_from_a, assign_types, build_family, compute_m, evaluate_P,
                              filtration_pairs)
from wachforge.padic import make_context


@given(st.sampled_from([3, 5, 7, 11]), st.integers(0, 200))
def test_alpha_closed_form_matches_sum(p, ell):
    ctx = make_context(p, N=8, D=2)
    assert alpha_of(p, ell) == alpha_brute(ctx, ell)


def test_alpha_values():
    # v_3(1 - 2^j) for j = 1..4 is 0, 1, 0, 1
    assert [alpha_of(3, l) for l in range(6)] == [0, 0, 1, 1, 2, 2]
    assert alpha_of(5, 4) == 1 and alpha_of(5, 3) == 0


def test_m_values():
    assert compute_m((5,), 3) == 2
    assert compute_m((3, 3), 3) == 0
    assert compute_m((5, 3), 3) == 2
    with pytest.raises(SpecError):
        compute_m((2,), 3)


@pytest.mark.parametrize("case,ell,k,types", [
    ("induced", (0, 5), (5,), ("t4",)),
    ("induced", (5, 0), (5,), ("t2",)),
    ("induced", (0, 3, 5, 0), (5, 3), ("t4", "t1")),
    ("split", (3, 0, 0, 3), (3, 3), ("t2", "t2")),
])
def test_type_tables(case, ell, k, types):
    assert assign_types(FamilySpec.make(case, ell, k)) == types


def test_spec_validation_paths():
    with pytest.raises(SpecError) as exc:
        FamilySpec.make("induced", (1, 5), (5,))
    assert exc.value.path == "ell[0]"
    with pytest.raises(SpecError):
        FamilySpec.make("split", (5, 0), (5,))
    with pytest.raises(SpecError) as exc:
        FamilySpec.make("induced", (0, 3), (3,)).validate(5)
    assert exc.value.path == "weights"
    with pytest.raises(SpecError):
        FamilySpec.make("bogus", (0, 5), (5,))


def test_weight_profile_index_sets():
    wp = WeightProfile((5, 3))
    assert wp.k_max == 5
    assert frozenset({0, 1}) in wp.index_sets


def test_pairs_and_matrices_at_zero():
    ctx = make_context(3, f=2, N=10, D=4)
    fam = build_family(FamilySpec.make("induced", (0, 3, 5, 0), (5, 3)), 3)
    zero = [ctx.zero, ctx.zero]
    pairs = filtration_pairs(ctx, fam, zero)
    assert pairs[0] == (ctx.zero, ctx.one)        # t4: (-alpha, 1)
    assert pairs[1] == (ctx.one, ctx.zero)        # t1: (1, -alpha)
    P = evaluate_P(ctx, fam, zero)
    c = ctx.const
    assert P[0] == [[c(0), c(3 ** 5)], [c(1), c(0)]]
    assert P[1] == [[c(3 ** 3), c(0)], [c(0), c(1)]]


def test_alpha_parameter_valuation_enforced():
    ctx = make_context(3, N=10, D=4)
    fam = build_family(FamilySpec.make("induced", (0, 5), (5,)), 3)
    with pytest.raises(SpecError):
        evaluate_P(ctx, fam, [ctx.const(9)])   # needs valuation >= m+1 = 3
    a = [ctx.const(3)]
    assert ctx.valuation(alphas_from_a(ctx, fam, a)[0]) == 3
