import pytest

from wachforge.family import FamilySpec, build_family
from wachforge.residue import (ResiduePoly, Qf_mod_I, Qf_mod_p, b_forced_zero,
                               check_operator_surjective, check_trace_nonconstant, classify,
                               legal_specs, rank_mod_p, residue_suite, verify_claim_A)


def fam(case, ell, k, twist=1):
    return build_family(FamilySpec.make(case, ell, k, twist_c=twist), 3)


def test_poly_arithmetic():
    x = ResiduePoly.var(3, 2, 0)
    y = ResiduePoly.var(3, 2, 1)
    one = ResiduePoly.const(3, 2, 1)
    s = (x + one) * (x - one)
    assert (s - x * x + one).is_zero()
    assert not (x * y).is_constant()
    assert (one + one + one).is_zero()
    assert (x + one).at_zero() == 1


def test_classify():
    assert classify([[0, 1], [0, 0]], 3) == "E12"
    assert classify([[0, 0], [1, 0]], 3) == "E21"
    assert classify([[0, 0], [0, 0]], 3) == "zero"
    assert classify([[1, 1], [0, 0]], 3) == "other"


def test_type_images_mod_I():
    # single-coordinate families expose each type's image
    assert Qf_mod_I(fam("induced", (0, 5), (5,)), 3)[1] == "E21"    # t4
    assert Qf_mod_I(fam("induced", (5, 0), (5,)), 3)[1] == "E12"    # t2


def test_claim_A_holds_with_plus_sign():
    for f in (fam("induced", (0, 5), (5,)), fam("induced", (5, 0), (5,))):
        rep = verify_claim_A(f, 3)
        assert rep.up_to_sign and rep.sign == 1 and not rep.literal


def test_split_f2_vanishes_mod_I():
    assert Qf_mod_I(fam("split", (3, 0, 0, 3), (3, 3), 2), 3)[1] == "zero"


def test_trace_and_surjectivity_everywhere():
    for row in residue_suite(3, (1, 2, 3)):
        assert row.trace.nonconstant, row
        assert row.surjective.surjective, row


def test_legal_specs_are_valid_and_distinct():
    for f in (1, 2, 3):
        specs = list(legal_specs(f, 3, 3))
        assert specs
        keys = {(s.case, build_family(s, 3).types) for s in specs}
        assert len(keys) == len(specs)


@pytest.mark.parametrize("sign", [1, -1])
def test_b_forced_zero(sign):
    assert b_forced_zero(3, sign)
    assert b_forced_zero(5, sign)


def test_rank_mod_p():
    assert rank_mod_p([[1, 2], [2, 4]], 3) == 1
    assert rank_mod_p([[1, 2], [2, 1]], 3) == 1     # 1*1 - 2*2 = -3
    assert rank_mod_p([[1, 0], [0, 1]], 3) == 2


def test_trace_report_on_K2():
    Q = Qf_mod_p(fam("induced", (0, 3, 5, 0), (5, 3)), 3)
    rep = check_trace_nonconstant(Q)
    assert rep.nonconstant and rep.witness is not None
    s = check_operator_surjective(fam("induced", (0, 3, 5, 0), (5, 3)), 3)
    assert s.rank == s.dimension
