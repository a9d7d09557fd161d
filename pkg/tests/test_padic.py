import pytest
from hypothesis import given, strategies as st

from wachforge import OElement, make_context, valuation
from wachforge.padic import (INF, NoSolution, smallest_irreducible, smallest_unit_generator,
                             solve_linear_raw, vp_int)

CTX = make_context(3, f=2, N=8, D=4)
elems = st.tuples(*[st.integers(0, CTX.modulus - 1)] * CTX.ext_degree)


def test_context_choices():
    assert CTX.g == smallest_irreducible(3, 2)
    assert smallest_unit_generator(3) == 2
    assert smallest_unit_generator(5) == 2
    assert smallest_unit_generator(7) == 3
    with pytest.raises(ValueError):
        make_context(4)
    with pytest.raises(ValueError):
        make_context(2)


@given(elems, elems, elems)
def test_ring_axioms(a, b, c):
    m, s = CTX.mul, CTX.add
    assert m(a, b) == m(b, a)
    assert m(m(a, b), c) == m(a, m(b, c))
    assert m(a, s(b, c)) == s(m(a, b), m(a, c))
    assert CTX.sub(s(a, b), b) == a


@given(elems)
def test_inverse_of_units(a):
    if CTX.valuation(a) == 0:
        assert CTX.mul(a, CTX.inv(a)) == CTX.one
    else:
        with pytest.raises(ZeroDivisionError):
            CTX.inv(a)


@given(elems, elems)
def test_valuation_multiplicative(a, b):
    va, vb = CTX.valuation(a), CTX.valuation(b)
    vab = CTX.valuation(CTX.mul(a, b))
    assert vab == (INF if va + vb >= CTX.N else va + vb)


@given(elems)
def test_sqrt_of_squares(a):
    sq = CTX.mul(a, a)
    r = CTX.sqrt(sq)
    assert r is not None
    v = CTX.valuation(sq)
    prec = CTX.N - (0 if v == INF else v // 2)
    assert CTX.valuation(CTX.sub(CTX.mul(r, r), sq)) >= min(prec, CTX.N)


def test_vp_int():
    assert vp_int(0, 3) == INF
    assert vp_int(54, 3) == 3
    assert vp_int(-8, 3) == 0


def test_oelement_wrapper():
    x = OElement(CTX, (3, 1))
    y = OElement(CTX, (1, 0))
    assert valuation(x * 3) == 1
    assert (x - x) == OElement(CTX, (0, 0))
    assert (y.inverse() * y) == y
    assert not OElement(CTX, (3, 0)).is_unit()


def test_solve_linear_with_loss_and_kernel():
    c = CTX.const
    M = [[c(3), c(1)], [c(0), c(9)]]
    b = [c(4), c(9)]
    sol = solve_linear_raw(CTX, M, b)
    assert sol.x == [c(1), c(1)]
    assert sol.loss == 3      # unit pivot, then the eliminated entry -27
    K = solve_linear_raw(CTX, [[c(1), c(2)]], [c(0)], want_kernel=True)
    assert K.rank == 1 and len(K.kernel) == 1
    v = K.kernel[0]
    assert CTX.add(v[0], CTX.scale(v[1], 2)) == CTX.zero


def test_solve_linear_no_solution():
    c = CTX.const
    with pytest.raises(NoSolution):
        solve_linear_raw(CTX, [[c(3)]], [c(1)])
