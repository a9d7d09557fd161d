import random

import pytest
from hypothesis import given, settings, strategies as st

from wachforge import _kernels_py
from wachforge.padic import make_context
from wachforge.series import (Series, TauMatrix, apply_gamma, apply_phi, gamma_pi, norm_phi,
                              phi_pi, q_element)

CTX = make_context(3, f=1, N=10, D=8)
CTX2 = make_context(3, f=2, N=8, D=6)

coeff_lists = st.lists(st.integers(0, CTX.modulus - 1), min_size=CTX.D, max_size=CTX.D)
c_units = st.sampled_from([1, 2, 4, 5, 7, 8])


def S(xs, ctx=CTX):
    return Series.from_ints(ctx, xs)


def test_known_series():
    pi = Series.monomial(CTX, 1)
    assert phi_pi(CTX) == S([0, 3, 3, 1])
    assert q_element(CTX) == S([3, 3, 1])
    assert q_element(CTX) * pi == phi_pi(CTX)
    # (1 + pi)^2 - 1
    assert gamma_pi(CTX, 2) == S([0, 2, 1])


@given(coeff_lists, coeff_lists, coeff_lists)
def test_ring_laws(a, b, c):
    x, y, z = S(a), S(b), S(c)
    assert x * y == y * x
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z


@given(coeff_lists, coeff_lists)
def test_phi_and_gamma_are_ring_maps(a, b):
    x, y = S(a), S(b)
    assert (x * y).phi() == x.phi() * y.phi()
    assert (x + y).gamma(2) == x.gamma(2) + y.gamma(2)
    assert x.phi().gamma(5) == x.gamma(5).phi()


@given(coeff_lists, c_units, c_units)
def test_gamma_composition(a, c, d):
    x = S(a)
    assert x.gamma(c).gamma(d) == x.gamma(c * d)


@given(coeff_lists)
def test_inverse(a):
    a = list(a)
    a[0] = a[0] * 3 + 1
    x = S(a)
    assert x * x.inverse() == Series.constant(CTX, 1)


@settings(max_examples=30)
@given(st.data())
def test_python_and_compiled_kernels_agree(data):
    from wachforge import kernels
    ctx = CTX2
    n = ctx.D * ctx.e
    a = data.draw(st.lists(st.integers(0, ctx.modulus - 1), min_size=n, max_size=n))
    b = data.draw(st.lists(st.integers(0, ctx.modulus - 1), min_size=n, max_size=n))
    ref = _kernels_py.series_mul(a, b, ctx.D, ctx.e, ctx.g, ctx.modulus)
    assert kernels.series_mul(a, b, ctx.D, ctx.e, ctx.g, ctx.modulus) == ref


def test_phi_shifts_coordinates():
    pi = Series.monomial(CTX2, 1)
    z = Series.zero(CTX2)
    T = TauMatrix([[[pi, z], [z, z]], [[z, z], [z, z]]])
    out = apply_phi(T)
    assert out.coords[0][0][0] == z
    assert out.coords[1][0][0] == phi_pi(CTX2)
    assert apply_gamma(apply_phi(T), 2) == apply_phi(apply_gamma(T, 2))


def test_tau_inverse_and_norm():
    rng = random.Random(3)
    ctx = CTX2
    blocks = [[[Series.from_elems(ctx, [ctx.random_element(rng, 1) for _ in range(ctx.D)])
                for _ in range(2)] for _ in range(2)] for _ in range(2)]
    T = TauMatrix.identity(ctx, 2) + TauMatrix(blocks)
    assert T * T.inverse2() == TauMatrix.identity(ctx, 2)
    # constants: coordinate 0 of the norm is A0 A1, coordinate 1 is A1 A0
    c = ctx.const
    A0 = [[c(0), c(1)], [c(1), c(0)]]
    A1 = [[c(2), c(0)], [c(0), c(1)]]
    N = norm_phi(TauMatrix.from_constants(ctx, [A0, A1]))
    assert N.coeff(0)[0] == [[c(0), c(1)], [c(2), c(0)]]
    assert N.coeff(0)[1] == [[c(0), c(2)], [c(1), c(0)]]


def test_truncation_beyond_D_raises():
    with pytest.raises(IndexError):
        Series.zero(CTX).coeff(CTX.D)
