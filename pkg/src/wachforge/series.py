"""Truncated power series over O_E and the product ring O_E[[pi]]^f.

A :class:`Series` is known modulo ``(p^N, pi^D)``.  The f-fold product ring
carries two actions:

* Frobenius ``phi`` substitutes ``pi -> (1+pi)^p - 1`` and shifts the
  coordinates: coordinate ``i`` of ``phi(x)`` is ``x[i+1 mod f](phi(pi))``.
* ``gamma_c`` substitutes ``pi -> (1+pi)^c - 1`` in every coordinate.

Throughout the package coordinate ``j`` of a :class:`TauMatrix` holds the
matrix ``P_{j+1}`` of a family (so coordinate ``f-1`` holds ``P_f = P_0``).
With this convention coordinate 0 of ``norm_phi(M)`` reduces modulo ``pi``
to the ordered product ``P_1 P_2 ... P_f``.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Sequence

from . import kernels
from .padic import INF, GlobalContext, NoSolution


# ---------------------------------------------------------------------------
# binomials and substitution powers


def binomial(c: int, j: int) -> int:
    """C(c, j) for an integer ``c`` via the descending product over j!."""
    num = 1
    for t in range(j):
        num *= c - t
    den = 1
    for t in range(2, j + 1):
        den *= t
    q, r = divmod(num, den)
    assert r == 0, "binomial coefficient must be integral"
    return q


@lru_cache(maxsize=64)
def _substitution_powers(p: int, N: int, D: int, exponent: int) -> tuple:
    """Integer coefficient lists of s^j, j < D, for s = (1+pi)^exponent - 1."""
    mod = p ** N
    s = [binomial(exponent, j) % mod if j else 0 for j in range(D)]
    powers = [[1] + [0] * (D - 1)]
    for _ in range(1, D):
        powers.append(kernels.series_mul(powers[-1], s, D, 1, (0,), mod))
    return tuple(tuple(pw) for pw in powers)


def _powers(ctx: GlobalContext, exponent: int) -> list:
    return [list(pw) for pw in _substitution_powers(ctx.p, ctx.N, ctx.D, exponent)]


# ---------------------------------------------------------------------------
# series


class Series:
    """sum_j c_j pi^j modulo (p^N, pi^D) with c_j in O_E."""

    __slots__ = ("ctx", "data")

    def __init__(self, ctx: GlobalContext, data: list[int]):
        self.ctx = ctx
        self.data = data

    # constructors

    @classmethod
    def zero(cls, ctx: GlobalContext) -> "Series":
        return cls(ctx, [0] * (ctx.D * ctx.e))

    @classmethod
    def constant(cls, ctx: GlobalContext, elem) -> "Series":
        data = [0] * (ctx.D * ctx.e)
        if isinstance(elem, int):
            elem = ctx.const(elem)
        data[:ctx.e] = elem
        return cls(ctx, data)

    @classmethod
    def from_ints(cls, ctx: GlobalContext, coeffs: Sequence[int]) -> "Series":
        """Series with Z_p coefficients ``coeffs`` (low degree first)."""
        e, mod = ctx.e, ctx.modulus
        data = [0] * (ctx.D * e)
        for j, c in enumerate(coeffs[:ctx.D]):
            data[j * e] = c % mod
        return cls(ctx, data)

    @classmethod
    def from_elems(cls, ctx: GlobalContext, elems: Sequence) -> "Series":
        e = ctx.e
        data = [0] * (ctx.D * e)
        for j, c in enumerate(elems[:ctx.D]):
            data[j * e:(j + 1) * e] = c
        return cls(ctx, data)

    @classmethod
    def monomial(cls, ctx: GlobalContext, degree: int, elem=None) -> "Series":
        data = [0] * (ctx.D * ctx.e)
        if degree < ctx.D:
            data[degree * ctx.e:(degree + 1) * ctx.e] = ctx.one if elem is None else elem
        return cls(ctx, data)

    # access

    def coeff(self, j: int) -> tuple:
        e = self.ctx.e
        if j >= self.ctx.D:
            raise IndexError("coefficient beyond truncation")
        return tuple(self.data[j * e:(j + 1) * e])

    def coeffs(self) -> list[tuple]:
        return [self.coeff(j) for j in range(self.ctx.D)]

    def is_zero(self) -> bool:
        return not any(self.data)

    def order(self) -> float:
        """Index of the first nonzero coefficient (INF if none)."""
        e = self.ctx.e
        for j in range(self.ctx.D):
            if any(self.data[j * e:(j + 1) * e]):
                return j
        return INF

    def valuation(self) -> float:
        """Minimal p-adic valuation over all coefficients."""
        return self.ctx.valuation(self.data)

    def __eq__(self, other):
        return isinstance(other, Series) and self.data == other.data

    def __hash__(self):  # pragma: no cover - series are not dict keys
        return hash(tuple(self.data))

    def __repr__(self):
        terms = [f"{list(c) if self.ctx.e > 1 else c[0]}*pi^{j}"
                 for j, c in enumerate(self.coeffs()) if any(c)]
        return "Series(" + (" + ".join(terms) or "0") + ")"

    # arithmetic

    def __add__(self, other: "Series") -> "Series":
        mod = self.ctx.modulus
        return Series(self.ctx, [(x + y) % mod for x, y in zip(self.data, other.data)])

    def __sub__(self, other: "Series") -> "Series":
        mod = self.ctx.modulus
        return Series(self.ctx, [(x - y) % mod for x, y in zip(self.data, other.data)])

    def __neg__(self) -> "Series":
        mod = self.ctx.modulus
        return Series(self.ctx, [-x % mod for x in self.data])

    def __mul__(self, other) -> "Series":
        ctx = self.ctx
        if isinstance(other, Series):
            return Series(ctx, kernels.series_mul(self.data, other.data, ctx.D,
                                                  ctx.e, ctx.g, ctx.modulus))
        if isinstance(other, int):
            mod = ctx.modulus
            return Series(ctx, [x * other % mod for x in self.data])
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, elem) -> "Series":
        """Multiply by a constant raw element of O_E."""
        ctx, e = self.ctx, self.ctx.e
        if e == 1:
            c, mod = elem[0], ctx.modulus
            return Series(ctx, [x * c % mod for x in self.data])
        out = []
        for j in range(ctx.D):
            out.extend(ctx.mul(self.data[j * e:(j + 1) * e], elem))
        return Series(ctx, out)

    def __pow__(self, n: int) -> "Series":
        out = Series.constant(self.ctx, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def shift(self, s: int) -> "Series":
        """Multiply by pi^s (truncating)."""
        e, D = self.ctx.e, self.ctx.D
        if s >= D:
            return Series.zero(self.ctx)
        return Series(self.ctx, [0] * (s * e) + self.data[:(D - s) * e])

    def truncate(self, s: int) -> "Series":
        """Reduce modulo pi^s (keeping the ambient truncation)."""
        e = self.ctx.e
        data = list(self.data)
        for i in range(s * e, len(data)):
            data[i] = 0
        return Series(self.ctx, data)

    def residue(self) -> "Series":
        """Coefficientwise reduction modulo p (as a series in the same context)."""
        p = self.ctx.p
        return Series(self.ctx, [x % p for x in self.data])

    def div_p_power(self, v: int) -> "Series":
        if v == 0:
            return self
        q = self.ctx.p ** v
        if any(x % q for x in self.data):
            raise NoSolution(f"series not divisible by p^{v}")
        return Series(self.ctx, [x // q for x in self.data])

    def substitute(self, exponent: int) -> "Series":
        """Substitute pi -> (1+pi)^exponent - 1."""
        ctx = self.ctx
        return Series(ctx, kernels.series_compose(self.data, _powers(ctx, exponent),
                                                  ctx.D, ctx.e, ctx.modulus))

    def phi(self) -> "Series":
        """Substitute pi -> phi(pi); no coordinate shift (single coordinate)."""
        return self.substitute(self.ctx.p)

    def gamma(self, c: int) -> "Series":
        return self.substitute(c)

    def inverse(self) -> "Series":
        """Inverse of a series whose constant term is a unit."""
        ctx = self.ctx
        a0 = self.coeff(0)
        if ctx.valuation(a0) != 0:
            raise ZeroDivisionError("constant term is not a unit")
        inv0 = ctx.inv(a0)
        out = [inv0]
        for n in range(1, ctx.D):
            acc = ctx.zero
            for j in range(1, n + 1):
                acc = ctx.add(acc, ctx.mul(self.coeff(j), out[n - j]))
            out.append(ctx.neg(ctx.mul(inv0, acc)))
        return Series.from_elems(ctx, out)

    def with_context(self, ctx: GlobalContext) -> "Series":
        """Re-express in another context with the same e (reduce or pad)."""
        e, mod = ctx.e, ctx.modulus
        data = [x % mod for x in self.data[:ctx.D * e]]
        data += [0] * (ctx.D * e - len(data))
        return Series(ctx, data)


def phi_pi(ctx: GlobalContext) -> Series:
    """(1 + pi)^p - 1."""
    return Series.from_ints(ctx, [binomial(ctx.p, j) if j else 0 for j in range(ctx.D)])


def gamma_pi(ctx: GlobalContext, c: int) -> Series:
    """(1 + pi)^c - 1 for the integer representative ``c`` of a unit."""
    if c % ctx.p == 0:
        raise ValueError("gamma needs a p-adic unit")
    return Series.from_ints(ctx, [binomial(c, j) if j else 0 for j in range(ctx.D)])


def q_element(ctx: GlobalContext) -> Series:
    """q = phi(pi)/pi = ((1+pi)^p - 1)/pi, a polynomial of degree p-1."""
    return Series.from_ints(ctx, [binomial(ctx.p, j + 1) for j in range(ctx.D)])


# ---------------------------------------------------------------------------
# product ring and matrices


class TauSeries:
    """An f-tuple of series indexed by embedding positions 0..f-1."""

    __slots__ = ("coords",)

    def __init__(self, coords: Sequence[Series]):
        self.coords = list(coords)

    @property
    def ctx(self) -> GlobalContext:
        return self.coords[0].ctx

    def __add__(self, other):
        return TauSeries([a + b for a, b in zip(self.coords, other.coords)])

    def __sub__(self, other):
        return TauSeries([a - b for a, b in zip(self.coords, other.coords)])

    def __mul__(self, other):
        return TauSeries([a * b for a, b in zip(self.coords, other.coords)])

    def __eq__(self, other):
        return isinstance(other, TauSeries) and self.coords == other.coords

    def __repr__(self):
        return f"TauSeries({self.coords})"


Matrix = list  # n x n nested list of Series


def mat_mul(A: Matrix, B: Matrix) -> Matrix:
    n, m, l = len(A), len(B), len(B[0])
    out = []
    for i in range(n):
        row = []
        for j in range(l):
            acc = A[i][0] * B[0][j]
            for t in range(1, m):
                acc = acc + A[i][t] * B[t][j]
            row.append(acc)
        out.append(row)
    return out


def mat_add(A: Matrix, B: Matrix) -> Matrix:
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_sub(A: Matrix, B: Matrix) -> Matrix:
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_identity(ctx: GlobalContext, n: int = 2) -> Matrix:
    return [[Series.constant(ctx, 1 if i == j else 0) for j in range(n)] for i in range(n)]


def mat_map(A: Matrix, fn) -> Matrix:
    return [[fn(x) for x in row] for row in A]


def mat_det2(A: Matrix) -> Series:
    return A[0][0] * A[1][1] - A[0][1] * A[1][0]


def mat_adj2(A: Matrix) -> Matrix:
    return [[A[1][1], -A[0][1]], [-A[1][0], A[0][0]]]


def mat_inverse2(A: Matrix) -> Matrix:
    """Inverse of a 2x2 series matrix with unit determinant."""
    dinv = mat_det2(A).inverse()
    return mat_map(mat_adj2(A), lambda x: x * dinv)


def mat_coeff(A: Matrix, d: int) -> list:
    """Degree-d coefficient block of a series matrix (raw elements)."""
    return [[x.coeff(d) for x in row] for row in A]


class TauMatrix:
    """An f-tuple of n x n matrices over the truncated series ring."""

    __slots__ = ("coords",)

    def __init__(self, coords: Sequence[Matrix]):
        self.coords = list(coords)

    @property
    def ctx(self) -> GlobalContext:
        return self.coords[0][0][0].ctx

    @property
    def f(self) -> int:
        return len(self.coords)

    @property
    def n(self) -> int:
        return len(self.coords[0])

    @classmethod
    def identity(cls, ctx: GlobalContext, f: int, n: int = 2) -> "TauMatrix":
        return cls([mat_identity(ctx, n) for _ in range(f)])

    @classmethod
    def from_constants(cls, ctx: GlobalContext, blocks: Sequence) -> "TauMatrix":
        """Constant-in-pi TauMatrix from raw O_E matrices."""
        return cls([[[Series.constant(ctx, x) for x in row] for row in blk] for blk in blocks])

    def __add__(self, other):
        return TauMatrix([mat_add(a, b) for a, b in zip(self.coords, other.coords)])

    def __sub__(self, other):
        return TauMatrix([mat_sub(a, b) for a, b in zip(self.coords, other.coords)])

    def __mul__(self, other):
        return TauMatrix([mat_mul(a, b) for a, b in zip(self.coords, other.coords)])

    def __eq__(self, other):
        return isinstance(other, TauMatrix) and all(
            ra == rb for a, b in zip(self.coords, other.coords) for ra, rb in zip(a, b))

    def map(self, fn) -> "TauMatrix":
        return TauMatrix([mat_map(a, fn) for a in self.coords])

    def coeff(self, d: int) -> list:
        return [mat_coeff(a, d) for a in self.coords]

    def order(self) -> float:
        return min(x.order() for a in self.coords for row in a for x in row)

    def valuation(self) -> float:
        return min(x.valuation() for a in self.coords for row in a for x in row)

    def residue(self) -> "TauMatrix":
        return self.map(Series.residue)

    def truncate(self, s: int) -> "TauMatrix":
        return self.map(lambda x: x.truncate(s))

    def shift(self, s: int) -> "TauMatrix":
        return self.map(lambda x: x.shift(s))

    def with_context(self, ctx: GlobalContext) -> "TauMatrix":
        return self.map(lambda x: x.with_context(ctx))

    def with_truncation_of(self, ctx: GlobalContext) -> "TauMatrix":
        """Change truncation to ``ctx.D`` keeping this matrix's precision."""
        own = self.ctx
        target = own.with_truncation(ctx.D)
        return self.with_context(target)

    def inverse2(self) -> "TauMatrix":
        return TauMatrix([mat_inverse2(a) for a in self.coords])

    def __repr__(self):
        return f"TauMatrix({self.coords})"


def apply_phi(x):
    """Frobenius on TauSeries / TauMatrix: shift coordinates down, substitute phi(pi)."""
    if isinstance(x, TauSeries):
        f = len(x.coords)
        return TauSeries([x.coords[(i + 1) % f].phi() for i in range(f)])
    if isinstance(x, TauMatrix):
        f = x.f
        return TauMatrix([mat_map(x.coords[(i + 1) % f], Series.phi) for i in range(f)])
    raise TypeError(f"cannot apply phi to {type(x).__name__}")


def apply_gamma(x, c: int):
    """Action of gamma with chi(gamma) = c: coordinatewise substitution."""
    if isinstance(x, TauSeries):
        return TauSeries([s.gamma(c) for s in x.coords])
    if isinstance(x, TauMatrix):
        return x.map(lambda s: s.gamma(c))
    raise TypeError(f"cannot apply gamma to {type(x).__name__}")


def norm_phi(M: TauMatrix) -> TauMatrix:
    """M phi(M) ... phi^(f-1)(M)."""
    out, cur = M, M
    for _ in range(M.f - 1):
        cur = apply_phi(cur)
        out = out * cur
    return out
