"""Fixed-precision arithmetic in Z_p and in an unramified extension O_E.

Elements of O_E are stored as tuples of ``ext_degree`` integers in
``[0, p**N)``: the coefficients of a polynomial in ``x`` reduced modulo a
fixed monic lift ``g`` of an irreducible polynomial over F_p.  Because the
extension is unramified, the valuation of an element is the minimum of the
valuations of its coefficients.

Hot loops elsewhere work on these raw tuples through the methods of
:class:`GlobalContext`; :class:`OElement` and :class:`ResidueElement` are the
user-facing wrappers.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

INF = math.inf
"""Valuation marker for elements that are zero at the available precision."""


class PrecisionError(ArithmeticError):
    """Raised when an operation runs out of p-adic precision."""


class NoSolution(ArithmeticError):
    """Raised by :func:`solve_linear` for systems without an integral solution."""

    def __init__(self, message: str, row: int | None = None):
        super().__init__(message)
        self.row = row


# ---------------------------------------------------------------------------
# integers


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    r = math.isqrt(n)
    return all(n % d for d in range(3, r + 1, 2))


def vp_int(n: int, p: int) -> float:
    """p-adic valuation of a Python integer (``INF`` for 0)."""
    if n == 0:
        return INF
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def smallest_unit_generator(p: int) -> int:
    """Smallest integer >= 2 generating (Z/p^2)^x."""
    mod = p * p
    order = p * (p - 1)
    for g in range(2, mod):
        if g % p == 0:
            continue
        x, n = g, 1
        while x != 1:
            x = x * g % mod
            n += 1
        if n == order:
            return g
    raise ValueError(f"no generator modulo {p}^2")


# ---------------------------------------------------------------------------
# polynomials over F_p (lists of coefficients, low degree first)


def _fp_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _fp_mod(a: list[int], b: list[int], p: int) -> list[int]:
    a = _fp_trim([c % p for c in a])
    b = _fp_trim([c % p for c in b])
    inv = pow(b[-1], -1, p)
    while len(a) >= len(b):
        coef = a[-1] * inv % p
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[shift + i] = (a[shift + i] - coef * c) % p
        _fp_trim(a)
    return a


def _fp_mulmod(a: list[int], b: list[int], m: list[int], p: int) -> list[int]:
    out = [0] * (len(a) + len(b))
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _fp_mod(out, m, p)


def _fp_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    a = _fp_trim([c % p for c in a])
    b = _fp_trim([c % p for c in b])
    while b:
        a, b = b, _fp_mod(a, b, p)
    return a


def _fp_is_irreducible(g: list[int], p: int) -> bool:
    """Monic ``g`` is irreducible iff gcd(g, x^(p^i) - x) = 1 for i <= deg/2."""
    n = len(g) - 1
    if n == 1:
        return True
    xp = [0, 1]
    for _ in range(1, n // 2 + 1):
        # xp <- xp^p mod g
        r = [1]
        base, e = xp, p
        while e:
            if e & 1:
                r = _fp_mulmod(r, base, g, p)
            base = _fp_mulmod(base, base, g, p)
            e >>= 1
        xp = r
        diff = list(xp) + [0] * max(0, 2 - len(xp))
        diff[1] -= 1
        if len(_fp_gcd(g, diff, p)) > 1:
            return False
    return True


def smallest_irreducible(p: int, degree: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of ``degree`` over F_p.

    Candidates are ordered by the tuple ``(c_0, ..., c_{degree-1})`` of
    non-leading coefficients; the result is that tuple, lifted to [0, p).
    """
    for low in itertools.product(range(p), repeat=degree):
        if _fp_is_irreducible(list(low) + [1], p):
            return tuple(low)
    raise ValueError("no irreducible polynomial found")  # pragma: no cover


# ---------------------------------------------------------------------------
# context


@dataclass(frozen=True)
class GlobalContext:
    """Ambient arithmetic shared by every object of a run."""

    p: int
    f: int
    ext_degree: int
    N: int
    D: int
    chi_delta: int
    rng_seed: int = 0
    margin: int = 6
    g: tuple[int, ...] = field(default=(0,), repr=False)

    @cached_property
    def modulus(self) -> int:
        return self.p ** self.N

    @property
    def e(self) -> int:
        return self.ext_degree

    def with_precision(self, N: int) -> "GlobalContext":
        return GlobalContext(self.p, self.f, self.ext_degree, N, self.D,
                             self.chi_delta, self.rng_seed, self.margin, self.g)

    def with_truncation(self, D: int) -> "GlobalContext":
        return GlobalContext(self.p, self.f, self.ext_degree, self.N, D,
                             self.chi_delta, self.rng_seed, self.margin, self.g)

    # -- raw element constructors ------------------------------------------

    @property
    def zero(self) -> tuple[int, ...]:
        return (0,) * self.ext_degree

    @property
    def one(self) -> tuple[int, ...]:
        return (1,) + (0,) * (self.ext_degree - 1)

    def const(self, n: int) -> tuple[int, ...]:
        return (n % self.modulus,) + (0,) * (self.ext_degree - 1)

    def elem(self, coeffs: Sequence[int]) -> tuple[int, ...]:
        if len(coeffs) != self.ext_degree:
            raise ValueError(f"expected {self.ext_degree} coefficients")
        mod = self.modulus
        return tuple(c % mod for c in coeffs)

    # -- raw ring operations -----------------------------------------------

    def add(self, a, b):
        mod = self.modulus
        return tuple((x + y) % mod for x, y in zip(a, b))

    def sub(self, a, b):
        mod = self.modulus
        return tuple((x - y) % mod for x, y in zip(a, b))

    def neg(self, a):
        mod = self.modulus
        return tuple(-x % mod for x in a)

    def scale(self, a, n: int):
        mod = self.modulus
        return tuple(x * n % mod for x in a)

    def reduce_poly(self, prod: list[int]):
        """Reduce an unreduced product polynomial modulo (g, p^N)."""
        e, g, mod = self.ext_degree, self.g, self.modulus
        for top in range(len(prod) - 1, e - 1, -1):
            c = prod[top]
            if c:
                base = top - e
                for i in range(e):
                    prod[base + i] -= c * g[i]
        return tuple(prod[i] % mod for i in range(e))

    def mul(self, a, b):
        if self.ext_degree == 1:
            return (a[0] * b[0] % self.modulus,)
        e = self.ext_degree
        prod = [0] * (2 * e - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        return self.reduce_poly(prod)

    def valuation(self, a) -> float:
        v = INF
        p = self.p
        for c in a:
            if c:
                w = vp_int(c, p)
                if w < v:
                    v = w
        return v

    def is_zero(self, a) -> bool:
        return not any(a)

    def div_p_power(self, a, v: int):
        """Exact division by p^v; raises if ``a`` is not divisible."""
        if v == 0:
            return a
        q = self.p ** v
        out = []
        for c in a:
            if c % q:
                raise NoSolution(f"element not divisible by p^{v}")
            out.append(c // q)
        return tuple(out)

    def residue(self, a) -> tuple[int, ...]:
        p = self.p
        return tuple(c % p for c in a)

    def _residue_inverse(self, r: tuple[int, ...]) -> tuple[int, ...]:
        p, e = self.p, self.ext_degree
        if e == 1:
            return (pow(r[0], -1, p),)
        # r^(p^e - 2) in F_{p^e}
        res_ctx = self.with_precision(1)
        out, base, n = res_ctx.one, r, p ** e - 2
        while n:
            if n & 1:
                out = res_ctx.mul(out, base)
            base = res_ctx.mul(base, base)
            n >>= 1
        return out

    def inv(self, a):
        """Inverse of a unit, by Newton lifting from the residue field."""
        r = self.residue(a)
        if not any(r):
            raise ZeroDivisionError("element is not a unit")
        x = self._residue_inverse(r)
        prec = 1
        two = self.const(2)
        while prec < self.N:
            x = self.mul(x, self.sub(two, self.mul(a, x)))
            prec *= 2
        return x

    def unit_part(self, a):
        """Return ``(v, u)`` with ``a = p^v u`` and ``u`` a unit (v may be INF)."""
        v = self.valuation(a)
        if v == INF:
            return INF, self.zero
        v = int(v)
        q = self.p ** v
        return v, tuple(c // q for c in a)

    def lift_residue(self, r: Sequence[int]):
        return tuple(int(c) % self.p for c in r)

    def random_element(self, rng, valuation: int = 0):
        """Uniform element of p^valuation O_E (mod p^N)."""
        if valuation >= self.N:
            return self.zero
        span = self.p ** (self.N - valuation)
        q = self.p ** valuation
        return tuple(rng.randrange(span) * q for _ in range(self.ext_degree))

    def random_unit(self, rng):
        while True:
            u = self.random_element(rng)
            if any(c % self.p for c in u):
                return u

    def sqrt(self, a):
        """A square root of ``a`` in O_E, or ``None`` if none exists.

        Only defined at the available precision: a square root of ``a`` is
        returned modulo ``p^(N - v(a)/2)`` lifted to the context modulus.
        """
        v, u = self.unit_part(a)
        if v == INF:
            return self.zero
        if v % 2:
            return None
        r = self.residue(u)
        res_ctx = self.with_precision(1)
        root = None
        # brute force in the residue field; fields here are tiny
        for cand in itertools.product(range(self.p), repeat=self.ext_degree):
            if res_ctx.mul(cand, cand) == r:
                root = cand
                break
        if root is None:
            return None
        x = tuple(root)
        half = pow(2, -1, self.modulus)
        prec = 1
        while prec < self.N:
            x = self.scale(self.add(x, self.mul(u, self.inv(x))), half)
            prec *= 2
        return self.scale(x, self.p ** (v // 2))


def make_context(p: int, f: int = 1, ext_degree: int | None = None, N: int = 16,
                 D: int = 12, seed: int = 0, margin: int = 6) -> GlobalContext:
    """Build a :class:`GlobalContext`, validating the prime and the degrees."""
    if p == 2:
        raise ValueError("p must be odd")
    if not is_prime(p):
        raise ValueError(f"p={p} is not prime")
    if f < 1:
        raise ValueError("f must be positive")
    ext_degree = f if ext_degree is None else ext_degree
    if ext_degree < 1 or ext_degree % f:
        raise ValueError("ext_degree must be a positive multiple of f")
    if N < 1 or D < 1:
        raise ValueError("N and D must be at least 1")
    g = smallest_irreducible(p, ext_degree)
    return GlobalContext(p=p, f=f, ext_degree=ext_degree, N=N, D=D,
                         chi_delta=smallest_unit_generator(p),
                         rng_seed=seed, margin=margin, g=g)


# ---------------------------------------------------------------------------
# wrappers


class OElement:
    """An element of O_E modulo p^N."""

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: GlobalContext, coeffs):
        if isinstance(coeffs, int):
            coeffs = ctx.const(coeffs)
        self.ctx = ctx
        self.coeffs = ctx.elem(coeffs)

    def _wrap(self, raw) -> "OElement":
        out = object.__new__(OElement)
        out.ctx, out.coeffs = self.ctx, raw
        return out

    def _raw(self, other):
        if isinstance(other, OElement):
            return other.coeffs
        if isinstance(other, int):
            return self.ctx.const(other)
        return NotImplemented

    def __add__(self, other):
        o = self._raw(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.ctx.add(self.coeffs, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._raw(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.ctx.sub(self.coeffs, o))

    def __rsub__(self, other):
        o = self._raw(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.ctx.sub(o, self.coeffs))

    def __mul__(self, other):
        o = self._raw(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.ctx.mul(self.coeffs, o))

    __rmul__ = __mul__

    def __neg__(self):
        return self._wrap(self.ctx.neg(self.coeffs))

    def __eq__(self, other):
        o = self._raw(other)
        return NotImplemented if o is NotImplemented else self.coeffs == o

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"OElement({list(self.coeffs)})"

    def valuation(self) -> float:
        return self.ctx.valuation(self.coeffs)

    def is_unit(self) -> bool:
        return self.valuation() == 0

    def inverse(self) -> "OElement":
        return self._wrap(self.ctx.inv(self.coeffs))

    def residue(self) -> "ResidueElement":
        return ResidueElement(self.ctx, self.ctx.residue(self.coeffs))


class ResidueElement:
    """An element of the residue field k_E = F_{p^ext_degree}."""

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: GlobalContext, coeffs):
        self.ctx = ctx.with_precision(1)
        if isinstance(coeffs, int):
            coeffs = self.ctx.const(coeffs)
        self.coeffs = self.ctx.elem(coeffs)

    def _wrap(self, raw):
        out = object.__new__(ResidueElement)
        out.ctx, out.coeffs = self.ctx, raw
        return out

    def __add__(self, other):
        return self._wrap(self.ctx.add(self.coeffs, other.coeffs))

    def __sub__(self, other):
        return self._wrap(self.ctx.sub(self.coeffs, other.coeffs))

    def __mul__(self, other):
        return self._wrap(self.ctx.mul(self.coeffs, other.coeffs))

    def __neg__(self):
        return self._wrap(self.ctx.neg(self.coeffs))

    def __eq__(self, other):
        return isinstance(other, ResidueElement) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"ResidueElement({list(self.coeffs)})"

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def inverse(self) -> "ResidueElement":
        return self._wrap(self.ctx.inv(self.coeffs))

    def lift(self, ctx: GlobalContext) -> OElement:
        return OElement(ctx, self.coeffs)


def valuation(x: OElement) -> float:
    """Largest e <= N with p^e | x, or ``INF`` when x = 0 mod p^N."""
    return x.valuation()


# ---------------------------------------------------------------------------
# linear algebra


@dataclass
class LinearSolution:
    x: list
    loss: int
    rank: int
    kernel: list = field(default_factory=list)


def solve_linear_raw(ctx: GlobalContext, M: list[list[tuple]], b: list[tuple],
                     *, want_kernel: bool = False) -> LinearSolution:
    """Solve ``M x = b`` over O_E with minimal-valuation full pivoting.

    ``M`` is a list of rows of raw elements.  The returned ``loss`` is the sum
    of pivot valuations: the residual satisfies ``M x = b mod p^(N - loss)``.
    Free variables are set to zero.  Raises :class:`NoSolution` when the
    system has no integral solution.

    Full pivoting keeps every entry to the right of a pivot at valuation at
    least the pivot's, so back substitution divides exactly iff an integral
    solution exists.
    """
    rows = len(M)
    cols = len(M[0]) if rows else 0
    A = [list(r) + [bi] for r, bi in zip(M, b)]
    col_perm = list(range(cols))
    loss = 0
    pivot_vals: list[int] = []
    for r in range(min(rows, cols)):
        best = None
        for i in range(r, rows):
            row = A[i]
            for j in range(r, cols):
                v = ctx.valuation(row[j])
                if v != INF and (best is None or v < best[0]):
                    best = (v, i, j)
                    if v == 0:
                        break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        v, i, j = best
        v = int(v)
        A[r], A[i] = A[i], A[r]
        if j != r:
            for row in A:
                row[r], row[j] = row[j], row[r]
            col_perm[r], col_perm[j] = col_perm[j], col_perm[r]
        _, unit = ctx.unit_part(A[r][r])
        uinv = ctx.inv(unit)
        # scale so the pivot is exactly p^v, then divide the row tail by p^v
        prow = [ctx.mul(uinv, x) for x in A[r]]
        A[r] = prow
        for i2 in range(r + 1, rows):
            row = A[i2]
            if ctx.is_zero(row[r]):
                continue
            factor = ctx.div_p_power(row[r], v)
            A[i2] = [ctx.sub(x, ctx.mul(factor, y)) for x, y in zip(row, prow)]
        pivot_vals.append(v)
        loss += v
    rank = len(pivot_vals)
    for i in range(rank, rows):
        rhs = A[i][cols]
        if not ctx.is_zero(rhs):
            raise NoSolution("inconsistent system (residual valuation "
                             f"{ctx.valuation(rhs)})", row=i)
    # U'[r][j] = U[r][j] / p^v_r is integral for j > r
    scaled = []
    for r in range(rank):
        v = pivot_vals[r]
        scaled.append([ctx.div_p_power(A[r][j], v) for j in range(r + 1, cols)])

    def back_substitute(rhs: list, free: dict[int, tuple]) -> list:
        y = [ctx.zero] * cols
        for j, val in free.items():
            y[j] = val
        for r in range(rank - 1, -1, -1):
            acc = rhs[r]
            for off, u in enumerate(scaled[r]):
                yj = y[r + 1 + off]
                if not ctx.is_zero(yj) and not ctx.is_zero(u):
                    acc = ctx.sub(acc, ctx.mul(u, yj))
            y[r] = acc
        x = [ctx.zero] * cols
        for r in range(cols):
            x[col_perm[r]] = y[r]
        return x

    rhs = []
    for r in range(rank):
        try:
            rhs.append(ctx.div_p_power(A[r][cols], pivot_vals[r]))
        except NoSolution as exc:
            raise NoSolution(f"no integral solution: pivot {r} of valuation "
                             f"{pivot_vals[r]} does not divide", row=r) from exc
    x = back_substitute(rhs, {})
    kernel = []
    if want_kernel:
        zero_rhs = [ctx.zero] * rank
        for free in range(rank, cols):
            kernel.append(back_substitute(zero_rhs, {free: ctx.one}))
    return LinearSolution(x=x, loss=loss, rank=rank, kernel=kernel)


def solve_linear(M: list[list[OElement]], b: list[OElement]) -> tuple[list[OElement], int]:
    """Solve ``M x = b`` over O_E; returns ``(x, loss)``.

    See :func:`solve_linear_raw` for the precision contract.
    """
    if not M:
        return [], 0
    ctx = M[0][0].ctx
    sol = solve_linear_raw(ctx, [[e.coeffs for e in row] for row in M],
                           [e.coeffs for e in b])
    return [OElement(ctx, x) for x in sol.x], sol.loss
