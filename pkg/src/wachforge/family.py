"""Weight combinatorics, matrix types and the parameterised Frobenius matrices.

Positions are numbered ``0..f-1`` with position ``0`` standing for ``f``
(so ``P_0 = P_f``).  Helpers :func:`coord_of` / :func:`position_of`
translate between a position and the coordinate of a :class:`TauMatrix`
(coordinate ``j`` holds ``P_{j+1}``).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from .padic import GlobalContext, vp_int

TYPES = ("t1", "t2", "t3", "t4")
EVEN_TYPES = frozenset({"t2", "t4"})


class SpecError(ValueError):
    """A family specification violates the construction's constraints."""

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


def coord_of(i: int, f: int) -> int:
    return (i - 1) % f


def position_of(j: int, f: int) -> int:
    return (j + 1) % f


# ---------------------------------------------------------------------------
# weights


@dataclass(frozen=True)
class WeightProfile:
    k: tuple[int, ...]

    def __post_init__(self):
        if not self.k or any(ki < 0 for ki in self.k):
            raise SpecError("weights must be a nonempty list of nonnegative integers", "weights")

    @property
    def f(self) -> int:
        return len(self.k)

    @cached_property
    def w(self) -> tuple[int, ...]:
        """Distinct positive weights in increasing order."""
        return tuple(sorted({ki for ki in self.k if ki > 0}))

    @property
    def t(self) -> int:
        return len(self.w)

    @property
    def k_max(self) -> int:
        return max(self.k)

    @cached_property
    def index_sets(self) -> tuple[frozenset, ...]:
        """I_0 = all positions, I_j = {i : k_i > w_{j-1}}, ..., I_t = {}."""
        sets = [frozenset(range(self.f))]
        for j in range(1, self.t + 1):
            sets.append(frozenset(i for i in range(self.f) if self.k[i] > self.w[j - 1]))
        return tuple(sets)


def alpha_of(p: int, ell: int) -> int:
    """sum_{n>=0} floor(ell / (p^n (p-1)))."""
    total, d = 0, p - 1
    while d <= ell:
        total += ell // d
        d *= p
    return total


def alpha_brute(ctx: GlobalContext, ell: int) -> int:
    """sum_{j=1..ell} v_p(1 - chi^j), computed from the context's generator."""
    chi = ctx.chi_delta
    return sum(int(vp_int(1 - chi ** j, ctx.p)) for j in range(1, ell + 1))


def compute_m(k: Sequence[int], p: int) -> int:
    if max(k) < p:
        raise SpecError(f"largest weight {max(k)} is below p={p}", "weights")
    if all(ki == p for ki in k):
        return 0
    return (max(k) - 1) // (p - 1)


def compute_m_k(k: Sequence[int], p: int, trace_condition: bool) -> int:
    if max(k) < p:
        raise SpecError(f"largest weight {max(k)} is below p={p}", "weights")
    if all(ki == p for ki in k) and trace_condition:
        return 0
    return (max(k) - 1) // (p - 1)


# ---------------------------------------------------------------------------
# specs and types


@dataclass(frozen=True)
class FamilySpec:
    case: str
    ell: tuple[int, ...]
    weights: WeightProfile
    c_units: tuple[int, ...] = ()
    twist_c: int = 1

    @classmethod
    def make(cls, case: str, ell, k, c_units=None, twist_c: int = 1) -> "FamilySpec":
        wp = WeightProfile(tuple(k))
        cu = tuple(c_units) if c_units is not None else (1,) * wp.f
        spec = cls(case, tuple(ell), wp, cu, twist_c)
        spec.validate()
        return spec

    @property
    def f(self) -> int:
        return self.weights.f

    @property
    def k(self) -> tuple[int, ...]:
        return self.weights.k

    def validate(self, p: int | None = None) -> None:
        f = self.f
        if self.case not in ("induced", "split"):
            raise SpecError(f"unknown case {self.case!r}", "case")
        if len(self.ell) != 2 * f:
            raise SpecError(f"expected {2 * f} entries, got {len(self.ell)}", "ell")
        for i in range(f):
            if sorted((self.ell[i], self.ell[f + i])) != sorted((0, self.k[i])):
                raise SpecError(f"{{ell_{i}, ell_{f + i}}} must equal {{0, k_{i}}}", f"ell[{i}]")
        if self.case == "split":
            if not any(self.ell[:f]) or not any(self.ell[f:]):
                raise SpecError("split case needs both halves of ell nonzero", "ell")
        if len(self.c_units) != f:
            raise SpecError(f"expected {f} units", "c_units")
        if p is not None:
            if any(c % p == 0 for c in self.c_units):
                raise SpecError("units must be prime to p", "c_units")
            if self.twist_c % p == 0:
                raise SpecError("twist must be prime to p", "twist_c")
            if self.weights.k_max < p:
                raise SpecError(f"largest weight {self.weights.k_max} is below p={p}", "weights")

    def unit(self, i: int) -> int:
        """The unit multiplying p^{k_i} in P_i (the twist lands on P_0)."""
        u = self.c_units[i]
        if self.case == "split" and i == 0:
            u *= self.twist_c
        return u


def _rule(ell_i: int, k_i: int, even_before: int) -> str:
    even = even_before % 2 == 0
    if ell_i == 0:
        return "t2" if even else "t1"
    return "t1" if even else "t2"


def assign_types(spec: FamilySpec) -> tuple[str, ...]:
    """Types of (P_0, P_1, ..., P_{f-1}) per the parity tables."""
    f = spec.f
    types = [None] * f
    n_even = 0
    for i in range(1, f):
        types[i] = _rule(spec.ell[i], spec.k[i], n_even)
        n_even += types[i] in EVEN_TYPES
    even = n_even % 2 == 0
    zero = spec.ell[0] == 0
    if spec.case == "induced":
        table = {(True, True): "t4", (True, False): "t3", (False, True): "t2", (False, False): "t1"}
    else:
        table = {(True, True): "t3", (True, False): "t4", (False, True): "t1", (False, False): "t2"}
    types[0] = table[(zero, even)]
    return tuple(types)


@dataclass(frozen=True)
class TypedMatrixFamily:
    spec: FamilySpec
    types: tuple[str, ...]
    m: int
    m_k: int

    @property
    def f(self) -> int:
        return self.spec.f

    @property
    def k(self) -> tuple[int, ...]:
        return self.spec.k

    def product_order(self) -> list[int]:
        """Positions in the order P_1, P_2, ..., P_f (= P_0)."""
        return [position_of(j, self.f) for j in range(self.f)]


def build_family(spec: FamilySpec, p: int, trace_condition: bool = True) -> TypedMatrixFamily:
    spec.validate(p)
    m = compute_m(spec.k, p)
    return TypedMatrixFamily(spec, assign_types(spec), m, compute_m_k(spec.k, p, trace_condition))


def type_shape(tag: str, x, det_entry):
    """The 2x2 nested list of a type with parameter ``x`` and the p^k-slot entry."""
    one, zero = "1", "0"
    if tag == "t1":
        return [[det_entry, zero], [x, one]]
    if tag == "t2":
        return [[x, one], [det_entry, zero]]
    if tag == "t3":
        return [[one, x], [zero, det_entry]]
    if tag == "t4":
        return [[zero, det_entry], [one, x]]
    raise ValueError(f"unknown type {tag!r}")


def _fill(shape, ctx: GlobalContext):
    return [[ctx.one if v == "1" else ctx.zero if v == "0" else v for v in row] for row in shape]


def evaluate_P(ctx: GlobalContext, family: TypedMatrixFamily, alphas: Sequence,
               A: Sequence | None = None, check: bool = True) -> list:
    """Raw O_E matrices (I + A_i) P_i(alpha_i) indexed by position i.

    ``alphas`` and ``A`` are indexed by position; ``A`` may be None for zero.
    """
    p = ctx.p
    out = []
    for i in range(family.f):
        a = alphas[i]
        if isinstance(a, int):
            a = ctx.const(a)
        if check and ctx.valuation(a) < family.m + 1:
            raise SpecError(f"alpha_{i} has valuation {ctx.valuation(a)} < m+1 = {family.m + 1}",
                            f"alpha[{i}]")
        det_entry = ctx.const(family.spec.unit(i) * p ** family.k[i])
        P = _fill(type_shape(family.types[i], a, det_entry), ctx)
        if A is not None:
            P = mat_mul_raw(ctx, mat_add_raw(ctx, identity_raw(ctx), A[i]), P)
        out.append(P)
    return out


def filtration_pairs(ctx: GlobalContext, family: TypedMatrixFamily, alphas: Sequence) -> list:
    """(x_i, y_i) per position: (1, -alpha_i) for t1/t2, (-alpha_i, 1) for t3/t4."""
    out = []
    for i in range(family.f):
        a = alphas[i]
        if isinstance(a, int):
            a = ctx.const(a)
        if family.types[i] in ("t1", "t2"):
            out.append((ctx.one, ctx.neg(a)))
        else:
            out.append((ctx.neg(a), ctx.one))
    return out


# ---------------------------------------------------------------------------
# raw constant matrices over O_E


def identity_raw(ctx: GlobalContext, n: int = 2) -> list:
    return [[ctx.one if i == j else ctx.zero for j in range(n)] for i in range(n)]


def zero_raw(ctx: GlobalContext, n: int = 2) -> list:
    return [[ctx.zero] * n for _ in range(n)]


def mat_add_raw(ctx, A, B):
    return [[ctx.add(a, b) for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_sub_raw(ctx, A, B):
    return [[ctx.sub(a, b) for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_mul_raw(ctx, A, B):
    n, m, l = len(A), len(B), len(B[0])
    out = []
    for i in range(n):
        row = []
        for j in range(l):
            acc = ctx.zero
            for t in range(m):
                acc = ctx.add(acc, ctx.mul(A[i][t], B[t][j]))
            row.append(acc)
        out.append(row)
    return out


def mat_scale_raw(ctx, A, c):
    if isinstance(c, int):
        return [[ctx.scale(a, c) for a in row] for row in A]
    return [[ctx.mul(a, c) for a in row] for row in A]


def det2_raw(ctx, A):
    return ctx.sub(ctx.mul(A[0][0], A[1][1]), ctx.mul(A[0][1], A[1][0]))


def adj2_raw(ctx, A):
    return [[A[1][1], ctx.neg(A[0][1])], [ctx.neg(A[1][0]), A[0][0]]]


def mat_valuation_raw(ctx, A) -> float:
    return min(ctx.valuation(a) for row in A for a in row)


# ---------------------------------------------------------------------------
# sampling


def sample_a(ctx: GlobalContext, family: TypedMatrixFamily, rng) -> list:
    """Parameters a_i in m_E, so that alpha_i = p^m a_i lies in p^m m_E."""
    return [ctx.random_element(rng, 1) for _ in range(family.f)]


def alphas_from_a(ctx: GlobalContext, family: TypedMatrixFamily, a: Sequence) -> list:
    return [ctx.scale(ai, ctx.p ** family.m) for ai in a]


def sample_A(ctx: GlobalContext, family: TypedMatrixFamily, rng, c: int) -> list:
    """Constant perturbation with entries p^{c + alpha(k-1)} * u."""
    v = c + alpha_of(ctx.p, family.spec.weights.k_max - 1)
    return [[[ctx.random_element(rng, v) for _ in range(2)] for _ in range(2)]
            for _ in range(family.f)]
