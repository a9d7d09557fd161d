"""Residue-level symbolic checks on the products Q_f = P_1 P_2 ... P_f.

Polynomials live in F_p[X_1, ..., X_f] (all data entering these checks is
defined over the prime field).  Reduction modulo ``I`` means reducing mod p
and setting every ``X_i`` to 0.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .family import FamilySpec, TypedMatrixFamily, assign_types, position_of


class ResiduePoly:
    """Sparse polynomial over F_p; zero coefficients are never stored."""

    __slots__ = ("p", "nvars", "terms")

    def __init__(self, p: int, nvars: int, terms: dict | None = None):
        self.p = p
        self.nvars = nvars
        self.terms = {}
        for mono, c in (terms or {}).items():
            c %= p
            if c:
                self.terms[tuple(mono)] = c

    @classmethod
    def const(cls, p, nvars, c):
        return cls(p, nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, p, nvars, idx):
        mono = [0] * nvars
        mono[idx] = 1
        return cls(p, nvars, {tuple(mono): 1})

    def __add__(self, other):
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return ResiduePoly(self.p, self.nvars, out)

    def __neg__(self):
        return ResiduePoly(self.p, self.nvars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        return ResiduePoly(self.p, self.nvars, out)

    def __eq__(self, other):
        return isinstance(other, ResiduePoly) and self.terms == other.terms

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(m) for m in self.terms)

    def at_zero(self) -> int:
        return self.terms.get((0,) * self.nvars, 0)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in sorted(self.terms.items()):
            mono = "*".join(f"X{i + 1}" + (f"^{e}" if e > 1 else "")
                            for i, e in enumerate(m) if e)
            parts.append(f"{c}*{mono}" if mono else str(c))
        return " + ".join(parts)


def _matmul(A, B):
    return [[A[i][0] * B[0][j] + A[i][1] * B[1][j] for j in range(2)] for i in range(2)]


def position_mod_p(family: TypedMatrixFamily, i: int, p: int) -> list:
    """P_i mod p with indeterminate X_{i} (X_f for position 0)."""
    f = family.f
    n = f
    var_idx = (i - 1) % f                   # X_1..X_f with X_f at position 0
    X = ResiduePoly.var(p, n, var_idx)
    one = ResiduePoly.const(p, n, 1)
    zero = ResiduePoly(p, n)
    ck = ResiduePoly.const(p, n, family.spec.unit(i) if family.k[i] == 0 else 0)
    tag = family.types[i]
    if tag == "t1":
        return [[ck, zero], [X, one]]
    if tag == "t2":
        return [[X, one], [ck, zero]]
    if tag == "t3":
        return [[one, X], [zero, ck]]
    return [[zero, ck], [one, X]]


def Qf_mod_p(family: TypedMatrixFamily, p: int) -> list:
    """P_1 P_2 ... P_f mod p as a 2x2 matrix of ResiduePoly."""
    Q = None
    for i in family.product_order():
        Pi = position_mod_p(family, i, p)
        Q = Pi if Q is None else _matmul(Q, Pi)
    return Q


@dataclass
class TraceReport:
    nonconstant: bool
    witness: tuple | None
    trace: ResiduePoly


def check_trace_nonconstant(Q: list) -> TraceReport:
    tr = Q[0][0] + Q[1][1]
    witness = next((m for m in sorted(tr.terms) if any(m)), None)
    return TraceReport(witness is not None, witness, tr)


ELEMENTARY = {(1, 0, 0, 0): "E11", (0, 1, 0, 0): "E12", (0, 0, 1, 0): "E21", (0, 0, 0, 1): "E22"}


def classify(M: list, p: int) -> str:
    """Tag a residue 2x2 matrix: E_ij, 'zero' or 'other'."""
    flat = tuple(M[r][c] % p for r in range(2) for c in range(2))
    if not any(flat):
        return "zero"
    return ELEMENTARY.get(flat, "other")


def Qf_mod_I(family: TypedMatrixFamily, p: int):
    Q = Qf_mod_p(family, p)
    M = [[Q[r][c].at_zero() for c in range(2)] for r in range(2)]
    return M, classify(M, p)


def _int_matrix_at_zero(family: TypedMatrixFamily, i: int, p: int) -> list:
    """P_i with X_i = 0 over Z (exact p-powers)."""
    d = family.spec.unit(i) * p ** family.k[i]
    tag = family.types[i]
    return {"t1": [[d, 0], [0, 1]], "t2": [[0, 1], [d, 0]],
            "t3": [[1, 0], [0, d]], "t4": [[0, d], [1, 0]]}[tag]


@dataclass
class ClaimAReport:
    applicable: bool
    Q_tag: str
    inverse_side: list
    inverse_tag: str
    literal: bool          # the statement exactly as posed
    sign: int | None       # s with p^{fk} Q^{-1} = s * Q mod I in the off-diagonal case
    up_to_sign: bool


def verify_claim_A(family: TypedMatrixFamily, p: int) -> ClaimAReport:
    """Compare p^{fk} Q_f^{-1} mod I with the claimed reduction.

    Claimed: ``-Q_f`` when ``Q_f mod I`` is ``E12`` or ``E21``; the diagonal
    tags swap.  The inverse is formed from the adjugate with an exact division
    by ``det / p^{fk}``, a unit; the reduction with X = 0 commutes with it.
    """
    k = family.k
    applicable = len(set(k)) == 1 and k[0] > 0
    Q = [[1, 0], [0, 1]]
    for i in family.product_order():
        Q = _matmul(Q, _int_matrix_at_zero(family, i, p))
    Qbar = [[x % p for x in row] for row in Q]
    tag = classify(Qbar, p)
    det = Q[0][0] * Q[1][1] - Q[0][1] * Q[1][0]
    fk = sum(k)
    unit, r = divmod(det, p ** fk)
    assert r == 0 and unit % p, "determinant must be a unit times p^(sum k)"
    uinv = pow(unit, -1, p)
    adj = [[Q[1][1], -Q[0][1]], [-Q[1][0], Q[0][0]]]
    inv_side = [[x * uinv % p for x in row] for row in adj]
    inv_tag = classify(inv_side, p)
    sign = None
    if tag in ("E12", "E21"):
        neg = [[-x % p for x in row] for row in Qbar]
        literal = inv_side == neg
        if inv_side == Qbar:
            sign = 1
        elif literal:
            sign = -1
        up = sign is not None
    elif tag == "E11":
        literal = up = inv_tag == "E22"
    elif tag == "E22":
        literal = up = inv_tag == "E11"
    else:
        literal = up = False
    return ClaimAReport(applicable, tag, inv_side, inv_tag, literal, sign, up)


def _rank_mod_p(rows: list, p: int) -> int:
    M = [list(r) for r in rows]
    rank = 0
    ncols = len(M[0]) if M else 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(M)) if M[r][c] % p), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        inv = pow(M[rank][c], -1, p)
        M[rank] = [x * inv % p for x in M[rank]]
        for r in range(len(M)):
            if r != rank and M[r][c] % p:
                fac = M[r][c]
                M[r] = [(x - fac * y) % p for x, y in zip(M[r], M[rank])]
        rank += 1
    return rank


def rank_mod_p(rows: list, p: int) -> int:
    return _rank_mod_p(rows, p)


@dataclass
class SurjectivityReport:
    rank: int
    dimension: int

    @property
    def surjective(self) -> bool:
        return self.rank == self.dimension


def operator_matrix(Pbar: list, Tbar: list, p: int) -> list:
    """Matrix of (H_j) -> (H_j - Pbar_j H_{j+1} Tbar_j) on (2x2)^f over F_p."""
    f = len(Pbar)
    n = 4 * f
    rows = [[0] * n for _ in range(n)]
    for j in range(f):
        Pj, Tj = Pbar[j], Tbar[j]
        for r in range(2):
            for c in range(2):
                row = rows[4 * j + 2 * r + c]
                row[4 * j + 2 * r + c] += 1
                nj = (j + 1) % f
                for s in range(2):
                    for t in range(2):
                        row[4 * nj + 2 * s + t] -= Pj[r][s] * Tj[t][c]
    return [[x % p for x in row] for row in rows]


def check_operator_surjective(family: TypedMatrixFamily, p: int, s: int | None = None,
                              A_bar: list | None = None) -> SurjectivityReport:
    """Surjectivity of H -> H - P H (p^{s-1} P^{-1}) on residue matrices.

    ``s - 1`` defaults to the largest weight.  ``A_bar`` optionally gives
    residue perturbations (I + A) per position.
    """
    f = family.f
    d = max(family.k) if s is None else s - 1
    Pbar, Tbar = [], []
    for j in range(f):
        i = position_of(j, f)
        M = _int_matrix_at_zero(family, i, p)
        if A_bar is not None:
            M = _matmul([[1 + A_bar[i][0][0], A_bar[i][0][1]],
                         [A_bar[i][1][0], 1 + A_bar[i][1][1]]], M)
        det = M[0][0] * M[1][1] - M[0][1] * M[1][0]
        v = 0
        while det % p == 0:
            det //= p
            v += 1
        adj = [[M[1][1], -M[0][1]], [-M[1][0], M[0][0]]]
        uinv = pow(det, -1, p ** (d + 1)) if d >= v else 0
        scale = p ** (d - v) if d >= v else 0
        Tbar.append([[x * uinv * scale % p for x in row] for row in adj])
        Pbar.append([[x % p for x in row] for row in M])
    rows = operator_matrix(Pbar, Tbar, p)
    return SurjectivityReport(_rank_mod_p(rows, p), 4 * f)


# ---------------------------------------------------------------------------
# enumeration of family-legal data


def legal_specs(f: int, k: int, p: int, cases=("induced", "split")):
    """Every ell-vector (and case) with equal weights k, deduplicated by types."""
    seen = set()
    for case in cases:
        for choice in itertools.product((0, 1), repeat=f):
            ell = [0] * (2 * f)
            for i, c in enumerate(choice):
                ell[i] = k if c else 0
                ell[f + i] = 0 if c else k
            try:
                spec = FamilySpec.make(case, ell, [k] * f)
            except ValueError:
                continue
            key = (case, assign_types(spec))
            if key in seen:
                continue
            seen.add(key)
            yield spec


def legal_type_vectors(f: int) -> set:
    """All type vectors (P_0, ..., P_{f-1}) the parity tables can emit."""
    out = set()
    for spec in legal_specs(f, 3, 3):
        out.add(assign_types(spec))
    return out


def b_forced_zero(p: int, sign: int = -1) -> bool:
    """B = sign * E B E mod p (E = E12 or E21) only for B = 0; exhaustive."""
    for E in ([[0, 1], [0, 0]], [[0, 0], [1, 0]]):
        for vals in itertools.product(range(p), repeat=4):
            B = [[vals[0], vals[1]], [vals[2], vals[3]]]
            R = _matmul(_matmul(E, B), E)
            if all((B[r][c] - sign * R[r][c]) % p == 0 for r in range(2) for c in range(2)):
                if any(vals):
                    return False
    return True


@dataclass
class ResidueSuiteRow:
    f: int
    case: str
    types: tuple
    tag: str
    claim_a: ClaimAReport
    trace: TraceReport
    surjective: SurjectivityReport
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = (self.tag in ("E12", "E21") and self.claim_a.literal
                       and self.trace.nonconstant and self.surjective.surjective)

    @property
    def structural(self) -> bool:
        """Trace and surjectivity, with Claim A up to sign wherever Q_f mod I is nonzero."""
        claim = self.claim_a.up_to_sign if self.tag != "zero" else True
        return claim and self.trace.nonconstant and self.surjective.surjective


def residue_suite(p: int = 3, fs=(1, 2, 3), k: int | None = None) -> list:
    """Exhaustive residue-level checks over all legal type vectors."""
    k = p if k is None else k
    from .family import build_family
    rows = []
    for f in fs:
        for spec in legal_specs(f, k, p):
            fam = build_family(spec, p)
            _, tag = Qf_mod_I(fam, p)
            rows.append(ResidueSuiteRow(
                f, spec.case, fam.types, tag, verify_claim_A(fam, p),
                check_trace_nonconstant(Qf_mod_p(fam, p)),
                check_operator_surjective(fam, p)))
    return rows
