"""The filtered phi-module side: filtration from the Wach module, HT type, weak admissibility.

Convention: embedding ``i`` acts on coordinate ``i`` of a vector ``v``; the
Frobenius relation reads ``phi(v)[j] = P[j] v[j+1]`` with ``P[j] = P_{j+1}``,
so the filtration pair ``(x_i, y_i)`` (attached to ``P_i``) lives on ``v[i]``.
Jump sets are stored as nonnegative integers ``{0, k_i}``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .family import (FamilySpec, TypedMatrixFamily, adj2_raw, alphas_from_a, det2_raw,
                     evaluate_P, filtration_pairs, mat_mul_raw, position_of)
from .padic import INF, GlobalContext, solve_linear_raw
from .series import Series, q_element
from .wach import PiData, build_pi


@dataclass
class FilteredModuleData:
    ctx: GlobalContext
    family: TypedMatrixFamily
    frobenius: list          # per coordinate j: raw matrix P_A(alpha) of position j+1
    fil_pairs: list          # per position i: (x_i, y_i)
    jumps: list              # per position i: sorted jump multiset
    index_sets: tuple

    @property
    def f(self) -> int:
        return self.family.f


# ---------------------------------------------------------------------------
# Wach-side filtration


def _poly_rem(ctx: GlobalContext, coeffs: list, modulus: list) -> list:
    """Remainder of ``coeffs`` by the monic polynomial ``modulus`` (raw elements)."""
    n = len(modulus) - 1
    out = [list(c) for c in coeffs]
    for deg in range(len(out) - 1, n - 1, -1):
        c = tuple(out[deg])
        if not any(c):
            continue
        for t in range(n + 1):
            out[deg - n + t] = list(ctx.sub(tuple(out[deg - n + t]), ctx.mul(c, modulus[t])))
    return [tuple(c) for c in out[:n]]


def _series_poly(s: Series) -> list:
    coeffs = s.coeffs()
    while len(coeffs) > 1 and not any(coeffs[-1]):
        coeffs.pop()
    return coeffs


def fil_dimension(ctx: GlobalContext, Pi_i: list, j: int):
    """dim Fil^j at one embedding and a generator of its image in N / pi N.

    Unknowns are x, y mod pi^j; the condition is
    ``Pi_i (phi(x), phi(y))^T = 0 mod q^j``.  Returns (dimension, basis of
    the projected (x_0, y_0) span).
    """
    if j <= 0:
        return 2, [(ctx.one, ctx.zero), (ctx.zero, ctx.one)]
    q = q_element(ctx)
    qj = _series_poly(q ** j)
    assert qj[-1] == ctx.one and len(qj) - 1 == j * (ctx.p - 1), "truncation too small"
    phi_pi = Series.monomial(ctx, 1).phi()
    cols = []
    for which in (0, 1):                    # x_t then y_t
        for t in range(j):
            pw = phi_pi ** t
            comps = []
            for r in range(2):
                poly = _series_poly(Pi_i[r][which] * pw)
                comps.extend(_poly_rem(ctx, poly + [ctx.zero] * max(0, len(qj) - len(poly)), qj))
            cols.append(comps)
    nrows = len(cols[0])
    M = [[cols[c][r] for c in range(len(cols))] for r in range(nrows)]
    sol = solve_linear_raw(ctx, M, [ctx.zero] * nrows, want_kernel=True)
    proj = [(vec[0], vec[j]) for vec in sol.kernel]
    basis = _span_basis(ctx, proj)
    return len(basis), basis


def _span_basis(ctx: GlobalContext, vecs: list) -> list:
    """A basis (over E) of the span of 2-vectors, normalised to unit content."""
    vecs = [v for v in vecs if not (ctx.is_zero(v[0]) and ctx.is_zero(v[1]))]
    if not vecs:
        return []
    vecs = [_normalise(ctx, v) for v in vecs]
    first = vecs[0]
    for v in vecs[1:]:
        if not _parallel(ctx, first, v):
            return [first, v]
    return [first]


def _normalise(ctx: GlobalContext, v):
    m = min(ctx.valuation(v[0]), ctx.valuation(v[1]))
    if m == INF:
        return v
    m = int(m)
    return (ctx.div_p_power(v[0], m), ctx.div_p_power(v[1], m))


def _cross(ctx, u, v):
    return ctx.sub(ctx.mul(u[0], v[1]), ctx.mul(u[1], v[0]))


def _parallel(ctx, u, v, tol: int = 0) -> bool:
    """u and v (unit content) span the same E-line up to p^(N - tol)."""
    return ctx.valuation(_cross(ctx, u, v)) >= ctx.N - tol


@dataclass
class FiltrationReport:
    dims: list               # per position: dims for j = 0..k_max+1
    lines: list              # per position: Wach-side generator of Fil^1 (or None)
    expected: list           # per position: (x_i, y_i)
    agree: list              # per position: bool
    margins: list            # per position: valuation of the cross product


def extract_filtration(pi: PiData) -> FiltrationReport:
    """Fil^j from the divisibility criterion, compared with the closed-form pairs."""
    fam = pi.family
    ctx0 = pi.ctx
    p, f = ctx0.p, fam.f
    k = fam.spec.weights.k_max
    big_D = k * (p - 1) + (k - 1) * p + p * (k + 1) + 4
    ctx = ctx0.with_truncation(max(big_D, ctx0.D))
    bpi = build_pi(ctx, fam, pi.a, pi.z)
    alphas = alphas_from_a(ctx, fam, bpi.a)
    expected = filtration_pairs(ctx, fam, alphas)
    dims, lines, agree, margins = [], [], [], []
    for i in range(f):
        Pi_i = bpi.Pi.coords[(i - 1) % f]
        row, line = [], None
        for j in range(0, k + 2):
            d, basis = fil_dimension(ctx, Pi_i, j)
            row.append(d)
            if j == 1 and d == 1:
                line = basis[0]
        dims.append(row)
        lines.append(line)
        exp = _normalise(ctx, expected[i])
        if fam.k[i] == 0:
            ok = row[1] == 0
            margins.append(ctx.N)
        elif line is None:
            ok = False
            margins.append(0)
        else:
            v = ctx.valuation(_cross(ctx, line, exp))
            margins.append(ctx.N if v == INF else int(v))
            ok = _parallel(ctx, line, exp)
        agree.append(ok)
    return FiltrationReport(dims, lines, expected, agree, margins)


def jumps_from_dims(dims: Sequence[int]) -> list:
    """Jump multiset from dims[j] = dim Fil^j, j = 0..J (dims[0] = 2)."""
    out = []
    for j in range(len(dims)):
        nxt = dims[j + 1] if j + 1 < len(dims) else 0
        out.extend([j] * (dims[j] - nxt))
    return out


def hodge_tate_type(report: FiltrationReport) -> list:
    """Per-embedding jump multisets, e.g. [0, k_i] (or [0, 0] when k_i = 0)."""
    return [jumps_from_dims(d) for d in report.dims]


# ---------------------------------------------------------------------------
# filtered phi-module


def filtered_module(ctx: GlobalContext, family: TypedMatrixFamily, a: Sequence,
                    A: Sequence | None = None) -> FilteredModuleData:
    """D_A(alpha): Frobenius P_A(alpha) and the closed-form filtration."""
    alphas = alphas_from_a(ctx, family, a)
    P = evaluate_P(ctx, family, alphas, A)
    frob = [P[position_of(j, family.f)] for j in range(family.f)]
    jumps = [sorted([0, ki]) for ki in family.k]
    return FilteredModuleData(ctx, family, frob, filtration_pairs(ctx, family, alphas), jumps,
                              family.spec.weights.index_sets)


@dataclass
class LineCertificate:
    vectors: list            # per coordinate
    eigenvalue: tuple | None
    t_N: float
    t_H: int

    @property
    def ok(self) -> bool:
        return self.t_H <= self.t_N


@dataclass
class WeakAdmissibility:
    t_N: float
    t_H: int
    status: str              # "lines", "irreducible-at-precision", "scalar"
    lines: list = field(default_factory=list)

    @property
    def verdict(self) -> bool:
        return self.t_N == self.t_H and all(l.ok for l in self.lines)


def _propagate(ctx, frob: list, v0) -> list:
    """v[f-1] ~ P[f-1] v[0], v[j] ~ P[j] v[j+1] (normalised)."""
    f = len(frob)
    vs = [None] * f
    vs[0] = _normalise(ctx, v0)
    nxt = vs[0]
    for j in range(f - 1, 0, -1):
        M = frob[j]
        w = (ctx.add(ctx.mul(M[0][0], nxt[0]), ctx.mul(M[0][1], nxt[1])),
             ctx.add(ctx.mul(M[1][0], nxt[0]), ctx.mul(M[1][1], nxt[1])))
        vs[j] = _normalise(ctx, w)
        nxt = vs[j]
    return vs


def _t_H(ctx, fmd: FilteredModuleData, vs: list, tol: int) -> int:
    total = 0
    for i in range(fmd.f):
        ki = fmd.family.k[i] if not fmd.jumps else max(fmd.jumps[i])
        if ki and _parallel(ctx, vs[i], _normalise(ctx, fmd.fil_pairs[i]), tol):
            total += ki
    return total


def _eigvec(ctx, Q, lam):
    a, b = Q[0]
    c, d = Q[1]
    cands = [(b, ctx.sub(lam, a)), (ctx.sub(lam, d), c)]
    cands = [v for v in cands if not (ctx.is_zero(v[0]) and ctx.is_zero(v[1]))]
    if not cands:
        return None
    return min(cands, key=lambda v: min(ctx.valuation(v[0]), ctx.valuation(v[1])))


def weak_admissibility(fmd: FilteredModuleData, tol: int | None = None) -> WeakAdmissibility:
    """Newton/Hodge comparison on the full module and every phi-stable line."""
    ctx = fmd.ctx
    tol = ctx.N // 2 if tol is None else tol
    frob = fmd.frobenius
    Q = frob[0]
    for M in frob[1:]:
        Q = mat_mul_raw(ctx, Q, M)
    det = det2_raw(ctx, Q)
    t_N = ctx.valuation(det)
    t_H = sum(max(j) for j in fmd.jumps)
    tr = ctx.add(Q[0][0], Q[1][1])
    disc = ctx.sub(ctx.mul(tr, tr), ctx.scale(det, 4))
    half = pow(2, -1, ctx.modulus)
    lines = []
    if ctx.valuation(disc) == INF:
        lam = ctx.scale(tr, half)
        resid = [[ctx.sub(Q[r][c], lam if r == c else ctx.zero) for c in range(2)] for r in range(2)]
        if all(ctx.valuation(x) >= ctx.N - tol for row in resid for x in row):
            # scalar Frobenius: every line is stable; the filtration lines pulled
            # back to coordinate 0 are the only candidates that can raise t_H
            status = "scalar"
            cands = _pulled_back(ctx, frob, fmd.fil_pairs)
            for v0 in cands:
                vs = _propagate(ctx, frob, v0)
                lines.append(LineCertificate(vs, lam, ctx.valuation(lam), _t_H(ctx, fmd, vs, tol)))
        else:
            status = "lines"
            v0 = _eigvec(ctx, Q, lam)
            vs = _propagate(ctx, frob, v0)
            lines.append(LineCertificate(vs, lam, ctx.valuation(lam), _t_H(ctx, fmd, vs, tol)))
    else:
        root = ctx.sqrt(disc)
        if root is None:
            return WeakAdmissibility(t_N, t_H, "irreducible-at-precision")
        status = "lines"
        for sgn in (1, -1):
            lam = ctx.scale(ctx.add(tr, ctx.scale(root, sgn)), half)
            v0 = _eigvec(ctx, Q, lam)
            if v0 is None:
                continue
            vs = _propagate(ctx, frob, v0)
            lines.append(LineCertificate(vs, lam, ctx.valuation(lam), _t_H(ctx, fmd, vs, tol)))
    return WeakAdmissibility(t_N, t_H, status, lines)


def _pulled_back(ctx, frob: list, pairs: list) -> list:
    """Lines at coordinate 0 that propagate onto the filtration line of some embedding."""
    f = len(frob)
    out = []
    for i in range(f):
        M = [[ctx.one, ctx.zero], [ctx.zero, ctx.one]]
        for j in range(i, f) if i else []:
            M = mat_mul_raw(ctx, M, frob[j])
        adj = adj2_raw(ctx, M)
        x, y = pairs[i]
        out.append((ctx.add(ctx.mul(adj[0][0], x), ctx.mul(adj[0][1], y)),
                    ctx.add(ctx.mul(adj[1][0], x), ctx.mul(adj[1][1], y))))
    return out


def negative_control(fmd: FilteredModuleData) -> WeakAdmissibility:
    """A deliberately inadmissible variant of ``fmd``.

    If a phi-stable line exists, the filtration is moved onto it at every
    embedding (so t_H(line) = sum k_i); otherwise the top jump at position 0
    is raised by one, unbalancing t_H against t_N.
    """
    wa = weak_admissibility(fmd)
    if wa.lines:
        line = min(wa.lines, key=lambda l: l.t_N)
        bad = FilteredModuleData(fmd.ctx, fmd.family, fmd.frobenius, list(line.vectors),
                                 fmd.jumps, fmd.index_sets)
    else:
        jumps = [list(j) for j in fmd.jumps]
        jumps[0][-1] += 1
        bad = FilteredModuleData(fmd.ctx, fmd.family, fmd.frobenius, fmd.fil_pairs,
                                 jumps, fmd.index_sets)
    return weak_admissibility(bad)


# ---------------------------------------------------------------------------
# reduction exponents


@dataclass(frozen=True)
class ReductionExponents:
    kind: str
    beta: int
    beta_prime: int
    modulus: int


def reduction_exponents(spec: FamilySpec, p: int) -> ReductionExponents:
    """Inertia exponents of the semisimplified reduction, normalised to [0, modulus)."""
    f = spec.f
    ell = spec.ell
    if spec.case == "induced":
        mod = p ** (2 * f) - 1
        beta = -sum(ell[i] * p ** i for i in range(2 * f)) % mod
        return ReductionExponents("induced", beta, p ** f * beta % mod, mod)
    mod = p ** f - 1
    beta = -sum(ell[i] * p ** i for i in range(f)) % mod
    beta_p = -sum(ell[i + f] * p ** i for i in range(f)) % mod
    return ReductionExponents("split", beta, beta_p, mod)
