import pytest

ACCEPTANCE = {}


@pytest.fixture
def record():
    """Store one acceptance line; printed again in the terminal summary."""
    def _record(cid: str, ok: bool, detail: str = ""):
        line = f"{cid} {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE[cid] = line
        print(line)
        return ok
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(ACCEPTANCE, key=lambda c: int(c[1:])):
        terminalreporter.write_line(ACCEPTANCE[cid])


import random
from dataclasses import dataclass

from wachforge.family import FamilySpec, build_family, sample_a
from wachforge.padic import make_context
from wachforge.wach import search_z

CONFIGS = {
    "K1": dict(p=3, f=1, N=16, D=12, spec=("induced", (0, 5), (5,), 1)),
    "K2": dict(p=3, f=2, N=16, D=14, spec=("induced", (0, 3, 5, 0), (5, 3), 1)),
    "K3": dict(p=3, f=2, N=14, D=10, spec=("split", (3, 0, 0, 3), (3, 3), 2)),
}


@dataclass
class Setup:
    name: str
    ctx: object
    spec: object
    family: object
    z: list
    z_source: str
    samples_a: list


_CACHE = {}


def setup_for(name: str, seed: int = 2024) -> Setup:
    """Context, family, per-family z and five seeded a-samples (cached per session)."""
    if name not in _CACHE:
        c = CONFIGS[name]
        case, ell, k, twist = c["spec"]
        ctx = make_context(c["p"], f=c["f"], N=c["N"], D=c["D"])
        spec = FamilySpec.make(case, ell, k, twist_c=twist)
        fam = build_family(spec, ctx.p)
        rng = random.Random(seed)
        sa = [sample_a(ctx, fam, rng) for _ in range(5)]
        zc = search_z(ctx, fam, sa)
        _CACHE[name] = Setup(name, ctx, spec, fam, zc.z, zc.source, sa)
    return _CACHE[name]


@pytest.fixture(scope="session")
def k_setup():
    return setup_for
