"""Compare the compiled series kernels with the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each case checks that both backends return identical coefficients before
timing them.  A full K2 solve is timed under each backend in a subprocess
(the backend is chosen at import time).
"""
import argparse
import os
import random
import subprocess
import sys
import timeit

from wachforge import _kernels_py
from wachforge.padic import make_context
from wachforge.series import _powers

try:
    from wachforge import _ckernels
except ImportError:
    _ckernels = None

CASES = [(3, 2, 16, 14), (3, 2, 48, 40), (5, 4, 32, 30)]   # p, e, N, D

SOLVE = """
import time
from wachforge import BACKEND
from wachforge.family import FamilySpec, build_family
from wachforge.padic import make_context
from wachforge.wach import build_pi, linearized_z, solve_gamma
ctx = make_context(3, f=2, N=16, D=14)
fam = build_family(FamilySpec.make('induced', (0, 3, 5, 0), (5, 3)), 3)
t = time.perf_counter()
z = linearized_z(ctx, fam)
solve_gamma(build_pi(ctx, fam, [ctx.zero] * 2, z))
print(BACKEND, round(time.perf_counter() - t, 3))
"""


def _operands(p, e, N, D, rng):
    ctx = make_context(p, f=e, N=N, D=D)
    mod = ctx.modulus
    a = [rng.randrange(mod) for _ in range(D * e)]
    b = [rng.randrange(mod) for _ in range(D * e)]
    return ctx, a, b


def bench(repeat: int) -> None:
    rng = random.Random(0)
    backends = [("python", _kernels_py)] + ([("cython", _ckernels)] if _ckernels else [])
    print(f"{'kernel':8} {'p':>2} {'e':>2} {'N':>3} {'D':>3}  " +
          "  ".join(f"{name:>10}" for name, _ in backends) + "   speedup")
    for p, e, N, D in CASES:
        ctx, a, b = _operands(p, e, N, D, rng)
        g, mod = ctx.g, ctx.modulus
        powers = _powers(ctx, 2)
        calls = {
            "mul": lambda m: m.series_mul(a, b, D, e, g, mod),
            "compose": lambda m: m.series_compose(a, powers, D, e, mod),
        }
        for name, call in calls.items():
            outs = [call(m) for _, m in backends]
            assert all(o == outs[0] for o in outs), f"backends disagree on {name}"
            times = [min(timeit.repeat(lambda: call(m), number=20, repeat=repeat)) / 20
                     for _, m in backends]
            speed = f"{times[0] / times[-1]:8.1f}x" if len(times) > 1 else "      -"
            print(f"{name:8} {p:2} {e:2} {N:3} {D:3}  " +
                  "  ".join(f"{t * 1e3:8.3f}ms" for t in times) + f"  {speed}")


def bench_solve() -> None:
    for pure in ("1", ""):
        env = dict(os.environ, WACHFORGE_PURE_PYTHON=pure)
        out = subprocess.run([sys.executable, "-c", SOLVE], env=env, capture_output=True,
                             text=True, check=True)
        print("K2 z derivation + solve:", out.stdout.strip(), "s")


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--no-solve", action="store_true")
    args = ap.parse_args()
    bench(args.repeat)
    if not args.no_solve:
        bench_solve()
