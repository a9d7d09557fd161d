"""Run configuration: JSON loading, validation with field paths, content hash."""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field

from .family import FamilySpec, SpecError
from .padic import GlobalContext, is_prime, make_context

FIELDS = ("p", "f", "ext_degree", "N", "D", "seed", "weights", "case", "ell", "c_units",
          "twist_c", "samples_a", "samples_A", "z_search_budget", "regimes")
REQUIRED = ("p", "weights", "case", "ell")


@dataclass
class RunConfig:
    p: int
    weights: list
    case: str
    ell: list
    f: int | None = None
    ext_degree: int | None = None
    N: int = 16
    D: int = 12
    seed: int = 0
    c_units: list | None = None
    twist_c: int = 1
    samples_a: int = 5
    samples_A: int = 3
    z_search_budget: int = 200
    regimes: list = field(default_factory=lambda: [0, 1])

    def __post_init__(self):
        if self.f is None:
            self.f = len(self.weights)
        if self.ext_degree is None:
            self.ext_degree = self.f
        if self.c_units is None:
            self.c_units = [1] * self.f

    def canonical(self) -> dict:
        return asdict(self)

    def digest(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def context(self) -> GlobalContext:
        return make_context(self.p, f=self.f, ext_degree=self.ext_degree, N=self.N, D=self.D,
                            seed=self.seed)

    def spec(self) -> FamilySpec:
        return FamilySpec.make(self.case, self.ell, self.weights, self.c_units, self.twist_c)


def _int(d: dict, key: str, lo: int | None = None):
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise SpecError(f"expected an integer, got {v!r}", key)
    if lo is not None and v < lo:
        raise SpecError(f"must be at least {lo}", key)
    return v


def _int_list(d: dict, key: str, lo: int | None = None):
    v = d[key]
    if not isinstance(v, list) or not v:
        raise SpecError("expected a nonempty list of integers", key)
    for i, x in enumerate(v):
        if isinstance(x, bool) or not isinstance(x, int):
            raise SpecError(f"expected an integer, got {x!r}", f"{key}[{i}]")
        if lo is not None and x < lo:
            raise SpecError(f"must be at least {lo}", f"{key}[{i}]")
    return v


def parse_config(data) -> RunConfig:
    """Validate a decoded JSON object and build a :class:`RunConfig`."""
    if not isinstance(data, dict):
        raise SpecError("config must be a JSON object", "$")
    unknown = sorted(set(data) - set(FIELDS))
    if unknown:
        raise SpecError(f"unknown field {unknown[0]!r}", unknown[0])
    for key in REQUIRED:
        if key not in data:
            raise SpecError("missing required field", key)
    kw = {}
    kw["p"] = _int(data, "p", 3)
    if not is_prime(kw["p"]):
        raise SpecError(f"{kw['p']} is not an odd prime", "p")
    if kw["p"] > 36:
        raise SpecError("digit encoding supports p <= 36", "p")
    kw["weights"] = _int_list(data, "weights", 0)
    if not isinstance(data["case"], str):
        raise SpecError("expected a string", "case")
    kw["case"] = data["case"]
    kw["ell"] = _int_list(data, "ell", 0)
    for key, lo in (("f", 1), ("ext_degree", 1), ("N", 1), ("D", 1), ("seed", 0),
                    ("twist_c", 1), ("samples_a", 0), ("samples_A", 0),
                    ("z_search_budget", 0)):
        if key in data and data[key] is not None:
            kw[key] = _int(data, key, lo)
    if "c_units" in data and data["c_units"] is not None:
        kw["c_units"] = _int_list(data, "c_units", 1)
    if "regimes" in data:
        regs = _int_list(data, "regimes", 0)
        for i, c in enumerate(regs):
            if c not in (0, 1):
                raise SpecError("regime must be 0 or 1", f"regimes[{i}]")
        kw["regimes"] = sorted(set(regs))
    cfg = RunConfig(**kw)
    validate(cfg)
    return cfg


def validate(cfg: RunConfig) -> None:
    if cfg.f != len(cfg.weights):
        raise SpecError(f"f={cfg.f} but {len(cfg.weights)} weights given", "f")
    if cfg.ext_degree % cfg.f:
        raise SpecError("must be a multiple of f", "ext_degree")
    spec = cfg.spec()
    spec.validate(cfg.p)
    k = spec.weights.k_max
    if cfg.D < k:
        raise SpecError(f"truncation must reach the largest weight {k}", "D")


def load_config(path: str) -> RunConfig:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON: {exc.msg} (line {exc.lineno})", "$") from exc
    except OSError as exc:
        raise SpecError(f"cannot read config: {exc.strerror}", "$") from exc
    return parse_config(data)
