"""JSON report encoding.

Coefficient encoding (schema ``wach-forge-report/1``):

* An integer ``c`` known modulo ``p^n`` is the string of its ``n`` base-p
  digits, least significant first, using the characters ``0-9a-z``.
* An element of O_E = Z_p[x]/(g) is the list of its coefficient strings
  on the basis ``1, x, ..., x^(e-1)``.
* A series is the list of its elements for degrees ``0 .. D-1``.
* A 2x2 matrix is ``[[m00, m01], [m10, m11]]``; a tau-matrix is the list of
  its ``f`` coordinate matrices.

Residues modulo p use one digit per coefficient.
"""
from __future__ import annotations

import hashlib
import json
import math
import os

SCHEMA = "wach-forge-report/1"
DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"


def encode_int(c: int, p: int, n: int) -> str:
    c %= p ** n
    out = []
    for _ in range(n):
        c, r = divmod(c, p)
        out.append(DIGITS[r])
    return "".join(out)


def decode_int(s: str, p: int) -> int:
    return sum(DIGITS.index(ch) * p ** i for i, ch in enumerate(s))


def encode_elem(x, p: int, n: int) -> list:
    return [encode_int(c, p, n) for c in x]


def encode_raw_matrix(M, p: int, n: int) -> list:
    return [[encode_elem(x, p, n) for x in row] for row in M]


def encode_series(s, n: int | None = None) -> list:
    ctx = s.ctx
    n = ctx.N if n is None else n
    return [encode_elem(x, ctx.p, n) for x in s.coeffs()]


def encode_tau(T, n: int | None = None) -> list:
    return [[[encode_series(x, n) for x in row] for row in blk] for blk in T.coords]


def clean(obj):
    """Make ``obj`` JSON-safe: tuples to lists, infinities to the string ``"inf"``."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf"
        if obj.is_integer():
            return int(obj)
        return obj
    if isinstance(obj, (set, frozenset)):
        return sorted(clean(v) for v in obj)
    return obj


def dumps(doc: dict) -> str:
    return json.dumps(clean(doc), sort_keys=True, indent=2) + "\n"


def document(command: str, config: dict | None, body: dict) -> dict:
    doc = {"schema": SCHEMA, "command": command, "config": config}
    doc.update(body)
    return doc


def write_text(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def sha256_file(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


class IntegrityError(RuntimeError):
    pass


def check_integrity(path: str) -> None:
    """Compare ``path`` with the hash recorded next to it in ``path + '.sha256'``."""
    rec = path + ".sha256"
    if not os.path.exists(rec):
        raise IntegrityError(f"{os.path.basename(path)}: no recorded hash")
    with open(rec) as fh:
        want = fh.read().split()[0]
    if sha256_file(path) != want:
        raise IntegrityError(f"{os.path.basename(path)}: content does not match recorded hash")


def write_with_hash(path: str, text: str) -> None:
    write_text(path, text)
    write_text(path + ".sha256", f"{sha256_file(path)}  {os.path.basename(path)}\n")


def summary_lines(doc: dict) -> list:
    """Flat human-readable lines from the ``checks`` section of a report."""
    lines = [f"{doc['command']}: {'PASS' if doc.get('verdict') else 'FAIL'}"]
    for name, ok, detail in doc.get("checks", []):
        lines.append(f"  [{'ok' if ok else 'FAIL'}] {name}: {detail}")
    return lines
