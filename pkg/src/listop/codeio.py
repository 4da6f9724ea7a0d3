"""Plain-text code files and the clustered-code sidecar.

Format: a header line ``q=<q> n=<n> N=<N>`` followed by ``N`` lines, one
codeword per line, ``n`` base-10 symbols separated by single spaces.
"""
from __future__ import annotations

import json
import re
from fractions import Fraction
from pathlib import Path

import numpy as np

from .codes import CodeMatrix, symbol_dtype
from .constructions import ClusterCode
from .errors import CodeFormatError

HEADER = re.compile(r"q=(\d+) n=(\d+) N=(\d+)")


def dumps_code(C: CodeMatrix) -> str:
    lines = [f"q={C.q} n={C.n} N={C.N}"]
    lines += [" ".join(str(int(s)) for s in C.entries[:, j]) for j in range(C.N)]
    return "\n".join(lines) + "\n"


def loads_code(text: str) -> CodeMatrix:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise CodeFormatError("empty file", line=1)
    m = HEADER.fullmatch(lines[0])
    if not m:
        raise CodeFormatError(f"malformed header {lines[0]!r}; expected 'q=<q> n=<n> N=<N>'", line=1)
    q, n, N = (int(g) for g in m.groups())
    if q < 2:
        raise CodeFormatError(f"alphabet size must be >= 2, got {q}", line=1)
    if n < 1 or N < 1:
        raise CodeFormatError(f"need n >= 1 and N >= 1, got n={n}, N={N}", line=1)
    if len(lines) - 1 < N:
        raise CodeFormatError(f"header declares N={N} codewords, file ends after {len(lines) - 1}",
                              line=len(lines) + 1)
    if len(lines) - 1 > N:
        raise CodeFormatError(f"unexpected line after the {N} declared codewords", line=N + 2)
    rows = []
    for i, raw in enumerate(lines[1:], start=2):
        parts = raw.split(" ")
        if len(parts) != n or not all(p.isdigit() for p in parts):
            raise CodeFormatError(f"expected {n} space-separated symbols", line=i)
        vals = [int(p) for p in parts]
        if any(v >= q for v in vals):
            raise CodeFormatError(f"symbol out of range for q={q}", line=i)
        rows.append(vals)
    return CodeMatrix(q, np.array(rows, dtype=symbol_dtype(q)).T)


def save_code(C: CodeMatrix, path) -> None:
    Path(path).write_text(dumps_code(C), encoding="utf-8", newline="\n")


def load_code(path) -> CodeMatrix:
    return loads_code(Path(path).read_text(encoding="utf-8"))


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    return v


def save_cluster_code(cc: ClusterCode, path) -> None:
    """Write ``path`` (the clustered code), ``path.centers`` and ``path.json``."""
    path = Path(path)
    centers = path.with_name(path.name + ".centers")
    save_code(cc.C0, path)
    save_code(cc.centers, centers)
    side = {"params": {k: _jsonable(v) for k, v in cc.params.items()},
            "centers-file": centers.name,
            "cluster_of": [int(c) for c in cc.cluster_of]}
    path.with_name(path.name + ".json").write_text(json.dumps(side, sort_keys=True, indent=1) + "\n",
                                                   encoding="utf-8")


def load_cluster_code(path) -> ClusterCode:
    path = Path(path)
    side = json.loads(path.with_name(path.name + ".json").read_text(encoding="utf-8"))
    params = dict(side["params"])
    for key in ("rho", "beta", "r"):
        if key in params:
            params[key] = Fraction(params[key])
    return ClusterCode(load_code(path), load_code(path.with_name(side["centers-file"])),
                       np.array(side["cluster_of"], dtype=np.int64), params)
