"""JSON problem and certificate files.

Integers are JSON integers; rationals are strings "a/b".  Output is emitted
with sorted keys and fixed separators so identical values give identical bytes.
"""
from __future__ import annotations

import hashlib
import json
from fractions import Fraction

import numpy as np

from .errors import ParhodgeError
from .ffield import Embedding, FieldCtx, FieldElement
from .rootdata import TameWeight
from .series import LaurentSeries, MatSeries


class ParseError(ParhodgeError):
    """Malformed input file."""


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1, separators=(",", ": "), ensure_ascii=True) + "\n"


def digest(obj) -> str:
    canon = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


# -- fields


def field_to_json(ctx: FieldCtx) -> dict:
    return {"p": ctx.p, "m": ctx.m, "modulus": list(ctx.modulus)}


def field_from_json(obj) -> FieldCtx:
    try:
        p, m = int(obj["p"]), int(obj.get("m", 1))
        modulus = obj.get("modulus")
        return FieldCtx(p, m, None if modulus is None else [int(c) for c in modulus])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad field block: {exc}") from exc


def element_to_json(x: FieldElement) -> list[int]:
    return [int(c) for c in x.coords]


def embedding_to_json(emb: Embedding) -> dict:
    return {"source": field_to_json(emb.src), "target": field_to_json(emb.dst), "matrix": emb.matrix.tolist()}


def embedding_from_json(obj) -> Embedding:
    return Embedding(field_from_json(obj["source"]), field_from_json(obj["target"]), np.array(obj["matrix"]))


# -- series


def _trim(coeffs: np.ndarray) -> tuple[int, list]:
    """Drop trailing zero coefficients; the precision is stored separately."""
    nz = np.nonzero(coeffs.reshape(coeffs.shape[0], -1).any(axis=1))[0] if coeffs.shape[0] else []
    if len(nz) == 0:
        return 0, []
    lo, hi = int(nz[0]), int(nz[-1]) + 1
    return lo, coeffs[lo:hi].tolist()


def laurent_to_json(f: LaurentSeries) -> dict:
    lo, body = _trim(f.coeffs)
    return {"val": f.val + lo, "coeffs": body}


def matseries_to_json(M: MatSeries) -> dict:
    rows = []
    for i in range(M.n):
        row = []
        for j in range(M.n):
            lo, body = _trim(np.asarray(M.coeffs[:, i, j]))
            row.append({"val": (M.val + lo) if body else 0, "coeffs": body})
        rows.append(row)
    return {"n": M.n, "precision": M.prec, "entries": rows}


def matseries_from_json(obj, ctx: FieldCtx, precision: int | None = None) -> MatSeries:
    try:
        rows = obj["entries"] if isinstance(obj, dict) else obj
        N = int(precision if precision is not None else obj["precision"])
        n = len(rows)
        terms: dict[int, np.ndarray] = {}
        for i, row in enumerate(rows):
            if len(row) != n:
                raise ParseError("matrix must be square")
            for j, ent in enumerate(row):
                v = int(ent.get("val", 0))
                for t, c in enumerate(ent.get("coeffs", [])):
                    c = [int(x) for x in (c if isinstance(c, list) else [c])]
                    if len(c) != ctx.m or any(x < 0 or x >= ctx.p for x in c):
                        raise ParseError(f"coefficient {c} is not a valid element of F_{ctx.p}^{ctx.m}")
                    e = v + t
                    mat = terms.setdefault(e, np.zeros((n, n, ctx.m), dtype=np.int64))
                    mat[i, j] = c
    except ParseError:
        raise
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise ParseError(f"bad matrix block: {exc}") from exc
    return MatSeries.from_terms(ctx, n, terms, N)


def constant_to_json(arr: np.ndarray) -> list:
    return np.asarray(arr).tolist()


def weight_to_json(w: TameWeight) -> list[str]:
    return [str(x) for x in w.entries]


def weight_from_json(vals, p: int) -> TameWeight:
    try:
        return TameWeight(tuple(Fraction(str(v)) for v in vals), p)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad weight: {exc}") from exc


# -- problem files


class Problem:
    def __init__(self, raw: dict, precision: int | None = None):
        if not isinstance(raw, dict):
            raise ParseError("problem file must be a JSON object")
        self.raw = raw
        self.ctx = field_from_json(raw.get("field", {}))
        self.kind = raw.get("kind", "connection")
        if self.kind not in ("connection", "higgs", "gauge"):
            raise ParseError(f"unknown object kind {self.kind!r}")
        N = precision if precision is not None else raw.get("precision")
        if N is None:
            raise ParseError("precision missing")
        self.N = int(N)
        self.matrix = matseries_from_json(raw.get("matrix"), self.ctx, self.N)
        if "n" in raw and int(raw["n"]) != self.matrix.n:
            raise ParseError("rank n does not match the matrix")
        self.n = self.matrix.n
        self.theta = weight_from_json(raw["theta"], self.ctx.p) if raw.get("theta") is not None else None
        if self.theta is not None and self.theta.n != self.n:
            raise ParseError("theta has the wrong length")
        self.tau = [int(t) % self.ctx.p for t in raw["tau"]] if raw.get("tau") is not None else None

    @classmethod
    def load(cls, path: str, precision: int | None = None) -> "Problem":
        try:
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot read {path}: {exc}") from exc
        try:
            return cls(raw, precision)
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad problem file: {exc}") from exc


def problem_json(ctx: FieldCtx, M: MatSeries, kind: str = "connection", theta=None, tau=None, **extra) -> dict:
    out = {
        "field": field_to_json(ctx),
        "n": M.n,
        "precision": M.prec,
        "kind": kind,
        "matrix": matseries_to_json(M)["entries"],
    }
    if theta is not None:
        out["theta"] = weight_to_json(theta)
    if tau is not None:
        out["tau"] = [int(t) for t in tau]
    out.update(extra)
    return out
