"""JSON file formats and deterministic report serialization.

Graph file::

    {"index_base": 0, "n": 3, "edges": [[0, 1, 1.0], [1, 2]]}

Covariance file: ``{"iid": {"variance": 1.0}}`` or ``{"matrix": [[...], ...]}``.
Load profile file: ``{"mu": [...]}``. Penalty file:
``{"P_diag": [...], "q": [...], "xi": 1.0}`` (``q`` and ``xi`` optional).
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .control import PenaltyModel
from .errors import GridLossError
from .graph import WeightedGraph
from .stochastic import CovarianceModel, LoadProfile, iid_covariance, validate_covariance


class FileFormatError(GridLossError):
    """Unreadable file or a document that does not match its schema."""


def _load(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise FileFormatError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise FileFormatError(f"{path}: top-level JSON value must be an object")
    return doc


def parse_graph(doc: dict) -> tuple[WeightedGraph, int]:
    """Return the graph (0-based) and the file's declared index base."""
    base = doc.get("index_base", 0)
    if base not in (0, 1):
        raise FileFormatError(f"index_base must be 0 or 1, got {base!r}")
    try:
        n = int(doc["n"])
        raw = doc["edges"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FileFormatError(f"graph file needs 'n' and 'edges': {exc}") from exc
    edges = []
    for e in raw:
        if not isinstance(e, (list, tuple)) or len(e) not in (2, 3):
            raise FileFormatError(f"edge entry must be [u, v] or [u, v, w], got {e!r}")
        if not all(isinstance(x, int) and not isinstance(x, bool) for x in e[:2]):
            raise FileFormatError(f"edge endpoints must be integers, got {e!r}")
        w = float(e[2]) if len(e) == 3 else 1.0
        edges.append((e[0] - base, e[1] - base, w))
    return WeightedGraph.from_edges(n, edges), base


def load_graph(path) -> tuple[WeightedGraph, int]:
    return parse_graph(_load(path))


def parse_covariance(doc: dict, n: int) -> CovarianceModel:
    if "iid" in doc:
        try:
            var = float(doc["iid"]["variance"])
        except (KeyError, TypeError, ValueError) as exc:
            raise FileFormatError(f"iid covariance needs a numeric 'variance': {exc}") from exc
        return iid_covariance(n, var)
    if "matrix" in doc:
        try:
            M = np.array(doc["matrix"], dtype=float)
        except (TypeError, ValueError) as exc:
            raise FileFormatError(f"covariance matrix is not numeric: {exc}") from exc
        return validate_covariance(M, n)
    raise FileFormatError("covariance file needs an 'iid' or 'matrix' key")


def load_covariance(path, n: int) -> CovarianceModel:
    return parse_covariance(_load(path), n)


def load_profile(path, n: int) -> LoadProfile:
    doc = _load(path)
    try:
        mu = np.array(doc["mu"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise FileFormatError(f"load profile needs a numeric 'mu' list: {exc}") from exc
    if mu.shape != (n,):
        raise FileFormatError(f"'mu' has length {mu.size}, graph has {n} nodes")
    return LoadProfile(mu)


def load_penalty(path, n: int, xi: float | None = None) -> PenaltyModel:
    doc = _load(path)
    try:
        P = np.array(doc["P_diag"], dtype=float)
        q = np.array(doc.get("q", np.zeros(n)), dtype=float)
        xi_val = float(doc.get("xi", 1.0)) if xi is None else float(xi)
    except (KeyError, TypeError, ValueError) as exc:
        raise FileFormatError(f"penalty file needs a numeric 'P_diag' list: {exc}") from exc
    if P.shape != (n,) or q.shape != (n,):
        raise FileFormatError(f"penalty vectors must have length {n}")
    return PenaltyModel(P, q, xi_val)


# --- output ---------------------------------------------------------------

def format_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        raise ValueError(f"cannot serialize non-finite value {x}")
    s = format(x, ".17g")
    if "e" not in s and "." not in s:
        s += ".0"
    return s


def dumps(obj, indent: int = 2) -> str:
    """JSON text with insertion-ordered keys and 17-significant-digit floats.

    Identical inputs give byte-identical output.
    """

    def enc(o, level):
        pad = " " * (indent * (level + 1))
        end = " " * (indent * level)
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [f"{pad}{json.dumps(str(k))}: {enc(v, level + 1)}" for k, v in o.items()]
            return "{\n" + ",\n".join(items) + "\n" + end + "}"
        if isinstance(o, (list, tuple)):
            if not o:
                return "[]"
            if all(not isinstance(v, (dict, list, tuple)) for v in o):
                return "[" + ", ".join(enc(v, level + 1) for v in o) + "]"
            return "[\n" + ",\n".join(pad + enc(v, level + 1) for v in o) + "\n" + end + "]"
        if isinstance(o, np.ndarray):
            return enc(o.tolist(), level)
        if o is None or isinstance(o, bool):
            return json.dumps(o)
        if isinstance(o, (int, np.integer)):
            return str(int(o))
        if isinstance(o, (float, np.floating)):
            return format_float(float(o))
        if isinstance(o, (str, Path)):
            return json.dumps(str(o))
        raise TypeError(f"cannot serialize {type(o).__name__}")

    return enc(obj, 0) + "\n"


def csv_text(header: list[str], rows: list[list]) -> str:
    def cell(v):
        if v is None:
            return ""
        if isinstance(v, (float, np.floating)):
            return format_float(float(v))
        return str(v)

    lines = [",".join(header)] + [",".join(cell(v) for v in r) for r in rows]
    return "\n".join(lines) + "\n"
