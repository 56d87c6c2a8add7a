"""JSON chain descriptions.

Example::

    {
      "category": "contraction",
      "prefix_dims": [2, 2],
      "prefix_maps": [[[1, 0], [0, 0.5]]],
      "tail": {"kind": "repeat_last"},
      "cocone": {
        "target_dim": 1,
        "category": "contraction",
        "prefix_components": [[[1, 0]]],
        "tail": {"kind": "constant"}
      }
    }

Scalars are either plain numbers or ``[re, im]`` pairs; matrices are
row-major nested lists. Chain tails are ``repeat_last``, ``identity``,
``scalar_geometric`` (with ``ratio``) or ``embed_increment`` (optional
``blocks``). Cocone tails are ``constant``, ``scalar_geometric`` (with
``ratio``) or ``weighted_embedding`` (no ``prefix_components``).
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .chain import (
    ComponentTail,
    OmegaChain,
    PrefixComponents,
    TailKind,
    TailRule,
    WeightedEmbedding,
    validate_chain,
)
from .colimit import Cocone
from .linalg import OperatorKind


class ChainFileError(ValueError):
    pass


def parse_scalar(v):
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(t, (int, float)) for t in v):
        return complex(v[0], v[1])
    raise ChainFileError(f"not a scalar: {v!r}")


def parse_vector(v):
    if not isinstance(v, list) or not v:
        raise ChainFileError(f"not a vector: {v!r}")
    return np.array([parse_scalar(t) for t in v], dtype=np.complex128)


def parse_matrix(m):
    if not isinstance(m, list) or not m or not all(isinstance(row, list) for row in m):
        raise ChainFileError(f"not a matrix: {m!r}")
    rows = [[parse_scalar(t) for t in row] for row in m]
    if len({len(r) for r in rows}) != 1:
        raise ChainFileError("matrix rows have different lengths")
    return np.array(rows, dtype=np.complex128)


def encode_scalar(z):
    z = complex(z)
    return [z.real, z.imag]


def encode_matrix(A):
    return [[encode_scalar(z) for z in row] for row in np.asarray(A)]


def encode_vector(x):
    return [encode_scalar(z) for z in np.asarray(x)]


def _parse_tail(rec):
    if not isinstance(rec, dict) or "kind" not in rec:
        raise ChainFileError("tail must be a record with a 'kind'")
    try:
        kind = TailKind(rec["kind"])
    except ValueError:
        raise ChainFileError(f"unknown tail kind {rec['kind']!r}") from None
    if kind is TailKind.SCALAR_GEOMETRIC:
        if "ratio" not in rec:
            raise ChainFileError("scalar_geometric tail needs a 'ratio'")
        return TailRule.scalar_geometric(parse_scalar(rec["ratio"]))
    if kind is TailKind.EMBED_INCREMENT:
        return TailRule.embed_increment(int(rec.get("blocks", 1)))
    return TailRule(kind)


def _encode_tail(tail):
    rec = {"kind": tail.kind.value}
    if tail.kind is TailKind.SCALAR_GEOMETRIC:
        rec["ratio"] = encode_scalar(tail.ratio)
    if tail.kind is TailKind.EMBED_INCREMENT and tail.blocks != 1:
        rec["blocks"] = tail.blocks
    return rec


def _parse_category(v, default):
    try:
        return OperatorKind(v if v is not None else default)
    except ValueError:
        raise ChainFileError(f"unknown category {v!r}") from None


def _parse_cocone(rec, chain):
    if "target_dim" not in rec:
        raise ChainFileError("cocone needs a 'target_dim'")
    target = int(rec["target_dim"])
    category = _parse_category(rec.get("category"), "bounded")
    tail = rec.get("tail", {"kind": "constant"})
    kind = tail.get("kind")
    if kind == "weighted_embedding":
        comps = WeightedEmbedding(target)
    else:
        try:
            ctail = ComponentTail(kind)
        except ValueError:
            raise ChainFileError(f"unknown cocone tail kind {kind!r}") from None
        prefix = [parse_matrix(m) for m in rec.get("prefix_components", [])]
        if not prefix:
            raise ChainFileError("cocone needs 'prefix_components'")
        ratio = parse_scalar(tail.get("ratio", 1.0))
        comps = PrefixComponents(tuple(prefix), ctail, ratio)
    try:
        return Cocone(chain, target, comps, category)
    except ValueError as exc:
        raise ChainFileError(str(exc)) from None


def chain_from_record(rec, validate=True):
    """Build ``(chain, cocone_or_None)`` from a parsed JSON record."""
    if not isinstance(rec, dict):
        raise ChainFileError("chain file must hold a JSON object")
    for key in ("prefix_dims", "tail"):
        if key not in rec:
            raise ChainFileError(f"missing field {key!r}")
    try:
        chain = OmegaChain(
            tuple(int(d) for d in rec["prefix_dims"]),
            tuple(parse_matrix(m) for m in rec.get("prefix_maps", [])),
            _parse_tail(rec["tail"]),
            _parse_category(rec.get("category"), "contraction"),
        )
    except ChainFileError:
        raise
    except ValueError as exc:
        raise ChainFileError(str(exc)) from None
    if validate:
        report = validate_chain(chain)
        if not report.ok:
            raise ChainFileError("; ".join(report.problems))
    cocone = _parse_cocone(rec["cocone"], chain) if rec.get("cocone") else None
    return chain, cocone


def chain_to_record(chain, cocone=None):
    rec = {
        "category": chain.category.value,
        "prefix_dims": list(chain.prefix_dims),
        "prefix_maps": [encode_matrix(G) for G in chain.prefix_maps],
        "tail": _encode_tail(chain.tail),
    }
    if cocone is not None:
        comps = cocone.components
        crec = {"target_dim": cocone.target_dim, "category": cocone.category.value}
        if isinstance(comps, WeightedEmbedding):
            crec["tail"] = {"kind": "weighted_embedding"}
        elif isinstance(comps, PrefixComponents):
            crec["prefix_components"] = [encode_matrix(A) for A in comps.prefix]
            crec["tail"] = {"kind": comps.tail.value}
            if comps.tail is ComponentTail.SCALAR_GEOMETRIC:
                crec["tail"]["ratio"] = encode_scalar(comps.ratio)
        else:
            raise TypeError(f"cannot serialise components of type {type(comps).__name__}")
        rec["cocone"] = crec
    return rec


def load_chain_file(path, validate=True):
    try:
        rec = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ChainFileError(f"{path}: invalid JSON: {exc}") from None
    return chain_from_record(rec, validate)


def dumps(rec):
    """Stable JSON text: sorted keys, fixed indentation."""
    return json.dumps(rec, indent=2, sort_keys=True, allow_nan=False) + "\n"
