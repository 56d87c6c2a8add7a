"""The two bounded cocones whose induced maps fail to be bounded.

``scaling_chain`` has stages C with connecting maps ``1/2``; its colimit is
zero, yet ``b_n = 2**n`` is a nonzero cocone. ``embedding_chain`` has
stages C^1, C^2, ... (0-based stage ``n`` is C^(n+1)) joined by
first-coordinate embeddings; the cocone that scales the ``k``-th coordinate
by ``k`` (1-based ``k``) is valid, but its restriction to C^N has norm N.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain import ComponentTail, OmegaChain, PrefixComponents, TailRule, WeightedEmbedding, validate_chain
from .colimit import (
    DEFAULT_PARAMS,
    Cocone,
    colim_norm,
    dichotomy_report,
    global_bound,
    inclusion,
    induced_apply,
    restriction_norm,
    validate_cocone,
)
from .linalg import OperatorKind


def scaling_chain():
    return OmegaChain((1,), (), TailRule.scalar_geometric(0.5), OperatorKind.CONTRACTION)


def scaling_cocone():
    """``b_n = [2**n]`` into C."""
    return Cocone(
        scaling_chain(),
        1,
        PrefixComponents(([[1.0]],), ComponentTail.SCALAR_GEOMETRIC, 2.0),
        OperatorKind.BOUNDED,
    )


def embedding_chain():
    return OmegaChain((1,), (), TailRule.embed_increment(), OperatorKind.ISOMETRY)


def embedding_cocone(depth):
    """Weighted embeddings into C^depth, standing in for the infinite target."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    return Cocone(embedding_chain(), depth, WeightedEmbedding(depth), OperatorKind.BOUNDED)


@dataclass
class CounterexampleReport:
    which: str
    depth: int
    checks: list

    @property
    def ok(self):
        return all(c["pass"] for c in self.checks)

    def to_record(self):
        return {"which": self.which, "depth": self.depth, "ok": self.ok, "checks": self.checks}


def _check(name, value, passed, **extra):
    rec = {"name": name, "value": value, "pass": bool(passed)}
    rec.update(extra)
    return rec


def demonstrate_scaling(depth, params=DEFAULT_PARAMS):
    chain = scaling_chain()
    cocone = scaling_cocone()
    checks = []
    chain_ok = validate_chain(chain).ok
    checks.append(_check("chain_is_contraction", chain_ok, chain_ok))
    est = colim_norm(chain, inclusion(chain, 0, [1.0]), params)
    checks.append(
        _check(
            "colimit_is_zero",
            est.value,
            est.value == 0.0 and est.status.value == "exact_stabilized",
            **{"error": est.error, "status": est.status.value},
        )
    )
    rep = validate_cocone(cocone, depth)
    checks.append(_check("cocone_condition", rep.worst_residual, rep.ok))
    bound, growth = global_bound(cocone, depth)
    expected = 2.0 ** (depth - 1)
    checks.append(
        _check("global_bound", bound, bound == expected, expected=expected, growing=growth.growing)
    )
    out = induced_apply(cocone, inclusion(chain, 0, [1.0]), validate_depth=depth)
    checks.append(
        _check(
            "nonzero_image_of_zero_class",
            [float(out[0].real), float(out[0].imag)],
            abs(out[0]) > 0 and est.value == 0.0,
        )
    )
    if depth > 1:
        checks.append(_check("growth_flag", growth.growing, growth.growing))
    return CounterexampleReport("scaling", depth, checks)


def demonstrate_embedding(depth, params=DEFAULT_PARAMS):
    chain = embedding_chain()
    cocone = embedding_cocone(depth)
    checks = []
    chain_ok = validate_chain(chain).ok
    checks.append(_check("chain_is_isometry", chain_ok, chain_ok))
    rep = validate_cocone(cocone, depth)
    checks.append(_check("cocone_condition", rep.worst_residual, rep.ok))
    norms = [restriction_norm(cocone, n, params) for n in range(depth)]
    expected = np.arange(1, depth + 1, dtype=float)
    worst = float(np.max(np.abs(np.array(norms) - expected)))
    increasing = all(b > a for a, b in zip(norms, norms[1:]))
    checks.append(
        _check("restriction_norms", [float(v) for v in norms], worst <= 1e-9 and increasing, worst_residual=worst)
    )
    bound, growth = global_bound(cocone, depth)
    checks.append(_check("global_bound", bound, abs(bound - depth) <= 1e-9, growing=growth.growing))
    x = np.zeros(depth, dtype=complex)
    x[-1] = 1.0
    kernel_ok = colim_norm(chain, inclusion(chain, depth - 1, x), params).value > 0
    checks.append(_check("trivial_kernel", kernel_ok, kernel_ok))
    if depth > 1:
        checks.append(_check("growth_flag", growth.growing, growth.growing))
    return CounterexampleReport("embedding", depth, checks)


def counterexample(which, depth, params=DEFAULT_PARAMS):
    if which == "scaling":
        return demonstrate_scaling(depth, params)
    if which == "embedding":
        return demonstrate_embedding(depth, params)
    raise ValueError(f"unknown counterexample {which!r}; expected 'scaling' or 'embedding'")


def dichotomy(chain, cocone, depth, params=DEFAULT_PARAMS):
    """Thin alias of ``colimit.dichotomy_report`` taking the chain explicitly."""
    if cocone.chain is not chain and not cocone.chain.equals(chain):
        raise ValueError("cocone is over a different chain")
    return dichotomy_report(cocone, depth, params)
