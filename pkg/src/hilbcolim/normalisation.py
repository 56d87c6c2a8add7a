"""Normalising chains of bounded maps into chains of contractions.

Each connecting map ``c_n`` is divided by a positive ``r(c_n) >= |c_n|``.
The rescaled chain is isomorphic to the original through the scalar
components ``eta_n = prod_{i<n} 1/r(c_i)``, and a chain morphism ``alpha``
is sent to ``alpha_n * prod_{i<n} r(c_i)/r(d_i)``.

The scalars are kept as base-2 logarithms: long chains would otherwise
underflow, and powers of two stay exact.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .chain import (
    ChainMorphism,
    OmegaChain,
    ScaledComponents,
    TailKind,
    TailRule,
    compose_morphisms,
    identity_morphism,
    validate_morphism,
)
from .linalg import DEFAULT_TOL, OperatorKind, as_operator, operator_norm


class RFunction(str, enum.Enum):
    """``UNIT_AT_ZERO``: 1 on the zero map, ``|b|`` otherwise.
    ``CONTINUOUS_CLAMP``: 1 on contractions, ``|b|`` otherwise.
    """

    UNIT_AT_ZERO = "unit_at_zero"
    CONTINUOUS_CLAMP = "continuous_clamp"


def r_value(r, b, tol=DEFAULT_TOL):
    r = RFunction(r)
    nrm = operator_norm(b)
    if r is RFunction.UNIT_AT_ZERO:
        return 1.0 if nrm == 0.0 else nrm
    return 1.0 if nrm <= 1.0 + tol else nrm


@dataclass(frozen=True, eq=False)
class NormalizedChain:
    """The rescaled chain plus the data for ``log2(eta_n)``.

    ``log2_r_prefix[i] = log2 r(c_i)`` for prefix maps; beyond the prefix
    every map has ``log2 r = log2_r_tail``.
    """

    source: OmegaChain
    chain: OmegaChain
    r: RFunction
    log2_r_prefix: tuple
    log2_r_tail: float

    def log2_r(self, n):
        p = len(self.log2_r_prefix)
        return self.log2_r_prefix[n] if n < p else self.log2_r_tail

    def log2_eta(self, n):
        """``log2(eta_n) = -sum_{i<n} log2 r(c_i)``."""
        p = len(self.log2_r_prefix)
        head = math.fsum(self.log2_r_prefix[: min(n, p)])
        return -(head + max(n - p, 0) * self.log2_r_tail)

    def eta(self, n):
        return float(np.exp2(self.log2_eta(n)))


def _scaled_tail(chain, r, tol):
    """``(log2 r of the tail map, normalised tail rule)``."""
    tail = chain.tail
    if tail.kind is TailKind.SCALAR_GEOMETRIC:
        rv = r_value(r, [[tail.ratio]], tol)
        return math.log2(rv), TailRule.scalar_geometric(tail.ratio / rv)
    if tail.kind is TailKind.REPEAT_LAST:
        return math.log2(r_value(r, chain.prefix_maps[-1], tol)), tail
    # identity and embedding maps have norm 1, so r = 1 under both variants
    return 0.0, tail


def normalize_chain(chain, r, tol=DEFAULT_TOL):
    r = RFunction(r)
    logs = tuple(math.log2(r_value(r, G, tol)) for G in chain.prefix_maps)
    maps = tuple(as_operator(G / np.exp2(lg)) for G, lg in zip(chain.prefix_maps, logs))
    log_tail, tail = _scaled_tail(chain, r, tol)
    normalized = OmegaChain(chain.prefix_dims, maps, tail, OperatorKind.CONTRACTION)
    return NormalizedChain(chain, normalized, r, logs, log_tail)


def normalize_morphism(alpha, r, tol=DEFAULT_TOL, validate_depth=0):
    """``(N_r alpha)_n = alpha_n * prod_{i<n} r(c_i)/r(d_i)`` between normalised chains.

    With ``validate_depth > 0`` the input's naturality squares are checked
    first and a ``ValueError`` is raised if any fails.
    """
    if validate_depth:
        validate_morphism(alpha, validate_depth, DEFAULT_TOL).raise_if_invalid()
    nc = normalize_chain(alpha.source, r, tol)
    nd = normalize_chain(alpha.target, r, tol)
    scaled = ScaledComponents(alpha.components, lambda n: nd.log2_eta(n) - nc.log2_eta(n))
    return ChainMorphism(nc.chain, nd.chain, scaled)


@dataclass
class SquareResiduals:
    residuals: list
    tol: float

    @property
    def worst(self):
        return max(self.residuals, default=0.0)

    @property
    def ok(self):
        return self.worst <= self.tol

    def to_record(self):
        return {"ok": self.ok, "worst_residual": self.worst, "residuals": list(self.residuals)}


def check_eta_naturality(alpha, r, depth, tol=1e-10):
    """Residuals of ``(N_r alpha)_n o eta^C_n == eta^D_n o alpha_n`` for ``n < depth``.

    Each side is scaled by its own exponentials; residuals are relative to
    ``max(1, |alpha_n|)``.
    """
    nc = normalize_chain(alpha.source, r)
    nd = normalize_chain(alpha.target, r)
    na = normalize_morphism(alpha, r)
    out = []
    for n in range(depth):
        A = alpha.at(n)
        left = na.at(n) * nc.eta(n)
        right = nd.eta(n) * A
        out.append(float(np.max(np.abs(left - right))) / max(1.0, float(np.max(np.abs(A)))))
    return SquareResiduals(out, tol)


def check_eta_squares(nc, depth, tol=1e-10):
    """Residuals of ``eta_{n+1} c_n == (c_n / r(c_n)) eta_n`` on the normalisation diagram."""
    out = []
    for n in range(depth):
        c = nc.source.chain_map(n)
        left = nc.eta(n + 1) * c
        right = nc.chain.chain_map(n) * nc.eta(n)
        scale = max(1.0, float(np.max(np.abs(c))) * nc.eta(n + 1))
        out.append(float(np.max(np.abs(left - right))) / scale)
    return SquareResiduals(out, tol)


def check_functor_laws(alpha, beta, r, depth, tol=1e-10):
    """``N_r(id) == id`` on ``alpha.source`` and ``N_r(beta o alpha) == N_r beta o N_r alpha``.

    Returns ``(identity_residuals, composition_residuals)``.
    """
    ident = normalize_morphism(identity_morphism(alpha.source), r)
    id_res = [
        float(np.max(np.abs(ident.at(n) - np.eye(alpha.source.stage_dim(n))))) for n in range(depth)
    ]
    whole = normalize_morphism(compose_morphisms(beta, alpha), r)
    na = normalize_morphism(alpha, r)
    nb = normalize_morphism(beta, r)
    comp_res = []
    for n in range(depth):
        W = whole.at(n)
        P = nb.at(n) @ na.at(n)
        comp_res.append(float(np.max(np.abs(W - P))) / max(1.0, float(np.max(np.abs(W)))))
    return SquareResiduals(id_res, tol), SquareResiduals(comp_res, tol)


def naive_normalisation_witness():
    """Maps ``b``, ``b2`` with ``(b2 b)/|b2 b| != (b2/|b2|)(b/|b|)``.

    Returns ``(b, b2, left, right, gap)`` where ``gap`` is the largest entry
    of ``|left - right|``.
    """
    b = as_operator(np.diag([1.0, 0.5]))
    b2 = as_operator(np.diag([0.5, 1.0]))
    bb = b2 @ b
    left = bb / operator_norm(bb)
    right = (b2 / operator_norm(b2)) @ (b / operator_norm(b))
    return b, b2, left, right, float(np.max(np.abs(left - right)))
