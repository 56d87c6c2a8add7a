"""Finitely presented omega-chains of Hilbert spaces and chain morphisms.

A chain is stored as an explicit prefix of connecting maps followed by a
tail rule that generates every later map. Stages are indexed from 0: the
map ``chain_map(n)`` goes from stage ``n`` to stage ``n + 1``. A chain
whose stages are C^1, C^2, C^3, ... (first-coordinate embeddings) therefore
has ``stage_dim(n) == n + 1``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    OperatorKind,
    as_operator,
    classify,
    identity,
    operator_norm,
    within_category,
)


class TailKind(str, enum.Enum):
    REPEAT_LAST = "repeat_last"
    IDENTITY = "identity"
    SCALAR_GEOMETRIC = "scalar_geometric"
    EMBED_INCREMENT = "embed_increment"


@dataclass(frozen=True)
class TailRule:
    """How connecting maps continue past the explicit prefix.

    ``ratio`` is used by ``scalar_geometric``; ``blocks`` by
    ``embed_increment``, whose maps are ``I_blocks (x) E`` with ``E`` the
    first-coordinates embedding C^k -> C^(k+1).
    """

    kind: TailKind
    ratio: complex = 1.0
    blocks: int = 1

    def __post_init__(self):
        object.__setattr__(self, "kind", TailKind(self.kind))
        object.__setattr__(self, "ratio", complex(self.ratio))
        if not np.isfinite(self.ratio):
            raise ValueError("tail ratio must be finite")
        if self.blocks < 1:
            raise ValueError("blocks must be positive")

    @classmethod
    def repeat_last(cls):
        return cls(TailKind.REPEAT_LAST)

    @classmethod
    def identity(cls):
        return cls(TailKind.IDENTITY)

    @classmethod
    def scalar_geometric(cls, ratio):
        return cls(TailKind.SCALAR_GEOMETRIC, ratio=ratio)

    @classmethod
    def embed_increment(cls, blocks=1):
        return cls(TailKind.EMBED_INCREMENT, blocks=blocks)


def _embedding(in_dim, out_dim, blocks=1):
    k_in, k_out = in_dim // blocks, out_dim // blocks
    E = np.zeros((k_out, k_in), dtype=np.complex128)
    E[:k_in, :k_in] = np.eye(k_in)
    return np.kron(np.eye(blocks), E) if blocks > 1 else E


@dataclass(frozen=True, eq=False)
class OmegaChain:
    prefix_dims: tuple
    prefix_maps: tuple
    tail: TailRule
    category: OperatorKind = OperatorKind.CONTRACTION

    def __post_init__(self):
        dims = tuple(int(d) for d in self.prefix_dims)
        if not dims or any(d < 1 for d in dims):
            raise ValueError("prefix_dims must be a non-empty list of positive integers")
        if len(dims) != len(self.prefix_maps) + 1:
            raise ValueError(
                f"need len(prefix_dims) == len(prefix_maps) + 1, got {len(dims)} and {len(self.prefix_maps)}"
            )
        maps = tuple(
            as_operator(m, (dims[n + 1], dims[n])) for n, m in enumerate(self.prefix_maps)
        )
        object.__setattr__(self, "prefix_dims", dims)
        object.__setattr__(self, "prefix_maps", maps)
        object.__setattr__(self, "category", OperatorKind(self.category))
        kind, last = self.tail.kind, dims[-1]
        if kind is TailKind.REPEAT_LAST:
            if not maps:
                raise ValueError("repeat_last needs at least one prefix map")
            if maps[-1].shape[0] != maps[-1].shape[1]:
                raise ValueError("repeat_last needs a square last prefix map")
        elif kind is TailKind.SCALAR_GEOMETRIC and last != 1:
            raise ValueError("scalar_geometric needs 1-dimensional tail stages")
        elif kind is TailKind.EMBED_INCREMENT and last % self.tail.blocks:
            raise ValueError("embed_increment stage dimension must be a multiple of blocks")

    @property
    def prefix_len(self):
        """Index of the first stage whose outgoing map comes from the tail rule."""
        return len(self.prefix_maps)

    def stage_dim(self, n):
        if n < 0:
            raise ValueError("stage index must be non-negative")
        p = self.prefix_len
        if n <= p:
            return self.prefix_dims[n]
        if self.tail.kind is TailKind.EMBED_INCREMENT:
            return self.prefix_dims[p] + self.tail.blocks * (n - p)
        return self.prefix_dims[p]

    def tail_operator(self):
        """The repeated tail map for square tails, ``None`` for embeddings."""
        kind = self.tail.kind
        if kind is TailKind.REPEAT_LAST:
            return self.prefix_maps[-1]
        if kind is TailKind.IDENTITY:
            return identity(self.prefix_dims[-1])
        if kind is TailKind.SCALAR_GEOMETRIC:
            return as_operator([[self.tail.ratio]])
        return None

    def chain_map(self, n):
        if n < 0:
            raise ValueError("stage index must be non-negative")
        if n < self.prefix_len:
            return self.prefix_maps[n]
        T = self.tail_operator()
        if T is not None:
            return T
        d = self.stage_dim(n)
        return as_operator(_embedding(d, d + self.tail.blocks, self.tail.blocks))

    def _tail_power(self, m, n):
        """Composite of tail maps from stage ``m`` to ``n`` (both past the prefix)."""
        kind, k = self.tail.kind, n - m
        if kind is TailKind.REPEAT_LAST:
            return np.linalg.matrix_power(self.prefix_maps[-1], k)
        if kind is TailKind.IDENTITY:
            return np.eye(self.stage_dim(m), dtype=np.complex128)
        if kind is TailKind.SCALAR_GEOMETRIC:
            return np.array([[self.tail.ratio**k]], dtype=np.complex128)
        return _embedding(self.stage_dim(m), self.stage_dim(n), self.tail.blocks)

    def composite(self, m, n):
        """``e_{n-1} o ... o e_m``; the identity when ``m == n``."""
        if not 0 <= m <= n:
            raise ValueError(f"need 0 <= m <= n, got m={m}, n={n}")
        p = self.prefix_len
        out = np.eye(self.stage_dim(m), dtype=np.complex128)
        for k in range(m, min(n, p)):
            out = self.prefix_maps[k] @ out
        if n > p:
            out = self._tail_power(max(m, p), n) @ out
        return as_operator(out)

    def composite_naive(self, m, n):
        """Map-by-map product; the oracle for ``composite``."""
        out = np.eye(self.stage_dim(m), dtype=np.complex128)
        for k in range(m, n):
            out = self.chain_map(k) @ out
        return out

    def equals(self, other, tol=0.0):
        return (
            self.prefix_dims == other.prefix_dims
            and self.tail.kind is other.tail.kind
            and self.tail.blocks == other.tail.blocks
            and abs(self.tail.ratio - other.tail.ratio) <= tol
            and self.category is other.category
            and all(np.max(np.abs(a - b)) <= tol for a, b in zip(self.prefix_maps, other.prefix_maps))
        )

    def __repr__(self):
        return (
            f"OmegaChain(prefix_dims={list(self.prefix_dims)}, tail={self.tail.kind.value}, "
            f"category={self.category.value})"
        )


@dataclass
class ValidationReport:
    """Outcome of a structural check; ``problems`` holds human-readable failures."""

    ok: bool
    problems: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    worst_index: int | None = None
    worst_residual: float = 0.0
    max_norm: float = 0.0

    def raise_if_invalid(self, exc=ValueError):
        if not self.ok:
            raise exc("; ".join(self.problems))
        return self


def _square_report(residuals, scales, tol, label):
    problems = []
    worst_index, worst = None, 0.0
    for n, (r, s) in enumerate(zip(residuals, scales)):
        if worst_index is None or r > worst:
            worst_index, worst = n, r
        if r > tol * max(1.0, s):
            problems.append(f"{label} fails at n={n}: residual {r:.3e}")
    return ValidationReport(
        ok=not problems,
        problems=problems,
        residuals=list(residuals),
        worst_index=worst_index,
        worst_residual=worst,
    )


def validate_chain(chain, tol=DEFAULT_TOL):
    """Check shapes and that each map respects the declared category.

    All prefix maps plus one representative tail map are classified.
    """
    problems = []
    p = chain.prefix_len
    checked = list(range(p)) + [p]
    worst = 0.0
    for n in checked:
        G = chain.chain_map(n)
        if G.shape != (chain.stage_dim(n + 1), chain.stage_dim(n)):
            problems.append(f"shape mismatch at map {n}: {G.shape}")
            continue
        cls = classify(G, tol)
        worst = max(worst, cls.norm)
        if not within_category(cls.tag, chain.category):
            problems.append(
                f"category violation at map {n}: {cls.tag.value} (norm {cls.norm:.6g}) "
                f"in a {chain.category.value} chain"
            )
    return ValidationReport(ok=not problems, problems=problems, max_norm=worst)


# Component rules: families of operators indexed by stage, shared by chain
# morphisms and cocones. Each provides ``at(n)``.


class ComponentTail(str, enum.Enum):
    CONSTANT = "constant"
    SCALAR_GEOMETRIC = "scalar_geometric"


@dataclass(frozen=True, eq=False)
class PrefixComponents:
    """Explicit components for stages ``0..len(prefix)-1``, then a tail.

    ``constant`` repeats the last component; ``scalar_geometric`` multiplies
    it by ``ratio`` at each further stage.
    """

    prefix: tuple
    tail: ComponentTail = ComponentTail.CONSTANT
    ratio: complex = 1.0

    def __post_init__(self):
        if not self.prefix:
            raise ValueError("at least one explicit component is required")
        object.__setattr__(self, "prefix", tuple(as_operator(a) for a in self.prefix))
        object.__setattr__(self, "tail", ComponentTail(self.tail))
        object.__setattr__(self, "ratio", complex(self.ratio))

    def at(self, n):
        p = len(self.prefix)
        if n < p:
            return self.prefix[n]
        if self.tail is ComponentTail.CONSTANT:
            return self.prefix[-1]
        return as_operator(self.prefix[-1] * self.ratio ** (n - p + 1))


@dataclass(frozen=True, eq=False)
class WeightedEmbedding:
    """Stage ``n`` = C^(n+1) into C^target_dim, sending e_k to k*e_k (1-based k).

    Coordinates past ``target_dim`` are dropped.
    """

    target_dim: int

    def at(self, n):
        d = n + 1
        A = np.zeros((self.target_dim, d), dtype=np.complex128)
        k = min(d, self.target_dim)
        A[np.arange(k), np.arange(k)] = np.arange(1, k + 1)
        return as_operator(A)


@dataclass(frozen=True, eq=False)
class FunctionComponents:
    """Components given by an arbitrary callable (not serialisable)."""

    fn: Callable

    def at(self, n):
        return as_operator(self.fn(n))


@dataclass(frozen=True, eq=False)
class ScaledComponents:
    """``base.at(n) * 2**log2_scale(n)``."""

    base: object
    log2_scale: Callable

    def at(self, n):
        return as_operator(self.base.at(n) * np.exp2(self.log2_scale(n)))


@dataclass(frozen=True, eq=False)
class ComposedComponents:
    """``outer.at(n) @ inner.at(n)``."""

    outer: object
    inner: object

    def at(self, n):
        return as_operator(self.outer.at(n) @ self.inner.at(n))


@dataclass(frozen=True, eq=False)
class ChainMorphism:
    source: OmegaChain
    target: OmegaChain
    components: object

    def at(self, n):
        A = self.components.at(n)
        expected = (self.target.stage_dim(n), self.source.stage_dim(n))
        if A.shape != expected:
            raise ValueError(f"component {n} has shape {A.shape}, expected {expected}")
        return A


def identity_morphism(chain):
    return ChainMorphism(chain, chain, FunctionComponents(lambda n: identity(chain.stage_dim(n))))


def compose_morphisms(beta, alpha):
    """``beta o alpha``; ``alpha.target`` must be ``beta.source``."""
    if alpha.target is not beta.source and not alpha.target.equals(beta.source):
        raise ValueError("morphisms are not composable")
    return ChainMorphism(alpha.source, beta.target, ComposedComponents(beta.components, alpha.components))


def validate_morphism(morphism, depth, tol=DEFAULT_TOL):
    """Check ``alpha_{n+1} o c_n == d_n o alpha_n`` for ``n < depth``."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    residuals, scales = [], []
    src, tgt = morphism.source, morphism.target
    nxt = morphism.at(0)
    for n in range(depth):
        cur, nxt = nxt, morphism.at(n + 1)
        left = nxt @ src.chain_map(n)
        right = tgt.chain_map(n) @ cur
        residuals.append(operator_norm(left - right))
        scales.append(max(np.linalg.norm(left), np.linalg.norm(right)))
    return _square_report(residuals, scales, tol, "naturality square")
