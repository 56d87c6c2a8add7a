"""Tensoring a chain with a fixed space C^h and comparing colimits.

The comparison map ``c : colim(H (x) K_i) -> H (x) colim K_i`` is never
built as a matrix. It is checked through the identities it must satisfy on
classes of pure tensors ``(A, h (x) x)``:

* inner products factor as ``<h|h'> * <(A,x)|(C,y)>`` (isometry);
* every finite sum of ``h_i (x) (A_i, x_i)`` has a preimage class at a
  finite stage (dense image, at the representable level);
* ``f (x) 1`` commutes with forming classes (naturality in H).

Stage vectors of the derived chain are ``np.kron(h, x)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .chain import OmegaChain, TailKind, TailRule
from .colimit import DEFAULT_PARAMS, ColimClass, class_combine, colim_inner, colim_norm, push
from .linalg import OperatorKind, identity, inner, kronecker, random_vector, within_category

RESIDUAL_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class TensorChain:
    h_dim: int
    base: OmegaChain
    derived: OmegaChain

    def lift(self, h, cls):
        """The derived-chain class ``(A, h (x) x)``."""
        return ColimClass(cls.index, np.kron(h, cls.rep))


def tensor_chain(h_dim, chain):
    """The chain ``C^h_dim (x) K_i`` with maps ``1 (x) e_i``."""
    if h_dim < 1:
        raise ValueError("h_dim must be positive")
    if not within_category(chain.category, OperatorKind.CONTRACTION):
        raise ValueError("tensoring needs a contraction or isometry chain")
    I = identity(h_dim)
    dims = [h_dim * d for d in chain.prefix_dims]
    maps = [kronecker(I, G) for G in chain.prefix_maps]
    tail = chain.tail
    if h_dim > 1:
        if tail.kind is TailKind.SCALAR_GEOMETRIC:
            # ratio * I_h is no longer 1-dimensional; unroll one tail step
            maps.append(tail.ratio * np.eye(h_dim, dtype=np.complex128))
            dims.append(h_dim)
            tail = TailRule.repeat_last()
        elif tail.kind is TailKind.EMBED_INCREMENT:
            tail = TailRule.embed_increment(blocks=h_dim * tail.blocks)
    derived = OmegaChain(tuple(dims), tuple(maps), tail, chain.category)
    return TensorChain(h_dim, chain, derived)


@dataclass
class SampleRecord:
    lhs: complex
    rhs: complex
    residual: float
    allowed: float

    @property
    def passed(self):
        return self.residual <= self.allowed

    def to_record(self):
        return {
            "lhs": [self.lhs.real, self.lhs.imag],
            "rhs": [self.rhs.real, self.rhs.imag],
            "residual": self.residual,
            "pass": self.passed,
        }


@dataclass
class CheckReport:
    samples: list = field(default_factory=list)

    @property
    def worst_residual(self):
        return max((s.residual for s in self.samples), default=0.0)

    @property
    def ok(self):
        return all(s.passed for s in self.samples)

    def to_record(self):
        return {
            "ok": self.ok,
            "worst_residual": self.worst_residual,
            "samples": [s.to_record() for s in self.samples],
        }


def _random_class(chain, rng, max_stage):
    n = int(rng.integers(0, max_stage + 1))
    return ColimClass(n, random_vector(chain.stage_dim(n), rng))


def check_isometry(tc, samples, params=DEFAULT_PARAMS, rng=None, max_stage=6):
    """Sampled check of ``<(A,h(x)x)|(C,h'(x)y)> == <h|h'> <(A,x)|(C,y)>``."""
    rng = np.random.default_rng(rng)
    report = CheckReport()
    for _ in range(samples):
        h = random_vector(tc.h_dim, rng)
        hp = random_vector(tc.h_dim, rng)
        cx = _random_class(tc.base, rng, max_stage)
        cy = _random_class(tc.base, rng, max_stage)
        left = colim_inner(tc.derived, tc.lift(h, cx), tc.lift(hp, cy), params)
        right = colim_inner(tc.base, cx, cy, params)
        hh = inner(h, hp)
        rhs = hh * right.value
        report.samples.append(
            SampleRecord(
                left.value,
                rhs,
                abs(left.value - rhs),
                left.error + abs(hh) * right.error + RESIDUAL_TOL,
            )
        )
    return report


def check_norms(tc, samples, params=DEFAULT_PARAMS, rng=None, max_stage=6):
    """Sampled check of ``|(A, h(x)x)| == |h| |(A, x)|``."""
    rng = np.random.default_rng(rng)
    report = CheckReport()
    for _ in range(samples):
        h = random_vector(tc.h_dim, rng)
        cx = _random_class(tc.base, rng, max_stage)
        left = colim_norm(tc.derived, tc.lift(h, cx), params)
        right = colim_norm(tc.base, cx, params)
        hn = np.linalg.norm(h)
        report.samples.append(
            SampleRecord(
                complex(left.value),
                complex(hn * right.value),
                abs(left.value - hn * right.value),
                left.error + hn * right.error + RESIDUAL_TOL,
            )
        )
    return report


def preimage_of_sum(tc, terms):
    """A derived-chain class representing ``sum_i h_i (x) (A_i, x_i)``.

    ``terms`` is a sequence of ``(h, ColimClass)`` pairs over the base chain.
    """
    m = max(cls.index for _, cls in terms)
    rep = sum(np.kron(h, push(tc.base, cls, m).rep) for h, cls in terms)
    return ColimClass(m, rep)


def check_density(tc, terms, params=DEFAULT_PARAMS):
    """Compare the preimage's inner products with those of the target sum.

    In the target, ``<sum h_i(x)l_i | sum h'_j(x)l'_j>`` expands into
    ``sum <h_i|h'_j> <l_i|l'_j>``; each term is checked against a
    probe pure tensor built from the same terms.
    """
    report = CheckReport()
    pre = preimage_of_sum(tc, terms)
    for hp, probe in terms:
        left = colim_inner(tc.derived, pre, tc.lift(hp, probe), params)
        rhs, allowed = 0j, RESIDUAL_TOL
        for h, cls in terms:
            est = colim_inner(tc.base, cls, probe, params)
            hh = inner(h, hp)
            rhs += hh * est.value
            allowed += abs(hh) * est.error
        report.samples.append(SampleRecord(left.value, rhs, abs(left.value - rhs), allowed + left.error))
    return report


def check_naturality(f, chain, samples, params=DEFAULT_PARAMS, rng=None, max_stage=6):
    """Sampled check that ``f (x) 1`` commutes with forming colimit classes.

    One path applies ``f (x) 1_{K_A}`` to ``h (x) x`` at stage level and forms
    the class in the ``C^h'`` chain; the other forms ``(A, h (x) x)`` and
    applies the map induced by the cocone ``iota'_i o (f (x) 1)``, then
    compares with ``f h (x) (A, x)`` against random pure-tensor probes. The
    residual also includes the colimit norm of the difference of the two
    classes.
    """
    f = np.asarray(f, dtype=np.complex128)
    if f.ndim != 2:
        raise ValueError("f must be a matrix")
    h_in, h_out = f.shape[1], f.shape[0]
    rng = np.random.default_rng(rng)
    src = tensor_chain(h_in, chain)
    dst = tensor_chain(h_out, chain)
    report = CheckReport()
    for _ in range(samples):
        h = random_vector(h_in, rng)
        cx = _random_class(chain, rng, max_stage)
        lifted = src.lift(h, cx)
        stage_level = ColimClass(cx.index, kronecker(f, identity(chain.stage_dim(cx.index))) @ lifted.rep)
        via_induced = _induced_tensor_map(f, chain, lifted)
        diff = class_combine(dst.derived, 1.0, stage_level, -1.0, via_induced)
        dn = colim_norm(dst.derived, diff, params)
        hp = random_vector(h_out, rng)
        cy = _random_class(chain, rng, max_stage)
        left = colim_inner(dst.derived, via_induced, dst.lift(hp, cy), params)
        base = colim_inner(chain, cx, cy, params)
        fh_hp = inner(f @ h, hp)
        rhs = fh_hp * base.value
        residual = abs(left.value - rhs) + dn.value
        allowed = left.error + abs(fh_hp) * base.error + dn.error + RESIDUAL_TOL
        report.samples.append(SampleRecord(left.value, rhs, residual, allowed))
    return report


def _induced_tensor_map(f, chain, cls):
    """Apply the map induced by the cocone ``iota'_i o (f (x) 1)`` to a class.

    The class is pushed one stage along the source chain before the
    component is applied, so the result lives one stage later; the cocone
    condition makes that choice immaterial.
    """
    src = tensor_chain(f.shape[1], chain).derived
    moved = push(src, cls, cls.index + 1)
    return ColimClass(moved.index, kronecker(f, identity(chain.stage_dim(moved.index))) @ moved.rep)
