"""Colimits of contraction chains: classes, limit inner products, cocones.

A vector of the colimit is represented by a class ``(index, rep)``: a stage
vector together with its stage. Two classes are compared by pushing both to
a common stage and following the chain; inner products are limits of the
stage inner products and are returned as ``LimitEstimate`` values carrying
an error radius.

Limits along a ``repeat_last`` tail with operator ``M`` are certified as
follows. The vectors on which every power of ``M`` is isometric form a
reducing subspace ``U`` with projector ``P``; ``M`` is unitary on ``U`` and
its powers tend to zero on the complement, so ``|M^k x|^2 -> |Px|^2``. With
that limit known, the contraction inequality applied to the composite from
stage ``k`` onwards bounds ``|<x_k|y_k> - lim|^2`` by
``(|x_k|^2 - |Px|^2)(|y_k|^2 - |Py|^2)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .chain import TailKind, ValidationReport, _square_report
from .linalg import (
    DEFAULT_TOL,
    NotAContractionError,
    OperatorKind,
    as_vector,
    classify,
    inner,
    norm,
    operator_norm,
    within_category,
)

EPS = np.finfo(float).eps
ZERO_THRESHOLD = 1e-8
# A heuristic norm below this may still be decaying towards zero.
INDETERMINATE_BAND = 1e-4
# Eigenvalues of I - (M^d)^H M^d below NULL_TOL span the unitary part; values
# between NULL_TOL and AMBIGUOUS_TOL make that split unreliable.
NULL_TOL = 1e-10
AMBIGUOUS_TOL = 1e-6
MONOTONE_SLACK = 1e-10
# |rho| within this of 1 is read as unit modulus (rounding in e^{i theta}).
UNIT_SLACK = 4 * EPS
CHUNK = 64


class MonotonicityError(ValueError):
    """Stage norms increased along a chain declared contractive."""


class IndeterminateError(ValueError):
    """A heuristic estimate cannot decide the question asked."""


class Status(str, enum.Enum):
    EXACT = "exact_stabilized"
    CERTIFIED = "certified"
    HEURISTIC = "heuristic"


@dataclass(frozen=True)
class LimitParams:
    depth: int = 512
    window: int = 8
    window_drop: float = 1e-12
    target_error: float = 1e-12
    zero_threshold: float = ZERO_THRESHOLD
    tol: float = DEFAULT_TOL


DEFAULT_PARAMS = LimitParams()


def _scalar_record(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    return float(v)


@dataclass(frozen=True)
class LimitEstimate:
    value: complex | float
    error: float
    status: Status
    depth_used: int

    def to_record(self):
        return {
            "value": _scalar_record(self.value),
            "error": float(self.error),
            "status": self.status.value,
            "depth_used": int(self.depth_used),
        }


@dataclass(frozen=True, eq=False)
class ColimClass:
    index: int
    rep: np.ndarray

    def __post_init__(self):
        if self.index < 0:
            raise ValueError("stage index must be non-negative")
        object.__setattr__(self, "rep", as_vector(self.rep))


def inclusion(chain, n, x):
    """The class of ``x`` in stage ``n``."""
    return ColimClass(n, as_vector(x, chain.stage_dim(n)))


def _checked(chain, cls):
    if cls.rep.shape[0] != chain.stage_dim(cls.index):
        raise ValueError(
            f"class at stage {cls.index} has dimension {cls.rep.shape[0]}, "
            f"expected {chain.stage_dim(cls.index)}"
        )
    return cls


def push(chain, cls, m):
    _checked(chain, cls)
    if m < cls.index:
        raise ValueError(f"cannot push a class at stage {cls.index} back to stage {m}")
    if m == cls.index:
        return cls
    return ColimClass(m, chain.composite(cls.index, m) @ cls.rep)


def class_combine(chain, a, c1, b, c2):
    """``a*c1 + b*c2`` computed at the later of the two stages."""
    m = max(c1.index, c2.index)
    return ColimClass(m, a * push(chain, c1, m).rep + b * push(chain, c2, m).rep)


def _require_contractive(chain):
    if not within_category(chain.category, OperatorKind.CONTRACTION):
        raise ValueError("limit inner products need a contraction or isometry chain")


def _check_step(prev, cur, scale, where):
    if cur > prev + MONOTONE_SLACK * max(1.0, scale):
        raise MonotonicityError(f"norm^2 increased from {prev!r} to {cur!r} at stage {where}")


def _roundoff(steps, dim, a0, b0):
    return 8.0 * EPS * (steps + 1) * dim * math.sqrt(a0 * b0)


def unitary_part(M):
    """Orthonormal basis of the largest subspace on which ``M`` acts isometrically.

    Returns ``(Q, ambiguous, gap)``. ``gap`` is the smallest eigenvalue of
    ``I - (M^d)^H M^d`` outside the null space; ``ambiguous`` is true when it
    is too close to zero for the split to be trusted.
    """
    M = np.asarray(M, dtype=np.complex128)
    d = M.shape[0]
    Md = np.linalg.matrix_power(M, d)
    K = np.eye(d) - Md.conj().T @ Md
    lam, V = np.linalg.eigh((K + K.conj().T) / 2)
    null = lam <= NULL_TOL
    rest = lam[~null]
    gap = float(rest.min()) if rest.size else 1.0
    return V[:, null], gap < AMBIGUOUS_TOL, gap


def _is_scaled_identity(M):
    c = M[0, 0]
    return bool(np.all(M == c * np.eye(M.shape[0])))


def _strict_isometry(M):
    return bool(np.max(np.abs(M.conj().T @ M - np.eye(M.shape[1]))) <= 1e-12)


def _walk_prefix(chain, x, y, m):
    """Push ``x``, ``y`` from stage ``m`` through the remaining prefix maps."""
    a0 = np.vdot(x, x).real
    b0 = np.vdot(y, y).real
    a_prev, b_prev = a0, b0
    n = m
    while n < chain.prefix_len:
        G = chain.prefix_maps[n]
        x, y = G @ x, G @ y
        n += 1
        a, b = np.vdot(x, x).real, np.vdot(y, y).real
        _check_step(a_prev, a, a0, n)
        _check_step(b_prev, b, b0, n)
        a_prev, b_prev = a, b
    return x, y, n


def _orbit_chunks(M, x, y, params):
    """Yield ``(offset, s, a, b)`` chunks of the tail orbit, up to ``params.depth`` steps."""
    done = 0
    while done < params.depth:
        steps = min(CHUNK, params.depth - done)
        s, a, b, x, y = kernels.orbit_moments(M, x, y, steps)
        _check_chunk(a, b, s)
        yield done, s, a, b
        done += steps


def _check_chunk(a, b, s):
    slack = MONOTONE_SLACK * max(1.0, a[0], b[0])
    if np.any(np.diff(a) > slack) or np.any(np.diff(b) > slack):
        raise MonotonicityError("norms increased along a repeat_last tail")


def _repeat_last_limit(M, x, y, q, params, norm_only):
    Q, ambiguous, gap = unitary_part(M)
    if not ambiguous:
        est = _certified_orbit(M, Q, gap, x, y, q, params, norm_only)
        if est is not None:
            return est
    return _heuristic_orbit(M, x, y, q, params, norm_only)


def _certified_orbit(M, Q, gap, x, y, q, params, norm_only):
    """Follow the orbit until the certified radius drops below ``params.target_error``
    (relative to the size of ``x`` and ``y`` when they are large).

    For inner products the radius is the contraction-inequality bound
    ``sqrt((|x_k|^2 - |Px|^2)(|y_k|^2 - |Py|^2))``. For norms the limit is
    bracketed by ``|Px| <= lim <= |x_k|`` since norms never increase.
    """
    d = M.shape[0]
    a0 = np.vdot(x, x).real
    b0 = np.vdot(y, y).real
    Px, Py = Q.conj().T @ x, Q.conj().T @ y
    a_inf = float(np.vdot(Px, Px).real)
    b_inf = float(np.vdot(Py, Py).real)
    s_inf = complex(np.vdot(Px, Py))
    # projector error from the eigenvector perturbation bound
    proj = 0.0 if Q.shape[1] == 0 else 4.0 * EPS * d / gap
    slack = MONOTONE_SLACK * max(1.0, a0, b0)
    last = None
    # rounding in |x_k|^2 and |Px|^2; each gap factor is widened by it
    da = (2.0 * proj + 8.0 * EPS * d) * a0
    db = (2.0 * proj + 8.0 * EPS * d) * b0
    scale = math.sqrt(a0) if norm_only else math.sqrt(a0 * b0)
    target = params.target_error * max(1.0, scale)
    for offset, s, a, b in _orbit_chunks(M, x, y, params):
        if a[-1] < a_inf - slack or b[-1] < b_inf - slack:
            return None
        if norm_only:
            radius = np.sqrt(a) - math.sqrt(a_inf)
        else:
            ga = np.maximum(a - a_inf, 0.0) + da * (1 + offset + np.arange(len(a)))
            gb = np.maximum(b - b_inf, 0.0) + db * (1 + offset + np.arange(len(b)))
            radius = np.sqrt(ga * gb)
        hit = np.nonzero(radius <= target)[0]
        k = int(hit[0]) if hit.size else len(s) - 1
        step = offset + k
        if norm_only:
            value = math.sqrt(a[k])
            err = max(float(radius[k]), 0.0) + (proj + 8.0 * EPS * (step + 1) * d) * math.sqrt(a0)
            consistent = math.sqrt(a_inf) <= value + err
        else:
            value = complex(s[k])
            err = float(radius[k]) + (2.0 * proj) * math.sqrt(a0 * b0) + _roundoff(step, d, a0, b0)
            consistent = abs(value - s_inf) <= err
        if not consistent:
            return None
        last = LimitEstimate(value, err, Status.CERTIFIED, q + step)
        if hit.size:
            break
    return last


def _heuristic_orbit(M, x, y, q, params, norm_only):
    """Window stopping rule: stop once norm^2 drops by less than ``window_drop`` over ``window`` stages."""
    w = params.window
    d = M.shape[0]
    s, a, b, _, _ = kernels.orbit_moments(M, x, y, params.depth)
    _check_chunk(a, b, s)
    k = len(s) - 1
    for j in range(w, len(s)):
        if a[j - w] - a[j] < params.window_drop and b[j - w] - b[j] < params.window_drop:
            k = j
            break
    j0 = max(k - w, 0)
    if norm_only:
        value = math.sqrt(a[k])
        err = math.sqrt(a[j0]) - value + 8.0 * EPS * (k + 1) * d * math.sqrt(a[0])
        return LimitEstimate(value, err, Status.HEURISTIC, q + k)
    err = math.sqrt(max(a[j0] - a[k], 0.0) * max(b[j0] - b[k], 0.0)) + _roundoff(k, d, a[0], b[0])
    return LimitEstimate(complex(s[k]), err, Status.HEURISTIC, q + k)


def _limit_inner_at(chain, x, y, m, params, norm_only=False):
    """Limit of ``<x_n|y_n>`` from stage ``m`` (or of ``|x_n|`` when ``norm_only``)."""
    _require_contractive(chain)

    def exact(xq, yq, q):
        if norm_only:
            return LimitEstimate(norm(xq), 0.0, Status.EXACT, q)
        return LimitEstimate(inner(xq, yq), 0.0, Status.EXACT, q)

    def vanishing(q):
        return LimitEstimate(0.0 if norm_only else 0j, 0.0, Status.EXACT, q)

    if chain.category is OperatorKind.ISOMETRY:
        return exact(x, y, m)
    x, y, q = _walk_prefix(chain, np.asarray(x), np.asarray(y), m)
    kind = chain.tail.kind
    if kind in (TailKind.IDENTITY, TailKind.EMBED_INCREMENT):
        return exact(x, y, q)
    M = chain.tail_operator()
    if kind is TailKind.REPEAT_LAST and not _is_scaled_identity(M):
        if _strict_isometry(M):
            return exact(x, y, q)
        if classify(M, params.tol).tag is OperatorKind.BOUNDED:
            raise NotAContractionError("repeat_last tail operator is not a contraction")
        return _repeat_last_limit(M, x, y, q, params, norm_only)
    rho = abs(M[0, 0])
    if rho < 1.0 - UNIT_SLACK:
        return vanishing(q)
    if rho <= 1.0 + UNIT_SLACK:
        return exact(x, y, q)
    raise NotAContractionError(f"tail scaling {rho!r} exceeds 1")


def colim_inner(chain, c1, c2, params=DEFAULT_PARAMS):
    """Inner product of two classes as the limit of stage inner products."""
    m = max(c1.index, c2.index)
    x = push(chain, c1, m).rep
    y = push(chain, c2, m).rep
    return _limit_inner_at(chain, x, y, m, params)


def colim_norm(chain, cls, params=DEFAULT_PARAMS):
    """Limit of the non-increasing stage norms of a class.

    Equal to the square root of ``colim_inner(cls, cls)``, but certified
    directly on the norm so that classes near zero get a small radius.
    """
    _checked(chain, cls)
    return _limit_inner_at(chain, cls.rep, cls.rep, cls.index, params, norm_only=True)


def is_zero_class(chain, cls, params=DEFAULT_PARAMS):
    est = colim_norm(chain, cls, params)
    if est.value + est.error < params.zero_threshold:
        return True
    if est.status is Status.HEURISTIC and est.value < INDETERMINATE_BAND:
        raise IndeterminateError(
            f"heuristic norm {est.value:.3e} (error {est.error:.1e}) may still decay to zero"
        )
    return False


def norm_sequence(chain, cls, depth):
    """``|x_n|`` for ``n = index .. index + depth``, by direct pushing."""
    _checked(chain, cls)
    x = cls.rep
    out = [np.linalg.norm(x)]
    for n in range(cls.index, cls.index + depth):
        x = chain.chain_map(n) @ x
        out.append(np.linalg.norm(x))
    return np.array(out)


def colim_gram(chain, n, params=DEFAULT_PARAMS):
    """Matrix of limit inner products between basis vectors of stage ``n``.

    Returns ``(gram, status)``. Along a ``repeat_last`` tail the limit is
    formed in closed form through the unitary-part projector.
    """
    _require_contractive(chain)
    X = np.eye(chain.stage_dim(n), dtype=np.complex128)
    q = max(n, chain.prefix_len)
    X = chain.composite(n, q) @ X
    kind = chain.tail.kind
    exact = chain.category is OperatorKind.ISOMETRY or kind in (TailKind.IDENTITY, TailKind.EMBED_INCREMENT)
    if exact:
        return X.conj().T @ X, Status.EXACT
    M = chain.tail_operator()
    if kind is TailKind.SCALAR_GEOMETRIC or _is_scaled_identity(M):
        rho = abs(M[0, 0])
        if rho > 1.0 + UNIT_SLACK:
            raise NotAContractionError(f"tail scaling {rho!r} exceeds 1")
        G = X.conj().T @ X
        return (G if rho >= 1.0 - UNIT_SLACK else np.zeros_like(G)), Status.EXACT
    if _strict_isometry(M):
        return X.conj().T @ X, Status.EXACT
    Q, ambiguous, _ = unitary_part(M)
    if not ambiguous:
        Y = Q.conj().T @ X
        return Y.conj().T @ Y, Status.CERTIFIED
    w = params.window
    Mk = X
    hist = [np.linalg.norm(Mk) ** 2]
    for k in range(params.depth):
        Mk = M @ Mk
        hist.append(np.linalg.norm(Mk) ** 2)
        if k + 1 >= w and hist[-1 - w] - hist[-1] < params.window_drop:
            break
    return Mk.conj().T @ Mk, Status.HEURISTIC


# Cocones


@dataclass(frozen=True, eq=False)
class Cocone:
    """Components ``alpha_n : stage n -> C^target_dim`` given by a component rule."""

    chain: object
    target_dim: int
    components: object
    category: OperatorKind = OperatorKind.BOUNDED
    _validated: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "category", OperatorKind(self.category))
        if self.target_dim < 1:
            raise ValueError("target_dim must be positive")

    def at(self, n):
        A = self.components.at(n)
        expected = (self.target_dim, self.chain.stage_dim(n))
        if A.shape != expected:
            raise ValueError(f"cocone component {n} has shape {A.shape}, expected {expected}")
        return A


def validate_cocone(cocone, depth, tol=DEFAULT_TOL):
    """Check ``alpha_n == alpha_{n+1} o e_n`` for ``n < depth``."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    chain = cocone.chain
    residuals, scales, norms = [], [], []
    nxt = cocone.at(0)
    for n in range(depth):
        cur, nxt = nxt, cocone.at(n + 1)
        pulled = nxt @ chain.chain_map(n)
        residuals.append(operator_norm(cur - pulled))
        scales.append(max(np.linalg.norm(cur), np.linalg.norm(pulled)))
        norms.append(operator_norm(cur))
    report = _square_report(residuals, scales, tol, "cocone condition")
    report.max_norm = max(norms)
    if cocone.category is OperatorKind.CONTRACTION:
        for n, v in enumerate(norms):
            if v > 1.0 + tol:
                report.problems.append(f"component {n} has norm {v:.6g} in a contraction cocone")
        report.ok = not report.problems
    return report


def _ensure_valid(cocone, depth, tol=DEFAULT_TOL):
    cached = cocone._validated.get(depth)
    if cached is None:
        cached = validate_cocone(cocone, depth, tol)
        cocone._validated[depth] = cached
    cached.raise_if_invalid()


def induced_apply(cocone, cls, validate_depth=None):
    """The universal map applied to a class: ``alpha_index(rep)``.

    The cocone is checked up to ``validate_depth`` stages first (by default
    a few stages past the class index).
    """
    _checked(cocone.chain, cls)
    _ensure_valid(cocone, validate_depth or cls.index + 8)
    return cocone.at(cls.index) @ cls.rep


@dataclass
class GrowthReport:
    norms: list
    growing: bool

    def to_record(self):
        return {"norms": [float(v) for v in self.norms], "growing": self.growing}


def global_bound(cocone, depth):
    """Largest component norm over ``n < depth`` and whether norms are still rising.

    ``growing`` is set when the norms are strictly increasing over the last
    half of the window.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    norms = [operator_norm(cocone.at(n)) for n in range(depth)]
    tail = norms[depth // 2:]
    growing = len(tail) >= 2 and all(b > a for a, b in zip(tail, tail[1:]))
    return max(norms), GrowthReport(norms, growing)


def restriction_norm(cocone, n, params=DEFAULT_PARAMS):
    """Norm of the induced map on classes from stage ``n``, measured in the colimit.

    Returns ``inf`` when some stage vector has zero colimit norm but a
    nonzero image.
    """
    gram, _ = colim_gram(cocone.chain, n, params)
    A = cocone.at(n)
    lam, V = np.linalg.eigh((gram + gram.conj().T) / 2)
    scale = max(1.0, float(np.max(np.abs(lam))))
    null = lam <= params.zero_threshold**2 * scale
    if np.any(null):
        if np.linalg.norm(A @ V[:, null]) > params.tol * max(1.0, np.linalg.norm(A)):
            return math.inf
    Vr = V[:, ~null] / np.sqrt(lam[~null])
    if Vr.shape[1] == 0:
        return 0.0
    return operator_norm(A @ Vr)


@dataclass
class DichotomyReport:
    bound: float
    growing: bool
    component_norms: list
    restriction_norms: list
    induced_within_bound: bool
    contraction_ok: bool | None
    verdict: str

    def to_record(self):
        def enc(v):
            return "inf" if math.isinf(v) else float(v)

        return {
            "bound": float(self.bound),
            "growing": self.growing,
            "component_norms": [float(v) for v in self.component_norms],
            "restriction_norms": [enc(v) for v in self.restriction_norms],
            "induced_within_bound": self.induced_within_bound,
            "contraction_ok": self.contraction_ok,
            "verdict": self.verdict,
        }


def dichotomy_report(cocone, depth, params=DEFAULT_PARAMS):
    """Compare the component bound with the induced map's restriction norms."""
    bound, growth = global_bound(cocone, depth)
    restr = [restriction_norm(cocone, n, params) for n in range(depth)]
    sup_restr = max(restr)
    within = sup_restr <= bound + params.tol * max(1.0, bound)
    contraction_ok = None
    if cocone.category is OperatorKind.CONTRACTION:
        contraction_ok = bound <= 1.0 + params.tol and sup_restr <= 1.0 + params.tol
    bounded = within and not growth.growing
    return DichotomyReport(
        bound=bound,
        growing=growth.growing,
        component_norms=growth.norms,
        restriction_norms=restr,
        induced_within_bound=within,
        contraction_ok=contraction_ok,
        verdict="bounded" if bounded else "unbounded",
    )


def pulled_back_cocone(chain, target_dim, stage, component, tail, category=OperatorKind.CONTRACTION):
    """Cocone fixed by its component at ``stage``: earlier components are
    ``component o composite(n, stage)``; later ones follow ``tail``
    (a callable ``n -> operator`` for ``n > stage``).
    """
    from .chain import FunctionComponents

    component = np.asarray(component, dtype=np.complex128)

    def at(n):
        if n < stage:
            return component @ chain.composite(n, stage)
        if n == stage:
            return component
        return tail(n)

    return Cocone(chain, target_dim, FunctionComponents(at), category)
