"""Random chains, cocones and morphisms for property tests."""
import numpy as np

from hilbcolim.chain import (
    ChainMorphism,
    FunctionComponents,
    OmegaChain,
    PrefixComponents,
    TailRule,
)
from hilbcolim.colimit import pulled_back_cocone
from hilbcolim.linalg import OperatorKind, random_contractions, random_isometry


def gaussian(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def contraction(rng, m, n):
    return random_contractions(m, n, 1, rng)[0]


def random_prefix(rng, length, max_dim=4, last_dim=None):
    dims = [int(rng.integers(1, max_dim + 1)) for _ in range(length + 1)]
    if last_dim is not None:
        dims[-1] = last_dim
    maps = [contraction(rng, dims[k + 1], dims[k]) for k in range(length)]
    return dims, maps


def split_contraction(rng, d, unitary_dim, phases=True, shrink=0.9):
    """``W (V (+) C) W^H``: unitary ``V`` on ``unitary_dim`` coordinates,
    a strict contraction ``C`` (norm <= shrink) on the rest.

    Returns ``(M, W, V)``.
    """
    W = random_isometry(d, d, rng)
    theta = rng.uniform(0, 2 * np.pi, unitary_dim) if phases else np.zeros(unitary_dim)
    V = np.diag(np.exp(1j * theta))
    core = np.zeros((d, d), dtype=complex)
    core[:unitary_dim, :unitary_dim] = V
    rest = d - unitary_dim
    if rest:
        core[unitary_dim:, unitary_dim:] = shrink * contraction(rng, rest, rest)
    return W @ core @ W.conj().T, W, V


def random_contraction_chain(rng, tail, prefix_len=None, max_dim=4):
    """A contraction chain with the given tail kind (a ``TailKind`` value string)."""
    p = int(rng.integers(0, 4)) if prefix_len is None else prefix_len
    if tail == "identity":
        dims, maps = random_prefix(rng, p, max_dim)
        return OmegaChain(tuple(dims), tuple(maps), TailRule.identity())
    if tail == "scalar_geometric":
        dims, maps = random_prefix(rng, p, max_dim, last_dim=1)
        ratio = complex(rng.uniform(0, 1)) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        return OmegaChain(tuple(dims), tuple(maps), TailRule.scalar_geometric(ratio))
    if tail == "repeat_last":
        d = int(rng.integers(1, max_dim + 1))
        dims, maps = random_prefix(rng, p, max_dim, last_dim=d)
        M, _, _ = split_contraction(rng, d, int(rng.integers(0, d + 1)))
        return OmegaChain(tuple(dims) + (d,), tuple(maps) + (M,), TailRule.repeat_last())
    raise ValueError(tail)


def random_contraction_cocone(rng, tail, target_dim=None, max_dim=4):
    """A contraction chain together with a contraction cocone over it."""
    t = int(rng.integers(1, 4)) if target_dim is None else target_dim
    p = int(rng.integers(0, 4))
    if tail == "identity":
        chain = random_contraction_chain(rng, "identity", p, max_dim)
        q = chain.prefix_len
        B = contraction(rng, t, chain.stage_dim(q))
        return chain, pulled_back_cocone(chain, t, q, B, lambda n: B)
    if tail == "scalar_geometric":
        dims, maps = random_prefix(rng, p, max_dim, last_dim=1)
        rho = np.exp(1j * rng.uniform(0, 2 * np.pi))
        chain = OmegaChain(tuple(dims), tuple(maps), TailRule.scalar_geometric(rho))
        q = chain.prefix_len
        B = contraction(rng, t, 1)
        return chain, pulled_back_cocone(chain, t, q, B, lambda n: B * np.conj(rho) ** (n - q))
    if tail == "repeat_last":
        d = int(rng.integers(1, max_dim + 1))
        dims, maps = random_prefix(rng, p, max_dim, last_dim=d)
        k = int(rng.integers(0, d + 1))
        M, W, V = split_contraction(rng, d, k)
        chain = OmegaChain(tuple(dims) + (d,), tuple(maps) + (M,), TailRule.repeat_last())
        q = chain.prefix_len
        B = contraction(rng, t, d)

        def comp(n):
            inv = np.zeros((d, d), dtype=complex)
            inv[:k, :k] = np.linalg.matrix_power(V.conj().T, n - q)
            return B @ inv @ W.conj().T

        return chain, pulled_back_cocone(chain, t, q, comp(q), comp)
    raise ValueError(tail)


def random_bounded_chain(rng, max_dim=3, max_norm=4.0):
    p = int(rng.integers(1, 5))
    d = int(rng.integers(1, max_dim + 1))
    dims = [d] * (p + 1)
    maps = []
    for _ in range(p):
        r = rng.uniform()
        if r < 0.15:
            maps.append(np.zeros((d, d), dtype=complex))
        else:
            maps.append(gaussian(rng, (d, d)) * rng.uniform(0.1, max_norm))
    tail = TailRule.repeat_last() if rng.uniform() < 0.7 else TailRule.identity()
    return OmegaChain(tuple(dims), tuple(maps), tail, OperatorKind.BOUNDED)


def conjugated(chain, rng):
    """A morphism from ``chain`` to an isomorphic chain ``T_{n+1} c_n T_n^-1``.

    The components are the invertible ``T_n``, constant past the prefix.
    """
    d = chain.prefix_dims[0]
    p = chain.prefix_len
    Ts = [np.eye(d) + 0.3 * gaussian(rng, (d, d)) for _ in range(p + 1)]
    if chain.tail.kind.value == "repeat_last":
        # the tail repeats the last map, so the last two components must agree
        Ts[-1] = Ts[-2]
    maps = [Ts[n + 1] @ chain.prefix_maps[n] @ np.linalg.inv(Ts[n]) for n in range(p)]
    target = OmegaChain(chain.prefix_dims, tuple(maps), chain.tail, OperatorKind.BOUNDED)
    return ChainMorphism(chain, target, PrefixComponents(tuple(Ts)))
