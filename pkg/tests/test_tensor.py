import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hilbcolim.chain import OmegaChain, TailRule
from hilbcolim.colimit import ColimClass, colim_inner, colim_norm
from hilbcolim.counterexamples import embedding_chain, scaling_chain
from hilbcolim.linalg import OperatorKind, random_contraction
from hilbcolim.tensor import (
    check_density,
    check_isometry,
    check_naturality,
    check_norms,
    preimage_of_sum,
    tensor_chain,
)

from helpers import gaussian, random_contraction_chain

DIAG = OmegaChain((2, 2), (np.diag([1.0, 0.5]),), TailRule.repeat_last())
IDENT = OmegaChain((3,), (), TailRule.identity())
TAILS = ["identity", "scalar_geometric", "repeat_last"]


@pytest.mark.parametrize("h", [1, 2, 3])
@pytest.mark.parametrize("base", [IDENT, DIAG, scaling_chain(), embedding_chain()], ids=["ident", "diag", "scaling", "embed"])
def test_derived_maps_are_kron(h, base):
    tc = tensor_chain(h, base)
    for n in range(6):
        np.testing.assert_allclose(
            tc.derived.chain_map(n), np.kron(np.eye(h), base.chain_map(n)), atol=1e-15
        )
        assert tc.derived.stage_dim(n) == h * base.stage_dim(n)


def test_bounded_chain_refused():
    ch = OmegaChain((1,), (), TailRule.scalar_geometric(2.0), OperatorKind.BOUNDED)
    with pytest.raises(ValueError):
        tensor_chain(2, ch)
    with pytest.raises(ValueError):
        tensor_chain(0, IDENT)


def test_lift_on_diag_closed_form():
    # ((1,0) (x) h) survives, ((0,1) (x) h) dies
    tc = tensor_chain(2, DIAG)
    h = np.array([1.0, 1j])
    keep = tc.lift(h, ColimClass(0, [1.0, 0.0]))
    dies = tc.lift(h, ColimClass(0, [0.0, 1.0]))
    assert abs(colim_norm(tc.derived, keep).value - np.sqrt(2)) < 1e-12
    assert colim_norm(tc.derived, dies).value < 1e-10


@pytest.mark.parametrize("base", [IDENT, DIAG, scaling_chain()], ids=["ident", "diag", "scaling"])
def test_isometry_and_norm_checks(base):
    tc = tensor_chain(2, base)
    iso = check_isometry(tc, 40, rng=1)
    assert iso.ok and iso.worst_residual <= 1e-9
    norms = check_norms(tc, 40, rng=2)
    assert norms.ok and norms.worst_residual <= 1e-9
    rec = iso.to_record()
    assert rec["ok"] and len(rec["samples"]) == 40


@given(st.sampled_from(TAILS), st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_isometry_property(tail, seed, h):
    rng = np.random.default_rng(seed)
    ch = random_contraction_chain(rng, tail, max_dim=3)
    tc = tensor_chain(h, ch)
    rep = check_isometry(tc, 4, rng=rng, max_stage=4)
    assert rep.ok, rep.to_record()


def test_density_preimage():
    tc = tensor_chain(2, DIAG)
    rng = np.random.default_rng(5)
    terms = [(gaussian(rng, 2), ColimClass(n, gaussian(rng, 2))) for n in (0, 1, 3)]
    pre = preimage_of_sum(tc, terms)
    assert pre.index == 3
    rep = check_density(tc, terms)
    assert rep.ok and rep.worst_residual <= 1e-9
    # the preimage's norm^2 equals the double sum of inner products
    total = sum(
        np.vdot(h, hp) * colim_inner(DIAG, c, cp).value for h, c in terms for hp, cp in terms
    )
    assert abs(colim_norm(tc.derived, pre).value ** 2 - total.real) < 1e-9


@pytest.mark.parametrize("base", [IDENT, DIAG, scaling_chain(), embedding_chain()], ids=["ident", "diag", "scaling", "embed"])
def test_naturality(base):
    f = random_contraction(3, 2, 11)
    rep = check_naturality(f, base, 30, rng=4)
    assert rep.ok and rep.worst_residual <= 1e-9


def test_naturality_rejects_vector():
    with pytest.raises(ValueError):
        check_naturality(np.ones(2), IDENT, 1)
