import numpy as np
import pytest

from hilbcolim.colimit import (
    Status,
    colim_norm,
    dichotomy_report,
    global_bound,
    inclusion,
    restriction_norm,
    validate_cocone,
)
from hilbcolim.counterexamples import (
    counterexample,
    dichotomy,
    embedding_chain,
    embedding_cocone,
    scaling_chain,
    scaling_cocone,
)

from helpers import random_contraction_cocone


def test_scaling_colimit_is_zero():
    est = colim_norm(scaling_chain(), inclusion(scaling_chain(), 0, [1.0]))
    assert est.value == 0.0 and est.status is Status.EXACT


@pytest.mark.parametrize("depth", [1, 8, 32])
def test_scaling_cocone_valid(depth):
    assert validate_cocone(scaling_cocone(), depth).ok


def test_scaling_global_bound():
    bound, growth = global_bound(scaling_cocone(), 20)
    assert bound == 524288.0
    assert growth.growing


def test_scaling_report():
    rep = counterexample("scaling", 20)
    assert rep.ok, rep.checks
    assert rep.to_record()["which"] == "scaling"
    names = [c["name"] for c in rep.checks]
    assert "nonzero_image_of_zero_class" in names


def test_embedding_restriction_norms():
    cocone = embedding_cocone(16)
    norms = [restriction_norm(cocone, n) for n in range(16)]
    np.testing.assert_allclose(norms, np.arange(1, 17), atol=1e-9)
    assert all(b > a for a, b in zip(norms, norms[1:]))


def test_embedding_report():
    rep = counterexample("embedding", 12)
    assert rep.ok, rep.checks
    with pytest.raises(ValueError):
        counterexample("nope", 3)
    with pytest.raises(ValueError):
        embedding_cocone(0)


def test_dichotomy_unbounded_cases():
    rec = dichotomy(scaling_chain(), scaling_cocone(), 12).to_record()
    assert rec["verdict"] == "unbounded"
    rec = dichotomy(embedding_chain(), embedding_cocone(12), 12).to_record()
    assert rec["verdict"] == "unbounded"


@pytest.mark.parametrize("tail", ["identity", "scalar_geometric", "repeat_last"])
def test_dichotomy_bounded_for_contraction_cocones(tail):
    rng = np.random.default_rng(17)
    for _ in range(5):
        chain, cocone = random_contraction_cocone(rng, tail)
        rec = dichotomy_report(cocone, 8).to_record()
        assert rec["verdict"] == "bounded", rec


def test_dichotomy_rejects_mismatched_chain():
    with pytest.raises(ValueError):
        dichotomy(embedding_chain(), scaling_cocone(), 4)
