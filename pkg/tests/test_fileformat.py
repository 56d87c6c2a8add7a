import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hilbcolim.chain import ComponentTail, PrefixComponents, TailRule, WeightedEmbedding
from hilbcolim.colimit import Cocone
from hilbcolim.counterexamples import embedding_cocone, scaling_cocone
from hilbcolim.fileformat import (
    ChainFileError,
    chain_from_record,
    chain_to_record,
    dumps,
    load_chain_file,
    parse_scalar,
    parse_vector,
)

from helpers import random_contraction_chain

DATA = __import__("pathlib").Path(__file__).resolve().parents[1] / "data" / "chains"


def test_scalars():
    assert parse_scalar(2) == 2 + 0j
    assert parse_scalar([1.5, -2]) == 1.5 - 2j
    for bad in (True, "1", [1, 2, 3], None):
        with pytest.raises(ChainFileError):
            parse_scalar(bad)
    with pytest.raises(ChainFileError):
        parse_vector([])


@pytest.mark.parametrize("path", sorted(DATA.glob("*.json")), ids=lambda p: p.stem)
def test_shipped_files_load(path):
    chain, cocone = load_chain_file(path)
    assert chain.stage_dim(0) >= 1
    rec = chain_to_record(chain, cocone)
    chain2, cocone2 = chain_from_record(json.loads(dumps(rec)))
    assert chain2.equals(chain, tol=1e-15)
    if cocone is not None:
        for n in range(4):
            np.testing.assert_allclose(cocone2.at(n), cocone.at(n), atol=1e-15)


@given(st.sampled_from(["identity", "scalar_geometric", "repeat_last"]), st.integers(0, 2**32 - 1))
def test_round_trip_random_chains(tail, seed):
    ch = random_contraction_chain(np.random.default_rng(seed), tail)
    back, cocone = chain_from_record(json.loads(dumps(chain_to_record(ch))))
    assert cocone is None
    assert back.equals(ch, tol=1e-15)
    assert back.tail == ch.tail


def test_cocone_round_trips():
    for cocone in (scaling_cocone(), embedding_cocone(5)):
        rec = chain_to_record(cocone.chain, cocone)
        _, back = chain_from_record(json.loads(dumps(rec)))
        for n in range(5):
            np.testing.assert_allclose(back.at(n), cocone.at(n), atol=1e-15)


def test_function_components_not_serialisable():
    from helpers import random_contraction_cocone

    chain, cocone = random_contraction_cocone(np.random.default_rng(0), "identity")
    with pytest.raises(TypeError):
        chain_to_record(chain, cocone)


def test_dumps_is_stable():
    rec = {"b": [1.0, [2.0, 3.0]], "a": {"z": 1, "y": None}}
    assert dumps(rec) == dumps(json.loads(dumps(rec)))
    assert dumps(rec).index('"a"') < dumps(rec).index('"b"')
    with pytest.raises(ValueError):
        dumps({"x": float("nan")})


BAD_RECORDS = [
    [],
    {"tail": {"kind": "identity"}},
    {"prefix_dims": [1]},
    {"prefix_dims": [1], "tail": {"kind": "spiral"}},
    {"prefix_dims": [1], "tail": "identity"},
    {"prefix_dims": [1], "tail": {"kind": "scalar_geometric"}},
    {"prefix_dims": [1, 2], "prefix_maps": [[[1]]], "tail": {"kind": "identity"}},
    {"prefix_dims": [1, 1], "prefix_maps": [[[3]]], "tail": {"kind": "identity"}},
    {"prefix_dims": [2, 2], "prefix_maps": [[[1, 0], [0]]], "tail": {"kind": "identity"}},
    {"prefix_dims": [1], "tail": {"kind": "identity"}, "category": "weird"},
    {"prefix_dims": [1], "tail": {"kind": "identity"}, "cocone": {"prefix_components": [[[1]]]}},
    {"prefix_dims": [1], "tail": {"kind": "identity"}, "cocone": {"target_dim": 1, "tail": {"kind": "odd"}}},
    {"prefix_dims": [1], "tail": {"kind": "identity"}, "cocone": {"target_dim": 1}},
]


@pytest.mark.parametrize("rec", BAD_RECORDS)
def test_bad_records_rejected(rec):
    with pytest.raises(ChainFileError):
        chain_from_record(rec)


def test_invalid_json(tmp_path):
    p = tmp_path / "x.json"
    p.write_text("{not json")
    with pytest.raises(ChainFileError):
        load_chain_file(p)
