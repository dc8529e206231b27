import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fashsent.data import ATTRIBUTE_SLOT, Attribute, PostRecord, Region
from fashsent.encoders import (
    MAX_REGIONS, EncodingError, SyntheticEmbeddings, TableEmbeddings, embed_attributes, embed_text,
    encode_vision, provider_from_spec, provider_spec, read_table, synthetic_embedding, write_table,
)


def post(regions):
    return PostRecord("p", "", [], regions, [], None)


def test_synthetic_embedding_contract():
    a = synthetic_embedding("dress", 300, 0)
    assert np.array_equal(a, synthetic_embedding("dress", 300, 0))
    assert abs(np.linalg.norm(a) - 1.0) < 1e-12
    b = synthetic_embedding("shirt", 300, 0)
    assert abs(a @ b) < 0.5
    assert not np.array_equal(a, synthetic_embedding("dress", 300, 1))


@given(st.text(max_size=20), st.integers(1, 64), st.integers(0, 10**6))
def test_synthetic_embedding_unit_norm(token, dim, seed):
    assert abs(np.linalg.norm(synthetic_embedding(token, dim, seed)) - 1.0) < 1e-12


def test_embed_text_empty():
    enc = embed_text([], SyntheticEmbeddings(4))
    assert enc.matrix.shape == (0, 12) and enc.mask.shape == (0,)


def test_table_lookup_concatenates_and_falls_back(tmp_path):
    tables = []
    for k in range(3):
        path = tmp_path / f"t{k}.txt"
        write_table(path, {"red": np.arange(2.0) + 10 * k, "blue": -np.arange(2.0) - 10 * k})
        tables.append(path)
    provider = TableEmbeddings.from_files(tables, seed=5)
    assert provider.vector("red").tolist() == [0.0, 1.0, 10.0, 11.0, 20.0, 21.0]
    oov = provider.vector("green")
    expected = np.concatenate([synthetic_embedding("green", 2, 5 * 31 + k) for k in range(3)])
    assert np.array_equal(oov, expected)
    assert provider_from_spec(provider_spec(provider)).vector("blue").tolist() == provider.vector("blue").tolist()


def test_read_table_reports_bad_lines(tmp_path):
    (tmp_path / "t").write_text("dim 2\ngood 1 2\nbad 1\n")
    with pytest.raises(EncodingError, match=":3:"):
        read_table(tmp_path / "t")


def test_attribute_value_is_mean_of_word_vectors():
    provider = SyntheticEmbeddings(8)
    enc = embed_attributes([Attribute("color", "Black and White", 0.9)], provider)
    slot = ATTRIBUTE_SLOT["color"]
    expected = (provider.vector("black") + provider.vector("and") + provider.vector("white")) / 3
    assert np.abs(enc.matrix[slot] - expected).max() < 1e-12
    assert enc.mask.sum() == 1 and enc.mask[slot]
    assert not enc.matrix[~enc.mask].any()


def test_no_attributes_gives_empty_layout():
    enc = embed_attributes([], SyntheticEmbeddings(8))
    assert enc.matrix.shape == (20, 24) and not enc.matrix.any() and not enc.mask.any()


def test_single_word_attribute_lands_in_its_slot():
    provider = SyntheticEmbeddings(8)
    enc = embed_attributes([Attribute("style", "casual", 0.7)], provider)
    assert np.array_equal(enc.matrix[ATTRIBUTE_SLOT["style"]], provider.vector("casual"))


def test_vision_global_only():
    g = np.arange(512.0)
    enc = encode_vision(post([Region("global", g)]))
    assert enc.regions.shape == (MAX_REGIONS, 512)
    assert enc.mask.tolist() == [True] + [False] * 7
    assert np.array_equal(enc.regions[0], g) and not enc.regions[1:].any()


def test_vision_priority_and_cap():
    regions = [Region("item", np.full(512, float(i))) for i in range(5)]
    regions += [Region("face", np.full(512, 100.0 + i)) for i in range(4)]
    regions.insert(3, Region("global", np.full(512, -1.0)))
    enc = encode_vision(post(regions))
    assert enc.roles == ["global"] + ["face"] * 4 + ["item"] * 3
    assert enc.regions[:, 0].tolist() == [-1.0, 100.0, 101.0, 102.0, 103.0, 0.0, 1.0, 2.0]
    assert enc.mask.all()


def test_vision_contract_errors():
    with pytest.raises(EncodingError, match="global"):
        encode_vision(post([Region("face", np.zeros(512))]))
    with pytest.raises(EncodingError, match="width"):
        encode_vision(post([Region("global", np.zeros(100))]))
