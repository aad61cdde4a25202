import numpy as np
import pytest

from polyfuse.text.embeddings import (
    EMBEDDING_DIM,
    EmbeddingTable,
    embed_sequence,
    load_embeddings,
    save_embeddings,
)


def small_table(tokens=("alpha", "beta", "گاما")):
    rng = np.random.default_rng(4)
    matrix = rng.normal(0, 1, (len(tokens), EMBEDDING_DIM)).astype(np.float32)
    return EmbeddingTable(vocabulary={t: i for i, t in enumerate(tokens)}, matrix=matrix)


def test_dim_must_be_300():
    with pytest.raises(ValueError):
        EmbeddingTable(vocabulary={"a": 0}, matrix=np.zeros((1, 128), dtype=np.float32), dim=128)


def test_long_sequence_trimmed_to_60():
    table = small_table()
    tensor = embed_sequence(["alpha"] * 70, table)
    assert tensor.values.shape == (60, EMBEDDING_DIM)
    assert tensor.mask.all()
    assert tensor.length == 60


def test_empty_sequence_all_zero():
    tensor = embed_sequence([], small_table())
    assert not tensor.mask.any()
    assert np.count_nonzero(tensor.values) == 0


def test_single_known_token():
    table = small_table()
    tensor = embed_sequence(["beta"], table)
    np.testing.assert_array_equal(tensor.values[0], table.matrix[1])
    assert np.count_nonzero(tensor.values[1:]) == 0
    assert tensor.mask[0] and not tensor.mask[1:].any()


def test_oov_maps_to_zero_but_counts_in_mask():
    tensor = embed_sequence(["unseen", "alpha"], small_table())
    assert np.count_nonzero(tensor.values[0]) == 0
    assert tensor.mask[0] and tensor.mask[1]


def test_padding_rows_exactly_zero_property():
    rng = np.random.default_rng(0)
    table = small_table()
    names = list(table.vocabulary)
    for _ in range(25):
        n = int(rng.integers(0, 80))
        tokens = [names[int(rng.integers(0, len(names)))] for _ in range(n)]
        tensor = embed_sequence(tokens, table)
        assert tensor.values.shape == (60, EMBEDDING_DIM)
        assert np.count_nonzero(tensor.values[~tensor.mask]) == 0


def test_file_round_trip(tmp_path):
    table = small_table()
    path = tmp_path / "emb.vec"
    save_embeddings(table, path)
    loaded = load_embeddings(path)
    assert set(loaded.vocabulary) == set(table.vocabulary)
    for token, idx in table.vocabulary.items():
        np.testing.assert_allclose(
            loaded.matrix[loaded.vocabulary[token]], table.matrix[idx], rtol=1e-6
        )


def test_header_line_tolerated(tmp_path):
    path = tmp_path / "emb.vec"
    vec = " ".join(["0.5"] * EMBEDDING_DIM)
    path.write_text(f"2 {EMBEDDING_DIM}\nfoo {vec}\nbar {vec}\n", encoding="utf-8")
    table = load_embeddings(path)
    assert set(table.vocabulary) == {"foo", "bar"}


def test_wrong_width_rejected(tmp_path):
    path = tmp_path / "emb.vec"
    path.write_text("foo 0.5 0.5\n", encoding="utf-8")
    with pytest.raises(ValueError, match="300"):
        load_embeddings(path)
