import math

import pytest
import torch

from ladris.exceptions import InvalidInputError, ShapeError
from ladris.network.attention import MultiHeadCrossAttention, masked_softmax, scaled_dot_product


def test_hand_computed_softmax():
    scores = torch.tensor([[[0.0, 4.0]]], dtype=torch.float64)
    weights = masked_softmax(scores, torch.tensor([[True, True]]))
    assert weights[0, 0, 0].item() == pytest.approx(0.01799, abs=1e-5)
    assert weights[0, 0, 1].item() == pytest.approx(0.98201, abs=1e-5)


def test_random_rows_sum_to_one_and_masked_tokens_get_zero():
    generator = torch.Generator().manual_seed(5)
    scores = torch.randn(1000, 3, 7, generator=generator) * 5
    mask = torch.rand(1000, 7, generator=generator) > 0.4
    mask[:, 0] = True

    weights = masked_softmax(scores, mask)

    assert torch.allclose(weights.sum(dim=-1), torch.ones(1000, 3), atol=1e-5)
    assert torch.all(weights.masked_select(~mask.unsqueeze(1).expand_as(weights)) == 0)
    assert torch.all(weights >= 0)


def test_all_masked_row_is_rejected():
    mask = torch.tensor([[True, False], [False, False]])
    with pytest.raises(InvalidInputError):
        masked_softmax(torch.zeros(2, 1, 2), mask)


def test_scaled_dot_product_uses_square_root_of_scale():
    query = torch.tensor([[[1.0, 0.0]]])
    key = torch.tensor([[[1.0, 0.0], [0.0, 1.0]]])
    value = torch.tensor([[[1.0], [0.0]]])
    _, weights = scaled_dot_product(query, key, value, torch.tensor([[True, True]]), scale=4.0)
    expected = 1 / (1 + math.exp(-0.5))
    assert weights[0, 0, 0].item() == pytest.approx(expected, rel=1e-6)


def test_scaled_dot_product_width_mismatch():
    with pytest.raises(ShapeError):
        scaled_dot_product(torch.zeros(1, 2, 3), torch.zeros(1, 4, 5), torch.zeros(1, 4, 5), torch.ones(1, 4, dtype=torch.bool))


def test_multi_head_shapes_and_masked_keys():
    attention = MultiHeadCrossAttention(query_dim=12, key_dim=6, embed_dim=8, heads=2, out_dim=12)
    queries = torch.randn(3, 5, 12)
    tokens = torch.randn(3, 4, 6)
    mask = torch.tensor([[True] * 4, [True, True, False, False], [True, False, False, False]])

    out, weights = attention(queries, tokens, mask)

    assert out.shape == (3, 5, 12)
    assert weights.shape == (3, 2, 5, 4)
    assert torch.all(weights[1, :, :, 2:] == 0)
    assert torch.allclose(weights[2, :, :, 0], torch.ones(2, 5))

    # changing a padded token never changes the output
    altered = tokens.clone()
    altered[2, 1:] = 100.0
    out_altered, _ = attention(queries, altered, mask)
    assert torch.equal(out[2], out_altered[2])


def test_heads_must_divide_width():
    with pytest.raises(ShapeError):
        MultiHeadCrossAttention(4, 4, 6, heads=4)
