import math

import pytest
import torch
import torch.nn as nn
from torch.autograd import gradcheck

from ladris.exceptions import InvalidConfigError, ShapeError
from ladris.network import AdaptiveReasoningFusion, LinguisticEmbedding, MultiScaleFeatures
from ladris.network.arfm import (
    ChannelFusion, PyramidAligner, ScaleReasoningGate, align_pyramid, arfm_forward, scale_reasoning_gate
)

CHANNELS = (4, 6, 6, 8)


def _pyramid(batch: int = 1, dtype=torch.float32, size: int = 8) -> MultiScaleFeatures:
    return MultiScaleFeatures(stages=tuple(
        torch.randn(batch, c, size // 2 ** i, size // 2 ** i, dtype=dtype) for i, c in enumerate(CHANNELS)
    ))


def _embedding(batch: int, length: int, dim: int, dtype=torch.float32) -> LinguisticEmbedding:
    return LinguisticEmbedding.from_sequence(
        torch.randn(batch, length, dim, dtype=dtype), torch.ones(batch, length, dtype=torch.bool)
    )


def test_srg_with_zero_projection_is_uniform():
    srg = ScaleReasoningGate(8)
    nn.init.zeros_(srg.expand.weight)
    nn.init.zeros_(srg.expand.bias)
    weights = srg(torch.randn(2, 8, 3, 3))
    assert torch.allclose(weights, torch.full((2, 3), 1 / 3))


def test_srg_hand_logits():
    srg = ScaleReasoningGate(8)
    nn.init.zeros_(srg.expand.weight)
    with torch.no_grad():
        srg.expand.bias.copy_(torch.tensor([math.log(2.0), 0.0, 0.0]))
    weights = srg(torch.randn(1, 8, 2, 2))
    assert weights[0].tolist() == pytest.approx([0.5, 0.25, 0.25], abs=1e-6)


def test_srg_random_triples_are_positive_and_normalized():
    srg = ScaleReasoningGate(8)
    weights = srg(torch.randn(1000, 8, 2, 2) * 3)
    assert torch.all(weights > 0)
    assert torch.allclose(weights.sum(dim=-1), torch.ones(1000), atol=1e-6)


def test_srg_disabled_branches_get_zero():
    srg = ScaleReasoningGate(8)
    weights = srg(torch.randn(4, 8, 2, 2), branch_mask=(True, False, True))
    assert torch.all(weights[:, 1] == 0)
    assert torch.allclose(weights.sum(dim=-1), torch.ones(4), atol=1e-6)
    with pytest.raises(InvalidConfigError):
        srg(torch.randn(1, 8, 2, 2), branch_mask=(False, False, False))


def test_aligner_pools_window_means():
    aligner = PyramidAligner(CHANNELS, 8)
    pyramid = _pyramid()
    aligned = align_pyramid(pyramid, (2, 2), aligner)

    finest = pyramid[0]
    expected = finest.reshape(1, 4, 2, 4, 2, 4).mean(dim=(3, 5))
    assert torch.allclose(aligned.pooled[0], expected, atol=1e-6)
    assert torch.allclose(aligned.merged, sum(aligned.scales), atol=1e-6)
    assert all(scale.shape == (1, 8, 2, 2) for scale in aligned.scales)


def test_aligner_rejects_targets_above_the_finest_scale():
    with pytest.raises(InvalidConfigError):
        PyramidAligner(CHANNELS, 8)(_pyramid(), (16, 16))


def test_fusion_is_symmetric_in_branch_order():
    fusion = ChannelFusion(4)
    a, b, c = (torch.randn(2, 5, 4) for _ in range(3))
    weights = torch.tensor([[0.2, 0.3, 0.5], [0.6, 0.3, 0.1]])
    out = fusion(a, b, c, weights)

    # permuting the branches together with the projection blocks gives the same result
    permuted = ChannelFusion(4)
    with torch.no_grad():
        blocks = fusion.projection.weight.split(4, dim=1)
        permuted.projection.weight.copy_(torch.cat((blocks[2], blocks[0], blocks[1]), dim=1))
        permuted.projection.bias.copy_(fusion.projection.bias)
    out_permuted = permuted(c, a, b, weights[:, [2, 0, 1]])
    assert torch.allclose(out, out_permuted, atol=1e-6)


def test_fusion_rejects_mismatched_branches():
    with pytest.raises(ShapeError):
        ChannelFusion(4)(torch.zeros(1, 2, 4), torch.zeros(1, 3, 4), torch.zeros(1, 2, 4), torch.ones(1, 3) / 3)


def test_zeroed_fusion_reduces_to_scale_gate_of_merged_pyramid():
    module = AdaptiveReasoningFusion(CHANNELS, text_dim=5, heads=2)
    nn.init.zeros_(module.fusion.projection.weight)
    nn.init.zeros_(module.fusion.projection.bias)
    nn.init.zeros_(module.feed_forward.net[2].weight)
    nn.init.zeros_(module.feed_forward.net[2].bias)
    pyramid = _pyramid(batch=2)
    l, d, c = (_embedding(2, 3, 5) for _ in range(3))

    fused = arfm_forward(pyramid, l, d, c, module)

    assert torch.equal(fused.fused, fused.aligned.merged)
    expected = module.scale_gate(fused.aligned.merged, pyramid)
    for a, b in zip(fused.scales, expected):
        assert torch.equal(a, b)


def test_scale_gate_formula():
    module = AdaptiveReasoningFusion(CHANNELS, text_dim=5, heads=2)
    pyramid = _pyramid()
    fused = torch.randn(1, 8, 1, 1)
    out = module.scale_gate(fused, pyramid)
    for stage, projection, result in zip(pyramid, module.scale_gate.projections, out):
        p = projection(fused.expand(-1, -1, *stage.shape[-2:]))
        assert torch.allclose(result, stage + torch.sigmoid(p) * p, atol=1e-6)


def test_disabled_branch_does_not_affect_the_output():
    module = AdaptiveReasoningFusion(CHANNELS, text_dim=5, heads=2)
    pyramid = _pyramid()
    l, c = _embedding(1, 3, 5), _embedding(1, 2, 5)
    first = module(pyramid, l, _embedding(1, 4, 5), c, branch_mask=(True, False, True))
    second = module(pyramid, l, _embedding(1, 4, 5), c, branch_mask=(True, False, True))
    assert torch.equal(first.fused, second.fused)
    assert first.srg_weights[0, 1].item() == 0.0


def test_srg_split_helper():
    module = AdaptiveReasoningFusion(CHANNELS, text_dim=5, heads=2)
    aligned = module.aligner(_pyramid(batch=3), (1, 1))
    w_l, w_d, w_c = scale_reasoning_gate(aligned, module.srg)
    assert torch.allclose(w_l + w_d + w_c, torch.ones(3), atol=1e-6)


def test_arfm_gradients_match_finite_differences():
    torch.manual_seed(4)
    module = AdaptiveReasoningFusion(CHANNELS, text_dim=3, heads=2).double()
    pyramid = _pyramid(dtype=torch.float64)
    stages = [stage.clone().requires_grad_(True) for stage in pyramid]
    l_seq, d_seq, c_seq = (torch.randn(1, 2, 3, dtype=torch.float64, requires_grad=True) for _ in range(3))
    mask = torch.ones(1, 2, dtype=torch.bool)

    def run(s0, s3, l_seq, d_seq, c_seq):
        features = MultiScaleFeatures(stages=(s0, stages[1].detach(), stages[2].detach(), s3))
        fused = arfm_forward(
            features,
            LinguisticEmbedding.from_sequence(l_seq, mask),
            LinguisticEmbedding.from_sequence(d_seq, mask),
            LinguisticEmbedding.from_sequence(c_seq, mask),
            module
        )
        return fused.fused, fused.scales[0]

    assert gradcheck(run, (stages[0], stages[3], l_seq, d_seq, c_seq), eps=1e-6, atol=1e-5, rtol=1e-3)
