# ladris/network/loss.py

import torch
import torch.nn.functional as F

from ..exceptions import ShapeError

DICE_SMOOTH = 1.0
PREDICTION_THRESHOLD = 0.5


def _check_shapes(logits: torch.Tensor, gt: torch.Tensor) -> None:
    if logits.dim() != 4 or logits.shape[1] != 1 or logits.shape[0:1] + logits.shape[2:] != gt.shape:
        raise ShapeError(f"Logits {tuple(logits.shape)} do not match ground truth {tuple(gt.shape)}")


def bce_loss(logits: torch.Tensor, gt: torch.Tensor) -> torch.Tensor:
    """Mean per-pixel binary cross-entropy."""
    _check_shapes(logits, gt)
    return F.binary_cross_entropy_with_logits(logits.squeeze(1), gt.to(logits.dtype))


def dice_loss(probs: torch.Tensor, gt: torch.Tensor, smooth: float = DICE_SMOOTH) -> torch.Tensor:
    """Soft Dice loss averaged over samples; probs and gt are (B, H, W)."""
    if probs.shape != gt.shape:
        raise ShapeError(f"Probabilities {tuple(probs.shape)} do not match ground truth {tuple(gt.shape)}")
    gt = gt.to(probs.dtype)
    intersection = (probs * gt).flatten(1).sum(dim=1)
    total = probs.flatten(1).sum(dim=1) + gt.flatten(1).sum(dim=1)
    return (1 - (2 * intersection + smooth) / (total + smooth)).mean()


def segmentation_loss(logits: torch.Tensor, gt: torch.Tensor) -> torch.Tensor:
    """BCE + Dice with equal weights."""
    _check_shapes(logits, gt)
    return bce_loss(logits, gt) + dice_loss(torch.sigmoid(logits.squeeze(1)), gt)


def binarize(logits: torch.Tensor) -> torch.Tensor:
    """(B, 1, H, W) logits -> (B, H, W) boolean masks."""
    return torch.sigmoid(logits.squeeze(1)) > PREDICTION_THRESHOLD
