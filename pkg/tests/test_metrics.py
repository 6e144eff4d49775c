import numpy as np
import pytest
from pydantic import ValidationError

from ladris.exceptions import InvalidInputError, ShapeError
from ladris.metrics import MetricsAccumulator, compute_report, iou, render_text_table
from ladris.models import MetricsReport


def _mask(pixels, shape=(4, 4)):
    mask = np.zeros(shape, dtype=bool)
    for r, c in pixels:
        mask[r, c] = True
    return mask


def test_hand_case_oiou_and_miou():
    # IoU 3/4 and 1/2: oIoU = 4/6, mIoU = 0.625
    pred_a = _mask([(0, 0), (0, 1), (0, 2), (0, 3)])
    gt_a = _mask([(0, 0), (0, 1), (0, 2)])
    pred_b = _mask([(1, 0), (1, 1)])
    gt_b = _mask([(1, 0)])

    report = compute_report([(pred_a, gt_a), (pred_b, gt_b)])

    assert report.oiou == pytest.approx(4 / 6)
    assert report.miou == pytest.approx(0.625)
    assert report.per_sample_iou == pytest.approx([0.75, 0.5])


def test_precision_uses_strictly_greater():
    # IoUs 1.0, 0.6 and 0.5
    pairs = [
        (_mask([(0, 0)]), _mask([(0, 0)])),
        (_mask([(0, 0), (0, 1), (0, 2)]), _mask([(0, 0), (0, 1), (0, 2), (1, 0), (1, 1)])),
        (_mask([(0, 0), (0, 1)]), _mask([(0, 0)])),
    ]
    report = compute_report(pairs)
    assert report.precision(0.5) == pytest.approx(2 / 3)
    assert report.precision(0.9) == pytest.approx(1 / 3)


def test_empty_prediction_and_gt_count_as_perfect():
    empty = np.zeros((3, 3), dtype=bool)
    assert iou(empty, empty) == 1.0
    report = compute_report([(empty, empty)])
    assert report.oiou == 1.0 and report.miou == 1.0


def test_random_pairs_match_pixel_counting():
    rng = np.random.default_rng(42)
    pairs = [(rng.random((8, 8)) > 0.5, rng.random((8, 8)) > 0.6) for _ in range(100)]

    total_i = total_u = 0
    ious = []
    for pred, gt in pairs:
        inter = union = 0
        for r in range(8):
            for c in range(8):
                inter += int(pred[r, c] and gt[r, c])
                union += int(pred[r, c] or gt[r, c])
        total_i += inter
        total_u += union
        ious.append(1.0 if union == 0 else inter / union)

    report = compute_report(pairs)
    assert report.oiou == total_i / total_u
    assert report.miou == pytest.approx(sum(ious) / len(ious), abs=1e-12)
    for t in (0.5, 0.6, 0.7, 0.8, 0.9):
        assert report.precision(t) == sum(v > t for v in ious) / len(ious)
    values = [report.precision(t) for t in (0.5, 0.6, 0.7, 0.8, 0.9)]
    assert values == sorted(values, reverse=True)


def test_accumulator_merge_matches_single_pass():
    rng = np.random.default_rng(1)
    pairs = [(rng.random((5, 5)) > 0.5, rng.random((5, 5)) > 0.5) for _ in range(10)]
    left, right = MetricsAccumulator(), MetricsAccumulator()
    for pred, gt in pairs[:4]:
        left.add(pred, gt)
    for pred, gt in pairs[4:]:
        right.add(pred, gt)
    assert left.merge(right).report() == compute_report(pairs)


def test_errors():
    with pytest.raises(InvalidInputError):
        MetricsAccumulator().report()
    with pytest.raises(ShapeError):
        iou(np.zeros((2, 2)), np.zeros((3, 3)))


def test_report_rejects_increasing_precision():
    with pytest.raises(ValidationError):
        MetricsReport(
            p_at={"0.5": 0.2, "0.6": 0.4, "0.7": 0.1, "0.8": 0.0, "0.9": 0.0},
            oiou=0.5, miou=0.5, n_samples=4
        )


def test_text_table_layout():
    report = compute_report([(_mask([(0, 0)]), _mask([(0, 0)]))])
    table = render_text_table({"val": report, "test": report})
    lines = table.splitlines()
    assert lines[0].split() == ["Split", "P@0.5", "P@0.6", "P@0.7", "P@0.8", "P@0.9", "oIoU", "mIoU", "N"]
    assert lines[2].split() == ["val"] + ["100.00"] * 7 + ["1"]
    assert len(lines) == 4
