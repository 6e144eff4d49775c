# ladris/dataset/splits.py

from typing import Dict, Sequence

import numpy as np

from ..exceptions import InvalidInputError
from ..models import Split


def split_sizes(n: int) -> Dict[Split, int]:
    """7:1:2 with floor for train and val; test takes the remainder."""
    n_train = n * 7 // 10
    n_val = n // 10
    return {Split.TRAIN: n_train, Split.VAL: n_val, Split.TEST: n - n_train - n_val}


def split_dataset(sample_ids: Sequence[str], seed: int) -> Dict[str, Split]:
    """Seeded shuffle, then train, val and test in shuffle order."""
    if not sample_ids:
        raise InvalidInputError("Cannot split an empty id list")
    if len(set(sample_ids)) != len(sample_ids):
        raise InvalidInputError("Sample ids must be unique")

    order = np.random.default_rng(seed).permutation(len(sample_ids))
    sizes = split_sizes(len(sample_ids))
    boundaries = {
        Split.TRAIN: sizes[Split.TRAIN],
        Split.VAL: sizes[Split.TRAIN] + sizes[Split.VAL],
    }

    assignment = {}
    for rank, index in enumerate(order):
        if rank < boundaries[Split.TRAIN]:
            split = Split.TRAIN
        elif rank < boundaries[Split.VAL]:
            split = Split.VAL
        else:
            split = Split.TEST
        assignment[sample_ids[int(index)]] = split
    return assignment
