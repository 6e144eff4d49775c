# ladris/network/tokenizer.py

import re
from typing import Iterable, List, Optional, Sequence, Tuple

import torch

from ..exceptions import InvalidInputError
from ..models import MASK_TOKEN, UNKNOWN_CATEGORY_TOKEN

PAD_TOKEN = "[pad]"
OOV_TOKEN = "[unk]"
SPECIAL_TOKENS = (PAD_TOKEN, OOV_TOKEN, MASK_TOKEN, UNKNOWN_CATEGORY_TOKEN)

_TOKEN_PATTERN = re.compile(r"\[[a-z_]+\]|[a-z0-9]+")


def split_words(text: str) -> List[str]:
    """Lowercase and split on whitespace and punctuation, keeping bracketed special tokens whole."""
    return _TOKEN_PATTERN.findall(text.lower())


class Tokenizer:
    """Closed-vocabulary word tokenizer; id 0 is padding."""

    def __init__(self, tokens: Sequence[str]):
        if tuple(tokens[:len(SPECIAL_TOKENS)]) != SPECIAL_TOKENS:
            raise InvalidInputError(f"Token list must start with {SPECIAL_TOKENS}")
        self.tokens: Tuple[str, ...] = tuple(tokens)
        self._ids = {token: index for index, token in enumerate(self.tokens)}
        if len(self._ids) != len(self.tokens):
            raise InvalidInputError("Token list contains duplicates")

    @classmethod
    def from_texts(cls, texts: Iterable[str]) -> "Tokenizer":
        words = set()
        for text in texts:
            words.update(split_words(text))
        words.difference_update(SPECIAL_TOKENS)
        return cls(SPECIAL_TOKENS + tuple(sorted(words)))

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def pad_id(self) -> int:
        return 0

    def encode(self, text: str, max_tokens: Optional[int] = None) -> List[int]:
        words = split_words(text)
        if not words:
            raise InvalidInputError(f"Text has no tokens: {text!r}")
        ids = [self._ids.get(word, self._ids[OOV_TOKEN]) for word in words]
        return ids[:max_tokens] if max_tokens else ids

    def encode_batch(self, texts: Sequence[str], max_tokens: int) -> Tuple[torch.Tensor, torch.Tensor]:
        """Encode and right-pad a batch to its longest sequence.

        Returns:
            (ids (B, N) long, mask (B, N) bool)
        """
        encoded = [self.encode(text, max_tokens) for text in texts]
        length = max(len(ids) for ids in encoded)
        ids = torch.full((len(encoded), length), self.pad_id, dtype=torch.long)
        mask = torch.zeros((len(encoded), length), dtype=torch.bool)
        for row, sequence in enumerate(encoded):
            ids[row, :len(sequence)] = torch.tensor(sequence, dtype=torch.long)
            mask[row, :len(sequence)] = True
        return ids, mask
