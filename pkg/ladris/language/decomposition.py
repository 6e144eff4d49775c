# ladris/language/decomposition.py

import re
from typing import Optional, Tuple

from ..exceptions import InvalidInputError
from ..models import MASK_TOKEN, UNKNOWN_CATEGORY_TOKEN, CategoryVocabulary, LinguisticTriple

Span = Tuple[int, int]


def _form_pattern(form: str) -> "re.Pattern[str]":
    # word boundaries that also hold next to punctuation and brackets
    return re.compile(rf"(?<![a-z0-9]){re.escape(form)}(?![a-z0-9])")


def detect_category(
        expression: str,
        vocab: CategoryVocabulary
) -> Tuple[Optional[int], Optional[Span]]:
    """Find the category whose surface form occurs first in the expression.

    Matching is case-insensitive and respects word boundaries. When two
    categories match at the same position the one listed first in the
    vocabulary wins; within one category the longest form wins.

    Returns:
        (category_id, (start, end)) of the first occurrence, or (None, None)
    """
    if not expression or not expression.strip():
        raise InvalidInputError("Expression must be non-empty")

    lowered = expression.lower()
    best: Optional[Tuple[int, int, int, int]] = None  # (start, category_id, -length, end)

    for entry in vocab.entries:
        for form in entry.surface_forms:
            match = _form_pattern(form).search(lowered)
            if match is None:
                continue
            candidate = (match.start(), entry.category_id, -len(form), match.end())
            if best is None or candidate < best:
                best = candidate

    if best is None:
        return None, None
    start, category_id, _, end = best
    return category_id, (start, end)


def mask_category(expression: str, span: Span, mask_token: str = MASK_TOKEN) -> str:
    """Replace exactly the characters covered by span with the mask token."""
    start, end = span
    if not 0 <= start <= end <= len(expression):
        raise IndexError(f"Span {span} outside expression of length {len(expression)}")
    return expression[:start] + mask_token + expression[end:]


def decompose(
        expression: str,
        vocab: CategoryVocabulary,
        mask_token: str = MASK_TOKEN
) -> LinguisticTriple:
    """Split an expression into its global, class-level and descriptive components."""
    category_id, span = detect_category(expression, vocab)
    if category_id is None:
        return LinguisticTriple(
            global_text=expression,
            class_text=UNKNOWN_CATEGORY_TOKEN,
            descriptive_text=expression,
            category_id=None
        )

    return LinguisticTriple(
        global_text=expression,
        class_text=vocab.name_of(category_id),
        descriptive_text=mask_category(expression, span, mask_token),
        category_id=category_id,
        surface_text=expression[span[0]:span[1]]
    )
