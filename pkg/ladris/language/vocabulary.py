# ladris/language/vocabulary.py

from pathlib import Path
from typing import Optional, Union

import logfire

from ..exceptions import InvalidConfigError
from ..models import CategoryEntry, CategoryVocabulary

DEFAULT_VOCABULARY_PATH = Path(__file__).parent / "categories.txt"


def parse_vocabulary(text: str) -> CategoryVocabulary:
    """Parse 'name: form, form, ...' lines into a validated vocabulary."""
    entries = []
    for line_number, raw_line in enumerate(text.splitlines(), 1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise InvalidConfigError(f"Vocabulary line {line_number} has no ':' separator: {raw_line!r}")

        name, forms = line.split(":", 1)
        name = name.strip().lower()
        surface_forms = {form.strip().lower() for form in forms.split(",") if form.strip()}
        surface_forms.add(name)
        entries.append(CategoryEntry(
            category_id=len(entries),
            name=name,
            surface_forms=frozenset(surface_forms)
        ))

    try:
        return CategoryVocabulary(entries=entries)
    except ValueError as e:
        raise InvalidConfigError(f"Invalid category vocabulary: {str(e)}")


def load_vocabulary(path: Optional[Union[str, Path]] = None) -> CategoryVocabulary:
    """Load the category vocabulary, defaulting to the packaged file."""
    vocab_path = Path(path) if path else DEFAULT_VOCABULARY_PATH
    try:
        text = vocab_path.read_text(encoding="utf-8")
    except OSError as e:
        raise InvalidConfigError(f"Cannot read vocabulary {vocab_path}: {str(e)}")

    vocabulary = parse_vocabulary(text)
    logfire.debug("Category vocabulary loaded",
                  path=str(vocab_path),
                  surface_forms=sum(len(e.surface_forms) for e in vocabulary.entries))
    return vocabulary
