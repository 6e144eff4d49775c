# ladris/models/language.py

from typing import FrozenSet, List, Optional, Tuple

from pydantic import BaseModel, Field, field_validator, model_validator

CATEGORY_NAMES: Tuple[str, ...] = (
    "people", "car", "motor", "bicycle", "tricycle", "truck", "bus", "boat"
)

MASK_TOKEN = "[masked]"
UNKNOWN_CATEGORY_TOKEN = "[unk_category]"


class CategoryEntry(BaseModel):
    """One category with the surface forms that refer to it."""
    category_id: int = Field(..., ge=0, description="Position of the category in the vocabulary")
    name: str = Field(..., description="Canonical category name")
    surface_forms: FrozenSet[str] = Field(..., min_length=1)

    @field_validator("surface_forms")
    @classmethod
    def validate_lowercase(cls, v: FrozenSet[str]) -> FrozenSet[str]:
        for form in v:
            if form != form.lower() or not form.strip():
                raise ValueError(f"Surface form must be lowercase and non-blank: {form!r}")
        return v

    model_config = {"frozen": True}


class CategoryVocabulary(BaseModel):
    """Ordered category vocabulary with disjoint surface forms."""
    entries: List[CategoryEntry]

    @model_validator(mode="after")
    def validate_entries(self) -> "CategoryVocabulary":
        names = tuple(entry.name for entry in self.entries)
        if names != CATEGORY_NAMES:
            raise ValueError(f"Vocabulary must list exactly {CATEGORY_NAMES} in order, got {names}")

        seen = {}
        for position, entry in enumerate(self.entries):
            if entry.category_id != position:
                raise ValueError(f"Category {entry.name} has id {entry.category_id}, expected {position}")
            for form in entry.surface_forms:
                if form in seen:
                    raise ValueError(f"Surface form {form!r} shared by {seen[form]} and {entry.name}")
                seen[form] = entry.name
        return self

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(entry.name for entry in self.entries)

    def name_of(self, category_id: int) -> str:
        return self.entries[category_id].name

    def id_of(self, name: str) -> int:
        for entry in self.entries:
            if entry.name == name:
                return entry.category_id
        raise KeyError(f"Unknown category: {name}")

    model_config = {"frozen": True}


class LinguisticTriple(BaseModel):
    """Global, class-level and descriptive views of one referring expression."""
    global_text: str = Field(..., description="The verbatim input expression (l)")
    class_text: str = Field(..., description="Canonical category name or the unknown-category token (c)")
    descriptive_text: str = Field(..., description="Expression with the category mention masked (d)")
    category_id: Optional[int] = None
    surface_text: Optional[str] = Field(
        default=None,
        description="Exact text the mask token replaced; differs from class_text for synonyms and plurals"
    )

    def reconstruct(self, mask_token: str = MASK_TOKEN) -> str:
        """Undo the masking using the replaced surface text."""
        if self.surface_text is None:
            return self.descriptive_text
        return self.descriptive_text.replace(mask_token, self.surface_text, 1)

    model_config = {"frozen": True}
