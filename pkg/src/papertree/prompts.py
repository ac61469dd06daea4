"""Prompt templates with named slots for the summarizer backends.

The leaf template ships verbatim as a package resource; the section variant
differs only in wording around the content slot.  Slots are substituted by
literal replacement, never by format-string evaluation, so template text
may contain arbitrary braces-free prose.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from typing import TYPE_CHECKING

from .errors import MissingSlot

if TYPE_CHECKING:
    from .summarize import SummaryRequest

TEMPLATE_VERSION = "1"

_SLOT = re.compile(r"\{([a-z_][a-z0-9_.]*)\}")
_ABSTRACT_SLOTS = ("abstract",)
_CONTENT_SLOTS = ("node.content", "content")


@dataclass(frozen=True)
class PromptTemplate:
    name: str
    text: str

    def slots(self) -> set[str]:
        return set(_SLOT.findall(self.text))


def load_template(name: str) -> PromptTemplate:
    text = (
        resources.files(__package__)
        .joinpath(f"templates/{name}.txt")
        .read_text(encoding="utf-8")
    )
    return PromptTemplate(name=name, text=text)


def leaf_template() -> PromptTemplate:
    return load_template("leaf_prompt")


def section_template() -> PromptTemplate:
    return load_template("section_prompt")


def template_for_role(role: str) -> PromptTemplate:
    return leaf_template() if role == "leaf" else section_template()


def render_prompt(request: "SummaryRequest", template: PromptTemplate) -> str:
    """Substitute the abstract and content slots; other text is untouched."""
    slots = template.slots()
    abstract_slot = next((s for s in _ABSTRACT_SLOTS if s in slots), None)
    content_slot = next((s for s in _CONTENT_SLOTS if s in slots), None)
    if abstract_slot is None:
        raise MissingSlot(f"template {template.name!r} lacks an abstract slot")
    if content_slot is None:
        raise MissingSlot(f"template {template.name!r} lacks a content slot")
    rendered = template.text.replace("{" + abstract_slot + "}", request.abstract_text)
    rendered = rendered.replace("{" + content_slot + "}", request.content)
    return rendered
