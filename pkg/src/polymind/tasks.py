"""Microtask specifications: the six built-in tasks, validation, and prompt rendering.

A microtask maps one diagram input type to one output type through a prompt
template. Templates carry literal "[placeholder]" markers that are substituted
with node text (or a section outline) at dispatch time; the output-constraint
suffix is appended at render time so the stored template stays exactly what the
user sees on the task card.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable

from .errors import ArityError

PLACEHOLDER = "[placeholder]"


class InputType(str, Enum):
    KEYWORD = "keyword"
    CONCEPT = "concept"
    STICKY_NOTE = "sticky_note"
    SECTION = "section"
    NODES = "nodes"  # a sampled primitive node plus one nearby node


class OutputType(str, Enum):
    KEYWORD = "keyword"
    CONCEPT = "concept"
    STICKY_NOTE = "sticky_note"


class Initiative(str, Enum):
    PROACTIVE = "proactive"
    REACTIVE = "reactive"


@dataclass(frozen=True)
class GenerationConstraints:
    count: int
    max_words: int


CONSTRAINTS: dict[OutputType, GenerationConstraints] = {
    OutputType.KEYWORD: GenerationConstraints(count=3, max_words=3),
    OutputType.CONCEPT: GenerationConstraints(count=3, max_words=5),
    OutputType.STICKY_NOTE: GenerationConstraints(count=1, max_words=150),
}

# Appended to rendered prompts; never shown on task cards.
CONSTRAINT_SUFFIXES: dict[OutputType, str] = {
    OutputType.KEYWORD: "\nReturn exactly 3 results, each no more than 3 words, as a numbered list.",
    OutputType.CONCEPT: "\nReturn exactly 3 results, each no more than 5 words, as a numbered list.",
    OutputType.STICKY_NOTE: "\nReturn 1 result of no more than 150 words.",
}

# Fixed palette; tasks are assigned the first hue not already in use.
COLOR_PALETTE = [
    "#e6194b", "#3cb44b", "#ffe119", "#4363d8", "#f58231", "#911eb4",
    "#46f0f0", "#f032e6", "#bcf60c", "#008080", "#9a6324", "#800000",
]


@dataclass
class PromptTemplate:
    label: str
    template: str

    def placeholder_count(self) -> int:
        return self.template.count(PLACEHOLDER)

    def to_dict(self) -> dict:
        return {"label": self.label, "template": self.template}

    @classmethod
    def from_dict(cls, d: dict) -> "PromptTemplate":
        return cls(label=d["label"], template=d["template"])


@dataclass
class TaskSpec:
    id: str
    name: str
    color: str
    input_type: InputType
    output_type: OutputType
    prompts: list[PromptTemplate]
    active_prompt: int = 0
    initiative: Initiative = Initiative.PROACTIVE
    visible: bool = True

    def active_template(self) -> PromptTemplate:
        return self.prompts[self.active_prompt]

    def required_placeholders(self) -> int:
        return 2 if self.input_type == InputType.NODES else 1

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "color": self.color,
            "input_type": self.input_type.value,
            "output_type": self.output_type.value,
            "prompts": [p.to_dict() for p in self.prompts],
            "active_prompt": self.active_prompt,
            "initiative": self.initiative.value,
            "visible": self.visible,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TaskSpec":
        return cls(
            id=d["id"],
            name=d["name"],
            color=d["color"],
            input_type=InputType(d["input_type"]),
            output_type=OutputType(d["output_type"]),
            prompts=[PromptTemplate.from_dict(p) for p in d["prompts"]],
            active_prompt=d["active_prompt"],
            initiative=Initiative(d["initiative"]),
            visible=d["visible"],
        )

    def copy(self) -> "TaskSpec":
        return replace(self, prompts=[replace(p) for p in self.prompts])


def defaults() -> list[TaskSpec]:
    """The six built-in microtasks, byte-stable across calls."""
    mk = PromptTemplate
    return [
        TaskSpec(
            id="t1", name="Brainstorm", color=COLOR_PALETTE[0],
            input_type=InputType.KEYWORD, output_type=OutputType.KEYWORD,
            prompts=[
                mk("Find Related", "Brainstorm keywords related to [placeholder]."),
                mk("Find Synonym", "Find synonyms for [placeholder]."),
            ],
        ),
        TaskSpec(
            id="t2", name="Summarise", color=COLOR_PALETTE[1],
            input_type=InputType.STICKY_NOTE, output_type=OutputType.STICKY_NOTE,
            prompts=[
                mk("TLDR", "Provide a TLDR version of the following:\n[placeholder]"),
                mk("Top 3 keywords", "Summarise top 3 keywords of the following:\n[placeholder]"),
            ],
        ),
        TaskSpec(
            id="t3", name="Elaborate", color=COLOR_PALETTE[2],
            input_type=InputType.CONCEPT, output_type=OutputType.CONCEPT,
            prompts=[
                mk("Provide Examples", "What are examples of [placeholder]."),
                mk("Clarification", "Provide a simple explanation of [placeholder]."),
            ],
        ),
        TaskSpec(
            id="t4", name="Draft", color=COLOR_PALETTE[3],
            input_type=InputType.SECTION, output_type=OutputType.STICKY_NOTE,
            prompts=[
                mk("Abstract", "[placeholder]\n\nWrite an abstract of the above outline."),
                mk("Overview", "[placeholder].\n\nWrite an overview of the above outline."),
            ],
        ),
        TaskSpec(
            id="t5", name="Freewrite", color=COLOR_PALETTE[4],
            input_type=InputType.STICKY_NOTE, output_type=OutputType.STICKY_NOTE,
            prompts=[
                mk("Co-creation", "[placeholder].\n Continue to write."),
            ],
        ),
        TaskSpec(
            id="t6", name="Associate", color=COLOR_PALETTE[5],
            input_type=InputType.NODES, output_type=OutputType.KEYWORD,
            prompts=[
                mk("Find Relationship",
                   "Clarify the relationship between [placeholder] and [placeholder] in simple words."),
            ],
        ),
    ]


def validate(spec: TaskSpec, existing: Iterable[TaskSpec] = ()) -> list[str]:
    """Check a spec; returns a list of violations (empty means ok). Never raises."""
    violations: list[str] = []
    if not spec.name.strip():
        violations.append("name must be non-empty")
    if not spec.prompts:
        violations.append("at least one prompt is required")
    if not (0 <= spec.active_prompt < max(len(spec.prompts), 1)):
        violations.append("active_prompt out of range")
    want = spec.required_placeholders()
    for prompt in spec.prompts:
        got = prompt.placeholder_count()
        if got != want:
            violations.append(
                f"prompt '{prompt.label}' has {got} placeholder(s); "
                f"input type {spec.input_type.value} requires {want}"
            )
    for other in existing:
        if other.id != spec.id and other.color == spec.color:
            violations.append(f"color {spec.color} already used by task '{other.name}'")
    return violations


def pick_color(existing: Iterable[TaskSpec]) -> str:
    used = {t.color for t in existing}
    for color in COLOR_PALETTE:
        if color not in used:
            return color
    # Palette exhausted: derive a deterministic fallback hue.
    return f"#{(len(used) * 2654435761) % 0xFFFFFF:06x}"


def render_prompt(spec: TaskSpec, texts: list[str]) -> str:
    """Substitute placeholders left to right, then append the output-constraint suffix."""
    template = spec.active_template().template
    want = template.count(PLACEHOLDER)
    if len(texts) != want:
        raise ArityError(f"prompt expects {want} text(s), got {len(texts)}")
    parts = template.split(PLACEHOLDER)
    rendered = parts[0]
    for text, tail in zip(texts, parts[1:]):
        rendered += text + tail
    return rendered + CONSTRAINT_SUFFIXES[spec.output_type]
