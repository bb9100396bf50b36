import pytest

from polymind.errors import ArityError
from polymind.tasks import (
    CONSTRAINT_SUFFIXES,
    CONSTRAINTS,
    Initiative,
    InputType,
    OutputType,
    TaskSpec,
    defaults,
    pick_color,
    render_prompt,
    validate,
)

# The six built-in microtasks, restated here in full as the golden reference
# rather than round-tripped through the implementation.
GOLDEN = [
    ("Brainstorm", "keyword", "keyword", [
        ("Find Related", "Brainstorm keywords related to [placeholder]."),
        ("Find Synonym", "Find synonyms for [placeholder]."),
    ]),
    ("Summarise", "sticky_note", "sticky_note", [
        ("TLDR", "Provide a TLDR version of the following:\n[placeholder]"),
        ("Top 3 keywords", "Summarise top 3 keywords of the following:\n[placeholder]"),
    ]),
    ("Elaborate", "concept", "concept", [
        ("Provide Examples", "What are examples of [placeholder]."),
        ("Clarification", "Provide a simple explanation of [placeholder]."),
    ]),
    ("Draft", "section", "sticky_note", [
        ("Abstract", "[placeholder]\n\nWrite an abstract of the above outline."),
        ("Overview", "[placeholder].\n\nWrite an overview of the above outline."),
    ]),
    ("Freewrite", "sticky_note", "sticky_note", [
        ("Co-creation", "[placeholder].\n Continue to write."),
    ]),
    ("Associate", "nodes", "keyword", [
        ("Find Relationship",
         "Clarify the relationship between [placeholder] and [placeholder] in simple words."),
    ]),
]


def test_defaults_match_golden_table():
    specs = defaults()
    assert len(specs) == 6
    got = [
        (s.name, s.input_type.value, s.output_type.value,
         [(p.label, p.template) for p in s.prompts])
        for s in specs
    ]
    assert got == GOLDEN


def test_defaults_all_proactive_visible_first_prompt_active():
    for spec in defaults():
        assert spec.initiative == Initiative.PROACTIVE
        assert spec.visible is True
        assert spec.active_prompt == 0


def test_defaults_are_byte_stable_and_distinctly_colored():
    a = [s.to_dict() for s in defaults()]
    b = [s.to_dict() for s in defaults()]
    assert a == b
    colors = [s.color for s in defaults()]
    assert len(set(colors)) == 6


def test_defaults_pass_validation():
    specs = defaults()
    for spec in specs:
        others = [s for s in specs if s.id != spec.id]
        assert validate(spec, others) == []


def test_associate_needs_two_placeholders():
    associate = defaults()[5]
    assert associate.input_type == InputType.NODES
    assert associate.active_template().template.count("[placeholder]") == 2


def test_validate_rejects_empty_name():
    spec = defaults()[0].copy()
    spec.name = ""
    assert any("name" in v for v in validate(spec, []))


def test_validate_rejects_wrong_placeholder_arity():
    spec = defaults()[5].copy()  # nodes input
    spec.prompts[0].template = "Only one [placeholder] here."
    violations = validate(spec, [])
    assert any("placeholder" in v for v in violations)


def test_validate_rejects_out_of_range_active_prompt():
    spec = defaults()[0].copy()
    spec.active_prompt = 5
    assert validate(spec, []) != []


def test_validate_rejects_color_collision():
    first, second = defaults()[0], defaults()[1].copy()
    second.color = first.color
    assert any("color" in v for v in validate(second, [first]))
    # but a spec never collides with itself
    assert validate(first, defaults()) == []


def test_pick_color_skips_used_hues():
    specs = defaults()
    color = pick_color(specs)
    assert color not in {s.color for s in specs}


def test_render_prompt_appends_keyword_suffix():
    rendered = render_prompt(defaults()[0], ["endless roads"])
    assert rendered == (
        "Brainstorm keywords related to endless roads."
        + CONSTRAINT_SUFFIXES[OutputType.KEYWORD]
    )
    assert "[placeholder]" not in rendered


def test_render_prompt_substitutes_positionally():
    rendered = render_prompt(defaults()[5], ["parallel collaboration", "creative writing"])
    assert "between parallel collaboration and creative writing" in rendered
    assert rendered.endswith(CONSTRAINT_SUFFIXES[OutputType.KEYWORD])


def test_render_prompt_arity_error():
    with pytest.raises(ArityError):
        render_prompt(defaults()[0], [])
    with pytest.raises(ArityError):
        render_prompt(defaults()[5], ["only one"])


def test_constraint_suffix_strings():
    assert CONSTRAINT_SUFFIXES[OutputType.KEYWORD] == (
        "\nReturn exactly 3 results, each no more than 3 words, as a numbered list."
    )
    assert CONSTRAINT_SUFFIXES[OutputType.CONCEPT] == (
        "\nReturn exactly 3 results, each no more than 5 words, as a numbered list."
    )
    assert CONSTRAINT_SUFFIXES[OutputType.STICKY_NOTE] == (
        "\nReturn 1 result of no more than 150 words."
    )


def test_constraints_table():
    assert (CONSTRAINTS[OutputType.KEYWORD].count,
            CONSTRAINTS[OutputType.KEYWORD].max_words) == (3, 3)
    assert (CONSTRAINTS[OutputType.CONCEPT].count,
            CONSTRAINTS[OutputType.CONCEPT].max_words) == (3, 5)
    assert (CONSTRAINTS[OutputType.STICKY_NOTE].count,
            CONSTRAINTS[OutputType.STICKY_NOTE].max_words) == (1, 150)


def test_taskspec_roundtrip():
    for spec in defaults():
        assert TaskSpec.from_dict(spec.to_dict()) == spec
