"""Cursor-based attention sampling.

Elements near the cursor are cheap to reach and presumably already in focus;
elements far away are where proactive suggestions earn their keep. We weight
each candidate by its Fitts-style index of difficulty from the current cursor
position and sample proportionally to it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from random import Random

from .errors import InvalidOperationError
from .model import Document
from .tasks import InputType

DEFAULT_TICK_SECONDS = 5.0

#: Input types sampled from the primitive node pool rather than sections.
_PRIMITIVE_TYPES = (InputType.KEYWORD, InputType.CONCEPT, InputType.STICKY_NOTE)


@dataclass(frozen=True)
class SamplerConfig:
    tick_seconds: float = DEFAULT_TICK_SECONDS


@dataclass(frozen=True)
class AttentionScore:
    element_id: str
    id_value: float
    distance: float
    width: float


def _score(cursor: tuple[float, float], center: tuple[float, float],
           width: float, element_id: str) -> AttentionScore:
    distance = math.hypot(center[0] - cursor[0], center[1] - cursor[1])
    # Clamp the effective distance to half the width so the log argument
    # never drops below 1: a target under the cursor has difficulty 0.
    effective = max(distance, width / 2)
    id_value = math.log2(2 * effective / width)
    return AttentionScore(element_id=element_id, id_value=id_value,
                          distance=distance, width=width)


def index_of_difficulty(doc: Document, element_id: str) -> AttentionScore:
    """Fitts index of difficulty of one node or section from the cursor."""
    if element_id in doc.sections:
        section = doc.sections[element_id]
        return _score(doc.cursor, section.center(), section.width, element_id)
    node = doc.node(element_id)
    return _score(doc.cursor, node.center(), node.width, element_id)


def _pick(scores: list[AttentionScore], rng: Random) -> str | None:
    if not scores:
        return None
    total = sum(s.id_value for s in scores)
    if total <= 0:
        # Every candidate sits under the cursor; fall back to uniform.
        return scores[rng.randrange(len(scores))].element_id
    r = rng.random() * total
    acc = 0.0
    for score in scores:
        acc += score.id_value
        if r < acc:
            return score.element_id
    return scores[-1].element_id


def sample(doc: Document, input_type: InputType, rng: Random) -> str | None:
    """Draw one element of the given input type, weighted by difficulty.

    Returns None when nothing qualifies. Unaccepted generated nodes are not
    candidates: suggestions never chain off other pending suggestions.
    """
    if input_type == InputType.SECTION:
        scores = [_score(doc.cursor, s.center(), s.width, s.id)
                  for s in doc.sections.values()]
        return _pick(scores, rng)
    if input_type not in _PRIMITIVE_TYPES:
        raise InvalidOperationError(f"cannot sample input type: {input_type.value}")
    scores = [
        _score(doc.cursor, n.center(), n.width, n.id)
        for n in doc.nodes.values()
        if n.kind.value == input_type.value and not n.is_pending_generated
    ]
    return _pick(scores, rng)


def sample_primitive(doc: Document, rng: Random) -> str | None:
    """Draw one primitive node of any kind; used for pair-input microtasks."""
    scores = [
        _score(doc.cursor, n.center(), n.width, n.id)
        for n in doc.nodes.values()
        if not n.is_pending_generated
    ]
    return _pick(scores, rng)
