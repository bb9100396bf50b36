"""Diagram document model.

A CanvasDocument holds nodes, edges, sections, microtask specs, per
(element, task) lifecycle state, the cursor, and an append-only event log.
Every mutation goes through exactly one Event: command methods validate,
build the event, apply it through the reducer, and append it to the log.
Folding the reducer over a log therefore reconstructs the document exactly,
which persistence, the simulation harness, and the wire protocol all rely on.

Positions are canvas pixels; a node's position is its top-left corner and
membership/distance computations use the center point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from random import Random
from typing import Callable, Iterable

from .errors import (
    DuplicateEdgeError,
    InvalidOperationError,
    UnknownIdError,
    ValidationError,
)
from .llm import Turn
from .tasks import Initiative, TaskSpec, validate as validate_task

SCHEMA_VERSION = 1


class NodeKind(str, Enum):
    KEYWORD = "keyword"
    CONCEPT = "concept"
    STICKY_NOTE = "sticky_note"


# Default canvas footprint for newly materialized nodes, per kind.
DEFAULT_SIZES: dict[NodeKind, tuple[float, float]] = {
    NodeKind.KEYWORD: (100.0, 28.0),
    NodeKind.CONCEPT: (140.0, 70.0),
    NodeKind.STICKY_NOTE: (180.0, 140.0),
}


@dataclass
class Origin:
    source: str  # "user" | "generated"
    task_id: str | None = None
    accepted: bool = False
    dialogue: list[Turn] = field(default_factory=list)

    @classmethod
    def user(cls) -> "Origin":
        return cls(source="user")

    @classmethod
    def generated(cls, task_id: str, dialogue: list[Turn], accepted: bool = False) -> "Origin":
        return cls(source="generated", task_id=task_id, accepted=accepted, dialogue=dialogue)

    @property
    def is_generated(self) -> bool:
        return self.source == "generated"

    def to_dict(self) -> dict:
        if not self.is_generated:
            return {"source": "user"}
        return {
            "source": "generated",
            "task_id": self.task_id,
            "accepted": self.accepted,
            "dialogue": [t.to_dict() for t in self.dialogue],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Origin":
        if d["source"] == "user":
            return cls.user()
        return cls(
            source="generated",
            task_id=d["task_id"],
            accepted=d["accepted"],
            dialogue=[Turn.from_dict(t) for t in d["dialogue"]],
        )


@dataclass
class DiagramNode:
    id: str
    kind: NodeKind
    text: str
    x: float
    y: float
    width: float
    height: float
    origin: Origin

    def center(self) -> tuple[float, float]:
        return (self.x + self.width / 2, self.y + self.height / 2)

    @property
    def is_pending_generated(self) -> bool:
        return self.origin.is_generated and not self.origin.accepted

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind.value,
            "text": self.text,
            "x": self.x,
            "y": self.y,
            "width": self.width,
            "height": self.height,
            "origin": self.origin.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DiagramNode":
        return cls(
            id=d["id"],
            kind=NodeKind(d["kind"]),
            text=d["text"],
            x=d["x"],
            y=d["y"],
            width=d["width"],
            height=d["height"],
            origin=Origin.from_dict(d["origin"]),
        )


@dataclass
class Edge:
    id: str
    from_id: str
    to_id: str
    directed: bool

    def to_dict(self) -> dict:
        return {"id": self.id, "from": self.from_id, "to": self.to_id, "directed": self.directed}

    @classmethod
    def from_dict(cls, d: dict) -> "Edge":
        return cls(id=d["id"], from_id=d["from"], to_id=d["to"], directed=d["directed"])


@dataclass
class Section:
    id: str
    title: str
    x: float
    y: float
    width: float
    height: float

    def center(self) -> tuple[float, float]:
        return (self.x + self.width / 2, self.y + self.height / 2)

    def contains_center(self, point: tuple[float, float]) -> bool:
        # Strict interior: a center exactly on the border is not a member.
        px, py = point
        return self.x < px < self.x + self.width and self.y < py < self.y + self.height

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "title": self.title,
            "x": self.x,
            "y": self.y,
            "width": self.width,
            "height": self.height,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Section":
        return cls(
            id=d["id"], title=d["title"], x=d["x"], y=d["y"],
            width=d["width"], height=d["height"],
        )


class Phase(str, Enum):
    IDLE = "idle"
    IN_FLIGHT = "in_flight"
    CURTAIN = "curtain"
    UNREAD = "unread"
    DISPLAY = "display"


@dataclass
class Candidate:
    kind: str
    text: str

    def to_dict(self) -> dict:
        return {"kind": self.kind, "text": self.text}

    @classmethod
    def from_dict(cls, d: dict) -> "Candidate":
        return cls(kind=d["kind"], text=d["text"])


@dataclass
class GenerationResult:
    candidates: list[Candidate]
    key_point: str
    summary: str
    dialogue: list[Turn]

    def to_dict(self) -> dict:
        return {
            "candidates": [c.to_dict() for c in self.candidates],
            "key_point": self.key_point,
            "summary": self.summary,
            "dialogue": [t.to_dict() for t in self.dialogue],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GenerationResult":
        return cls(
            candidates=[Candidate.from_dict(c) for c in d["candidates"]],
            key_point=d["key_point"],
            summary=d["summary"],
            dialogue=[Turn.from_dict(t) for t in d["dialogue"]],
        )


@dataclass
class TaskState:
    """Lifecycle of one microtask on one diagram element.

    pending tracks on-canvas hollow candidates awaiting accept/discard while
    in the display phase. cache holds collapsed-but-unresolved candidates
    (node snapshots plus the preview strings) so re-showing does not re-prompt.
    """

    phase: Phase = Phase.IDLE
    result: GenerationResult | None = None
    pending: list[str] = field(default_factory=list)
    partner_id: str | None = None
    reactive_request: bool = False
    local_initiative: Initiative | None = None
    curtain_deadline: float | None = None
    cache: dict | None = None

    def is_default(self) -> bool:
        return (
            self.phase == Phase.IDLE
            and self.result is None
            and not self.pending
            and self.partner_id is None
            and not self.reactive_request
            and self.local_initiative is None
            and self.curtain_deadline is None
            and self.cache is None
        )

    def to_dict(self) -> dict:
        return {
            "phase": self.phase.value,
            "result": self.result.to_dict() if self.result else None,
            "pending": list(self.pending),
            "partner_id": self.partner_id,
            "reactive_request": self.reactive_request,
            "local_initiative": self.local_initiative.value if self.local_initiative else None,
            "curtain_deadline": self.curtain_deadline,
            "cache": self.cache,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TaskState":
        return cls(
            phase=Phase(d["phase"]),
            result=GenerationResult.from_dict(d["result"]) if d["result"] else None,
            pending=list(d["pending"]),
            partner_id=d["partner_id"],
            reactive_request=d["reactive_request"],
            local_initiative=Initiative(d["local_initiative"]) if d["local_initiative"] else None,
            curtain_deadline=d["curtain_deadline"],
            cache=d["cache"],
        )


@dataclass
class Event:
    seq: int
    timestamp: float
    kind: str
    payload: dict

    def to_dict(self) -> dict:
        return {"seq": self.seq, "timestamp": self.timestamp, "kind": self.kind, "payload": self.payload}

    @classmethod
    def from_dict(cls, d: dict) -> "Event":
        return cls(seq=d["seq"], timestamp=d["timestamp"], kind=d["kind"], payload=d["payload"])


_COUNTER_PREFIX = {"node": "n", "edge": "e", "section": "s", "task": "t"}


class Document:
    """The canvas state plus its event log. Single-writer by contract."""

    def __init__(self, now: Callable[[], float] | None = None):
        self.nodes: dict[str, DiagramNode] = {}
        self.edges: dict[str, Edge] = {}
        self.sections: dict[str, Section] = {}
        self.tasks: dict[str, TaskSpec] = {}
        self.states: dict[tuple[str, str], TaskState] = {}
        self.cursor: tuple[float, float] = (0.0, 0.0)
        self.event_log: list[Event] = []
        self.counters: dict[str, int] = {"node": 0, "edge": 0, "section": 0, "task": 0}
        self.now: Callable[[], float] = now or (lambda: 0.0)

    # -- id allocation -------------------------------------------------------

    def peek_id(self, key: str, offset: int = 1) -> str:
        return f"{_COUNTER_PREFIX[key]}{self.counters[key] + offset}"

    def _bump(self, key: str, ident: str) -> None:
        try:
            num = int(ident[1:])
        except ValueError:
            return
        if num > self.counters[key]:
            self.counters[key] = num

    # -- lookup helpers --------------------------------------------------------

    def node(self, node_id: str) -> DiagramNode:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownIdError("node", node_id) from None

    def section(self, section_id: str) -> Section:
        try:
            return self.sections[section_id]
        except KeyError:
            raise UnknownIdError("section", section_id) from None

    def task(self, task_id: str) -> TaskSpec:
        try:
            return self.tasks[task_id]
        except KeyError:
            raise UnknownIdError("task", task_id) from None

    def element_exists(self, element_id: str) -> bool:
        return element_id in self.nodes or element_id in self.sections

    def state_for(self, element_id: str, task_id: str) -> TaskState:
        return self.states.get((element_id, task_id), TaskState())

    def _ensure_state(self, element_id: str, task_id: str) -> TaskState:
        key = (element_id, task_id)
        if key not in self.states:
            self.states[key] = TaskState()
        return self.states[key]

    def _prune_state(self, element_id: str, task_id: str) -> None:
        key = (element_id, task_id)
        state = self.states.get(key)
        if state is not None and state.is_default():
            del self.states[key]

    # -- event plumbing --------------------------------------------------------

    def commit(self, kind: str, payload: dict) -> Event:
        seq = self.event_log[-1].seq + 1 if self.event_log else 1
        event = Event(seq=seq, timestamp=self.now(), kind=kind, payload=payload)
        self.apply(event)
        self.event_log.append(event)
        return event

    def apply(self, event: Event) -> None:
        """Reducer: mutate state per one event. Must stay total over every
        event kind the engine commits, since replay uses it verbatim."""
        handler = getattr(self, f"_apply_{_snake(event.kind)}", None)
        if handler is None:
            raise InvalidOperationError(f"unknown event kind: {event.kind}")
        handler(event.payload)

    # -- reducer cases ---------------------------------------------------------

    def _apply_node_added(self, p: dict) -> None:
        node = DiagramNode.from_dict(p["node"])
        self.nodes[node.id] = node
        self._bump("node", node.id)

    def _apply_text_confirmed(self, p: dict) -> None:
        self.nodes[p["node_id"]].text = p["text"]

    def _apply_node_moved(self, p: dict) -> None:
        node = self.nodes[p["node_id"]]
        node.x, node.y = p["x"], p["y"]

    def _apply_node_resized(self, p: dict) -> None:
        node = self.nodes[p["node_id"]]
        node.width, node.height = p["width"], p["height"]

    def _apply_node_deleted(self, p: dict) -> None:
        self._delete_elements({p["node_id"]})

    def _apply_edge_added(self, p: dict) -> None:
        edge = Edge.from_dict(p["edge"])
        self.edges[edge.id] = edge
        self._bump("edge", edge.id)

    def _apply_edge_deleted(self, p: dict) -> None:
        self.edges.pop(p["edge_id"], None)

    def _apply_section_added(self, p: dict) -> None:
        section = Section.from_dict(p["section"])
        self.sections[section.id] = section
        self._bump("section", section.id)

    def _apply_section_title_set(self, p: dict) -> None:
        self.sections[p["section_id"]].title = p["title"]

    def _apply_section_rect_set(self, p: dict) -> None:
        section = self.sections[p["section_id"]]
        section.x, section.y = p["x"], p["y"]
        section.width, section.height = p["width"], p["height"]

    def _apply_section_deleted(self, p: dict) -> None:
        self._delete_elements({p["section_id"]})

    def _apply_cursor_moved(self, p: dict) -> None:
        self.cursor = (p["x"], p["y"])

    def _apply_task_added(self, p: dict) -> None:
        spec = TaskSpec.from_dict(p["task"])
        self.tasks[spec.id] = spec
        self._bump("task", spec.id)

    def _apply_task_updated(self, p: dict) -> None:
        spec = self.tasks[p["task_id"]]
        changes = p["changes"]
        merged = spec.to_dict()
        merged.update(changes)
        merged["id"] = spec.id
        self.tasks[spec.id] = TaskSpec.from_dict(merged)

    def _apply_task_deleted(self, p: dict) -> None:
        task_id = p["task_id"]
        doomed = {
            nid for nid, node in self.nodes.items()
            if node.origin.is_generated and not node.origin.accepted and node.origin.task_id == task_id
        }
        self._delete_nodes_only(doomed)
        for key in [k for k in self.states if k[1] == task_id]:
            del self.states[key]
        self.tasks.pop(task_id, None)

    def _apply_initiative_set(self, p: dict) -> None:
        task_id, mode = p["task_id"], Initiative(p["mode"])
        if p["node_id"] is None:
            self.tasks[task_id].initiative = mode
        else:
            state = self._ensure_state(p["node_id"], task_id)
            state.local_initiative = mode
            self._prune_state(p["node_id"], task_id)

    def _apply_visibility_set(self, p: dict) -> None:
        self.tasks[p["task_id"]].visible = p["visible"]

    def _apply_dispatch(self, p: dict) -> None:
        state = self._ensure_state(p["node_id"], p["task_id"])
        state.phase = Phase.IN_FLIGHT
        state.partner_id = p.get("partner_id")
        state.reactive_request = p.get("reactive", False)

    def _apply_curtain_shown(self, p: dict) -> None:
        state = self._ensure_state(p["node_id"], p["task_id"])
        state.phase = Phase.CURTAIN
        state.result = GenerationResult.from_dict(p["result"])
        state.curtain_deadline = p["deadline"]
        state.reactive_request = False

    def _apply_unread_marked(self, p: dict) -> None:
        state = self._ensure_state(p["node_id"], p["task_id"])
        state.phase = Phase.UNREAD
        state.curtain_deadline = None

    def _apply_expanded(self, p: dict) -> None:
        for node_dict in p["created"]:
            node = DiagramNode.from_dict(node_dict)
            self.nodes[node.id] = node
            self._bump("node", node.id)
        for edge_dict in p["edges"]:
            edge = Edge.from_dict(edge_dict)
            self.edges[edge.id] = edge
            self._bump("edge", edge.id)
        state = self._ensure_state(p["node_id"], p["task_id"])
        state.phase = Phase.DISPLAY
        state.result = GenerationResult.from_dict(p["result"])
        state.pending = [n["id"] for n in p["created"]]
        state.curtain_deadline = None
        state.reactive_request = False
        state.cache = None

    def _apply_collapsed(self, p: dict) -> None:
        state = self._ensure_state(p["node_id"], p["task_id"])
        removed = set(p["removed"])
        for nid in p["removed"]:
            self.nodes.pop(nid, None)
        self._drop_edges_touching(removed)
        self._drop_states_for(removed)
        state.phase = Phase.IDLE
        state.result = None
        state.pending = []
        state.cache = p["cache"]
        self._prune_state(p["node_id"], p["task_id"])

    def _apply_accepted(self, p: dict) -> None:
        self.nodes[p["node_id"]].origin.accepted = True
        self._resolve_pending(p["node_id"])

    def _apply_discarded(self, p: dict) -> None:
        node_id = p["node_id"]
        self._resolve_pending(node_id)
        self.nodes.pop(node_id, None)
        self._drop_edges_touching({node_id})
        self._drop_states_for({node_id})

    def _apply_regenerated(self, p: dict) -> None:
        node = self.nodes[p["node_id"]]
        node.text = p["text"]
        node.origin.dialogue.extend(Turn.from_dict(t) for t in p["turns"])

    def _apply_explained(self, p: dict) -> None:
        node = self.nodes[p["node_id"]]
        node.origin.dialogue.extend(Turn.from_dict(t) for t in p["turns"])

    def _apply_error(self, p: dict) -> None:
        if p.get("context") == "generation":
            key = (p["node_id"], p["task_id"])
            state = self.states.get(key)
            if state is not None and state.phase == Phase.IN_FLIGHT:
                state.phase = Phase.IDLE
                state.partner_id = None
                state.reactive_request = False
                self._prune_state(*key)

    # -- cascade helpers ---------------------------------------------------------

    def _drop_edges_touching(self, element_ids: set[str]) -> None:
        for eid in [e.id for e in self.edges.values()
                    if e.from_id in element_ids or e.to_id in element_ids]:
            del self.edges[eid]

    def _drop_states_for(self, element_ids: set[str]) -> None:
        for key in [k for k in self.states if k[0] in element_ids]:
            del self.states[key]

    def _resolve_pending(self, candidate_id: str) -> None:
        """Remove a candidate from its owner's pending list; an emptied display
        returns the pair to idle with nothing retained."""
        for (element_id, task_id), state in list(self.states.items()):
            if candidate_id in state.pending:
                state.pending.remove(candidate_id)
                if not state.pending and state.phase == Phase.DISPLAY:
                    state.phase = Phase.IDLE
                    state.result = None
                    state.partner_id = None
                    state.cache = None
                    self._prune_state(element_id, task_id)

    def _delete_nodes_only(self, doomed: set[str]) -> None:
        for nid in doomed:
            self.nodes.pop(nid, None)
        self._drop_edges_touching(doomed)
        self._drop_states_for(doomed)
        for (element_id, task_id), state in list(self.states.items()):
            changed = False
            for nid in doomed:
                if nid in state.pending:
                    state.pending.remove(nid)
                    changed = True
            if changed and not state.pending and state.phase == Phase.DISPLAY:
                state.phase = Phase.IDLE
                state.result = None
                state.partner_id = None
                state.cache = None
                self._prune_state(element_id, task_id)

    def _delete_elements(self, element_ids: set[str]) -> None:
        """Delete nodes/sections plus everything hanging off them: their edges,
        their task states, and the hollow candidates those states own."""
        doomed_nodes = {eid for eid in element_ids if eid in self.nodes}
        for (element_id, _), state in self.states.items():
            if element_id in element_ids:
                for nid in state.pending:
                    doomed_nodes.add(nid)
        for key in [k for k in self.states if k[0] in element_ids]:
            del self.states[key]
        for eid in element_ids:
            self.sections.pop(eid, None)
        self._delete_nodes_only(doomed_nodes)

    # -- graph commands ------------------------------------------------------------

    def add_node(
        self,
        kind: NodeKind,
        text: str,
        position: tuple[float, float],
        size: tuple[float, float] | None = None,
    ) -> str:
        width, height = size if size is not None else DEFAULT_SIZES[kind]
        if width <= 0 or height <= 0:
            raise InvalidOperationError("node size must be positive")
        node_id = self.peek_id("node")
        node = DiagramNode(
            id=node_id, kind=kind, text=text,
            x=position[0], y=position[1], width=width, height=height,
            origin=Origin.user(),
        )
        self.commit("NodeAdded", {"node": node.to_dict()})
        return node_id

    def update_text(self, node_id: str, text: str) -> None:
        node = self.node(node_id)
        # Confirmation semantics: an identical text still emits the event,
        # because the orchestrator resamples on confirmation, not on diff.
        self.commit("TextConfirmed", {"node_id": node_id, "text": text, "kind": node.kind.value})

    def move_node(self, node_id: str, position: tuple[float, float]) -> None:
        self.node(node_id)
        self.commit("NodeMoved", {"node_id": node_id, "x": position[0], "y": position[1]})

    def resize_node(self, node_id: str, size: tuple[float, float]) -> None:
        self.node(node_id)
        if size[0] <= 0 or size[1] <= 0:
            raise InvalidOperationError("node size must be positive")
        self.commit("NodeResized", {"node_id": node_id, "width": size[0], "height": size[1]})

    def delete_node(self, node_id: str) -> None:
        self.node(node_id)
        self.commit("NodeDeleted", {"node_id": node_id})

    def connect(self, from_id: str, to_id: str, directed: bool) -> str:
        self.node(from_id)
        self.node(to_id)
        if from_id == to_id:
            raise InvalidOperationError("self-loops are not allowed")
        for edge in self.edges.values():
            if (edge.from_id, edge.to_id, edge.directed) == (from_id, to_id, directed):
                raise DuplicateEdgeError(f"edge {from_id}->{to_id} (directed={directed}) exists")
        edge_id = self.peek_id("edge")
        edge = Edge(id=edge_id, from_id=from_id, to_id=to_id, directed=directed)
        self.commit("EdgeAdded", {"edge": edge.to_dict()})
        return edge_id

    def delete_edge(self, edge_id: str) -> None:
        if edge_id not in self.edges:
            raise UnknownIdError("edge", edge_id)
        self.commit("EdgeDeleted", {"edge_id": edge_id})

    def add_section(self, title: str, rect: tuple[float, float, float, float]) -> str:
        x, y, width, height = rect
        if width <= 0 or height <= 0:
            raise InvalidOperationError("section size must be positive")
        section_id = self.peek_id("section")
        section = Section(id=section_id, title=title, x=x, y=y, width=width, height=height)
        self.commit("SectionAdded", {"section": section.to_dict()})
        return section_id

    def set_section_title(self, section_id: str, title: str) -> None:
        self.section(section_id)
        self.commit("SectionTitleSet", {"section_id": section_id, "title": title})

    def set_section_rect(self, section_id: str, rect: tuple[float, float, float, float]) -> None:
        self.section(section_id)
        x, y, width, height = rect
        if width <= 0 or height <= 0:
            raise InvalidOperationError("section size must be positive")
        self.commit("SectionRectSet", {
            "section_id": section_id, "x": x, "y": y, "width": width, "height": height,
        })

    def delete_section(self, section_id: str) -> None:
        self.section(section_id)
        self.commit("SectionDeleted", {"section_id": section_id})

    def move_cursor(self, position: tuple[float, float]) -> None:
        self.commit("CursorMoved", {"x": position[0], "y": position[1]})

    # -- task registry commands ---------------------------------------------------

    def add_task(self, spec: TaskSpec) -> str:
        if not spec.id:
            spec = spec.copy()
            spec.id = self.peek_id("task")
        elif spec.id in self.tasks:
            raise InvalidOperationError(f"task id {spec.id} already exists")
        violations = validate_task(spec, self.tasks.values())
        if violations:
            raise ValidationError(violations)
        self.commit("TaskAdded", {"task": spec.to_dict()})
        return spec.id

    def update_task(self, task_id: str, changes: dict) -> None:
        spec = self.task(task_id)
        merged = spec.to_dict()
        allowed = {"name", "input_type", "output_type", "prompts", "active_prompt"}
        unknown = set(changes) - allowed
        if unknown:
            raise InvalidOperationError(f"cannot update fields: {sorted(unknown)}")
        merged.update(changes)
        merged["id"] = task_id
        candidate = TaskSpec.from_dict(merged)
        violations = validate_task(candidate, self.tasks.values())
        if violations:
            raise ValidationError(violations)
        self.commit("TaskUpdated", {"task_id": task_id, "changes": changes})

    def delete_task(self, task_id: str) -> None:
        self.task(task_id)
        self.commit("TaskDeleted", {"task_id": task_id})

    def set_initiative(self, task_id: str, mode: Initiative, node_id: str | None = None) -> None:
        self.task(task_id)
        if node_id is not None and not self.element_exists(node_id):
            raise UnknownIdError("node", node_id)
        self.commit("InitiativeSet", {"task_id": task_id, "mode": mode.value, "node_id": node_id})

    def set_visibility(self, task_id: str, visible: bool) -> None:
        self.task(task_id)
        self.commit("VisibilitySet", {"task_id": task_id, "visible": visible})

    # -- queries --------------------------------------------------------------------

    def effective_initiative(self, element_id: str, task_id: str) -> Initiative:
        state = self.state_for(element_id, task_id)
        if state.local_initiative is not None:
            return state.local_initiative
        return self.task(task_id).initiative

    def section_members(self, section_id: str) -> list[str]:
        """Node ids whose center lies strictly inside the section rect,
        ordered by (y, x) of node position."""
        section = self.section(section_id)
        members = [n for n in self.nodes.values() if section.contains_center(n.center())]
        members.sort(key=lambda n: (n.y, n.x))
        return [n.id for n in members]

    def section_outline(self, section_id: str) -> str:
        """Hierarchical text rendering of a section's contents.

        Directed edges between members define the hierarchy; roots (members
        with no incoming member edge) start a depth-first walk in (y, x)
        order, children likewise. Each level of depth prepends one "-   "
        marker. A shared visited set keeps every member to at most one line;
        members unreachable from any root (pure cycles) are emitted afterwards
        as additional depth-0 entries. Undirected edges carry no hierarchy and
        are ignored. Unaccepted generated nodes are excluded.
        """
        members = [
            nid for nid in self.section_members(section_id)
            if not self.nodes[nid].is_pending_generated
        ]
        member_set = set(members)
        order = {nid: i for i, nid in enumerate(members)}
        children: dict[str, list[str]] = {nid: [] for nid in members}
        has_incoming: set[str] = set()
        for edge in self.edges.values():
            if edge.directed and edge.from_id in member_set and edge.to_id in member_set:
                children[edge.from_id].append(edge.to_id)
                has_incoming.add(edge.to_id)
        for nid in children:
            children[nid].sort(key=order.__getitem__)

        visited: set[str] = set()
        lines: list[str] = []

        def walk(nid: str, depth: int) -> None:
            if nid in visited:
                return
            visited.add(nid)
            lines.append("-   " * depth + self.nodes[nid].text)
            for child in children[nid]:
                walk(child, depth + 1)

        for nid in members:
            if nid not in has_incoming:
                walk(nid, 0)
        for nid in members:
            walk(nid, 0)
        return "\n".join(lines)

    def nearby_node(self, node_id: str, rng: Random) -> str | None:
        """Uniform pick among the 3 nearest other primitive nodes by center
        distance; unaccepted generated nodes are never candidates."""
        origin_node = self.node(node_id)
        cx, cy = origin_node.center()
        candidates = [
            n for n in self.nodes.values()
            if n.id != node_id and not n.is_pending_generated
        ]
        if not candidates:
            return None
        candidates.sort(key=lambda n: math.hypot(n.center()[0] - cx, n.center()[1] - cy))
        nearest = candidates[:3]
        return nearest[rng.randrange(len(nearest))].id

    # -- serialization ----------------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "nodes": [n.to_dict() for n in self.nodes.values()],
            "edges": [e.to_dict() for e in self.edges.values()],
            "sections": [s.to_dict() for s in self.sections.values()],
            "tasks": [t.to_dict() for t in self.tasks.values()],
            "states": {
                f"{element_id}:{task_id}": state.to_dict()
                for (element_id, task_id), state in self.states.items()
            },
            "cursor": {"x": self.cursor[0], "y": self.cursor[1]},
            "counters": dict(self.counters),
            "event_log": [e.to_dict() for e in self.event_log],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Document":
        doc = cls()
        for nd in d["nodes"]:
            node = DiagramNode.from_dict(nd)
            doc.nodes[node.id] = node
        for ed in d["edges"]:
            edge = Edge.from_dict(ed)
            doc.edges[edge.id] = edge
        for sd in d["sections"]:
            section = Section.from_dict(sd)
            doc.sections[section.id] = section
        for td in d["tasks"]:
            spec = TaskSpec.from_dict(td)
            doc.tasks[spec.id] = spec
        for key, sv in d["states"].items():
            element_id, task_id = key.split(":", 1)
            doc.states[(element_id, task_id)] = TaskState.from_dict(sv)
        doc.cursor = (d["cursor"]["x"], d["cursor"]["y"])
        doc.counters = dict(d["counters"])
        doc.event_log = [Event.from_dict(ev) for ev in d["event_log"]]
        return doc

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Document):
            return NotImplemented
        return self.to_dict() == other.to_dict()


def replay(events: Iterable[Event]) -> Document:
    """Rebuild a document from its event log alone."""
    doc = Document()
    for event in events:
        doc.apply(event)
        doc.event_log.append(event)
    return doc


def new_document(now: Callable[[], float] | None = None, with_defaults: bool = True) -> Document:
    from .tasks import defaults

    doc = Document(now=now)
    if with_defaults:
        for spec in defaults():
            doc.add_task(spec)
    return doc


def _snake(kind: str) -> str:
    out = []
    for i, ch in enumerate(kind):
        if ch.isupper() and i:
            out.append("_")
        out.append(ch.lower())
    return "".join(out)
