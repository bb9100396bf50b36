"""Orchestration engine.

Drives the proactive scheduler and the per-(element, task) lifecycle:
tick sampling and dispatch, the curtain → unread → display notification flow,
accept/discard of candidates, feedback regeneration, explanations, reactive
requests, and microtask delegation.

LLM work never happens inside engine methods. Mutating operations return job
descriptions; the caller executes them (thread pool in the service, inline in
the simulator) and feeds outcomes back through complete_job. All document
mutation stays on the single writer that owns the Engine.
"""
from __future__ import annotations

from dataclasses import dataclass
from random import Random
from typing import Callable

from .attention import sample, sample_primitive
from .errors import InvalidOperationError, UnknownIdError
from .llm import (
    EXPLAIN_PROMPT,
    FEEDBACK_INSTRUCTIONS,
    REGENERATE_SUFFIX,
    CompletionParams,
    Provider,
    Turn,
    complete,
    name_suggestion_prompt,
    parse_generations,
    parse_regeneration,
    prompt_suggestion_prompt,
    summarize_result,
)
from .model import (
    DEFAULT_SIZES,
    Candidate,
    DiagramNode,
    Document,
    Edge,
    GenerationResult,
    NodeKind,
    Origin,
    Phase,
)
from .tasks import (
    PLACEHOLDER,
    Initiative,
    InputType,
    OutputType,
    TaskSpec,
    defaults,
    pick_color,
    render_prompt,
)

#: Horizontal and vertical gap for the candidate fan, in canvas pixels.
FAN_GAP = 40.0

#: Sweep order of input types within one tick.
TICK_ORDER = (
    InputType.KEYWORD,
    InputType.CONCEPT,
    InputType.STICKY_NOTE,
    InputType.SECTION,
    InputType.NODES,
)


@dataclass(frozen=True)
class SchedulerConfig:
    tick_seconds: float = 5.0
    curtain_timeout_seconds: float = 6.0
    max_inflight_per_task: int = 4

    def __post_init__(self):
        if self.tick_seconds <= 0 or self.curtain_timeout_seconds <= 0:
            raise InvalidOperationError("scheduler intervals must be positive")
        if self.max_inflight_per_task <= 0:
            raise InvalidOperationError("max_inflight_per_task must be positive")


@dataclass
class GenerationJob:
    node_id: str
    task_id: str
    partner_id: str | None
    prompt: str
    output_type: OutputType
    reactive: bool


@dataclass
class RegenerateJob:
    node_id: str
    output_type: OutputType
    dialogue: list[Turn]


@dataclass
class ExplainJob:
    node_id: str
    dialogue: list[Turn]


@dataclass
class SuggestJob:
    name_hint: str | None
    color: str


Job = GenerationJob | RegenerateJob | ExplainJob | SuggestJob


def execute_job(job: Job, provider: Provider) -> object:
    """Run a job's LLM work and parsing. Pure with respect to the document;
    raises ProviderError/ParseError on failure. Safe to call off-thread."""
    params = CompletionParams()
    if isinstance(job, GenerationJob):
        opening = [Turn("user", job.prompt)]
        text = complete(provider, opening, params)
        items = parse_generations(text, job.output_type)
        dialogue = opening + [Turn("assistant", text)]
        key_point, summary = summarize_result(provider, items, job.output_type)
        return GenerationResult(
            candidates=[Candidate(kind=job.output_type.value, text=t) for t in items],
            key_point=key_point,
            summary=summary,
            dialogue=dialogue,
        )
    if isinstance(job, RegenerateJob):
        text = complete(provider, job.dialogue, params)
        item = parse_regeneration(text, job.output_type)
        return item, job.dialogue[-1:] + [Turn("assistant", text)]
    if isinstance(job, ExplainJob):
        text = complete(provider, job.dialogue, params)
        return text.strip(), job.dialogue[-1:] + [Turn("assistant", text)]
    if isinstance(job, SuggestJob):
        return _execute_suggest(job, provider, params)
    raise InvalidOperationError(f"unknown job type: {type(job).__name__}")


def _execute_suggest(job: SuggestJob, provider: Provider, params: CompletionParams) -> dict:
    few_shot = defaults()
    name = job.name_hint
    if not name:
        reply = complete(provider, [Turn("user", name_suggestion_prompt(few_shot))], params)
        name = reply.strip().splitlines()[0].strip().strip('"')
        if name.lower().startswith("name:"):
            name = name[5:].strip()
    reply = complete(provider, [Turn("user", prompt_suggestion_prompt(few_shot, name))], params)
    template = reply.strip()
    if template.lower().startswith("prompt:"):
        template = template[7:].strip()
    template = template.replace("\\n", "\n")
    # The draft consumes one keyword input, so exactly one placeholder must
    # survive whatever the model produced.
    parts = template.split(PLACEHOLDER)
    if len(parts) == 1:
        template = f"{template} {PLACEHOLDER}" if template else PLACEHOLDER
    elif len(parts) > 2:
        template = parts[0] + PLACEHOLDER + "".join(parts[1:])
    return {
        "id": "",
        "name": name,
        "color": job.color,
        "input_type": InputType.KEYWORD.value,
        "output_type": OutputType.KEYWORD.value,
        "prompts": [{"label": "Suggested", "template": template}],
        "active_prompt": 0,
        "initiative": Initiative.PROACTIVE.value,
        "visible": True,
    }


class Engine:
    """Single-writer orchestrator over one document."""

    def __init__(
        self,
        doc: Document,
        config: SchedulerConfig | None = None,
        rng: Random | None = None,
        clock: Callable[[], float] | None = None,
    ):
        self.doc = doc
        self.config = config or SchedulerConfig()
        self.rng = rng or Random(0)
        if clock is not None:
            doc.now = clock

    @property
    def now(self) -> Callable[[], float]:
        return self.doc.now

    # -- scheduling ------------------------------------------------------------

    def inflight_count(self, task_id: str) -> int:
        return sum(
            1 for (_, tid), state in self.doc.states.items()
            if tid == task_id and state.phase == Phase.IN_FLIGHT
        )

    def eligible(self, element_id: str, task_id: str) -> bool:
        """True iff a proactive dispatch may target this (element, task) pair."""
        doc = self.doc
        task = doc.task(task_id)
        if not doc.element_exists(element_id):
            raise UnknownIdError("node", element_id)
        if doc.effective_initiative(element_id, task_id) != Initiative.PROACTIVE:
            return False
        if doc.state_for(element_id, task_id).phase != Phase.IDLE:
            return False
        if self.inflight_count(task_id) >= self.config.max_inflight_per_task:
            return False
        return self._kind_matches(element_id, task.input_type)

    def _kind_matches(self, element_id: str, input_type: InputType) -> bool:
        if input_type == InputType.SECTION:
            return element_id in self.doc.sections
        node = self.doc.nodes.get(element_id)
        if node is None:
            return False
        if input_type == InputType.NODES:
            return True
        return node.kind.value == input_type.value

    def tick(self) -> list[GenerationJob]:
        """One scheduler pass: sample a target per input type, dispatch every
        eligible proactive task of that type on it."""
        jobs: list[GenerationJob] = []
        for input_type in TICK_ORDER:
            jobs.extend(self._sweep(input_type))
        return jobs

    def _sweep(self, input_type: InputType) -> list[GenerationJob]:
        doc = self.doc
        if input_type == InputType.NODES:
            target = sample_primitive(doc, self.rng)
        else:
            target = sample(doc, input_type, self.rng)
        if target is None:
            return []
        partner = None
        if input_type == InputType.NODES:
            # One partner draw shared by every pair-input task this tick.
            partner = doc.nearby_node(target, self.rng)
            if partner is None:
                return []
        jobs = []
        for task in doc.tasks.values():
            if task.input_type != input_type:
                continue
            if not self.eligible(target, task.id):
                continue
            jobs.append(self._dispatch(target, task, partner, reactive=False))
        return jobs

    def confirm_text(self, node_id: str, text: str) -> list[GenerationJob]:
        """Apply a text edit and immediately resample the edited node's type."""
        self.doc.update_text(node_id, text)
        kind = self.doc.nodes[node_id].kind
        return self._sweep(InputType(kind.value))

    def _input_texts(self, element_id: str, input_type: InputType,
                     partner_id: str | None) -> list[str]:
        if input_type == InputType.SECTION:
            return [self.doc.section_outline(element_id)]
        if input_type == InputType.NODES:
            return [self.doc.nodes[element_id].text, self.doc.nodes[partner_id].text]
        return [self.doc.nodes[element_id].text]

    def _dispatch(self, element_id: str, task: TaskSpec,
                  partner_id: str | None, reactive: bool) -> GenerationJob:
        texts = self._input_texts(element_id, task.input_type, partner_id)
        prompt = render_prompt(task, texts)
        self.doc.commit("Dispatch", {
            "node_id": element_id,
            "task_id": task.id,
            "partner_id": partner_id,
            "prompt": prompt,
            "reactive": reactive,
        })
        return GenerationJob(
            node_id=element_id,
            task_id=task.id,
            partner_id=partner_id,
            prompt=prompt,
            output_type=task.output_type,
            reactive=reactive,
        )

    # -- notification lifecycle ---------------------------------------------------

    def process_timers(self, now: float | None = None) -> None:
        """Expire elapsed curtains to unread, in (deadline, ids) order."""
        t = self.doc.now() if now is None else now
        due = sorted(
            (state.curtain_deadline, element_id, task_id)
            for (element_id, task_id), state in self.doc.states.items()
            if state.phase == Phase.CURTAIN
            and state.curtain_deadline is not None
            and state.curtain_deadline <= t
        )
        for _, element_id, task_id in due:
            self.doc.commit("UnreadMarked", {"node_id": element_id, "task_id": task_id})

    def next_deadline(self) -> float | None:
        deadlines = [
            state.curtain_deadline
            for state in self.doc.states.values()
            if state.phase == Phase.CURTAIN and state.curtain_deadline is not None
        ]
        return min(deadlines, default=None)

    def complete_job(self, job: Job, outcome: object):
        """Feed an executed job's outcome (or exception) back into the document.

        Completions that no longer apply — the element, task, or in-flight
        state vanished while the provider worked — are dropped without effect.
        """
        if isinstance(job, GenerationJob):
            return self._complete_generation(job, outcome)
        if isinstance(job, RegenerateJob):
            return self._complete_regenerate(job, outcome)
        if isinstance(job, ExplainJob):
            return self._complete_explain(job, outcome)
        if isinstance(job, SuggestJob):
            if isinstance(outcome, Exception):
                raise outcome
            return outcome
        raise InvalidOperationError(f"unknown job type: {type(job).__name__}")

    def _complete_generation(self, job: GenerationJob, outcome: object) -> None:
        doc = self.doc
        if job.task_id not in doc.tasks or not doc.element_exists(job.node_id):
            return
        state = doc.states.get((job.node_id, job.task_id))
        if state is None or state.phase != Phase.IN_FLIGHT:
            return
        if isinstance(outcome, Exception):
            doc.commit("Error", {
                "context": "generation",
                "node_id": job.node_id,
                "task_id": job.task_id,
                "message": str(outcome),
            })
            return
        result: GenerationResult = outcome
        if state.reactive_request:
            # Click-driven flow: no notification, straight onto the canvas.
            entries = [(c.kind, c.text, result.dialogue) for c in result.candidates]
            self._materialize(job.node_id, job.task_id, entries, result.to_dict(), cached=False)
        else:
            doc.commit("CurtainShown", {
                "node_id": job.node_id,
                "task_id": job.task_id,
                "result": result.to_dict(),
                "deadline": doc.now() + self.config.curtain_timeout_seconds,
            })

    def _complete_regenerate(self, job: RegenerateJob, outcome: object) -> None:
        doc = self.doc
        node = doc.nodes.get(job.node_id)
        if node is None or not node.is_pending_generated:
            return
        if isinstance(outcome, Exception):
            doc.commit("Error", {
                "context": "regenerate",
                "node_id": job.node_id,
                "message": str(outcome),
            })
            return
        text, turns = outcome
        doc.commit("Regenerated", {
            "node_id": job.node_id,
            "text": text,
            "turns": [t.to_dict() for t in turns],
        })

    def _complete_explain(self, job: ExplainJob, outcome: object) -> str | None:
        doc = self.doc
        node = doc.nodes.get(job.node_id)
        if node is None or not node.origin.is_generated:
            return None
        if isinstance(outcome, Exception):
            doc.commit("Error", {
                "context": "explain",
                "node_id": job.node_id,
                "message": str(outcome),
            })
            return None
        explanation, turns = outcome
        doc.commit("Explained", {
            "node_id": job.node_id,
            "explanation": explanation,
            "turns": [t.to_dict() for t in turns],
        })
        return explanation

    # -- candidate materialization ---------------------------------------------------

    def _materialize(self, element_id: str, task_id: str,
                     entries: list[tuple[str, str, list[Turn]]],
                     result_dict: dict, cached: bool) -> list[str]:
        """Create hollow candidate nodes fanned right of the source and commit
        one Expanded event carrying everything the reducer needs."""
        doc = self.doc
        source = doc.sections.get(element_id) or doc.nodes[element_id]
        base_x = source.x + source.width + FAN_GAP
        y = source.y
        created: list[dict] = []
        for offset, (kind_str, text, dialogue) in enumerate(entries, start=1):
            kind = NodeKind(kind_str)
            width, height = DEFAULT_SIZES[kind]
            node = DiagramNode(
                id=doc.peek_id("node", offset),
                kind=kind,
                text=text,
                x=base_x,
                y=y,
                width=width,
                height=height,
                origin=Origin.generated(task_id, list(dialogue)),
            )
            created.append(node.to_dict())
            y += height + FAN_GAP
        state = doc.state_for(element_id, task_id)
        sources = []
        if element_id in doc.nodes:
            sources.append(element_id)
        if state.partner_id and state.partner_id in doc.nodes:
            sources.append(state.partner_id)
        edges: list[dict] = []
        offset = 1
        for node_dict in created:
            for source_id in sources:
                edge = Edge(
                    id=doc.peek_id("edge", offset),
                    from_id=source_id,
                    to_id=node_dict["id"],
                    directed=False,
                )
                edges.append(edge.to_dict())
                offset += 1
        doc.commit("Expanded", {
            "node_id": element_id,
            "task_id": task_id,
            "created": created,
            "edges": edges,
            "result": result_dict,
            "cached": cached,
        })
        return [n["id"] for n in created]

    def expand(self, element_id: str, task_id: str) -> list[str]:
        state = self.doc.state_for(element_id, task_id)
        if state.phase not in (Phase.CURTAIN, Phase.UNREAD):
            raise InvalidOperationError(
                f"cannot expand a result from the {state.phase.value} state"
            )
        result = state.result
        entries = [(c.kind, c.text, result.dialogue) for c in result.candidates]
        return self._materialize(element_id, task_id, entries, result.to_dict(), cached=False)

    def collapse(self, element_id: str, task_id: str) -> None:
        state = self.doc.state_for(element_id, task_id)
        if state.phase != Phase.DISPLAY:
            raise InvalidOperationError("only a displayed result can be hidden")
        nodes = [self.doc.nodes[nid] for nid in state.pending]
        cache = {
            "nodes": [
                {
                    "kind": n.kind.value,
                    "text": n.text,
                    "dialogue": [t.to_dict() for t in n.origin.dialogue],
                }
                for n in nodes
            ],
            "key_point": state.result.key_point,
            "summary": state.result.summary,
        }
        self.doc.commit("Collapsed", {
            "node_id": element_id,
            "task_id": task_id,
            "removed": list(state.pending),
            "cache": cache,
        })

    def show_cached(self, element_id: str, task_id: str) -> list[str]:
        state = self.doc.state_for(element_id, task_id)
        if state.phase != Phase.IDLE or state.cache is None:
            raise InvalidOperationError("no cached result to show")
        return self._materialize_cached(element_id, task_id)

    def _materialize_cached(self, element_id: str, task_id: str) -> list[str]:
        cache = self.doc.state_for(element_id, task_id).cache
        entries = [
            (n["kind"], n["text"], [Turn.from_dict(t) for t in n["dialogue"]])
            for n in cache["nodes"]
        ]
        result_dict = {
            "candidates": [{"kind": n["kind"], "text": n["text"]} for n in cache["nodes"]],
            "key_point": cache["key_point"],
            "summary": cache["summary"],
            "dialogue": [],
        }
        return self._materialize(element_id, task_id, entries, result_dict, cached=True)

    # -- user actions on candidates ------------------------------------------------------

    def accept_result(self, candidate_id: str) -> None:
        node = self.doc.node(candidate_id)
        if not node.is_pending_generated:
            raise InvalidOperationError("not a pending candidate")
        self.doc.commit("Accepted", {"node_id": candidate_id})

    def discard_result(self, candidate_id: str) -> None:
        node = self.doc.node(candidate_id)
        if not node.is_pending_generated:
            raise InvalidOperationError("not a pending candidate")
        self.doc.commit("Discarded", {"node_id": candidate_id})

    def regenerate(self, candidate_id: str, feedback: str) -> RegenerateJob:
        node = self.doc.node(candidate_id)
        if not node.is_pending_generated:
            raise InvalidOperationError("only pending candidates can be regenerated")
        if feedback not in FEEDBACK_INSTRUCTIONS:
            raise InvalidOperationError(f"unknown feedback: {feedback}")
        turn = Turn("user", f"{FEEDBACK_INSTRUCTIONS[feedback]} {REGENERATE_SUFFIX}")
        return RegenerateJob(
            node_id=candidate_id,
            output_type=OutputType(node.kind.value),
            dialogue=list(node.origin.dialogue) + [turn],
        )

    def explain(self, candidate_id: str) -> ExplainJob:
        node = self.doc.node(candidate_id)
        if not node.origin.is_generated:
            raise InvalidOperationError("only generated nodes carry a dialogue to explain")
        return ExplainJob(
            node_id=candidate_id,
            dialogue=list(node.origin.dialogue) + [Turn("user", EXPLAIN_PROMPT)],
        )

    # -- reactive + delegation -----------------------------------------------------------

    def request_reactive(self, element_id: str, task_id: str) -> tuple[list[str], list[GenerationJob]]:
        """Click-driven request. Returns (created ids, jobs): a cached result
        re-shows immediately with no job; otherwise one dispatch goes out."""
        doc = self.doc
        task = doc.task(task_id)
        if not doc.element_exists(element_id):
            raise UnknownIdError("node", element_id)
        if doc.effective_initiative(element_id, task_id) != Initiative.REACTIVE:
            raise InvalidOperationError("microtask is proactive here; results arrive on ticks")
        state = doc.state_for(element_id, task_id)
        if state.phase != Phase.IDLE:
            raise InvalidOperationError(
                f"cannot request while the microtask is {state.phase.value}"
            )
        if not self._kind_matches(element_id, task.input_type):
            raise InvalidOperationError("element kind does not match the microtask input")
        node = doc.nodes.get(element_id)
        if node is not None and node.is_pending_generated:
            raise InvalidOperationError("pending candidates cannot request generations")
        if state.cache is not None:
            return self._materialize_cached(element_id, task_id), []
        if self.inflight_count(task_id) >= self.config.max_inflight_per_task:
            raise InvalidOperationError("microtask has too many requests in flight")
        partner = None
        if task.input_type == InputType.NODES:
            partner = doc.nearby_node(element_id, self.rng)
            if partner is None:
                raise InvalidOperationError("no partner node available")
        job = self._dispatch(element_id, task, partner, reactive=True)
        return [], [job]

    def suggest_task(self, name_hint: str | None = None) -> SuggestJob:
        return SuggestJob(name_hint=name_hint or None,
                          color=pick_color(self.doc.tasks.values()))

    def confirm_task(self, draft: dict) -> str:
        spec = TaskSpec.from_dict({**draft, "id": ""})
        return self.doc.add_task(spec)


# -- command registry ---------------------------------------------------------------
#
# One table maps wire/trace command names to engine calls so the WebSocket
# service and the trace interpreter cannot drift apart.


@dataclass(frozen=True)
class Command:
    handler: Callable[[Engine, dict], tuple]
    mutating: bool


def _size_arg(args: dict) -> tuple[float, float] | None:
    if "width" in args or "height" in args:
        return (args["width"], args["height"])
    return None


def _cmd_add_node(engine: Engine, args: dict):
    node_id = engine.doc.add_node(
        NodeKind(args["kind"]), args.get("text", ""),
        (args["x"], args["y"]), _size_arg(args),
    )
    return {"node_id": node_id}, []


def _cmd_update_text(engine: Engine, args: dict):
    jobs = engine.confirm_text(args["node_id"], args["text"])
    return None, jobs


def _cmd_move_node(engine: Engine, args: dict):
    engine.doc.move_node(args["node_id"], (args["x"], args["y"]))
    return None, []


def _cmd_resize_node(engine: Engine, args: dict):
    engine.doc.resize_node(args["node_id"], (args["width"], args["height"]))
    return None, []


def _cmd_delete_node(engine: Engine, args: dict):
    engine.doc.delete_node(args["node_id"])
    return None, []


def _cmd_connect(engine: Engine, args: dict):
    edge_id = engine.doc.connect(args["from"], args["to"], args.get("directed", False))
    return {"edge_id": edge_id}, []


def _cmd_delete_edge(engine: Engine, args: dict):
    engine.doc.delete_edge(args["edge_id"])
    return None, []


def _cmd_add_section(engine: Engine, args: dict):
    section_id = engine.doc.add_section(
        args.get("title", ""),
        (args["x"], args["y"], args["width"], args["height"]),
    )
    return {"section_id": section_id}, []


def _cmd_set_section_title(engine: Engine, args: dict):
    engine.doc.set_section_title(args["section_id"], args["title"])
    return None, []


def _cmd_set_section_rect(engine: Engine, args: dict):
    engine.doc.set_section_rect(
        args["section_id"],
        (args["x"], args["y"], args["width"], args["height"]),
    )
    return None, []


def _cmd_delete_section(engine: Engine, args: dict):
    engine.doc.delete_section(args["section_id"])
    return None, []


def _cmd_move_cursor(engine: Engine, args: dict):
    engine.doc.move_cursor((args["x"], args["y"]))
    return None, []


def _cmd_section_members(engine: Engine, args: dict):
    return {"members": engine.doc.section_members(args["section_id"])}, []


def _cmd_section_outline(engine: Engine, args: dict):
    return {"outline": engine.doc.section_outline(args["section_id"])}, []


def _cmd_update_task(engine: Engine, args: dict):
    engine.doc.update_task(args["task_id"], args["changes"])
    return None, []


def _cmd_delete_task(engine: Engine, args: dict):
    engine.doc.delete_task(args["task_id"])
    return None, []


def _cmd_set_initiative(engine: Engine, args: dict):
    engine.doc.set_initiative(
        args["task_id"], Initiative(args["mode"]), args.get("node_id"),
    )
    return None, []


def _cmd_set_visibility(engine: Engine, args: dict):
    engine.doc.set_visibility(args["task_id"], args["visible"])
    return None, []


def _cmd_eligible(engine: Engine, args: dict):
    return {"eligible": engine.eligible(args["node_id"], args["task_id"])}, []


def _cmd_request_reactive(engine: Engine, args: dict):
    created, jobs = engine.request_reactive(args["node_id"], args["task_id"])
    if jobs:
        return {"requested": True}, jobs
    return {"created": created}, []


def _cmd_expand(engine: Engine, args: dict):
    return {"created": engine.expand(args["node_id"], args["task_id"])}, []


def _cmd_collapse(engine: Engine, args: dict):
    engine.collapse(args["node_id"], args["task_id"])
    return None, []


def _cmd_show_cached(engine: Engine, args: dict):
    return {"created": engine.show_cached(args["node_id"], args["task_id"])}, []


def _cmd_accept(engine: Engine, args: dict):
    engine.accept_result(args["node_id"])
    return None, []


def _cmd_discard(engine: Engine, args: dict):
    engine.discard_result(args["node_id"])
    return None, []


def _cmd_regenerate(engine: Engine, args: dict):
    return None, [engine.regenerate(args["node_id"], args["feedback"])]


def _cmd_explain(engine: Engine, args: dict):
    return None, [engine.explain(args["node_id"])]


def _cmd_suggest_task(engine: Engine, args: dict):
    return None, [engine.suggest_task(args.get("name"))]


def _cmd_confirm_task(engine: Engine, args: dict):
    return {"task_id": engine.confirm_task(args["spec"])}, []


COMMANDS: dict[str, Command] = {
    "add_node": Command(_cmd_add_node, True),
    "update_text": Command(_cmd_update_text, True),
    "move_node": Command(_cmd_move_node, True),
    "resize_node": Command(_cmd_resize_node, True),
    "delete_node": Command(_cmd_delete_node, True),
    "connect": Command(_cmd_connect, True),
    "delete_edge": Command(_cmd_delete_edge, True),
    "add_section": Command(_cmd_add_section, True),
    "set_section_title": Command(_cmd_set_section_title, True),
    "set_section_rect": Command(_cmd_set_section_rect, True),
    "delete_section": Command(_cmd_delete_section, True),
    "move_cursor": Command(_cmd_move_cursor, True),
    "section_members": Command(_cmd_section_members, False),
    "section_outline": Command(_cmd_section_outline, False),
    "update_task": Command(_cmd_update_task, True),
    "delete_task": Command(_cmd_delete_task, True),
    "set_initiative": Command(_cmd_set_initiative, True),
    "set_visibility": Command(_cmd_set_visibility, True),
    "eligible": Command(_cmd_eligible, False),
    "request_reactive": Command(_cmd_request_reactive, True),
    "expand": Command(_cmd_expand, True),
    "collapse": Command(_cmd_collapse, True),
    "show_cached": Command(_cmd_show_cached, True),
    "accept": Command(_cmd_accept, True),
    "discard": Command(_cmd_discard, True),
    "regenerate": Command(_cmd_regenerate, True),
    "explain": Command(_cmd_explain, True),
    "suggest_task": Command(_cmd_suggest_task, True),
    "confirm_task": Command(_cmd_confirm_task, True),
}


def run_command(engine: Engine, name: str, args: dict) -> tuple[object, list[Job]]:
    command = COMMANDS.get(name)
    if command is None:
        raise InvalidOperationError(f"unknown command: {name}")
    try:
        return command.handler(engine, args)
    except KeyError as exc:
        raise InvalidOperationError(f"missing argument: {exc.args[0]}") from None
    except ValueError as exc:
        raise InvalidOperationError(f"bad argument: {exc}") from None
