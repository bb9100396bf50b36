"""Shared test helpers.

Two pieces matter beyond fixtures:

- drive_random_session: a seeded monte-carlo driver that plays plausible user
  sessions (node edits, cursor moves, expands, accepts, time advances) against
  a Session, used to mass-produce event logs.

- validate_event_log: an independent shadow state machine that re-derives
  lifecycle legality purely from the event stream. It shares no code with the
  document reducer, so agreement between the two is meaningful evidence.
"""
from __future__ import annotations

import random

import pytest

from polymind.engine import SchedulerConfig
from polymind.errors import PolymindError
from polymind.simulate import Session, TraceAction

IDLE, IN_FLIGHT, CURTAIN, UNREAD, DISPLAY = (
    "idle", "in_flight", "curtain", "unread", "display",
)

LIFECYCLE_KINDS = frozenset({
    "Dispatch", "CurtainShown", "UnreadMarked", "Expanded", "Collapsed",
    "Accepted", "Discarded", "Error",
})


def act(session: Session, op: str, **args):
    at = args.pop("at", None)
    return session.run_action(TraceAction(op=op, at=at, args=args))


@pytest.fixture
def session():
    return Session(seed=0)


class ShadowViolation(AssertionError):
    pass


def validate_event_log(events) -> dict:
    """Fold a shadow lifecycle machine over an event log.

    Raises ShadowViolation on any illegal transition: a dispatch on a pair not
    idle (which also covers double in-flight), a curtain without a dispatch,
    an expansion from the wrong phase, bookkeeping that disagrees with the
    cascade rules, or an accepted node disappearing on task deletion or
    visibility toggles. Returns counters for the caller's thresholds.
    """
    phase: dict[tuple[str, str], str] = {}
    pending: dict[tuple[str, str], set[str]] = {}
    owner: dict[str, tuple[str, str]] = {}
    nodes: set[str] = set()
    sections: set[str] = set()
    tasks: set[str] = set()
    accepted: set[str] = set()
    stats = {"events": 0, "transitions": 0, "dispatches": 0,
             "expansions": 0, "accepts": 0, "discards": 0}

    def current(pair):
        return phase.get(pair, IDLE)

    def to_idle(pair):
        phase.pop(pair, None)
        pending.pop(pair, None)

    def fail(message, event):
        raise ShadowViolation(f"event seq {event.seq}: {message}")

    def drop_candidate(nid):
        owner.pop(nid, None)
        nodes.discard(nid)

    def kill_pair(pair):
        for nid in pending.get(pair, set()):
            drop_candidate(nid)
        to_idle(pair)

    def delete_element(element_id):
        nodes.discard(element_id)
        sections.discard(element_id)
        for pair in [p for p in set(phase) | set(pending) if p[0] == element_id]:
            kill_pair(pair)
        pair = owner.pop(element_id, None)
        if pair is not None:
            pending[pair].discard(element_id)
            if not pending[pair]:
                to_idle(pair)
        accepted.discard(element_id)

    for event in events:
        kind, p = event.kind, event.payload
        stats["events"] += 1
        if kind in LIFECYCLE_KINDS and not (
            kind == "Error" and p.get("context") != "generation"
        ):
            stats["transitions"] += 1

        if kind == "TaskAdded":
            tasks.add(p["task"]["id"])
        elif kind == "NodeAdded":
            nodes.add(p["node"]["id"])
        elif kind == "SectionAdded":
            sections.add(p["section"]["id"])
        elif kind == "Dispatch":
            pair = (p["node_id"], p["task_id"])
            stats["dispatches"] += 1
            if current(pair) != IDLE:
                fail(f"Dispatch while pair {pair} is {current(pair)}", event)
            if p["task_id"] not in tasks:
                fail(f"Dispatch for unknown task {p['task_id']}", event)
            if p["node_id"] not in nodes and p["node_id"] not in sections:
                fail(f"Dispatch for unknown element {p['node_id']}", event)
            phase[pair] = IN_FLIGHT
        elif kind == "CurtainShown":
            pair = (p["node_id"], p["task_id"])
            if current(pair) != IN_FLIGHT:
                fail(f"CurtainShown while pair {pair} is {current(pair)}", event)
            phase[pair] = CURTAIN
        elif kind == "UnreadMarked":
            pair = (p["node_id"], p["task_id"])
            if current(pair) != CURTAIN:
                fail(f"UnreadMarked while pair {pair} is {current(pair)}", event)
            phase[pair] = UNREAD
        elif kind == "Expanded":
            pair = (p["node_id"], p["task_id"])
            stats["expansions"] += 1
            if p["cached"]:
                if current(pair) != IDLE:
                    fail(f"cached Expanded while pair {pair} is {current(pair)}", event)
            elif current(pair) not in (CURTAIN, UNREAD, IN_FLIGHT):
                fail(f"Expanded while pair {pair} is {current(pair)}", event)
            phase[pair] = DISPLAY
            ids = [n["id"] for n in p["created"]]
            pending[pair] = set(ids)
            for nid in ids:
                nodes.add(nid)
                owner[nid] = pair
        elif kind == "Collapsed":
            pair = (p["node_id"], p["task_id"])
            if current(pair) != DISPLAY:
                fail(f"Collapsed while pair {pair} is {current(pair)}", event)
            if set(p["removed"]) != pending.get(pair, set()):
                fail("Collapsed removed set differs from pending candidates", event)
            for nid in p["removed"]:
                drop_candidate(nid)
            to_idle(pair)
        elif kind == "Accepted":
            nid = p["node_id"]
            stats["accepts"] += 1
            pair = owner.pop(nid, None)
            if pair is None:
                fail(f"Accepted non-candidate {nid}", event)
            accepted.add(nid)
            pending[pair].discard(nid)
            if not pending[pair]:
                if current(pair) != DISPLAY:
                    fail(f"candidate resolution outside display for {pair}", event)
                to_idle(pair)
        elif kind == "Discarded":
            nid = p["node_id"]
            stats["discards"] += 1
            pair = owner.pop(nid, None)
            if pair is None:
                fail(f"Discarded non-candidate {nid}", event)
            nodes.discard(nid)
            pending[pair].discard(nid)
            if not pending[pair]:
                if current(pair) != DISPLAY:
                    fail(f"candidate resolution outside display for {pair}", event)
                to_idle(pair)
        elif kind == "Error":
            if p.get("context") == "generation":
                pair = (p["node_id"], p["task_id"])
                if current(pair) != IN_FLIGHT:
                    fail(f"generation Error while pair {pair} is {current(pair)}", event)
                to_idle(pair)
        elif kind == "NodeDeleted":
            delete_element(p["node_id"])
        elif kind == "SectionDeleted":
            delete_element(p["section_id"])
        elif kind == "TaskDeleted":
            tid = p["task_id"]
            before = set(accepted)
            for pair in [pr for pr in set(phase) | set(pending) if pr[1] == tid]:
                kill_pair(pair)
            tasks.discard(tid)
            if not before <= nodes:
                fail("task deletion destroyed an accepted node", event)
        elif kind == "VisibilitySet":
            if not accepted <= nodes:
                fail("visibility toggle destroyed an accepted node", event)

    if not accepted <= nodes:
        raise ShadowViolation("accepted nodes missing at end of log")
    stats["final_pairs"] = dict(phase)
    return stats


class FlakyProvider:
    """MockProvider wrapper that fails a seeded fraction of calls, for
    exercising the error transitions."""

    def __init__(self, seed: int, failure_rate: float = 0.15):
        from polymind.llm import MockProvider

        self._inner = MockProvider(seed)
        self._rng = random.Random(seed ^ 0x5F5F)
        self.failure_rate = failure_rate

    def complete(self, dialogue, params):
        from polymind.errors import ProviderError

        if self._rng.random() < self.failure_rate:
            raise ProviderError("synthetic provider failure")
        return self._inner.complete(dialogue, params)


# -- monte-carlo session driver --------------------------------------------------

_WORDS = [
    "harbor", "signal", "paper", "garden", "threads", "silver", "window",
    "archive", "pattern", "lantern", "moss", "current", "outline", "margin",
]


def _text(rng: random.Random, n: int) -> str:
    return " ".join(rng.choice(_WORDS) for _ in range(n))


def drive_random_session(
    op_seed: int,
    target_events: int = 1000,
    latency: float = 1.7,
    engine_seed: int | None = None,
    config: SchedulerConfig | None = None,
    max_steps: int = 100_000,
    provider=None,
) -> Session:
    """Play a random-but-plausible user session until the event log reaches
    target_events. The op stream and the engine randomness are independently
    seeded, so the same op_seed explores the same scenario shape."""
    rng = random.Random(op_seed)
    session = Session(
        seed=op_seed if engine_seed is None else engine_seed,
        config=config,
        latency=latency,
        provider=provider,
    )
    doc = session.doc

    def nodes_of(pred):
        return [n for n in doc.nodes.values() if pred(n)]

    def try_act(op, **args):
        try:
            act(session, op, **args)
        except PolymindError:
            pass

    for _ in range(max_steps):
        if len(doc.event_log) >= target_events:
            break
        roll = rng.random()
        if roll < 0.16:
            session.advance_by(rng.uniform(0.5, 4.0))
        elif roll < 0.24:
            session.advance_by(rng.uniform(5.0, 9.0))
        elif roll < 0.34:
            kind = rng.choice(["keyword", "keyword", "concept", "sticky_note"])
            words = {"keyword": 2, "concept": 4, "sticky_note": 12}[kind]
            try_act("add_node", kind=kind, text=_text(rng, words),
                    x=rng.uniform(0, 1500), y=rng.uniform(0, 1000))
        elif roll < 0.44:
            try_act("move_cursor", x=rng.uniform(0, 1500), y=rng.uniform(0, 1000))
        elif roll < 0.50:
            ready = [
                (eid, tid) for (eid, tid), st in doc.states.items()
                if st.phase.value in (CURTAIN, UNREAD)
            ]
            if ready:
                eid, tid = rng.choice(ready)
                try_act("expand", node_id=eid, task_id=tid)
        elif roll < 0.58:
            hollow = nodes_of(lambda n: n.is_pending_generated)
            if hollow:
                nid = rng.choice(hollow).id
                try_act("accept" if rng.random() < 0.5 else "discard", node_id=nid)
        elif roll < 0.62:
            displays = [
                (eid, tid) for (eid, tid), st in doc.states.items()
                if st.phase.value == DISPLAY
            ]
            if displays:
                eid, tid = rng.choice(displays)
                try_act("collapse", node_id=eid, task_id=tid)
        elif roll < 0.65:
            cached = [
                (eid, tid) for (eid, tid), st in doc.states.items()
                if st.cache is not None and st.phase.value == IDLE
            ]
            if cached:
                eid, tid = rng.choice(cached)
                try_act("show_cached", node_id=eid, task_id=tid)
        elif roll < 0.70:
            users = nodes_of(lambda n: not n.is_pending_generated)
            if users:
                try_act("update_text", node_id=rng.choice(users).id,
                        text=_text(rng, 2))
        elif roll < 0.74:
            users = nodes_of(lambda n: True)
            if users:
                try_act("move_node", node_id=rng.choice(users).id,
                        x=rng.uniform(0, 1500), y=rng.uniform(0, 1000))
        elif roll < 0.78:
            if doc.tasks:
                tid = rng.choice(sorted(doc.tasks))
                mode = rng.choice(["proactive", "reactive"])
                if rng.random() < 0.5 or not doc.nodes:
                    try_act("set_initiative", task_id=tid, mode=mode)
                else:
                    try_act("set_initiative", task_id=tid, mode=mode,
                            node_id=rng.choice(sorted(doc.nodes)))
        elif roll < 0.81:
            candidates = [
                (eid, tid) for tid in doc.tasks for eid in doc.nodes
                if doc.effective_initiative(eid, tid).value == "reactive"
            ]
            if candidates:
                eid, tid = rng.choice(candidates)
                try_act("request_reactive", node_id=eid, task_id=tid)
        elif roll < 0.85:
            others = sorted(doc.nodes)
            if len(others) >= 2:
                a, b = rng.sample(others, 2)
                try_act("connect", **{"from": a, "to": b,
                                      "directed": rng.random() < 0.5})
        elif roll < 0.88:
            hollow = nodes_of(lambda n: n.is_pending_generated)
            if hollow:
                try_act("regenerate", node_id=rng.choice(hollow).id,
                        feedback=rng.choice(["be_creative", "be_more_specific", "be_brief"]))
        elif roll < 0.90:
            generated = nodes_of(lambda n: n.origin.is_generated)
            if generated:
                try_act("explain", node_id=rng.choice(generated).id)
        elif roll < 0.93:
            if doc.nodes and rng.random() < 0.6:
                try_act("delete_node", node_id=rng.choice(sorted(doc.nodes)))
        elif roll < 0.95:
            if rng.random() < 0.4:
                try_act("add_section", title=_text(rng, 1),
                        x=rng.uniform(0, 1200), y=rng.uniform(0, 800),
                        width=rng.uniform(120, 500), height=rng.uniform(120, 500))
            elif doc.sections:
                try_act("delete_section", section_id=rng.choice(sorted(doc.sections)))
        elif roll < 0.96:
            if doc.tasks:
                try_act("set_visibility", task_id=rng.choice(sorted(doc.tasks)),
                        visible=rng.random() < 0.5)
        elif roll < 0.97 and len(doc.tasks) > 2:
            try_act("delete_task", task_id=rng.choice(sorted(doc.tasks)))
        else:
            session.advance_by(rng.uniform(4.0, 12.0))
    return session
