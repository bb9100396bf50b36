import pytest

from polymind.errors import (
    DuplicateEdgeError,
    InvalidOperationError,
    UnknownIdError,
    ValidationError,
)
from polymind.llm import Turn
from polymind.model import (
    DEFAULT_SIZES,
    DiagramNode,
    Document,
    NodeKind,
    Origin,
    Phase,
    new_document,
    replay,
)
from polymind.tasks import Initiative, defaults


@pytest.fixture
def doc():
    return new_document(now=0.0)


def _pending_node(doc, node_id, text, x, y):
    """Commit an unaccepted generated node directly, as materialize does."""
    node = DiagramNode(
        id=node_id, kind=NodeKind.KEYWORD, text=text, x=x, y=y,
        width=100, height=28,
        origin=Origin.generated("t1", [Turn("user", "p"), Turn("assistant", "r")]),
    )
    doc.commit("NodeAdded", {"node": node.to_dict()})
    return node_id


# -- nodes ------------------------------------------------------------------------


def test_add_node_assigns_id_default_size_and_event(doc):
    node_id = doc.add_node(NodeKind.KEYWORD, "", (10.0, 20.0))
    assert node_id == "n1"
    node = doc.node(node_id)
    assert (node.width, node.height) == DEFAULT_SIZES[NodeKind.KEYWORD]
    assert node.text == ""
    assert not node.origin.is_generated
    assert doc.event_log[-1].kind == "NodeAdded"
    assert doc.event_log[-1].seq == len(doc.event_log)


def test_update_text_emits_text_confirmed(doc):
    node_id = doc.add_node(NodeKind.CONCEPT, "", (0, 0))
    doc.update_text(node_id, "tidal energy")
    assert doc.node(node_id).text == "tidal energy"
    confirmed = doc.event_log[-1]
    assert confirmed.kind == "TextConfirmed"
    assert confirmed.payload == {
        "node_id": node_id, "text": "tidal energy", "kind": "concept",
    }


def test_move_and_resize(doc):
    node_id = doc.add_node(NodeKind.STICKY_NOTE, "", (0, 0))
    doc.move_node(node_id, (5.5, -3.25))
    doc.resize_node(node_id, (200.0, 90.0))
    node = doc.node(node_id)
    assert (node.x, node.y) == (5.5, -3.25)
    assert (node.width, node.height) == (200.0, 90.0)
    with pytest.raises(InvalidOperationError):
        doc.resize_node(node_id, (-1.0, 90.0))
    with pytest.raises(InvalidOperationError):
        doc.add_node(NodeKind.KEYWORD, "", (0, 0), size=(0.0, 10.0))


def test_unknown_ids_raise(doc):
    with pytest.raises(UnknownIdError):
        doc.node("n99")
    with pytest.raises(UnknownIdError):
        doc.move_node("n99", (0, 0))
    with pytest.raises(UnknownIdError):
        doc.task("t99")
    with pytest.raises(UnknownIdError):
        doc.section("s99")


# -- edges ------------------------------------------------------------------------


def test_connect_rules(doc):
    a = doc.add_node(NodeKind.KEYWORD, "a", (0, 0))
    b = doc.add_node(NodeKind.KEYWORD, "b", (50, 0))
    edge_id = doc.connect(a, b, directed=True)
    assert doc.edges[edge_id].directed

    with pytest.raises(InvalidOperationError):
        doc.connect(a, a, directed=False)  # self loop
    with pytest.raises(DuplicateEdgeError):
        doc.connect(a, b, directed=True)
    # same endpoints but different direction flag is a distinct edge
    doc.connect(a, b, directed=False)
    # reversed directed edge is also distinct
    doc.connect(b, a, directed=True)
    assert len(doc.edges) == 3


def test_delete_node_cascades_to_edges(doc):
    a = doc.add_node(NodeKind.KEYWORD, "a", (0, 0))
    b = doc.add_node(NodeKind.KEYWORD, "b", (50, 0))
    c = doc.add_node(NodeKind.KEYWORD, "c", (100, 0))
    doc.connect(a, b, directed=False)
    keep = doc.connect(b, c, directed=False)
    doc.delete_node(a)
    assert a not in doc.nodes
    assert list(doc.edges) == [keep]


def test_delete_edge(doc):
    a = doc.add_node(NodeKind.KEYWORD, "a", (0, 0))
    b = doc.add_node(NodeKind.KEYWORD, "b", (50, 0))
    edge_id = doc.connect(a, b, directed=False)
    doc.delete_edge(edge_id)
    assert not doc.edges
    with pytest.raises(UnknownIdError):
        doc.delete_edge(edge_id)


# -- sections ----------------------------------------------------------------------


def test_section_membership_is_strict_center_containment(doc):
    sid = doc.add_section("Intro", (0, 0, 200, 200))
    inside = doc.add_node(NodeKind.KEYWORD, "in", (50, 50))
    doc.add_node(NodeKind.KEYWORD, "far", (500, 500))
    width = DEFAULT_SIZES[NodeKind.KEYWORD][0]
    border = doc.add_node(NodeKind.KEYWORD, "edge", (200 - width / 2, 50))
    # border node's center x == 200 exactly: on the boundary, not inside
    assert doc.section_members(sid) == [inside]
    doc.move_node(border, (100, 50))
    assert doc.section_members(sid) == [inside, border]


def test_section_members_ordered_by_y_then_x(doc):
    sid = doc.add_section("s", (0, 0, 400, 400))
    low = doc.add_node(NodeKind.KEYWORD, "low", (10, 300))
    right = doc.add_node(NodeKind.KEYWORD, "right", (200, 10))
    left = doc.add_node(NodeKind.KEYWORD, "left", (10, 10))
    assert doc.section_members(sid) == [left, right, low]


def test_section_move_resize_delete(doc):
    sid = doc.add_section("s", (0, 0, 100, 100))
    node = doc.add_node(NodeKind.KEYWORD, "n", (20, 20))
    doc.set_section_rect(sid, (1000, 1000, 100, 100))
    assert doc.section_members(sid) == []
    doc.set_section_rect(sid, (0, 0, 5000, 5000))
    assert doc.section_members(sid) == [node]
    with pytest.raises(InvalidOperationError):
        doc.set_section_rect(sid, (0, 0, -5, 5))
    doc.delete_section(sid)
    assert sid not in doc.sections
    assert node in doc.nodes  # nodes survive their section


def test_set_section_title(doc):
    sid = doc.add_section("Draft", (0, 0, 100, 100))
    doc.set_section_title(sid, "Final")
    assert doc.section(sid).title == "Final"


# -- tasks ------------------------------------------------------------------------


def test_default_document_has_six_tasks():
    doc = new_document(now=0.0)
    assert [t.name for t in doc.tasks.values()] == [
        "Brainstorm", "Summarise", "Elaborate", "Draft", "Freewrite", "Associate",
    ]
    assert list(doc.tasks) == [f"t{i}" for i in range(1, 7)]
    assert new_document(now=0.0, with_defaults=False).tasks == {}


def test_add_task_validates_and_assigns_id(doc):
    spec = defaults()[0]
    spec.id = ""
    spec.name = "Remix"
    spec.color = (1, 2, 3)
    task_id = doc.add_task(spec)
    assert task_id == "t7"
    assert doc.task(task_id).name == "Remix"

    clash = defaults()[1]
    clash.id = ""
    clash.name = "Remix2"
    clash.color = (1, 2, 3)  # duplicate color
    with pytest.raises(ValidationError):
        doc.add_task(clash)


def test_update_task_allowed_fields_only(doc):
    doc.update_task("t1", {"name": "Storm"})
    assert doc.task("t1").name == "Storm"
    with pytest.raises(InvalidOperationError):
        doc.update_task("t1", {"color": [9, 9, 9]})
    with pytest.raises(ValidationError):
        doc.update_task("t1", {"active_prompt": 99})


def test_initiative_and_visibility(doc):
    doc.set_initiative("t1", Initiative.REACTIVE)
    assert doc.task("t1").initiative is Initiative.REACTIVE
    node_id = doc.add_node(NodeKind.KEYWORD, "", (0, 0))
    doc.set_initiative("t1", Initiative.PROACTIVE, node_id=node_id)
    assert doc.state_for(node_id, "t1").local_initiative is Initiative.PROACTIVE
    assert doc.effective_initiative(node_id, "t1") is Initiative.PROACTIVE
    # other elements still inherit the task default
    other = doc.add_node(NodeKind.KEYWORD, "", (9, 9))
    assert doc.effective_initiative(other, "t1") is Initiative.REACTIVE
    doc.set_visibility("t2", False)
    assert not doc.task("t2").visible


def test_delete_task_drops_states_and_pending_candidates(doc):
    node_id = doc.add_node(NodeKind.KEYWORD, "", (0, 0))
    doc.set_initiative("t1", Initiative.REACTIVE, node_id=node_id)
    assert (node_id, "t1") in doc.states
    doc.delete_task("t1")
    assert "t1" not in doc.tasks
    assert (node_id, "t1") not in doc.states


# -- cursor and event plumbing ------------------------------------------------------


def test_move_cursor(doc):
    doc.move_cursor((12.0, 34.0))
    assert doc.cursor == (12.0, 34.0)
    assert doc.event_log[-1].kind == "CursorMoved"


def test_event_seq_is_contiguous_from_one(doc):
    doc.add_node(NodeKind.KEYWORD, "", (0, 0))
    doc.add_node(NodeKind.CONCEPT, "", (0, 0))
    doc.move_cursor((1, 1))
    assert [e.seq for e in doc.event_log] == list(range(1, len(doc.event_log) + 1))


def test_replay_reconstructs_document(doc):
    a = doc.add_node(NodeKind.KEYWORD, "", (0, 0))
    doc.update_text(a, "alpha")
    b = doc.add_node(NodeKind.CONCEPT, "", (50, 80))
    doc.connect(a, b, directed=True)
    sid = doc.add_section("S", (-10, -10, 500, 500))
    doc.set_section_title(sid, "S2")
    doc.set_initiative("t1", Initiative.REACTIVE)
    doc.delete_node(b)
    replayed = replay(doc.event_log)
    assert replayed == doc
    assert replayed.to_dict() == doc.to_dict()


def test_replay_preserves_id_counters(doc):
    doc.add_node(NodeKind.KEYWORD, "", (0, 0))
    doc.delete_node("n1")
    replayed = replay(doc.event_log)
    # a fresh node must not reuse the deleted id
    assert replayed.add_node(NodeKind.KEYWORD, "", (0, 0)) == "n2"


def test_error_event_resets_inflight_state(doc):
    node_id = doc.add_node(NodeKind.KEYWORD, "x", (0, 0))
    doc.commit("Dispatch", {
        "node_id": node_id, "task_id": "t1", "partner_id": None,
        "prompt": "p", "reactive": False,
    })
    assert doc.state_for(node_id, "t1").phase is Phase.IN_FLIGHT
    doc.commit("Error", {
        "context": "generation", "node_id": node_id, "task_id": "t1", "message": "boom",
    })
    assert doc.state_for(node_id, "t1").phase is Phase.IDLE
    # the reset state is fully default again, so it is pruned from storage
    assert (node_id, "t1") not in doc.states


# -- serialization -------------------------------------------------------------------


def test_to_dict_from_dict_roundtrip(doc):
    a = doc.add_node(NodeKind.KEYWORD, "", (1.5, 2.5))
    doc.update_text(a, "x")
    b = doc.add_node(NodeKind.STICKY_NOTE, "", (9, 9))
    doc.connect(a, b, directed=False)
    doc.add_section("sec", (0, 0, 300, 300))
    doc.set_initiative("t3", Initiative.REACTIVE, node_id=a)
    restored = Document.from_dict(doc.to_dict())
    assert restored == doc
    assert restored.to_dict() == doc.to_dict()


def test_edge_dict_uses_from_to_keys(doc):
    a = doc.add_node(NodeKind.KEYWORD, "a", (0, 0))
    b = doc.add_node(NodeKind.KEYWORD, "b", (10, 0))
    doc.connect(a, b, directed=True)
    payload = doc.to_dict()["edges"][0]
    assert payload["from"] == a
    assert payload["to"] == b
    assert payload["directed"] is True


def test_user_origin_serializes_without_optional_fields(doc):
    doc.add_node(NodeKind.KEYWORD, "", (0, 0))
    payload = doc.to_dict()["nodes"][0]
    assert payload["origin"] == {"source": "user"}
    origin = Origin.generated("t1", [Turn("user", "p"), Turn("assistant", "r")])
    data = origin.to_dict()
    assert data["source"] == "generated"
    assert data["task_id"] == "t1"
    assert data["accepted"] is False
    restored = Origin.from_dict(data)
    assert restored.is_generated
    assert restored.dialogue == origin.dialogue


def test_center_helper(doc):
    node_id = doc.add_node(NodeKind.KEYWORD, "", (10, 20))
    w, h = DEFAULT_SIZES[NodeKind.KEYWORD]
    assert doc.node(node_id).center() == (10 + w / 2, 20 + h / 2)


def test_task_states_key_roundtrip(doc):
    node_id = doc.add_node(NodeKind.KEYWORD, "", (0, 0))
    doc.set_initiative("t1", Initiative.REACTIVE, node_id=node_id)
    data = doc.to_dict()
    assert f"{node_id}:t1" in data["states"]
    restored = Document.from_dict(data)
    assert restored.state_for(node_id, "t1").local_initiative is Initiative.REACTIVE


# -- pending-candidate cascades ----------------------------------------------------


def test_pending_candidates_excluded_from_outline_and_membership(doc):
    sid = doc.add_section("s", (0, 0, 1000, 1000))
    kept = doc.add_node(NodeKind.KEYWORD, "kept", (10, 10))
    hollow = _pending_node(doc, doc.peek_id("node"), "maybe", 10, 200)
    assert doc.node(hollow).is_pending_generated
    assert doc.section_members(sid) == [kept, hollow]  # membership is spatial
    assert doc.section_outline(sid) == "kept"  # outline skips the candidate


def test_accept_clears_pending_flag(doc):
    hollow = _pending_node(doc, "n1", "idea", 0, 0)
    doc.commit("Accepted", {"node_id": hollow})
    assert not doc.node(hollow).is_pending_generated


# -- outline -----------------------------------------------------------------------


def _named(doc, text, x, y, kind=NodeKind.KEYWORD):
    return doc.add_node(kind, text, (x, y))


def test_outline_linear_chain(doc):
    sid = doc.add_section("s", (0, 0, 1000, 1000))
    a = _named(doc, "alpha", 10, 10)
    b = _named(doc, "beta", 10, 200)
    c = _named(doc, "gamma", 10, 400)
    doc.connect(a, b, directed=True)
    doc.connect(b, c, directed=True)
    assert doc.section_outline(sid) == "alpha\n-   beta\n-   -   gamma"


def test_outline_branching_children_in_member_order(doc):
    sid = doc.add_section("s", (0, 0, 1000, 1000))
    root = _named(doc, "root", 10, 10)
    late = _named(doc, "late", 10, 500)
    early = _named(doc, "early", 10, 200)
    doc.connect(root, late, directed=True)
    doc.connect(root, early, directed=True)
    # children are visited in member (y, x) order: early before late
    assert doc.section_outline(sid) == "root\n-   early\n-   late"


def test_outline_cycle_falls_back_to_single_visit(doc):
    sid = doc.add_section("s", (0, 0, 1000, 1000))
    a = _named(doc, "a", 10, 10)
    b = _named(doc, "b", 10, 200)
    doc.connect(a, b, directed=True)
    doc.connect(b, a, directed=True)
    # every node has an incoming edge, so no roots: members are re-walked once each
    outline = doc.section_outline(sid)
    assert outline.splitlines()[0] == "a"
    assert outline.count("a") == 1 and outline.count("b") == 1


def test_outline_ignores_undirected_and_outside_edges(doc):
    sid = doc.add_section("s", (0, 0, 300, 300))
    a = _named(doc, "a", 10, 10)
    b = _named(doc, "b", 10, 200)
    outside = _named(doc, "out", 900, 900)
    doc.connect(a, b, directed=False)
    doc.connect(outside, b, directed=True)  # from outside the section: b stays a root
    assert doc.section_outline(sid) == "a\nb"


def test_outline_of_empty_section_is_empty_string(doc):
    sid = doc.add_section("s", (0, 0, 10, 10))
    assert doc.section_outline(sid) == ""
