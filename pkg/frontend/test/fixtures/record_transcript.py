"""Record the golden wire transcript used by the protocol conformance test.

Runs a scripted session against the real engine service over its WebSocket
endpoint — add a node, let the scheduler dispatch, expand, accept, then
delegate a new task — recording every frame in both directions, plus a final
snapshot from a second connection. The client suite replays this file
verbatim, so it only needs regenerating when the wire protocol changes:

    python3 frontend/test/fixtures/record_transcript.py

Requires the engine package (`pip install -e . --no-build-isolation` at the
repository root).
"""
import json
import time
from pathlib import Path

from fastapi.testclient import TestClient

from polymind.engine import SchedulerConfig
from polymind.llm import MockProvider
from polymind.service import create_app

OUT = Path(__file__).with_name("transcript.json")

#: Fast ticks so the one proactive dispatch happens promptly; everything the
#: script does afterwards flips initiatives to reactive so no further tick
#: can fire and the final snapshot is stable.
TICK_SECONDS = 0.3


def main() -> None:
    config = SchedulerConfig(
        tick_seconds=TICK_SECONDS,
        curtain_timeout_seconds=6.0,
        max_inflight_per_task=4,
    )
    app = create_app(config=config, provider=MockProvider(seed=11), seed=11)
    frames: list[dict] = []
    client_seq = 0

    with TestClient(app) as http:
        with http.websocket_connect("/ws") as ws:

            def send(cmd: str, args: dict) -> int:
                nonlocal client_seq
                client_seq += 1
                message = {"cmd": cmd, "args": args, "client_seq": client_seq}
                frames.append({"dir": "send", "data": message})
                ws.send_text(json.dumps(message))
                return client_seq

            def recv() -> dict:
                message = json.loads(ws.receive_text())
                frames.append({"dir": "recv", "data": message})
                return message

            def recv_event(kind: str) -> dict:
                while True:
                    message = recv()
                    if message["kind"] == "error":
                        raise RuntimeError(f"engine error: {message['error']}")
                    if message["kind"] == "event" and message["event"]["kind"] == kind:
                        return message

            first = recv()
            assert first["kind"] == "snapshot", first

            # Associate is the only other task that could ever become eligible
            # here (two keyword nodes appear later); park it as reactive first.
            send("set_initiative", {"task_id": "t6", "mode": "reactive"})
            recv_event("InitiativeSet")

            send("add_node", {"kind": "keyword", "text": "coral reefs",
                              "x": 120.0, "y": 80.0})
            recv_event("NodeAdded")

            # The next tick dispatches Brainstorm on the new node; the mock
            # completes at once, so the curtain follows immediately.
            recv_event("Dispatch")
            recv_event("CurtainShown")

            # Park Brainstorm too before its next tick could re-dispatch.
            send("set_initiative", {"task_id": "t1", "mode": "reactive"})
            recv_event("InitiativeSet")

            send("expand", {"node_id": "n1", "task_id": "t1"})
            expanded = recv_event("Expanded")
            created = [n["id"] for n in expanded["event"]["payload"]["created"]]

            send("accept", {"node_id": created[0]})
            recv_event("Accepted")
            for node_id in created[1:]:
                send("discard", {"node_id": node_id})
                recv_event("Discarded")

            # Delegation: the ack is deferred until the mock drafts the spec.
            send("suggest_task", {"name": "Improve"})
            while True:
                message = recv()
                if message["kind"] == "ack":
                    draft = dict(message["result"]["draft"])
                    break
            draft["initiative"] = "reactive"
            send("confirm_task", {"spec": draft})
            recv_event("TaskAdded")

            # Let two more tick periods pass: nothing may arrive. The sentinel
            # command's ack must be the very next frame.
            time.sleep(2.5 * TICK_SECONDS)
            send("move_cursor", {"x": 400.0, "y": 300.0})
            sentinel = recv()
            assert sentinel["kind"] == "ack", f"unexpected frame: {sentinel}"
            recv_event("CursorMoved")

        with http.websocket_connect("/ws") as ws2:
            final = json.loads(ws2.receive_text())
            assert final["kind"] == "snapshot", final

    OUT.write_text(json.dumps(
        {"frames": frames, "final_snapshot": final},
        indent=1, sort_keys=True,
    ) + "\n", encoding="utf-8")
    events = [f["data"]["event"]["kind"] for f in frames
              if f["dir"] == "recv" and f["data"]["kind"] == "event"]
    print(f"wrote {OUT.name}: {len(frames)} frames, events: {events}")


if __name__ == "__main__":
    main()
