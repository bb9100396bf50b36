"""WebSocket/HTTP service exposing one document.

Every mutation — user commands, scheduler ticks, curtain timers, provider
completions — is delivered as a message to one actor coroutine that owns the
document, so there is exactly one writer and no locking. Provider calls run
in a thread pool and only their outcomes re-enter the queue; the engine stays
responsive while completions are outstanding.

Wire protocol (see README): clients send {"cmd", "args", "client_seq"} and
receive {"kind": "snapshot" | "ack" | "error" | "event"} messages. A snapshot
arrives once on connect; every committed event is broadcast to all clients in
sequence order.
"""
from __future__ import annotations

import asyncio
import json
import logging
import time
from contextlib import asynccontextmanager
from itertools import count
from pathlib import Path
from random import Random

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .engine import Engine, Job, SchedulerConfig, SuggestJob, execute_job, run_command
from .errors import ConfigError, InvalidOperationError, ParseError, PolymindError, ProviderError
from .llm import CompletionParams, MockProvider, Provider, RemoteChatProvider
from .model import SCHEMA_VERSION, Document, new_document
from .persistence import save

log = logging.getLogger(__name__)

#: How long a cursor must rest on a task header before the summary ticker runs.
HOVER_SUMMARY_SECONDS = 1.5

#: Poll interval for curtain deadlines under the wall clock.
_TIMER_PULSE_SECONDS = 0.2


def create_provider(
    kind: str,
    base_url: str | None = None,
    model: str = "gpt-3.5-turbo",
    api_key_env: str | None = None,
    seed: int = 0,
) -> Provider:
    if kind == "mock":
        return MockProvider(seed)
    if kind == "remote":
        if not base_url:
            raise ConfigError("remote provider requires a base URL")
        if api_key_env is not None:
            return RemoteChatProvider(base_url, model=model, api_key_env=api_key_env)
        return RemoteChatProvider(base_url, model=model)
    raise ConfigError(f"unknown provider kind: {kind}")


class _Service:
    def __init__(self, doc: Document, engine: Engine, provider: Provider,
                 config: SchedulerConfig, doc_path: str | Path | None):
        self.doc = doc
        self.engine = engine
        self.provider = provider
        self.config = config
        self.doc_path = doc_path
        self.queue: asyncio.Queue | None = None
        self.clients: dict[int, asyncio.Queue] = {}
        self._client_ids = count(1)
        self._watermark = len(doc.event_log)
        self._tasks: set[asyncio.Task] = set()

    # -- plumbing -----------------------------------------------------------

    def config_payload(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "tick_seconds": self.config.tick_seconds,
            "curtain_timeout_seconds": self.config.curtain_timeout_seconds,
            "max_inflight_per_task": self.config.max_inflight_per_task,
            "hover_summary_seconds": HOVER_SUMMARY_SECONDS,
            "temperature": CompletionParams().temperature,
        }

    def _spawn(self, coro) -> None:
        task = asyncio.create_task(coro)
        self._tasks.add(task)
        task.add_done_callback(self._tasks.discard)

    def _reply(self, client_id: int, message: dict) -> None:
        queue = self.clients.get(client_id)
        if queue is not None:
            queue.put_nowait(message)

    def _broadcast_new_events(self) -> None:
        events = self.doc.event_log[self._watermark:]
        self._watermark = len(self.doc.event_log)
        for event in events:
            message = {"kind": "event", "event": event.to_dict()}
            for queue in self.clients.values():
                queue.put_nowait(message)

    # -- provider jobs --------------------------------------------------------

    async def _run_job(self, job: Job) -> None:
        loop = asyncio.get_running_loop()
        try:
            outcome: object = await loop.run_in_executor(None, execute_job, job, self.provider)
        except (ProviderError, ParseError, InvalidOperationError) as exc:
            outcome = exc
        await self.queue.put(("job_done", job, outcome))

    async def _run_suggest(self, job: SuggestJob, client_id: int, client_seq) -> None:
        loop = asyncio.get_running_loop()
        try:
            outcome: object = await loop.run_in_executor(None, execute_job, job, self.provider)
        except (ProviderError, ParseError, InvalidOperationError) as exc:
            outcome = exc
        await self.queue.put(("suggest_done", client_id, client_seq, outcome))

    # -- actor ------------------------------------------------------------------

    def _handle_cmd(self, client_id: int, client_seq, name: str, args: dict) -> None:
        try:
            result, jobs = run_command(self.engine, name, args)
        except PolymindError as exc:
            self._reply(client_id, {"kind": "error", "client_seq": client_seq,
                                    "error": str(exc)})
            return
        deferred = False
        for job in jobs:
            if isinstance(job, SuggestJob):
                # The ack carries the drafted spec, so it waits for the job.
                self._spawn(self._run_suggest(job, client_id, client_seq))
                deferred = True
            else:
                self._spawn(self._run_job(job))
        if not deferred:
            self._reply(client_id, {"kind": "ack", "client_seq": client_seq,
                                    "result": result})

    async def actor(self) -> None:
        while True:
            item = await self.queue.get()
            kind = item[0]
            try:
                if kind == "connect":
                    _, client_id, send_queue = item
                    self.clients[client_id] = send_queue
                    last_seq = self.doc.event_log[-1].seq if self.doc.event_log else 0
                    send_queue.put_nowait({
                        "kind": "snapshot",
                        "document": self.doc.to_dict(),
                        "config": self.config_payload(),
                        "last_seq": last_seq,
                    })
                elif kind == "disconnect":
                    self.clients.pop(item[1], None)
                elif kind == "cmd":
                    _, client_id, client_seq, name, args = item
                    self._handle_cmd(client_id, client_seq, name, args)
                elif kind == "job_done":
                    _, job, outcome = item
                    self.engine.complete_job(job, outcome)
                elif kind == "suggest_done":
                    _, client_id, client_seq, outcome = item
                    if isinstance(outcome, Exception):
                        self._reply(client_id, {"kind": "error", "client_seq": client_seq,
                                                "error": str(outcome)})
                    else:
                        self._reply(client_id, {"kind": "ack", "client_seq": client_seq,
                                                "result": {"draft": outcome}})
                elif kind == "tick":
                    for job in self.engine.tick():
                        self._spawn(self._run_job(job))
                elif kind == "timers":
                    self.engine.process_timers()
            except PolymindError:
                log.exception("error while processing %s", kind)
            self._broadcast_new_events()

    async def ticker(self) -> None:
        while True:
            await asyncio.sleep(self.config.tick_seconds)
            await self.queue.put(("tick",))

    async def timer_pulse(self) -> None:
        while True:
            await asyncio.sleep(_TIMER_PULSE_SECONDS)
            if self.engine.next_deadline() is not None:
                await self.queue.put(("timers",))


def create_app(
    doc: Document | None = None,
    config: SchedulerConfig | None = None,
    provider: Provider | None = None,
    doc_path: str | Path | None = None,
    seed: int = 0,
) -> FastAPI:
    config = config or SchedulerConfig()
    if doc is None:
        doc = new_document(now=time.time)
    else:
        doc.now = time.time
    engine = Engine(doc, config, Random(seed), time.time)
    provider = provider if provider is not None else MockProvider(seed)
    service = _Service(doc, engine, provider, config, doc_path)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        service.queue = asyncio.Queue()
        runners = [
            asyncio.create_task(service.actor()),
            asyncio.create_task(service.ticker()),
            asyncio.create_task(service.timer_pulse()),
        ]
        try:
            yield
        finally:
            for task in runners:
                task.cancel()
            await asyncio.gather(*runners, return_exceptions=True)
            if service.doc_path is not None:
                save(service.doc, service.doc_path)

    app = FastAPI(title="polymind", lifespan=lifespan)
    app.state.service = service

    @app.get("/document")
    async def get_document():
        return service.doc.to_dict()

    @app.get("/config")
    async def get_config():
        return service.config_payload()

    @app.websocket("/ws")
    async def ws_endpoint(websocket: WebSocket):
        await websocket.accept()
        client_id = next(service._client_ids)
        send_queue: asyncio.Queue = asyncio.Queue()
        await service.queue.put(("connect", client_id, send_queue))

        async def writer():
            while True:
                message = await send_queue.get()
                await websocket.send_text(json.dumps(message))

        writer_task = asyncio.create_task(writer())
        try:
            while True:
                raw = await websocket.receive_text()
                try:
                    msg = json.loads(raw)
                except json.JSONDecodeError:
                    send_queue.put_nowait({"kind": "error", "client_seq": None,
                                           "error": "malformed JSON"})
                    continue
                cmd = msg.get("cmd")
                args = msg.get("args") or {}
                client_seq = msg.get("client_seq")
                if not isinstance(cmd, str) or not isinstance(args, dict):
                    send_queue.put_nowait({"kind": "error", "client_seq": client_seq,
                                           "error": "message must carry cmd and args"})
                    continue
                await service.queue.put(("cmd", client_id, client_seq, cmd, args))
        except WebSocketDisconnect:
            pass
        finally:
            writer_task.cancel()
            await service.queue.put(("disconnect", client_id))

    return app
