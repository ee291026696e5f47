"""HTTP control service: scenario store, run control, event injection,
and a live trace stream.

Scenarios live one file per record under the data directory (raw source
bytes, returned byte-identical) next to an index.json of metadata.
Macros are scenarios with a macro flag; starting a run expands them,
validates the result, and loads a machine.

All machine mutations funnel through one command queue with a single
consumer thread, so concurrent clients serialize into a deterministic
order. Every trace record is appended to the session history and fanned
out, in order, to each connected stream subscriber (NDJSON, one object
per record). In live mode a timer thread enqueues a tick every tick_ms;
manual mode advances only via POST /run/tick, which is what makes runs
reproducible.

Endpoints:
    GET    /                   service banner
    GET    /registry           declared sensors/entities/macros
    POST   /check              {source} -> diagnostics + canonical text
    POST   /scenarios          {name, source, macro?} -> record (status draft)
    GET    /scenarios          list records (no source)
    GET    /scenarios/{id}     record incl. byte-identical source
    PUT    /scenarios/{id}     {name?, source?} -> revalidated record
    DELETE /scenarios/{id}
    POST   /run/start          {id, mode: manual|live}
    POST   /run/stop
    POST   /run/inject         {sensor, event, value?, likelihood}
    POST   /run/tick           {count?}
    GET    /run/snapshot       clock, branch states, trace tail
    GET    /run/stream         NDJSON records from subscription onward

Entities are mock logs by default; configuring a webhook URL for an
entity POSTs its records there from a delivery thread, and a failed
delivery becomes a DELIVERY_FAIL trace record (the machine never blocks
on deliveries).
"""

from __future__ import annotations

import json
import logging
import os
import queue
import re
import threading
import urllib.error
import urllib.request
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Any, Callable, Optional

from .events import Event, Registry, Scalar, SymbolicRule
from .interpreter import Machine, TICK, load
from .lang import (
    Diagnostic,
    MacroCycleError,
    ParseError,
    UnknownMacroError,
    expand_macros,
    format_program,
    parse,
    validate,
)
from .lang.lexer import LexError
from .trace import DeliveryFailRecord, OutRecord, TraceRecord, record_to_json

logger = logging.getLogger(__name__)

DEFAULT_TICK_MS = 100
DEFAULT_TRACE_TAIL = 200

_IDENT = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")


class NotFoundError(KeyError):
    pass


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _diagnostic_json(diag: Diagnostic) -> dict:
    return {
        "severity": diag.severity,
        "code": diag.code,
        "message": diag.message,
        "span": list(diag.span) if diag.span else None,
    }


def source_diagnostics(source: str, registry: Registry) -> list[dict]:
    """Parse+validate diagnostics in wire form; parse failures included."""
    try:
        program = parse(source)
    except (LexError, ParseError) as exc:
        code = "lex-error" if isinstance(exc, LexError) else "parse-error"
        return [
            {
                "severity": "error",
                "code": code,
                "message": str(exc),
                "span": list(getattr(exc, "span", (0, 0))),
            }
        ]
    return [_diagnostic_json(d) for d in validate(program, registry)]


# --- persistent scenario store ---------------------------------------------


@dataclass
class ScenarioRecord:
    id: str
    name: str
    created: str
    modified: str
    status: str = "draft"  # draft | loaded | running | stopped
    macro: bool = False

    def meta(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "created": self.created,
            "modified": self.modified,
            "status": self.status,
            "macro": self.macro,
        }


class ScenarioStore:
    """One .scenl file per scenario plus an index.json of metadata.

    Sources round-trip byte for byte; the index is rewritten atomically
    on every mutation so a restart sees the last completed write.
    """

    def __init__(self, data_dir: str | Path):
        self.root = Path(data_dir)
        self.root.mkdir(parents=True, exist_ok=True)
        (self.root / "scenarios").mkdir(exist_ok=True)
        self._lock = threading.Lock()
        self._records: dict[str, ScenarioRecord] = {}
        self._load_index()

    def _index_path(self) -> Path:
        return self.root / "index.json"

    def _source_path(self, scenario_id: str) -> Path:
        return self.root / "scenarios" / f"{scenario_id}.scenl"

    def _load_index(self) -> None:
        path = self._index_path()
        if not path.exists():
            return
        data = json.loads(path.read_text(encoding="utf-8"))
        for item in data.get("scenarios", []):
            record = ScenarioRecord(**item)
            self._records[record.id] = record

    def _write_index(self) -> None:
        payload = json.dumps(
            {"scenarios": [r.meta() for r in self._records.values()]},
            indent=2,
        )
        tmp = self._index_path().with_suffix(".json.tmp")
        tmp.write_text(payload, encoding="utf-8")
        os.replace(tmp, self._index_path())

    def create(self, name: str, source: str, macro: bool = False) -> ScenarioRecord:
        with self._lock:
            scenario_id = uuid.uuid4().hex[:12]
            while scenario_id in self._records:  # pragma: no cover - vanishing odds
                scenario_id = uuid.uuid4().hex[:12]
            stamp = _now()
            record = ScenarioRecord(scenario_id, name, stamp, stamp, macro=macro)
            self._source_path(scenario_id).write_text(source, encoding="utf-8")
            self._records[scenario_id] = record
            self._write_index()
            return record

    def get(self, scenario_id: str) -> tuple[ScenarioRecord, str]:
        with self._lock:
            record = self._records.get(scenario_id)
            if record is None:
                raise NotFoundError(scenario_id)
            source = self._source_path(scenario_id).read_text(encoding="utf-8")
            return record, source

    def update(
        self,
        scenario_id: str,
        name: Optional[str] = None,
        source: Optional[str] = None,
        status: Optional[str] = None,
    ) -> ScenarioRecord:
        with self._lock:
            record = self._records.get(scenario_id)
            if record is None:
                raise NotFoundError(scenario_id)
            if name is not None:
                record.name = name
            if source is not None:
                self._source_path(scenario_id).write_text(source, encoding="utf-8")
                record.status = "draft"
            if status is not None:
                record.status = status
            record.modified = _now()
            self._write_index()
            return record

    def delete(self, scenario_id: str) -> None:
        with self._lock:
            if scenario_id not in self._records:
                raise NotFoundError(scenario_id)
            del self._records[scenario_id]
            self._source_path(scenario_id).unlink(missing_ok=True)
            self._write_index()

    def list(self) -> list[ScenarioRecord]:
        with self._lock:
            return list(self._records.values())  # insertion order, as indexed

    def macros(self) -> dict[str, str]:
        """name -> source for every macro-flagged record."""
        with self._lock:
            out = {}
            for record in self._records.values():
                if record.macro:
                    out[record.name] = self._source_path(record.id).read_text(
                        encoding="utf-8"
                    )
            return out


# --- run session --------------------------------------------------------------


class ServiceError(Exception):
    """Maps to an HTTP error response."""

    def __init__(self, status: int, code: str, message: str, extra: Optional[dict] = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.extra = extra or {}

    def body(self) -> dict:
        return {"error": self.code, "message": str(self), **self.extra}


@dataclass
class _Command:
    fn: Callable[[], Any]
    done: threading.Event = field(default_factory=threading.Event)
    result: Any = None
    error: Optional[BaseException] = None


class _Subscriber:
    def __init__(self) -> None:
        self.queue: "queue.Queue[TraceRecord]" = queue.Queue()


class Session:
    """Owns the (at most one) running machine and the broadcast fanout."""

    def __init__(
        self,
        registry: Registry,
        rules: tuple[SymbolicRule, ...],
        store: ScenarioStore,
        threshold: int,
        tick_ms: int = DEFAULT_TICK_MS,
        webhooks: Optional[dict[str, str]] = None,
        trace_tail: int = DEFAULT_TRACE_TAIL,
    ):
        self.registry = registry
        self.rules = rules
        self.store = store
        self.threshold = threshold
        self.tick_ms = tick_ms
        self.trace_tail = trace_tail
        self.webhooks = webhooks or {}
        self.machine: Optional[Machine] = None
        self.scenario_id: Optional[str] = None
        self.mode: Optional[str] = None
        # ticks delivered this run; unlike the machine clock it keeps
        # counting after the program finishes, so it names the timeline
        self.clock = 0
        self.history: list[TraceRecord] = []
        self.entity_logs: dict[str, list[TraceRecord]] = {}
        self._commands: "queue.Queue[Optional[_Command]]" = queue.Queue()
        self._subscribers: list[_Subscriber] = []
        self._fan_lock = threading.Lock()
        self._worker = threading.Thread(target=self._consume, daemon=True)
        self._deliveries: "queue.Queue[Optional[TraceRecord]]" = queue.Queue()
        self._delivery_worker = threading.Thread(target=self._deliver_loop, daemon=True)
        self._ticker: Optional[threading.Thread] = None
        self._stopping = False
        self._worker.start()
        self._delivery_worker.start()

    # --- command queue (single consumer) --------------------------------

    def submit(self, fn: Callable[[], Any], timeout: float = 30.0) -> Any:
        command = _Command(fn)
        self._commands.put(command)
        if not command.done.wait(timeout):
            raise ServiceError(500, "timeout", "command queue stalled")
        if command.error is not None:
            raise command.error
        return command.result

    def _consume(self) -> None:
        while True:
            command = self._commands.get()
            if command is None:
                return
            try:
                command.result = command.fn()
            except BaseException as exc:  # handed back to the submitter
                command.error = exc
            finally:
                command.done.set()

    # --- broadcast -------------------------------------------------------

    def subscribe(self) -> _Subscriber:
        sub = _Subscriber()
        with self._fan_lock:
            self._subscribers.append(sub)
        return sub

    def unsubscribe(self, sub: _Subscriber) -> None:
        with self._fan_lock:
            if sub in self._subscribers:
                self._subscribers.remove(sub)

    def _emit(self, records: list[TraceRecord]) -> None:
        if not records:
            return
        with self._fan_lock:
            for record in records:
                self.history.append(record)
                for sub in self._subscribers:
                    sub.queue.put(record)
                if isinstance(record, OutRecord):
                    self.entity_logs.setdefault(record.entity, []).append(record)
                    if record.entity in self.webhooks:
                        self._deliveries.put(record)

    # --- webhook deliveries ----------------------------------------------

    def _deliver_loop(self) -> None:
        while True:
            record = self._deliveries.get()
            if record is None:
                return
            url = self.webhooks.get(record.entity)
            if url is None:
                continue
            try:
                request = urllib.request.Request(
                    url,
                    data=json.dumps(record_to_json(record)).encode("utf-8"),
                    headers={"Content-Type": "application/json"},
                )
                with urllib.request.urlopen(request, timeout=3):
                    pass
            except (urllib.error.URLError, OSError, ValueError) as exc:
                reason = getattr(exc, "reason", None) or exc
                self._emit(
                    [
                        DeliveryFailRecord(
                            record.tick,
                            record.entity,
                            record.function,
                            record.branch,
                            str(reason),
                        )
                    ]
                )

    # --- run control (all called on the worker thread via submit) ---------

    def start(self, scenario_id: str, mode: str) -> dict:
        def do() -> dict:
            if self.machine is not None and self.machine.status != "finished":
                raise ServiceError(409, "already-running", "stop the current run first")
            try:
                record, source = self.store.get(scenario_id)
            except NotFoundError:
                raise ServiceError(404, "not-found", f"no scenario {scenario_id!r}")
            try:
                program = parse(source)
            except (LexError, ParseError) as exc:
                raise ServiceError(
                    400, "validation-failed", f"scenario does not parse: {exc}"
                )
            macros = {}
            for name, macro_source in self.store.macros().items():
                try:
                    macros[name] = parse(macro_source)
                except (LexError, ParseError):
                    continue  # unparseable macros surface as unknown-macro
            try:
                program = expand_macros(program, macros)
            except (UnknownMacroError, MacroCycleError) as exc:
                raise ServiceError(400, "validation-failed", str(exc))
            diagnostics = validate(program, self.registry)
            errors = [d for d in diagnostics if d.severity == "error"]
            if errors:
                raise ServiceError(
                    400,
                    "validation-failed",
                    "scenario failed validation",
                    {"diagnostics": [_diagnostic_json(d) for d in errors]},
                )
            self.store.update(scenario_id, status="loaded")
            self.machine = load(
                program, self.registry, self.rules, threshold=self.threshold
            )
            self.scenario_id = scenario_id
            self.mode = mode
            with self._fan_lock:
                self.clock = 0
                self.history.clear()
            self._emit(self.machine.step(None))
            self.store.update(scenario_id, status="running")
            if mode == "live":
                self._start_ticker()
            return {
                "id": scenario_id,
                "mode": mode,
                "status": self.machine.status,
                "clock": self.machine.clock,
            }

        return self.submit(do)

    def stop(self) -> dict:
        def do() -> dict:
            machine = self._require_machine()
            self._stop_ticker()
            self._emit(machine.abort())
            if self.scenario_id is not None:
                try:
                    self.store.update(self.scenario_id, status="stopped")
                except NotFoundError:
                    pass
            self.machine = None
            self.scenario_id = None
            self.mode = None
            return {"status": "stopped"}

        return self.submit(do)

    def inject(self, payload: dict) -> dict:
        event = self._event_from_payload(payload)

        def do() -> dict:
            machine = self._require_machine()
            records = machine.step(event)
            self._emit(records)
            return {
                "records": [record_to_json(r) for r in records],
                "status": machine.status,
                "clock": self.clock,
            }

        return self.submit(do)

    def tick(self, count: int) -> dict:
        def do() -> dict:
            machine = self._require_machine()
            records: list[TraceRecord] = []
            for _ in range(count):
                batch = machine.step(TICK)
                self.clock += 1
                self._emit(batch)
                records.extend(batch)
            return {
                "records": [record_to_json(r) for r in records],
                "status": machine.status,
                "clock": self.clock,
            }

        return self.submit(do)

    def snapshot(self) -> dict:
        def do() -> dict:
            tail = [record_to_json(r) for r in self.history[-self.trace_tail:]]
            base = {
                "scenario_id": self.scenario_id,
                "mode": self.mode,
                "records_total": len(self.history),
                "trace_tail": tail,
            }
            if self.machine is None:
                return {**base, "status": "idle", "clock": None, "branches": []}
            return {**base, **self.machine.snapshot(), "clock": self.clock}

        return self.submit(do)

    def _require_machine(self) -> Machine:
        if self.machine is None:
            raise ServiceError(409, "no-running-machine", "start a scenario first")
        return self.machine

    def _event_from_payload(self, payload: dict) -> Event:
        sensor = payload.get("sensor")
        name = payload.get("event")
        if not isinstance(sensor, str) or not isinstance(name, str):
            raise ServiceError(400, "invalid-event", "sensor and event are required")
        value_type = self.registry.sensor_event_type(sensor, name)
        if value_type is None:
            raise ServiceError(
                400, "invalid-event", f"undeclared channel {sensor}.{name}"
            )
        raw_value = payload.get("value")
        value: Scalar
        try:
            if value_type == "none":
                value = None
            elif value_type == "integer":
                value = int(raw_value)  # type: ignore[arg-type]
            else:
                if not isinstance(raw_value, str):
                    raise ValueError
                value = raw_value
            likelihood = int(payload.get("likelihood", 100))
            event = Event(sensor, name, value, likelihood)
        except (TypeError, ValueError) as exc:
            raise ServiceError(400, "invalid-event", f"bad event payload: {exc}")
        return event

    # --- live ticker ------------------------------------------------------

    def _start_ticker(self) -> None:
        def loop() -> None:
            while self.mode == "live" and not self._stopping:
                threading.Event().wait(self.tick_ms / 1000.0)
                if self.mode != "live" or self._stopping:
                    return
                try:
                    self.submit(self._tick_once, timeout=10.0)
                except Exception:  # session shutting down
                    return

        self._ticker = threading.Thread(target=loop, daemon=True)
        self._ticker.start()

    def _tick_once(self) -> None:
        if self.machine is None:
            return
        self.clock += 1
        if self.machine.status != "finished":
            self._emit(self.machine.step(TICK))

    def _stop_ticker(self) -> None:
        self.mode = None

    def close(self) -> None:
        self._stopping = True
        self._stop_ticker()
        self._commands.put(None)
        self._deliveries.put(None)
        self._worker.join(timeout=5)
        self._delivery_worker.join(timeout=5)


# --- HTTP layer --------------------------------------------------------------


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server_version = "scenl"

    # the ThreadingHTTPServer subclass carries .service
    @property
    def svc(self) -> "ScenlService":
        return self.server.service  # type: ignore[attr-defined]

    def log_message(self, fmt: str, *args: Any) -> None:
        logger.debug("%s %s", self.address_string(), fmt % args)

    # --- helpers ----------------------------------------------------------

    def _cors(self) -> None:
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, PUT, DELETE, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")

    def _send_json(self, status: int, payload: Any) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self._cors()
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _send_empty(self, status: int) -> None:
        self.send_response(status)
        self._cors()
        self.send_header("Content-Length", "0")
        self.end_headers()

    def _read_json(self) -> dict:
        if not self._raw_body:
            return {}
        try:
            data = json.loads(self._raw_body)
        except json.JSONDecodeError as exc:
            raise ServiceError(400, "bad-json", f"request body is not JSON: {exc}")
        if not isinstance(data, dict):
            raise ServiceError(400, "bad-json", "request body must be an object")
        return data

    def _dispatch(self, method: str) -> None:
        # drain the body up front so keep-alive framing survives routes
        # that never look at it
        length = int(self.headers.get("Content-Length") or 0)
        self._raw_body = self.rfile.read(length) if length else b""
        try:
            handled = self.svc.route(self, method, self.path)
        except ServiceError as exc:
            self._send_json(exc.status, exc.body())
            return
        except BrokenPipeError:
            return
        except Exception as exc:  # surface unexpected bugs as 500s
            logger.exception("unhandled error")
            self._send_json(500, {"error": "internal", "message": str(exc)})
            return
        if not handled:
            self._send_json(404, {"error": "not-found", "message": self.path})

    def do_GET(self) -> None:
        self._dispatch("GET")

    def do_POST(self) -> None:
        self._dispatch("POST")

    def do_PUT(self) -> None:
        self._dispatch("PUT")

    def do_DELETE(self) -> None:
        self._dispatch("DELETE")

    def do_OPTIONS(self) -> None:
        self._send_empty(204)


class ScenlService:
    """Binds the store, session, and HTTP server together."""

    def __init__(
        self,
        data_dir: str | Path,
        registry: Registry,
        rules: tuple[SymbolicRule, ...] = (),
        host: str = "127.0.0.1",
        port: int = 0,
        threshold: int = 50,
        tick_ms: int = DEFAULT_TICK_MS,
        webhooks: Optional[dict[str, str]] = None,
        ui_dir: Optional[str | Path] = None,
    ):
        self.store = ScenarioStore(data_dir)
        self.registry = registry
        self.session = Session(
            registry, rules, self.store, threshold, tick_ms, webhooks
        )
        self.ui_dir = Path(ui_dir) if ui_dir else None
        self._httpd = ThreadingHTTPServer((host, port), _Handler)
        self._httpd.daemon_threads = True
        self._httpd.service = self  # type: ignore[attr-defined]
        self._thread: Optional[threading.Thread] = None
        self._closed = False

    @property
    def port(self) -> int:
        return self._httpd.server_address[1]

    @property
    def host(self) -> str:
        return self._httpd.server_address[0]

    def start(self) -> None:
        self._thread = threading.Thread(
            target=self._httpd.serve_forever, kwargs={"poll_interval": 0.05}, daemon=True
        )
        self._thread.start()

    def serve_forever(self) -> None:
        try:
            self._httpd.serve_forever(poll_interval=0.05)
        except KeyboardInterrupt:
            pass
        finally:
            self.stop()

    def stop(self) -> None:
        if self._closed:
            return
        self._closed = True
        self._httpd.shutdown()
        self.session.close()
        self._httpd.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)

    # --- routing -----------------------------------------------------------

    def route(self, handler: _Handler, method: str, path: str) -> bool:
        path = path.split("?", 1)[0]
        if method == "GET" and path == "/":
            from . import __version__

            handler._send_json(200, {"service": "scenl", "version": __version__})
            return True
        if method == "GET" and path == "/registry":
            handler._send_json(200, self._registry_json())
            return True
        if method == "POST" and path == "/check":
            body = handler._read_json()
            source = body.get("source")
            if not isinstance(source, str):
                raise ServiceError(400, "bad-request", "source (string) is required")
            handler._send_json(200, self._check(source))
            return True
        if path == "/scenarios" and method == "POST":
            self._create_scenario(handler)
            return True
        if path == "/scenarios" and method == "GET":
            handler._send_json(
                200, {"scenarios": [r.meta() for r in self.store.list()]}
            )
            return True
        match = re.fullmatch(r"/scenarios/([0-9a-f]+)", path)
        if match:
            return self._scenario_by_id(handler, method, match.group(1))
        if path == "/run/start" and method == "POST":
            body = handler._read_json()
            scenario_id = body.get("id")
            mode = body.get("mode", "manual")
            if not isinstance(scenario_id, str):
                raise ServiceError(400, "bad-request", "id (string) is required")
            if mode not in ("manual", "live"):
                raise ServiceError(400, "bad-request", "mode must be manual or live")
            handler._send_json(200, self.session.start(scenario_id, mode))
            return True
        if path == "/run/stop" and method == "POST":
            handler._send_json(200, self.session.stop())
            return True
        if path == "/run/inject" and method == "POST":
            handler._send_json(200, self.session.inject(handler._read_json()))
            return True
        if path == "/run/tick" and method == "POST":
            body = handler._read_json()
            count = body.get("count", 1)
            if not isinstance(count, int) or count < 1 or count > 100_000:
                raise ServiceError(400, "bad-request", "count must be 1..100000")
            handler._send_json(200, self.session.tick(count))
            return True
        if path == "/run/snapshot" and method == "GET":
            handler._send_json(200, self.session.snapshot())
            return True
        if path == "/run/stream" and method == "GET":
            self._stream(handler)
            return True
        if method == "GET" and (path == "/ui" or path.startswith("/ui/")):
            return self._serve_ui(handler, path)
        return False

    def _registry_json(self) -> dict:
        sensors = [
            {
                "sensor": desc.sensor,
                "events": [
                    {"name": name, "type": value_type}
                    for name, value_type in desc.events.items()
                ],
            }
            for desc in self.registry.sensors.values()
        ]
        entities = [
            {
                "entity": desc.entity,
                "functions": [
                    {"name": name, "kind": sig.kind, "arity": sig.arity}
                    for name, sig in desc.functions.items()
                ],
            }
            for desc in self.registry.entities.values()
        ]
        macros = [r.name for r in self.store.list() if r.macro]
        return {
            "sensors": sensors,
            "entities": entities,
            "macros": macros,
            "threshold": self.session.threshold,
        }

    def _check(self, source: str) -> dict:
        diagnostics = source_diagnostics(source, self.registry)
        canonical = None
        try:
            canonical = format_program(parse(source))
        except (LexError, ParseError):
            pass
        return {"diagnostics": diagnostics, "canonical": canonical}

    def _create_scenario(self, handler: _Handler) -> None:
        body = handler._read_json()
        name = body.get("name")
        source = body.get("source")
        macro = bool(body.get("macro", False))
        if not isinstance(name, str) or not name:
            raise ServiceError(400, "bad-request", "name (string) is required")
        if not isinstance(source, str):
            raise ServiceError(400, "bad-request", "source (string) is required")
        if macro and not _IDENT.match(name):
            raise ServiceError(
                400, "bad-request", "macro names must be valid identifiers"
            )
        record = self.store.create(name, source, macro)
        handler._send_json(
            201,
            {
                **record.meta(),
                "diagnostics": source_diagnostics(source, self.registry),
            },
        )

    def _scenario_by_id(self, handler: _Handler, method: str, scenario_id: str) -> bool:
        if method == "GET":
            try:
                record, source = self.store.get(scenario_id)
            except NotFoundError:
                raise ServiceError(404, "not-found", f"no scenario {scenario_id!r}")
            handler._send_json(
                200,
                {
                    **record.meta(),
                    "source": source,
                    "diagnostics": source_diagnostics(source, self.registry),
                },
            )
            return True
        if method == "PUT":
            body = handler._read_json()
            name = body.get("name")
            source = body.get("source")
            if name is not None and not isinstance(name, str):
                raise ServiceError(400, "bad-request", "name must be a string")
            if source is not None and not isinstance(source, str):
                raise ServiceError(400, "bad-request", "source must be a string")
            try:
                record = self.store.update(scenario_id, name=name, source=source)
                _, stored = self.store.get(scenario_id)
            except NotFoundError:
                raise ServiceError(404, "not-found", f"no scenario {scenario_id!r}")
            handler._send_json(
                200,
                {
                    **record.meta(),
                    "source": stored,
                    "diagnostics": source_diagnostics(stored, self.registry),
                },
            )
            return True
        if method == "DELETE":
            try:
                self.store.delete(scenario_id)
            except NotFoundError:
                raise ServiceError(404, "not-found", f"no scenario {scenario_id!r}")
            handler._send_empty(204)
            return True
        return False

    # --- streaming -----------------------------------------------------------

    def _stream(self, handler: _Handler) -> None:
        sub = self.session.subscribe()
        try:
            handler.send_response(200)
            handler._cors()
            handler.send_header("Content-Type", "application/x-ndjson")
            handler.send_header("Cache-Control", "no-store")
            handler.send_header("Transfer-Encoding", "chunked")
            handler.end_headers()
            while not self._closed:
                try:
                    record = sub.queue.get(timeout=0.25)
                except queue.Empty:
                    continue
                payload = (json.dumps(record_to_json(record)) + "\n").encode("utf-8")
                handler.wfile.write(b"%x\r\n" % len(payload) + payload + b"\r\n")
                handler.wfile.flush()
            handler.wfile.write(b"0\r\n\r\n")
        except (BrokenPipeError, ConnectionResetError):
            pass
        finally:
            self.session.unsubscribe(sub)

    # --- static UI -------------------------------------------------------------

    _CONTENT_TYPES = {
        ".html": "text/html; charset=utf-8",
        ".js": "text/javascript; charset=utf-8",
        ".css": "text/css; charset=utf-8",
        ".json": "application/json",
        ".svg": "image/svg+xml",
        ".png": "image/png",
    }

    def _serve_ui(self, handler: _Handler, path: str) -> bool:
        if self.ui_dir is None:
            return False
        rel = path[len("/ui"):].lstrip("/") or "index.html"
        root = self.ui_dir.resolve()
        target = (root / rel).resolve()
        if not str(target).startswith(str(root)) or not target.is_file():
            raise ServiceError(404, "not-found", path)
        body = target.read_bytes()
        handler.send_response(200)
        handler._cors()
        handler.send_header(
            "Content-Type",
            self._CONTENT_TYPES.get(target.suffix, "application/octet-stream"),
        )
        handler.send_header("Content-Length", str(len(body)))
        handler.end_headers()
        handler.wfile.write(body)
        return True
