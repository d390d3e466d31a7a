"""What-if HTTP service: uploaded graphs, analyst sessions, verdict endpoints.

Graphs are immutable and shared across sessions; a session holds only its
scenario and the ordered list of staged transactions (an overlay replayed on
demand). Uploads and staging operations are journalled to the data directory
and replayed on boot, so analyst state survives restarts.
"""

from __future__ import annotations

import hashlib
import io
import json
import logging
import os
import re
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .analytics import analytics_report
from .conglomerates import conglomerates
from .errors import OwnetError, UnknownEntityError
from .goldenpower import (
    Scenario,
    cautious_gp_check,
    collusion_gp_check,
    gp_check,
    gp_limit,
    gp_protection,
)
from .model import OwnershipGraph, Transaction, apply_transactions, load_graph

log = logging.getLogger("ownet.service")


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        self.status = status
        self.code = code
        self.message = message
        super().__init__(message)


def _not_found(what: str) -> ApiError:
    return ApiError(404, "not_found", what)


@dataclass
class Session:
    session_id: str
    graph_id: str
    scenario: Scenario
    staged: list[Transaction] = field(default_factory=list)
    created: str = ""
    updated: str = ""
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def info(self) -> dict:
        return {
            "session_id": self.session_id,
            "graph_id": self.graph_id,
            "scenario": self.scenario.to_dict(),
            "staged": [t.to_dict() for t in self.staged],
            "created": self.created,
            "updated": self.updated,
        }


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


class Store:
    """In-memory state plus an append-only journal for crash recovery."""

    def __init__(self, data_dir: str | None):
        self.graphs: dict[str, OwnershipGraph] = {}
        self.sessions: dict[str, Session] = {}
        self.data_dir = data_dir
        self._journal_lock = threading.Lock()
        if data_dir:
            os.makedirs(os.path.join(data_dir, "graphs"), exist_ok=True)
            self._replay()

    # -- persistence -------------------------------------------------------

    def _journal_path(self) -> str:
        return os.path.join(self.data_dir, "journal.jsonl")

    def _append(self, event: dict) -> None:
        if not self.data_dir:
            return
        with self._journal_lock:
            with open(self._journal_path(), "a") as fh:
                fh.write(json.dumps(event) + "\n")

    def _replay(self) -> None:
        path = self._journal_path()
        if not os.path.exists(path):
            return
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                try:
                    event = json.loads(line)
                    self._apply_event(event)
                except (OwnetError, ApiError, KeyError, ValueError) as exc:
                    log.warning("journal replay skipped event: %s", exc)

    def _apply_event(self, event: dict) -> None:
        op = event["op"]
        if op == "graph":
            gid = event["graph_id"]
            nodes = os.path.join(self.data_dir, "graphs", f"{gid}.nodes.csv")
            edges = os.path.join(self.data_dir, "graphs", f"{gid}.edges.csv")
            with open(nodes, newline="") as nf, open(edges, newline="") as ef:
                self.graphs[gid] = load_graph(nf, ef)
        elif op == "session":
            sess = Session(
                session_id=event["session_id"],
                graph_id=event["graph_id"],
                scenario=Scenario.from_dict(event["scenario"]),
                created=event.get("created", _now()),
                updated=event.get("created", _now()),
            )
            if sess.graph_id not in self.graphs:
                raise ApiError(409, "replay_failure", f"graph {sess.graph_id} missing")
            sess.staged = list(sess.scenario.staged)
            self.sessions[sess.session_id] = sess
        elif op == "stage":
            sess = self.sessions[event["session_id"]]
            sess.staged.append(Transaction.from_dict(event["transaction"]))
            sess.updated = event.get("at", _now())
        elif op == "unstage":
            sess = self.sessions[event["session_id"]]
            k = int(event["index"])
            if 0 <= k < len(sess.staged):
                sess.staged.pop(k)
            sess.updated = event.get("at", _now())

    # -- operations ---------------------------------------------------------

    def add_graph(self, nodes_csv: bytes, edges_csv: bytes) -> str:
        gid = hashlib.sha256(nodes_csv + b"\x00" + edges_csv).hexdigest()[:16]
        if gid in self.graphs:
            return gid
        try:
            g = load_graph(
                io.StringIO(nodes_csv.decode("utf-8")), io.StringIO(edges_csv.decode("utf-8"))
            )
        except UnicodeDecodeError as exc:
            raise ApiError(422, "invalid_payload", f"CSV not valid UTF-8: {exc}") from exc
        if self.data_dir:
            base = os.path.join(self.data_dir, "graphs", gid)
            with open(base + ".nodes.csv", "wb") as fh:
                fh.write(nodes_csv)
            with open(base + ".edges.csv", "wb") as fh:
                fh.write(edges_csv)
        self.graphs[gid] = g
        self._append({"op": "graph", "graph_id": gid})
        return gid

    def graph(self, gid: str) -> OwnershipGraph:
        try:
            return self.graphs[gid]
        except KeyError:
            raise _not_found(f"graph {gid} not found") from None

    def create_session(self, graph_id: str, scenario: Scenario) -> Session:
        g = self.graph(graph_id)
        try:
            apply_transactions(g, scenario.staged)
        except OwnetError as exc:
            raise ApiError(409, "replay_failure", str(exc)) from exc
        sess = Session(
            session_id=uuid.uuid4().hex,
            graph_id=graph_id,
            scenario=scenario,
            staged=list(scenario.staged),
            created=_now(),
            updated=_now(),
        )
        self.sessions[sess.session_id] = sess
        self._append(
            {
                "op": "session",
                "session_id": sess.session_id,
                "graph_id": graph_id,
                "scenario": scenario.to_dict(),
                "created": sess.created,
            }
        )
        return sess

    def session(self, sid: str) -> Session:
        try:
            return self.sessions[sid]
        except KeyError:
            raise _not_found(f"session {sid} not found") from None


# -- multipart parsing ---------------------------------------------------------

_DISPOSITION_NAME = re.compile(rb'name="([^"]*)"')


def parse_multipart(content_type: str, body: bytes) -> dict[str, bytes]:
    """Minimal multipart/form-data parser for well-formed clients."""
    m = re.search(r'boundary="?([^";]+)"?', content_type)
    if not m:
        raise ApiError(422, "invalid_payload", "multipart boundary missing")
    delim = b"--" + m.group(1).encode()
    parts: dict[str, bytes] = {}
    for chunk in body.split(delim):
        chunk = chunk.strip(b"\r\n")
        if not chunk or chunk == b"--":
            continue
        if b"\r\n\r\n" not in chunk:
            continue
        header, payload = chunk.split(b"\r\n\r\n", 1)
        name = _DISPOSITION_NAME.search(header)
        if name:
            parts[name.group(1).decode()] = payload
    return parts


# -- request-body helpers --------------------------------------------------------


def _parse_transaction(payload: dict) -> Transaction:
    try:
        return Transaction.from_dict(payload)
    except (KeyError, TypeError, ValueError) as exc:
        raise ApiError(422, "invalid_payload", f"bad transaction: {exc}") from exc
    except OwnetError as exc:
        raise ApiError(422, "invalid_payload", str(exc)) from exc


def _parse_scenario(payload: dict) -> Scenario:
    try:
        return Scenario.from_dict(payload)
    except (KeyError, TypeError, ValueError) as exc:
        raise ApiError(422, "invalid_payload", f"bad scenario: {exc}") from exc
    except OwnetError as exc:
        raise ApiError(422, "invalid_payload", str(exc)) from exc


def _session_scenario(sess: Session) -> Scenario:
    return sess.scenario.with_staged(sess.staged)


# -- app ------------------------------------------------------------------------


def create_app(data_dir: str | None = None, frontend_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="ownet what-if service", version="0.1.0")
    store = Store(data_dir)
    app.state.store = store

    @app.exception_handler(ApiError)
    async def _api_error(_req: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status, content={"code": exc.code, "message": exc.message})

    @app.exception_handler(UnknownEntityError)
    async def _unknown(_req: Request, exc: UnknownEntityError):
        return JSONResponse(status_code=404, content={"code": "not_found", "message": str(exc)})

    @app.exception_handler(OwnetError)
    async def _domain(_req: Request, exc: OwnetError):
        return JSONResponse(status_code=422, content={"code": "domain_error", "message": str(exc)})

    @app.post("/graphs")
    async def upload_graph(request: Request):
        ctype = request.headers.get("content-type", "")
        body = await request.body()
        if ctype.startswith("multipart/form-data"):
            parts = parse_multipart(ctype, body)
        elif ctype.startswith("application/json"):
            payload = json.loads(body)
            parts = {
                "nodes": payload.get("nodes_csv", "").encode(),
                "edges": payload.get("edges_csv", "").encode(),
            }
        else:
            raise ApiError(422, "invalid_payload", f"unsupported content type {ctype!r}")
        if "nodes" not in parts or "edges" not in parts:
            raise ApiError(422, "invalid_payload", "multipart fields 'nodes' and 'edges' required")
        try:
            gid = store.add_graph(parts["nodes"], parts["edges"])
        except OwnetError as exc:
            raise ApiError(422, "invalid_payload", str(exc)) from exc
        return {"graph_id": gid}

    @app.get("/graphs/{gid}/stats")
    def graph_stats(gid: str):
        return analytics_report(store.graph(gid)).to_dict()

    @app.get("/graphs/{gid}/conglomerates")
    def graph_conglomerates(gid: str, epsilon: float = 0.5):
        if epsilon <= 0:
            raise ApiError(422, "invalid_payload", "epsilon must be positive")
        return conglomerates(store.graph(gid), epsilon).to_dict()

    @app.get("/graphs/{gid}/entities/{eid}/neighborhood")
    def neighborhood(gid: str, eid: str, radius: int = 1, limit: int = 300):
        g = store.graph(gid)
        if eid not in g:
            raise _not_found(f"entity {eid} not found")
        radius = max(0, min(radius, 5))
        keep = {eid}
        frontier = [eid]
        truncated = False
        for _ in range(radius):
            nxt = []
            for v in frontier:
                for other, _w in sorted(g.out_items(v)) + sorted(g.in_items(v)):
                    if other not in keep:
                        if len(keep) >= limit:
                            truncated = True
                            break
                        keep.add(other)
                        nxt.append(other)
            frontier = sorted(nxt)
        sub = g.induced_subgraph(keep)
        return {
            "center": eid,
            "radius": radius,
            "truncated": truncated,
            "entities": [
                {
                    "id": e.id,
                    "kind": e.kind,
                    "name": e.name,
                    "activity_code": e.activity_code,
                    "region": e.region,
                    "strategic": e.strategic,
                    "foreign": e.foreign,
                    "public": e.public,
                }
                for e in sub.entities
            ],
            "edges": [
                {"owner": a, "owned": b, "share": w} for a, b, w in sub.edge_triples()
            ],
        }

    @app.post("/sessions")
    def create_session(payload: dict):
        graph_id = payload.get("graph_id")
        if not graph_id:
            raise ApiError(422, "invalid_payload", "graph_id required")
        scenario = _parse_scenario(payload.get("scenario", {}))
        sess = store.create_session(graph_id, scenario)
        return {"session_id": sess.session_id, "session": sess.info()}

    @app.get("/sessions/{sid}")
    def session_info(sid: str):
        return store.session(sid).info()

    @app.post("/sessions/{sid}/stage")
    def stage(sid: str, payload: dict):
        sess = store.session(sid)
        t = _parse_transaction(payload)
        with sess.lock:
            g = store.graph(sess.graph_id)
            try:
                apply_transactions(g, sess.staged + [t])
            except UnknownEntityError:
                raise
            except OwnetError as exc:
                raise ApiError(409, "replay_failure", str(exc)) from exc
            sess.staged.append(t)
            sess.updated = _now()
            store._append({"op": "stage", "session_id": sid, "transaction": t.to_dict(), "at": sess.updated})
            return {"staged": [x.to_dict() for x in sess.staged]}

    @app.delete("/sessions/{sid}/stage/{k}")
    def unstage(sid: str, k: int):
        sess = store.session(sid)
        with sess.lock:
            if not 0 <= k < len(sess.staged):
                raise _not_found(f"staged index {k} out of range")
            sess.staged.pop(k)
            sess.updated = _now()
            store._append({"op": "unstage", "session_id": sid, "index": k, "at": sess.updated})
            return {"staged": [x.to_dict() for x in sess.staged]}

    def _verdict(sid: str, payload: dict, checker) -> dict:
        sess = store.session(sid)
        t = _parse_transaction(payload)
        g = store.graph(sess.graph_id)
        verdict = checker(g, _session_scenario(sess), t)
        if payload.get("commit"):
            with sess.lock:
                sess.staged.append(t)
                sess.updated = _now()
                store._append(
                    {"op": "stage", "session_id": sid, "transaction": t.to_dict(), "at": sess.updated}
                )
        return verdict.to_dict()

    @app.post("/sessions/{sid}/check")
    def check(sid: str, payload: dict):
        return _verdict(sid, payload, gp_check)

    @app.post("/sessions/{sid}/collude")
    def collude(sid: str, payload: dict):
        return _verdict(sid, payload, collusion_gp_check)

    @app.post("/sessions/{sid}/cautious")
    def cautious(sid: str, payload: dict):
        f = payload.get("f")
        if not f:
            raise ApiError(422, "invalid_payload", "field 'f' (the assumed owner) required")
        return _verdict(sid, payload, lambda g, sc, t: cautious_gp_check(g, sc, t, f))

    @app.post("/sessions/{sid}/limit")
    def limit(sid: str, payload: dict):
        sess = store.session(sid)
        buyer = payload.get("buyer")
        target = payload.get("target")
        if not buyer or not target:
            raise ApiError(422, "invalid_payload", "buyer and target required")
        quantum = float(payload.get("quantum", 1e-4))
        g = store.graph(sess.graph_id)
        return gp_limit(g, _session_scenario(sess), buyer, target, quantum=quantum).to_dict()

    @app.post("/sessions/{sid}/protect")
    def protect(sid: str, payload: dict):
        sess = store.session(sid)
        with_intermediaries = bool(payload.get("with_intermediaries", False))
        quantum = float(payload.get("quantum", 0.01))
        g = store.graph(sess.graph_id)
        plan = gp_protection(
            g, _session_scenario(sess), with_intermediaries=with_intermediaries, quantum=quantum
        )
        return plan.to_dict()

    ui_dir = frontend_dir or os.environ.get("OWNET_UI_DIR")
    if ui_dir and os.path.isdir(ui_dir):
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
