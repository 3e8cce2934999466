"""HTTP facade exposing as-you-type search sessions.

One process loads a corpus, completion index and user network at
startup and serves per-keystroke queries.  Sessions are in-memory,
keyed by opaque ids, expired after a TTL, and serialized per id with a
lock; the shared corpus/index/graph are immutable.
"""

from __future__ import annotations

import argparse
import threading
import time
import uuid

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .completion import build_index
from .corpus import ingest_triples
from .engine import EngineConfig, Session
from .graph import NetworkSpec, build_network, load_edges

DEFAULT_TTL_S = 600.0


def result_json(result):
    """Wire form of a TopKResult; scores as 6-digit decimal strings."""
    return {
        "entries": [
            {
                "item": e.item,
                "min": "%.6f" % e.score_min,
                "max": "%.6f" % e.score_max,
                "status": e.status,
            }
            for e in result.entries
        ],
        "exact": result.exact,
        "elapsed_ms": result.elapsed_ms,
        "visited_users": result.visited_users,
    }


class _LiveSession:
    __slots__ = ("engine", "lock", "last_activity", "last_result")

    def __init__(self, engine):
        self.engine = engine
        self.lock = threading.Lock()
        self.last_activity = time.monotonic()
        self.last_result = result_json(engine.run(budget_ms=0.0))


class SessionManager:
    def __init__(self, corpus, index, graph, ttl_s=DEFAULT_TTL_S):
        self.corpus = corpus
        self.index = index
        self.graph = graph
        self.ttl_s = ttl_s
        self._lock = threading.Lock()
        self._sessions = {}

    def _sweep(self, now):
        dead = [sid for sid, s in self._sessions.items()
                if now - s.last_activity > self.ttl_s]
        for sid in dead:
            del self._sessions[sid]

    def create(self, seeker, config):
        engine = Session(self.corpus, self.index, self.graph, seeker, config)
        live = _LiveSession(engine)
        sid = uuid.uuid4().hex
        with self._lock:
            self._sweep(time.monotonic())
            self._sessions[sid] = live
        return sid

    def get(self, sid):
        with self._lock:
            live = self._sessions.get(sid)
            if live is None:
                return None
            if time.monotonic() - live.last_activity > self.ttl_s:
                del self._sessions[sid]
                return None
            return live

    def replace_engine(self, sid, engine):
        with self._lock:
            live = self._sessions.get(sid)
            if live is not None:
                live.engine = engine

    def count(self):
        with self._lock:
            return len(self._sessions)


def _error(status, message):
    return JSONResponse({"error": message}, status_code=status)


def _parse_config_payload(data, defaults: EngineConfig):
    try:
        k = int(data.get("k", defaults.k))
        alpha = float(data.get("alpha", defaults.alpha))
        budget = data.get("budget_ms", defaults.time_budget_ms)
        budget = None if budget is None else float(budget)
    except (TypeError, ValueError):
        return None
    try:
        return EngineConfig(
            k=k,
            alpha=alpha,
            tf_scale=defaults.tf_scale,
            score_transform=defaults.score_transform,
            time_budget_ms=budget,
            max_visited_users=defaults.max_visited_users,
        )
    except ValueError:
        return None


def create_app(corpus, index, graph, defaults: EngineConfig | None = None,
               allow_unknown: bool = False,
               ttl_s: float = DEFAULT_TTL_S) -> FastAPI:
    defaults = defaults or EngineConfig()
    app = FastAPI(title="tagsearch")
    manager = SessionManager(corpus, index, graph, ttl_s=ttl_s)
    app.state.manager = manager

    async def _json_body(request):
        try:
            data = await request.json()
        except Exception:
            return None
        return data if isinstance(data, dict) else None

    @app.post("/sessions")
    async def create_session(request: Request):
        data = await _json_body(request)
        if data is None:
            return _error(400, "body must be a JSON object")
        seeker = data.get("seeker")
        if not isinstance(seeker, str) or not seeker:
            return _error(400, "seeker is required")
        if corpus.users.get(seeker) is None and not allow_unknown:
            return _error(404, "unknown seeker: %s" % seeker)
        config = _parse_config_payload(data, defaults)
        if config is None:
            return _error(400, "invalid session parameters")
        sid = manager.create(seeker, config)
        return JSONResponse({"session_id": sid}, status_code=201)

    @app.post("/sessions/{sid}/keystroke")
    async def keystroke(sid: str, request: Request):
        live = manager.get(sid)
        if live is None:
            return _error(404, "unknown or expired session")
        data = await _json_body(request)
        if data is None:
            return _error(400, "body must be a JSON object")
        event = data.get("event")
        if event not in ("char", "new_term", "backspace"):
            return _error(400, "event must be char, new_term or backspace")
        with live.lock:
            engine = live.engine
            if event == "char":
                value = data.get("value")
                if not isinstance(value, str) or len(value) != 1 \
                        or value.isspace():
                    return _error(400, "char events need a single character")
                result = engine.keystroke("char", value)
            elif event == "new_term":
                result = engine.keystroke("new_term")
            else:
                # Replay everything but the last event on fresh state; the
                # shared data is immutable so this is deterministic.
                log = engine.event_log[:-1]
                engine = Session(manager.corpus, manager.index,
                                 manager.graph, engine.seeker, engine.config)
                result = engine.run(budget_ms=0.0)
                for ev, value in log:
                    result = engine.keystroke(ev, value)
                manager.replace_engine(sid, engine)
                live.engine = engine
            payload = result_json(result)
            live.last_result = payload
            live.last_activity = time.monotonic()
        return JSONResponse(payload)

    @app.get("/sessions/{sid}/result")
    async def last_result(sid: str):
        live = manager.get(sid)
        if live is None:
            return _error(404, "unknown or expired session")
        with live.lock:
            live.last_activity = time.monotonic()
            return JSONResponse(live.last_result)

    @app.get("/health")
    async def health():
        return {
            "status": "ok",
            "users": len(corpus.users),
            "items": len(corpus.items),
            "tags": len(corpus.tags),
            "triples": len(corpus._triples),
            "edges": graph.n_edges() if graph is not None else 0,
            "sessions": manager.count(),
        }

    return app


def load_service_config(path):
    """Flat key=value startup file; '#' starts a comment."""
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError("expected key=value, got: %s" % raw.strip())
            key, _, value = line.partition("=")
            values[key.strip()] = value.strip()
    return values


_TRUE = {"1", "true", "yes", "on"}


def build_app_from_config(values):
    if "triples" not in values:
        raise ValueError("config needs a 'triples' path")
    corpus = ingest_triples(values["triples"])
    kind = values.get("network", "social")
    theta = float(values.get("theta", 0.0))
    if kind == "social":
        if "edges" not in values:
            raise ValueError("network=social needs an 'edges' path")
        graph = load_edges(values["edges"], corpus)
        graph = build_network(corpus, NetworkSpec("social", theta), graph)
    else:
        graph = build_network(corpus, NetworkSpec(kind, theta))
    index = build_index(corpus)
    budget = values.get("budget_ms", "50")
    defaults = EngineConfig(
        k=int(values.get("k", 10)),
        alpha=float(values.get("alpha", 0.0)),
        tf_scale=float(values.get("tf_scale", 1.0)),
        score_transform=values.get("score_transform", "identity"),
        time_budget_ms=None if budget in ("", "none") else float(budget),
    )
    return create_app(
        corpus, index, graph,
        defaults=defaults,
        allow_unknown=values.get("allow_unknown", "").lower() in _TRUE,
        ttl_s=float(values.get("ttl_s", DEFAULT_TTL_S)),
    )


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="tagsearch-serve",
        description="serve as-you-type search over a tagging dataset")
    parser.add_argument("--config", required=True,
                        help="flat key=value startup file")
    parser.add_argument("--port", type=int, default=8000)
    parser.add_argument("--host", default="127.0.0.1")
    args = parser.parse_args(argv)
    app = build_app_from_config(load_service_config(args.config))

    import uvicorn

    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")


if __name__ == "__main__":
    main()
