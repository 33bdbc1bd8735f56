"""Stateless HTTP service exposing extraction, planning and paraphrasing.

All response payloads are assembled by the ``Api`` class from plain dicts;
the FastAPI layer is a thin adapter, so a library call and an HTTP call with
the same inputs produce byte-identical JSON. Floats are rounded to 6 decimal
places at the payload boundary to keep golden outputs stable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response

from .channel import RoundTripPair, channel_to_dict, profile_channel, simulate_channel
from .errors import (
    ConfigError,
    EmptyPairsError,
    EmptyPoolError,
    InfeasiblePlanError,
    NoSafeStrategyError,
    PoliteplanError,
    UnknownStrategyError,
)
from .extraction import extract_strategies, tokenize
from .perception import perceive
from .planner import Circumstance, build_problem, plan_greedy, plan_ilp, plan_none, plan_oracle, plan_retrieval
from .realizer import realize_alternatives
from .registry import resolve_channel, resolve_lexicon, resolve_model


class ApiError(PoliteplanError):
    def __init__(self, code: str, message: str, status: int = 400, detail: str = ""):
        super().__init__(message)
        self.code = code
        self.message = message
        self.status = status
        self.detail = detail

    def payload(self) -> dict:
        return {"code": self.code, "message": self.message, "detail": self.detail}


@dataclass(frozen=True)
class ServiceConfig:
    lexicon: str = "builtin"
    models: dict[str, str] = field(
        default_factory=lambda: {"average": "builtin:average"}
    )
    channels: dict[str, str] = field(
        default_factory=lambda: {"mt-lossy": "builtin:mt-lossy", "all-safe": "builtin:all-safe"}
    )
    host: str = "127.0.0.1"
    port: int = 8023


def load_service_config(path) -> ServiceConfig:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise ConfigError("service config must be an object")
    unknown = set(doc) - {"lexicon", "models", "channels", "host", "port"}
    if unknown:
        raise ConfigError(f"unknown service config fields: {sorted(unknown)}")
    return ServiceConfig(**doc)


def _round_floats(value, places: int = 6):
    if isinstance(value, float):
        return round(value, places)
    if isinstance(value, dict):
        return {k: _round_floats(v, places) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round_floats(v, places) for v in value]
    return value


def render_json(payload: dict) -> bytes:
    """The exact byte serialization the HTTP layer uses."""
    return json.dumps(
        payload, ensure_ascii=False, allow_nan=False, indent=None, separators=(",", ":")
    ).encode("utf-8")


class Api:
    """Request handlers over an immutable registry of profiles."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self.lexicon = resolve_lexicon(config.lexicon)
        self.models = {name: resolve_model(ref) for name, ref in config.models.items()}
        self.channels = {
            name: resolve_channel(ref, self.lexicon) for name, ref in config.channels.items()
        }

    # -- registry lookups ------------------------------------------------

    def _model(self, name: str):
        try:
            return self.models[name]
        except KeyError:
            raise ApiError("unknown_profile", f"unknown perception model {name!r}", 404) from None

    def _channel(self, name: str):
        try:
            return self.channels[name]
        except KeyError:
            raise ApiError("unknown_profile", f"unknown channel {name!r}", 404) from None

    def _require(self, body: dict, key: str):
        if key not in body:
            raise ApiError("invalid_request", f"missing field {key!r}", 400)
        return body[key]

    def _circumstance(self, body: dict) -> Circumstance:
        return Circumstance(
            sender=self._model(self._require(body, "sender")),
            receiver=self._model(self._require(body, "receiver")),
            channel=self._channel(self._require(body, "channel")),
            lexicon=self.lexicon,
        )

    def _problem(self, body: dict, circ: Circumstance):
        negativity = body.get("negativity")
        return build_problem(
            str(self._require(body, "message")),
            circ,
            max_added=int(body.get("max_added", 3)),
            negativity=None if negativity in (None, "auto") else bool(negativity),
            subj_ind=bool(body.get("subj_ind", True)),
        )

    def _plan(self, body: dict, circ, problem):
        method = body.get("method", "ilp")
        try:
            if method == "ilp":
                return plan_ilp(problem, circ)
            if method == "greedy":
                return plan_greedy(problem, circ)
            if method == "oracle":
                return plan_oracle(problem, circ)
            if method == "none":
                return plan_none(problem, circ)
            if method == "retrieval":
                corpus = body.get("corpus")
                if not corpus:
                    raise ApiError(
                        "invalid_request", "retrieval planning needs a 'corpus' list", 400
                    )
                return plan_retrieval(problem, circ, [str(t) for t in corpus])
        except InfeasiblePlanError as exc:
            raise ApiError("infeasible", str(exc), 422) from exc
        except (NoSafeStrategyError, EmptyPoolError) as exc:
            raise ApiError("no_candidates", str(exc), 422) from exc
        raise ApiError("invalid_request", f"unknown planning method {method!r}", 400)

    # -- endpoint payloads -------------------------------------------------

    def health(self) -> dict:
        return {"status": "ok", "lexicon_version": self.lexicon.version}

    def strategies(self) -> dict:
        return {
            "lexicon_version": self.lexicon.version,
            "strategies": [
                {
                    "id": s.id,
                    "delete_mode": s.delete_mode.value,
                    "markers": [" ".join(m.tokens) for m in s.markers],
                }
                for s in self.lexicon.strategies
            ],
        }

    def profiles(self) -> dict:
        return {
            "lexicon_version": self.lexicon.version,
            "models": sorted(self.models),
            "channels": sorted(self.channels),
        }

    def extract(self, body: dict) -> dict:
        message = str(self._require(body, "message"))
        m = tokenize(message)
        ex = extract_strategies(m, self.lexicon)
        return _round_floats(
            {
                "message": message,
                "strategies": self.lexicon.sort_ids(ex.strategies),
                "occurrences": [
                    {
                        "strategy": o.strategy,
                        "start_token": o.start,
                        "end_token": o.end,
                        "start_char": m.tokens[o.start].start,
                        "end_char": m.tokens[o.end - 1].end,
                        "text": o.text(m),
                    }
                    for o in ex.occurrences
                ],
            }
        )

    def perceive_level(self, body: dict) -> dict:
        model = self._model(self._require(body, "model"))
        if "strategies" in body:
            s_set = frozenset(str(s) for s in body["strategies"])
        else:
            message = str(self._require(body, "message"))
            s_set = extract_strategies(tokenize(message), self.lexicon).strategies
        try:
            level = perceive(model, s_set)
        except UnknownStrategyError as exc:
            raise ApiError("unknown_strategy", str(exc), 400) from exc
        known = set(self.lexicon.ids())
        listed = self.lexicon.sort_ids(s_set & known) + sorted(s_set - known)
        return _round_floats({"strategies": listed, "level": level})

    def plan(self, body: dict) -> dict:
        circ = self._circumstance(body)
        problem = self._problem(body, circ)
        plan = self._plan(body, circ, problem)
        return _round_floats(
            {
                "message": str(body["message"]),
                "method": plan.method,
                "s_in": self.lexicon.sort_ids(problem.s_in),
                "target": problem.target,
                "s_out": self.lexicon.sort_ids(plan.s_out),
                "achieved": plan.achieved,
                "gap": plan.gap,
                "added": self.lexicon.sort_ids(plan.added),
                "removed": self.lexicon.sort_ids(plan.removed),
                "nodes": plan.nodes,
            }
        )

    def paraphrase(self, body: dict) -> dict:
        circ = self._circumstance(body)
        problem = self._problem(body, circ)
        plan = self._plan(body, circ, problem)
        beam = int(body.get("beam", 3))
        n_alternatives = int(body.get("alternatives", 3))
        message = str(body["message"])
        m = tokenize(message)
        candidates = realize_alternatives(m, plan, circ, beam=beam)[:n_alternatives]
        view = extract_strategies(
            simulate_channel(m, circ.channel, circ.lexicon), circ.lexicon
        ).strategies
        no_intervention_gap = abs(problem.target - perceive(circ.receiver, view))
        return _round_floats(
            {
                "message": message,
                "original": {
                    "strategies": self.lexicon.sort_ids(problem.s_in),
                    "intended": problem.target,
                },
                "no_intervention_gap": no_intervention_gap,
                "plan": {
                    "method": plan.method,
                    "s_out": self.lexicon.sort_ids(plan.s_out),
                    "gap": plan.gap,
                },
                "alternatives": [
                    {
                        "text": c.text,
                        "strategies": self.lexicon.sort_ids(c.realized),
                        "predicted": c.predicted,
                        "gap": c.gap,
                        "shortfall": c.shortfall,
                        "trace": [
                            {
                                "strategy": step.strategy,
                                "template": step.template_text,
                                "anchor": step.anchor,
                                "offset": step.offset,
                            }
                            for step in c.trace
                        ],
                    }
                    for c in sorted(candidates, key=lambda c: c.gap)
                ],
            }
        )

    def profile(self, body: dict) -> dict:
        raw_pairs = self._require(body, "pairs")
        threshold = float(body.get("threshold", 0.5))
        try:
            pairs = [
                RoundTripPair(original=str(p["original"]), round_trip=str(p["round_trip"]))
                for p in raw_pairs
            ]
        except (TypeError, KeyError, ValueError) as exc:
            raise ApiError("invalid_request", f"malformed pair list: {exc}", 400) from exc
        try:
            spec = profile_channel(pairs, self.lexicon, threshold=threshold)
        except EmptyPairsError as exc:
            raise ApiError("invalid_request", str(exc), 400) from exc
        doc = channel_to_dict(spec)
        doc["at_risk"] = self.lexicon.sort_ids(spec.at_risk())
        doc["unsupported"] = list(spec.unsupported)
        doc["stats"] = {
            s: {"support": st.support, "lost": st.lost, "loss_rate": _round_floats(st.loss_rate)}
            for s, st in (spec.stats or {}).items()
        }
        return doc


def create_app(config: ServiceConfig | None = None, static_dir: str | None = None) -> FastAPI:
    """FastAPI application over an Api registry; stateless per request.

    ``static_dir`` optionally mounts a built frontend at the web root.
    """
    app = FastAPI(title="politeplan", docs_url=None, redoc_url=None)
    app.state.config = config or ServiceConfig()
    app.state.api = Api(app.state.config)

    def respond(payload: dict, status: int = 200) -> Response:
        return Response(
            content=render_json(payload), status_code=status, media_type="application/json"
        )

    @app.exception_handler(ApiError)
    async def handle_api_error(request: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status, content=exc.payload())

    @app.exception_handler(PoliteplanError)
    async def handle_domain_error(request: Request, exc: PoliteplanError):
        return JSONResponse(
            status_code=400,
            content={"code": "domain_error", "message": str(exc), "detail": ""},
        )

    @app.get("/v1/health")
    async def health():
        return respond(app.state.api.health())

    @app.get("/v1/strategies")
    async def strategies():
        return respond(app.state.api.strategies())

    @app.get("/v1/profiles")
    async def profiles():
        return respond(app.state.api.profiles())

    @app.post("/v1/extract")
    async def extract(request: Request):
        return respond(app.state.api.extract(await _body(request)))

    @app.post("/v1/perceive")
    async def perceive_level(request: Request):
        return respond(app.state.api.perceive_level(await _body(request)))

    @app.post("/v1/plan")
    async def plan(request: Request):
        return respond(app.state.api.plan(await _body(request)))

    @app.post("/v1/paraphrase")
    async def paraphrase(request: Request):
        return respond(app.state.api.paraphrase(await _body(request)))

    @app.post("/v1/channel/profile")
    async def profile(request: Request):
        return respond(app.state.api.profile(await _body(request)))

    @app.post("/v1/admin/reload")
    async def reload():
        app.state.api = Api(app.state.config)
        return respond({"status": "reloaded"})

    async def _body(request: Request) -> dict:
        try:
            body = await request.json()
        except Exception:
            raise ApiError("invalid_request", "request body must be JSON", 400) from None
        if not isinstance(body, dict):
            raise ApiError("invalid_request", "request body must be a JSON object", 400)
        return body

    if static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="static")

    return app


def serve(
    config: ServiceConfig | None = None,
    host: str | None = None,
    port: int | None = None,
    static_dir: str | None = None,
):
    """Run the service with uvicorn (blocking)."""
    import uvicorn

    config = config or ServiceConfig()
    app = create_app(config, static_dir=static_dir)
    uvicorn.run(app, host=host or config.host, port=port or config.port, log_level="info")
