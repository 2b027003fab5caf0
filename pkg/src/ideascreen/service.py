"""HTTP facade: ingest ideas, serve a ranked triage queue, record human
decisions that train the online model, and expose model internals.

One writer: decisions serialize through a lock and append to a durable
log; snapshots of the full ensemble state land every N decisions.
Recovery is snapshot plus log-tail replay, which reproduces the exact
ensemble because every step is deterministic given the stored state.
Queue scoring uses the weight-averaged ensemble probability so ranking
is stable between decisions; sampling stays reserved for learning steps.
"""

from __future__ import annotations

import copy
import datetime as dt
import json
import os
import threading
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from . import olr
from .corpus import IdeaRecord, parse_record, to_idea_text
from .extraction import extract_terms
from .lingua import Dictionaries, default_dict_dir
from .olr import EnsembleState, HyperParams, kernels
from .scoring import (
    FileTrendProvider,
    Measurements,
    ScopeWeights,
    feature_vector,
    measure_idea,
)

__all__ = ["ServiceConfig", "IdeaService", "create_app", "ApiError"]


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, detail=None):
        self.status = status
        self.code = code
        self.message = message
        self.detail = detail
        super().__init__(message)

    def body(self) -> dict:
        return {"code": self.code, "message": self.message, "detail": self.detail}


@dataclass
class ServiceConfig:
    data_dir: Path
    dict_dir: Path | None = None
    trend_file: Path | None = None
    hyper: HyperParams = field(default_factory=HyperParams)
    seed: int = 42
    snapshot_interval: int = 5
    scope_setting: int = 1
    trend_window: int = 1
    token: str | None = None

    def __post_init__(self):
        self.data_dir = Path(self.data_dir)
        if self.snapshot_interval < 1:
            raise ValueError("snapshot_interval must be >= 1")


@dataclass
class IdeaEntry:
    record: IdeaRecord
    raw: dict
    terms_rt: list[str]
    terms_kt: list[str]
    measurements: Measurements
    x: tuple[float, ...]
    decided: bool = False
    decision: dict | None = None


def _atomic_write(path: Path, payload: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(payload)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


class IdeaService:
    """State container behind the HTTP endpoints; usable directly in
    tests without a server."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        config.data_dir.mkdir(parents=True, exist_ok=True)
        self.dicts = Dictionaries.load(config.dict_dir)
        trend_path = config.trend_file or (default_dict_dir() / "trends.csv")
        self.trends = FileTrendProvider.load(trend_path)
        self.scope_weights = ScopeWeights(self.dicts, setting=1)
        self.entries: dict[str, IdeaEntry] = {}
        self.ingest_order: list[str] = []
        self.model: EnsembleState | None = None
        self.trace_x: list[tuple[float, ...]] = []
        self.trace_y: list[int] = []
        self.decision_count = 0
        self._lock = threading.RLock()
        self._recover()

    # -- paths ------------------------------------------------------------

    @property
    def ideas_log(self) -> Path:
        return self.config.data_dir / "ideas.jsonl"

    @property
    def decisions_log(self) -> Path:
        return self.config.data_dir / "decisions.jsonl"

    @property
    def snapshot_path(self) -> Path:
        return self.config.data_dir / "snapshot.json"

    # -- ingestion ---------------------------------------------------------

    def _score_record(self, record: IdeaRecord, raw: dict) -> IdeaEntry:
        idea = to_idea_text(record, self.dicts)
        terms = extract_terms(idea, self.dicts)
        override = raw.get("measurements")
        if override:
            m = Measurements(
                rel=float(override["rel"]), vote=int(override["vote"]),
                type=int(override["type"]), div=float(override["div"]),
                con=float(override["con"]), epr=int(override["epr"]),
            )
        else:
            m = measure_idea(record, terms, self.trends, self.scope_weights,
                             d=self.config.trend_window, missing_trend="zero")
        return IdeaEntry(
            record=record, raw=raw,
            terms_rt=terms.request_surfaces(), terms_kt=terms.known_surfaces(),
            measurements=m, x=feature_vector(m),
        )

    def ingest(self, payload) -> dict:
        if isinstance(payload, dict):
            payload = payload.get("records")
        if not isinstance(payload, list):
            raise ApiError(400, "bad_payload", "expected a list of records or {\"records\": [...]}")
        accepted, duplicates, rejected = 0, 0, []
        with self._lock:
            for raw in payload:
                if not isinstance(raw, dict):
                    rejected.append({"id": None, "reason": "record is not an object"})
                    continue
                try:
                    record = parse_record(raw)
                except (ValueError, KeyError, TypeError) as exc:
                    rejected.append({"id": raw.get("id"), "reason": str(exc)})
                    continue
                if record.id in self.entries:
                    duplicates += 1
                    continue
                try:
                    entry = self._score_record(record, raw)
                except ValueError as exc:
                    rejected.append({"id": record.id, "reason": str(exc)})
                    continue
                self.entries[record.id] = entry
                self.ingest_order.append(record.id)
                with open(self.ideas_log, "a", encoding="utf-8") as fh:
                    fh.write(json.dumps(raw, sort_keys=True, default=str) + "\n")
                accepted += 1
        return {"accepted": accepted, "duplicates": duplicates, "rejected": rejected}

    # -- queue -------------------------------------------------------------

    def _entry_view(self, entry: IdeaEntry, p: float | None) -> dict:
        m = entry.measurements
        return {
            "idea_id": entry.record.id,
            "title": entry.record.title,
            "p": p,
            "status": "decided" if entry.decided else "pending",
            "posted_date": entry.record.posted_date.isoformat() if entry.record.posted_date else None,
            "measurements": {"rel": m.rel, "vote": m.vote, "type": m.type,
                             "div": m.div, "con": m.con, "epr": m.epr},
            "terms": {"rt": entry.terms_rt, "kt": entry.terms_kt},
            "decision": entry.decision,
        }

    def rank_queue(self, limit: int = 50, offset: int = 0) -> list[dict]:
        with self._lock:
            if self.model is None:
                raise ApiError(409, "model_uninitialized",
                               "no decision has initialized the model yet")
            pending = [e for e in self.entries.values() if not e.decided]
            scored = [(olr.ensemble_probability(self.model, e.x), e) for e in pending]
            far_future = dt.date.max
            scored.sort(key=lambda pair: (
                -pair[0],
                pair[1].record.posted_date or far_future,
                pair[1].record.id,
            ))
            return [self._entry_view(e, p) for p, e in scored[offset:offset + limit]]

    def get_idea(self, idea_id: str) -> dict:
        with self._lock:
            entry = self.entries.get(idea_id)
            if entry is None:
                raise ApiError(404, "unknown_idea", f"no idea with id {idea_id!r}")
            p = olr.ensemble_probability(self.model, entry.x) if self.model else None
            return self._entry_view(entry, p)

    # -- decisions -----------------------------------------------------------

    def _apply_step(self, model: EnsembleState | None, x, y: int):
        if model is None:
            state = olr.init_state((x, y), self.config.hyper, self.config.seed)
            outcome = None
        else:
            outcome, state = olr.olr_step(model, x, y)
        return outcome, state

    def record_decision(self, idea_id: str, label: int, actor: str,
                        commit: bool = True) -> dict:
        if label not in (0, 1):
            raise ApiError(400, "bad_label", "label must be 0 or 1")
        with self._lock:
            entry = self.entries.get(idea_id)
            if entry is None:
                raise ApiError(404, "unknown_idea", f"no idea with id {idea_id!r}")
            if entry.decided:
                raise ApiError(409, "already_decided",
                               f"idea {idea_id!r} already has a terminal decision",
                               detail=entry.decision)

            if commit:
                model = self.model
            else:
                model = copy.deepcopy(self.model)
            resulting_p = olr.ensemble_probability(model, entry.x) if model else None
            outcome, state = self._apply_step(model, entry.x, int(label))

            event = {
                "seq": self.decision_count + 1,
                "idea_id": idea_id,
                "label": int(label),
                "actor": actor,
                "decided_at": dt.datetime.now(dt.timezone.utc).isoformat(),
                "resulting_p": resulting_p,
                "outcome": None if outcome is None else {
                    "p": outcome.p,
                    "sampled_index": outcome.sampled_index,
                    "mistake": outcome.mistake,
                    "refit_performed": outcome.refit_performed,
                    "capacity_hit": outcome.capacity_hit,
                    "loss": outcome.loss,
                },
                "initialized_model": outcome is None,
                "committed": bool(commit),
            }
            if not commit:
                return event

            with open(self.decisions_log, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(event, sort_keys=True) + "\n")
            self.model = state
            self.trace_x.append(entry.x)
            self.trace_y.append(int(label))
            self.decision_count += 1
            entry.decided = True
            entry.decision = event
            if self.decision_count % self.config.snapshot_interval == 0:
                self.write_snapshot()
            return event

    def write_snapshot(self) -> None:
        with self._lock:
            if self.model is None:
                return
            payload = {
                "decision_count": self.decision_count,
                "model": olr.state_to_dict(self.model),
            }
            _atomic_write(self.snapshot_path,
                          json.dumps(payload, sort_keys=True, separators=(",", ":")))

    # -- introspection -------------------------------------------------------

    def model_info(self) -> dict:
        with self._lock:
            if self.model is None:
                h = self.config.hyper
                return {
                    "initialized": False,
                    "hyperparameters": {
                        "epsilon": h.epsilon, "sigma": h.sigma, "eta0": h.eta0,
                        "delta": h.delta, "alpha": h.alpha, "theta": h.theta,
                        "max_sweeps": h.max_sweeps,
                    },
                    "backend": kernels.BACKEND,
                }
            h = self.model.hyper
            regret = None
            if self.trace_x:
                regret = olr.empirical_regret(self.trace_x, self.trace_y, self.model)
            bound = None
            n = self.model.n_observed
            if n >= h.theta and h.theta >= 2:
                bound = olr.theory_regret(n, h.alpha, h.theta)
            weights = list(self.model.weights)
            histogram = [0] * 10
            for w in weights:
                histogram[min(int(w * 10), 9)] += 1
            return {
                "initialized": True,
                "ensemble_size": len(self.model.params),
                "weights": weights,
                "weights_histogram": histogram,
                "mistake_count": self.model.mistake_count,
                "observed": n,
                "empirical_regret": regret,
                "theory_bound": bound,
                "hyperparameters": olr.state_to_dict(self.model)["hyper"],
                "backend": kernels.BACKEND,
            }

    def metrics(self) -> dict:
        with self._lock:
            tp = fp = fn = tn = 0
            for entry in self.entries.values():
                if not entry.decided or entry.decision is None:
                    continue
                outcome = entry.decision.get("outcome")
                if not outcome:
                    continue        # the initializing decision has no prediction
                predicted = 1 if outcome["p"] >= 0.5 else 0
                y = entry.decision["label"]
                if predicted == 1 and y == 1:
                    tp += 1
                elif predicted == 1 and y == 0:
                    fp += 1
                elif predicted == 0 and y == 1:
                    fn += 1
                else:
                    tn += 1
            scored = tp + fp + fn + tn
            return {
                "ideas": len(self.entries),
                "pending": sum(1 for e in self.entries.values() if not e.decided),
                "decisions": self.decision_count,
                "prequential": {
                    "scored": scored,
                    "tp": tp, "fp": fp, "fn": fn, "tn": tn,
                    "accuracy": (tp + tn) / scored if scored else None,
                    "precision": tp / (tp + fp) if (tp + fp) else None,
                    "recall": tp / (tp + fn) if (tp + fn) else None,
                },
            }

    # -- recovery ------------------------------------------------------------

    def _recover(self) -> None:
        if self.ideas_log.exists():
            with open(self.ideas_log, encoding="utf-8") as fh:
                for line in fh:
                    if not line.strip():
                        continue
                    raw = json.loads(line)
                    record = parse_record(raw)
                    if record.id in self.entries:
                        continue
                    self.entries[record.id] = self._score_record(record, raw)
                    self.ingest_order.append(record.id)

        snapshot_count = 0
        if self.snapshot_path.exists():
            with open(self.snapshot_path, encoding="utf-8") as fh:
                payload = json.load(fh)
            self.model = olr.state_from_dict(payload["model"])
            snapshot_count = payload["decision_count"]

        events = []
        if self.decisions_log.exists():
            with open(self.decisions_log, encoding="utf-8") as fh:
                events = [json.loads(line) for line in fh if line.strip()]

        for event in events:
            entry = self.entries.get(event["idea_id"])
            if entry is None:
                raise RuntimeError(
                    f"decision log references unknown idea {event['idea_id']!r}"
                )
            if event["seq"] > snapshot_count:
                _, self.model = self._apply_step(self.model, entry.x, event["label"])
            entry.decided = True
            entry.decision = event
        self.decision_count = len(events)

        # the regret trace covers post-init decisions, in order
        for event in events:
            if not event.get("initialized_model"):
                entry = self.entries[event["idea_id"]]
                self.trace_x.append(entry.x)
                self.trace_y.append(event["label"])


def create_app(config: ServiceConfig, service: IdeaService | None = None) -> FastAPI:
    svc = service or IdeaService(config)
    app = FastAPI(title="ideascreen", version="0.1.0")
    app.state.service = svc

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status, content=exc.body())

    def _check_token(request: Request) -> None:
        if config.token and request.headers.get("x-auth-token") != config.token:
            raise ApiError(401, "unauthorized", "missing or wrong auth token")

    @app.get("/api/healthz")
    def healthz():
        return {"status": "ok", "backend": kernels.BACKEND}

    @app.post("/api/ideas")
    async def ingest(request: Request):
        _check_token(request)
        try:
            payload = await request.json()
        except json.JSONDecodeError:
            raise ApiError(400, "bad_payload", "request body is not valid JSON")
        return svc.ingest(payload)

    @app.get("/api/queue")
    def queue(limit: int = 50, offset: int = 0):
        return {"entries": svc.rank_queue(limit=limit, offset=offset)}

    @app.get("/api/ideas/{idea_id}")
    def idea(idea_id: str):
        return svc.get_idea(idea_id)

    @app.post("/api/ideas/{idea_id}/decision")
    async def decide(idea_id: str, request: Request):
        _check_token(request)
        try:
            body = await request.json()
        except json.JSONDecodeError:
            raise ApiError(400, "bad_payload", "request body is not valid JSON")
        if "label" not in body:
            raise ApiError(400, "bad_payload", "decision body needs a label")
        return svc.record_decision(
            idea_id,
            label=body["label"],
            actor=str(body.get("actor", "")),
            commit=bool(body.get("commit", True)),
        )

    @app.get("/api/model")
    def model():
        return svc.model_info()

    @app.get("/api/metrics")
    def metrics():
        return svc.metrics()

    ui_dir = os.environ.get("IDEASCREEN_UI_DIR")
    if not ui_dir:
        candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        ui_dir = str(candidate) if candidate.is_dir() else ""
    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
