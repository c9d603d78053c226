"""HTTP service backing the CLI checks and the web authoring UI.

All semantic work (parsing, completion, sync, evaluation) happens here;
clients stay thin.  Rule mutations persist to the ruleset file and bump a
sequence number that sessions observe through the long-poll /events
endpoint (the push channel; re-scans that change nothing do not notify).
"""

from __future__ import annotations

import asyncio
import threading
import time
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException, Response
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from . import assist
from .evaluator import FileFilter
from .grammar import parse_rule, render_rule
from .modelsync import (
    GuiRuleModel,
    ModelSyncError,
    build_template,
    model_to_text,
    text_to_model,
    token_map,
)
from .workspace import (
    ProjectIndex,
    RuleRecord,
    Ruleset,
    canonical_json,
    check_rule,
    load_ruleset,
    save_ruleset,
    scan_project,
)


class RuleBody(BaseModel):
    id: str
    title: str = ""
    description: str = ""
    tags: list[str] = []
    fileFilter: dict | None = None
    ruleText: str
    modelSnapshot: dict | None = None


class TextBody(BaseModel):
    text: str


class CompleteBody(BaseModel):
    text: str
    cursor: int


class HoverBody(BaseModel):
    text: str
    offset: int


class ModelBody(BaseModel):
    model: dict


class EvaluateBody(BaseModel):
    ruleText: str | None = None
    ruleId: str | None = None
    fileFilter: dict | None = None


@dataclass
class AppState:
    project_dir: str
    ruleset_path: str
    index: ProjectIndex
    ruleset: Ruleset
    seq: int = 0
    events: list[dict] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)

    def bump(self, kind: str) -> int:
        self.seq += 1
        self.events.append({"type": kind, "seq": self.seq, "at": time.time()})
        self.events = self.events[-200:]
        return self.seq


def _diag_list(diags) -> list[dict]:
    return [d.to_dict() for d in diags]


def _record_to_dict(r: RuleRecord) -> dict:
    d = r.to_dict()
    if r.diagnostics:
        d["diagnostics"] = _diag_list(r.diagnostics)
    return d


def _parse_payload(text: str) -> dict:
    result = parse_rule(text)
    if not result.ok:
        return {"ok": False, "diagnostics": _diag_list(result.diagnostics)}
    model = text_to_model(text)
    return {
        "ok": True,
        "canonicalText": render_rule(result.ast),
        "model": model.to_dict(),
        "tokenMap": token_map(model),
        "diagnostics": [],
    }


def create_app(
    project_dir: str, ruleset_path: str, ui_dir: str | None = None
) -> FastAPI:
    state = AppState(
        project_dir=project_dir,
        ruleset_path=ruleset_path,
        index=scan_project(project_dir),
        ruleset=load_ruleset(ruleset_path),
    )
    app = FastAPI(title="rulekit service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.rulekit = state

    # -- rules CRUD

    @app.get("/health")
    def health():
        return {"ok": True, "project": state.project_dir, "seq": state.seq}

    @app.get("/rules")
    def list_rules():
        with state.lock:
            return {"rules": [_record_to_dict(r) for r in state.ruleset.rules]}

    @app.get("/rules/{rule_id}")
    def get_rule(rule_id: str):
        with state.lock:
            rec = state.ruleset.get(rule_id)
            if rec is None:
                raise HTTPException(404, f"no rule {rule_id!r}")
            return _record_to_dict(rec)

    def _record_from_body(body: RuleBody) -> RuleRecord:
        result = parse_rule(body.ruleText)
        if not result.ok:
            raise HTTPException(
                422,
                {
                    "message": "ruleText does not parse",
                    "diagnostics": _diag_list(result.diagnostics),
                },
            )
        return RuleRecord(
            id=body.id,
            title=body.title,
            description=body.description,
            tags=list(body.tags),
            fileFilter=FileFilter.from_dict(body.fileFilter),
            ruleText=render_rule(result.ast),
            modelSnapshot=body.modelSnapshot,
        )

    @app.post("/rules", status_code=201)
    def create_rule(body: RuleBody):
        rec = _record_from_body(body)
        with state.lock:
            if state.ruleset.get(rec.id) is not None:
                raise HTTPException(409, f"rule {rec.id!r} already exists")
            state.ruleset.rules.append(rec)
            save_ruleset(state.ruleset_path, state.ruleset)
            state.bump("rules-changed")
            return _record_to_dict(rec)

    @app.put("/rules/{rule_id}")
    def update_rule(rule_id: str, body: RuleBody):
        rec = _record_from_body(body)
        with state.lock:
            old = state.ruleset.get(rule_id)
            if old is None:
                raise HTTPException(404, f"no rule {rule_id!r}")
            rec.id = rule_id
            rec.extra = old.extra
            state.ruleset.rules[state.ruleset.rules.index(old)] = rec
            save_ruleset(state.ruleset_path, state.ruleset)
            state.bump("rules-changed")
            return _record_to_dict(rec)

    @app.delete("/rules/{rule_id}")
    def delete_rule(rule_id: str):
        with state.lock:
            old = state.ruleset.get(rule_id)
            if old is None:
                raise HTTPException(404, f"no rule {rule_id!r}")
            state.ruleset.rules.remove(old)
            save_ruleset(state.ruleset_path, state.ruleset)
            state.bump("rules-changed")
            return {"deleted": rule_id}

    # -- language services

    @app.get("/template")
    def template():
        return {"model": build_template().to_dict()}

    @app.post("/parse")
    def parse(body: TextBody):
        return _parse_payload(body.text)

    @app.post("/render")
    def render_model(body: ModelBody):
        try:
            model = GuiRuleModel.from_dict(body.model)
            text = model_to_text(model)
        except ModelSyncError as e:
            return {
                "ok": False,
                "error": e.message,
                "elementId": e.element_id,
                "diagnostics": _diag_list(e.diagnostics),
            }
        except (KeyError, ValueError, TypeError) as e:
            raise HTTPException(422, f"malformed model: {e}") from e
        payload = _parse_payload(text)
        payload["text"] = text
        return payload

    @app.post("/complete")
    def complete(body: CompleteBody):
        suggestions = assist.complete(body.text, body.cursor)
        return {"suggestions": [s.to_dict() for s in suggestions]}

    @app.post("/hover")
    def hover(body: HoverBody):
        entry = assist.hover_doc(body.text, body.offset)
        return {"doc": entry.to_dict() if entry else None}

    @app.post("/lint")
    def lint(body: TextBody):
        return {"diagnostics": _diag_list(assist.lint(body.text))}

    # -- evaluation

    @app.post("/evaluate")
    def evaluate_rule(body: EvaluateBody):
        with state.lock:
            index = state.index
            if body.ruleId is not None:
                rec = state.ruleset.get(body.ruleId)
                if rec is None:
                    raise HTTPException(404, f"no rule {body.ruleId!r}")
            elif body.ruleText is not None:
                result = parse_rule(body.ruleText)
                if not result.ok:
                    payload = {
                        "status": "invalid-rule",
                        "diagnostics": _diag_list(result.diagnostics),
                    }
                    return Response(canonical_json(payload), media_type="application/json")
                rec = RuleRecord(id="(adhoc)", ruleText=body.ruleText)
            else:
                raise HTTPException(422, "provide ruleText or ruleId")
        explicit = FileFilter.from_dict(body.fileFilter) if body.fileFilter else None
        check = check_rule(index, rec, explicit)
        return Response(canonical_json(check.to_dict()), media_type="application/json")

    # -- project

    @app.get("/project/files")
    def project_files():
        with state.lock:
            return state.index.summary()

    @app.post("/rescan")
    def rescan():
        with state.lock:
            old_hashes = {p: e.contentHash for p, e in state.index.files.items()}
            state.index = scan_project(state.project_dir, previous=state.index)
            new_hashes = {p: e.contentHash for p, e in state.index.files.items()}
            changed = old_hashes != new_hashes
            if changed:
                state.bump("results-changed")
            return {"changed": changed, "seq": state.seq}

    # -- push channel (long poll)

    @app.get("/events")
    async def events(since: int = 0, wait: float = 0.0):
        deadline = time.monotonic() + min(wait, 25.0)
        while state.seq <= since and time.monotonic() < deadline:
            await asyncio.sleep(0.1)
        with state.lock:
            fresh = [e for e in state.events if e["seq"] > since]
            return {"seq": state.seq, "events": fresh}

    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def serve(
    port: int,
    project_dir: str,
    ruleset_path: str,
    host: str = "127.0.0.1",
    ui_dir: str | None = None,
):
    import uvicorn

    app = create_app(project_dir, ruleset_path, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")
