from __future__ import annotations

import logging
import sys
from typing import List, Optional

import httpx
from fastapi import FastAPI, Header, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import StreamingResponse
from pydantic import BaseModel

from dft import __version__
from dft.algebra.expr import format_expr
from dft.config import Settings
from dft.errors import CycleDetected, ModelSyntaxError, Redefined, Undefined
from dft.model import parse_model
from dft.rewrite.engine import default_rules, simplify
from .events import stream_events
from .task_manager import TaskManager


logger = logging.getLogger("app")
root_logger = logging.getLogger()
if not root_logger.handlers:
    logging.basicConfig(
        level=logging.INFO,
        format="%(asctime)s | %(levelname)s | %(name)s | %(message)s",
    )
else:
    for handler in root_logger.handlers:
        handler.setLevel(logging.INFO)
root_logger.setLevel(logging.INFO)
if not any(isinstance(handler, logging.StreamHandler) for handler in root_logger.handlers):
    stream_handler = logging.StreamHandler(sys.stdout)
    stream_handler.setFormatter(
        logging.Formatter("%(asctime)s | %(levelname)s | %(name)s | %(message)s")
    )
    root_logger.addHandler(stream_handler)
for name in ("app", "app.task_manager", "dft.analysis", "dft.simulation", "dft.model"):
    child = logging.getLogger(name)
    child.setLevel(logging.INFO)
    child.propagate = True

PARSE_ERRORS = (ModelSyntaxError, CycleDetected, Undefined, Redefined)

settings = Settings.from_env()
manager = TaskManager(settings)

app = FastAPI(title="DFT Analysis", version=__version__)


@app.on_event("startup")
def _log_startup() -> None:
    logger.info(
        "Startup version=%s mode=%s max_pie_terms=%d quad_tol=%g mc_samples=%d",
        __version__,
        settings.intersection_mode,
        settings.max_pie_terms,
        settings.quad_tol,
        settings.mc_samples,
    )


@app.on_event("shutdown")
def _shutdown() -> None:
    try:
        manager.shutdown()
    except Exception:
        pass


app.add_middleware(
    CORSMiddleware,
    allow_origins=["http://localhost:8000", "http://127.0.0.1:8000"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


class SimplifyRequest(BaseModel):
    model: str
    desugar: bool = False


class AnalysisCreate(BaseModel):
    model: Optional[str] = None
    model_url: Optional[str] = None
    times: List[float]
    method: str = "analytic"
    mode: Optional[str] = None
    tol: Optional[float] = None
    samples: Optional[int] = None
    seed: Optional[int] = None


def _fetch_model(url: str) -> str:
    try:
        response = httpx.get(url, timeout=30, follow_redirects=True)
    except httpx.HTTPError as exc:
        raise HTTPException(status_code=400, detail=f"Could not fetch model: {exc}") from exc
    if response.status_code >= 400:
        raise HTTPException(
            status_code=400,
            detail=f"Model fetch error {response.status_code}: {response.text}",
        )
    return response.text


@app.post("/simplify")
def simplify_model(payload: SimplifyRequest):
    try:
        model = parse_model(payload.model, desugar=payload.desugar)
    except PARSE_ERRORS as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    result = simplify(model.top_expr(), default_rules(settings.rewrite_step_cap), model.name_order())
    return {
        "top": model.top_name,
        "expression": format_expr(result.expr),
        "steps": result.steps,
        "capped": result.capped,
    }


@app.post("/analyses")
def create_analysis(payload: AnalysisCreate):
    if bool(payload.model) == bool(payload.model_url):
        raise HTTPException(status_code=400, detail="Give exactly one of model or model_url")
    text = payload.model if payload.model else _fetch_model(payload.model_url)
    try:
        task = manager.create_task(
            text,
            payload.times,
            method=payload.method,
            mode=payload.mode,
            tol=payload.tol,
            samples=payload.samples,
            seed=payload.seed,
        )
    except PARSE_ERRORS as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return {"task_id": task.task_id}


@app.get("/analyses/{task_id}")
def get_analysis(task_id: str):
    try:
        task = manager.get_task(task_id)
    except KeyError as exc:
        raise HTTPException(status_code=404, detail=str(exc)) from exc
    return {
        "task_id": task.task_id,
        "status": task.status,
        "error": task.error,
        "report": task.report.model_dump(by_alias=True) if task.report else None,
        "updated_at": task.updated_at,
    }


@app.get("/analyses/{task_id}/events")
def get_events(task_id: str, last_event_id: Optional[int] = Header(default=None)):
    try:
        task = manager.get_task(task_id)
    except KeyError as exc:
        raise HTTPException(status_code=404, detail=str(exc)) from exc
    after = -1 if last_event_id is None else last_event_id
    return StreamingResponse(stream_events(task, after), media_type="text/event-stream")


@app.post("/analyses/{task_id}/stop")
def stop_analysis(task_id: str):
    try:
        task = manager.stop_task(task_id)
    except KeyError as exc:
        raise HTTPException(status_code=404, detail=str(exc)) from exc
    return {"task_id": task.task_id, "status": task.status}
