from __future__ import annotations

import logging
import threading
import time
import uuid
from collections import deque
from dataclasses import dataclass, field
from queue import Queue
from typing import Any, Deque, Dict, List, Optional

from dft.analysis.evaluator import AnalyticPlan, ProbResult
from dft.config import Settings
from dft.errors import DftError
from dft.model import DftModel, parse_model
from dft.report import AnalysisReport, PointRecord
from dft.rewrite.engine import default_rules
from dft.simulation.simulator import McEstimate, simulate_curve

FINAL_STATUSES = {"done", "stopped", "error"}
HISTORY_LIMIT = 500
MAX_FINISHED_TASKS = 200
FINISHED_TTL_SECONDS = 3600.0
METHODS = ("analytic", "mc", "both")


@dataclass
class Task:
    task_id: str
    model: DftModel
    times: List[float]
    status: str
    method: str = "analytic"
    mode: str = "exact"
    tol: Optional[float] = None
    samples: Optional[int] = None
    seed: Optional[int] = None
    stop_requested: bool = False
    report: Optional[AnalysisReport] = None
    error: Optional[str] = None
    created_at: float = field(default_factory=time.time)
    updated_at: float = field(default_factory=time.time)
    event_history: Deque[Dict[str, Any]] = field(default_factory=lambda: deque(maxlen=HISTORY_LIMIT))
    next_seq: int = 0


class TaskManager:
    def __init__(
        self,
        settings: Settings,
        max_finished: int = MAX_FINISHED_TASKS,
        finished_ttl: float = FINISHED_TTL_SECONDS,
    ) -> None:
        self.settings = settings
        self.max_finished = max_finished
        self.finished_ttl = finished_ttl
        self.tasks: Dict[str, Task] = {}
        self.lock = threading.Lock()
        self.worker_queue: Queue[str] = Queue()
        self.worker_thread: Optional[threading.Thread] = None
        self.logger = logging.getLogger("app.task_manager")

    def create_task(
        self,
        model_text: str,
        times: List[float],
        method: str = "analytic",
        mode: Optional[str] = None,
        tol: Optional[float] = None,
        samples: Optional[int] = None,
        seed: Optional[int] = None,
    ) -> Task:
        if method not in METHODS:
            raise ValueError(f"method must be one of {', '.join(METHODS)}")
        mode = mode or self.settings.intersection_mode
        if mode not in ("exact", "paper"):
            raise ValueError("mode must be exact or paper")
        if not times or any(t < 0 for t in times):
            raise ValueError("times must be a non-empty list of non-negative values")
        model = parse_model(model_text)
        with self.lock:
            task_id = uuid.uuid4().hex
            task = Task(
                task_id=task_id,
                model=model,
                times=list(times),
                status="queued",
                method=method,
                mode=mode,
                tol=tol,
                samples=samples,
                seed=seed,
            )
            self.tasks[task_id] = task
        self.logger.info(
            "Create task id=%s top=%s times=%s method=%s mode=%s",
            task_id,
            model.top_name,
            times,
            method,
            mode,
        )
        self._emit(task, "status", {"status": task.status})
        self._enqueue(task)
        return task

    def get_task(self, task_id: str) -> Task:
        task = self.tasks.get(task_id)
        if not task:
            raise KeyError("Task not found")
        return task

    def stop_task(self, task_id: str) -> Task:
        task = self.get_task(task_id)
        self.logger.info("Stop task id=%s status=%s", task.task_id, task.status)
        task.stop_requested = True
        if task.status == "queued":
            task.status = "stopped"
            task.updated_at = time.time()
            self._emit(task, "status", {"status": task.status})
            self._evict_finished()
        return task

    def _ensure_worker(self) -> None:
        if self.worker_thread and self.worker_thread.is_alive():
            return
        self.worker_thread = threading.Thread(target=self._worker_loop, daemon=True)
        self.worker_thread.start()
        self.logger.info("Worker thread started")

    def _enqueue(self, task: Task) -> None:
        self._ensure_worker()
        self.worker_queue.put(task.task_id)

    def _worker_loop(self) -> None:
        while True:
            task_id = self.worker_queue.get()
            task = self.tasks.get(task_id)
            if task:
                self._process_task(task)
            self.worker_queue.task_done()

    def _process_task(self, task: Task) -> None:
        if task.status in FINAL_STATUSES:
            return
        try:
            task.status = "running"
            task.updated_at = time.time()
            self._emit(task, "status", {"status": task.status})
            self._run_analysis(task)
            task.status = "stopped" if task.stop_requested else "done"
        except (DftError, ValueError) as exc:
            task.status = "error"
            task.error = str(exc)
            self._emit(task, "error", {"error": str(exc)})
        except Exception as exc:  # pylint: disable=broad-except
            self.logger.exception("Task failed id=%s", task.task_id)
            task.status = "error"
            task.error = str(exc)
            self._emit(task, "error", {"error": str(exc)})
        task.updated_at = time.time()
        self._emit(task, "status", {"status": task.status})
        self._evict_finished()

    def _run_analysis(self, task: Task) -> None:
        settings = self.settings
        mc: Dict[float, McEstimate] = {}
        if task.method in ("mc", "both"):
            cfg = settings.monte_carlo(task.samples, task.seed)
            mc = dict(simulate_curve(task.model, sorted(set(task.times)), cfg))
        plan: Optional[AnalyticPlan] = None
        if task.method in ("analytic", "both"):
            plan = AnalyticPlan(
                task.model,
                mode=task.mode,
                max_terms=settings.max_pie_terms,
                rules=default_rules(settings.rewrite_step_cap),
                workers=settings.workers,
            )
        quad = settings.quadrature(task.tol)
        report = AnalysisReport(
            model_digest=task.model.digest(),
            seed=task.seed if task.seed is not None else settings.mc_seed,
            method=task.method,
        )
        task.report = report
        for t in task.times:
            if task.stop_requested:
                break
            analytic: Optional[ProbResult] = plan.evaluate(t, quad) if plan else None
            estimate = mc.get(t)
            point = PointRecord(
                t=t,
                analytic_value=analytic.value if analytic else None,
                quad_error=analytic.quad_error if analytic else None,
                mc_estimate=estimate.p_hat if estimate else None,
                mc_half_width=estimate.half_width if estimate else None,
                mode=task.mode,
                term_count=analytic.term_count if analytic else 0,
            )
            report.points.append(point)
            task.updated_at = time.time()
            self._emit(task, "point", point.model_dump(by_alias=True))

    def _evict_finished(self) -> None:
        now = time.time()
        with self.lock:
            finished = sorted(
                (task for task in self.tasks.values() if task.status in FINAL_STATUSES),
                key=lambda task: task.updated_at,
            )
            overflow = max(0, len(finished) - self.max_finished)
            evicted = [
                task
                for index, task in enumerate(finished)
                if index < overflow or now - task.updated_at > self.finished_ttl
            ]
            for task in evicted:
                del self.tasks[task.task_id]
        if evicted:
            self.logger.info("Evicted %d finished tasks", len(evicted))

    def _emit(self, task: Task, event_type: str, data: Dict[str, Any]) -> None:
        with self.lock:
            event = {
                "seq": task.next_seq,
                "type": event_type,
                "data": data,
                "timestamp": time.time(),
            }
            task.next_seq += 1
            task.event_history.append(event)
        self._log_event(task, event_type, data)

    def _log_event(self, task: Task, event_type: str, data: Dict[str, Any]) -> None:
        if event_type == "status":
            self.logger.info("Event status id=%s status=%s", task.task_id, data.get("status"))
            return
        if event_type == "point":
            self.logger.info(
                "Event point id=%s t=%s analytic=%s mc=%s",
                task.task_id,
                data.get("t"),
                data.get("analyticValue"),
                data.get("mcEstimate"),
            )
            return
        if event_type == "error":
            self.logger.info("Event error id=%s error=%s", task.task_id, self._compact(data.get("error")))

    @staticmethod
    def _compact(value: Optional[str], limit: int = 200) -> str:
        if value is None:
            return ""
        text = " ".join(str(value).split())
        if len(text) > limit:
            return text[:limit] + "..."
        return text

    def shutdown(self) -> None:
        with self.lock:
            for task in self.tasks.values():
                if task.status not in FINAL_STATUSES:
                    task.stop_requested = True
