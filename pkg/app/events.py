from __future__ import annotations

import json
import time
from typing import Any, Dict, Iterator, Optional

from .task_manager import FINAL_STATUSES, Task

KEEPALIVE_SECONDS = 1.0
POLL_SECONDS = 0.1


def format_sse(event_type: str, data: Dict[str, Any], event_id: Optional[int] = None) -> str:
    payload = json.dumps(data, ensure_ascii=True)
    head = f"id: {event_id}\n" if event_id is not None else ""
    return f"{head}event: {event_type}\ndata: {payload}\n\n"


def _is_final(event: Dict[str, Any]) -> bool:
    return event["type"] == "status" and event["data"].get("status") in FINAL_STATUSES


def stream_events(task: Task, after: int = -1) -> Iterator[str]:
    """Replay the task's events with ``seq`` above ``after``, then follow new ones.

    Readers never consume events, so any number of clients can follow one
    analysis and a reconnecting client resumes from its last seen id.
    """
    last = after
    idle = 0.0
    while True:
        pending = [event for event in list(task.event_history) if event["seq"] > last]
        for event in pending:
            last = event["seq"]
            yield format_sse(event["type"], event, last)
            if _is_final(event):
                return
        if pending:
            idle = 0.0
            continue
        if idle >= KEEPALIVE_SECONDS:
            yield ": keep-alive\n\n"
            idle = 0.0
        time.sleep(POLL_SECONDS)
        idle += POLL_SECONDS
