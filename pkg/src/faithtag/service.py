"""Annotation backend: task queue, validated tag submissions with
optimistic locking, JSONL export and progress stats.

State lives in memory, backed by an append-only JSONL journal that is
replayed on startup. Every write holds the store lock and bumps the
task's revision; a submission carrying a stale revision loses cleanly.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from pathlib import Path

from pydantic import BaseModel

from .corpus import (
    Dataset,
    DialogueExample,
    dumps_record,
    example_to_record,
    record_to_example,
    tag_stats,
)
from .errors import InvalidTags, NoOpenTasks, StaleRevision, UnknownTask
from .prompt_texts import ANNOTATION_GUIDELINES
from .tags import TAG_BY_CODE, TAG_CODES


@dataclass
class AnnotationTask:
    task_id: str
    example: DialogueExample
    working_tags: list[str]
    status: str = "open"  # open -> claimed -> done
    claimant: str | None = None
    revision: int = 0

    def to_payload(self) -> dict:
        return {
            "task_id": self.task_id,
            "status": self.status,
            "claimant": self.claimant,
            "revision": self.revision,
            "dialogue_id": self.example.dialogue.id,
            "turns": [[s, u] for s, u in self.example.dialogue.turns],
            "summary_tokens": list(self.example.summary.tokens),
            "tags": list(self.working_tags),
            "gold_summary": list(self.example.gold_summary)
            if self.example.gold_summary
            else None,
        }


def _validate_submission(tokens: list[str], tags: list[str]) -> dict[int, str]:
    reasons: dict[int, str] = {}
    if len(tags) != len(tokens):
        reasons[-1] = f"expected {len(tokens)} tags, got {len(tags)}"
        return reasons
    for i, tag in enumerate(tags):
        if tag not in TAG_BY_CODE:
            reasons[i] = f"unknown tag code {tag!r}"
        elif tag == "M" and i != len(tags) - 1:
            reasons[i] = "M is only legal on the end-of-summary slot"
    return reasons


def _snapshot(task: AnnotationTask) -> AnnotationTask:
    return AnnotationTask(
        task_id=task.task_id,
        example=task.example,
        working_tags=list(task.working_tags),
        status=task.status,
        claimant=task.claimant,
        revision=task.revision,
    )


class TaskStore:
    """In-memory task index with an append-only journal.

    Mutating methods hold the store lock; reads hand out snapshots, so a
    returned task never changes under its caller.
    """

    def __init__(self, journal_path: str | Path | None = None):
        self._tasks: dict[str, AnnotationTask] = {}
        self._order: list[str] = []
        self._lock = threading.Lock()
        self._journal_path = Path(journal_path) if journal_path else None
        if self._journal_path and self._journal_path.exists():
            self._replay()

    # -- journal ------------------------------------------------------------

    def _journal(self, event: dict) -> None:
        if self._journal_path is None:
            return
        with open(self._journal_path, "a", encoding="utf-8", newline="\n") as fh:
            fh.write(json.dumps(event, ensure_ascii=False))
            fh.write("\n")
            fh.flush()

    def _replay(self) -> None:
        with open(self._journal_path, encoding="utf-8") as fh:
            for raw in fh:
                raw = raw.strip()
                if not raw:
                    continue
                event = json.loads(raw)
                kind = event["event"]
                if kind == "add":
                    example = record_to_example(event["record"])
                    self._add_unlocked(example, event["task_id"], journal=False)
                elif kind == "claim":
                    task = self._tasks[event["task_id"]]
                    task.status = "claimed"
                    task.claimant = event["annotator"]
                    task.revision = event["revision"]
                elif kind == "submit":
                    task = self._tasks[event["task_id"]]
                    task.working_tags = list(event["tags"])
                    task.status = "done"
                    task.revision = event["revision"]

    # -- task lifecycle -------------------------------------------------------

    def _add_unlocked(
        self, example: DialogueExample, task_id: str | None, journal: bool = True
    ) -> AnnotationTask:
        task_id = task_id or f"task-{len(self._order):05d}"
        if task_id in self._tasks:
            raise ValueError(f"duplicate task id {task_id!r}")
        task = AnnotationTask(
            task_id=task_id,
            example=example,
            working_tags=["O"] * len(example.summary.tokens),
        )
        self._tasks[task_id] = task
        self._order.append(task_id)
        if journal:
            self._journal(
                {
                    "event": "add",
                    "task_id": task_id,
                    "record": example_to_record(example),
                }
            )
        return task

    def add_task(
        self, example: DialogueExample, task_id: str | None = None
    ) -> AnnotationTask:
        with self._lock:
            return self._add_unlocked(example, task_id)

    def add_dataset(self, dataset: Dataset) -> None:
        for example in dataset.examples:
            self.add_task(example)

    def get(self, task_id: str) -> AnnotationTask:
        with self._lock:
            task = self._tasks.get(task_id)
            if task is None:
                raise UnknownTask(f"no task {task_id!r}")
            return _snapshot(task)

    def next_task(self, annotator_id: str) -> AnnotationTask:
        """Claim the oldest open task; idempotent per annotator."""
        if not annotator_id:
            raise ValueError("annotator id must be non-empty")
        with self._lock:
            for task_id in self._order:
                task = self._tasks[task_id]
                if task.status == "claimed" and task.claimant == annotator_id:
                    return _snapshot(task)
            for task_id in self._order:
                task = self._tasks[task_id]
                if task.status == "open":
                    task.status = "claimed"
                    task.claimant = annotator_id
                    task.revision += 1
                    self._journal(
                        {
                            "event": "claim",
                            "task_id": task_id,
                            "annotator": annotator_id,
                            "revision": task.revision,
                        }
                    )
                    return _snapshot(task)
        raise NoOpenTasks("no open tasks left")

    def submit_tags(
        self, task_id: str, tags: list[str], revision: int
    ) -> AnnotationTask:
        """Validate and persist tags; exactly one concurrent writer wins."""
        with self._lock:
            task = self._tasks.get(task_id)
            if task is None:
                raise UnknownTask(f"no task {task_id!r}")
            if revision != task.revision:
                raise StaleRevision(
                    f"task {task_id} is at revision {task.revision}, not {revision}"
                )
            reasons = _validate_submission(task.example.summary.tokens, tags)
            if reasons:
                raise InvalidTags(reasons)
            task.working_tags = list(tags)
            task.status = "done"
            task.revision += 1
            self._journal(
                {
                    "event": "submit",
                    "task_id": task_id,
                    "tags": list(tags),
                    "revision": task.revision,
                }
            )
            return _snapshot(task)

    # -- export and stats -------------------------------------------------------

    def done_examples(self) -> list[DialogueExample]:
        with self._lock:
            done = [self._tasks[i] for i in self._order if self._tasks[i].status == "done"]
        out = []
        for task in done:
            ex = task.example
            out.append(
                DialogueExample(
                    dialogue=ex.dialogue,
                    summary=type(ex.summary)(
                        tokens=list(ex.summary.tokens),
                        tags=list(task.working_tags),
                        source_model=ex.summary.source_model,
                    ),
                    gold_summary=ex.gold_summary,
                )
            )
        return out

    def export_jsonl(self) -> str:
        """Corpus JSONL of all done tasks (empty string when none)."""
        lines = [
            dumps_record(example_to_record(ex)) for ex in self.done_examples()
        ]
        return "".join(line + "\n" for line in lines)

    def stats(self) -> dict:
        with self._lock:
            counts = {"open": 0, "claimed": 0, "done": 0}
            for task in self._tasks.values():
                counts[task.status] += 1
        done = self.done_examples()
        if done:
            per_tag = {
                code: {"count": c, "fraction": f}
                for code, (c, f) in tag_stats(Dataset(done)).items()
            }
        else:
            per_tag = {code: {"count": 0, "fraction": 0.0} for code in TAG_CODES}
        return {"tasks": counts, "tag_stats": per_tag}


# ---------------------------------------------------------------------------
# HTTP layer
# ---------------------------------------------------------------------------

class TagSubmission(BaseModel):
    tags: list[str]
    revision: int


def create_app(store: TaskStore):
    """FastAPI app over a task store. 409 = stale revision, 422 = bad tags."""
    from fastapi import FastAPI, HTTPException, Query
    from fastapi.middleware.cors import CORSMiddleware
    from fastapi.responses import PlainTextResponse, StreamingResponse

    app = FastAPI(title="faithtag annotation service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.get("/api/tasks/next")
    def next_task(annotator: str = Query(..., min_length=1)):
        try:
            return store.next_task(annotator).to_payload()
        except NoOpenTasks as exc:
            raise HTTPException(status_code=404, detail=str(exc))

    @app.get("/api/tasks/{task_id}")
    def get_task(task_id: str):
        try:
            return store.get(task_id).to_payload()
        except UnknownTask as exc:
            raise HTTPException(status_code=404, detail=str(exc))

    @app.post("/api/tasks/{task_id}/tags")
    def submit(task_id: str, submission: TagSubmission):
        try:
            return store.submit_tags(task_id, submission.tags, submission.revision).to_payload()
        except UnknownTask as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except StaleRevision as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except InvalidTags as exc:
            raise HTTPException(
                status_code=422,
                detail={
                    "message": "invalid tags",
                    "positions": {str(k): v for k, v in exc.reasons.items()},
                },
            )

    @app.get("/api/export")
    def export():
        def stream():
            yield store.export_jsonl()

        return StreamingResponse(stream(), media_type="application/x-ndjson")

    @app.get("/api/stats")
    def stats():
        return store.stats()

    @app.get("/api/guidelines", response_class=PlainTextResponse)
    def guidelines():
        return ANNOTATION_GUIDELINES

    return app
