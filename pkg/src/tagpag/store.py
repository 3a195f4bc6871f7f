"""Task corpus, label configuration, and durable annotation storage.

Annotations live in one append-only JSONL log per annotator; replaying a log
front-to-back with last-write-wins reproduces the live state, and a trailing
partially-written record (crash mid-append) is skipped with a warning.
Annotators are isolated: reads are always scoped to one annotator id.
"""

from __future__ import annotations

import csv
import io
import json
import os
import re
import threading
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

MODE_SINGLE = "single"
MODE_MULTI = "multi"

# Keys the browser UI claims for navigation; label shortcuts may not use them.
RESERVED_SHORTCUTS = ("n", "p", "u", "e", "c", "?")

ANNOTATOR_ID_RE = re.compile(r"[A-Za-z0-9_-]+\Z")

TASKS_COLUMNS = ("task_id", "url", "html_path")
EXPORT_HEADER = ("task_id", "url", "annotator_id", "labels", "comment", "edited_text", "updated_at")

MIN_KEYWORD_LENGTH = 3


class StoreError(Exception):
    """Base for corpus/config/storage failures."""


class ConfigError(StoreError):
    pass


class MissingColumn(StoreError):
    pass


class DuplicateTaskId(StoreError):
    pass


class InvalidTaskId(StoreError):
    pass


class EmptyCorpus(StoreError):
    pass


class DuplicateKey(ConfigError):
    pass


class DuplicateShortcut(ConfigError):
    pass


class ReservedShortcut(ConfigError):
    pass


class KeywordTooShort(ConfigError):
    pass


class NoLabels(ConfigError):
    pass


class UnknownTask(StoreError):
    pass


class InvalidLabels(StoreError):
    pass


class InvalidAnnotatorId(StoreError):
    pass


class StorageFailure(StoreError):
    pass


class CorruptLog(StoreError):
    """A non-final log line failed to parse; the file was damaged externally."""


@dataclass(frozen=True)
class Task:
    task_id: str
    url: str
    html_ref: Optional[str] = None


@dataclass(frozen=True)
class LabelDef:
    key: str
    name: str
    shortcut: str
    keywords: tuple[str, ...] = ()


@dataclass(frozen=True)
class LabelConfig:
    mode: str
    labels: tuple[LabelDef, ...]

    @property
    def keys(self) -> tuple[str, ...]:
        return tuple(label.key for label in self.labels)


@dataclass(frozen=True)
class Annotation:
    task_id: str
    annotator_id: str
    labels: tuple[str, ...]
    comment: str = ""
    edited_text: Optional[str] = None
    updated_at: str = ""

    def is_empty(self) -> bool:
        """A deletion marker: no labels, no comment, no edited text."""
        return not self.labels and not self.comment and self.edited_text is None


def load_tasks(path) -> list[Task]:
    """Read the tasks CSV, preserving file order as canonical corpus order."""
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyCorpus(f"{path}: no header row") from None
        header = [name.strip() for name in header]
        positions = {}
        for name in TASKS_COLUMNS:
            if name not in header:
                raise MissingColumn(name)
            positions[name] = header.index(name)

        tasks = []
        seen = set()
        for row in reader:
            if not any(cell.strip() for cell in row):
                continue
            def cell(name):
                idx = positions[name]
                return row[idx] if idx < len(row) else ""
            task_id = cell("task_id")
            if not task_id or "\r" in task_id or "\n" in task_id:
                raise InvalidTaskId(repr(task_id))
            if task_id in seen:
                raise DuplicateTaskId(task_id)
            seen.add(task_id)
            tasks.append(Task(
                task_id=task_id,
                url=cell("url"),
                html_ref=cell("html_path") or None,
            ))
    if not tasks:
        raise EmptyCorpus(str(path))
    return tasks


def load_labels(path) -> LabelConfig:
    """Read and validate the labels JSON file."""
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ConfigError("labels file must be a JSON object")
    mode = raw.get("mode")
    if mode not in (MODE_SINGLE, MODE_MULTI):
        raise ConfigError(f"mode must be {MODE_SINGLE!r} or {MODE_MULTI!r}, got {mode!r}")
    entries = raw.get("labels")
    if not isinstance(entries, list) or not entries:
        raise NoLabels(str(path))

    labels = []
    seen_keys = set()
    seen_shortcuts = set()
    for entry in entries:
        if not isinstance(entry, dict):
            raise ConfigError(f"label entry must be an object, got {entry!r}")
        key = entry.get("key")
        if not isinstance(key, str) or not key:
            raise ConfigError(f"label key missing or empty in {entry!r}")
        if key in seen_keys:
            raise DuplicateKey(key)
        seen_keys.add(key)

        name = entry.get("name")
        if not isinstance(name, str) or not name:
            raise ConfigError(f"label {key!r}: name missing or empty")

        shortcut = entry.get("shortcut")
        if not isinstance(shortcut, str) or len(shortcut) != 1 or not shortcut.isprintable():
            raise ConfigError(f"label {key!r}: shortcut must be one printable character")
        if shortcut.lower() in RESERVED_SHORTCUTS:
            raise ReservedShortcut(shortcut)
        if shortcut in seen_shortcuts:
            raise DuplicateShortcut(shortcut)
        seen_shortcuts.add(shortcut)

        keywords = []
        for keyword in entry.get("keywords", ()):
            if not isinstance(keyword, str):
                raise ConfigError(f"label {key!r}: keyword {keyword!r} is not a string")
            keyword = keyword.strip().lower()
            if len(keyword) < MIN_KEYWORD_LENGTH:
                raise KeywordTooShort(keyword)
            keywords.append(keyword)

        labels.append(LabelDef(key=key, name=name, shortcut=shortcut, keywords=tuple(keywords)))

    return LabelConfig(mode=mode, labels=tuple(labels))


def _annotation_from_record(record) -> Annotation:
    if not isinstance(record, dict):
        raise ValueError("record is not an object")
    task_id = record["task_id"]
    annotator_id = record["annotator_id"]
    labels = record["labels"]
    comment = record.get("comment", "")
    edited_text = record.get("edited_text")
    updated_at = record.get("updated_at", "")
    if not isinstance(task_id, str) or not isinstance(annotator_id, str):
        raise ValueError("task_id/annotator_id must be strings")
    if not isinstance(labels, list) or not all(isinstance(k, str) for k in labels):
        raise ValueError("labels must be a list of strings")
    if not isinstance(comment, str) or not isinstance(updated_at, str):
        raise ValueError("comment/updated_at must be strings")
    if edited_text is not None and not isinstance(edited_text, str):
        raise ValueError("edited_text must be a string or null")
    return Annotation(
        task_id=task_id,
        annotator_id=annotator_id,
        labels=tuple(labels),
        comment=comment,
        edited_text=edited_text,
        updated_at=updated_at,
    )


def replay_log(path) -> tuple[dict[str, Annotation], int]:
    """Rebuild one annotator's state from their log, last write wins.

    Returns (task_id -> annotation, warning_count). Only the final line may
    be unparsable (a crash mid-append); damage anywhere else raises
    CorruptLog rather than silently dropping history.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    state: dict[str, Annotation] = {}
    warnings = 0
    lines = data.split(b"\n")
    last = len(lines) - 1
    for index, line in enumerate(lines):
        if not line.strip():
            continue
        try:
            annotation = _annotation_from_record(json.loads(line.decode("utf-8")))
        except (ValueError, KeyError, UnicodeDecodeError):
            if index == last:
                warnings += 1
                continue
            raise CorruptLog(f"{path}: unparsable record at line {index + 1}") from None
        state[annotation.task_id] = annotation
    return state, warnings


def _now_iso() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


class AnnotationStore:
    """Live annotation state over per-annotator append-only logs.

    All mutations are serialized through one lock and flushed to disk before
    success is reported, so a crash never loses an acknowledged write.
    """

    def __init__(self, annotations_dir, tasks: list[Task], config: LabelConfig):
        self._dir = Path(annotations_dir)
        self._dir.mkdir(parents=True, exist_ok=True)
        self._tasks = tasks
        self._task_index = {task.task_id: i for i, task in enumerate(tasks)}
        self._config = config
        self._label_keys = set(config.keys)
        self._lock = threading.RLock()
        self._state: dict[str, dict[str, Annotation]] = {}
        self.replay_warnings = 0
        self._load_existing()

    @property
    def tasks(self) -> list[Task]:
        return self._tasks

    @property
    def config(self) -> LabelConfig:
        return self._config

    def task_index(self, task_id: str) -> Optional[int]:
        return self._task_index.get(task_id)

    def _load_existing(self) -> None:
        for log_path in sorted(self._dir.glob("*.jsonl")):
            annotator_id = log_path.stem
            if not ANNOTATOR_ID_RE.fullmatch(annotator_id):
                self.replay_warnings += 1
                continue
            state, warnings = replay_log(log_path)
            self.replay_warnings += warnings
            for task_id, annotation in state.items():
                # Records orphaned by corpus or config edits are skipped so
                # live state always satisfies the current invariants.
                if task_id not in self._task_index:
                    self.replay_warnings += 1
                    continue
                if not self._labels_valid(annotation.labels):
                    self.replay_warnings += 1
                    continue
                self._state.setdefault(annotator_id, {})[task_id] = annotation

    def _labels_valid(self, labels) -> bool:
        if any(key not in self._label_keys for key in labels):
            return False
        if self._config.mode == MODE_SINGLE and len(labels) > 1:
            return False
        return True

    def _log_path(self, annotator_id: str) -> Path:
        return self._dir / f"{annotator_id}.jsonl"

    def upsert_annotation(self, annotation: Annotation) -> Annotation:
        """Validate, append to the annotator's log, then update memory.

        The committed annotation (with the server-assigned timestamp) is
        returned; on a storage failure nothing changes.
        """
        if not ANNOTATOR_ID_RE.fullmatch(annotation.annotator_id):
            raise InvalidAnnotatorId(annotation.annotator_id)
        if annotation.task_id not in self._task_index:
            raise UnknownTask(annotation.task_id)
        labels = tuple(dict.fromkeys(annotation.labels))
        unknown = [key for key in labels if key not in self._label_keys]
        if unknown:
            raise InvalidLabels(f"unknown label keys: {unknown}")
        if self._config.mode == MODE_SINGLE and len(labels) > 1:
            raise InvalidLabels("single mode allows at most one label")

        # An empty edit is no edit; storing None keeps CSV round-trips exact.
        edited_text = annotation.edited_text if annotation.edited_text else None
        committed = replace(
            annotation, labels=labels, edited_text=edited_text, updated_at=_now_iso(),
        )
        record = {
            "task_id": committed.task_id,
            "annotator_id": committed.annotator_id,
            "labels": list(committed.labels),
            "comment": committed.comment,
            "edited_text": committed.edited_text,
            "updated_at": committed.updated_at,
        }
        line = json.dumps(record, ensure_ascii=False) + "\n"
        with self._lock:
            try:
                with open(self._log_path(committed.annotator_id), "a", encoding="utf-8") as fh:
                    fh.write(line)
                    fh.flush()
                    os.fsync(fh.fileno())
            except OSError as exc:
                raise StorageFailure(str(exc)) from exc
            self._state.setdefault(committed.annotator_id, {})[committed.task_id] = committed
        return committed

    def get_annotation(self, task_id: str, annotator_id: str) -> Optional[Annotation]:
        """This annotator's annotation only; never another's."""
        with self._lock:
            return self._state.get(annotator_id, {}).get(task_id)

    def annotated_task_indices(self, annotator_id: str) -> set[int]:
        """Corpus indices this annotator has live (non-deleted) annotations for."""
        with self._lock:
            own = self._state.get(annotator_id, {})
            return {
                self._task_index[task_id]
                for task_id, annotation in own.items()
                if not annotation.is_empty()
            }

    def export_csv(self, scope: str = "all") -> bytes:
        """RFC-4180 CSV of annotations; scope is "all" or one annotator id.

        Labels come out joined by "|" in label-config order; rows sort by
        (annotator_id, corpus order); deletion markers are skipped. UTF-8,
        LF line endings, no BOM.
        """
        label_rank = {key: i for i, key in enumerate(self._config.keys)}
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(EXPORT_HEADER)
        with self._lock:
            annotator_ids = sorted(self._state) if scope == "all" else [scope]
            for annotator_id in annotator_ids:
                own = self._state.get(annotator_id, {})
                for task in self._tasks:
                    annotation = own.get(task.task_id)
                    if annotation is None or annotation.is_empty():
                        continue
                    labels = sorted(annotation.labels, key=label_rank.get)
                    writer.writerow([
                        annotation.task_id,
                        task.url,
                        annotation.annotator_id,
                        "|".join(labels),
                        annotation.comment,
                        annotation.edited_text or "",
                        annotation.updated_at,
                    ])
        return buffer.getvalue().encode("utf-8")
