"""Shared fixtures: a small corpus on disk and a ready-made API client."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from types import SimpleNamespace

import pytest

FIXTURES_DIR = Path(__file__).parent / "fixtures"
HTML_FIXTURES = FIXTURES_DIR / "html"
GOLDEN_DIR = FIXTURES_DIR / "golden"
WAYBACK_DIR = FIXTURES_DIR / "wayback"

DEFAULT_TASKS = [
    ("t1", "https://news.example.com/politics/2024/election?ref=home", "t1.html"),
    ("t2", "https://example.com/a-b", "t2.html"),
    ("t3", "https://blog.example.org/science/space#intro", ""),
]

DEFAULT_LABELS = {
    "mode": "single",
    "labels": [
        {"key": "pol", "name": "Politics", "shortcut": "1", "keywords": ["politics", "election"]},
        {"key": "sci", "name": "Science", "shortcut": "2", "keywords": ["science"]},
        {"key": "other", "name": "Other", "shortcut": "3"},
    ],
}

T1_HTML = (
    b"<html><body><nav><a href='/'>zzhome</a></nav>"
    b"<p>A paragraph long enough to clear the default length threshold easily.</p>"
    b"</body></html>"
)
T2_HTML = b"<html><body><p>Another paragraph with enough characters to be kept.</p></body></html>"


def write_tasks_csv(path: Path, rows) -> Path:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["task_id", "url", "html_path"])
        writer.writerows(rows)
    return path


def write_labels_json(path: Path, config: dict) -> Path:
    path.write_text(json.dumps(config), encoding="utf-8")
    return path


@pytest.fixture
def corpus(tmp_path):
    """Three tasks, single-label config, two stored HTML pages."""
    tasks_path = write_tasks_csv(tmp_path / "tasks.csv", DEFAULT_TASKS)
    labels_path = write_labels_json(tmp_path / "labels.json", DEFAULT_LABELS)
    html_dir = tmp_path / "html"
    html_dir.mkdir()
    (html_dir / "t1.html").write_bytes(T1_HTML)
    (html_dir / "t2.html").write_bytes(T2_HTML)
    return SimpleNamespace(
        root=tmp_path,
        tasks_path=tasks_path,
        labels_path=labels_path,
        html_dir=html_dir,
        annotations_dir=tmp_path / "annotations",
    )


@pytest.fixture
def client(corpus):
    from fastapi.testclient import TestClient

    from tagpag import server

    state = server.build_state(
        tasks_path=corpus.tasks_path,
        labels_path=corpus.labels_path,
        annotations_dir=corpus.annotations_dir,
        html_dir=corpus.html_dir,
    )
    return TestClient(server.create_app(state))
