"""Command line behavior: extract views, export, port resolution."""

from __future__ import annotations

import csv
import io
import json

import pytest

from tagpag import cli
from tagpag.store import AnnotationStore, load_labels, load_tasks, Annotation

from conftest import HTML_FIXTURES, GOLDEN_DIR


FIXTURE = str(HTML_FIXTURES / "article_with_nav.html")


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, out


# -- extract ------------------------------------------------------------------

def test_extract_clean_view_matches_golden(capsys):
    code, out = run(capsys, "extract", FIXTURE)
    assert code == 0
    want = (GOLDEN_DIR / "article_with_nav.clean.txt").read_text(encoding="utf-8")
    assert out == want + "\n"


def test_extract_raw_view(capsys):
    code, out = run(capsys, "extract", FIXTURE, "--view", "raw")
    assert code == 0
    assert "zzhome" in out


def test_extract_blocks_view_lists_every_block(capsys):
    code, out = run(capsys, "extract", FIXTURE, "--view", "blocks")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 3
    assert "reason=penalized" in lines[2]


def test_extract_json_payload(capsys):
    code, out = run(capsys, "extract", FIXTURE, "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert set(payload) == {"raw_text", "clean_text", "blocks"}
    assert payload["blocks"][0]["kept"] is True
    assert payload["blocks"][2] == {
        "tag": "p",
        "text": "zzcopyright 2024 zzexamplecorp",
        "char_count": 28,
        "link_char_count": 0,
        "link_density": 0.0,
        "penalty": True,
        "doc_order": 2,
        "kept": False,
        "reason": "penalized",
    }


def test_extract_charset_hint(tmp_path, capsys):
    page = tmp_path / "latin.html"
    page.write_bytes(b"<p>caf\xe9 and enough words to keep this block around.</p>")
    code, out = run(capsys, "extract", str(page), "--charset", "latin-1")
    assert code == 0
    assert "café" in out


# -- export -------------------------------------------------------------------

def test_export_writes_csv(tmp_path, corpus, capsys):
    tasks = load_tasks(corpus.tasks_path)
    config = load_labels(corpus.labels_path)
    store = AnnotationStore(corpus.annotations_dir, tasks, config)
    store.upsert_annotation(Annotation(
        task_id="t1", annotator_id="alice", labels=("pol",)))
    store.upsert_annotation(Annotation(
        task_id="t2", annotator_id="bob", labels=("sci",)))

    out_path = tmp_path / "out.csv"
    code, out = run(
        capsys, "export",
        "--annotations-dir", str(corpus.annotations_dir),
        "--tasks", str(corpus.tasks_path),
        "--labels", str(corpus.labels_path),
        "--out", str(out_path),
    )
    assert code == 0
    assert "2 row(s)" in out
    rows = list(csv.reader(io.StringIO(out_path.read_text(encoding="utf-8"))))
    assert len(rows) == 3
    assert rows[1][2] == "alice"


def test_export_scope(tmp_path, corpus, capsys):
    tasks = load_tasks(corpus.tasks_path)
    config = load_labels(corpus.labels_path)
    store = AnnotationStore(corpus.annotations_dir, tasks, config)
    store.upsert_annotation(Annotation(task_id="t1", annotator_id="alice", labels=("pol",)))
    store.upsert_annotation(Annotation(task_id="t1", annotator_id="bob", labels=("sci",)))

    out_path = tmp_path / "alice.csv"
    code, _ = run(
        capsys, "export",
        "--annotations-dir", str(corpus.annotations_dir),
        "--tasks", str(corpus.tasks_path),
        "--labels", str(corpus.labels_path),
        "--scope", "alice",
        "--out", str(out_path),
    )
    assert code == 0
    assert "bob" not in out_path.read_text(encoding="utf-8")


# -- serve and port resolution --------------------------------------------------

def test_serve_builds_app_and_passes_port(corpus, capsys, monkeypatch):
    seen = {}

    def fake_run(app, host, port, log_level):
        seen.update(app=app, host=host, port=port)

    monkeypatch.setattr("uvicorn.run", fake_run)
    code = cli.main([
        "serve",
        "--tasks", str(corpus.tasks_path),
        "--labels", str(corpus.labels_path),
        "--annotations-dir", str(corpus.annotations_dir),
        "--html-dir", str(corpus.html_dir),
        "--port", "9100",
    ])
    assert code == 0
    assert seen["port"] == 9100
    assert seen["host"] == "127.0.0.1"
    assert seen["app"].title


def test_port_flag_beats_env(monkeypatch):
    monkeypatch.setenv("TAGPAG_PORT", "7000")
    assert cli._resolve_port(9000) == 9000


def test_port_env_used_when_no_flag(monkeypatch):
    monkeypatch.setenv("TAGPAG_PORT", "7000")
    assert cli._resolve_port(None) == 7000


def test_port_default_when_nothing_set(monkeypatch):
    monkeypatch.delenv("TAGPAG_PORT", raising=False)
    assert cli._resolve_port(None) == 8080


def test_bad_port_env_falls_back_with_warning(monkeypatch, capsys):
    monkeypatch.setenv("TAGPAG_PORT", "not-a-number")
    assert cli._resolve_port(None) == 8080
    assert "TAGPAG_PORT" in capsys.readouterr().err
