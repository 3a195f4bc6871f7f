"""Corpus loading, label config validation, durable logs, CSV export."""

from __future__ import annotations

import csv
import io
import json

import pytest

from tagpag.store import (
    Annotation,
    AnnotationStore,
    ConfigError,
    CorruptLog,
    DuplicateKey,
    DuplicateShortcut,
    DuplicateTaskId,
    EmptyCorpus,
    InvalidAnnotatorId,
    InvalidLabels,
    InvalidTaskId,
    KeywordTooShort,
    LabelConfig,
    LabelDef,
    MissingColumn,
    NoLabels,
    ReservedShortcut,
    StorageFailure,
    UnknownTask,
    load_labels,
    load_tasks,
    replay_log,
)

from conftest import DEFAULT_LABELS, write_labels_json, write_tasks_csv


def make_store(tmp_path, mode="multi", n_tasks=3):
    rows = [(f"t{i}", f"https://example.com/{i}", "") for i in range(1, n_tasks + 1)]
    tasks = load_tasks(write_tasks_csv(tmp_path / "tasks.csv", rows))
    config = LabelConfig(mode=mode, labels=(
        LabelDef(key="yes", name="Yes", shortcut="1"),
        LabelDef(key="no", name="No", shortcut="2"),
        LabelDef(key="maybe", name="Maybe", shortcut="3"),
    ))
    return AnnotationStore(tmp_path / "ann", tasks, config)


def ann(task_id="t1", annotator_id="alice", labels=("yes",), comment="", edited_text=None):
    return Annotation(task_id=task_id, annotator_id=annotator_id,
                      labels=tuple(labels), comment=comment, edited_text=edited_text)


# -- tasks CSV ----------------------------------------------------------------

def test_load_tasks_preserves_order_and_fields(tmp_path):
    path = write_tasks_csv(tmp_path / "t.csv", [
        ("b", "https://example.com/b", "b.html"),
        ("a", "https://example.com/a", ""),
    ])
    tasks = load_tasks(path)
    assert [t.task_id for t in tasks] == ["b", "a"]
    assert tasks[0].html_ref == "b.html"
    assert tasks[1].html_ref is None


def test_load_tasks_tolerates_bom_extra_columns_and_blank_rows(tmp_path):
    path = tmp_path / "t.csv"
    path.write_bytes(
        "﻿task_id,notes,url,html_path\n"
        "t1,hello,https://example.com/1,\n"
        "\n"
        ",,,\n"
        "t2,bye,https://example.com/2,p.html\n".encode("utf-8")
    )
    tasks = load_tasks(path)
    assert [t.task_id for t in tasks] == ["t1", "t2"]


def test_load_tasks_missing_column(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("task_id,link\nt1,x\n", encoding="utf-8")
    with pytest.raises(MissingColumn):
        load_tasks(path)


def test_load_tasks_duplicate_id(tmp_path):
    path = write_tasks_csv(tmp_path / "t.csv", [
        ("t1", "https://example.com/1", ""),
        ("t1", "https://example.com/2", ""),
    ])
    with pytest.raises(DuplicateTaskId):
        load_tasks(path)


def test_load_tasks_rejects_newline_and_empty_ids(tmp_path):
    path = write_tasks_csv(tmp_path / "t.csv", [("has\nnewline", "https://x.test", "")])
    with pytest.raises(InvalidTaskId):
        load_tasks(path)
    path2 = tmp_path / "t2.csv"
    path2.write_text('task_id,url,html_path\n,"https://x.test",\n', encoding="utf-8")
    with pytest.raises(InvalidTaskId):
        load_tasks(path2)


def test_load_tasks_empty_corpus(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("task_id,url,html_path\n", encoding="utf-8")
    with pytest.raises(EmptyCorpus):
        load_tasks(path)
    path.write_text("", encoding="utf-8")
    with pytest.raises(EmptyCorpus):
        load_tasks(path)


# -- labels config ------------------------------------------------------------

def test_load_labels_happy_path(tmp_path):
    config = load_labels(write_labels_json(tmp_path / "l.json", DEFAULT_LABELS))
    assert config.mode == "single"
    assert config.keys == ("pol", "sci", "other")
    assert config.labels[0].keywords == ("politics", "election")


def test_load_labels_normalizes_keywords(tmp_path):
    config = load_labels(write_labels_json(tmp_path / "l.json", {
        "mode": "multi",
        "labels": [{"key": "k", "name": "K", "shortcut": "1",
                    "keywords": ["  MiXeD  ", "plain"]}],
    }))
    assert config.labels[0].keywords == ("mixed", "plain")


def label_file(tmp_path, **overrides):
    base = {"mode": "multi",
            "labels": [{"key": "k", "name": "K", "shortcut": "1"}]}
    base.update(overrides)
    return write_labels_json(tmp_path / "l.json", base)


def test_load_labels_rejects_bad_mode(tmp_path):
    with pytest.raises(ConfigError):
        load_labels(label_file(tmp_path, mode="both"))


def test_load_labels_rejects_empty_list(tmp_path):
    with pytest.raises(NoLabels):
        load_labels(label_file(tmp_path, labels=[]))


def test_load_labels_rejects_duplicate_key(tmp_path):
    with pytest.raises(DuplicateKey):
        load_labels(label_file(tmp_path, labels=[
            {"key": "k", "name": "A", "shortcut": "1"},
            {"key": "k", "name": "B", "shortcut": "2"},
        ]))


def test_load_labels_rejects_duplicate_shortcut(tmp_path):
    with pytest.raises(DuplicateShortcut):
        load_labels(label_file(tmp_path, labels=[
            {"key": "a", "name": "A", "shortcut": "1"},
            {"key": "b", "name": "B", "shortcut": "1"},
        ]))


@pytest.mark.parametrize("shortcut", ["n", "N", "p", "?", "E"])
def test_load_labels_rejects_reserved_shortcuts(tmp_path, shortcut):
    with pytest.raises(ReservedShortcut):
        load_labels(label_file(tmp_path, labels=[
            {"key": "k", "name": "K", "shortcut": shortcut},
        ]))


def test_load_labels_rejects_short_keywords(tmp_path):
    with pytest.raises(KeywordTooShort):
        load_labels(label_file(tmp_path, labels=[
            {"key": "k", "name": "K", "shortcut": "1", "keywords": ["ab"]},
        ]))


def test_load_labels_rejects_multichar_shortcut(tmp_path):
    with pytest.raises(ConfigError):
        load_labels(label_file(tmp_path, labels=[
            {"key": "k", "name": "K", "shortcut": "12"},
        ]))


# -- upsert and read ----------------------------------------------------------

def test_upsert_roundtrip(tmp_path):
    store = make_store(tmp_path)
    committed = store.upsert_annotation(ann(comment="note", edited_text="edited"))
    assert committed.updated_at
    got = store.get_annotation("t1", "alice")
    assert got == committed
    assert got.labels == ("yes",)
    assert got.edited_text == "edited"


def test_upsert_last_write_wins(tmp_path):
    store = make_store(tmp_path)
    store.upsert_annotation(ann(labels=("yes",)))
    store.upsert_annotation(ann(labels=("no",), comment="changed my mind"))
    got = store.get_annotation("t1", "alice")
    assert got.labels == ("no",)
    assert got.comment == "changed my mind"


def test_upsert_deduplicates_labels_preserving_order(tmp_path):
    store = make_store(tmp_path)
    store.upsert_annotation(ann(labels=("no", "yes", "no")))
    assert store.get_annotation("t1", "alice").labels == ("no", "yes")


def test_upsert_rejects_unknown_task(tmp_path):
    with pytest.raises(UnknownTask):
        make_store(tmp_path).upsert_annotation(ann(task_id="missing"))


def test_upsert_rejects_unknown_label(tmp_path):
    with pytest.raises(InvalidLabels):
        make_store(tmp_path).upsert_annotation(ann(labels=("nope",)))


def test_upsert_enforces_single_mode(tmp_path):
    store = make_store(tmp_path, mode="single")
    with pytest.raises(InvalidLabels):
        store.upsert_annotation(ann(labels=("yes", "no")))
    store.upsert_annotation(ann(labels=("yes",)))


@pytest.mark.parametrize("bad_id", ["", "has space", "sl/ash", "dot.dot", "a\nb"])
def test_upsert_rejects_bad_annotator_ids(tmp_path, bad_id):
    with pytest.raises(InvalidAnnotatorId):
        make_store(tmp_path).upsert_annotation(ann(annotator_id=bad_id))


def test_empty_edited_text_is_stored_as_null(tmp_path):
    store = make_store(tmp_path)
    store.upsert_annotation(ann(edited_text=""))
    assert store.get_annotation("t1", "alice").edited_text is None


def test_annotators_are_isolated(tmp_path):
    store = make_store(tmp_path)
    store.upsert_annotation(ann(annotator_id="alice", labels=("yes",)))
    store.upsert_annotation(ann(annotator_id="bob", labels=("no",)))
    assert store.get_annotation("t1", "alice").labels == ("yes",)
    assert store.get_annotation("t1", "bob").labels == ("no",)
    assert store.get_annotation("t1", "carol") is None


def test_deletion_marker_clears_annotated_status(tmp_path):
    store = make_store(tmp_path)
    store.upsert_annotation(ann(labels=("yes",)))
    assert store.annotated_task_indices("alice") == {0}
    store.upsert_annotation(ann(labels=()))
    assert store.annotated_task_indices("alice") == set()
    # the marker itself is still readable (it records the deletion)
    assert store.get_annotation("t1", "alice").is_empty()


def test_comment_only_annotation_counts_as_annotated(tmp_path):
    store = make_store(tmp_path)
    store.upsert_annotation(ann(labels=(), comment="just a note"))
    assert store.annotated_task_indices("alice") == {0}


# -- durability ---------------------------------------------------------------

def test_state_survives_restart(tmp_path):
    store = make_store(tmp_path)
    store.upsert_annotation(ann(task_id="t1", labels=("yes",)))
    store.upsert_annotation(ann(task_id="t2", labels=("no",), comment="x"))
    store.upsert_annotation(ann(task_id="t1", labels=("maybe",)))

    reopened = make_store(tmp_path)
    assert reopened.replay_warnings == 0
    assert reopened.get_annotation("t1", "alice").labels == ("maybe",)
    assert reopened.get_annotation("t2", "alice").comment == "x"


def test_logs_are_one_json_object_per_line(tmp_path):
    store = make_store(tmp_path)
    store.upsert_annotation(ann())
    store.upsert_annotation(ann(labels=("no",)))
    lines = (tmp_path / "ann" / "alice.jsonl").read_text().splitlines()
    assert len(lines) == 2
    for line in lines:
        record = json.loads(line)
        assert record["task_id"] == "t1"


def test_truncated_final_record_is_skipped_with_warning(tmp_path):
    store = make_store(tmp_path)
    store.upsert_annotation(ann(task_id="t1"))
    store.upsert_annotation(ann(task_id="t2"))
    log = tmp_path / "ann" / "alice.jsonl"
    log.write_bytes(log.read_bytes() + b'{"task_id": "t3", "annotator')

    reopened = make_store(tmp_path)
    assert reopened.replay_warnings == 1
    assert reopened.get_annotation("t1", "alice") is not None
    assert reopened.get_annotation("t2", "alice") is not None
    assert reopened.get_annotation("t3", "alice") is None


def test_corrupt_middle_record_raises(tmp_path):
    store = make_store(tmp_path)
    store.upsert_annotation(ann(task_id="t1"))
    store.upsert_annotation(ann(task_id="t2"))
    log = tmp_path / "ann" / "alice.jsonl"
    lines = log.read_bytes().split(b"\n")
    lines[0] = lines[0][:10]
    log.write_bytes(b"\n".join(lines))
    with pytest.raises(CorruptLog):
        replay_log(log)
    with pytest.raises(CorruptLog):
        make_store(tmp_path)


def test_orphaned_records_are_dropped_with_warning(tmp_path):
    store = make_store(tmp_path)
    store.upsert_annotation(ann(task_id="t1"))
    log = tmp_path / "ann" / "alice.jsonl"
    orphan = json.dumps({"task_id": "gone", "annotator_id": "alice",
                         "labels": ["yes"], "comment": "", "edited_text": None,
                         "updated_at": "2024-01-01T00:00:00Z"})
    log.write_bytes(log.read_bytes() + orphan.encode() + b"\n")

    reopened = make_store(tmp_path)
    assert reopened.replay_warnings == 1
    assert reopened.get_annotation("t1", "alice") is not None


def test_logs_with_invalid_annotator_stems_are_ignored(tmp_path):
    store = make_store(tmp_path)
    store.upsert_annotation(ann())
    bad = tmp_path / "ann" / "not a valid stem.jsonl"
    bad.write_text('{"task_id": "t1", "annotator_id": "x", "labels": []}\n')
    reopened = make_store(tmp_path)
    assert reopened.replay_warnings == 1
    assert reopened.get_annotation("t1", "alice") is not None


def test_storage_failure_leaves_state_unchanged(tmp_path, monkeypatch):
    store = make_store(tmp_path)
    store.upsert_annotation(ann(labels=("yes",)))

    def broken_open(*args, **kwargs):
        raise OSError("disk full")

    monkeypatch.setattr("builtins.open", broken_open)
    with pytest.raises(StorageFailure):
        store.upsert_annotation(ann(labels=("no",)))
    monkeypatch.undo()
    assert store.get_annotation("t1", "alice").labels == ("yes",)


# -- export -------------------------------------------------------------------

def parse_csv(data: bytes):
    assert not data.startswith(b"\xef\xbb\xbf"), "export must not carry a BOM"
    text = data.decode("utf-8")
    assert "\r" not in text, "export must use LF line endings"
    return list(csv.reader(io.StringIO(text)))


def test_export_header_and_row_shape(tmp_path):
    store = make_store(tmp_path)
    store.upsert_annotation(ann(comment="note", edited_text="fixed text"))
    rows = parse_csv(store.export_csv())
    assert rows[0] == ["task_id", "url", "annotator_id", "labels",
                       "comment", "edited_text", "updated_at"]
    assert rows[1][:6] == ["t1", "https://example.com/1", "alice", "yes",
                           "note", "fixed text"]
    assert rows[1][6]


def test_export_joins_labels_in_config_order(tmp_path):
    store = make_store(tmp_path)
    store.upsert_annotation(ann(labels=("maybe", "yes")))
    rows = parse_csv(store.export_csv())
    assert rows[1][3] == "yes|maybe"


def test_export_sorts_by_annotator_then_corpus_order(tmp_path):
    store = make_store(tmp_path)
    store.upsert_annotation(ann(task_id="t3", annotator_id="zoe"))
    store.upsert_annotation(ann(task_id="t2", annotator_id="zoe"))
    store.upsert_annotation(ann(task_id="t3", annotator_id="amy"))
    rows = parse_csv(store.export_csv())
    assert [(r[2], r[0]) for r in rows[1:]] == [
        ("amy", "t3"), ("zoe", "t2"), ("zoe", "t3"),
    ]


def test_export_skips_deletion_markers(tmp_path):
    store = make_store(tmp_path)
    store.upsert_annotation(ann(task_id="t1"))
    store.upsert_annotation(ann(task_id="t2"))
    store.upsert_annotation(ann(task_id="t1", labels=()))
    rows = parse_csv(store.export_csv())
    assert [r[0] for r in rows[1:]] == ["t2"]


def test_export_scope_filters_to_one_annotator(tmp_path):
    store = make_store(tmp_path)
    store.upsert_annotation(ann(annotator_id="alice"))
    store.upsert_annotation(ann(annotator_id="bob"))
    rows = parse_csv(store.export_csv(scope="bob"))
    assert [r[2] for r in rows[1:]] == ["bob"]
    assert parse_csv(store.export_csv(scope="nobody")) [1:] == []


def test_export_quotes_tricky_fields(tmp_path):
    store = make_store(tmp_path)
    tricky = 'He said "no", twice.\nThen left.'
    store.upsert_annotation(ann(comment=tricky, edited_text="a,b"))
    rows = parse_csv(store.export_csv())
    assert rows[1][4] == tricky
    assert rows[1][5] == "a,b"


def test_export_preserves_unicode_without_bom(tmp_path):
    store = make_store(tmp_path)
    store.upsert_annotation(ann(comment="résumé → done"))
    data = store.export_csv()
    rows = parse_csv(data)
    assert rows[1][4] == "résumé → done"
