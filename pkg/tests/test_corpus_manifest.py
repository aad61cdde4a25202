import json

import pytest

from polyfuse import errors
from polyfuse.corpus import dump_manifest, load_manifest, save_manifest
from polyfuse.corpus.types import MANIFEST_FORMAT_VERSION

from conftest import build_manifest


def write_jsonl(path, records):
    lines = [json.dumps({"kind": "header", "format_version": MANIFEST_FORMAT_VERSION})]
    lines += [json.dumps(r, ensure_ascii=False) for r in records]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def touch_media(root, names):
    (root / "media").mkdir(exist_ok=True)
    for name in names:
        (root / "media" / name).write_bytes(b"\x00")


VIDEO = {
    "kind": "video", "video_id": "vid00", "speaker_id": "spk00",
    "audio_path": "media/vid00.wav", "video_path": "media/vid00.mp4",
    "duration": 10.0,
}
UTT = {
    "kind": "utterance", "utterance_id": "utt0000", "video_id": "vid00",
    "start": 0.0, "end": 2.0, "transcript": "خیلی خوب بود",
}
ANN = {
    "kind": "annotation", "utterance_id": "utt0000", "annotator_id": "a1",
    "polarity": 1, "subjectivity": "subjective", "gestures": ["smile"],
}


def test_round_trip_two_videos(tmp_path):
    manifest = build_manifest(n_videos=2, utts_per_video=3)
    path = tmp_path / "manifest.jsonl"
    save_manifest(manifest, path)
    loaded = load_manifest(path, check_media=False)
    assert len(loaded.videos) == 2
    assert loaded.utterances == manifest.utterances
    assert dump_manifest(loaded) == dump_manifest(manifest)


def test_dump_is_order_independent(tmp_path):
    manifest = build_manifest(n_videos=2, utts_per_video=2)
    from dataclasses import replace

    shuffled = replace(
        manifest,
        videos=tuple(reversed(manifest.videos)),
        utterances=tuple(reversed(manifest.utterances)),
        annotations=tuple(reversed(manifest.annotations)),
    )
    assert dump_manifest(shuffled) == dump_manifest(manifest)


def test_dangling_annotation_names_record(tmp_path):
    path = tmp_path / "m.jsonl"
    touch_media(tmp_path, ["vid00.wav", "vid00.mp4"])
    bad_ann = dict(ANN, utterance_id="utt9999")
    write_jsonl(path, [VIDEO, UTT, bad_ann])
    with pytest.raises(errors.DanglingReference, match="utt9999"):
        load_manifest(path)


def test_utterance_with_unknown_video(tmp_path):
    path = tmp_path / "m.jsonl"
    touch_media(tmp_path, ["vid00.wav", "vid00.mp4"])
    write_jsonl(path, [VIDEO, dict(UTT, video_id="vidXX")])
    with pytest.raises(errors.DanglingReference, match="vidXX"):
        load_manifest(path)


def test_missing_media_detected(tmp_path):
    path = tmp_path / "m.jsonl"
    touch_media(tmp_path, ["vid00.wav"])  # mp4 absent
    write_jsonl(path, [VIDEO, UTT])
    with pytest.raises(errors.MissingMedia, match="vid00"):
        load_manifest(path)


def test_overlapping_utterances_rejected(tmp_path):
    path = tmp_path / "m.jsonl"
    touch_media(tmp_path, ["vid00.wav", "vid00.mp4"])
    second = dict(UTT, utterance_id="utt0001", start=1.0, end=3.0)
    write_jsonl(path, [VIDEO, UTT, second])
    with pytest.raises(errors.OverlappingUtterances, match="utt0000"):
        load_manifest(path)


def test_schema_version_mismatch(tmp_path):
    path = tmp_path / "m.jsonl"
    path.write_text(json.dumps({"kind": "header", "format_version": 99}) + "\n")
    with pytest.raises(errors.SchemaVersionMismatch):
        load_manifest(path)


def test_missing_header_rejected(tmp_path):
    path = tmp_path / "m.jsonl"
    path.write_text(json.dumps(VIDEO) + "\n")
    with pytest.raises(errors.SchemaVersionMismatch):
        load_manifest(path)


def test_duplicate_annotation_rejected(tmp_path):
    path = tmp_path / "m.jsonl"
    touch_media(tmp_path, ["vid00.wav", "vid00.mp4"])
    write_jsonl(path, [VIDEO, UTT, ANN, dict(ANN, polarity=-1)])
    with pytest.raises(errors.DuplicateRecord, match="a1"):
        load_manifest(path)


def test_out_of_enum_polarity_rejected(tmp_path):
    path = tmp_path / "m.jsonl"
    touch_media(tmp_path, ["vid00.wav", "vid00.mp4"])
    write_jsonl(path, [VIDEO, UTT, dict(ANN, polarity=2)])
    with pytest.raises(errors.ValidationError, match="polarity"):
        load_manifest(path)


def test_utterance_beyond_video_duration(tmp_path):
    path = tmp_path / "m.jsonl"
    touch_media(tmp_path, ["vid00.wav", "vid00.mp4"])
    write_jsonl(path, [VIDEO, dict(UTT, end=10.5)])
    with pytest.raises(errors.InvalidRecord, match="exceeds"):
        load_manifest(path)
