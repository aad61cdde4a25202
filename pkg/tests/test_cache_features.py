import numpy as np
import pytest

from polyfuse import cache
from polyfuse.corpus import load_manifest, resolve_labels
from polyfuse.features import (
    AudioFeatureParams,
    VisualFeatureParams,
    build_audio_features,
    build_text_features,
    build_visual_features,
    load_feature_set,
)
from polyfuse.synth import SynthSpec, generate_corpus
from polyfuse.text.embeddings import load_embeddings


@pytest.fixture(scope="module")
def tiny_corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("tiny")
    result = generate_corpus(
        root,
        SynthSpec(
            scenario="separable", n_utterances=12, n_speakers=4, seed=1,
            frame_size=32, video_format="npz",
        ),
    )
    manifest = resolve_labels(load_manifest(result.manifest_path, media_root=root))
    return root, manifest, result


def test_cache_entry_round_trip(tmp_path):
    arrays = {"values": np.arange(6.0).reshape(2, 3)}
    cache.write_entry(tmp_path, "audio", "u1", arrays, "audio-1", "abc",
                      extra_metadata={"frame_hop": 0.025})
    loaded, metadata = cache.read_entry(tmp_path, "audio", "u1")
    np.testing.assert_array_equal(loaded["values"], arrays["values"])
    assert metadata["utterance_id"] == "u1"
    assert metadata["modality"] == "audio"
    assert metadata["shape"] == [2, 3]
    assert metadata["pipeline_version"] == "audio-1"
    assert metadata["frame_hop"] == 0.025
    assert cache.entry_is_current(tmp_path, "audio", "u1", "audio-1", "abc")
    assert not cache.entry_is_current(tmp_path, "audio", "u1", "audio-2", "abc")
    assert not cache.entry_is_current(tmp_path, "audio", "u1", "audio-1", "xyz")


def test_second_build_skips_everything(tiny_corpus):
    root, manifest, result = tiny_corpus
    cache_dir = root / "cache_idem"
    params = AudioFeatureParams()
    first = build_audio_features(manifest, root, cache_dir, params)
    assert len(first.built) == 12 and not first.failed
    second = build_audio_features(manifest, root, cache_dir, params)
    assert second.built == [] and len(second.skipped) == 12


def test_param_change_triggers_rebuild(tiny_corpus):
    root, manifest, result = tiny_corpus
    cache_dir = root / "cache_params"
    build_audio_features(manifest, root, cache_dir, AudioFeatureParams())
    changed = AudioFeatureParams(voicing_threshold=0.6)
    report = build_audio_features(manifest, root, cache_dir, changed)
    assert len(report.built) == 12


def test_version_bump_triggers_rebuild(tiny_corpus, monkeypatch):
    root, manifest, result = tiny_corpus
    cache_dir = root / "cache_version"
    build_text_features(
        manifest, load_embeddings(result.embeddings_path),
        cache.file_hash(result.embeddings_path), cache_dir,
    )
    import polyfuse.features as features_mod

    monkeypatch.setattr(features_mod, "TEXT_PIPELINE_VERSION", "text-2")
    report = build_text_features(
        manifest, load_embeddings(result.embeddings_path),
        cache.file_hash(result.embeddings_path), cache_dir,
    )
    assert len(report.built) == 12


def test_corrupt_wav_reported_not_raised(tiny_corpus):
    root, manifest, result = tiny_corpus
    (root / "media" / "vid00.wav").write_bytes(b"not audio at all")
    try:
        report = build_audio_features(
            manifest, root, root / "cache_bad", AudioFeatureParams()
        )
        damaged = [u.utterance_id for u in manifest.utterances if u.video_id == "vid00"]
        assert set(report.failed) == set(damaged)
        assert len(report.built) == 12 - len(damaged)
    finally:
        # restore for other tests in the module
        from polyfuse.synth import SynthSpec, generate_corpus

        generate_corpus(root, SynthSpec(
            scenario="separable", n_utterances=12, n_speakers=4, seed=1,
            frame_size=32, video_format="npz",
        ))


def test_visual_build_and_load(tiny_corpus):
    root, manifest, result = tiny_corpus
    cache_dir = root / "cache_vis"
    report = build_visual_features(
        manifest, root, cache_dir, VisualFeatureParams(frames=8, height=16, width=16)
    )
    assert not report.failed
    uids = [u.utterance_id for u in manifest.utterances]
    features = load_feature_set(manifest, cache_dir, ("visual",), uids)
    assert features.visual[uids[0]].values.shape == (8, 16, 16, 3)
    _, metadata = cache.read_entry(cache_dir, "visual", uids[0])
    assert metadata["decoder"] == "npz"


def test_feature_set_require(tiny_corpus):
    from polyfuse.errors import MissingModality
    from polyfuse.features import FeatureSet

    features = FeatureSet(audio={"u1": np.zeros(3)})
    features.require("audio", ["u1"])
    with pytest.raises(MissingModality):
        features.require("audio", ["u1", "u2"])
