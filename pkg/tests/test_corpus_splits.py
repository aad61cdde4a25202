import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyfuse import errors
from polyfuse.corpus import check_speaker_exclusive, make_splits, resolve_labels

from conftest import build_manifest


def test_exact_ratios_under_divisibility():
    m = resolve_labels(build_manifest(n_videos=10, utts_per_video=10))
    for seed in (0, 1, 7, 12345):
        split = make_splits(m, ratios=(0.6, 0.1, 0.3), seed=seed)
        counts = {
            name: sum(1 for s in split.split.values() if s == name)
            for name in ("train", "validation", "test")
        }
        assert counts == {"train": 60, "validation": 10, "test": 30}


def test_same_seed_same_assignment():
    m = resolve_labels(build_manifest(n_videos=7, utts_per_video=5))
    a = make_splits(m, seed=42)
    b = make_splits(m, seed=42)
    assert a == b
    assert a.fingerprint() == b.fingerprint()


def test_different_seeds_differ():
    m = resolve_labels(build_manifest(n_videos=12, utts_per_video=4))
    assignments = {make_splits(m, seed=s).fingerprint() for s in range(8)}
    assert len(assignments) > 1


def test_too_few_speakers():
    m = resolve_labels(build_manifest(n_videos=2, utts_per_video=5))
    with pytest.raises(errors.TooFewSpeakers):
        make_splits(m)


def test_split_is_file_order_independent():
    from dataclasses import replace

    m = resolve_labels(build_manifest(n_videos=8, utts_per_video=3))
    shuffled = replace(
        m,
        videos=tuple(reversed(m.videos)),
        utterances=tuple(reversed(m.utterances)),
    )
    shuffled = resolve_labels(shuffled)
    assert make_splits(m, seed=3).split == make_splits(shuffled, seed=3).split


def test_ratios_must_sum_to_one():
    m = resolve_labels(build_manifest(n_videos=4, utts_per_video=2))
    with pytest.raises(ValueError):
        make_splits(m, ratios=(0.5, 0.1, 0.3))


@settings(max_examples=40, deadline=None)
@given(
    n_videos=st.integers(min_value=3, max_value=15),
    utts=st.integers(min_value=1, max_value=8),
    seed=st.integers(min_value=0, max_value=2**31),
)
def test_speaker_exclusivity_property(n_videos, utts, seed):
    m = resolve_labels(build_manifest(n_videos=n_videos, utts_per_video=utts))
    split = make_splits(m, seed=seed)
    check_speaker_exclusive(m, split)  # raises on violation
    assert set(split.split) == set(m.resolved_labels)

    # every speaker's utterances in exactly one part
    by_speaker = {}
    for uid, part in split.split.items():
        by_speaker.setdefault(m.speaker_of(uid), set()).add(part)
    assert all(len(parts) == 1 for parts in by_speaker.values())


def test_leakage_guard_fires():
    m = resolve_labels(build_manifest(n_videos=4, utts_per_video=3))
    split = make_splits(m, seed=0)
    # corrupt: move one utterance of some speaker to a different part
    uid = next(iter(split.split))
    bad = dict(split.split)
    bad[uid] = "test" if split.split[uid] != "test" else "train"
    from dataclasses import replace

    with pytest.raises(errors.SpeakerLeakage):
        check_speaker_exclusive(m, replace(split, split=bad))
