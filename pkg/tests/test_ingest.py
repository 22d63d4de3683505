import numpy as np
import pytest

from wristmotion import AnnotationRangeError, DataError, ParseError, SegmentTooShortError
from wristmotion.corpus import make_corpus
from wristmotion.ingest import (
    Annotation,
    Dataset,
    load_dataset,
    read_annotations,
    read_manifest,
    read_recording,
    read_sensor_csv,
    split_by_subject,
    write_annotations,
    write_manifest,
    write_recording,
    write_sensor_csv,
)


@pytest.fixture
def ten_seconds(tmp_path):
    t = np.arange(500) / 50.0
    data = np.column_stack([np.sin(t + k) for k in range(6)])
    path = tmp_path / "rec.sensor.csv"
    write_sensor_csv(path, t, data)
    return path, t, data


def _annotations(tmp_path, text):
    path = tmp_path / "rec.annotations.csv"
    path.write_text(text, encoding="utf-8")
    return path


def test_two_annotations_two_segments(tmp_path, ten_seconds):
    sensor, t, data = ten_seconds
    ann = _annotations(tmp_path, "start_s,end_s,label\n1,2,dorsiflexion\n4,5,other\n")
    segs = read_recording(sensor, ann, "S01")
    assert [s.label for s in segs] == [True, False]
    assert all(s.subject_id == "S01" for s in segs)
    assert segs[0].t[0] == 1.0 and segs[0].t[-1] == 2.0
    assert len(segs[0]) == 51
    np.testing.assert_array_equal(segs[1].data, data[200:251])


def test_annotation_past_end_is_range_error(tmp_path, ten_seconds):
    sensor, _, _ = ten_seconds
    ann = _annotations(tmp_path, "start_s,end_s,label\n9.5,11.0,dorsiflexion\n")
    with pytest.raises(AnnotationRangeError):
        read_recording(sensor, ann, "S01")


def test_annotation_up_to_span_end_is_accepted(tmp_path, ten_seconds):
    sensor, _, _ = ten_seconds
    ann = _annotations(tmp_path, "start_s,end_s,label\n9.0,10.0,other\n")
    assert len(read_recording(sensor, ann, "S01")[0]) == 50


def test_empty_annotation_file(tmp_path, ten_seconds):
    sensor, _, _ = ten_seconds
    assert read_recording(sensor, _annotations(tmp_path, ""), "S01") == []
    assert read_recording(sensor, _annotations(tmp_path, "start_s,end_s,label\n"), "S01") == []


def test_single_sample_annotation_is_too_short(tmp_path, ten_seconds):
    sensor, _, _ = ten_seconds
    ann = _annotations(tmp_path, "start_s,end_s,label\n1.001,1.019,other\n")
    with pytest.raises(SegmentTooShortError):
        read_recording(sensor, ann, "S01")


@pytest.mark.parametrize("text,line", [
    ("start_s,end_s,label\n1,2,maybe\n", 2),
    ("start_s,end_s,label\n1,x,other\n", 2),
    ("start_s,end_s,label\n1,2,other\n3,2,other\n", 3),
    ("begin,end,label\n", 1),
    ("start_s,end_s,label\n1,2\n", 2),
])
def test_annotation_parse_errors_name_the_line(tmp_path, text, line):
    with pytest.raises(ParseError) as info:
        read_annotations(_annotations(tmp_path, text))
    assert info.value.line == line


def test_sensor_parse_errors(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("t,ax,ay,az,gx,gy,gz\n0,1,2,3,4,5,6\n0.02,1,2,3,4,5\n", encoding="utf-8")
    with pytest.raises(ParseError) as info:
        read_sensor_csv(p)
    assert info.value.line == 3
    p.write_text("t,ax,ay,az,gx,gy,gz\n0,1,2,3,4,5,nan\n", encoding="utf-8")
    with pytest.raises(ParseError):
        read_sensor_csv(p)
    p.write_text("t,ax,ay,az,gx,gy,gz\n1,1,2,3,4,5,6\n0.5,1,2,3,4,5,6\n", encoding="utf-8")
    with pytest.raises(ParseError):
        read_sensor_csv(p)


def test_annotation_round_trip_with_classes(tmp_path):
    anns = [Annotation(0.5, 1.25, True, 3), Annotation(2.0, 3.0, False, 27)]
    path = tmp_path / "a.csv"
    write_annotations(path, anns)
    assert read_annotations(path) == anns


def test_recording_round_trip_is_exact(tmp_path):
    segs = make_corpus(12, 1, seed=5)
    write_recording(tmp_path / "s.csv", tmp_path / "a.csv", segs, rest_noise_std=0.3, seed=1)
    back = read_recording(tmp_path / "s.csv", tmp_path / "a.csv", "S01")
    assert len(back) == len(segs)
    for a, b in zip(segs, back):
        np.testing.assert_array_equal(a.data, b.data)
        np.testing.assert_allclose(b.t - b.t[0], a.t - a.t[0], atol=1e-9)
        assert (a.label, a.movement_class) == (b.label, b.movement_class)


def _write_dataset(tmp_path, sessions):
    entries = []
    for i, (subject, segs) in enumerate(sessions):
        s, a = f"r{i}.sensor.csv", f"r{i}.annotations.csv"
        write_recording(tmp_path / s, tmp_path / a, segs)
        entries.append((s, a, subject))
    write_manifest(tmp_path / "manifest.tsv", entries)
    return tmp_path / "manifest.tsv"


def test_manifest_comments_and_relative_paths(tmp_path):
    (tmp_path / "m.tsv").write_text("# header\n\nx.csv\ty.csv\tS01\n", encoding="utf-8")
    (entry,) = read_manifest(tmp_path / "m.tsv")
    assert entry.sensor_file == tmp_path / "x.csv" and entry.subject_id == "S01"
    (tmp_path / "bad.tsv").write_text("x.csv y.csv S01\n", encoding="utf-8")
    with pytest.raises(ParseError):
        read_manifest(tmp_path / "bad.tsv")


def test_twenty_subjects_five_held_out():
    corpus = make_corpus(100, 20, seed=1)
    ds = Dataset(corpus)
    held = ds.subject_ids[-5:]
    split = split_by_subject(ds, held)
    assert len(Dataset.subjects(split.train)) == 15
    assert Dataset.subjects(split.test) == set(held)
    assert len(split.train) + len(split.test) == 100


def test_all_subjects_held_out_is_an_error():
    ds = Dataset(make_corpus(20, 4, seed=1))
    with pytest.raises(DataError):
        split_by_subject(ds, ds.subject_ids)


def test_unknown_subject_is_an_error():
    ds = Dataset(make_corpus(20, 4, seed=1))
    with pytest.raises(DataError):
        split_by_subject(ds, ["S99"])


def test_subject_with_several_sessions_stays_together(tmp_path):
    corpus = make_corpus(24, 3, seed=2)
    by_subject = {s: [g for g in corpus if g.subject_id == s] for s in ("S01", "S02", "S03")}
    sessions = [("S01", by_subject["S01"][:4]), ("S02", by_subject["S02"]), ("S01", by_subject["S01"][4:]),
                ("S03", by_subject["S03"])]
    ds = load_dataset(_write_dataset(tmp_path, sessions))
    assert len(ds.segments) == 24
    split = split_by_subject(ds, ["S01"])
    assert len(split.test) == 8
    assert all(s.subject_id != "S01" for s in split.train)


def test_overlapping_partitions_rejected():
    corpus = make_corpus(8, 2, seed=0)
    with pytest.raises(DataError):
        Dataset(corpus, train=corpus[:5], test=corpus[4:])
