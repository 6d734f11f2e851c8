import io

import numpy as np
import pytest

from estool.generator import EventStream, empty_events
from estool.storage import (
    BadMagicError,
    FieldRangeError,
    HEADER_SIZE,
    RecordOrderError,
    TruncatedFileError,
    VersionError,
    export_csv,
    from_event_frames,
    frames_from_bytes,
    frames_to_bytes,
    import_csv,
    read_stream,
    stream_from_bytes,
    stream_to_bytes,
    to_event_frames,
    write_stream,
)


def random_stream(rng, max_events=500):
    width = int(rng.integers(4, 64))
    height = int(rng.integers(4, 64))
    steps = int(rng.integers(1, 12))
    count = int(rng.integers(0, max_events))
    # draw unique (t, y, x) triples, then sort
    keys = rng.choice(steps * height * width, size=min(count, steps * height * width),
                      replace=False)
    keys.sort()
    t = keys // (height * width) + 1
    rem = keys % (height * width)
    y = rem // width
    x = rem % width
    p = rng.choice((-1, 1), size=len(keys))
    events = np.stack([x, y, t, p], axis=1).astype(np.int32)
    thresh = float(np.float32(rng.uniform(0.05, 0.45)))
    return EventStream(frame_w=width, frame_h=height, steps=steps,
                       thresh=thresh, events=events)


class TestStreamFormat:
    def test_header_size_is_the_field_sum(self):
        # magic 4 + version 2 + width 2 + height 2 + steps 1 + reserved 1
        # + threshold 4 + count 8
        assert HEADER_SIZE == 4 + 2 + 2 + 2 + 1 + 1 + 4 + 8

    def test_empty_stream_is_header_only(self):
        s = EventStream(frame_w=256, frame_h=256, steps=8, thresh=0.18)
        assert len(stream_to_bytes(s)) == HEADER_SIZE

    def test_single_event_record_bytes(self):
        events = np.array([[3, 5, 2, -1]], dtype=np.int32)
        s = EventStream(frame_w=16, frame_h=16, steps=8, thresh=0.18, events=events)
        data = stream_to_bytes(s)
        assert data[HEADER_SIZE:] == bytes([0x03, 0x00, 0x05, 0x00, 0x02, 0xFF])

    def test_round_trip_equality(self):
        rng = np.random.default_rng(20)
        for _ in range(50):
            s = random_stream(rng)
            assert stream_from_bytes(stream_to_bytes(s)) == s

    def test_rewrite_is_byte_identical(self):
        rng = np.random.default_rng(21)
        for _ in range(50):
            data = stream_to_bytes(random_stream(rng))
            assert stream_to_bytes(stream_from_bytes(data)) == data

    def test_file_objects_and_paths(self, tmp_path):
        rng = np.random.default_rng(22)
        s = random_stream(rng)
        path = tmp_path / "a.evs"
        write_stream(s, path)
        assert read_stream(path) == s
        buf = io.BytesIO()
        write_stream(s, buf)
        assert read_stream(io.BytesIO(buf.getvalue())) == s


class TestStreamErrors:
    def good_bytes(self):
        events = np.array([[1, 1, 1, 1], [2, 1, 1, -1]], dtype=np.int32)
        s = EventStream(frame_w=8, frame_h=8, steps=2, thresh=0.2, events=events)
        return stream_to_bytes(s)

    def test_bad_magic(self):
        data = b"XXXX" + self.good_bytes()[4:]
        with pytest.raises(BadMagicError):
            stream_from_bytes(data)

    def test_version_mismatch(self):
        data = bytearray(self.good_bytes())
        data[4] = 9
        with pytest.raises(VersionError):
            stream_from_bytes(bytes(data))

    def test_truncated_header(self):
        with pytest.raises(TruncatedFileError):
            stream_from_bytes(self.good_bytes()[: HEADER_SIZE - 3])

    def test_truncated_records(self):
        with pytest.raises(TruncatedFileError):
            stream_from_bytes(self.good_bytes()[:-2])

    def test_unsorted_records(self):
        data = bytearray(self.good_bytes())
        rec = slice(HEADER_SIZE, HEADER_SIZE + 6)
        rec2 = slice(HEADER_SIZE + 6, HEADER_SIZE + 12)
        first, second = bytes(data[rec]), bytes(data[rec2])
        data[rec], data[rec2] = second, first
        with pytest.raises(RecordOrderError):
            stream_from_bytes(bytes(data))

    def test_duplicate_records(self):
        data = bytearray(self.good_bytes())
        rec = bytes(data[HEADER_SIZE : HEADER_SIZE + 6])
        data[HEADER_SIZE + 6 : HEADER_SIZE + 12] = rec
        with pytest.raises(RecordOrderError):
            stream_from_bytes(bytes(data))

    def test_out_of_range_fields(self):
        # event t beyond the declared step count
        events = np.array([[1, 1, 3, 1]], dtype=np.int32)
        s = EventStream(frame_w=8, frame_h=8, steps=2, thresh=0.2, events=events)
        with pytest.raises(FieldRangeError):
            stream_to_bytes(s)
        # x beyond frame width
        events = np.array([[8, 1, 1, 1]], dtype=np.int32)
        s = EventStream(frame_w=8, frame_h=8, steps=2, thresh=0.2, events=events)
        with pytest.raises(FieldRangeError):
            stream_to_bytes(s)
        # bad polarity
        events = np.array([[1, 1, 1, 2]], dtype=np.int32)
        s = EventStream(frame_w=8, frame_h=8, steps=2, thresh=0.2, events=events)
        with pytest.raises(FieldRangeError):
            stream_to_bytes(s)


class TestEventFrames:
    def test_empty_stream_gives_zero_tensor(self):
        s = EventStream(frame_w=4, frame_h=3, steps=2, thresh=0.18)
        frames = to_event_frames(s)
        assert frames.shape == (2, 2, 3, 4)
        assert frames.sum() == 0

    def test_channel_placement(self):
        events = np.array([[1, 2, 1, 1], [3, 0, 2, -1]], dtype=np.int32)
        s = EventStream(frame_w=4, frame_h=3, steps=2, thresh=0.18, events=events)
        frames = to_event_frames(s)
        assert frames[0, 0, 2, 1] == 1
        assert frames[1, 1, 0, 3] == 1
        assert frames.sum() == 2

    def test_round_trip_identity(self):
        rng = np.random.default_rng(23)
        for _ in range(100):
            s = random_stream(rng, max_events=200)
            assert from_event_frames(to_event_frames(s), s.thresh) == s

    def test_count_preserved_and_channels_exclusive(self):
        rng = np.random.default_rng(24)
        s = random_stream(rng)
        frames = to_event_frames(s)
        assert frames.sum() == len(s)
        assert not (frames[0] & frames[1]).any()

    def test_frames_file_round_trip(self):
        rng = np.random.default_rng(25)
        s = random_stream(rng)
        frames = to_event_frames(s)
        data = frames_to_bytes(frames, s.thresh)
        assert len(data) == HEADER_SIZE + frames.size
        back, thresh = frames_from_bytes(data)
        assert np.array_equal(back, frames)
        assert thresh == s.thresh

    def test_frames_bad_cells(self):
        frames = np.zeros((2, 1, 2, 2), dtype=np.uint8)
        frames[0, 0, 0, 0] = 2
        with pytest.raises(FieldRangeError):
            frames_to_bytes(frames, 0.18)

    def test_frames_both_channels_set(self):
        frames = np.zeros((2, 1, 2, 2), dtype=np.uint8)
        frames[:, 0, 0, 0] = 1
        with pytest.raises(FieldRangeError):
            from_event_frames(frames, 0.18)


class TestCsv:
    def test_empty_stream_header_only(self):
        s = EventStream(frame_w=4, frame_h=4, steps=1, thresh=0.18)
        buf = io.StringIO()
        export_csv(s, buf)
        assert buf.getvalue() == "x,y,t,p\n"

    def test_single_event_row(self):
        events = np.array([[3, 5, 2, -1]], dtype=np.int32)
        s = EventStream(frame_w=8, frame_h=8, steps=4, thresh=0.18, events=events)
        buf = io.StringIO()
        export_csv(s, buf)
        assert buf.getvalue() == "x,y,t,p\n3,5,2,-1\n"

    def test_reimport_reproduces_stream(self):
        rng = np.random.default_rng(26)
        for _ in range(20):
            s = random_stream(rng, max_events=100)
            buf = io.StringIO()
            export_csv(s, buf)
            back = import_csv(io.StringIO(buf.getvalue()),
                              s.frame_w, s.frame_h, s.steps, s.thresh)
            assert back == s

    def test_import_requires_header(self):
        with pytest.raises(BadMagicError):
            import_csv(io.StringIO("1,2,3,4\n"), 8, 8, 4, 0.18)
