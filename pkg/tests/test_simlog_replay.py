import math

import numpy as np
import pytest

from desksim.replay import ReplayError, replay
from desksim.simlog import SimLog
from desksim.trackbench import GroundTruthTracker, run_online
from desksim.worldmap import generate_random_map


class TestSimLog:
    def test_roundtrip(self, tmp_path):
        log = SimLog({"kind": "drive", "speed": 6.0})
        log.append({"frame": 0, "t": 0.0, "x": 1.5})
        log.append({"frame": 1, "t": 1 / 30, "x": 1.7})
        p = tmp_path / "ep.jsonl"
        log.save(p)
        loaded, truncated = SimLog.load(p)
        assert not truncated
        assert loaded.header == log.header
        assert loaded.records == log.records
        assert loaded.content_hash() == log.content_hash()

    def test_frames_strictly_increasing(self):
        log = SimLog()
        log.append({"frame": 3})
        with pytest.raises(ValueError):
            log.append({"frame": 3})

    def test_truncated_tail_tolerated(self, tmp_path):
        log = SimLog()
        log.append({"frame": 0})
        log.append({"frame": 1})
        p = tmp_path / "cut.jsonl"
        p.write_text(log.dumps() + '{"frame": 2, "t": 0.0', encoding="utf-8")
        loaded, truncated = SimLog.load(p)
        assert truncated
        assert [r["frame"] for r in loaded.records] == [0, 1]

    def test_mid_file_corruption_raises(self, tmp_path):
        log = SimLog()
        log.append({"frame": 0})
        log.append({"frame": 1})
        lines = log.dumps().splitlines()
        lines[1] = "not json"
        p = tmp_path / "bad.jsonl"
        p.write_text("\n".join(lines) + "\n", encoding="utf-8")
        with pytest.raises(ValueError, match="malformed"):
            SimLog.load(p)

    def test_wrong_file_type_rejected(self, tmp_path):
        p = tmp_path / "other.jsonl"
        p.write_text('{"type":"something-else"}\n', encoding="utf-8")
        with pytest.raises(ValueError, match="not a desksim log"):
            SimLog.load(p)

    def test_content_hash_detects_edit(self):
        a = SimLog({"kind": "drive"})
        a.append({"frame": 0, "x": 1.0})
        b = SimLog({"kind": "drive"})
        b.append({"frame": 0, "x": 1.0000001})
        assert a.content_hash() != b.content_hash()


class TestReplay:
    def test_replay_reproduces_frames_exactly(self, ring2_map):
        captured = {}

        def sink(idx, frame, gt):
            captured[idx] = (frame.rgb.copy(), frame.instance.copy())

        result = run_online(ring2_map, GroundTruthTracker(), 6.0,
                            max_frames=40, frame_sink=sink)
        n = 0
        for rf in replay(result.log, ring2_map,
                         channels=("rgb", "instance")):
            rgb, inst = captured[rf.frame_index]
            assert np.array_equal(rf.frame.rgb, rgb)
            assert np.array_equal(rf.frame.instance, inst)
            n += 1
        assert n == len(captured) == 40

    def test_map_digest_mismatch_rejected(self, ring2_map):
        result = run_online(ring2_map, GroundTruthTracker(), 6.0,
                            max_frames=3)
        other = generate_random_map(seed=9, width=8, height=8)
        with pytest.raises(ReplayError, match="different map"):
            next(iter(replay(result.log, other)))

    def test_log_save_load_replays_identically(self, ring2_map, tmp_path):
        result = run_online(ring2_map, GroundTruthTracker(), 6.0,
                            max_frames=5)
        p = tmp_path / "run.jsonl"
        result.log.save(p)
        loaded, _ = SimLog.load(p)
        assert loaded.content_hash() == result.log.content_hash()
        orig = [rf.frame.rgb for rf in replay(result.log, ring2_map)]
        redo = [rf.frame.rgb for rf in replay(loaded, ring2_map)]
        assert all(np.array_equal(a, b) for a, b in zip(orig, redo))

    def test_completed_lap_frame_count(self, ring2_map, ring2_network):
        """A constant-speed lap replay takes ceil(L*30/v)+1 frames: one
        stationary warm-up frame plus one frame per 1/30 s of path time."""
        speed = 6.0
        L = ring2_network.ideal_pathway.total_length
        result = run_online(ring2_map, GroundTruthTracker(), speed)
        assert result.status == "completed"
        assert result.n_frames == math.ceil(L * 30.0 / speed) + 1
