"""Per-frame episode log (JSON Lines) for the multi-object logging and
replay system. First line is a header record; every following line is one
frame record with strictly increasing frame_index."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path


class SimLog:
    def __init__(self, header: dict | None = None):
        self.header = dict(header or {})
        self.header.setdefault("type", "desksim-log")
        self.header.setdefault("version", 1)
        self.records: list = []

    def append(self, record: dict) -> None:
        if self.records and record["frame"] <= self.records[-1]["frame"]:
            raise ValueError("frame_index must be strictly increasing")
        self.records.append(record)

    def dumps(self) -> str:
        lines = [json.dumps(self.header, sort_keys=True)]
        lines += [json.dumps(r, sort_keys=True) for r in self.records]
        return "\n".join(lines) + "\n"

    def save(self, path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")

    def content_hash(self) -> str:
        return hashlib.sha256(self.dumps().encode("utf-8")).hexdigest()

    @classmethod
    def load(cls, path, allow_truncated: bool = True) -> tuple["SimLog", bool]:
        """Returns (log, truncated). A trailing malformed line is dropped
        with truncated=True; earlier malformed lines raise."""
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        if not lines:
            raise ValueError(f"{path}: empty log")
        header = json.loads(lines[0])
        if header.get("type") != "desksim-log":
            raise ValueError(f"{path}: not a desksim log")
        log = cls(header)
        truncated = False
        for i, line in enumerate(lines[1:], start=2):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                log.append(rec)
            except (json.JSONDecodeError, KeyError, ValueError):
                if allow_truncated and i == len(lines):
                    truncated = True
                    break
                raise ValueError(f"{path}: malformed record on line {i}")
        return log, truncated


def car_record(pose, speed: float) -> dict:
    return {"x": pose.x, "y": pose.y, "psi": pose.heading, "v": speed}


def uav_record(state) -> dict:
    return {"x": state.pose.x, "y": state.pose.y, "z": state.pose.z,
            "yaw": state.pose.yaw, "vx": state.vx, "vy": state.vy,
            "vz": state.vz}


def bbox_record(bbox) -> list | None:
    return None if bbox is None else [bbox.x, bbox.y, bbox.w, bbox.h]
