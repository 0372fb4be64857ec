"""Readers and writers for pose sequences, skeleton JSON, Middlebury flow and PPM frames.

All writers go through a temporary file in the destination directory and
an atomic rename.
"""
from __future__ import annotations

import json
import os
import re
import struct
import tempfile
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from .errors import FormatError
from .normalize import SkeletonSequence
from .pose import NUM_JOINTS, Skeleton

PSQ_MAGIC = b"PSQ1"
PSQ_VERSION = 1
_PSQ_HEADER = struct.Struct("<4s5I")

FLO_MAGIC = 202021.25
_FLO_HEADER = struct.Struct("<fii")


@contextmanager
def atomic_write(path, mode="wb"):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, mode) as f:
            yield f
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


# -- PSQ1 pose sequences ------------------------------------------------------

def write_pose_sequence(path, volumes) -> None:
    """Write a ``(T, J, H, W)`` stack of confidence volumes as float32."""
    data = np.asarray(volumes)
    if data.ndim != 4:
        raise FormatError(f"pose sequence must be (T, J, H, W), got {data.shape}")
    t, j, h, w = data.shape
    with atomic_write(path) as f:
        f.write(_PSQ_HEADER.pack(PSQ_MAGIC, PSQ_VERSION, t, j, h, w))
        f.write(np.ascontiguousarray(data, dtype="<f4").tobytes())


def read_pose_sequence(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < _PSQ_HEADER.size:
        raise FormatError("truncated PSQ1 header")
    magic, version, t, j, h, w = _PSQ_HEADER.unpack_from(raw)
    if magic != PSQ_MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {PSQ_MAGIC!r}")
    if version != PSQ_VERSION:
        raise FormatError(f"unsupported PSQ version {version}")
    expected = _PSQ_HEADER.size + 4 * t * j * h * w
    if len(raw) != expected:
        raise FormatError(f"PSQ1 payload is {len(raw)} bytes, header implies {expected}")
    data = np.frombuffer(raw, dtype="<f4", offset=_PSQ_HEADER.size)
    return data.reshape(t, j, h, w).astype(np.float32)


# -- skeleton JSON ------------------------------------------------------------

def skeletons_to_json(seq: SkeletonSequence) -> dict:
    return {
        "width": seq.frame_width,
        "height": seq.frame_height,
        "frames": [[list(j) if j is not None else None for j in s.to_joints()] for s in seq],
    }


def skeletons_from_json(doc) -> SkeletonSequence:
    try:
        width, height, frames = int(doc["width"]), int(doc["height"]), doc["frames"]
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(f"skeleton document needs width, height and frames: {e}") from e
    if not isinstance(frames, list) or not frames:
        raise FormatError("skeleton document has no frames")
    skeletons = []
    for i, frame in enumerate(frames):
        if not isinstance(frame, list) or len(frame) != NUM_JOINTS:
            raise FormatError(f"frame {i} must list exactly {NUM_JOINTS} joints")
        joints = []
        for j, joint in enumerate(frame):
            if joint is None:
                joints.append(None)
                continue
            if not isinstance(joint, list) or len(joint) != 3:
                raise FormatError(f"frame {i} joint {j} must be [x, y, confidence] or null")
            try:
                joints.append(tuple(float(v) for v in joint))
            except (TypeError, ValueError) as e:
                raise FormatError(f"frame {i} joint {j}: {e}") from e
        try:
            skeletons.append(Skeleton.from_joints(joints))
        except ValueError as e:
            raise FormatError(f"frame {i}: {e}") from e
    return SkeletonSequence(tuple(skeletons), height, width)


def write_skeletons(path, seq: SkeletonSequence) -> None:
    with atomic_write(path, "w") as f:
        json.dump(skeletons_to_json(seq), f)


def read_skeletons(path) -> SkeletonSequence:
    with open(path) as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            raise FormatError(f"malformed JSON in {path}: {e}") from e
    return skeletons_from_json(doc)


# -- Middlebury .flo ----------------------------------------------------------

def write_flo(path, flow) -> None:
    """Write an ``(H, W, 2)`` flow field in Middlebury .flo format."""
    flow = np.asarray(flow)
    if flow.ndim != 3 or flow.shape[2] != 2:
        raise FormatError(f"flow must be (H, W, 2), got {flow.shape}")
    h, w = flow.shape[:2]
    with atomic_write(path) as f:
        f.write(_FLO_HEADER.pack(FLO_MAGIC, w, h))
        f.write(np.ascontiguousarray(flow, dtype="<f4").tobytes())


def read_flo(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < _FLO_HEADER.size:
        raise FormatError("truncated .flo header")
    magic, w, h = _FLO_HEADER.unpack_from(raw)
    if magic != FLO_MAGIC:
        raise FormatError(f"bad .flo magic {magic!r}")
    if w < 0 or h < 0 or len(raw) != _FLO_HEADER.size + 8 * w * h:
        raise FormatError(f".flo payload does not match declared size {w}x{h}")
    flow = np.frombuffer(raw, dtype="<f4", offset=_FLO_HEADER.size).reshape(h, w, 2)
    if not np.all(np.isfinite(flow)):
        raise FormatError(".flo contains non-finite displacements")
    return flow.astype(np.float32)


# -- PPM frames ---------------------------------------------------------------

_PPM_TOKEN = re.compile(rb"(?:\s|#[^\n]*\n?)*(\S+)")


def write_ppm(path, frame) -> None:
    frame = np.asarray(frame)
    if frame.ndim != 3 or frame.shape[2] != 3:
        raise FormatError(f"PPM frame must be (H, W, 3), got {frame.shape}")
    if frame.dtype != np.uint8:
        if np.any((frame < 0) | (frame > 255)) or np.any(frame != np.round(frame)):
            raise FormatError("PPM frames hold integers in [0, 255]")
        frame = frame.astype(np.uint8)
    h, w = frame.shape[:2]
    with atomic_write(path) as f:
        f.write(b"P6\n%d %d\n255\n" % (w, h))
        f.write(np.ascontiguousarray(frame).tobytes())


def read_ppm(path) -> np.ndarray:
    """Read a binary P6 PPM with maxval 255 into an ``(H, W, 3)`` uint8 array."""
    raw = Path(path).read_bytes()
    pos = 0
    tokens = []
    for _ in range(4):
        m = _PPM_TOKEN.match(raw, pos)
        if m is None:
            raise FormatError(f"truncated PPM header in {path}")
        tokens.append(m.group(1))
        pos = m.end()
    if tokens[0] != b"P6":
        raise FormatError(f"not a binary PPM (magic {tokens[0]!r})")
    try:
        w, h, maxval = (int(t) for t in tokens[1:])
    except ValueError as e:
        raise FormatError(f"bad PPM header: {e}") from e
    if maxval != 255:
        raise FormatError(f"only maxval 255 is supported, got {maxval}")
    pos += 1  # single whitespace byte after maxval
    payload = raw[pos:]
    if len(payload) != 3 * w * h:
        raise FormatError(f"PPM payload is {len(payload)} bytes, header implies {3 * w * h}")
    return np.frombuffer(payload, dtype=np.uint8).reshape(h, w, 3).copy()


def write_frame_dir(directory, frames, prefix="frame_", digits=6) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, frame in enumerate(frames):
        p = directory / f"{prefix}{i:0{digits}d}.ppm"
        write_ppm(p, frame)
        paths.append(p)
    return paths


def list_files(directory, suffix) -> list[Path]:
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"not a directory: {directory}")
    return sorted(p for p in directory.iterdir() if p.suffix.lower() == suffix)


def read_frame_dir(directory) -> list[np.ndarray]:
    return [read_ppm(p) for p in list_files(directory, ".ppm")]


def read_flow_dir(directory) -> list[np.ndarray]:
    return [read_flo(p) for p in list_files(directory, ".flo")]
