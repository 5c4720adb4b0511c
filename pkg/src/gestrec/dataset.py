"""Gesture dataset handling: ingest, stream fusion, splits, synthetic fixtures.

Channel layout (28 channels per frame):
    0..21   g1..g22   glove bend sensors (raw units)
    22..24  l1..l3    tracker position x,y,z (cm)
    25      l4        roll  (degrees)
    26      l5        pitch (degrees)
    27      l6        yaw   (degrees, intrinsic ZYX)

Sample matrices are channels-first (28, n); streams are time-major (n, 28).
"""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

logger = logging.getLogger(__name__)

N_CHANNELS = 28
N_GLOVE = 22
GLOVE = slice(0, 22)
POS = slice(22, 25)
ROLL, PITCH, YAW = 25, 26, 27

STATIC = "static"
DYNAMIC = "dynamic"

# observed dynamic-gesture length range; violations are warned, not rejected
DG_LENGTH_RANGE = (20, 224)

MANIFEST_COLUMNS = ["sample_id", "kind", "class_id", "user_id", "session_id", "n_frames", "file"]
FRAME_HEADER = ["t"] + [f"g{i}" for i in range(1, 23)] + [f"l{i}" for i in range(1, 7)]


class DatasetError(Exception):
    """Base class for dataset ingestion failures."""


class ManifestError(DatasetError):
    """Missing or unreadable manifest."""


class ParseError(DatasetError):
    """Malformed row; message names file and line."""


class SchemaError(DatasetError):
    """Channel count or header does not match the 28-channel schema."""


@dataclass(frozen=True)
class Frame:
    """One fused sensor reading: 28 channels plus a timestamp."""

    values: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != (N_CHANNELS,):
            raise SchemaError(f"frame must have {N_CHANNELS} channels, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("frame contains non-finite values")
        ang = v[ROLL:YAW + 1]
        if np.any(ang < -180.0) or np.any(ang > 180.0):
            raise ValueError(f"orientation angles out of [-180, 180]: {ang}")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_channels(cls, g, l, t=0.0):
        g = np.asarray(g, dtype=np.float64)
        l = np.asarray(l, dtype=np.float64)
        if g.shape != (N_GLOVE,) or l.shape != (6,):
            raise SchemaError(f"expected 22 glove + 6 tracker channels, got {g.shape} and {l.shape}")
        return cls(np.concatenate([g, l]), float(t))

    @property
    def g(self):
        return self.values[GLOVE]

    @property
    def pos(self):
        return self.values[POS]

    @property
    def roll(self):
        return float(self.values[ROLL])

    @property
    def pitch(self):
        return float(self.values[PITCH])

    @property
    def yaw(self):
        return float(self.values[YAW])


@dataclass
class Stream:
    """Timestamped frame sequence, one row per frame."""

    data: np.ndarray
    t: np.ndarray
    nominal_rate: float = 100.0

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.float64)
        self.t = np.asarray(self.t, dtype=np.float64)
        if self.data.ndim != 2 or self.data.shape[1] != N_CHANNELS:
            raise SchemaError(f"stream data must be (n, {N_CHANNELS}), got {self.data.shape}")
        if len(self.data) < 1 or len(self.t) != len(self.data):
            raise ValueError("stream needs one timestamp per frame and n >= 1")
        if np.any(np.diff(self.t) <= 0):
            raise ValueError("timestamps must be strictly increasing")

    def __len__(self):
        return len(self.data)

    def frame(self, i) -> Frame:
        return Frame(self.data[i], float(self.t[i]))

    @classmethod
    def from_frames(cls, frames, nominal_rate=100.0):
        data = np.stack([f.values for f in frames])
        t = np.array([f.t for f in frames], dtype=np.float64)
        return cls(data, t, nominal_rate)


@dataclass
class GestureSample:
    """A labeled gesture: (28, n) matrix, static (n=1) or dynamic (n>=2)."""

    data: np.ndarray
    kind: str
    class_id: int
    user_id: int
    session_id: int = 1

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.float64)
        if self.data.ndim != 2 or self.data.shape[0] != N_CHANNELS:
            raise SchemaError(f"sample data must be ({N_CHANNELS}, n), got {self.data.shape}")
        n = self.data.shape[1]
        if self.kind == STATIC and n != 1:
            raise ValueError(f"static sample must have exactly 1 frame, got {n}")
        if self.kind == DYNAMIC:
            if n < 2:
                raise ValueError(f"dynamic sample must have >= 2 frames, got {n}")
            lo, hi = DG_LENGTH_RANGE
            if not lo <= n <= hi:
                logger.warning("dynamic sample length %d outside expected range [%d, %d]", n, lo, hi)
        if self.kind not in (STATIC, DYNAMIC):
            raise ValueError(f"unknown sample kind {self.kind!r}")

    @property
    def n_frames(self):
        return self.data.shape[1]


@dataclass(frozen=True)
class DatasetSplits:
    """Disjoint train/validation/test index sets over a sample list."""

    train: np.ndarray
    validation: np.ndarray
    test: np.ndarray
    holdout_user: int | None
    seed: int


@dataclass
class SensorTrack:
    """Raw single-device stream before fusion: timestamps plus channel rows."""

    t: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=np.float64)
        self.values = np.asarray(self.values, dtype=np.float64)
        if len(self.t) == 0:
            raise ValueError("sensor track is empty")
        if self.values.ndim != 2 or len(self.values) != len(self.t):
            raise ValueError("sensor track needs one row of values per timestamp")


def load_dataset(path) -> list[GestureSample]:
    """Load all samples under ``path`` (manifest.csv + per-sample frame CSVs)."""
    root = Path(path)
    manifest = root / "manifest.csv"
    if not manifest.is_file():
        raise ManifestError(f"no manifest found in {root}")

    samples = []
    with open(manifest, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != MANIFEST_COLUMNS:
            raise SchemaError(f"{manifest}: expected columns {MANIFEST_COLUMNS}, got {reader.fieldnames}")
        for lineno, row in enumerate(reader, start=2):
            try:
                kind = {"S": STATIC, "D": DYNAMIC}[row["kind"]]
                class_id = int(row["class_id"])
                user_id = int(row["user_id"])
                session_id = int(row["session_id"])
                n_frames = int(row["n_frames"])
            except (KeyError, ValueError, TypeError) as exc:
                raise ParseError(f"{manifest}:{lineno}: malformed manifest row ({exc})") from exc
            data = _read_sample_file(root / row["file"], n_frames)
            samples.append(GestureSample(data, kind, class_id, user_id, session_id))

    for kind in (STATIC, DYNAMIC):
        sub = [s for s in samples if s.kind == kind]
        if sub:
            logger.info(
                "loaded %d %s samples: %d classes, %d users",
                len(sub), kind, len({s.class_id for s in sub}), len({s.user_id for s in sub}),
            )
    return samples


def _read_sample_file(path, n_frames):
    if not path.is_file():
        raise ParseError(f"{path}: sample file missing")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ParseError(f"{path}:1: empty sample file")
        if len(header) != N_CHANNELS + 1:
            raise SchemaError(f"{path}: expected {N_CHANNELS + 1} columns (t + 28 channels), got {len(header)}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != N_CHANNELS + 1:
                raise SchemaError(f"{path}:{lineno}: expected {N_CHANNELS + 1} values, got {len(row)}")
            try:
                rows.append([float(x) for x in row])
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: malformed row ({exc})") from exc
    if len(rows) != n_frames:
        raise ParseError(f"{path}: manifest says {n_frames} frames, file has {len(rows)}")
    arr = np.asarray(rows, dtype=np.float64)
    return arr[:, 1:].T.copy()  # (28, n), timestamps dropped for samples


def save_dataset(samples, path):
    """Write samples in the manifest.csv layout that load_dataset reads."""
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    with open(root / "manifest.csv", "w", newline="") as mf:
        writer = csv.writer(mf)
        writer.writerow(MANIFEST_COLUMNS)
        for i, s in enumerate(samples):
            fname = f"sample_{i:05d}.csv"
            writer.writerow([
                i, "S" if s.kind == STATIC else "D",
                s.class_id, s.user_id, s.session_id, s.n_frames, fname,
            ])
            with open(root / fname, "w", newline="") as sf:
                sw = csv.writer(sf)
                sw.writerow(FRAME_HEADER)
                rate = 100.0
                for j in range(s.n_frames):
                    sw.writerow([f"{j / rate:.6f}"] + [repr(x) for x in s.data[:, j]])


def fuse_streams(glove: SensorTrack, tracker: SensorTrack, max_gap=0.1) -> Stream:
    """Fuse a 22-channel glove track with a 6-channel tracker track.

    One fused frame per glove frame; tracker channels are copied from the
    tracker frame closest in time. Gaps above ``max_gap`` seconds are
    warned about and the nearest available frame is still used.
    """
    if glove.values.shape[1] != N_GLOVE:
        raise SchemaError(f"glove track must have {N_GLOVE} channels, got {glove.values.shape[1]}")
    if tracker.values.shape[1] != 6:
        raise SchemaError(f"tracker track must have 6 channels, got {tracker.values.shape[1]}")

    idx = np.searchsorted(tracker.t, glove.t)
    idx = np.clip(idx, 1, len(tracker.t) - 1) if len(tracker.t) > 1 else np.zeros(len(glove.t), dtype=int)
    if len(tracker.t) > 1:
        left = tracker.t[idx - 1]
        right = tracker.t[idx]
        take_left = np.abs(glove.t - left) <= np.abs(right - glove.t)
        idx = np.where(take_left, idx - 1, idx)

    gaps = np.abs(tracker.t[idx] - glove.t)
    n_gaps = int(np.sum(gaps > max_gap))
    if n_gaps:
        logger.warning("fuse_streams: %d glove frames beyond %.0f ms from any tracker frame", n_gaps, max_gap * 1e3)

    data = np.hstack([glove.values, tracker.values[idx]])
    return Stream(data, glove.t.copy())


def split_dataset(samples, ratios=(0.70, 0.15, 0.15), holdout_user=None, seed=0) -> DatasetSplits:
    """Shuffled train/validation/test split; holdout user goes to test only."""
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"split ratios must sum to 1, got {ratios}")
    users = np.array([s.user_id for s in samples])
    indices = np.arange(len(samples))

    if holdout_user is not None:
        if holdout_user not in users:
            raise ValueError(f"holdout user {holdout_user} has no samples")
        held = indices[users == holdout_user]
        rest = indices[users != holdout_user]
    else:
        held = np.array([], dtype=int)
        rest = indices

    rng = np.random.default_rng(seed)
    rest = rng.permutation(rest)
    n_train = int(round(ratios[0] * len(rest)))
    n_val = int(round(ratios[1] * len(rest)))
    train = np.sort(rest[:n_train])
    validation = np.sort(rest[n_train:n_train + n_val])
    test = np.sort(np.concatenate([rest[n_train + n_val:], held]))

    # partition invariants, checked on every split
    assert len(train) + len(validation) + len(test) == len(samples)
    assert not (set(train) & set(validation) or set(train) & set(test) or set(validation) & set(test))
    if holdout_user is not None:
        assert not np.any(users[train] == holdout_user) and not np.any(users[validation] == holdout_user)

    return DatasetSplits(train, validation, test, holdout_user, seed)


# ---------------------------------------------------------------------------
# synthetic fixtures (hardware-free testing and the no-dataset fallback)
# ---------------------------------------------------------------------------

@dataclass
class PauseBlock:
    n_frames: int


@dataclass
class StrokeBlock:
    n_frames: int
    amplitude: float | None = None  # cm; drawn uniformly from [20, 40] when None
    move_glove: bool = True
    move_yaw: bool = True


@dataclass
class StreamScript:
    """Scripted pause/stroke sequence for synth_stream."""

    blocks: list
    rate: float = 100.0
    noise_pos: float = 0.02
    noise_glove: float = 0.3
    noise_ang: float = 0.05

    @classmethod
    def from_kv(cls, kv):
        """Build from a key=value mapping, e.g. blocks=pause:50,stroke:60."""
        blocks = []
        for item in kv["blocks"].split(","):
            name, _, length = item.partition(":")
            name = name.strip()
            if name == "pause":
                blocks.append(PauseBlock(int(length)))
            elif name == "stroke":
                blocks.append(StrokeBlock(int(length)))
            else:
                raise ValueError(f"unknown block type {name!r}")
        script = cls(blocks)
        for key in ("rate", "noise_pos", "noise_glove", "noise_ang"):
            if key in kv:
                setattr(script, key, float(kv[key]))
        return script


def minimum_jerk(n):
    """Minimum-jerk position profile on n samples, 0 at start, 1 at end."""
    u = np.linspace(0.0, 1.0, n)
    return u ** 3 * (10.0 - 15.0 * u + 6.0 * u * u)


def synth_stream(script: StreamScript, seed=0):
    """Generate a noisy scripted stream with ground-truth motion labels.

    Returns (stream, mask, truth) where ``mask`` marks stroke frames 1 and
    ``truth`` lists expected segments as (kind, start, length) tuples: one
    dynamic entry per stroke and one static entry at the first pause frame
    after each stroke.
    """
    if not script.blocks:
        raise ValueError("stream script has no blocks")
    rng = np.random.default_rng(seed)

    pose = np.empty(N_CHANNELS)
    pose[GLOVE] = rng.uniform(60.0, 200.0, N_GLOVE)
    pose[POS] = rng.uniform(-50.0, 50.0, 3)
    pose[ROLL] = rng.uniform(-60.0, 60.0)
    pose[PITCH] = rng.uniform(-60.0, 60.0)
    pose[YAW] = rng.uniform(-120.0, 120.0)

    chunks = []
    mask_parts = []
    truth = []
    cursor = 0
    prev_was_stroke = False
    for block in script.blocks:
        n = block.n_frames
        if isinstance(block, PauseBlock):
            chunk = np.tile(pose, (n, 1))
            mask_parts.append(np.zeros(n, dtype=np.uint8))
            if prev_was_stroke:
                truth.append((STATIC, cursor, 1))
            prev_was_stroke = False
        elif isinstance(block, StrokeBlock):
            target = pose.copy()
            amp = block.amplitude if block.amplitude is not None else rng.uniform(20.0, 40.0)
            direction = rng.normal(size=3)
            direction /= np.linalg.norm(direction)
            target[POS] = pose[POS] + amp * direction
            if block.move_glove:
                chans = rng.choice(N_GLOVE, size=6, replace=False)
                target[chans] = np.clip(pose[chans] + rng.uniform(-40.0, 40.0, 6), 0.0, 255.0)
            if block.move_yaw:
                target[YAW] = np.clip(pose[YAW] + rng.uniform(-30.0, 30.0), -150.0, 150.0)
            s = minimum_jerk(n)
            chunk = pose[None, :] + s[:, None] * (target - pose)[None, :]
            mask_parts.append(np.ones(n, dtype=np.uint8))
            truth.append((DYNAMIC, cursor, n))
            pose = target
            prev_was_stroke = True
        else:
            raise TypeError(f"unknown block {block!r}")
        chunks.append(chunk)
        cursor += n

    data = np.vstack(chunks)
    data[:, GLOVE] += rng.normal(0.0, script.noise_glove, (len(data), N_GLOVE))
    data[:, POS] += rng.normal(0.0, script.noise_pos, (len(data), 3))
    data[:, ROLL:YAW + 1] += rng.normal(0.0, script.noise_ang, (len(data), 3))
    np.clip(data[:, ROLL:YAW + 1], -180.0, 180.0, out=data[:, ROLL:YAW + 1])

    t = np.arange(len(data)) / script.rate
    stream = Stream(data, t, script.rate)
    return stream, np.concatenate(mask_parts), truth


def calibration_streams(n_streams=20, seed=0, strokes_per_stream=4):
    """Seeded fixture set for motion-threshold calibration."""
    out = []
    rng = np.random.default_rng(seed)
    for i in range(n_streams):
        blocks = [PauseBlock(int(rng.integers(40, 80)))]
        for _ in range(strokes_per_stream):
            blocks.append(StrokeBlock(int(rng.integers(40, 80))))
            blocks.append(PauseBlock(int(rng.integers(40, 80))))
        script = StreamScript(blocks)
        stream, mask, _ = synth_stream(script, seed=int(rng.integers(0, 2 ** 31)))
        out.append((stream, mask))
    return out
