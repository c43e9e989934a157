"""
Imitation dataset: expert commands recorded every tick with the observation
the policy would have seen.

On-disk layout (directory)::

    manifest.json            sorted-key JSON, no timestamps
    episode_00000.bin ...    one block per kept episode

Each block is ``rows`` fixed-size records::

    packed planes   ceil(C*F*H*W / 8) bytes, np.packbits big bit order over
                    the (C, F, H, W) C-contiguous plane array
    scalars         5 x little-endian float64, SCALAR_NAMES order
    targets         2 x little-endian float64, (mu_acc, mu_sa)
"""

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field

from drive_planner.dynamics.actuation import ActuationModel, actuation_factory
from drive_planner.dynamics.models import ACC_LIMIT, STEER_LIMIT
from drive_planner.environment.models import (
    CHANNELS,
    N_SCALARS,
    Observation,
    Scenario,
    TerminalState,
)
from drive_planner.environment.simulator import SimulatorSettings
from drive_planner.experts.controllers import ExpertDriver
from drive_planner.experts.models import DatasetConfig, ExpertConfig
from drive_planner.utils.errors import DatasetError, ValidationError, not_found_error
from drive_planner.utils.logger import episode_context, get_logger
from drive_planner.utils.seeding import derive_seed, make_rng

logger = get_logger(__name__)

DATASET_FORMAT = "drive-planner-il"
DATASET_VERSION = 1
DATASET_STREAM = 2
MANIFEST_NAME = "manifest.json"
FLOAT_DTYPE = np.dtype("<f8")


class EpisodeRecord(BaseModel):
    """Provenance of one kept expert episode."""

    episode: int
    scenario_id: str
    seed: int
    rows: int = Field(ge=1)
    terminal: TerminalState
    file: str = ""
    sha256: str = ""


@dataclass(eq=False)
class ILDataset:
    """Rows of (observation, expert target) held with bit-packed planes."""

    plane_shape: Tuple[int, int, int, int]
    packed: np.ndarray
    scalars: np.ndarray
    targets: np.ndarray
    episodes: List[EpisodeRecord]

    def __post_init__(self):
        n = len(self.packed)
        if len(self.scalars) != n or len(self.targets) != n:
            raise DatasetError(
                "dataset arrays have different row counts",
                details={
                    "packed": n,
                    "scalars": len(self.scalars),
                    "targets": len(self.targets),
                },
            )
        if sum(e.rows for e in self.episodes) != n:
            raise DatasetError("episode row counts do not add up to the dataset size")

    def __len__(self) -> int:
        return len(self.packed)

    @property
    def n_planes(self) -> int:
        return int(np.prod(self.plane_shape))

    def planes(self, indices) -> np.ndarray:
        """uint8 planes (B, C, F, H, W) for the given rows."""
        rows = self.packed[np.asarray(indices)]
        bits = np.unpackbits(rows, axis=1, count=self.n_planes)
        return bits.reshape((len(rows),) + tuple(self.plane_shape))

    def batch(self, indices) -> Tuple[np.ndarray, np.ndarray]:
        """Network input (planes float64 (B, C*F, H, W), scalars (B, 5))."""
        indices = np.asarray(indices)
        planes = self.planes(indices)
        c, f, h, w = self.plane_shape
        return (
            planes.reshape(len(indices), c * f, h, w).astype(np.float64),
            self.scalars[indices],
        )

    def observation(self, index: int) -> Observation:
        return Observation(
            planes=self.planes([index])[0], scalars=self.scalars[index].copy()
        )

    @classmethod
    def from_rows(
        cls,
        plane_shape: Tuple[int, int, int, int],
        rows: Sequence[Tuple[Observation, float, float]],
        episodes: List[EpisodeRecord],
    ) -> "ILDataset":
        n_bytes = (int(np.prod(plane_shape)) + 7) // 8
        packed = np.zeros((len(rows), n_bytes), dtype=np.uint8)
        scalars = np.zeros((len(rows), N_SCALARS))
        targets = np.zeros((len(rows), 2))
        for i, (obs, t_acc, t_sa) in enumerate(rows):
            packed[i] = np.packbits(obs.planes.ravel())
            scalars[i] = obs.scalars
            targets[i] = (t_acc, t_sa)
        return cls(tuple(plane_shape), packed, scalars, targets, episodes)

    def target_ranges_ok(self) -> bool:
        """Every target lies strictly inside the tanh-bounded mean range."""
        return bool(
            np.all(np.abs(self.targets[:, 0]) < ACC_LIMIT)
            and np.all(np.abs(self.targets[:, 1]) < STEER_LIMIT)
        )


@dataclass
class _EpisodeCapture:
    record: EpisodeRecord
    rows: List[Tuple[Observation, float, float]]
    discarded: bool


def record_expert_episode(
    episode: int,
    scenarios: Sequence[Scenario],
    settings: SimulatorSettings,
    make_actuation: Callable[[], ActuationModel],
    seed: int,
    expert: ExpertConfig,
    target_fraction: float,
) -> _EpisodeCapture:
    """Drive one expert episode and record (observation, clipped command) rows."""
    rng = make_rng(seed, DATASET_STREAM, episode)
    scenario = scenarios[int(rng.integers(len(scenarios)))]
    sim = settings.build(scenario, make_actuation)
    driver = ExpertDriver(expert)
    episode_seed = derive_seed(seed, DATASET_STREAM, episode)
    obs, _ = sim.reset(seed=episode_seed)

    acc_cap = target_fraction * ACC_LIMIT
    sa_cap = target_fraction * STEER_LIMIT
    rows: List[Tuple[Observation, float, float]] = []
    while True:
        cmd_acc, cmd_steer = driver.act(sim.state, sim.path, sim.loc)
        rows.append(
            (
                obs,
                float(np.clip(cmd_acc, -acc_cap, acc_cap)),
                float(np.clip(cmd_steer, -sa_cap, sa_cap)),
            )
        )
        result = sim.advance(cmd_acc, cmd_steer)
        obs = result.observation
        if result.done:
            break

    record = EpisodeRecord(
        episode=episode,
        scenario_id=scenario.scenario_id,
        seed=episode_seed,
        rows=len(rows),
        terminal=result.terminal,
    )
    return _EpisodeCapture(record, rows, result.terminal is TerminalState.OFF_ROAD)


def generate_il_dataset(
    scenarios: Sequence[Scenario],
    n_episodes: int,
    settings: Optional[SimulatorSettings] = None,
    seed: int = 0,
    config: Optional[DatasetConfig] = None,
    expert: Optional[ExpertConfig] = None,
    n_jobs: int = 1,
) -> ILDataset:
    """
    Record ``n_episodes`` expert episodes over the scenarios.

    Episodes are independent and merged by episode index, so ``n_jobs``
    does not change the result. OffRoad episodes are dropped when
    ``config.discard_offroad`` is set.
    """
    if n_episodes < 1:
        raise ValidationError(f"n_episodes must be at least 1, got {n_episodes}")
    if not scenarios:
        raise ValidationError("generate_il_dataset needs at least one scenario")
    settings = settings or SimulatorSettings()
    config = config or DatasetConfig()
    expert = expert or ExpertConfig()
    make_actuation = actuation_factory(settings.actuation)

    def run(episode: int) -> _EpisodeCapture:
        with episode_context(0, episode):
            return record_expert_episode(
                episode,
                scenarios,
                settings,
                make_actuation,
                seed,
                expert,
                config.target_fraction,
            )

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            captures = list(pool.map(run, range(n_episodes)))
    else:
        captures = [run(e) for e in range(n_episodes)]

    kept: List[_EpisodeCapture] = []
    for capture in captures:
        if capture.discarded and config.discard_offroad:
            logger.warning(
                f"Discarding expert episode {capture.record.episode} "
                f"({capture.record.scenario_id}): ended OffRoad"
            )
            continue
        kept.append(capture)
    if not kept:
        raise DatasetError(
            "all expert episodes were discarded",
            details={"n_episodes": n_episodes},
        )

    c = len(CHANNELS)
    grid = settings.render.grid_size
    plane_shape = (c, settings.render.n_frames, grid, grid)
    rows = [row for capture in kept for row in capture.rows]
    dataset = ILDataset.from_rows(plane_shape, rows, [k.record for k in kept])
    logger.info(
        f"Recorded {len(dataset)} rows from {len(kept)}/{n_episodes} expert episodes"
    )
    return dataset


def _block(dataset: ILDataset, start: int, stop: int) -> bytes:
    parts = []
    for i in range(start, stop):
        parts.append(dataset.packed[i].tobytes())
        parts.append(dataset.scalars[i].astype(FLOAT_DTYPE).tobytes())
        parts.append(dataset.targets[i].astype(FLOAT_DTYPE).tobytes())
    return b"".join(parts)


def save_il_dataset(dataset: ILDataset, directory: Union[str, Path]) -> Path:
    """Write the manifest and one binary block per episode."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    start = 0
    episodes = []
    for record in dataset.episodes:
        name = f"episode_{record.episode:05d}.bin"
        block = _block(dataset, start, start + record.rows)
        (directory / name).write_bytes(block)
        episodes.append(
            record.model_copy(
                update={"file": name, "sha256": hashlib.sha256(block).hexdigest()}
            ).model_dump(mode="json")
        )
        start += record.rows

    manifest = {
        "format": DATASET_FORMAT,
        "version": DATASET_VERSION,
        "plane_shape": list(dataset.plane_shape),
        "packed_bytes": int(dataset.packed.shape[1]),
        "row_bytes": int(dataset.packed.shape[1])
        + (N_SCALARS + 2) * FLOAT_DTYPE.itemsize,
        "rows": len(dataset),
        "episodes": episodes,
    }
    path = directory / MANIFEST_NAME
    text = json.dumps(manifest, sort_keys=True, indent=2) + "\n"
    path.write_text(text, encoding="utf-8")
    return path


def load_il_dataset(directory: Union[str, Path]) -> ILDataset:
    """Read a dataset written by :func:`save_il_dataset`."""
    directory = Path(directory)
    manifest_path = directory / MANIFEST_NAME
    if not manifest_path.exists():
        raise not_found_error("dataset", str(directory))
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise DatasetError(f"unreadable dataset manifest {manifest_path}: {e}") from e
    found = {"format": manifest.get("format"), "version": manifest.get("version")}
    if found != {"format": DATASET_FORMAT, "version": DATASET_VERSION}:
        raise DatasetError("unsupported dataset format", details=found)

    packed_bytes = int(manifest["packed_bytes"])
    float_bytes = (N_SCALARS + 2) * FLOAT_DTYPE.itemsize
    record_dtype = np.dtype(
        [
            ("planes", np.uint8, (packed_bytes,)),
            ("scalars", FLOAT_DTYPE, (N_SCALARS,)),
            ("targets", FLOAT_DTYPE, (2,)),
        ]
    )
    if record_dtype.itemsize != packed_bytes + float_bytes:
        raise DatasetError("dataset record layout mismatch")

    records = [EpisodeRecord.model_validate(e) for e in manifest["episodes"]]
    blocks = []
    for record in records:
        block_path = directory / record.file
        if not block_path.exists():
            raise not_found_error("dataset block", str(block_path))
        raw = block_path.read_bytes()
        if len(raw) != record.rows * record_dtype.itemsize:
            raise DatasetError(
                f"block {record.file} has {len(raw)} bytes, expected "
                f"{record.rows * record_dtype.itemsize}"
            )
        blocks.append(np.frombuffer(raw, dtype=record_dtype))
    data = np.concatenate(blocks) if blocks else np.zeros(0, dtype=record_dtype)
    return ILDataset(
        plane_shape=tuple(manifest["plane_shape"]),
        packed=np.array(data["planes"]),
        scalars=np.array(data["scalars"], dtype=np.float64),
        targets=np.array(data["targets"], dtype=np.float64),
        episodes=records,
    )
