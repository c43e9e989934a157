"""Shared fixtures: small scenarios, a reduced raster and matching settings."""

import json
import math
import os
from pathlib import Path

import pytest

from drive_planner.utils.config import Config

for _key, _value in Config.get_preset("testing").items():
    os.environ.setdefault(_key, str(_value))

from drive_planner.dynamics.actuation import ActuationSpec  # noqa: E402
from drive_planner.environment.models import RenderConfig  # noqa: E402
from drive_planner.environment.scenario import build_path, load_scenario  # noqa: E402
from drive_planner.environment.simulator import SimulatorSettings  # noqa: E402
from drive_planner.training.models import TrainConfig  # noqa: E402

REPO_ROOT = Path(__file__).resolve().parent.parent
SCENARIO_DIR = REPO_ROOT / "config" / "scenarios"

STRAIGHT = {
    "id": "straight",
    "lanes": [
        {
            "id": "main",
            "width": 3.5,
            "speed_limit": 6.0,
            "centerline": [[0, 0], [80, 0]],
        }
    ],
}

NARROW = {
    "id": "narrow",
    "lanes": [
        {
            "id": "main",
            "width": 3.0,
            "speed_limit": 5.0,
            "centerline": [[0, 0], [80, 0]],
        }
    ],
}

T_JUNCTION = {
    "id": "t_junction",
    "lanes": [
        {
            "id": "approach",
            "width": 3.5,
            "speed_limit": 6.0,
            "start": {"x": 0.0, "y": 0.0, "heading": 0.0},
            "geometry": [{"type": "straight", "length": 30.0}],
        },
        {
            "id": "turn_left",
            "width": 3.5,
            "speed_limit": 4.5,
            "from_lane": "approach",
            "geometry": [
                {"type": "arc", "radius": 15.0, "angle": math.pi / 2},
                {"type": "straight", "length": 25.0},
            ],
        },
        {
            "id": "turn_right",
            "width": 3.5,
            "speed_limit": 4.5,
            "from_lane": "approach",
            "geometry": [
                {"type": "arc", "radius": 15.0, "angle": -math.pi / 2},
                {"type": "straight", "length": 25.0},
            ],
        },
    ],
    "connectivity": {"approach": ["turn_left", "turn_right"]},
    "stop_lines": [[[28.0, -1.75], [28.0, 1.75]]],
}

SHORT = {
    "id": "short",
    "lanes": [
        {
            "id": "stub",
            "width": 3.5,
            "speed_limit": 5.0,
            "centerline": [[0, 0], [10, 0]],
        }
    ],
}

SMALL_RENDER = RenderConfig(
    grid_size=24, window_m=24.0, anchor_col=12, anchor_row=18, n_frames=4
)


@pytest.fixture
def straight_scenario():
    return load_scenario(STRAIGHT)


@pytest.fixture
def narrow_scenario():
    return load_scenario(NARROW)


@pytest.fixture
def junction_scenario():
    return load_scenario(T_JUNCTION)


@pytest.fixture
def short_scenario():
    return load_scenario(SHORT)


@pytest.fixture
def straight_path(straight_scenario):
    return build_path(straight_scenario, ("main",), 0.5)


@pytest.fixture
def small_settings():
    """Instant actuation on a 24x24 raster; pairs with the ``small`` network."""
    return SimulatorSettings(
        render=SMALL_RENDER, actuation=ActuationSpec(kind="instant")
    )


@pytest.fixture
def low_pass_settings():
    return SimulatorSettings(
        render=SMALL_RENDER, actuation=ActuationSpec(kind="low_pass", alpha=0.3)
    )


@pytest.fixture
def small_train_config():
    return TrainConfig(
        n_workers=2,
        max_episodes=4,
        window=2,
        checkpoint_every=2,
        network="small",
        anneal_lr=False,
        seed=3,
    )


@pytest.fixture
def scenario_file(tmp_path):
    """Write a scenario mapping to a JSON file and return its path."""

    def write(document, name="scenario.json"):
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return path

    return write
