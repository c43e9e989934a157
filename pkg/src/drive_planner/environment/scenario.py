"""
Scenario documents, route enumeration and path sampling.

A scenario document is JSON validated against ``scenario_schema.json``. Lanes
are explicit centerlines or procedural primitives (straight, arc) starting
from a pose or from the end of another lane. When no navigable polygons are
given they are generated as width-buffered strips around every lane.
"""

import json
import math
from functools import lru_cache
from importlib import resources
from pathlib import Path as FilePath
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import jsonschema
import numpy as np

from drive_planner.environment.models import (
    SPEED_LIMIT_MAX,
    SPEED_LIMIT_MIN,
    Lane,
    Path,
    PathConfig,
    Scenario,
)
from drive_planner.utils.errors import (
    NoAdmissibleRouteError,
    ScenarioError,
    not_found_error,
)
from drive_planner.utils.geometry import segment_lengths
from drive_planner.utils.logger import get_logger

logger = get_logger(__name__)

ScenarioSource = Union[str, FilePath, bytes, Mapping[str, Any]]

ARC_RESOLUTION = 1.0  # m between generated arc vertices
STRIP_CHUNK = 20  # centerline vertices per generated navigable polygon
JOIN_TOLERANCE = 1.0  # m, max gap between a lane end and its successor start
NUDGE = 1e-3


@lru_cache(maxsize=1)
def scenario_schema() -> Dict[str, Any]:
    """The committed JSON schema for scenario documents."""
    text = (
        resources.files("drive_planner.environment")
        .joinpath("scenario_schema.json")
        .read_text(encoding="utf-8")
    )
    return json.loads(text)


def _read_document(source: ScenarioSource) -> Tuple[Dict[str, Any], str]:
    if isinstance(source, Mapping):
        return dict(source), "<mapping>"
    if isinstance(source, bytes):
        raw, origin = source, "<bytes>"
    else:
        path = FilePath(source)
        if not path.exists():
            raise not_found_error("scenario", str(path))
        raw, origin = path.read_bytes(), str(path)
    try:
        return json.loads(raw.decode("utf-8")), origin
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ScenarioError(
            f"scenario document is not valid JSON: {e}", details={"source": origin}
        ) from e


def _validate_schema(document: Dict[str, Any], origin: str) -> None:
    validator = jsonschema.Draft202012Validator(scenario_schema())
    errors = sorted(validator.iter_errors(document), key=lambda e: list(e.path))
    if errors:
        first = errors[0]
        location = "/".join(str(p) for p in first.path) or "<root>"
        raise ScenarioError(
            f"scenario document does not match the schema at {location}: "
            f"{first.message}",
            details={"source": origin, "error_count": len(errors)},
        )


def expand_primitives(
    start: Tuple[float, float, float], primitives: Sequence[Mapping[str, Any]]
) -> Tuple[np.ndarray, Tuple[float, float, float]]:
    """
    Expand straight/arc primitives from a start pose.

    Positive arc angles turn left. Returns the polyline and the exact end pose.
    """
    x, y, heading = start
    points = [(x, y)]
    for primitive in primitives:
        if primitive["type"] == "straight":
            length = float(primitive["length"])
            x += length * math.cos(heading)
            y += length * math.sin(heading)
            points.append((x, y))
            continue
        radius = float(primitive["radius"])
        angle = float(primitive["angle"])
        if angle == 0.0:
            continue
        sign = 1.0 if angle > 0 else -1.0
        cx = x - sign * radius * math.sin(heading)
        cy = y + sign * radius * math.cos(heading)
        n = max(1, int(math.ceil(radius * abs(angle) / ARC_RESOLUTION)))
        for k in range(1, n + 1):
            phi = heading + angle * k / n
            points.append(
                (cx + sign * radius * math.sin(phi), cy - sign * radius * math.cos(phi))
            )
        heading += angle
        x, y = points[-1]
    return np.asarray(points, dtype=np.float64), (x, y, heading)


def _end_pose(points: np.ndarray) -> Tuple[float, float, float]:
    dx, dy = points[-1] - points[-2]
    return float(points[-1, 0]), float(points[-1, 1]), math.atan2(dy, dx)


def _resolve_centerlines(
    lane_docs: Sequence[Mapping[str, Any]],
) -> Dict[str, np.ndarray]:
    centerlines: Dict[str, np.ndarray] = {}
    end_poses: Dict[str, Tuple[float, float, float]] = {}
    pending = list(lane_docs)
    while pending:
        remaining = []
        for doc in pending:
            lane_id = doc["id"]
            if "centerline" in doc:
                points = np.asarray(doc["centerline"], dtype=np.float64).reshape(-1, 2)
                centerlines[lane_id] = points
                if len(points) >= 2:
                    end_poses[lane_id] = _end_pose(points)
                continue
            if "start" in doc:
                start = (doc["start"]["x"], doc["start"]["y"], doc["start"]["heading"])
            elif doc["from_lane"] in end_poses:
                start = end_poses[doc["from_lane"]]
            else:
                remaining.append(doc)
                continue
            points, end = expand_primitives(start, doc["geometry"])
            centerlines[lane_id] = points
            end_poses[lane_id] = end
        if len(remaining) == len(pending):
            unresolved = sorted(d["id"] for d in remaining)
            raise ScenarioError(
                "lanes reference unknown or cyclic from_lane",
                details={"lanes": unresolved},
            )
        pending = remaining
    return centerlines


def _check_polyline(lane_id: str, points: np.ndarray) -> None:
    if len(points) < 2:
        raise ScenarioError(
            f"lane '{lane_id}' centerline needs at least 2 points",
            details={"lane": lane_id},
        )
    lengths = segment_lengths(points)
    if np.any(lengths <= 0.0):
        raise ScenarioError(
            f"lane '{lane_id}' has a zero-length segment",
            details={"lane": lane_id, "segment": int(np.argmin(lengths))},
        )


def lane_strip_polygons(centerline: np.ndarray, width: float) -> List[np.ndarray]:
    """Buffer a centerline into quadrilateral-strip polygons (miter joins)."""
    direction = np.diff(centerline, axis=0)
    direction /= np.hypot(direction[:, 0], direction[:, 1])[:, None]
    normals = np.column_stack((-direction[:, 1], direction[:, 0]))

    vertex_normals = np.empty_like(centerline)
    vertex_normals[0] = normals[0]
    vertex_normals[-1] = normals[-1]
    scale = np.ones(len(centerline))
    if len(centerline) > 2:
        mean = normals[:-1] + normals[1:]
        mean /= np.maximum(np.hypot(mean[:, 0], mean[:, 1]), 1e-12)[:, None]
        vertex_normals[1:-1] = mean
        scale[1:-1] = 1.0 / np.maximum(np.sum(mean * normals[1:], axis=1), 0.3)

    offset = 0.5 * width * scale[:, None] * vertex_normals
    left = centerline + offset
    right = centerline - offset

    polygons = []
    last = len(centerline) - 1
    for start in range(0, last, STRIP_CHUNK):
        stop = min(last, start + STRIP_CHUNK)
        polygons.append(
            np.vstack((left[start : stop + 1], right[start : stop + 1][::-1]))
        )
    return polygons


def _centerline_samples(centerline: np.ndarray) -> np.ndarray:
    a = centerline[:-1]
    b = centerline[1:]
    mid = 0.5 * (a + b)
    step = (b - a) / np.hypot(*(b - a).T)[:, None] * NUDGE
    return np.vstack((mid, a + step, b - step))


def _build_scenario(document: Mapping[str, Any]) -> Scenario:
    scenario_id = document["id"]
    lane_docs = document["lanes"]
    ids = [doc["id"] for doc in lane_docs]
    if len(set(ids)) != len(ids):
        raise ScenarioError(f"duplicate lane ids in scenario '{scenario_id}'")

    centerlines = _resolve_centerlines(lane_docs)
    lanes = []
    for doc in lane_docs:
        lane_id = doc["id"]
        points = centerlines[lane_id]
        _check_polyline(lane_id, points)
        limit = float(doc["speed_limit"])
        if not SPEED_LIMIT_MIN <= limit <= SPEED_LIMIT_MAX:
            raise ScenarioError(
                f"speed limit out of range for lane '{lane_id}': {limit}",
                details={
                    "lane": lane_id,
                    "range": [SPEED_LIMIT_MIN, SPEED_LIMIT_MAX],
                },
            )
        lanes.append(Lane(lane_id, points, float(doc["width"]), limit))

    connectivity: Dict[str, Tuple[str, ...]] = {lane_id: () for lane_id in ids}
    for lane_id, successors in document.get("connectivity", {}).items():
        unknown = [s for s in [lane_id, *successors] if s not in connectivity]
        if unknown:
            raise ScenarioError(
                f"connectivity references unknown lanes: {unknown}",
                details={"scenario": scenario_id},
            )
        connectivity[lane_id] = tuple(successors)
    for lane_id, successors in connectivity.items():
        end = centerlines[lane_id][-1]
        for successor in successors:
            gap = float(np.hypot(*(centerlines[successor][0] - end)))
            if gap > JOIN_TOLERANCE:
                raise ScenarioError(
                    f"lane '{successor}' does not start where '{lane_id}' ends",
                    details={"gap_m": gap},
                )

    if "navigable" in document:
        navigable = tuple(
            np.asarray(poly, dtype=np.float64) for poly in document["navigable"]
        )
    else:
        navigable = tuple(
            poly
            for lane in lanes
            for poly in lane_strip_polygons(lane.centerline, lane.width)
        )

    stop_lines = tuple(
        np.asarray(line, dtype=np.float64) for line in document.get("stop_lines", [])
    )
    scenario = Scenario(
        scenario_id=scenario_id,
        lanes=tuple(lanes),
        navigable=navigable,
        stop_lines=stop_lines,
        connectivity=connectivity,
    )

    for lane in lanes:
        samples = _centerline_samples(lane.centerline)
        outside = ~scenario.contains(samples)
        if outside.any():
            point = samples[int(np.argmax(outside))]
            raise ScenarioError(
                f"lane '{lane.lane_id}' leaves the navigable area",
                details={"lane": lane.lane_id, "point": point.round(3).tolist()},
            )
    return scenario


def load_scenario_bundle(source: ScenarioSource) -> List[Scenario]:
    """Load every scenario from a document (single scenario or bundle)."""
    document, origin = _read_document(source)
    _validate_schema(document, origin)
    docs = document["scenarios"] if "scenarios" in document else [document]
    scenarios = [_build_scenario(doc) for doc in docs]
    seen = set()
    for scenario in scenarios:
        if scenario.scenario_id in seen:
            raise ScenarioError(f"duplicate scenario id '{scenario.scenario_id}'")
        seen.add(scenario.scenario_id)
    logger.debug(f"Loaded {len(scenarios)} scenario(s) from {origin}")
    return scenarios


def load_scenario(source: ScenarioSource) -> Scenario:
    """Load exactly one scenario."""
    scenarios = load_scenario_bundle(source)
    if len(scenarios) != 1:
        raise ScenarioError(
            f"expected one scenario, document holds {len(scenarios)}",
            details={"ids": [s.scenario_id for s in scenarios]},
        )
    return scenarios[0]


def load_scenarios(sources: Sequence[ScenarioSource]) -> List[Scenario]:
    """Load and concatenate several scenario files."""
    out: List[Scenario] = []
    for source in sources:
        out.extend(load_scenario_bundle(source))
    return out


def route_length(scenario: Scenario, route: Sequence[str]) -> float:
    return float(sum(scenario.lane(lane_id).length for lane_id in route))


def enumerate_routes(
    scenario: Scenario, min_length: float = 0.0
) -> List[Tuple[str, ...]]:
    """
    Every maximal simple lane sequence from a source lane, at least
    ``min_length`` long, in document order.

    Source lanes have no predecessor; when every lane has one (loops), every
    lane is a source.
    """
    has_predecessor = {
        s for successors in scenario.connectivity.values() for s in successors
    }
    sources = [lane for lane in scenario.lane_ids if lane not in has_predecessor]
    if not sources:
        sources = list(scenario.lane_ids)

    routes: List[Tuple[str, ...]] = []

    def extend(route: Tuple[str, ...]) -> None:
        options = [s for s in scenario.connectivity[route[-1]] if s not in route]
        if not options:
            routes.append(route)
            return
        for successor in options:
            extend(route + (successor,))

    for source in sources:
        extend((source,))
    return [r for r in routes if route_length(scenario, r) >= min_length]


def build_path(scenario: Scenario, route: Sequence[str], spacing: float = 0.5) -> Path:
    """Concatenate the route's centerlines and resample at fixed spacing."""
    pieces = []
    owner = []
    for lane_id in route:
        lane = scenario.lane(lane_id)
        points = lane.centerline
        if pieces and np.hypot(*(points[0] - pieces[-1][-1])) < 1e-9:
            points = points[1:]
        pieces.append(points)
        owner.extend([lane] * len(points))
    polyline = np.vstack(pieces)
    seg = segment_lengths(polyline)
    vertex_s = np.concatenate(([0.0], np.cumsum(seg)))
    total = float(vertex_s[-1])

    s = np.arange(0.0, total, spacing)
    if total - s[-1] > 1e-9:
        s = np.append(s, total)
    segment = np.clip(np.searchsorted(vertex_s, s, side="right") - 1, 0, len(seg) - 1)
    t = (s - vertex_s[segment]) / seg[segment]
    xy = polyline[segment] + t[:, None] * (polyline[segment + 1] - polyline[segment])

    step = np.diff(xy, axis=0)
    heading = np.arctan2(step[:, 1], step[:, 0])
    heading = np.append(heading, heading[-1])
    # a segment belongs to the lane owning its end vertex
    lanes = [owner[i + 1] for i in segment]
    waypoints = np.column_stack(
        (
            xy,
            heading,
            s,
            [lane.speed_limit for lane in lanes],
            [lane.width for lane in lanes],
        )
    )
    return Path(waypoints=waypoints, lane_ids=tuple(route), spacing=spacing)


def sample_path(
    scenario: Scenario,
    rng: np.random.Generator,
    config: Optional[PathConfig] = None,
) -> Path:
    """Pick an admissible route uniformly at random and resample it."""
    config = config or PathConfig()
    routes = enumerate_routes(scenario, config.min_path_length)
    if not routes:
        raise NoAdmissibleRouteError(
            f"no admissible route in scenario '{scenario.scenario_id}'",
            details={"min_path_length": config.min_path_length},
        )
    route = routes[int(rng.integers(len(routes)))]
    return build_path(scenario, route, config.spacing)
