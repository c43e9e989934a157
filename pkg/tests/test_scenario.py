"""Tests for scenario loading, routes and path sampling."""

import copy
import json
import math

import numpy as np
import pytest

from conftest import SCENARIO_DIR, SHORT, STRAIGHT, T_JUNCTION
from drive_planner.environment.models import PathConfig
from drive_planner.environment.scenario import (
    build_path,
    enumerate_routes,
    expand_primitives,
    load_scenario,
    load_scenario_bundle,
    load_scenarios,
    route_length,
    sample_path,
    scenario_schema,
)
from drive_planner.utils.errors import (
    ErrorCode,
    MissingPrerequisiteError,
    NoAdmissibleRouteError,
    ScenarioError,
)


class TestLoading:
    def test_mapping(self, straight_scenario):
        assert straight_scenario.scenario_id == "straight"
        assert straight_scenario.lane_ids == ("main",)
        assert straight_scenario.lane("main").length == pytest.approx(80.0)

    def test_file_and_bytes(self, scenario_file):
        from_file = load_scenario(scenario_file(STRAIGHT))
        from_bytes = load_scenario(json.dumps(STRAIGHT).encode("utf-8"))
        for scenario in (from_file, from_bytes):
            np.testing.assert_array_equal(
                scenario.lane("main").centerline, [[0.0, 0.0], [80.0, 0.0]]
            )

    def test_missing_file(self, tmp_path):
        path = tmp_path / "absent.json"
        with pytest.raises(MissingPrerequisiteError) as excinfo:
            load_scenario(path)
        assert excinfo.value.error_code == ErrorCode.NOT_FOUND
        assert str(excinfo.value) == f"scenario not found: {path}"

    def test_invalid_json(self):
        with pytest.raises(ScenarioError, match="not valid JSON"):
            load_scenario(b"{not json")

    def test_schema_violation(self):
        with pytest.raises(ScenarioError, match="schema"):
            load_scenario({"id": "no_lanes"})

    def test_schema_is_draft_2020_12(self):
        assert "2020-12" in scenario_schema()["$schema"]

    @pytest.mark.parametrize("limit", [3.9, 8.4])
    def test_speed_limit_out_of_range(self, limit):
        document = copy.deepcopy(STRAIGHT)
        document["lanes"][0]["speed_limit"] = limit
        with pytest.raises(ScenarioError, match="speed limit out of range"):
            load_scenario(document)

    def test_zero_length_segment(self):
        document = copy.deepcopy(STRAIGHT)
        document["lanes"][0]["centerline"] = [[0, 0], [0, 0], [80, 0]]
        with pytest.raises(ScenarioError, match="zero-length"):
            load_scenario(document)

    def test_duplicate_lane_ids(self):
        document = copy.deepcopy(STRAIGHT)
        document["lanes"].append(copy.deepcopy(document["lanes"][0]))
        with pytest.raises(ScenarioError, match="duplicate lane ids"):
            load_scenario(document)

    def test_unknown_connectivity(self):
        document = copy.deepcopy(STRAIGHT)
        document["connectivity"] = {"main": ["ghost"]}
        with pytest.raises(ScenarioError, match="unknown lanes"):
            load_scenario(document)

    def test_disconnected_successor(self):
        document = copy.deepcopy(STRAIGHT)
        document["lanes"].append(
            {
                "id": "far",
                "width": 3.5,
                "speed_limit": 5.0,
                "centerline": [[90, 0], [120, 0]],
            }
        )
        document["connectivity"] = {"main": ["far"]}
        with pytest.raises(ScenarioError, match="does not start where"):
            load_scenario(document)

    def test_cyclic_from_lane(self):
        document = {
            "id": "cycle",
            "lanes": [
                {
                    "id": "a",
                    "width": 3.5,
                    "speed_limit": 5.0,
                    "from_lane": "b",
                    "geometry": [{"type": "straight", "length": 10.0}],
                },
                {
                    "id": "b",
                    "width": 3.5,
                    "speed_limit": 5.0,
                    "from_lane": "a",
                    "geometry": [{"type": "straight", "length": 10.0}],
                },
            ],
        }
        with pytest.raises(ScenarioError, match="cyclic"):
            load_scenario(document)

    def test_lane_outside_navigable(self):
        document = copy.deepcopy(STRAIGHT)
        document["navigable"] = [[[0, -2], [40, -2], [40, 2], [0, 2]]]
        with pytest.raises(ScenarioError, match="leaves the navigable area"):
            load_scenario(document)

    def test_bundle_needs_unique_ids(self):
        with pytest.raises(ScenarioError, match="duplicate scenario id"):
            load_scenario_bundle({"scenarios": [STRAIGHT, STRAIGHT]})

    def test_load_scenario_rejects_bundle(self):
        with pytest.raises(ScenarioError, match="expected one scenario"):
            load_scenario({"scenarios": [STRAIGHT, SHORT]})


class TestCommittedScenarios:
    def test_desk_scale_bundle(self):
        scenarios = load_scenario_bundle(SCENARIO_DIR / "desk_scale.json")
        assert [s.scenario_id for s in scenarios] == [
            "straight",
            "s_curve",
            "t_junction",
            "loop_block",
        ]
        for scenario in scenarios:
            assert enumerate_routes(scenario, PathConfig().min_path_length)

    def test_heldout(self):
        scenarios = load_scenarios([SCENARIO_DIR / "heldout.json"])
        assert scenarios
        assert scenarios[0].scenario_id == "heldout_curve"


class TestGeometry:
    def test_expand_arc(self):
        points, end = expand_primitives(
            (0.0, 0.0, 0.0), [{"type": "arc", "radius": 15.0, "angle": math.pi / 2}]
        )
        assert end[0] == pytest.approx(15.0)
        assert end[1] == pytest.approx(15.0)
        assert end[2] == pytest.approx(math.pi / 2)
        radii = np.hypot(points[:, 0], points[:, 1] - 15.0)
        np.testing.assert_allclose(radii, 15.0)

    def test_expand_right_turn(self):
        _, end = expand_primitives(
            (30.0, 0.0, 0.0),
            [
                {"type": "arc", "radius": 15.0, "angle": -math.pi / 2},
                {"type": "straight", "length": 25.0},
            ],
        )
        assert end == pytest.approx((45.0, -40.0, -math.pi / 2))

    def test_navigable_strip(self, straight_scenario):
        inside = straight_scenario.contains(
            np.array([[10.0, 0.0], [10.0, 1.7], [10.0, 1.8], [-1.0, 0.0]])
        )
        assert inside.tolist() == [True, True, False, False]


class TestRoutes:
    def test_junction_routes(self, junction_scenario):
        assert enumerate_routes(junction_scenario) == [
            ("approach", "turn_left"),
            ("approach", "turn_right"),
        ]
        length = route_length(junction_scenario, ("approach", "turn_left"))
        assert length == pytest.approx(55.0 + 7.5 * math.pi, abs=0.1)

    def test_min_length_filter(self, short_scenario):
        assert enumerate_routes(short_scenario) == [("stub",)]
        assert enumerate_routes(short_scenario, 50.0) == []

    def test_loop_lanes_are_all_sources(self):
        scenario = load_scenario_bundle(SCENARIO_DIR / "desk_scale.json")[3]
        routes = enumerate_routes(scenario)
        assert {route[0] for route in routes} == set(scenario.lane_ids)
        assert all(len(route) == len(scenario.lane_ids) for route in routes)


class TestPaths:
    def test_straight_path(self, straight_path):
        assert len(straight_path) == 161
        assert straight_path.total_length == pytest.approx(80.0)
        np.testing.assert_allclose(np.diff(straight_path.arclength), 0.5)
        assert np.all(straight_path.headings == 0.0)
        assert np.all(straight_path.speed_limits == 6.0)
        assert np.all(straight_path.widths == 3.5)

    def test_route_path_follows_lanes(self, junction_scenario):
        path = build_path(junction_scenario, ("approach", "turn_left"), 0.5)
        assert path.lane_ids == ("approach", "turn_left")
        assert path.speed_limits[0] == 6.0
        assert path.speed_limits[-1] == 4.5
        np.testing.assert_allclose(path.goal[:2], [45.0, 40.0], atol=1e-9)
        assert np.all(np.diff(path.arclength) <= 0.5 + 1e-9)

    def test_sampling_is_seeded(self, junction_scenario):
        def routes(seed):
            rng = np.random.default_rng(seed)
            return [sample_path(junction_scenario, rng).lane_ids for _ in range(20)]

        assert routes(7) == routes(7)
        chosen = {ids for seed in range(10) for ids in routes(seed)}
        assert chosen == {("approach", "turn_left"), ("approach", "turn_right")}

    def test_no_admissible_route(self, short_scenario):
        with pytest.raises(NoAdmissibleRouteError):
            sample_path(short_scenario, np.random.default_rng(0))

    def test_junction_document_unchanged(self):
        before = copy.deepcopy(T_JUNCTION)
        load_scenario(T_JUNCTION)
        assert T_JUNCTION == before
