#include <catch2/catch_amalgamated.hpp>

#include "crossflow/scenario.hpp"

using namespace crossflow;

TEST_CASE("scenario file with only demands keeps all defaults") {
  const auto cfg = parse_scenario_text("ped_demand = 900\nveh_demand = 1800\n");
  CHECK(cfg.ped_demand == 900.0);
  CHECK(cfg.veh_demand == 1800.0);
  CHECK(cfg.geometry.street_width == 7.0);
  CHECK(cfg.geometry.lane_stretch == 500.0);
  CHECK(cfg.geometry.travel_distance == 26.0);
  CHECK(cfg.duration == 36000.0);
  CHECK(cfg.dt == 0.1);
  CHECK(cfg.conflict_params.visibility == 100.0);
  CHECK(cfg.conflict_params.front_gap == 0.5);
  CHECK(cfg.conflict_params.rear_gap == 0.5);
  CHECK(cfg.conflict_params.safety_factor == 1.5);
}

TEST_CASE("empty scenario file is pure defaults with zero demand") {
  const auto cfg = parse_scenario_text("");
  CHECK(cfg.ped_demand == 0.0);
  CHECK(cfg.veh_demand == 0.0);
  CHECK(cfg.ped_params.desired_speed_mean == 1.34);
  CHECK(cfg.veh_params.desired_speed == 13.89);
}

TEST_CASE("comments and whitespace are tolerated") {
  const auto cfg = parse_scenario_text(
      "# a comment\n"
      "  ped_demand =   1200   # trailing comment\n"
      "\n"
      "seed = 7\n");
  CHECK(cfg.ped_demand == 1200.0);
  CHECK(cfg.seed == 7);
}

TEST_CASE("dt above the relaxation time is rejected at load") {
  CHECK_THROWS_AS(parse_scenario_text("dt = 0.6\n"), ScenarioError);
  CHECK_THROWS_WITH(parse_scenario_text("dt = 0.6\n"),
                    Catch::Matchers::ContainsSubstring("relaxation_time"));
}

TEST_CASE("unknown keys and non-numeric values carry line context") {
  CHECK_THROWS_WITH(parse_scenario_text("ped_demand = 1\nwalk_speed = 2\n", "f.cfg"),
                    Catch::Matchers::ContainsSubstring("f.cfg:2") &&
                        Catch::Matchers::ContainsSubstring("walk_speed"));
  CHECK_THROWS_WITH(parse_scenario_text("dt = fast\n", "f.cfg"),
                    Catch::Matchers::ContainsSubstring("f.cfg:1") &&
                        Catch::Matchers::ContainsSubstring("non-numeric"));
  CHECK_THROWS_WITH(parse_scenario_text("just some text\n"),
                    Catch::Matchers::ContainsSubstring("key = value"));
}

TEST_CASE("validate_scenario flags violations as data") {
  SECTION("default config is clean") {
    CHECK(validate_scenario(ScenarioConfig{}).empty());
  }
  SECTION("measured segment must contain the street") {
    ScenarioConfig cfg;
    cfg.geometry.travel_distance = 5.0;
    const auto report = validate_scenario(cfg);
    REQUIRE_FALSE(report.empty());
    bool found = false;
    for (const auto& v : report) {
      if (v.find("measured segment shorter than street") != std::string::npos) {
        found = true;
      }
    }
    CHECK(found);
  }
  SECTION("negative demand") {
    ScenarioConfig cfg;
    cfg.ped_demand = -1.0;
    CHECK_FALSE(validate_scenario(cfg).empty());
  }
  SECTION("duration must be a multiple of dt") {
    ScenarioConfig cfg;
    cfg.duration = 100.05;
    CHECK_FALSE(validate_scenario(cfg).empty());
  }
  SECTION("safety factor below one") {
    ScenarioConfig cfg;
    cfg.conflict_params.safety_factor = 0.5;
    CHECK_FALSE(validate_scenario(cfg).empty());
  }
}

TEST_CASE("safety_factor_mode parses all variants") {
  CHECK(parse_scenario_text("safety_factor_mode = rear_gap\n")
            .conflict_params.safety_factor_mode == SafetyFactorMode::rear_gap);
  CHECK(parse_scenario_text("safety_factor_mode = both\n")
            .conflict_params.safety_factor_mode == SafetyFactorMode::both);
  CHECK_THROWS_AS(parse_scenario_text("safety_factor_mode = sometimes\n"),
                  ScenarioError);
}

TEST_CASE("geometry: conflict squares, measured span, lane lengths") {
  const ScenarioConfig cfg;
  const Geometry g = build_geometry(cfg);

  SECTION("two 3.5 x 3.5 conflict squares stacked across the 7 m street") {
    for (int k = 0; k < 2; ++k) {
      CHECK(g.conflict[k].width() == Catch::Approx(3.5));
      CHECK(g.conflict[k].height() == Catch::Approx(3.5));
    }
    CHECK(g.conflict[0].y_max == Catch::Approx(g.conflict[1].y_min));
    CHECK(g.conflict[0].y_min == Catch::Approx(g.street_y_min));
    CHECK(g.conflict[1].y_max == Catch::Approx(g.street_y_max));
  }
  SECTION("measured zone spans 26 m along the walking axis") {
    CHECK(g.measured.height() == Catch::Approx(26.0));
    // street centered: 9.5 m approach + 7 m street + 9.5 m egress
    CHECK(g.street_y_min - g.measured.y_min == Catch::Approx(9.5));
    CHECK(g.measured.y_max - g.street_y_max == Catch::Approx(9.5));
  }
  SECTION("each lane is 500 m upstream + crossing + 500 m downstream") {
    for (const auto& lane : g.lanes) {
      CHECK(lane.length == Catch::Approx(2.0 * 500.0 + 3.5));
      CHECK(lane.conflict_s_begin == Catch::Approx(500.0));
      CHECK(lane.conflict_s_end == Catch::Approx(503.5));
    }
    CHECK(g.lanes[0].direction == 1);
    CHECK(g.lanes[1].direction == -1);
  }
}

TEST_CASE("geometry is a pure function of the config") {
  const ScenarioConfig cfg;
  const Geometry a = build_geometry(cfg);
  const Geometry b = build_geometry(cfg);
  CHECK(a.input.y_max == b.input.y_max);
  CHECK(a.street_y_min == b.street_y_min);
  CHECK(a.sink.y_min == b.sink.y_min);
  CHECK(a.lanes[0].length == b.lanes[0].length);
}

TEST_CASE("zones are contiguous along the walking axis") {
  const Geometry g = build_geometry(ScenarioConfig{});
  CHECK(g.input.y_max == Catch::Approx(g.approach.y_min));
  CHECK(g.approach.y_max == Catch::Approx(g.measured.y_min));
  CHECK(g.measured.y_max == Catch::Approx(g.sink.y_min));
  // conflict squares sit inside the measured zone
  for (int k = 0; k < 2; ++k) {
    CHECK(g.conflict[k].y_min >= g.measured.y_min);
    CHECK(g.conflict[k].y_max <= g.measured.y_max);
  }
}

TEST_CASE("conflict squares partition corridor x street exactly") {
  const Geometry g = build_geometry(ScenarioConfig{});
  const double street_area = (g.street_y_max - g.street_y_min) *
                             (g.corridor_x_max - g.corridor_x_min);
  CHECK(g.conflict[0].area() + g.conflict[1].area() == Catch::Approx(street_area));
  // zero-area intersection: they share only the dividing edge
  CHECK(g.conflict[0].y_max == Catch::Approx(g.conflict[1].y_min));
}
