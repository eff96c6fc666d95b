// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include "helpers.hpp"
#include "mmsense/config.hpp"

using namespace mmsense;
using namespace mmsense::config;
using nlohmann::json;

namespace {

std::string key_path_of(const json& j) {
  try {
    parse_config_json(j);
  } catch (const ConfigError& e) {
    return e.key_path();
  }
  return "<no error>";
}

}  // namespace

TEST_CASE("empty config yields the defaults", "[config]") {
  const auto c = parse_config_json(json::object());
  REQUIRE(c.fmcw.slope == 60.012e12);
  REQUIRE(c.fmcw.loops_per_frame == 64);
  REQUIRE(c.sfcw.tone_count == 128);
  REQUIRE(c.subarray == Subarray::s12x16);
  REQUIRE(c.fmcw_geometry().channel_count() == 192);
  REQUIRE(c.sfcw_geometry().channel_count() == 256);
  REQUIRE(c.imaging.grid().nx() == 121);
  REQUIRE(c.imaging.grid().ny() == 68);
  REQUIRE(c.imaging.grid().nz() == 67);
  REQUIRE(c.tracking.grid().x_axis.size() == 61);
  REQUIRE(config_hash(c) == config_hash(AppConfig{}));
}

TEST_CASE("values are read from every section", "[config]") {
  const json j = json::parse(R"({
    "fmcw": {"loops_per_frame": 32, "slope": 30e12},
    "sfcw": {"tone_count": 64},
    "subarray": "6x8",
    "pointcloud": {"clutter_removal": false, "range_window": "hann", "angle_grid": {"az_step_deg": 2.0},
                   "workspace": {"min": [-1, 0.5, -1], "max": [1, 4, 1]}},
    "imaging": {"n_fft": 256, "interpolation": "linear", "x": {"start": -1, "step": 0.05, "count": 41}},
    "tracking": {"loading": 0.01, "alpha": 0.3, "box_size": 1.0, "cfar": {"window": 10, "guard": 2}},
    "simulation": {"frames": 3, "seed": 99, "noise_std": 0.5,
                   "scatterers": [{"position": [0, 2, 0], "velocity": [0, 0.5, 0], "amplitude": 2}],
                   "skeleton": {"translation": [0.2, 2.5, 0], "scatterers_per_bone": 2}},
    "workers": 2
  })");
  const auto c = parse_config_json(j);
  REQUIRE(c.fmcw.loops_per_frame == 32);
  REQUIRE(c.fmcw.slope == 30e12);
  REQUIRE(c.sfcw.tone_count == 64);
  REQUIRE(c.subarray == Subarray::s6x8);
  REQUIRE_FALSE(c.pointcloud.clutter_removal);
  REQUIRE(c.pointcloud.range_window == dsp::WindowKind::hann);
  REQUIRE(c.pointcloud.grid.az_step_deg == 2.0);
  REQUIRE(c.pointcloud.workspace.max == Vec3{1, 4, 1});
  REQUIRE(c.imaging.n_fft == 256);
  REQUIRE(c.imaging.interpolation == sfcw::RangeInterpolation::linear);
  REQUIRE(c.imaging.x.count == 41);
  REQUIRE(c.tracking.loading == 0.01);
  REQUIRE(c.tracking.track.alpha == 0.3);
  REQUIRE(c.tracking.track.box_side == 1.0);
  REQUIRE(c.tracking.track.cfar.window == 10);
  REQUIRE(c.simulation.frames == 3);
  REQUIRE(c.simulation.seed == 99);
  REQUIRE(c.simulation.scatterers.size() == 1);
  REQUIRE(c.simulation.scatterers[0].velocity == Vec3{0, 0.5, 0});
  REQUIRE(c.simulation.skeleton->scatterers_per_bone == 2);
  REQUIRE(c.workers == 2);
}

TEST_CASE("to_json round-trips through the parser", "[config]") {
  const json j = json::parse(R"({"fmcw": {"loops_per_frame": 16}, "subarray": "3x4",
    "simulation": {"frames": 2, "scatterers": [{"position": [0.1, 1.5, 0]}], "skeleton": {}}})");
  const auto c = parse_config_json(j);
  const auto again = parse_config_json(to_json(c));
  REQUIRE(to_json(again) == to_json(c));
  REQUIRE(config_hash(again) == config_hash(c));
  REQUIRE(config_hash(c) != config_hash(AppConfig{}));
}

TEST_CASE("errors carry the offending key path", "[config]") {
  REQUIRE(key_path_of(json::parse(R"({"fmcw": {"loops_per_frame": 1}})")) == "fmcw.loops_per_frame");
  REQUIRE(key_path_of(json::parse(R"({"fmcw": {"slope": "fast"}})")) == "fmcw.slope");
  REQUIRE(key_path_of(json::parse(R"({"fmcw": {"sloop": 1}})")) == "fmcw.sloop");
  REQUIRE(key_path_of(json::parse(R"({"colour": 1})")) == "colour");
  REQUIRE(key_path_of(json::parse(R"({"subarray": "4x4"})")) == "subarray");
  REQUIRE(key_path_of(json::parse(R"({"sfcw": {"stop_frequency": 1e9}})")) == "sfcw.stop_frequency");
  REQUIRE(key_path_of(json::parse(R"({"pointcloud": {"range_window": "kaiser"}})")) == "pointcloud.range_window");
  REQUIRE(key_path_of(json::parse(R"({"pointcloud": {"top_k": 0}})")) == "pointcloud.top_k");
  REQUIRE(key_path_of(json::parse(R"({"pointcloud": {"top_k": -3}})")) == "pointcloud.top_k");
  REQUIRE(key_path_of(json::parse(R"({"pointcloud": {"workspace": {"min": [1, 2]}}})")) == "pointcloud.workspace.min");
  REQUIRE(key_path_of(json::parse(R"({"imaging": {"n_fft": 64}})")) == "imaging.n_fft");
  REQUIRE(key_path_of(json::parse(R"({"imaging": {"y": {"step": 0}}})")) == "imaging.y.step");
  REQUIRE(key_path_of(json::parse(R"({"tracking": {"alpha": 1.5}})")) == "tracking.alpha");
  REQUIRE(key_path_of(json::parse(R"({"tracking": {"cfar": {"window": 2, "guard": 3}}})")) == "tracking.cfar.window");
  REQUIRE(key_path_of(json::parse(R"({"tracking": {"clutter_removal": 1}})")) == "tracking.clutter_removal");
  REQUIRE(key_path_of(json::parse(R"({"simulation": {"frames": 0}})")) == "simulation.frames");
  REQUIRE(key_path_of(json::parse(R"({"simulation": {"scatterers": [{"position": [0, 1, 0], "amp": 1}]}})")) ==
          "simulation.scatterers[0].amp");
  REQUIRE(key_path_of(json::parse(R"({"simulation": {"scatterers": [{"amplitude": -1}]}})")) ==
          "simulation.scatterers[0].amplitude");
  REQUIRE(key_path_of(json::parse(R"({"fmcw": 3})")) == "fmcw");
  REQUIRE(key_path_of(json::parse("[1, 2]")) == "");
}

TEST_CASE("config files: missing and malformed", "[config]") {
  testutil::TempDir dir("cfg");
  REQUIRE_THROWS_AS(parse_config(dir / "nope.json"), ConfigError);
  testutil::write_text(dir / "bad.json", "{\"fmcw\": ");
  REQUIRE_THROWS_AS(parse_config(dir / "bad.json"), ConfigError);
  testutil::write_text(dir / "ok.json", R"({"workers": 3})");
  REQUIRE(parse_config(dir / "ok.json").workers == 3);
}
