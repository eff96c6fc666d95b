// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>

#include <nlohmann/json.hpp>

#include "mmsense/array_geometry.hpp"
#include "mmsense/fmcw_pointcloud.hpp"
#include "mmsense/radar_config.hpp"
#include "mmsense/scene_sim.hpp"
#include "mmsense/sfcw_tube.hpp"
#include "mmsense/tracking.hpp"

namespace mmsense::config {

/// Raised for any configuration problem; key_path names the offending entry
/// (e.g. "fmcw.loops_per_frame").
class ConfigError : public Error {
public:
  ConfigError(std::string key_path, const std::string& message)
      : Error(key_path.empty() ? message : key_path + ": " + message), key_path_(std::move(key_path)) {}
  const std::string& key_path() const { return key_path_; }

private:
  std::string key_path_;
};

struct AxisSpec {
  double start = 0;
  double step = 0.03;
  std::size_t count = 2;
  std::vector<double> samples() const { return sfcw::uniform_axis(start, step, count); }
};

struct ArraySpec {
  std::size_t tx_columns = 2;
  std::size_t tx_rows = 6;
  std::size_t rx_count = 16;
  double spacing_wavelengths = 0.5;

  ArrayGeometry build(double wavelength) const {
    return rectangular_mimo(tx_columns, tx_rows, rx_count, spacing_wavelengths * wavelength);
  }
};

struct ImagingParams {
  dsp::WindowKind window = dsp::WindowKind::hann;
  std::size_t n_fft = 512;
  sfcw::RangeInterpolation interpolation = sfcw::RangeInterpolation::nearest;
  AxisSpec x{-1.8, 0.03, 121};
  AxisSpec y{0.3, 2.0 / 67.0, 68};
  AxisSpec z{-0.99, 0.03, 67};

  sfcw::VoxelGrid grid() const { return {x.samples(), y.samples(), z.samples()}; }
};

struct TrackingConfig {
  double loading = 1e-3;
  bool clutter_removal = false;
  AxisSpec x{-1.8, 0.06, 61};
  AxisSpec z{-0.96, 0.06, 33};
  AxisSpec depths{0.5, 0.1, 19};
  tracking::TrackParams track;

  tracking::MvdrGrid grid() const { return {x.samples(), z.samples(), depths.samples()}; }
};

struct ScatterSpec {
  Vec3 position;
  Vec3 velocity;
  double amplitude = 1.0;
};

struct SkeletonSpec {
  Vec3 translation{0.0, 2.0, 0.0};
  Vec3 velocity;
  std::size_t scatterers_per_bone = 4;
  double amplitude = 1.0;
};

struct SimulationConfig {
  std::size_t frames = 1;
  std::uint64_t seed = 1;
  double noise_std = 0.0;
  double sfcw_noise_std = 0.0;
  bool range_falloff = false;
  std::vector<ScatterSpec> scatterers;
  std::optional<SkeletonSpec> skeleton;
};

struct AppConfig {
  FmcwConfig fmcw;
  SfcwConfig sfcw;
  ArraySpec fmcw_array{2, 6, 16, 0.5};
  ArraySpec sfcw_array{2, 8, 16, 0.5};
  Subarray subarray = Subarray::s12x16;
  fmcw::PointCloudParams pointcloud;
  ImagingParams imaging;
  TrackingConfig tracking;
  SimulationConfig simulation;
  std::size_t workers = 0;

  ArrayGeometry fmcw_geometry() const { return fmcw_array.build(fmcw.wavelength()); }
  ArrayGeometry sfcw_geometry() const { return sfcw_array.build(kSpeedOfLight / sfcw.start_frequency); }
};

namespace detail {

using nlohmann::json;

/// Reads keys from one JSON object, remembering which were consumed so that
/// unknown keys can be rejected afterwards.
class Section {
public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }
  bool has(const std::string& k) const { return j_.contains(k); }

  template <typename T>
  void read(const std::string& k, T& out) {
    if (!j_.contains(k)) return;
    used_.insert(k);
    const auto& v = j_.at(k);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError(key(k), "expected a boolean");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw ConfigError(key(k), "expected an integer");
        if constexpr (std::is_unsigned_v<T>)
          if (v.get<std::int64_t>() < 0) throw ConfigError(key(k), "must be >= 0");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw ConfigError(key(k), "expected a number");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError(key(k), "expected a string");
      }
      out = v.get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(key(k), e.what());
    }
  }

  void read_vec3(const std::string& k, Vec3& out) {
    if (!j_.contains(k)) return;
    used_.insert(k);
    const auto& v = j_.at(k);
    if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() || !v[2].is_number())
      throw ConfigError(key(k), "expected an array of three numbers");
    out = {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
  }

  std::optional<Section> child(const std::string& k) {
    if (!j_.contains(k)) return std::nullopt;
    used_.insert(k);
    return Section(j_.at(k), key(k));
  }

  const json& raw(const std::string& k) {
    used_.insert(k);
    return j_.at(k);
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key())) throw ConfigError(key(it.key()), "unknown key");
  }

private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

inline void require(bool ok, const std::string& path, const std::string& msg) {
  if (!ok) throw ConfigError(path, msg);
}

inline void read_axis(Section& parent, const std::string& k, AxisSpec& axis, std::size_t min_count = 2) {
  auto s = parent.child(k);
  if (!s) return;
  s->read("start", axis.start);
  s->read("step", axis.step);
  s->read("count", axis.count);
  s->finish();
  require(axis.step > 0, s->key("step"), "must be > 0");
  require(axis.count >= min_count, s->key("count"), "must be >= " + std::to_string(min_count));
}

inline void read_array(Section& parent, const std::string& k, ArraySpec& a) {
  auto s = parent.child(k);
  if (!s) return;
  s->read("tx_columns", a.tx_columns);
  s->read("tx_rows", a.tx_rows);
  s->read("rx_count", a.rx_count);
  s->read("spacing_wavelengths", a.spacing_wavelengths);
  s->finish();
  require(a.tx_columns >= 1, s->key("tx_columns"), "must be >= 1");
  require(a.tx_rows >= 1, s->key("tx_rows"), "must be >= 1");
  require(a.rx_count >= 1, s->key("rx_count"), "must be >= 1");
  require(a.spacing_wavelengths > 0, s->key("spacing_wavelengths"), "must be > 0");
}

template <typename Enum, typename Parser>
void read_enum(Section& s, const std::string& k, Enum& out, Parser parse) {
  std::string name;
  if (!s.has(k)) return;
  s.read(k, name);
  try {
    out = parse(name);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(s.key(k), e.what());
  }
}

inline sfcw::RangeInterpolation parse_interp(std::string_view n) {
  if (n == "nearest") return sfcw::RangeInterpolation::nearest;
  if (n == "linear") return sfcw::RangeInterpolation::linear;
  throw std::invalid_argument("expected 'nearest' or 'linear'");
}

}  // namespace detail

inline AppConfig parse_config_json(const nlohmann::json& j) {
  using detail::require;
  AppConfig c;
  detail::Section root(j, "");

  if (auto s = root.child("fmcw")) {
    auto& f = c.fmcw;
    s->read("start_frequency", f.start_frequency);
    s->read("slope", f.slope);
    s->read("samples_per_chirp", f.samples_per_chirp);
    s->read("sample_rate", f.sample_rate);
    s->read("loops_per_frame", f.loops_per_frame);
    s->read("chirp_interval", f.chirp_interval);
    s->read("loop_interval", f.loop_interval);
    s->read("frame_rate", f.frame_rate);
    s->finish();
    require(f.start_frequency > 0, s->key("start_frequency"), "must be > 0");
    require(f.slope > 0, s->key("slope"), "must be > 0");
    require(f.samples_per_chirp >= 1, s->key("samples_per_chirp"), "must be >= 1");
    require(f.sample_rate > 0, s->key("sample_rate"), "must be > 0");
    require(f.loops_per_frame >= 2, s->key("loops_per_frame"), "must be >= 2");
    require(f.chirp_interval > 0, s->key("chirp_interval"), "must be > 0");
    require(f.loop_interval > 0, s->key("loop_interval"), "must be > 0");
    require(f.frame_rate > 0, s->key("frame_rate"), "must be > 0");
  }
  if (auto s = root.child("sfcw")) {
    auto& f = c.sfcw;
    s->read("start_frequency", f.start_frequency);
    s->read("stop_frequency", f.stop_frequency);
    s->read("tone_count", f.tone_count);
    s->read("frame_rate", f.frame_rate);
    s->finish();
    require(f.start_frequency > 0, s->key("start_frequency"), "must be > 0");
    require(f.stop_frequency > f.start_frequency, s->key("stop_frequency"), "must exceed start_frequency");
    require(f.tone_count >= 2, s->key("tone_count"), "must be >= 2");
    require(f.frame_rate > 0, s->key("frame_rate"), "must be > 0");
  }
  detail::read_array(root, "fmcw_array", c.fmcw_array);
  detail::read_array(root, "sfcw_array", c.sfcw_array);
  detail::read_enum(root, "subarray", c.subarray, parse_subarray);

  if (auto s = root.child("pointcloud")) {
    auto& p = c.pointcloud;
    detail::read_enum(*s, "range_window", p.range_window, dsp::parse_window_kind);
    detail::read_enum(*s, "doppler_window", p.doppler_window, dsp::parse_window_kind);
    s->read("range_fft_length", p.range_fft_length);
    s->read("doppler_fft_length", p.doppler_fft_length);
    s->read("clutter_removal", p.clutter_removal);
    s->read("tdm_compensation", p.tdm_compensation);
    s->read("top_k", p.top_k);
    s->read("dynamic_range_db", p.dynamic_range_db);
    s->read("max_candidates_per_cell", p.max_candidates_per_cell);
    s->read("min_separation_cells", p.min_separation_cells);
    s->read("rd_weight", p.rd_weight);
    s->read("aoa_weight", p.aoa_weight);
    if (auto g = s->child("angle_grid")) {
      g->read("az_min_deg", p.grid.az_min_deg);
      g->read("az_max_deg", p.grid.az_max_deg);
      g->read("az_step_deg", p.grid.az_step_deg);
      g->read("el_min_deg", p.grid.el_min_deg);
      g->read("el_max_deg", p.grid.el_max_deg);
      g->read("el_step_deg", p.grid.el_step_deg);
      g->finish();
      try {
        p.grid.validate();
      } catch (const std::invalid_argument& e) {
        throw ConfigError(g->key(""), e.what());
      }
    }
    if (auto w = s->child("workspace")) {
      w->read_vec3("min", p.workspace.min);
      w->read_vec3("max", p.workspace.max);
      w->finish();
    }
    s->finish();
    require(p.top_k >= 1, s->key("top_k"), "must be >= 1");
    require(p.max_candidates_per_cell >= 1, s->key("max_candidates_per_cell"), "must be >= 1");
    require(p.dynamic_range_db >= 0, s->key("dynamic_range_db"), "must be >= 0");
    require(p.range_fft_length == 0 || p.range_fft_length >= c.fmcw.samples_per_chirp, s->key("range_fft_length"),
            "must be 0 (auto) or >= fmcw.samples_per_chirp");
    require(p.doppler_fft_length == 0 || p.doppler_fft_length >= c.fmcw.loops_per_frame, s->key("doppler_fft_length"),
            "must be 0 (auto) or >= fmcw.loops_per_frame");
  }

  if (auto s = root.child("imaging")) {
    auto& im = c.imaging;
    detail::read_enum(*s, "window", im.window, dsp::parse_window_kind);
    detail::read_enum(*s, "interpolation", im.interpolation, detail::parse_interp);
    s->read("n_fft", im.n_fft);
    detail::read_axis(*s, "x", im.x);
    detail::read_axis(*s, "y", im.y);
    detail::read_axis(*s, "z", im.z);
    s->finish();
    require(im.n_fft >= c.sfcw.tone_count, s->key("n_fft"), "must be >= sfcw.tone_count");
  }
  require(c.imaging.n_fft >= c.sfcw.tone_count, "imaging.n_fft", "must be >= sfcw.tone_count");

  if (auto s = root.child("tracking")) {
    auto& t = c.tracking;
    s->read("loading", t.loading);
    s->read("clutter_removal", t.clutter_removal);
    detail::read_axis(*s, "x", t.x, 1);
    detail::read_axis(*s, "z", t.z, 1);
    detail::read_axis(*s, "depths", t.depths, 1);
    s->read("region_fraction", t.track.region_fraction);
    s->read("alpha", t.track.alpha);
    s->read("box_size", t.track.box_side);
    s->read("neighborhood_cells", t.track.neighborhood_cells);
    if (auto cf = s->child("cfar")) {
      cf->read("window", t.track.cfar.window);
      cf->read("guard", t.track.cfar.guard);
      cf->read("rank_fraction", t.track.cfar.rank_fraction);
      cf->read("scale", t.track.cfar.scale);
      cf->finish();
      require(t.track.cfar.window > t.track.cfar.guard, cf->key("window"), "must exceed guard");
      require(t.track.cfar.rank_fraction > 0 && t.track.cfar.rank_fraction < 1, cf->key("rank_fraction"),
              "must lie in (0, 1)");
      require(t.track.cfar.scale > 0, cf->key("scale"), "must be > 0");
    }
    s->finish();
    require(t.loading >= 0, s->key("loading"), "must be >= 0");
    require(t.track.alpha > 0 && t.track.alpha <= 1, s->key("alpha"), "must lie in (0, 1]");
    require(t.track.region_fraction > 0 && t.track.region_fraction <= 1, s->key("region_fraction"),
            "must lie in (0, 1]");
    require(t.track.box_side > 0, s->key("box_size"), "must be > 0");
  }

  if (auto s = root.child("simulation")) {
    auto& sim = c.simulation;
    s->read("frames", sim.frames);
    s->read("seed", sim.seed);
    s->read("noise_std", sim.noise_std);
    s->read("sfcw_noise_std", sim.sfcw_noise_std);
    s->read("range_falloff", sim.range_falloff);
    require(sim.frames >= 1, s->key("frames"), "must be >= 1");
    require(sim.noise_std >= 0, s->key("noise_std"), "must be >= 0");
    require(sim.sfcw_noise_std >= 0, s->key("sfcw_noise_std"), "must be >= 0");
    if (s->has("scatterers")) {
      const auto& arr = s->raw("scatterers");
      require(arr.is_array(), s->key("scatterers"), "expected an array");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        detail::Section e(arr[i], s->key("scatterers[" + std::to_string(i) + "]"));
        ScatterSpec sc;
        e.read_vec3("position", sc.position);
        e.read_vec3("velocity", sc.velocity);
        e.read("amplitude", sc.amplitude);
        e.finish();
        require(sc.amplitude >= 0, e.key("amplitude"), "must be >= 0");
        sim.scatterers.push_back(sc);
      }
    }
    if (auto sk = s->child("skeleton")) {
      SkeletonSpec spec;
      sk->read_vec3("translation", spec.translation);
      sk->read_vec3("velocity", spec.velocity);
      sk->read("scatterers_per_bone", spec.scatterers_per_bone);
      sk->read("amplitude", spec.amplitude);
      sk->finish();
      require(spec.scatterers_per_bone >= 1, sk->key("scatterers_per_bone"), "must be >= 1");
      require(spec.amplitude >= 0, sk->key("amplitude"), "must be >= 0");
      sim.skeleton = spec;
    }
    s->finish();
  }
  root.read("workers", c.workers);
  root.finish();
  return c;
}

inline AppConfig parse_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("", "cannot open config file '" + path.string() + "'");
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("", "malformed JSON in '" + path.string() + "': " + e.what());
  }
  return parse_config_json(j);
}

inline nlohmann::json to_json(const AppConfig& c) {
  using nlohmann::json;
  auto vec = [](const Vec3& v) { return json::array({v.x, v.y, v.z}); };
  auto axis = [](const AxisSpec& a) { return json{{"start", a.start}, {"step", a.step}, {"count", a.count}}; };
  auto arr = [](const ArraySpec& a) {
    return json{{"tx_columns", a.tx_columns}, {"tx_rows", a.tx_rows}, {"rx_count", a.rx_count},
                {"spacing_wavelengths", a.spacing_wavelengths}};
  };
  json j;
  j["fmcw"] = {{"start_frequency", c.fmcw.start_frequency}, {"slope", c.fmcw.slope},
               {"samples_per_chirp", c.fmcw.samples_per_chirp}, {"sample_rate", c.fmcw.sample_rate},
               {"loops_per_frame", c.fmcw.loops_per_frame}, {"chirp_interval", c.fmcw.chirp_interval},
               {"loop_interval", c.fmcw.loop_interval}, {"frame_rate", c.fmcw.frame_rate}};
  j["sfcw"] = {{"start_frequency", c.sfcw.start_frequency}, {"stop_frequency", c.sfcw.stop_frequency},
               {"tone_count", c.sfcw.tone_count}, {"frame_rate", c.sfcw.frame_rate}};
  j["fmcw_array"] = arr(c.fmcw_array);
  j["sfcw_array"] = arr(c.sfcw_array);
  j["subarray"] = std::string(to_string(c.subarray));
  const auto& p = c.pointcloud;
  j["pointcloud"] = {{"range_window", std::string(dsp::to_string(p.range_window))},
                     {"doppler_window", std::string(dsp::to_string(p.doppler_window))},
                     {"range_fft_length", p.range_fft_length},
                     {"doppler_fft_length", p.doppler_fft_length},
                     {"clutter_removal", p.clutter_removal},
                     {"tdm_compensation", p.tdm_compensation},
                     {"top_k", p.top_k},
                     {"dynamic_range_db", p.dynamic_range_db},
                     {"max_candidates_per_cell", p.max_candidates_per_cell},
                     {"min_separation_cells", p.min_separation_cells},
                     {"rd_weight", p.rd_weight},
                     {"aoa_weight", p.aoa_weight},
                     {"angle_grid",
                      {{"az_min_deg", p.grid.az_min_deg}, {"az_max_deg", p.grid.az_max_deg},
                       {"az_step_deg", p.grid.az_step_deg}, {"el_min_deg", p.grid.el_min_deg},
                       {"el_max_deg", p.grid.el_max_deg}, {"el_step_deg", p.grid.el_step_deg}}},
                     {"workspace", {{"min", vec(p.workspace.min)}, {"max", vec(p.workspace.max)}}}};
  j["imaging"] = {{"window", std::string(dsp::to_string(c.imaging.window))},
                  {"interpolation", c.imaging.interpolation == sfcw::RangeInterpolation::nearest ? "nearest" : "linear"},
                  {"n_fft", c.imaging.n_fft},
                  {"x", axis(c.imaging.x)},
                  {"y", axis(c.imaging.y)},
                  {"z", axis(c.imaging.z)}};
  const auto& t = c.tracking;
  j["tracking"] = {{"loading", t.loading},
                   {"clutter_removal", t.clutter_removal},
                   {"x", axis(t.x)},
                   {"z", axis(t.z)},
                   {"depths", axis(t.depths)},
                   {"region_fraction", t.track.region_fraction},
                   {"alpha", t.track.alpha},
                   {"box_size", t.track.box_side},
                   {"neighborhood_cells", t.track.neighborhood_cells},
                   {"cfar",
                    {{"window", t.track.cfar.window}, {"guard", t.track.cfar.guard},
                     {"rank_fraction", t.track.cfar.rank_fraction}, {"scale", t.track.cfar.scale}}}};
  json sim = {{"frames", c.simulation.frames},
              {"seed", c.simulation.seed},
              {"noise_std", c.simulation.noise_std},
              {"sfcw_noise_std", c.simulation.sfcw_noise_std},
              {"range_falloff", c.simulation.range_falloff},
              {"scatterers", json::array()}};
  for (const auto& s : c.simulation.scatterers)
    sim["scatterers"].push_back({{"position", vec(s.position)}, {"velocity", vec(s.velocity)}, {"amplitude", s.amplitude}});
  if (c.simulation.skeleton) {
    const auto& s = *c.simulation.skeleton;
    sim["skeleton"] = {{"translation", vec(s.translation)}, {"velocity", vec(s.velocity)},
                       {"scatterers_per_bone", s.scatterers_per_bone}, {"amplitude", s.amplitude}};
  }
  j["simulation"] = sim;
  j["workers"] = c.workers;
  return j;
}

/// 64-bit FNV-1a of the canonical (fully defaulted) config dump.
inline std::uint64_t config_hash(const AppConfig& c) {
  const std::string text = to_json(c).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace mmsense::config
