// SPDX-License-Identifier: Apache-2.0
// mmsense: simulate raw radar frames and run the preprocessing pipelines.

#include <cstdio>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mmsense/body_io.hpp"
#include "mmsense/config.hpp"
#include "mmsense/frame_file.hpp"
#include "mmsense/splits.hpp"

#ifndef MMSENSE_VERSION
#define MMSENSE_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mmsense;

namespace {

/// Tracks everything a command creates so a failed run leaves nothing behind.
class OutputGuard {
public:
  ~OutputGuard() {
    if (committed_) return;
    std::error_code ec;
    for (auto it = created_.rbegin(); it != created_.rend(); ++it) fs::remove_all(*it, ec);
  }

  void directory(const fs::path& dir) {
    std::vector<fs::path> fresh;
    for (fs::path p = fs::absolute(dir); !p.empty() && !fs::exists(p); p = p.parent_path()) fresh.push_back(p);
    fs::create_directories(dir);
    for (auto it = fresh.rbegin(); it != fresh.rend(); ++it) created_.push_back(*it);
  }

  fs::path file(const fs::path& path) {
    std::lock_guard lock(mutex_);
    if (!path.parent_path().empty() && !fs::exists(path.parent_path())) directory(path.parent_path());
    if (!fs::exists(path)) created_.push_back(path);
    return path;
  }

  void commit() { committed_ = true; }

private:
  std::vector<fs::path> created_;
  std::mutex mutex_;
  bool committed_ = false;
};

std::string frame_name(std::size_t i) {
  std::ostringstream os;
  os << "frame_" << std::setw(6) << std::setfill('0') << i << ".dghm";
  return os.str();
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error("cannot open '" + path.string() + "' for writing");
  os << j.dump(2) << '\n';
  if (!os) throw Error("write to '" + path.string() + "' failed");
}

void write_provenance(OutputGuard& guard, const fs::path& path, const std::string& command,
                      const config::AppConfig& cfg, const json& extra = json::object()) {
  json j{{"command", command},
         {"version", MMSENSE_VERSION},
         {"config_hash", hex64(config::config_hash(cfg))},
         {"seed", cfg.simulation.seed},
         {"config", config::to_json(cfg)}};
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  write_json(guard.file(path), j);
}

/// Sorted frame files of one modality directory.
std::vector<fs::path> list_frames(const fs::path& dir, std::size_t limit) {
  if (!fs::is_directory(dir)) throw Error("input directory '" + dir.string() + "' does not exist");
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".dghm") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  if (limit && out.size() > limit) out.resize(limit);
  if (out.empty()) throw Error("no .dghm frames in '" + dir.string() + "'");
  return out;
}

std::size_t frame_index_of(const fs::path& p) {
  const auto stem = p.stem().string();
  const auto pos = stem.find_last_of('_');
  try {
    return static_cast<std::size_t>(std::stoull(stem.substr(pos == std::string::npos ? 0 : pos + 1)));
  } catch (const std::exception&) {
    throw Error("cannot parse frame index from file name '" + p.string() + "'");
  }
}

RadarCube load_cube(const fs::path& path, const config::AppConfig& cfg, const ArrayGeometry& full) {
  RadarCube cube;
  cube.data = io::read_complex_tensor(path, io::FrameKind::fmcw_cube);
  cube.config = cfg.fmcw;
  cube.frame_index = frame_index_of(path);
  cube.tx_slots = full.tx_selected;
  const auto& s = cube.data.shape();
  if (s.size() != 4 || s[0] != full.tx_count() || s[1] != full.rx_count() || s[2] != cfg.fmcw.loops_per_frame ||
      s[3] != cfg.fmcw.samples_per_chirp)
    throw io::FormatError(path.string() + ": cube dims do not match the configured array and chirp (expected (" +
                          std::to_string(full.tx_count()) + ", " + std::to_string(full.rx_count()) + ", " +
                          std::to_string(cfg.fmcw.loops_per_frame) + ", " +
                          std::to_string(cfg.fmcw.samples_per_chirp) + "))");
  return cube;
}

std::vector<sim::Scatterer> scene_at(const config::AppConfig& cfg, double t) {
  std::vector<sim::Scatterer> out;
  for (const auto& s : cfg.simulation.scatterers) out.push_back({s.position + s.velocity * t, s.velocity, s.amplitude});
  if (cfg.simulation.skeleton) {
    const auto& spec = *cfg.simulation.skeleton;
    auto skel = sim::default_skeleton(spec.translation + spec.velocity * t);
    skel.velocity = spec.velocity;
    skel.scatterers_per_bone = spec.scatterers_per_bone;
    const auto pts = sim::skeleton_to_scatterers(skel, spec.amplitude);
    out.insert(out.end(), pts.begin(), pts.end());
  }
  return out;
}

void emit_warning(const std::string& message) {
  static std::mutex m;
  std::lock_guard lock(m);
  std::cerr << json{{"warning", message}}.dump() << '\n';
}

// ---------------------------------------------------------------- commands

struct Common {
  std::string config_path;
  std::string out;
  std::size_t frames = 0;
  std::optional<std::uint64_t> seed;
  std::string subarray;
};

config::AppConfig load_config(const Common& c) {
  auto cfg = c.config_path.empty() ? config::AppConfig{} : config::parse_config(c.config_path);
  if (c.seed) cfg.simulation.seed = *c.seed;
  if (c.frames) cfg.simulation.frames = c.frames;
  if (!c.subarray.empty()) {
    try {
      cfg.subarray = parse_subarray(c.subarray);
    } catch (const std::invalid_argument& e) {
      throw config::ConfigError("--subarray", e.what());
    }
  }
  return cfg;
}

void cmd_simulate(const Common& c, const std::string& modality) {
  const auto cfg = load_config(c);
  if (modality != "fmcw" && modality != "sfcw" && modality != "both")
    throw config::ConfigError("--modality", "expected fmcw, sfcw or both");
  const bool do_fmcw = modality != "sfcw", do_sfcw = modality != "fmcw";
  OutputGuard guard;
  const fs::path out(c.out);
  guard.directory(out);
  const auto fgeo = cfg.fmcw_geometry();
  const auto sgeo = cfg.sfcw_geometry();
  const std::size_t n = cfg.simulation.frames;
  if (do_fmcw) guard.directory(out / "fmcw");
  if (do_sfcw) guard.directory(out / "sfcw");

  parallel_for(
      n,
      [&](std::size_t i) {
        if (do_fmcw) {
          const auto scene = scene_at(cfg, 0.0);
          sim::FmcwSimOptions opt{{cfg.simulation.noise_std, cfg.simulation.seed}, cfg.simulation.range_falloff};
          const auto cube = sim::synth_fmcw_frame(scene, cfg.fmcw, fgeo, i, opt);
          for (const auto& w : cube.warnings) emit_warning("frame " + std::to_string(i) + ": " + w);
          io::write_complex_tensor(guard.file(out / "fmcw" / frame_name(i)), io::FrameKind::fmcw_cube, cube.data);
        }
        if (do_sfcw) {
          const auto scene = scene_at(cfg, static_cast<double>(i) / cfg.sfcw.frame_rate);
          const auto resp = sim::synth_sfcw_frame(scene, cfg.sfcw, sgeo,
                                                  {cfg.simulation.sfcw_noise_std, cfg.simulation.seed}, i);
          io::write_complex_tensor(guard.file(out / "sfcw" / frame_name(i)), io::FrameKind::sfcw_response, resp.data);
        }
      },
      cfg.workers);

  if (cfg.simulation.skeleton) {
    std::vector<io::BodyRecord> bodies;
    const auto& spec = *cfg.simulation.skeleton;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / cfg.fmcw.frame_rate;
      const auto skel = sim::default_skeleton(spec.translation + spec.velocity * t);
      io::BodyRecord r;
      r.frame = i;
      const auto joints = skel.world_joints();
      for (std::size_t j = 0; j < joints.size(); ++j) r.body.joints[j] = {joints[j].x, joints[j].y, joints[j].z};
      r.body.translation = {skel.translation.x, skel.translation.y, skel.translation.z};
      bodies.push_back(std::move(r));
    }
    io::write_bodies(guard.file(out / "bodies.jsonl"), bodies);
  }
  write_provenance(guard, out / "provenance.json", "simulate", cfg, {{"frames", n}, {"modality", modality}});
  guard.commit();
}

void cmd_fmcw_pc(const Common& c, const std::string& input) {
  const auto cfg = load_config(c);
  const auto files = list_frames(fs::path(input) / "fmcw", c.frames);
  const auto full = cfg.fmcw_geometry();
  const auto sub = full.select(cfg.subarray);
  const fmcw::PointCloudGenerator gen(sub, cfg.fmcw, cfg.pointcloud);
  OutputGuard guard;
  const fs::path out(c.out);
  guard.directory(out / "points");
  std::vector<std::size_t> valid(files.size());
  parallel_for(
      files.size(),
      [&](std::size_t i) {
        const auto cube = fmcw::extract_channels(load_cube(files[i], cfg, full), full, sub);
        const auto res = gen.run(cube);
        Tensor<float> t({fmcw::kPointsPerFrame, fmcw::kPointFeatures});
        for (std::size_t r = 0; r < fmcw::kPointsPerFrame; ++r)
          for (std::size_t k = 0; k < fmcw::kPointFeatures; ++k) t(r, k) = static_cast<float>(res.frame.rows[r][k]);
        valid[i] = res.frame.valid_count;
        io::write_float_tensor(guard.file(out / "points" / frame_name(frame_index_of(files[i]))),
                               io::FrameKind::point_frames, t);
      },
      cfg.workers);
  std::ofstream meta(guard.file(out / "points_meta.jsonl"), std::ios::trunc);
  for (std::size_t i = 0; i < files.size(); ++i)
    meta << json{{"frame", frame_index_of(files[i])}, {"valid_count", valid[i]}}.dump() << '\n';
  meta.close();
  if (!meta) throw Error("write to points_meta.jsonl failed");
  write_provenance(guard, out / "provenance.json", "fmcw-pc", cfg,
                   {{"subarray", std::string(to_string(cfg.subarray))}, {"frames", files.size()}});
  guard.commit();
}

void cmd_track(const Common& c, const std::string& input) {
  const auto cfg = load_config(c);
  const auto files = list_frames(fs::path(input) / "fmcw", c.frames);
  const auto full = cfg.fmcw_geometry();
  const auto sub = full.select(cfg.subarray);
  const auto grid = cfg.tracking.grid();
  const double bin = cfg.fmcw.range_bin_spacing(cfg.pointcloud.range_bins(cfg.fmcw));
  std::vector<tracking::Heatmap> maps(files.size());
  parallel_for(
      files.size(),
      [&](std::size_t i) {
        const auto cube = fmcw::extract_channels(load_cube(files[i], cfg, full), full, sub);
        auto xr = fmcw::range_fft(cube, cfg.pointcloud);
        if (cfg.tracking.clutter_removal) fmcw::remove_static_clutter(xr);
        maps[i] = tracking::mvdr_heatmap(xr, sub, cfg.fmcw, grid, cfg.tracking.loading, bin);
      },
      cfg.workers);
  OutputGuard guard;
  const fs::path out(c.out);
  std::ofstream os(guard.file(out), std::ios::trunc);
  if (!os) throw Error("cannot open '" + out.string() + "' for writing");
  tracking::TrackState state;
  for (std::size_t i = 0; i < files.size(); ++i) {
    const auto step = tracking::track_frame(state, maps[i], cfg.tracking.track);
    state = step.state;
    os << json{{"frame", frame_index_of(files[i])},
               {"x", step.bbox.x},
               {"z", step.bbox.z},
               {"B", step.bbox.side},
               {"coasting", step.coasting}}
              .dump()
       << '\n';
  }
  os.close();
  if (!os) throw Error("write to '" + out.string() + "' failed");
  write_provenance(guard, fs::path(out.string() + ".provenance.json"), "track", cfg, {{"frames", files.size()}});
  guard.commit();
}

std::map<std::size_t, sfcw::BBox> read_boxes(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open bbox stream '" + path.string() + "'");
  std::map<std::size_t, sfcw::BBox> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(lineno);
    try {
      const auto j = json::parse(line);
      out[j.at("frame").get<std::size_t>()] = {j.at("x").get<double>(), j.at("z").get<double>(), j.at("B").get<double>()};
    } catch (const json::exception& e) {
      throw io::FormatError(where + ": invalid bbox record (" + e.what() + ")");
    }
  }
  return out;
}

void cmd_sfcw_tube(const Common& c, const std::string& input, const std::string& boxes_path) {
  const auto cfg = load_config(c);
  const auto files = list_frames(fs::path(input) / "sfcw", c.frames);
  const auto boxes_by_frame = read_boxes(boxes_path);
  const auto geo = cfg.sfcw_geometry();
  const auto grid = cfg.imaging.grid();
  std::vector<sfcw::BBox> boxes;
  for (const auto& f : files) {
    const auto idx = frame_index_of(f);
    const auto it = boxes_by_frame.find(idx);
    if (it == boxes_by_frame.end())
      throw Error(boxes_path + ": no bbox for frame " + std::to_string(idx) + " (" + f.string() + ")");
    boxes.push_back(it->second);
  }
  std::vector<Tensor<double>> volumes(files.size());
  parallel_for(
      files.size(),
      [&](std::size_t i) {
        FrequencyResponse resp;
        resp.config = cfg.sfcw;
        resp.data = io::read_complex_tensor(files[i], io::FrameKind::sfcw_response);
        if (resp.data.rank() != 2 || resp.data.dim(0) != geo.channel_count() || resp.data.dim(1) != cfg.sfcw.tone_count)
          throw io::FormatError(files[i].string() + ": response dims do not match the configured array and tone plan");
        const auto prof = sfcw::range_profiles(resp, cfg.imaging.window, cfg.imaging.n_fft);
        volumes[i] = sfcw::magnitude(sfcw::backproject(prof, grid, geo, cfg.sfcw, cfg.imaging.interpolation));
      },
      cfg.workers);
  const auto tube = sfcw::crop_tube(volumes, grid, boxes);
  OutputGuard guard;
  const fs::path out(c.out);
  guard.directory(out);
  io::write_float_tensor(guard.file(out / "tube.dghm"), io::FrameKind::tube, tube.volumes);
  json centers = json::array();
  for (const auto& [x, z] : tube.crop_centers) centers.push_back({x, z});
  json frames = json::array();
  for (const auto& f : files) frames.push_back(frame_index_of(f));
  write_json(guard.file(out / "tube.json"), {{"frames", frames},
                                             {"shape", tube.volumes.shape()},
                                             {"x_axis", tube.x_axis},
                                             {"y_axis", tube.y_axis},
                                             {"z_axis", tube.z_axis},
                                             {"x_roi", {tube.x_roi.begin, tube.x_roi.end}},
                                             {"z_roi", {tube.z_roi.begin, tube.z_roi.end}},
                                             {"crop_centers", centers}});
  write_provenance(guard, out / "provenance.json", "sfcw-tube", cfg, {{"frames", files.size()}});
  guard.commit();
}

json record_json(const metrics::MetricsRecord& r) {
  return {{"mpjpe_cm", r.mpjpe_cm},
          {"mve_cm", r.mve_cm ? json(*r.mve_cm) : json(nullptr)},
          {"mre_deg", r.mre_deg},
          {"mle_cm", r.mle_cm}};
}

void cmd_eval(const Common& c, const std::string& pred_path, const std::string& gt_path) {
  const auto cfg = load_config(c);
  const auto pred = io::read_bodies(pred_path);
  const auto gt = io::read_bodies(gt_path);
  if (gt.empty()) throw Error(gt_path + ": no body frames");
  std::map<std::pair<std::string, std::size_t>, const metrics::BodyFrame*> by_key;
  for (const auto& p : pred) by_key[{p.sequence, p.frame}] = &p.body;
  std::vector<metrics::MetricsRecord> records;
  std::map<std::string, std::vector<metrics::MetricsRecord>> by_sequence;
  for (const auto& g : gt) {
    const auto it = by_key.find({g.sequence, g.frame});
    if (it == by_key.end())
      throw Error(pred_path + ": no prediction for frame " + std::to_string(g.frame) +
                  (g.sequence.empty() ? "" : " of sequence '" + g.sequence + "'"));
    records.push_back(metrics::evaluate(*it->second, g.body));
    by_sequence[g.sequence].push_back(records.back());
  }
  std::vector<metrics::MetricsRecord> sequence_means;
  json per_sequence = json::object();
  for (const auto& [name, recs] : by_sequence) {
    sequence_means.push_back(metrics::aggregate(recs));
    per_sequence[name] = record_json(sequence_means.back());
  }
  OutputGuard guard;
  const fs::path out(c.out);
  guard.directory(out);
  std::ofstream csv(guard.file(out / "metrics.csv"), std::ios::trunc);
  csv << std::fixed << std::setprecision(6);
  metrics::write_csv(csv, records);
  csv.close();
  if (!csv) throw Error("write to metrics.csv failed");
  const auto mean = metrics::aggregate(records);
  write_json(guard.file(out / "summary.json"), {{"frames", records.size()},
                                                {"sequences", by_sequence.size()},
                                                {"frame_mean", record_json(mean)},
                                                {"sequence_mean", record_json(metrics::aggregate(sequence_means))},
                                                {"per_sequence", per_sequence}});
  write_provenance(guard, out / "provenance.json", "eval", cfg, {{"pred", pred_path}, {"gt", gt_path}});
  guard.commit();
}

void cmd_splits(const Common& c, const std::string& manifest_path, const std::string& setting, std::optional<int> fold) {
  const auto cfg = load_config(c);
  splits::DatasetManifest manifest;
  if (manifest_path.empty()) {
    manifest = splits::canonical_manifest();
  } else {
    std::ifstream is(manifest_path);
    if (!is) throw Error("cannot open manifest '" + manifest_path + "'");
    json j;
    try {
      is >> j;
    } catch (const json::parse_error& e) {
      throw splits::SplitError(manifest_path + ": malformed JSON (" + e.what() + ")");
    }
    manifest = splits::manifest_from_json(j);
  }
  splits::SplitSpec spec;
  try {
    spec.setting = splits::parse_setting(setting);
  } catch (const std::invalid_argument& e) {
    throw config::ConfigError("--setting", e.what());
  }
  spec.fold = fold;
  if (spec.setting == splits::Setting::subarray) spec.subarray = cfg.subarray;
  const auto split = splits::make_splits(manifest, spec);
  OutputGuard guard;
  const fs::path out(c.out);
  write_json(guard.file(out), splits::to_json(split));
  write_provenance(guard, fs::path(out.string() + ".provenance.json"), "splits", cfg,
                   {{"manifest", manifest_path.empty() ? json("canonical") : json(manifest_path)}});
  guard.commit();
}

std::string error_type(const std::exception& e) {
  if (dynamic_cast<const config::ConfigError*>(&e)) return "ConfigError";
  if (dynamic_cast<const io::BadMagicError*>(&e)) return "BadMagicError";
  if (dynamic_cast<const io::TruncatedError*>(&e)) return "TruncatedError";
  if (dynamic_cast<const io::UnknownDtypeError*>(&e)) return "UnknownDtypeError";
  if (dynamic_cast<const io::UnknownKindError*>(&e)) return "UnknownKindError";
  if (dynamic_cast<const io::UnsupportedVersionError*>(&e)) return "UnsupportedVersionError";
  if (dynamic_cast<const io::KindMismatchError*>(&e)) return "KindMismatchError";
  if (dynamic_cast<const io::FormatError*>(&e)) return "FormatError";
  if (dynamic_cast<const io::BodyFormatError*>(&e)) return "BodyFormatError";
  if (dynamic_cast<const splits::SplitError*>(&e)) return "SplitError";
  if (dynamic_cast<const Error*>(&e)) return "Error";
  if (dynamic_cast<const std::invalid_argument*>(&e)) return "InvalidArgument";
  return "InternalError";
}

int report(const std::string& command, const std::exception& e) {
  json rec{{"command", command}, {"type", error_type(e)}, {"message", e.what()}};
  if (const auto* ce = dynamic_cast<const config::ConfigError*>(&e); ce && !ce->key_path().empty())
    rec["key_path"] = ce->key_path();
  std::cerr << json{{"error", rec}}.dump() << '\n';
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mmWave radar sensing toolkit: simulation and preprocessing pipelines"};
  app.set_version_flag("--version", std::string(MMSENSE_VERSION));
  app.require_subcommand(1);

  Common common;
  std::string input, modality = "both", boxes, pred, gt, manifest, setting = "base";
  std::optional<int> fold;
  std::uint64_t seed = 0;

  auto add_config = [&](CLI::App* s) { s->add_option("--config", common.config_path, "JSON config file")->check(CLI::ExistingFile); };
  auto add_frames = [&](CLI::App* s) { s->add_option("--frames", common.frames, "number of frames (0 = all / config)"); };
  auto add_subarray = [&](CLI::App* s) { s->add_option("--subarray", common.subarray, "3x4, 6x8 or 12x16"); };

  auto* sim = app.add_subcommand("simulate", "synthesize raw FMCW cubes, SFCW responses and ground truth");
  add_config(sim);
  add_frames(sim);
  sim->add_option("--seed", seed, "noise seed");
  sim->add_option("--out", common.out, "output directory")->required();
  sim->add_option("--modality", modality, "fmcw, sfcw or both");

  auto* pc = app.add_subcommand("fmcw-pc", "FMCW point-cloud frames from raw cubes");
  add_config(pc);
  add_frames(pc);
  add_subarray(pc);
  pc->add_option("--input", input, "directory holding fmcw/ frames")->required();
  pc->add_option("--out", common.out, "output directory")->required();

  auto* tr = app.add_subcommand("track", "MVDR / OS-CFAR tracking to a bbox JSON-lines stream");
  add_config(tr);
  add_frames(tr);
  add_subarray(tr);
  tr->add_option("--input", input, "directory holding fmcw/ frames")->required();
  tr->add_option("--out", common.out, "bbox JSON-lines file")->required();

  auto* tb = app.add_subcommand("sfcw-tube", "back-projected imaging tube cropped by a bbox stream");
  add_config(tb);
  add_frames(tb);
  tb->add_option("--input", input, "directory holding sfcw/ frames")->required();
  tb->add_option("--boxes", boxes, "bbox JSON-lines from track")->required()->check(CLI::ExistingFile);
  tb->add_option("--out", common.out, "output directory")->required();

  auto* ev = app.add_subcommand("eval", "MPJPE / MVE / MRE / MLE metrics");
  add_config(ev);
  ev->add_option("--pred", pred, "predicted body frames (JSON-lines)")->required()->check(CLI::ExistingFile);
  ev->add_option("--gt", gt, "ground-truth body frames (JSON-lines)")->required()->check(CLI::ExistingFile);
  ev->add_option("--out", common.out, "output directory")->required();

  auto* sp = app.add_subcommand("splits", "benchmark train/test split manifest");
  add_config(sp);
  add_subarray(sp);
  sp->add_option("--manifest", manifest, "dataset manifest JSON (default: canonical)")->check(CLI::ExistingFile);
  sp->add_option("--setting", setting, "base, cross_subject, cross_position, cross_orientation, subarray");
  sp->add_option("--fold", fold, "fold 1-3 for cross_position / cross_orientation");
  sp->add_option("--out", common.out, "output JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << json{{"error", {{"type", "UsageError"}, {"message", e.what()}}}}.dump() << '\n';
    return 2;
  }
  if (sim->parsed() && sim->count("--seed")) common.seed = seed;

  std::string command = app.get_subcommands().front()->get_name();
  try {
    if (command == "simulate") cmd_simulate(common, modality);
    else if (command == "fmcw-pc") cmd_fmcw_pc(common, input);
    else if (command == "track") cmd_track(common, input);
    else if (command == "sfcw-tube") cmd_sfcw_tube(common, input, boxes);
    else if (command == "eval") cmd_eval(common, pred, gt);
    else if (command == "splits") cmd_splits(common, manifest, setting, fold);
  } catch (const std::exception& e) {
    return report(command, e);
  }
  return 0;
}
