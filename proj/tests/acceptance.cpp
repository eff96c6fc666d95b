// SPDX-License-Identifier: Apache-2.0
// Acceptance runner: one PASS/FAIL line per criterion, each checked against
// its tolerance and wall-clock budget. Exit status is nonzero on any failure.

#include <algorithm>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <tuple>

#include "helpers.hpp"
#include "mmsense/fmcw_pointcloud.hpp"
#include "mmsense/frame_file.hpp"
#include "mmsense/metrics.hpp"
#include "mmsense/scene_sim.hpp"
#include "mmsense/sfcw_tube.hpp"
#include "mmsense/splits.hpp"
#include "mmsense/tracking.hpp"
#include "oracles.hpp"

using namespace mmsense;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

class Check {
public:
  void expect(bool cond, const std::string& what) {
    if (!cond && out_.ok) {
      out_.ok = false;
      out_.detail = what;
    }
  }
  void note(const std::string& s) {
    if (out_.ok) out_.detail = s;
  }
  Outcome result() const { return out_; }

private:
  Outcome out_;
};

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------- 1
Outcome dft_oracle() {
  Check c;
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<std::size_t> len(8, 256);
  double worst = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = len(rng);
    const auto x = testutil::random_signal(rng, n);
    const auto fwd = dsp::dft_forward(x, n);
    const double ef = testutil::relative_error(fwd, oracle::direct_dft(x, n, -1));
    auto inv_ref = oracle::direct_dft(x, n, +1);
    for (auto& v : inv_ref) v /= static_cast<double>(n);
    const double ei = testutil::relative_error(dsp::dft_inverse(x, n), inv_ref);
    worst = std::max({worst, ef, ei});
  }
  c.expect(worst <= 1e-6, fmt("max relative error %.3g > 1e-6", worst));
  c.note(fmt("100 lengths in [8, 256], max relative error %.2e", worst));
  return c.result();
}

// ---------------------------------------------------------------- 2
Outcome rd_map_oracle() {
  Check c;
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<std::size_t> d(1, 12);
  double worst = 0;
  for (int t = 0; t < 20; ++t) {
    const auto xd = testutil::random_tensor(rng, {d(rng), d(rng), 2 * d(rng), 4 * d(rng)});
    const auto map = fmcw::rd_energy_map(xd);
    const auto want = oracle::triple_sum_energy(xd);
    for (std::size_t m = 0; m < want.size(); ++m)
      for (std::size_t k = 0; k < want[m].size(); ++k)
        worst = std::max(worst, std::abs(map.energy(m, k) - want[m][k]) / want[m][k]);
  }
  c.expect(worst <= 1e-9, fmt("max relative error %.3g > 1e-9", worst));
  c.note(fmt("20 random tensors, max relative error %.2e", worst));
  return c.result();
}

// ---------------------------------------------------------------- 3 / 13
struct StaticScene {
  double range, az, el;
};

std::vector<StaticScene> static_scenes() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<StaticScene> out;
  for (int i = 0; i < 50; ++i) {
    const double r = 1 + 3 * u(rng), az = deg2rad(-50 + 100 * u(rng)), el = deg2rad(-30 + 60 * u(rng));
    out.push_back({r, az, el});
  }
  return out;
}

Outcome fmcw_localization() {
  Check c;
  const FmcwConfig cfg;
  const auto array = default_fmcw_array(cfg.wavelength());
  const double dr = cfg.range_resolution(), dv = cfg.velocity_resolution();
  c.expect(std::abs(dr - 0.043) <= 0.001, fmt("range resolution %.4f m", dr));
  c.expect(std::abs(dv - 0.035) <= 0.001, fmt("velocity resolution %.4f m/s", dv));

  fmcw::PointCloudParams still;
  still.clutter_removal = false;
  const fmcw::PointCloudGenerator gen_static(array, cfg, still);
  int hits = 0;
  const auto scenes = static_scenes();
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const auto& s = scenes[i];
    const sim::Scatterer sc{fmcw::look_direction(s.az, s.el) * s.range, {}, 1.0};
    const auto res = gen_static.run(sim::synth_fmcw_frame(std::span(&sc, 1), cfg, array, i));
    const auto& row = res.frame.rows[0];
    const double r = row[5];
    const double az = rad2deg(std::atan2(row[0], row[1])), el = rad2deg(std::asin(row[2] / r));
    const bool ok = std::abs(r - s.range) <= dr / 2 && std::abs(az - rad2deg(s.az)) <= 1.0 + 1e-9 &&
                    std::abs(el - rad2deg(s.el)) <= 2.0 + 1e-9;
    hits += ok;
  }
  c.expect(hits == 50, fmt("static scenes localized %d/50", hits));

  const fmcw::PointCloudGenerator gen_moving(array, cfg, {});
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0, 1);
  int vhits = 0;
  for (int i = 0; i < 20; ++i) {
    const double r = 1 + 3 * u(rng), az = deg2rad(-50 + 100 * u(rng)), el = deg2rad(-30 + 60 * u(rng));
    double v = 0.2 + 0.8 * u(rng);
    if (u(rng) < 0.5) v = -v;
    const Vec3 dir = fmcw::look_direction(az, el);
    const sim::Scatterer sc{dir * r, dir * v, 1.0};
    const auto res = gen_moving.run(sim::synth_fmcw_frame(std::span(&sc, 1), cfg, array, 0));
    vhits += std::abs(res.frame.rows[0][3] - v) <= dv / 2;
  }
  c.expect(vhits == 20, fmt("moving targets within v_res/2: %d/20", vhits));
  c.note(fmt("dR %.2f cm, v_res %.2f cm/s, static %d/50, moving %d/20", 100 * dr, 100 * dv, hits, vhits));
  return c.result();
}

Outcome subarray_trend() {
  Check c;
  const FmcwConfig cfg;
  const auto full = default_fmcw_array(cfg.wavelength());
  fmcw::PointCloudParams p;
  p.clutter_removal = false;
  const Subarray presets[3] = {Subarray::s3x4, Subarray::s6x8, Subarray::s12x16};
  std::vector<ArrayGeometry> subs;
  std::vector<fmcw::PointCloudGenerator> gens;
  for (auto s : presets) {
    subs.push_back(full.select(s));
    gens.emplace_back(subs.back(), cfg, p);
  }
  double err[3] = {0, 0, 0};
  const auto scenes = static_scenes();
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const auto& s = scenes[i];
    const sim::Scatterer sc{fmcw::look_direction(s.az, s.el) * s.range, {}, 1.0};
    const auto cube = sim::synth_fmcw_frame(std::span(&sc, 1), cfg, full, i);
    for (int k = 0; k < 3; ++k) {
      const auto& row = gens[k].run(fmcw::extract_channels(cube, full, subs[k])).frame.rows[0];
      const double az = std::atan2(row[0], row[1]), el = std::asin(row[2] / row[5]);
      err[k] += std::hypot(rad2deg(az - s.az), rad2deg(el - s.el)) / static_cast<double>(scenes.size());
    }
  }
  c.expect(err[1] <= err[0] && err[2] <= err[1], fmt("errors not non-increasing: %.3f %.3f %.3f", err[0], err[1], err[2]));
  c.note(fmt("mean angular error 3x4 %.3f, 6x8 %.3f, 12x16 %.3f deg", err[0], err[1], err[2]));
  return c.result();
}

// ---------------------------------------------------------------- 4
Outcome candidate_peaks() {
  Check c;
  const FmcwConfig cfg;
  const auto array = default_fmcw_array(cfg.wavelength());
  std::vector<sim::Scatterer> scene;
  for (double a : {15.0, -15.0}) {
    const Vec3 u = fmcw::look_direction(deg2rad(a), 0.0);
    scene.push_back({u * 2.0, u * 0.5, 1.0});
  }
  const auto cube = sim::synth_fmcw_frame(scene, cfg, array, 0);
  std::size_t n_multi = 0, n_single = 0;
  for (std::size_t cap : {std::size_t{8}, std::size_t{1}}) {
    fmcw::PointCloudParams q;
    q.max_candidates_per_cell = cap;
    const auto xd = fmcw::process_cube(cube, q);
    const auto map = fmcw::rd_energy_map(xd);
    const auto cells = fmcw::topk_rd_cells(map, 1);
    if (cells.empty()) {
      c.expect(false, "no range-Doppler cell found");
      return c.result();
    }
    const auto spec = fmcw::aoa_spectrum(xd, cells[0], array, cfg, q);
    const auto cand = fmcw::extract_candidates(spec, cells[0], map, fmcw::BinScale(cfg, q), q);
    if (cap == 8) {
      n_multi = cand.size();
      for (double a : {15.0, -15.0}) {
        const bool found = std::any_of(cand.begin(), cand.end(), [&](const auto& k) {
          return std::abs(rad2deg(k.azimuth) - a) <= 1.0 + 1e-9;
        });
        c.expect(found, fmt("no candidate within 1 deg of %+.0f deg", a));
      }
    } else {
      n_single = cand.size();
    }
  }
  c.expect(n_multi >= 2, fmt("multi-peak candidates %zu < 2", n_multi));
  c.expect(n_single == 1, fmt("cap of one gave %zu candidates", n_single));
  c.note(fmt("multi-peak %zu candidates covering +-15 deg, single-peak %zu", n_multi, n_single));
  return c.result();
}

// ---------------------------------------------------------------- 5
Outcome sfcw_resolution() {
  Check c;
  const SfcwConfig cfg;
  const double d = cfg.range_sample_interval(128);
  const double rel = std::abs(d - 0.044) / 0.044;
  c.expect(rel <= 0.02, fmt("delta rho %.5f m is %.2f%% off", d, 100 * rel));
  c.note(fmt("delta rho %.3f cm (%.2f%% from 4.4 cm)", 100 * d, 100 * rel));
  return c.result();
}

// ---------------------------------------------------------------- 6
ArrayGeometry irregular_eight_channel() {
  ArrayGeometry g;
  g.tx_positions = {{-0.12, 0, 0.09}, {0.14, 0, -0.11}};
  g.rx_positions = {{-0.03, 0, -0.13}, {0.05, 0, 0.12}, {0.11, 0, 0.04}, {-0.13, 0, -0.02}};
  g.tx_selected = {0, 1};
  g.rx_selected = {0, 1, 2, 3};
  return g;
}

Outcome backprojection() {
  Check c;
  const SfcwConfig cfg;
  const auto g = irregular_eight_channel();
  const double step = 0.03;
  const sfcw::VoxelGrid grid{sfcw::uniform_axis(-7.5 * step, step, 16), sfcw::uniform_axis(1.0, step, 16),
                             sfcw::uniform_axis(-7.5 * step, step, 16)};

  std::mt19937_64 rng(606);
  const sfcw::RangeProfiles prof{testutil::random_tensor(rng, {8, 512}), cfg.range_sample_interval(512)};
  const auto vol = sfcw::backproject(prof, grid, g, cfg, sfcw::RangeInterpolation::nearest);
  double worst = 0;
  for (std::size_t ix = 0; ix < 16; ++ix)
    for (std::size_t iy = 0; iy < 16; ++iy)
      for (std::size_t iz = 0; iz < 16; ++iz) {
        const Complex want =
            oracle::voxel_sum(prof.data, prof.delta_rho, cfg.wavenumber(), g, grid.x[ix], grid.y[iy], grid.z[iz]);
        worst = std::max(worst, std::abs(vol(ix, iy, iz) - want) / std::abs(want));
      }
  c.expect(worst <= 1e-6, fmt("max relative error %.3g > 1e-6", worst));

  std::mt19937_64 pick(5);
  std::uniform_int_distribution<int> node(2, 13);
  int hits = 0;
  for (int t = 0; t < 20; ++t) {
    const int ix = node(pick), iy = node(pick), iz = node(pick);
    const sim::Scatterer sc{{grid.x[ix], grid.y[iy], grid.z[iz]}, {}, 1.0};
    const auto resp = sim::synth_sfcw_frame(std::span(&sc, 1), cfg, g);
    const auto p = sfcw::range_profiles(resp, dsp::WindowKind::rectangular, 512);
    const auto img = sfcw::backproject(p, grid, g, cfg, sfcw::RangeInterpolation::nearest);
    const auto& v = img.values();
    const auto best = static_cast<int>(std::max_element(v.begin(), v.end(), [](Complex a, Complex b) {
                                         return std::abs(a) < std::abs(b);
                                       }) - v.begin());
    const int bx = best / 256, by = (best / 16) % 16, bz = best % 16;
    hits += std::max({std::abs(bx - ix), std::abs(by - iy), std::abs(bz - iz)}) <= 1;
  }
  c.expect(hits == 20, fmt("argmax within one voxel %d/20", hits));
  c.note(fmt("4096 voxels, max relative error %.2e; argmax %d/20", worst, hits));
  return c.result();
}

// ---------------------------------------------------------------- 7
Outcome tube_shape() {
  Check c;
  const auto grid = sfcw::default_voxel_grid();
  const Tensor<double> vol({grid.nx(), grid.ny(), grid.nz()}, 1.0);
  const auto tube = sfcw::crop_tube({vol}, grid, {{0.0, 0.0, 1.2}});
  const std::vector<std::size_t> want{1, 40, 68, 40};
  c.expect(tube.volumes.shape() == want, "cropped shape differs from (1, 40, 68, 40)");
  c.note(fmt("grid %zux%zux%zu cropped to (L, %zu, %zu, %zu)", grid.nx(), grid.ny(), grid.nz(), tube.volumes.dim(1),
             tube.volumes.dim(2), tube.volumes.dim(3)));
  return c.result();
}

// ---------------------------------------------------------------- 8
Outcome mvdr_sanity() {
  Check c;
  const FmcwConfig cfg;
  {
    const auto g = rectangular_mimo(1, 2, 4, 0.5 * cfg.wavelength());
    const std::size_t m = g.channel_count();
    Tensor<Complex> xr({2, 4, m, 64});
    for (std::size_t ch = 0; ch < m; ++ch)
      for (std::size_t k = 0; k < 64; ++k) xr(ch / 4, ch % 4, ch, k) = std::sqrt(static_cast<double>(m));
    const tracking::MvdrGrid grid{sfcw::uniform_axis(-0.5, 0.1, 11), sfcw::uniform_axis(-0.3, 0.1, 7), {1.0, 1.5}};
    const auto hm = tracking::mvdr_heatmap(xr, g, cfg, grid, 0.0, 0.05);
    double dev = 0;
    for (double v : hm.power.values()) dev = std::max(dev, std::abs(v - 1.0));
    c.expect(dev <= 1e-12, fmt("identity heatmap deviates from 1 by %.3g", dev));
  }

  const auto geo = default_fmcw_array(cfg.wavelength());
  const auto grid = tracking::default_mvdr_grid();
  fmcw::PointCloudParams p;
  p.clutter_removal = false;
  const double bin = cfg.range_bin_spacing(p.range_bins(cfg));
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> ix(5, 55), iz(4, 28), id(3, 15);
  int hits = 0;
  for (int t = 0; t < 20; ++t) {
    const Vec3 pos{grid.x_axis[ix(rng)], grid.depths[id(rng)], grid.z_axis[iz(rng)]};
    const sim::Scatterer sc{pos, {}, 1.0};
    const auto xr = fmcw::range_fft(sim::synth_fmcw_frame(std::span(&sc, 1), cfg, geo, t), p);
    const auto hm = tracking::mvdr_heatmap(xr, geo, cfg, grid, 1e-3, bin);
    const auto& v = hm.power.values();
    const auto best = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
    hits += std::abs(hm.x_axis[best / hm.nz()] - pos.x) <= 0.06 + 1e-9 &&
            std::abs(hm.z_axis[best % hm.nz()] - pos.z) <= 0.06 + 1e-9;
  }
  c.expect(hits == 20, fmt("sources localized %d/20", hits));
  c.note(fmt("identity heatmap constant 1; sources localized %d/20", hits));
  return c.result();
}

// ---------------------------------------------------------------- 9
Outcome os_cfar_oracle() {
  Check c;
  // Level 2 with one spike; every reference set (16 cells, or 8..15 at the
  // edges) holds at most one spike value, so its 0.75-rank element is 2.
  std::vector<double> profile(64, 2.0);
  profile[30] = 50.0;
  const tracking::CfarParams params{8, 2, 0.75, 4.0};
  const auto thr = tracking::os_cfar_thresholds(profile, params);
  bool all_eight = true;
  for (double t : thr) all_eight = all_eight && t == 8.0;
  c.expect(all_eight, "order-statistic threshold differs from 8");
  const auto det = tracking::os_cfar(profile, params);
  c.expect(det == std::vector<std::size_t>{30}, "detection set differs from {30}");

  std::mt19937_64 rng(909);
  std::exponential_distribution<double> bg(1.0);
  std::uniform_int_distribution<std::size_t> where(0, 127);
  std::uniform_real_distribution<double> logscale(-6.0, 6.0);
  int same = 0;
  for (int t = 0; t < 20; ++t) {
    std::vector<double> prof(128);
    for (auto& v : prof) v = bg(rng);
    for (int s = 0; s < 4; ++s) prof[where(rng)] += 40.0 * bg(rng);
    const double k = std::pow(10.0, logscale(rng));
    auto scaled = prof;
    for (auto& v : scaled) v *= k;
    same += tracking::os_cfar(prof, tracking::CfarParams{}) == tracking::os_cfar(scaled, tracking::CfarParams{});
  }
  c.expect(same == 20, fmt("scaling changed the detections on %d/20 profiles", 20 - same));
  c.note(fmt("threshold 8 everywhere, detections {30}; scale-invariant %d/20", same));
  return c.result();
}

// ---------------------------------------------------------------- 10
tracking::Heatmap blob(double cx, double cz, double noise, std::mt19937_64& rng, double x_step) {
  tracking::Heatmap hm;
  hm.x_axis = sfcw::uniform_axis(-30 * x_step, x_step, 61);
  hm.z_axis = sfcw::uniform_axis(1.0, 0.06, 34);
  hm.power = Tensor<double>({61, 34});
  std::uniform_real_distribution<double> u(0.0, noise);
  for (std::size_t ix = 0; ix < 61; ++ix)
    for (std::size_t iz = 0; iz < 34; ++iz) {
      const double dx = hm.x_axis[ix] - cx, dz = hm.z_axis[iz] - cz;
      hm.power(ix, iz) = 1.0 + 100.0 * std::exp(-(dx * dx + dz * dz) / (2 * 0.1 * 0.1)) + u(rng);
    }
  return hm;
}

Outcome tracking_checks() {
  Check c;
  std::mt19937_64 rng(1010);
  tracking::TrackParams params;
  tracking::TrackState state;
  double worst = 0;
  for (int f = 0; f < 10; ++f) {
    const auto out = tracking::track_frame(state, blob(0.42, 2.0, 0.5, rng, 0.06), params);
    c.expect(!out.coasting, fmt("frame %d lost the blob", f));
    worst = std::max({worst, std::abs(out.bbox.x - 0.42), std::abs(out.bbox.z - 2.0)});
    state = out.state;
  }
  c.expect(worst <= 0.06, fmt("stationary error %.4f m exceeds one cell", worst));

  const double a = params.alpha;
  const auto start = tracking::track_frame({}, blob(0.0, 2.0, 0.0, rng, 0.05), params).state;
  const auto target_map = blob(0.4, 2.0, 0.0, rng, 0.05);
  const double m = tracking::track_frame({}, target_map, params).state.x;
  c.expect(std::abs(m - 0.4) <= 1e-9, fmt("step target measured at %.12f", m));
  state = start;
  double step_err = 0;
  for (int n = 1; n <= 8; ++n) {
    state = tracking::track_frame(state, target_map, params).state;
    const double want = m + (start.x - m) * std::pow(1.0 - a, n);
    step_err = std::max(step_err, std::abs(state.x - want));
  }
  c.expect(step_err <= 1e-9, fmt("step response deviates by %.3g", step_err));
  c.note(fmt("stationary max error %.3f m; step response max deviation %.1e", worst, step_err));
  return c.result();
}

// ---------------------------------------------------------------- 11
Outcome metric_identities() {
  Check c;
  using metrics::BodyFrame;
  std::mt19937_64 rng(1111);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::normal_distribution<double> n(0.0, 1.0);
  BodyFrame gt;
  for (auto& j : gt.joints) j = {u(rng), 2.0 + u(rng), u(rng)};
  for (auto& r : gt.rotations) r = oracle::random_rotation(rng);
  gt.translation = {u(rng), 2.0, u(rng)};
  gt.vertices = std::vector<metrics::Vec3d>(200);
  for (auto& v : *gt.vertices) v = {u(rng), u(rng), u(rng)};

  const auto same = metrics::evaluate(gt, gt);
  c.expect(same.mpjpe_cm == 0 && same.mve_cm.value() == 0 && same.mre_deg == 0 && same.mle_cm == 0,
           "pred = gt did not give all zeros");

  auto shifted = gt;
  const metrics::Vec3d d(0.03, 0.0, 0.04);
  for (auto& j : shifted.joints) j += d;
  for (auto& v : *shifted.vertices) v += d;
  shifted.translation += d;
  const auto s = metrics::evaluate(shifted, gt);
  const double dev = std::max({std::abs(s.mpjpe_cm - 5.0), std::abs(*s.mve_cm - 5.0), std::abs(s.mle_cm - 5.0)});
  c.expect(dev <= 1e-9, fmt("shift errors deviate from 5 cm by %.3g", dev));
  c.expect(s.mre_deg == 0.0, fmt("shift MRE %.3g", s.mre_deg));

  auto turned = gt;
  for (auto& r : turned.rotations) r = r * oracle::axis_angle({n(rng), n(rng), n(rng)}, deg2rad(10.0));
  const double mre = metrics::evaluate(turned, gt).mre_deg;
  c.expect(std::abs(mre - 10.0) <= 1e-4, fmt("MRE %.6f deg", mre));

  double orth = 0;
  for (int t = 0; t < 100; ++t) {
    std::array<double, 6> p{};
    for (auto& v : p) v = n(rng);
    const auto r = metrics::rot6d_to_matrix(p);
    orth = std::max({orth, (r.transpose() * r - metrics::Mat3::Identity()).cwiseAbs().maxCoeff(),
                     std::abs(r.determinant() - 1.0)});
  }
  c.expect(orth <= 1e-9, fmt("rot6d orthonormality deviation %.3g", orth));
  c.note(fmt("zeros; shift 5 cm (dev %.1e); MRE %.6f deg; rot6d dev %.1e", dev, mre, orth));
  return c.result();
}

// ---------------------------------------------------------------- 12
using SeqKey = std::tuple<std::string, std::string, std::size_t>;
using Intervals = std::map<SeqKey, std::vector<std::pair<std::size_t, std::size_t>>>;

void add_ranges(Intervals& iv, const std::vector<splits::FrameRange>& ranges) {
  for (const auto& r : ranges) iv[{r.subject, r.action, r.sequence}].push_back({r.first, r.last});
}

/// True when the intervals of every sequence tile [1, frames] without overlap
/// and no sequence outside `scope` appears.
bool tiles(Intervals iv, const std::map<SeqKey, std::size_t>& scope) {
  for (auto& [key, list] : iv) {
    const auto it = scope.find(key);
    if (it == scope.end()) return false;
    std::sort(list.begin(), list.end());
    std::size_t next = 1;
    for (const auto& [first, last] : list) {
      if (first != next || last < first) return false;
      next = last + 1;
    }
    if (next != it->second + 1) return false;
  }
  return iv.size() == scope.size();
}

Outcome split_checks() {
  using namespace splits;
  Check c;
  const auto m = canonical_manifest();
  auto scope_of = [&](std::optional<ActionCategory> cat) {
    std::map<SeqKey, std::size_t> out;
    for (const auto& s : m.subjects)
      for (const auto& a : s.actions)
        if (!cat || a.category == *cat)
          for (const auto& q : a.sequences) out[{s.id, a.id, q.index}] = q.frames;
    return out;
  };
  const auto everything = scope_of(std::nullopt);

  const auto base = make_splits(m, {Setting::base, {}, {}});
  c.expect(base.train_frames() == 288000 && base.test_frames() == 72000,
           fmt("base split %zu/%zu", base.train_frames(), base.test_frames()));
  Intervals both;
  add_ranges(both, base.train);
  add_ranges(both, base.test);
  c.expect(tiles(both, everything), "base split is not a partition");

  const auto cs = make_splits(m, {Setting::cross_subject, {}, {}});
  std::set<std::string> tr, te;
  for (const auto& r : cs.train) tr.insert(r.subject);
  for (const auto& r : cs.test) te.insert(r.subject);
  bool overlap = false;
  for (const auto& s : te) overlap = overlap || tr.count(s);
  c.expect(tr.size() == 12 && te.size() == 3 && !overlap, fmt("cross-subject %zu/%zu", tr.size(), te.size()));
  both.clear();
  add_ranges(both, cs.train);
  add_ranges(both, cs.test);
  c.expect(tiles(both, everything), "cross-subject split is not a partition");

  for (auto [setting, cat] : {std::pair{Setting::cross_position, ActionCategory::position},
                              std::pair{Setting::cross_orientation, ActionCategory::orientation}}) {
    const auto scope = scope_of(cat);
    const std::string name(to_string(setting));
    Intervals tested;
    for (int fold = 1; fold <= 3; ++fold) {
      const auto s = make_splits(m, {setting, fold, {}});
      bool fold_ok = true;
      for (const auto& r : s.test) fold_ok = fold_ok && r.sequence == static_cast<std::size_t>(fold);
      for (const auto& r : s.train) fold_ok = fold_ok && r.sequence != static_cast<std::size_t>(fold);
      c.expect(fold_ok, fmt("%s fold %d holds the wrong sequences", name.c_str(), fold));
      Intervals iv;
      add_ranges(iv, s.train);
      add_ranges(iv, s.test);
      c.expect(tiles(iv, scope), fmt("%s fold %d is not a disjoint cover of its scope", name.c_str(), fold));
      add_ranges(tested, s.test);
    }
    c.expect(tiles(tested, scope), fmt("%s test folds are not a disjoint cover", name.c_str()));
  }
  c.note(fmt("base %zu/%zu, cross-subject %zu/%zu, folds disjoint and covering", base.train_frames(),
             base.test_frames(), tr.size(), te.size()));
  return c.result();
}

// ---------------------------------------------------------------- 14
Outcome file_formats() {
  using namespace io;
  Check c;
  testutil::TempDir dir("acceptance_ff");
  std::mt19937_64 rng(1414);
  std::uniform_int_distribution<std::uint32_t> bits;
  int exact = 0;
  for (auto kind : {FrameKind::point_frames, FrameKind::tube, FrameKind::fmcw_cube, FrameKind::sfcw_response}) {
    const Dtype dt = (kind == FrameKind::fmcw_cube || kind == FrameKind::sfcw_response) ? Dtype::complex64 : Dtype::float32;
    const FrameHeader h{kFormatVersion, kind, {4, 3, 5}, dt};
    std::vector<float> v(h.element_count() * (dt == Dtype::complex64 ? 2 : 1));
    for (auto& f : v) f = std::bit_cast<float>(bits(rng));
    const auto payload = encode_float32(v);
    const auto path = dir / ("k" + std::to_string(static_cast<int>(kind)) + ".dghm");
    write_frame_file(path, h, payload);
    const auto f = read_frame_file(path, kind);
    const auto copy = dir / "copy.dghm";
    write_frame_file(copy, f.header, f.payload);
    exact += f.header == h && f.payload == payload && testutil::read_bytes(copy) == testutil::read_bytes(path);
  }
  c.expect(exact == 4, fmt("bit-exact round trips %d/4", exact));

  const FrameHeader h{kFormatVersion, FrameKind::tube, {2, 2}, Dtype::float32};
  write_frame_file(dir / "ok.dghm", h, encode_float32(std::vector<float>{1.f, 2.f, 3.f, 4.f}));
  const auto good = testutil::read_bytes(dir / "ok.dghm");
  auto expect_throw = [&](const std::vector<std::uint8_t>& bytes, auto matches, const char* what) {
    testutil::write_bytes(dir / "bad.dghm", bytes);
    bool got = false;
    try {
      read_frame_file(dir / "bad.dghm");
    } catch (const std::exception& e) {
      got = matches(e);
    }
    c.expect(got, std::string("expected ") + what);
  };
  const auto is_magic = [](const std::exception& e) { return dynamic_cast<const BadMagicError*>(&e) != nullptr; };
  const auto is_trunc = [](const std::exception& e) { return dynamic_cast<const TruncatedError*>(&e) != nullptr; };
  auto bad_magic = good;
  bad_magic[1] = 'X';
  expect_throw(bad_magic, is_magic, "BadMagicError");
  for (std::size_t cut : {3u, 8u, 12u, 16u, 25u}) {
    const std::vector<std::uint8_t> t(good.begin(), good.begin() + static_cast<std::ptrdiff_t>(cut));
    expect_throw(t, is_trunc, "TruncatedError");
  }
  c.note("4 kinds bit-exact; BadMagicError and TruncatedError raised");
  return c.result();
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  constexpr double kInstant = 0.1;
  const std::vector<Criterion> all{
      {1, "DFT oracle equivalence", 5.0, dft_oracle},
      {2, "RD energy map equals triple sum", 1.0, rd_map_oracle},
      {3, "FMCW end-to-end localization", 60.0, fmcw_localization},
      {4, "multi-peak candidate extraction", 10.0, candidate_peaks},
      {5, "SFCW range sampling interval", kInstant, sfcw_resolution},
      {6, "back-projection oracle and argmax", 30.0, backprojection},
      {7, "imaging tube crop shape", kInstant, tube_shape},
      {8, "MVDR identity and localization", 20.0, mvdr_sanity},
      {9, "OS-CFAR hand oracle and scaling", 1.0, os_cfar_oracle},
      {10, "tracking and smoothing step response", 5.0, tracking_checks},
      {11, "metric identities", 2.0, metric_identities},
      {12, "benchmark splits", 1.0, split_checks},
      {13, "subarray aperture trend", 180.0, subarray_trend},
      {14, "frame file round trip and corruption", 1.0, file_formats},
  };
  int failed = 0;
  for (const auto& cr : all) {
    Outcome o;
    const testutil::Stopwatch sw;
    try {
      o = cr.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double t = sw.seconds();
    bool ok = o.ok;
    std::string detail = o.detail;
    if (ok && t > cr.budget_s) {
      ok = false;
      detail = fmt("over budget (%.2f s > %.2f s); ", t, cr.budget_s) + detail;
    }
    failed += !ok;
    std::printf("%s  %2d  %-40s %8.3f s / %6.1f s  %s\n", ok ? "PASS" : "FAIL", cr.id, cr.name, t, cr.budget_s,
                detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed == 0 ? 0 : 1;
}
