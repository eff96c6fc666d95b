// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <tuple>

#include "mmsense/array_geometry.hpp"
#include "mmsense/dsp.hpp"
#include "mmsense/measurements.hpp"

namespace mmsense::fmcw {

inline constexpr std::size_t kPointsPerFrame = 256;
inline constexpr std::size_t kPointFeatures = 6;

struct AngleGrid {
  double az_min_deg = -60.0;
  double az_max_deg = 60.0;
  double az_step_deg = 1.0;
  double el_min_deg = -45.0;
  double el_max_deg = 45.0;
  double el_step_deg = 2.0;

  std::size_t az_count() const { return axis_count(az_min_deg, az_max_deg, az_step_deg); }
  std::size_t el_count() const { return axis_count(el_min_deg, el_max_deg, el_step_deg); }
  double azimuth(std::size_t i) const { return deg2rad(az_min_deg + static_cast<double>(i) * az_step_deg); }
  double elevation(std::size_t i) const { return deg2rad(el_min_deg + static_cast<double>(i) * el_step_deg); }

  void validate() const {
    if (!(az_step_deg > 0) || !(el_step_deg > 0) || az_max_deg < az_min_deg || el_max_deg < el_min_deg)
      throw std::invalid_argument("angle grid: steps must be positive and max >= min");
    if (az_count() * el_count() < 2) throw std::invalid_argument("angle grid: degenerate (single cell)");
  }

private:
  static std::size_t axis_count(double lo, double hi, double step) {
    return static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  }
};

/// Axis-aligned box in the radar frame; candidates outside are gated.
struct Workspace {
  Vec3 min{-5.0, 0.2, -3.0};
  Vec3 max{5.0, 10.0, 3.0};
  bool contains(const Vec3& p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y && p.z >= min.z && p.z <= max.z;
  }
};

struct PointCloudParams {
  dsp::WindowKind range_window = dsp::WindowKind::rectangular;
  dsp::WindowKind doppler_window = dsp::WindowKind::rectangular;
  std::size_t range_fft_length = 0;    // 0: next power of two >= samples
  std::size_t doppler_fft_length = 0;  // 0: next power of two >= loops
  bool clutter_removal = true;
  bool tdm_compensation = true;
  std::size_t top_k = 64;
  AngleGrid grid;
  double dynamic_range_db = 12.0;
  std::size_t max_candidates_per_cell = 8;
  std::size_t min_separation_cells = 2;
  double rd_weight = 0.5;
  double aoa_weight = 0.5;
  Workspace workspace;

  std::size_t range_bins(const FmcwConfig& cfg) const {
    return range_fft_length ? range_fft_length : dsp::next_pow2(cfg.samples_per_chirp);
  }
  std::size_t doppler_bins(const FmcwConfig& cfg) const {
    return doppler_fft_length ? doppler_fft_length : dsp::next_pow2(cfg.loops_per_frame);
  }
};

/// Range/Doppler bin to physical value helpers. Doppler bins are centred:
/// bin m corresponds to signed index m - N/2.
struct BinScale {
  double range_per_bin = 0.0;
  double velocity_per_bin = 0.0;
  std::size_t doppler_bins = 0;
  std::size_t range_bins = 0;

  BinScale(const FmcwConfig& cfg, const PointCloudParams& params)
      : range_per_bin(cfg.range_bin_spacing(params.range_bins(cfg))),
        velocity_per_bin(cfg.wavelength() /
                         (2.0 * static_cast<double>(params.doppler_bins(cfg)) * cfg.loop_interval)),
        doppler_bins(params.doppler_bins(cfg)),
        range_bins(params.range_bins(cfg)) {}

  double signed_doppler(std::size_t m) const {
    return static_cast<double>(m) - static_cast<double>(doppler_bins / 2);
  }
  double range(std::size_t k) const { return static_cast<double>(k) * range_per_bin; }
  double velocity(std::size_t m) const { return signed_doppler(m) * velocity_per_bin; }
};

/// Returns a cube holding only the channels of `target` (which must be a
/// subset of `source`, the geometry the cube was recorded with).
inline RadarCube extract_channels(const RadarCube& cube, const ArrayGeometry& source,
                                  const ArrayGeometry& target) {
  cube.validate();
  auto locate = [](const std::vector<std::size_t>& pool, std::size_t physical) {
    auto it = std::find(pool.begin(), pool.end(), physical);
    if (it == pool.end()) throw std::invalid_argument("extract_channels: element not present in source cube");
    return static_cast<std::size_t>(it - pool.begin());
  };
  if (cube.tx_count() != source.tx_count() || cube.rx_count() != source.rx_count())
    throw std::invalid_argument("extract_channels: cube shape does not match source geometry");
  RadarCube out;
  out.config = cube.config;
  out.frame_index = cube.frame_index;
  out.warnings = cube.warnings;
  out.tx_slots = target.tx_selected;
  const std::size_t nl = cube.loop_count(), ns = cube.sample_count();
  out.data = Tensor<Complex>({target.tx_count(), target.rx_count(), nl, ns});
  for (std::size_t t = 0; t < target.tx_count(); ++t) {
    const auto st = locate(source.tx_selected, target.tx_selected[t]);
    for (std::size_t r = 0; r < target.rx_count(); ++r) {
      const auto sr = locate(source.rx_selected, target.rx_selected[r]);
      std::copy_n(&cube.data(st, sr, std::size_t{0}, std::size_t{0}), nl * ns,
                  &out.data(t, r, std::size_t{0}, std::size_t{0}));
    }
  }
  return out;
}

/// Range FFT along fast time: (tx, rx, loop, sample) -> (tx, rx, loop, range bin).
inline Tensor<Complex> range_fft(const RadarCube& cube, const PointCloudParams& params) {
  cube.validate();
  const std::size_t nt = cube.tx_count(), nr = cube.rx_count(), nl = cube.loop_count();
  const std::size_t ns = cube.sample_count();
  const std::size_t nk = params.range_bins(cube.config);
  if (nk < ns) throw std::invalid_argument("range_fft: FFT length shorter than samples per chirp");
  const auto w = dsp::window_coefficients(params.range_window, ns);
  Tensor<Complex> out({nt, nr, nl, nk});
  for (std::size_t t = 0; t < nt; ++t)
    for (std::size_t r = 0; r < nr; ++r)
      for (std::size_t l = 0; l < nl; ++l) {
        const Complex* src = &cube.data(t, r, l, std::size_t{0});
        Complex* dst = &out(t, r, l, std::size_t{0});
        for (std::size_t n = 0; n < ns; ++n) dst[n] = src[n] * w[n];
        dsp::fft_inplace(std::span<Complex>(dst, nk));
      }
  return out;
}

/// Subtracts the slow-time mean from every (tx, rx, range bin) series.
inline void remove_static_clutter(Tensor<Complex>& range_cube) {
  const std::size_t nt = range_cube.dim(0), nr = range_cube.dim(1);
  const std::size_t nl = range_cube.dim(2), nk = range_cube.dim(3);
  for (std::size_t t = 0; t < nt; ++t)
    for (std::size_t r = 0; r < nr; ++r)
      for (std::size_t k = 0; k < nk; ++k) {
        Complex mean{};
        for (std::size_t l = 0; l < nl; ++l) mean += range_cube(t, r, l, k);
        mean /= static_cast<double>(nl);
        for (std::size_t l = 0; l < nl; ++l) range_cube(t, r, l, k) -= mean;
      }
}

/// Doppler FFT along loops with the zero-Doppler bin centred:
/// (tx, rx, loop, k) -> (tx, rx, doppler bin, k).
inline Tensor<Complex> doppler_fft(const Tensor<Complex>& range_cube, std::size_t doppler_bins,
                                   dsp::WindowKind window) {
  const std::size_t nt = range_cube.dim(0), nr = range_cube.dim(1);
  const std::size_t nl = range_cube.dim(2), nk = range_cube.dim(3);
  if (doppler_bins < nl) throw std::invalid_argument("doppler_fft: FFT length shorter than loop count");
  const auto w = dsp::window_coefficients(window, nl);
  Tensor<Complex> out({nt, nr, doppler_bins, nk});
  std::vector<Complex> buf(doppler_bins);
  const std::size_t half = doppler_bins / 2;
  for (std::size_t t = 0; t < nt; ++t)
    for (std::size_t r = 0; r < nr; ++r)
      for (std::size_t k = 0; k < nk; ++k) {
        std::fill(buf.begin(), buf.end(), Complex{});
        for (std::size_t l = 0; l < nl; ++l) buf[l] = range_cube(t, r, l, k) * w[l];
        dsp::fft_inplace(buf);
        for (std::size_t m = 0; m < doppler_bins; ++m) out(t, r, m, k) = buf[(m + doppler_bins - half) % doppler_bins];
      }
  return out;
}

/// Range FFT, optional slow-time clutter removal, centred Doppler FFT.
inline Tensor<Complex> process_cube(const RadarCube& cube, const PointCloudParams& params = {}) {
  cube.validate();
  if (cube.loop_count() < 2) throw std::invalid_argument("process_cube: at least 2 loops required for clutter removal");
  auto xr = range_fft(cube, params);
  if (params.clutter_removal) remove_static_clutter(xr);
  return doppler_fft(xr, params.doppler_bins(cube.config), params.doppler_window);
}

struct RdMap {
  Tensor<double> energy;  // (doppler bin, range bin)
  std::size_t doppler_bins() const { return energy.dim(0); }
  std::size_t range_bins() const { return energy.dim(1); }
};

/// E(m, k) = sum_t sum_r |X_D[t, r, m, k]|^2.
inline RdMap rd_energy_map(const Tensor<Complex>& xd) {
  if (xd.rank() != 4) throw std::invalid_argument("rd_energy_map: expected (tx, rx, doppler, range) tensor");
  const std::size_t nm = xd.dim(2), nk = xd.dim(3);
  const std::size_t channels = xd.dim(0) * xd.dim(1);
  RdMap map{Tensor<double>({nm, nk})};
  auto& e = map.energy.values();
  const auto& v = xd.values();
  for (std::size_t c = 0; c < channels; ++c) {
    const Complex* plane = v.data() + c * nm * nk;
    for (std::size_t i = 0; i < nm * nk; ++i) e[i] += std::norm(plane[i]);
  }
  return map;
}

struct RdCell {
  std::size_t doppler = 0;
  std::size_t range = 0;
  bool operator==(const RdCell&) const = default;
};

/// Up to K strict 3x3 local maxima in descending energy; ties broken by
/// ascending range bin, then Doppler bin. Cells on the border compare only
/// against the neighbours that exist.
inline std::vector<RdCell> topk_rd_cells(const RdMap& map, std::size_t k) {
  if (k < 1) throw std::invalid_argument("topk_rd_cells: K must be >= 1");
  const std::size_t nm = map.doppler_bins(), nk = map.range_bins();
  const auto& e = map.energy;
  std::vector<RdCell> peaks;
  for (std::size_t m = 0; m < nm; ++m)
    for (std::size_t r = 0; r < nk; ++r) {
      const double v = e(m, r);
      bool is_max = true;
      for (int dm = -1; dm <= 1 && is_max; ++dm)
        for (int dr = -1; dr <= 1; ++dr) {
          if (dm == 0 && dr == 0) continue;
          const auto mm = static_cast<std::ptrdiff_t>(m) + dm;
          const auto rr = static_cast<std::ptrdiff_t>(r) + dr;
          if (mm < 0 || rr < 0 || mm >= static_cast<std::ptrdiff_t>(nm) || rr >= static_cast<std::ptrdiff_t>(nk))
            continue;
          if (e(static_cast<std::size_t>(mm), static_cast<std::size_t>(rr)) >= v) {
            is_max = false;
            break;
          }
        }
      if (is_max) peaks.push_back({m, r});
    }
  std::sort(peaks.begin(), peaks.end(), [&](const RdCell& a, const RdCell& b) {
    const double ea = e(a.doppler, a.range), eb = e(b.doppler, b.range);
    if (ea != eb) return ea > eb;
    return std::tie(a.range, a.doppler) < std::tie(b.range, b.doppler);
  });
  if (peaks.size() > k) peaks.resize(k);
  return peaks;
}

/// Unit look direction for azimuth theta (towards +x) and elevation phi
/// (towards +z); boresight is +y.
inline Vec3 look_direction(double azimuth, double elevation) {
  return {std::cos(elevation) * std::sin(azimuth), std::cos(elevation) * std::cos(azimuth), std::sin(elevation)};
}

struct AoaSpectrum {
  Tensor<double> power;  // (azimuth index, elevation index)
  AngleGrid grid;
};

/// Delay-and-sum beamformer over the virtual array with precomputed
/// steering phases exp(+j k0 u . p_v).
class AoaBeamformer {
public:
  AoaBeamformer(const ArrayGeometry& geometry, const FmcwConfig& cfg, const AngleGrid& grid)
      : grid_(grid), cfg_(cfg), slots_(geometry.tx_selected), rx_count_(geometry.rx_count()) {
    grid.validate();
    const auto virt = build_virtual_array(geometry);
    channels_ = virt.size();
    const double k0 = cfg.wavenumber();
    const std::size_t na = grid.az_count(), ne = grid.el_count();
    steering_.resize(na * ne * channels_);
    for (std::size_t a = 0; a < na; ++a)
      for (std::size_t e = 0; e < ne; ++e) {
        const Vec3 u = look_direction(grid.azimuth(a), grid.elevation(e));
        Complex* s = &steering_[(a * ne + e) * channels_];
        for (std::size_t v = 0; v < channels_; ++v) s[v] = std::polar(1.0, k0 * u.dot(virt[v]));
      }
  }

  std::size_t channel_count() const { return channels_; }
  const AngleGrid& grid() const { return grid_; }

  /// Channel snapshot for one RD cell, optionally with the TDM Doppler phase
  /// of each Tx slot removed.
  std::vector<Complex> snapshot(const Tensor<Complex>& xd, const RdCell& cell, const BinScale& scale,
                                bool tdm_compensation) const {
    if (xd.dim(0) * xd.dim(1) != channels_)
      throw std::invalid_argument("aoa: tensor channel count does not match geometry");
    if (cell.doppler >= xd.dim(2) || cell.range >= xd.dim(3))
      throw std::invalid_argument("aoa: RD cell outside map bounds");
    std::vector<Complex> x(channels_);
    const double fd = scale.signed_doppler(cell.doppler) /
                      (static_cast<double>(scale.doppler_bins) * cfg_.loop_interval);
    for (std::size_t t = 0; t < xd.dim(0); ++t) {
      const Complex comp = tdm_compensation
                               ? std::polar(1.0, -2.0 * kPi * fd * static_cast<double>(slots_[t]) * cfg_.chirp_interval)
                               : Complex(1.0, 0.0);
      for (std::size_t r = 0; r < xd.dim(1); ++r) x[t * rx_count_ + r] = xd(t, r, cell.doppler, cell.range) * comp;
    }
    return x;
  }

  AoaSpectrum spectrum(std::span<const Complex> x) const {
    if (x.size() != channels_) throw std::invalid_argument("aoa: snapshot size mismatch");
    const std::size_t na = grid_.az_count(), ne = grid_.el_count();
    AoaSpectrum out{Tensor<double>({na, ne}), grid_};
    auto& p = out.power.values();
    for (std::size_t d = 0; d < na * ne; ++d) {
      const Complex* s = &steering_[d * channels_];
      Complex acc{};
      for (std::size_t v = 0; v < channels_; ++v) acc += x[v] * s[v];
      p[d] = std::norm(acc);
    }
    return out;
  }

private:
  AngleGrid grid_;
  FmcwConfig cfg_;
  std::vector<std::size_t> slots_;
  std::size_t rx_count_ = 0;
  std::size_t channels_ = 0;
  std::vector<Complex> steering_;
};

inline AoaSpectrum aoa_spectrum(const Tensor<Complex>& xd, const RdCell& cell, const ArrayGeometry& geometry,
                                const FmcwConfig& cfg, const PointCloudParams& params) {
  AoaBeamformer bf(geometry, cfg, params.grid);
  const BinScale scale(cfg, params);
  return bf.spectrum(bf.snapshot(xd, cell, scale, params.tdm_compensation));
}

struct AoaCandidate {
  double azimuth = 0;    // rad
  double elevation = 0;  // rad
  double range = 0;      // m
  double radial_velocity = 0;
  double rd_energy_db = 0;
  double aoa_peak_db = 0;
  double score = 0;
  RdCell cell;
  std::size_t az_index = 0;
  std::size_t el_index = 0;

  Vec3 position() const { return look_direction(azimuth, elevation) * range; }
};

/// Multi-peak extraction: every strict 8-neighbourhood maximum of the AoA
/// spectrum within dynamic_range_db of the global maximum becomes a
/// candidate scored w_rd*E_dB + w_aoa*S_dB. Candidates outside the workspace,
/// or within min_separation_cells (Chebyshev, grid cells) of a better one,
/// are dropped; at most max_candidates_per_cell survive.
inline std::vector<AoaCandidate> extract_candidates(const AoaSpectrum& spectrum, const RdCell& cell,
                                                    const RdMap& map, const BinScale& scale,
                                                    const PointCloudParams& params) {
  const std::size_t na = spectrum.power.dim(0), ne = spectrum.power.dim(1);
  const auto& p = spectrum.power;
  double global = 0.0;
  for (double v : p.values()) global = std::max(global, v);
  if (!(global > 0.0)) return {};
  const double floor_db = dsp::power_to_db(global) - params.dynamic_range_db;
  const double rd_db = dsp::power_to_db(map.energy(cell.doppler, cell.range));

  std::vector<AoaCandidate> raw;
  for (std::size_t a = 0; a < na; ++a)
    for (std::size_t e = 0; e < ne; ++e) {
      const double v = p(a, e);
      bool is_max = true;
      for (int da = -1; da <= 1 && is_max; ++da)
        for (int de = -1; de <= 1; ++de) {
          if (da == 0 && de == 0) continue;
          const auto aa = static_cast<std::ptrdiff_t>(a) + da;
          const auto ee = static_cast<std::ptrdiff_t>(e) + de;
          if (aa < 0 || ee < 0 || aa >= static_cast<std::ptrdiff_t>(na) || ee >= static_cast<std::ptrdiff_t>(ne)) continue;
          if (p(static_cast<std::size_t>(aa), static_cast<std::size_t>(ee)) >= v) {
            is_max = false;
            break;
          }
        }
      if (!is_max) continue;
      const double s_db = dsp::power_to_db(v);
      if (s_db < floor_db) continue;
      AoaCandidate c;
      c.azimuth = spectrum.grid.azimuth(a);
      c.elevation = spectrum.grid.elevation(e);
      c.range = scale.range(cell.range);
      c.radial_velocity = scale.velocity(cell.doppler);
      c.rd_energy_db = rd_db;
      c.aoa_peak_db = s_db;
      c.score = params.rd_weight * rd_db + params.aoa_weight * s_db;
      c.cell = cell;
      c.az_index = a;
      c.el_index = e;
      raw.push_back(c);
    }
  std::stable_sort(raw.begin(), raw.end(), [](const auto& x, const auto& y) { return x.score > y.score; });

  std::vector<AoaCandidate> kept;
  for (const auto& c : raw) {
    if (kept.size() >= params.max_candidates_per_cell) break;
    if (!params.workspace.contains(c.position())) continue;
    const bool crowded = std::any_of(kept.begin(), kept.end(), [&](const AoaCandidate& k) {
      const auto da = static_cast<std::size_t>(std::abs(static_cast<std::ptrdiff_t>(k.az_index) - static_cast<std::ptrdiff_t>(c.az_index)));
      const auto de = static_cast<std::size_t>(std::abs(static_cast<std::ptrdiff_t>(k.el_index) - static_cast<std::ptrdiff_t>(c.el_index)));
      return std::max(da, de) <= params.min_separation_cells;
    });
    if (!crowded) kept.push_back(c);
  }
  return kept;
}

/// Fixed-size frame of (x, y, z, v_r, E_dB, R) rows ordered by score.
struct PointFrame {
  std::vector<std::array<double, kPointFeatures>> rows =
      std::vector<std::array<double, kPointFeatures>>(kPointsPerFrame, std::array<double, kPointFeatures>{});
  std::vector<double> scores = std::vector<double>(kPointsPerFrame, 0.0);
  /// Rows at or beyond valid_count are cyclic copies of rows [0, valid_count).
  std::size_t valid_count = 0;
};

inline PointFrame assemble_pointframe(std::vector<AoaCandidate> candidates) {
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const auto& a, const auto& b) { return a.score > b.score; });
  if (candidates.size() > kPointsPerFrame) candidates.resize(kPointsPerFrame);
  PointFrame frame;
  frame.valid_count = candidates.size();
  if (candidates.empty()) return frame;
  for (std::size_t i = 0; i < kPointsPerFrame; ++i) {
    const auto& c = candidates[i % candidates.size()];
    const Vec3 p = c.position();
    frame.rows[i] = {p.x, p.y, p.z, c.radial_velocity, c.rd_energy_db, c.range};
    frame.scores[i] = c.score;
  }
  return frame;
}

struct PointCloudResult {
  PointFrame frame;
  std::vector<RdCell> cells;
  std::vector<AoaCandidate> candidates;
};

/// Whole pipeline for one cube recorded with `geometry`.
class PointCloudGenerator {
public:
  PointCloudGenerator(const ArrayGeometry& geometry, const FmcwConfig& cfg, PointCloudParams params)
      : params_(std::move(params)), cfg_(cfg), scale_(cfg, params_), beamformer_(geometry, cfg, params_.grid) {}

  PointCloudResult run(const RadarCube& cube) const {
    const auto xd = process_cube(cube, params_);
    const auto map = rd_energy_map(xd);
    PointCloudResult result;
    result.cells = topk_rd_cells(map, params_.top_k);
    for (const auto& cell : result.cells) {
      const auto spec = beamformer_.spectrum(beamformer_.snapshot(xd, cell, scale_, params_.tdm_compensation));
      auto cands = extract_candidates(spec, cell, map, scale_, params_);
      result.candidates.insert(result.candidates.end(), cands.begin(), cands.end());
    }
    result.frame = assemble_pointframe(result.candidates);
    return result;
  }

  const PointCloudParams& params() const { return params_; }
  const BinScale& scale() const { return scale_; }

private:
  PointCloudParams params_;
  FmcwConfig cfg_;
  BinScale scale_;
  AoaBeamformer beamformer_;
};

}  // namespace mmsense::fmcw
