// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

#include "mmsense/array_geometry.hpp"
#include "mmsense/measurements.hpp"

namespace mmsense::sim {

struct Scatterer {
  Vec3 position;
  Vec3 velocity;
  double amplitude = 1.0;
};

inline constexpr std::size_t kJointCount = 22;

/// Articulated stick figure. Joint coordinates are relative to the body
/// origin; `translation` places the body in the radar frame (x lateral,
/// y forward, z up).
struct SkeletonScene {
  std::array<Vec3, kJointCount> joints{};
  std::vector<std::pair<std::size_t, std::size_t>> bones;
  std::size_t scatterers_per_bone = 4;
  Vec3 translation;
  Vec3 velocity;

  void validate() const {
    if (scatterers_per_bone < 1) throw std::invalid_argument("skeleton: scatterers_per_bone must be >= 1");
    for (const auto& [a, b] : bones)
      if (a >= kJointCount || b >= kJointCount)
        throw std::invalid_argument("skeleton: bone references joint outside [0, 22)");
  }

  /// Absolute joint positions.
  std::array<Vec3, kJointCount> world_joints() const {
    auto out = joints;
    for (auto& j : out) j += translation;
    return out;
  }
};

/// Parent of each joint in the 22-joint body kinematic tree (-1 for the root).
inline constexpr std::array<int, kJointCount> kJointParents = {
    -1, 0, 0, 0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 9, 9, 12, 13, 14, 16, 17, 18, 19};

/// Standing pose, arms down, body facing the radar (-y).
inline SkeletonScene default_skeleton(const Vec3& translation = {0.0, 2.0, 0.0}) {
  SkeletonScene s;
  s.joints = {{
      {0.00, 0.00, 0.00},    // pelvis
      {0.09, 0.00, -0.09},   // left hip
      {-0.09, 0.00, -0.09},  // right hip
      {0.00, 0.00, 0.11},    // spine 1
      {0.10, 0.00, -0.48},   // left knee
      {-0.10, 0.00, -0.48},  // right knee
      {0.00, 0.00, 0.24},    // spine 2
      {0.10, 0.02, -0.88},   // left ankle
      {-0.10, 0.02, -0.88},  // right ankle
      {0.00, 0.00, 0.30},    // spine 3
      {0.11, -0.10, -0.94},  // left foot
      {-0.11, -0.10, -0.94}, // right foot
      {0.00, 0.00, 0.52},    // neck
      {0.07, 0.00, 0.45},    // left collar
      {-0.07, 0.00, 0.45},   // right collar
      {0.00, -0.02, 0.64},   // head
      {0.18, 0.00, 0.45},    // left shoulder
      {-0.18, 0.00, 0.45},   // right shoulder
      {0.22, 0.00, 0.20},    // left elbow
      {-0.22, 0.00, 0.20},   // right elbow
      {0.24, -0.02, -0.04},  // left wrist
      {-0.24, -0.02, -0.04}, // right wrist
  }};
  for (std::size_t j = 1; j < kJointCount; ++j)
    s.bones.emplace_back(static_cast<std::size_t>(kJointParents[j]), j);
  s.translation = translation;
  return s;
}

/// Uniform interior points along each bone: fractions (s+1)/(n+1).
inline std::vector<Scatterer> skeleton_to_scatterers(const SkeletonScene& scene, double amplitude) {
  scene.validate();
  if (amplitude < 0) throw std::invalid_argument("skeleton_to_scatterers: amplitude must be >= 0");
  const auto joints = scene.world_joints();
  std::vector<Scatterer> out;
  out.reserve(scene.bones.size() * scene.scatterers_per_bone);
  const double n = static_cast<double>(scene.scatterers_per_bone);
  for (const auto& [a, b] : scene.bones) {
    const Vec3 pa = joints[a];
    const Vec3 seg = joints[b] - pa;
    if (seg.norm() == 0.0) {
      out.push_back({pa, scene.velocity, amplitude});
      continue;
    }
    for (std::size_t s = 0; s < scene.scatterers_per_bone; ++s) {
      const double f = (static_cast<double>(s) + 1.0) / (n + 1.0);
      out.push_back({pa + seg * f, scene.velocity, amplitude});
    }
  }
  return out;
}

struct NoiseModel {
  double std_dev = 0.0;  // total complex standard deviation
  std::uint64_t seed = 0;
};

struct FmcwSimOptions {
  NoiseModel noise;
  /// Scale amplitudes by 1/R^2 (received power falls as 1/R^4).
  bool range_falloff = false;
};

namespace detail {

inline std::mt19937_64 frame_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

inline void add_noise(Tensor<Complex>& data, const NoiseModel& noise, std::uint64_t stream) {
  if (noise.std_dev < 0) throw std::invalid_argument("noise_std must be >= 0");
  if (noise.std_dev == 0) return;
  auto rng = frame_rng(noise.seed, stream);
  std::normal_distribution<double> gauss(0.0, noise.std_dev / std::sqrt(2.0));
  for (auto& v : data.values()) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    v += Complex(re, im);
  }
}

}  // namespace detail

/// Synthesizes one FMCW radar cube (tx, rx, loop, sample) for the selected
/// subarray. Each scatterer contributes
///   A exp(j (2 pi f_b n / f_s + k0 d_tr))
/// with f_b = 2 R slope / c from the scatterer range R at the frame start,
/// and d_tr the exact Tx->scatterer->Rx path at the chirp start. Chirp start
/// times include the TDM slot offset slot*chirp_interval inside each loop, so
/// motion appears as per-loop Doppler phase plus a per-Tx phase ramp; the beat
/// frequency does not migrate within a frame.
inline RadarCube synth_fmcw_frame(std::span<const Scatterer> scene, const FmcwConfig& cfg,
                                  const ArrayGeometry& geometry, std::size_t frame_index,
                                  const FmcwSimOptions& options = {}) {
  cfg.validate();
  geometry.validate();
  const std::size_t nt = geometry.tx_count(), nr = geometry.rx_count();
  const std::size_t nl = cfg.loops_per_frame, ns = cfg.samples_per_chirp;
  RadarCube cube;
  cube.config = cfg;
  cube.frame_index = frame_index;
  cube.tx_slots = geometry.tx_selected;
  cube.data = Tensor<Complex>({nt, nr, nl, ns});

  const double k0 = cfg.wavenumber();
  const double t_frame = static_cast<double>(frame_index) / cfg.frame_rate;
  const double r_max = cfg.max_range();
  std::vector<Complex> ramp(ns);

  for (std::size_t si = 0; si < scene.size(); ++si) {
    const auto& sc = scene[si];
    if (sc.amplitude < 0) throw std::invalid_argument("scatterer amplitude must be >= 0");
    const double beat_range = (sc.position + sc.velocity * t_frame).norm();
    if (beat_range >= r_max)
      cube.warnings.push_back("scatterer " + std::to_string(si) + " beyond unambiguous range " +
                              std::to_string(r_max) + " m");
    const double dphi = 2.0 * kPi * (2.0 * beat_range * cfg.slope / kSpeedOfLight) / cfg.sample_rate;
    for (std::size_t n = 0; n < ns; ++n) ramp[n] = std::polar(1.0, dphi * static_cast<double>(n));
    for (std::size_t t = 0; t < nt; ++t) {
      const Vec3 ptx = geometry.tx(t);
      const double slot = static_cast<double>(geometry.tx_selected[t]);
      for (std::size_t l = 0; l < nl; ++l) {
        const double time =
            t_frame + static_cast<double>(l) * cfg.loop_interval + slot * cfg.chirp_interval;
        const Vec3 pos = sc.position + sc.velocity * time;
        const double range = pos.norm();
        const double amp = options.range_falloff && range > 0 ? sc.amplitude / (range * range)
                                                               : sc.amplitude;
        const double d_tx = (pos - ptx).norm();
        for (std::size_t r = 0; r < nr; ++r) {
          const double path = d_tx + (pos - geometry.rx(r)).norm();
          const Complex a = std::polar(amp, k0 * path);
          Complex* row = &cube.data(t, r, l, std::size_t{0});
          for (std::size_t n = 0; n < ns; ++n) row[n] += a * ramp[n];
        }
      }
    }
  }
  detail::add_noise(cube.data, options.noise, 2 * static_cast<std::uint64_t>(frame_index));
  return cube;
}

/// Synthesizes one stepped-frequency response y[m, q] = sum A exp(-j 2 pi f_q d_m / c),
/// channels Tx-major over the selected elements.
inline FrequencyResponse synth_sfcw_frame(std::span<const Scatterer> scene, const SfcwConfig& cfg,
                                          const ArrayGeometry& geometry, const NoiseModel& noise = {},
                                          std::size_t frame_index = 0) {
  cfg.validate();
  geometry.validate();
  const std::size_t nt = geometry.tx_count(), nr = geometry.rx_count(), nq = cfg.tone_count;
  FrequencyResponse resp;
  resp.config = cfg;
  resp.data = Tensor<Complex>({nt * nr, nq});
  for (const auto& sc : scene) {
    if (sc.amplitude < 0) throw std::invalid_argument("scatterer amplitude must be >= 0");
    for (std::size_t t = 0; t < nt; ++t) {
      const double d_tx = (sc.position - geometry.tx(t)).norm();
      for (std::size_t r = 0; r < nr; ++r) {
        const double path = d_tx + (sc.position - geometry.rx(r)).norm();
        Complex* row = &resp.data(t * nr + r, std::size_t{0});
        for (std::size_t q = 0; q < nq; ++q)
          row[q] += std::polar(sc.amplitude, -2.0 * kPi * cfg.tone(q) * path / kSpeedOfLight);
      }
    }
  }
  detail::add_noise(resp.data, noise, 2 * static_cast<std::uint64_t>(frame_index) + 1);
  return resp;
}

}  // namespace mmsense::sim
