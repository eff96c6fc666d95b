// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mmsense/array_geometry.hpp"
#include "mmsense/dsp.hpp"
#include "mmsense/measurements.hpp"

namespace mmsense::sfcw {

struct RangeProfiles {
  Tensor<Complex> data;  // (channel, range sample)
  double delta_rho = 0;  // m per range sample

  std::size_t channel_count() const { return data.dim(0); }
  std::size_t sample_count() const { return data.dim(1); }
};

/// Windowed, zero-padded IFFT along the tones of every channel. The range
/// sampling interval is c / (2 n_fft delta_f).
inline RangeProfiles range_profiles(const FrequencyResponse& response, dsp::WindowKind window,
                                    std::size_t n_fft) {
  const std::size_t nm = response.channel_count(), nq = response.tone_count();
  if (nq != response.config.tone_count)
    throw std::invalid_argument("range_profiles: response tone count does not match config");
  if (n_fft < nq)
    throw std::invalid_argument("range_profiles: n_fft " + std::to_string(n_fft) + " < tone count " +
                                std::to_string(nq));
  const auto w = dsp::window_coefficients(window, nq);
  RangeProfiles out{Tensor<Complex>({nm, n_fft}), response.config.range_sample_interval(n_fft)};
  for (std::size_t m = 0; m < nm; ++m) {
    Complex* dst = &out.data(m, std::size_t{0});
    const Complex* src = &response.data(m, std::size_t{0});
    for (std::size_t q = 0; q < nq; ++q) dst[q] = src[q] * w[q];
    dsp::fft_inplace(std::span<Complex>(dst, n_fft), /*inverse=*/true);
  }
  return out;
}

/// Uniformly spaced axis: start + i*step for i < count.
inline std::vector<double> uniform_axis(double start, double step, std::size_t count) {
  std::vector<double> a(count);
  for (std::size_t i = 0; i < count; ++i) a[i] = start + static_cast<double>(i) * step;
  return a;
}

inline std::vector<double> linspace(double lo, double hi, std::size_t count) {
  if (count < 2) throw std::invalid_argument("linspace: count must be >= 2");
  return uniform_axis(lo, (hi - lo) / static_cast<double>(count - 1), count);
}

struct VoxelGrid {
  std::vector<double> x, y, z;

  std::size_t nx() const { return x.size(); }
  std::size_t ny() const { return y.size(); }
  std::size_t nz() const { return z.size(); }
  std::size_t voxel_count() const { return nx() * ny() * nz(); }
  static double spacing(const std::vector<double>& axis) { return axis[1] - axis[0]; }

  void validate() const {
    for (const auto* axis : {&x, &y, &z}) {
      if (axis->size() < 2) throw std::invalid_argument("voxel grid: every axis needs >= 2 samples");
      const double step = (*axis)[1] - (*axis)[0];
      if (!(step > 0)) throw std::invalid_argument("voxel grid: axes must be strictly ascending");
      for (std::size_t i = 2; i < axis->size(); ++i)
        if (std::abs(((*axis)[i] - (*axis)[i - 1]) - step) > 1e-9 * std::max(1.0, std::abs(step)) + 1e-12)
          throw std::invalid_argument("voxel grid: axes must be uniformly spaced");
    }
  }
};

/// 3 cm lateral/vertical spacing: x 121 samples over [-1.8, 1.8], z 67
/// samples centred on 0, y 68 samples over [0.3, 2.3] m forward.
inline VoxelGrid default_voxel_grid() {
  return {uniform_axis(-1.8, 0.03, 121), linspace(0.3, 2.3, 68), uniform_axis(-0.99, 0.03, 67)};
}

enum class RangeInterpolation { nearest, linear };

/// Coherent back-projection of every channel onto the voxel grid:
///   V(r) = sum_m g[m, rho_m(r)/delta_rho] exp(j k0 d_m(r)),  rho = d/2,
/// where d_m is the exact Tx->voxel->Rx path. Samples outside the profile
/// contribute nothing. Output is (x, y, z).
inline Tensor<Complex> backproject(const RangeProfiles& profiles, const VoxelGrid& grid,
                                   const ArrayGeometry& geometry, const SfcwConfig& cfg,
                                   RangeInterpolation interp = RangeInterpolation::nearest,
                                   std::size_t workers = 1) {
  grid.validate();
  geometry.validate();
  const std::size_t nm = profiles.channel_count(), nn = profiles.sample_count();
  if (nm != geometry.channel_count())
    throw std::invalid_argument("backproject: profile channels (" + std::to_string(nm) +
                                ") != geometry channels (" + std::to_string(geometry.channel_count()) + ")");
  const double k0 = cfg.wavenumber();
  const double inv_drho = 1.0 / profiles.delta_rho;
  const std::size_t nx = grid.nx(), ny = grid.ny(), nz = grid.nz(), nr = geometry.rx_count();
  std::vector<Vec3> tx(geometry.tx_count()), rx(nr);
  for (std::size_t t = 0; t < tx.size(); ++t) tx[t] = geometry.tx(t);
  for (std::size_t r = 0; r < nr; ++r) rx[r] = geometry.rx(r);

  Tensor<Complex> volume({nx, ny, nz});
  parallel_for(
      nx,
      [&](std::size_t ix) {
        std::vector<double> d_rx(nr);
        for (std::size_t iy = 0; iy < ny; ++iy)
          for (std::size_t iz = 0; iz < nz; ++iz) {
            const Vec3 v{grid.x[ix], grid.y[iy], grid.z[iz]};
            for (std::size_t r = 0; r < nr; ++r) d_rx[r] = (v - rx[r]).norm();
            Complex acc{};
            for (std::size_t t = 0; t < tx.size(); ++t) {
              const double d_tx = (v - tx[t]).norm();
              for (std::size_t r = 0; r < nr; ++r) {
                const double d = d_tx + d_rx[r];
                const double pos = 0.5 * d * inv_drho;
                const Complex* g = &profiles.data(t * nr + r, std::size_t{0});
                Complex sample{};
                if (interp == RangeInterpolation::nearest) {
                  const double idx = std::round(pos);
                  if (idx < 0 || idx >= static_cast<double>(nn)) continue;
                  sample = g[static_cast<std::size_t>(idx)];
                } else {
                  const double lo = std::floor(pos);
                  if (lo < 0 || lo + 1 >= static_cast<double>(nn)) continue;
                  const double frac = pos - lo;
                  const auto i0 = static_cast<std::size_t>(lo);
                  sample = g[i0] * (1.0 - frac) + g[i0 + 1] * frac;
                }
                acc += sample * std::polar(1.0, k0 * d);
              }
            }
            volume(ix, iy, iz) = acc;
          }
      },
      workers);
  return volume;
}

inline Tensor<double> magnitude(const Tensor<Complex>& volume) {
  Tensor<double> out(volume.shape());
  for (std::size_t i = 0; i < volume.size(); ++i) out.values()[i] = std::abs(volume.values()[i]);
  return out;
}

/// Square crop window on the x–z plane.
struct BBox {
  double x = 0;
  double z = 0;
  double side = 1.2;
};

/// Index window [begin, end) of one axis.
struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
  bool empty() const { return end <= begin; }
};

/// Cells covered by a box of the given side centred at `center`: a fixed
/// count round(side/step) starting at round((center - side/2 - axis0)/step),
/// clipped to the axis.
inline IndexRange box_cells(const std::vector<double>& axis, double center, double side) {
  const double step = axis[1] - axis[0];
  const auto snap = [](double v) { return std::round(v * 1e6) / 1e6; };
  const double first = std::round(snap((center - 0.5 * side - axis[0]) / step));
  const double count = std::round(snap(side / step));
  const double last = first + count;
  const double n = static_cast<double>(axis.size());
  IndexRange r;
  r.begin = static_cast<std::size_t>(std::clamp(first, 0.0, n));
  r.end = static_cast<std::size_t>(std::clamp(last, 0.0, n));
  return r;
}

struct Tube {
  Tensor<float> volumes;  // (frame, x', y, z')
  std::vector<double> x_axis, y_axis, z_axis;
  std::vector<std::pair<double, double>> crop_centers;  // per-frame (x_c, z_c)
  IndexRange x_roi, z_roi;                              // in source-grid cells
};

/// Sequence-level union ROI of the per-frame boxes (full y axis kept), then
/// per-frame masking of voxels outside that frame's own box. Volumes are
/// (x, y, z) magnitude tensors on `grid`.
inline Tube crop_tube(const std::vector<Tensor<double>>& volumes, const VoxelGrid& grid,
                      const std::vector<BBox>& boxes) {
  grid.validate();
  if (volumes.size() != boxes.size())
    throw std::invalid_argument("crop_tube: need exactly one bbox per frame (" + std::to_string(volumes.size()) +
                                " frames, " + std::to_string(boxes.size()) + " boxes)");
  if (volumes.empty()) throw std::invalid_argument("crop_tube: empty sequence");
  std::vector<IndexRange> fx(boxes.size()), fz(boxes.size());
  IndexRange ux{grid.nx(), 0}, uz{grid.nz(), 0};
  for (std::size_t f = 0; f < boxes.size(); ++f) {
    const auto& v = volumes[f];
    if (v.rank() != 3 || v.dim(0) != grid.nx() || v.dim(1) != grid.ny() || v.dim(2) != grid.nz())
      throw std::invalid_argument("crop_tube: frame " + std::to_string(f) + " volume shape does not match grid");
    fx[f] = box_cells(grid.x, boxes[f].x, boxes[f].side);
    fz[f] = box_cells(grid.z, boxes[f].z, boxes[f].side);
    if (fx[f].empty() || fz[f].empty())
      throw Error("crop_tube: bbox of frame " + std::to_string(f) + " is disjoint from the voxel grid");
    ux = {std::min(ux.begin, fx[f].begin), std::max(ux.end, fx[f].end)};
    uz = {std::min(uz.begin, fz[f].begin), std::max(uz.end, fz[f].end)};
  }
  Tube tube;
  tube.x_roi = ux;
  tube.z_roi = uz;
  tube.x_axis.assign(grid.x.begin() + static_cast<std::ptrdiff_t>(ux.begin), grid.x.begin() + static_cast<std::ptrdiff_t>(ux.end));
  tube.y_axis = grid.y;
  tube.z_axis.assign(grid.z.begin() + static_cast<std::ptrdiff_t>(uz.begin), grid.z.begin() + static_cast<std::ptrdiff_t>(uz.end));
  const std::size_t ny = grid.ny();
  tube.volumes = Tensor<float>({volumes.size(), ux.size(), ny, uz.size()});
  for (std::size_t f = 0; f < volumes.size(); ++f) {
    tube.crop_centers.emplace_back(boxes[f].x, boxes[f].z);
    for (std::size_t ix = fx[f].begin; ix < fx[f].end; ++ix)
      for (std::size_t iy = 0; iy < ny; ++iy)
        for (std::size_t iz = fz[f].begin; iz < fz[f].end; ++iz)
          tube.volumes(f, ix - ux.begin, iy, iz - uz.begin) = static_cast<float>(volumes[f](ix, iy, iz));
  }
  return tube;
}

}  // namespace mmsense::sfcw
