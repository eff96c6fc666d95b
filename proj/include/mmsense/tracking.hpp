// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <map>
#include <optional>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "mmsense/array_geometry.hpp"
#include "mmsense/fmcw_pointcloud.hpp"
#include "mmsense/sfcw_tube.hpp"

namespace mmsense::tracking {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Power over an x–z grid, indexed (x, z).
struct Heatmap {
  Tensor<double> power;
  std::vector<double> x_axis, z_axis;
  bool in_db = false;

  std::size_t nx() const { return x_axis.size(); }
  std::size_t nz() const { return z_axis.size(); }
};

/// Capon spectrum 1 / (a^H R^-1 a) for each column of `steering`, given the
/// Cholesky factor of R.
inline std::vector<double> capon_power(const Eigen::LLT<ComplexMatrix>& chol, const ComplexMatrix& steering) {
  const ComplexMatrix w = chol.matrixL().solve(steering);
  std::vector<double> out(static_cast<std::size_t>(steering.cols()));
  for (Eigen::Index c = 0; c < steering.cols(); ++c) out[static_cast<std::size_t>(c)] = 1.0 / w.col(c).squaredNorm();
  return out;
}

/// Capon spectrum for R = S S^H / N + delta I with N snapshots (columns of
/// S) fewer than channels, through the matrix inversion lemma:
///   a^H R^-1 a = (|a|^2 - |L_G^-1 S^H a|^2 / N) / delta,  G = S^H S / N + delta I.
inline std::vector<double> capon_power_lowrank(const ComplexMatrix& snapshots, double delta,
                                               const ComplexMatrix& steering) {
  if (!(delta > 0.0)) throw std::invalid_argument("capon_power_lowrank: loading must be positive");
  const double n = static_cast<double>(snapshots.cols());
  ComplexMatrix gram = snapshots.adjoint() * snapshots / n;
  gram.diagonal().array() += delta;
  const Eigen::LLT<ComplexMatrix> chol(gram);
  const ComplexMatrix z = chol.matrixL().solve(snapshots.adjoint() * steering);
  std::vector<double> out(static_cast<std::size_t>(steering.cols()));
  for (Eigen::Index c = 0; c < steering.cols(); ++c) {
    const double q = (steering.col(c).squaredNorm() - z.col(c).squaredNorm() / n) / delta;
    out[static_cast<std::size_t>(c)] = 1.0 / q;
  }
  return out;
}

/// Factorizes R + loading*trace(R)/M*I; throws when the result is not
/// positive definite.
inline Eigen::LLT<ComplexMatrix> loaded_cholesky(const ComplexMatrix& cov, double loading) {
  if (loading < 0) throw std::invalid_argument("mvdr: diagonal loading must be >= 0");
  const auto m = cov.rows();
  const double tr = cov.trace().real();
  ComplexMatrix loaded = cov;
  loaded.diagonal().array() += Complex(loading * tr / static_cast<double>(m), 0.0);
  Eigen::LLT<ComplexMatrix> chol(loaded);
  bool ok = chol.info() == Eigen::Success;
  if (ok) {
    // LLT does not flag semidefinite input reliably; require a usable pivot.
    const auto diag = chol.matrixLLT().diagonal().real();
    ok = diag.array().square().minCoeff() > 1e-12 * tr / static_cast<double>(m);
  }
  if (!ok)
    throw Error(loading == 0 ? "mvdr: sample covariance is singular; use a nonzero diagonal loading"
                             : "mvdr: loaded covariance is not positive definite");
  return chol;
}

/// R = (1/N) sum_n x_n x_n^H over the columns of `snapshots` (channels x N).
inline ComplexMatrix sample_covariance(const ComplexMatrix& snapshots) {
  if (snapshots.cols() < 1) throw std::invalid_argument("mvdr: at least one snapshot required");
  return snapshots * snapshots.adjoint() / static_cast<double>(snapshots.cols());
}

struct MvdrGrid {
  std::vector<double> x_axis;
  std::vector<double> z_axis;
  /// Forward (y) planes searched; each x–z cell keeps its strongest plane.
  std::vector<double> depths;
};

inline MvdrGrid default_mvdr_grid() {
  return {sfcw::uniform_axis(-1.8, 0.06, 61), sfcw::uniform_axis(-0.96, 0.06, 33),
          sfcw::uniform_axis(0.5, 0.1, 19)};
}

/// Capon heatmap from a range-processed cube (tx, rx, loop, range bin): the
/// slow-time loops are the snapshots. Each x–z cell at each depth plane is
/// assigned the range bin of its distance from the array; the covariance of
/// that bin is loaded and inverted once, and unit-norm steering vectors
/// exp(+j k0 (|p - tx| + |p - rx|))/sqrt(M) toward the cell position p are
/// evaluated. Bins carrying no energy map to zero power.
inline Heatmap mvdr_heatmap(const Tensor<Complex>& range_cube, const ArrayGeometry& geometry,
                            const FmcwConfig& cfg, const MvdrGrid& grid, double loading,
                            double range_per_bin) {
  if (range_cube.rank() != 4) throw std::invalid_argument("mvdr: expected (tx, rx, loop, range) tensor");
  if (grid.x_axis.empty() || grid.z_axis.empty() || grid.depths.empty())
    throw std::invalid_argument("mvdr: empty heatmap grid");
  const std::size_t nt = range_cube.dim(0), nr = range_cube.dim(1), nl = range_cube.dim(2), nk = range_cube.dim(3);
  if (nt * nr != geometry.channel_count()) throw std::invalid_argument("mvdr: channel count does not match geometry");
  const auto m = static_cast<Eigen::Index>(geometry.channel_count());
  const double k0 = cfg.wavenumber();
  const double norm = 1.0 / std::sqrt(static_cast<double>(m));
  std::vector<Vec3> tx(nt), rx(nr);
  for (std::size_t t = 0; t < nt; ++t) tx[t] = geometry.tx(t);
  for (std::size_t r = 0; r < nr; ++r) rx[r] = geometry.rx(r);

  // Phase of channel (t, r) follows the exact two-way path to the cell.
  std::vector<Complex> ptx(nt), prx(nr);
  auto fill_steering = [&](auto column, const Vec3& p) {
    for (std::size_t t = 0; t < nt; ++t) ptx[t] = std::polar(norm, k0 * (p - tx[t]).norm());
    for (std::size_t r = 0; r < nr; ++r) prx[r] = std::polar(1.0, k0 * (p - rx[r]).norm());
    for (std::size_t t = 0; t < nt; ++t)
      for (std::size_t r = 0; r < nr; ++r) column(static_cast<Eigen::Index>(t * nr + r)) = ptx[t] * prx[r];
  };

  // Group cells by range bin so each covariance is factorized once.
  struct Cell {
    std::size_t ix, iz;
    Vec3 p;
  };
  std::map<std::size_t, std::vector<Cell>> by_bin;
  for (std::size_t ix = 0; ix < grid.x_axis.size(); ++ix)
    for (std::size_t iz = 0; iz < grid.z_axis.size(); ++iz)
      for (double y : grid.depths) {
        const Vec3 r{grid.x_axis[ix], y, grid.z_axis[iz]};
        const double range = r.norm();
        const double bin = std::round(range / range_per_bin);
        if (bin < 0 || bin >= static_cast<double>(nk)) continue;
        by_bin[static_cast<std::size_t>(bin)].push_back({ix, iz, r});
      }

  Heatmap hm{Tensor<double>({grid.x_axis.size(), grid.z_axis.size()}), grid.x_axis, grid.z_axis, false};
  ComplexMatrix snaps(m, static_cast<Eigen::Index>(nl));
  for (const auto& [bin, cells] : by_bin) {
    for (std::size_t t = 0; t < nt; ++t)
      for (std::size_t r = 0; r < nr; ++r)
        for (std::size_t l = 0; l < nl; ++l)
          snaps(static_cast<Eigen::Index>(t * nr + r), static_cast<Eigen::Index>(l)) = range_cube(t, r, l, bin);
    const double trace = snaps.squaredNorm() / static_cast<double>(nl);
    if (trace <= 0.0) continue;
    ComplexMatrix a(m, static_cast<Eigen::Index>(cells.size()));
    for (std::size_t c = 0; c < cells.size(); ++c) fill_steering(a.col(static_cast<Eigen::Index>(c)), cells[c].p);
    std::vector<double> p;
    if (loading > 0.0 && static_cast<Eigen::Index>(nl) < m)
      p = capon_power_lowrank(snaps, loading * trace / static_cast<double>(m), a);
    else
      p = capon_power(loaded_cholesky(sample_covariance(snaps), loading), a);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double& dst = hm.power(cells[c].ix, cells[c].iz);
      dst = std::max(dst, p[c]);
    }
  }
  return hm;
}

struct CfarParams {
  std::size_t window = 12;
  std::size_t guard = 3;
  double rank_fraction = 0.75;
  double scale = 6.0;
};

namespace detail {

inline void check_cfar(std::size_t n, const CfarParams& params) {
  if (params.window == 0 || params.window <= params.guard)
    throw std::invalid_argument("os_cfar: window must exceed guard");
  if (!(params.rank_fraction > 0.0 && params.rank_fraction < 1.0))
    throw std::invalid_argument("os_cfar: rank_fraction must lie in (0, 1)");
  if (n <= 2 * (params.window + params.guard))
    throw std::invalid_argument("os_cfar: profile length must exceed 2*(window+guard)");
}

}  // namespace detail

/// Ordered-statistic CFAR threshold of every cell. The reference set is up
/// to `window` cells on each side beyond `guard` cells (clipped at the
/// edges); the threshold is scale times the ceil(rank_fraction*n)-th
/// smallest of the n reference values.
inline std::vector<double> os_cfar_thresholds(std::span<const double> profile, const CfarParams& params) {
  const std::size_t n = profile.size();
  detail::check_cfar(n, params);
  std::vector<double> out(n);
  std::vector<double> ref;
  const auto span = static_cast<std::ptrdiff_t>(params.guard + params.window);
  for (std::size_t i = 0; i < n; ++i) {
    ref.clear();
    const auto ii = static_cast<std::ptrdiff_t>(i);
    for (std::ptrdiff_t j = ii - span; j <= ii + span; ++j) {
      if (j < 0 || j >= static_cast<std::ptrdiff_t>(n)) continue;
      if (std::abs(j - ii) <= static_cast<std::ptrdiff_t>(params.guard)) continue;
      ref.push_back(profile[static_cast<std::size_t>(j)]);
    }
    const auto rank = static_cast<std::size_t>(std::ceil(params.rank_fraction * static_cast<double>(ref.size())));
    const std::size_t kth = std::clamp<std::size_t>(rank, 1, ref.size()) - 1;
    std::nth_element(ref.begin(), ref.begin() + static_cast<std::ptrdiff_t>(kth), ref.end());
    out[i] = params.scale * ref[kth];
  }
  return out;
}

/// OS-CFAR detections: cells above their threshold that are also local
/// maxima (>= left neighbour, > right neighbour).
inline std::vector<std::size_t> os_cfar(std::span<const double> profile, const CfarParams& params) {
  const auto threshold = os_cfar_thresholds(profile, params);
  const std::size_t n = profile.size();
  std::vector<std::size_t> hits;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = profile[i];
    if (!(v > threshold[i])) continue;
    if (i > 0 && profile[i - 1] > v) continue;
    if (i + 1 < n && profile[i + 1] >= v) continue;
    hits.push_back(i);
  }
  return hits;
}

struct TrackParams {
  CfarParams cfar;
  double region_fraction = 0.5;
  double alpha = 0.6;
  double box_side = 1.2;
  /// Half-width (in x cells) of the neighbourhood searched around a detection.
  std::size_t neighborhood_cells = 10;
};

struct TrackState {
  double x = 0;
  double z = 0;
  bool initialized = false;
};

struct TrackOutput {
  TrackState state;
  sfcw::BBox bbox;
  bool coasting = false;
};

/// Per-column (fixed x) median removal along z, clamped at zero.
inline Tensor<double> remove_column_baseline(const Tensor<double>& power) {
  const std::size_t nx = power.dim(0), nz = power.dim(1);
  Tensor<double> out(power.shape());
  std::vector<double> col(nz);
  for (std::size_t ix = 0; ix < nx; ++ix) {
    for (std::size_t iz = 0; iz < nz; ++iz) col[iz] = power(ix, iz);
    std::vector<double> sorted = col;
    std::sort(sorted.begin(), sorted.end());
    const double median = nz % 2 ? sorted[nz / 2] : 0.5 * (sorted[nz / 2 - 1] + sorted[nz / 2]);
    for (std::size_t iz = 0; iz < nz; ++iz) out(ix, iz) = std::max(0.0, col[iz] - median);
  }
  return out;
}

/// One tracking step: baseline removal, z aggregation, OS-CFAR on the x
/// profile, 4-connected region growing around the strongest detection,
/// power-weighted centroid, exponential smoothing, fixed-size box.
inline TrackOutput track_frame(const TrackState& state, const Heatmap& heatmap, const TrackParams& params) {
  const std::size_t nx = heatmap.nx(), nz = heatmap.nz();
  if (heatmap.power.rank() != 2 || heatmap.power.dim(0) != nx || heatmap.power.dim(1) != nz || nx == 0 || nz == 0)
    throw std::invalid_argument("track_frame: heatmap shape does not match its axes");
  if (!(params.alpha > 0.0 && params.alpha <= 1.0)) throw std::invalid_argument("track_frame: alpha must lie in (0, 1]");
  if (!(params.box_side > 0.0)) throw std::invalid_argument("track_frame: box side must be positive");

  Tensor<double> linear = heatmap.power;
  if (heatmap.in_db)
    for (auto& v : linear.values()) v = std::pow(10.0, v / 10.0);
  for (double v : linear.values())
    if (!(v >= 0.0)) throw std::invalid_argument("track_frame: heatmap power must be nonnegative");
  const auto clean = remove_column_baseline(linear);

  std::vector<double> profile(nx, 0.0);
  for (std::size_t ix = 0; ix < nx; ++ix)
    for (std::size_t iz = 0; iz < nz; ++iz) profile[ix] += clean(ix, iz);

  auto coast = [&] {
    TrackOutput out{state, {}, true};
    const double cx = state.initialized ? state.x : 0.5 * (heatmap.x_axis.front() + heatmap.x_axis.back());
    const double cz = state.initialized ? state.z : 0.5 * (heatmap.z_axis.front() + heatmap.z_axis.back());
    out.bbox = {cx, cz, params.box_side};
    return out;
  };

  const auto hits = os_cfar(profile, params.cfar);
  if (hits.empty()) return coast();
  const std::size_t det = *std::max_element(hits.begin(), hits.end(),
                                            [&](std::size_t a, std::size_t b) { return profile[a] < profile[b]; });

  const std::size_t lo = det > params.neighborhood_cells ? det - params.neighborhood_cells : 0;
  const std::size_t hi = std::min(nx, det + params.neighborhood_cells + 1);
  std::size_t sx = det, sz = 0;
  for (std::size_t ix = lo; ix < hi; ++ix)
    for (std::size_t iz = 0; iz < nz; ++iz)
      if (clean(ix, iz) > clean(sx, sz)) sx = ix, sz = iz;
  const double peak = clean(sx, sz);
  if (!(peak > 0.0)) return coast();
  const double thresh = params.region_fraction * peak;

  std::vector<char> seen(nx * nz, 0);
  std::vector<std::pair<std::size_t, std::size_t>> stack{{sx, sz}};
  seen[sx * nz + sz] = 1;
  double wsum = 0, wx = 0, wz = 0;
  while (!stack.empty()) {
    const auto [ix, iz] = stack.back();
    stack.pop_back();
    const double w = clean(ix, iz);
    wsum += w;
    wx += w * heatmap.x_axis[ix];
    wz += w * heatmap.z_axis[iz];
    const std::ptrdiff_t nbr[4][2] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
    for (const auto& d : nbr) {
      const auto jx = static_cast<std::ptrdiff_t>(ix) + d[0];
      const auto jz = static_cast<std::ptrdiff_t>(iz) + d[1];
      if (jx < static_cast<std::ptrdiff_t>(lo) || jx >= static_cast<std::ptrdiff_t>(hi) || jz < 0 ||
          jz >= static_cast<std::ptrdiff_t>(nz))
        continue;
      const auto ux = static_cast<std::size_t>(jx), uz = static_cast<std::size_t>(jz);
      if (seen[ux * nz + uz] || clean(ux, uz) < thresh) continue;
      seen[ux * nz + uz] = 1;
      stack.emplace_back(ux, uz);
    }
  }
  const double mx = wx / wsum, mz = wz / wsum;

  TrackOutput out;
  if (state.initialized) {
    out.state.x = params.alpha * mx + (1.0 - params.alpha) * state.x;
    out.state.z = params.alpha * mz + (1.0 - params.alpha) * state.z;
  } else {
    out.state.x = mx;
    out.state.z = mz;
  }
  out.state.initialized = true;
  out.bbox = {out.state.x, out.state.z, params.box_side};
  return out;
}

}  // namespace mmsense::tracking
