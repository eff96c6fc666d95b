// SPDX-License-Identifier: Apache-2.0
// Independent reference implementations used by the tests. Each one is
// written from the defining formula, not from the library code path.
#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "mmsense/array_geometry.hpp"
#include "mmsense/common.hpp"
#include "mmsense/radar_config.hpp"

namespace oracle {

using mmsense::Complex;

/// O(N^2) DFT in long double. sign -1: forward, +1: inverse (unscaled).
inline std::vector<Complex> direct_dft(const std::vector<Complex>& x, std::size_t n, int sign) {
  using LC = std::complex<long double>;
  const long double pi = 3.141592653589793238462643383279502884L;
  std::vector<Complex> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    LC acc{};
    for (std::size_t t = 0; t < x.size(); ++t) {
      const long double ang = sign * 2.0L * pi * static_cast<long double>((k * t) % n) / static_cast<long double>(n);
      acc += LC(x[t].real(), x[t].imag()) * LC(std::cos(ang), std::sin(ang));
    }
    out[k] = {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
  }
  return out;
}

/// E[m, k] = sum_tx sum_rx |X[tx, rx, m, k]|^2, written as the explicit
/// triple loop.
inline std::vector<std::vector<double>> triple_sum_energy(const mmsense::Tensor<Complex>& xd) {
  const std::size_t nt = xd.dim(0), nr = xd.dim(1), nm = xd.dim(2), nk = xd.dim(3);
  std::vector<std::vector<double>> e(nm, std::vector<double>(nk, 0.0));
  for (std::size_t m = 0; m < nm; ++m)
    for (std::size_t k = 0; k < nk; ++k) {
      long double acc = 0;
      for (std::size_t t = 0; t < nt; ++t)
        for (std::size_t r = 0; r < nr; ++r) {
          const Complex v = xd(t, r, m, k);
          acc += static_cast<long double>(v.real()) * v.real() + static_cast<long double>(v.imag()) * v.imag();
        }
      e[m][k] = static_cast<double>(acc);
    }
  return e;
}

/// Back-projection of one voxel from its definition: for every Tx/Rx pair,
/// the round-trip path d, the profile sample nearest to rho = d/2, and the
/// phase compensation exp(+j k0 d).
inline Complex voxel_sum(const mmsense::Tensor<Complex>& profiles, double delta_rho, double k0,
                         const mmsense::ArrayGeometry& g, double x, double y, double z) {
  std::complex<long double> acc{};
  const std::size_t nn = profiles.dim(1);
  for (std::size_t t = 0; t < g.tx_count(); ++t)
    for (std::size_t r = 0; r < g.rx_count(); ++r) {
      const auto tx = g.tx(t), rx = g.rx(r);
      const double d = std::sqrt((x - tx.x) * (x - tx.x) + (y - tx.y) * (y - tx.y) + (z - tx.z) * (z - tx.z)) +
                       std::sqrt((x - rx.x) * (x - rx.x) + (y - rx.y) * (y - rx.y) + (z - rx.z) * (z - rx.z));
      const long long idx = std::llround(d / (2.0 * delta_rho));
      if (idx < 0 || idx >= static_cast<long long>(nn)) continue;
      const Complex s = profiles(t * g.rx_count() + r, static_cast<std::size_t>(idx));
      const std::complex<long double> ph(std::cos(static_cast<long double>(k0) * d),
                                         std::sin(static_cast<long double>(k0) * d));
      acc += std::complex<long double>(s.real(), s.imag()) * ph;
    }
  return {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
}

/// Rodrigues rotation about a unit axis.
inline Eigen::Matrix3d axis_angle(const Eigen::Vector3d& axis, double angle) {
  const Eigen::Vector3d k = axis.normalized();
  Eigen::Matrix3d kx;
  kx << 0, -k.z(), k.y(), k.z(), 0, -k.x(), -k.y(), k.x(), 0;
  return Eigen::Matrix3d::Identity() + std::sin(angle) * kx + (1 - std::cos(angle)) * kx * kx;
}

/// Rotation angle of the relative rotation via quaternions:
/// 2 * acos(|<qa, qb>|), in degrees.
inline double quaternion_angle_deg(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) {
  const Eigen::Quaterniond qa(a), qb(b);
  const double dot = std::min(1.0, std::abs(qa.dot(qb)));
  return 2.0 * std::acos(dot) * 180.0 / 3.141592653589793238462643383279502884;
}

/// Uniformly random rotation from a normalized Gaussian quaternion.
inline Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q.toRotationMatrix();
}

}  // namespace oracle
