// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <span>
#include <string_view>

#include "mmsense/common.hpp"

namespace mmsense::dsp {

inline constexpr double kDbFloor = 1e-12;

inline constexpr bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline constexpr std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

namespace detail {

// exp(-j 2 pi k / n) for k < n/2, computed directly (error stays at
// O(eps log n)) and cached per thread.
inline const std::vector<Complex>& twiddle_table(std::size_t n) {
  thread_local std::map<std::size_t, std::vector<Complex>> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<Complex> tw(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k)
    tw[k] = std::polar(1.0, -2.0 * kPi * static_cast<double>(k) / static_cast<double>(n));
  return cache.emplace(n, std::move(tw)).first->second;
}

// Iterative radix-2 Cooley-Tukey, unnormalized. sign = -1 forward, +1 inverse.
inline void fft_pow2(std::span<Complex> a, int sign) {
  const std::size_t n = a.size();
  if (n < 2) return;
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const auto& table = twiddle_table(n);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const Complex t = sign < 0 ? table[k * stride] : std::conj(table[k * stride]);
        const Complex u = a[i + k];
        const Complex v = a[i + k + half] * t;
        a[i + k] = u + v;
        a[i + k + half] = u - v;
      }
    }
  }
}

// Bluestein chirp-z for arbitrary lengths, unnormalized.
inline void fft_any(std::span<Complex> a, int sign) {
  const std::size_t n = a.size();
  if (is_pow2(n)) {
    fft_pow2(a, sign);
    return;
  }
  const std::size_t m = next_pow2(2 * n - 1);
  std::vector<Complex> chirp(n);
  for (std::size_t k = 0; k < n; ++k) {
    // k^2 mod 2n keeps the angle argument small for large k.
    const auto k2 = static_cast<double>((k * k) % (2 * n));
    chirp[k] = std::polar(1.0, sign * kPi * k2 / static_cast<double>(n));
  }
  std::vector<Complex> fa(m), fb(m);
  for (std::size_t k = 0; k < n; ++k) fa[k] = a[k] * chirp[k];
  fb[0] = std::conj(chirp[0]);
  for (std::size_t k = 1; k < n; ++k) fb[k] = fb[m - k] = std::conj(chirp[k]);
  fft_pow2(fa, -1);
  fft_pow2(fb, -1);
  for (std::size_t k = 0; k < m; ++k) fa[k] *= fb[k];
  fft_pow2(fa, +1);
  const double scale = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < n; ++k) a[k] = fa[k] * scale * chirp[k];
}

inline void check_signal(std::span<const Complex> signal, std::size_t fft_length) {
  if (signal.empty()) throw std::invalid_argument("dft: empty signal");
  if (fft_length < signal.size())
    throw std::invalid_argument("dft: fft_length " + std::to_string(fft_length) +
                                " shorter than signal length " + std::to_string(signal.size()));
  for (const auto& v : signal)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::invalid_argument("dft: non-finite sample");
}

}  // namespace detail

/// X[k] = sum_n x[n] exp(-j 2 pi k n / N), with x zero-padded to N = fft_length.
inline std::vector<Complex> dft_forward(std::span<const Complex> signal, std::size_t fft_length) {
  detail::check_signal(signal, fft_length);
  std::vector<Complex> out(fft_length);
  std::copy(signal.begin(), signal.end(), out.begin());
  detail::fft_any(out, -1);
  return out;
}

inline std::vector<Complex> dft_forward(std::span<const Complex> signal) {
  return dft_forward(signal, next_pow2(signal.size()));
}

/// x[n] = (1/N) sum_k X[k] exp(+j 2 pi k n / N).
inline std::vector<Complex> dft_inverse(std::span<const Complex> spectrum, std::size_t fft_length) {
  detail::check_signal(spectrum, fft_length);
  std::vector<Complex> out(fft_length);
  std::copy(spectrum.begin(), spectrum.end(), out.begin());
  detail::fft_any(out, +1);
  const double scale = 1.0 / static_cast<double>(fft_length);
  for (auto& v : out) v *= scale;
  return out;
}

inline std::vector<Complex> dft_inverse(std::span<const Complex> spectrum) {
  return dft_inverse(spectrum, next_pow2(spectrum.size()));
}

/// In-place transform of a buffer whose length is already the FFT length.
/// Used by the pipelines on their strided slices.
inline void fft_inplace(std::span<Complex> buffer, bool inverse = false) {
  detail::fft_any(buffer, inverse ? +1 : -1);
  if (inverse) {
    const double scale = 1.0 / static_cast<double>(buffer.size());
    for (auto& v : buffer) v *= scale;
  }
}

enum class WindowKind { rectangular, hann, hamming };

struct Window {
  WindowKind kind = WindowKind::rectangular;
  std::size_t length = 1;
};

inline WindowKind parse_window_kind(std::string_view name) {
  if (name == "rectangular") return WindowKind::rectangular;
  if (name == "hann") return WindowKind::hann;
  if (name == "hamming") return WindowKind::hamming;
  throw std::invalid_argument("unknown window kind '" + std::string(name) + "'");
}

inline std::string_view to_string(WindowKind kind) {
  switch (kind) {
    case WindowKind::rectangular: return "rectangular";
    case WindowKind::hann: return "hann";
    case WindowKind::hamming: return "hamming";
  }
  return "unknown";
}

/// Symmetric window coefficients (hann endpoints are exactly zero).
inline std::vector<double> window_coefficients(WindowKind kind, std::size_t length) {
  if (length == 0) throw std::invalid_argument("window: length must be positive");
  std::vector<double> w(length, 1.0);
  if (kind == WindowKind::rectangular || length == 1) return w;
  const double denom = static_cast<double>(length - 1);
  for (std::size_t n = 0; n < length; ++n) {
    const double c = std::cos(2.0 * kPi * static_cast<double>(n) / denom);
    w[n] = kind == WindowKind::hann ? 0.5 * (1.0 - c) : 0.54 - 0.46 * c;
  }
  // Pin the symmetric endpoints; cos(2pi) is not exactly 1 in floating point.
  if (kind == WindowKind::hann) w.front() = w.back() = 0.0;
  return w;
}

inline std::vector<Complex> apply_window(std::span<const Complex> signal, const Window& window) {
  if (window.length != signal.size())
    throw std::invalid_argument("apply_window: window length " + std::to_string(window.length) +
                                " != signal length " + std::to_string(signal.size()));
  const auto w = window_coefficients(window.kind, window.length);
  std::vector<Complex> out(signal.size());
  for (std::size_t i = 0; i < signal.size(); ++i) out[i] = signal[i] * w[i];
  return out;
}

inline double power_to_db(double power, double floor = kDbFloor) {
  if (!(power >= 0.0)) throw std::invalid_argument("power_to_db: negative or NaN power");
  return 10.0 * std::log10(std::max(power, floor));
}

}  // namespace mmsense::dsp
