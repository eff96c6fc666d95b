// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mmsense/common.hpp"

namespace mmsense {

/// FMCW chirp and frame timing. Defaults describe the cascaded 77 GHz
/// sensor: 60.012 MHz/us slope, 256 complex samples at 4.4 MS/s, 64 loops of
/// 12 time-multiplexed chirps.
struct FmcwConfig {
  double start_frequency = 77.0e9;  // Hz
  double slope = 60.012e12;         // Hz/s
  std::size_t samples_per_chirp = 256;
  double sample_rate = 4.4e6;  // Hz
  std::size_t loops_per_frame = 64;
  double chirp_interval = 72.4e-6;   // s, spacing between TDM chirps inside a loop
  double loop_interval = 868.8e-6;   // s
  double frame_rate = 10.0;          // Hz

  double sampled_bandwidth() const {
    return slope * static_cast<double>(samples_per_chirp) / sample_rate;
  }
  double range_resolution() const { return kSpeedOfLight / (2.0 * sampled_bandwidth()); }
  double wavelength() const { return kSpeedOfLight / start_frequency; }
  double wavenumber() const { return 2.0 * kPi * start_frequency / kSpeedOfLight; }
  double velocity_resolution() const {
    return wavelength() / (2.0 * static_cast<double>(loops_per_frame) * loop_interval);
  }
  /// Largest range whose beat frequency stays below the complex sample rate.
  double max_range() const { return sample_rate * kSpeedOfLight / (2.0 * slope); }
  /// Range spanned by one bin of an n-point range FFT.
  double range_bin_spacing(std::size_t fft_length) const {
    return sample_rate * kSpeedOfLight / (2.0 * slope * static_cast<double>(fft_length));
  }
  double max_unambiguous_velocity() const { return wavelength() / (4.0 * loop_interval); }
  void validate() const {
    if (!(start_frequency > 0)) throw std::invalid_argument("fmcw.start_frequency must be > 0");
    if (!(slope > 0)) throw std::invalid_argument("fmcw.slope must be > 0");
    if (samples_per_chirp < 1) throw std::invalid_argument("fmcw.samples_per_chirp must be >= 1");
    if (!(sample_rate > 0)) throw std::invalid_argument("fmcw.sample_rate must be > 0");
    if (loops_per_frame < 1) throw std::invalid_argument("fmcw.loops_per_frame must be >= 1");
    if (!(chirp_interval > 0)) throw std::invalid_argument("fmcw.chirp_interval must be > 0");
    if (!(loop_interval > 0)) throw std::invalid_argument("fmcw.loop_interval must be > 0");
    if (!(frame_rate > 0)) throw std::invalid_argument("fmcw.frame_rate must be > 0");
  }
};

/// Stepped-frequency tone plan: Q uniformly spaced tones from start to stop.
struct SfcwConfig {
  double start_frequency = 63.0e9;
  double stop_frequency = 66.4e9;
  std::size_t tone_count = 128;
  double frame_rate = 10.0;

  double tone_spacing() const {
    return (stop_frequency - start_frequency) / static_cast<double>(tone_count - 1);
  }
  double tone(std::size_t q) const {
    return start_frequency + static_cast<double>(q) * tone_spacing();
  }
  double range_resolution() const {
    return kSpeedOfLight / (2.0 * (stop_frequency - start_frequency));
  }
  double wavenumber() const { return 2.0 * kPi * start_frequency / kSpeedOfLight; }
  /// Range sampling interval of an n_fft-point IFFT over the tones.
  double range_sample_interval(std::size_t n_fft) const {
    return kSpeedOfLight / (2.0 * static_cast<double>(n_fft) * tone_spacing());
  }

  void validate() const {
    if (!(start_frequency > 0)) throw std::invalid_argument("sfcw.start_frequency must be > 0");
    if (!(stop_frequency > start_frequency))
      throw std::invalid_argument("sfcw.stop_frequency must exceed start_frequency");
    if (tone_count < 2) throw std::invalid_argument("sfcw.tone_count must be >= 2");
    if (!(frame_rate > 0)) throw std::invalid_argument("sfcw.frame_rate must be > 0");
  }
};

}  // namespace mmsense
