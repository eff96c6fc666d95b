// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mmsense/common.hpp"
#include "mmsense/radar_config.hpp"

namespace mmsense {

/// One FMCW frame: complex samples indexed (tx, rx, loop, sample).
struct RadarCube {
  Tensor<Complex> data;
  FmcwConfig config;
  std::size_t frame_index = 0;
  /// Physical Tx slot of each Tx row, needed for TDM timing.
  std::vector<std::size_t> tx_slots;
  std::vector<std::string> warnings;

  std::size_t tx_count() const { return data.dim(0); }
  std::size_t rx_count() const { return data.dim(1); }
  std::size_t loop_count() const { return data.dim(2); }
  std::size_t sample_count() const { return data.dim(3); }

  void validate() const {
    if (data.rank() != 4) throw std::invalid_argument("radar cube must be 4-D (tx, rx, loop, sample)");
    for (auto d : data.shape())
      if (d == 0) throw std::invalid_argument("radar cube dimensions must be >= 1");
    if (!tx_slots.empty() && tx_slots.size() != tx_count())
      throw std::invalid_argument("radar cube: tx_slots size does not match Tx dimension");
  }

  std::size_t tx_slot(std::size_t t) const { return tx_slots.empty() ? t : tx_slots[t]; }
};

/// One stepped-frequency frame: complex responses indexed (channel, tone).
struct FrequencyResponse {
  Tensor<Complex> data;
  SfcwConfig config;

  std::size_t channel_count() const { return data.dim(0); }
  std::size_t tone_count() const { return data.dim(1); }
};

}  // namespace mmsense
