// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string_view>

#include "mmsense/common.hpp"

namespace mmsense {

enum class Subarray { s3x4, s6x8, s12x16 };

inline Subarray parse_subarray(std::string_view name) {
  if (name == "3x4") return Subarray::s3x4;
  if (name == "6x8") return Subarray::s6x8;
  if (name == "12x16") return Subarray::s12x16;
  throw std::invalid_argument("unknown subarray '" + std::string(name) +
                              "' (expected 3x4, 6x8 or 12x16)");
}

inline std::string_view to_string(Subarray s) {
  switch (s) {
    case Subarray::s3x4: return "3x4";
    case Subarray::s6x8: return "6x8";
    case Subarray::s12x16: return "12x16";
  }
  return "unknown";
}

/// Physical Tx/Rx element positions plus the selected subset. Indices in
/// tx_selected / rx_selected refer to the physical elements, so TDM timing
/// (which depends on the physical Tx slot) survives subarray selection.
struct ArrayGeometry {
  std::vector<Vec3> tx_positions;
  std::vector<Vec3> rx_positions;
  std::vector<std::size_t> tx_selected;
  std::vector<std::size_t> rx_selected;

  std::size_t tx_count() const { return tx_selected.size(); }
  std::size_t rx_count() const { return rx_selected.size(); }
  std::size_t channel_count() const { return tx_count() * rx_count(); }

  Vec3 tx(std::size_t selected_index) const { return tx_positions.at(tx_selected.at(selected_index)); }
  Vec3 rx(std::size_t selected_index) const { return rx_positions.at(rx_selected.at(selected_index)); }

  void validate() const {
    if (tx_selected.empty() || rx_selected.empty())
      throw std::invalid_argument("array geometry: at least one Tx and one Rx must be selected");
    for (auto i : tx_selected)
      if (i >= tx_positions.size()) throw std::invalid_argument("array geometry: Tx index out of range");
    for (auto i : rx_selected)
      if (i >= rx_positions.size()) throw std::invalid_argument("array geometry: Rx index out of range");
    for (const auto& p : tx_positions)
      if (!p.finite()) throw std::invalid_argument("array geometry: non-finite Tx position");
    for (const auto& p : rx_positions)
      if (!p.finite()) throw std::invalid_argument("array geometry: non-finite Rx position");
  }

  /// Selects the first tx_n transmitters and rx_n receivers.
  ArrayGeometry select_leading(std::size_t tx_n, std::size_t rx_n) const {
    if (tx_n > tx_positions.size() || rx_n > rx_positions.size())
      throw std::invalid_argument("array geometry: subarray larger than the physical array");
    ArrayGeometry g = *this;
    g.tx_selected.resize(tx_n);
    g.rx_selected.resize(rx_n);
    std::iota(g.tx_selected.begin(), g.tx_selected.end(), std::size_t{0});
    std::iota(g.rx_selected.begin(), g.rx_selected.end(), std::size_t{0});
    return g;
  }

  ArrayGeometry select(Subarray preset) const {
    switch (preset) {
      case Subarray::s3x4: return select_leading(3, 4);
      case Subarray::s6x8: return select_leading(6, 8);
      case Subarray::s12x16: return select_leading(12, 16);
    }
    throw std::invalid_argument("unknown subarray");
  }
};

/// Virtual element positions p_tx[i] + p_rx[j], Tx-major then Rx.
inline std::vector<Vec3> build_virtual_array(const ArrayGeometry& geometry) {
  geometry.validate();
  std::vector<Vec3> out;
  out.reserve(geometry.channel_count());
  for (std::size_t t = 0; t < geometry.tx_count(); ++t)
    for (std::size_t r = 0; r < geometry.rx_count(); ++r) out.push_back(geometry.tx(t) + geometry.rx(r));
  return out;
}

/// Planar MIMO layout in the x-z plane facing +y. Receivers form a line along
/// x at `spacing`; transmitters sit on a tx_columns x tx_rows lattice with
/// column pitch rx_count*spacing and row pitch `spacing`, so every Tx–Rx pair
/// fills one cell of a (tx_columns*rx_count) x tx_rows virtual rectangle.
/// Tx indices run row-fastest, so any leading block of whole columns (or of a
/// partial first column) still yields a filled rectangle. The full virtual
/// array is centred on the origin.
inline ArrayGeometry rectangular_mimo(std::size_t tx_columns, std::size_t tx_rows, std::size_t rx_count,
                                      double spacing) {
  if (tx_columns == 0 || tx_rows == 0 || rx_count == 0 || !(spacing > 0))
    throw std::invalid_argument("rectangular_mimo: counts and spacing must be positive");
  ArrayGeometry g;
  const double nx = static_cast<double>(tx_columns * rx_count);
  const double nz = static_cast<double>(tx_rows);
  // Virtual x spans [0, nx-1]*spacing and z spans [0, nz-1]*spacing before
  // centring; split the offset between Tx and Rx.
  const double x_off = -0.5 * (nx - 1.0) * spacing;
  const double z_off = -0.5 * (nz - 1.0) * spacing;
  for (std::size_t r = 0; r < rx_count; ++r)
    g.rx_positions.push_back({x_off + static_cast<double>(r) * spacing, 0.0, 0.0});
  for (std::size_t c = 0; c < tx_columns; ++c)
    for (std::size_t row = 0; row < tx_rows; ++row)
      g.tx_positions.push_back({static_cast<double>(c * rx_count) * spacing, 0.0,
                                z_off + static_cast<double>(row) * spacing});
  g.tx_selected.resize(g.tx_positions.size());
  g.rx_selected.resize(g.rx_positions.size());
  std::iota(g.tx_selected.begin(), g.tx_selected.end(), std::size_t{0});
  std::iota(g.rx_selected.begin(), g.rx_selected.end(), std::size_t{0});
  return g;
}

/// Default 12 Tx x 16 Rx cascade layout (32 x 6 virtual rectangle at half
/// wavelength).
inline ArrayGeometry default_fmcw_array(double wavelength) {
  return rectangular_mimo(2, 6, 16, 0.5 * wavelength);
}

/// Default imaging array for the stepped-frequency sensor: 16 Tx x 16 Rx,
/// 32 x 8 virtual rectangle.
inline ArrayGeometry default_sfcw_array(double wavelength) {
  return rectangular_mimo(2, 8, 16, 0.5 * wavelength);
}

}  // namespace mmsense
