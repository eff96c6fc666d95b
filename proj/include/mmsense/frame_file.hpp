// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>

#include "mmsense/common.hpp"

namespace mmsense::io {

// Layout (little-endian throughout):
//   "DGHM" | u16 version | u8 kind | u8 dim_count | u32 dims[dim_count] | u8 dtype | payload
// Payload is row-major in declared dim order; complex64 is interleaved
// float32 (re, im).

inline constexpr std::array<char, 4> kMagic = {'D', 'G', 'H', 'M'};
inline constexpr std::uint16_t kFormatVersion = 1;

enum class FrameKind : std::uint8_t { point_frames = 1, tube = 2, fmcw_cube = 3, sfcw_response = 4 };
enum class Dtype : std::uint8_t { float32 = 1, complex64 = 2 };

inline std::string kind_name(FrameKind k) {
  switch (k) {
    case FrameKind::point_frames: return "point frames";
    case FrameKind::tube: return "tube";
    case FrameKind::fmcw_cube: return "raw FMCW cube";
    case FrameKind::sfcw_response: return "raw SFCW response";
  }
  return "kind " + std::to_string(static_cast<int>(k));
}

inline std::size_t dtype_size(Dtype d) { return d == Dtype::complex64 ? 8 : 4; }

class FormatError : public Error {
public:
  using Error::Error;
};
class BadMagicError : public FormatError {
public:
  using FormatError::FormatError;
};
class TruncatedError : public FormatError {
public:
  using FormatError::FormatError;
};
class UnknownDtypeError : public FormatError {
public:
  using FormatError::FormatError;
};
class UnknownKindError : public FormatError {
public:
  using FormatError::FormatError;
};
class UnsupportedVersionError : public FormatError {
public:
  using FormatError::FormatError;
};
class KindMismatchError : public FormatError {
public:
  using FormatError::FormatError;
};

struct FrameHeader {
  std::uint16_t version = kFormatVersion;
  FrameKind kind = FrameKind::point_frames;
  std::vector<std::uint32_t> dims;
  Dtype dtype = Dtype::float32;

  std::size_t element_count() const {
    std::size_t n = 1;
    for (auto d : dims) n *= d;
    return dims.empty() ? 0 : n;
  }
  std::size_t payload_bytes() const { return element_count() * dtype_size(dtype); }
  std::size_t header_bytes() const { return 4 + 2 + 1 + 1 + 4 * dims.size() + 1; }
  bool operator==(const FrameHeader&) const = default;
};

struct FrameFile {
  FrameHeader header;
  std::vector<std::uint8_t> payload;
};

namespace detail {

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

template <typename T>
T get_le(const std::uint8_t* p) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(static_cast<T>(p[i]) << (8 * i));
  return v;
}

inline std::uint32_t float_bits(float f) { return std::bit_cast<std::uint32_t>(f); }
inline float bits_float(std::uint32_t u) { return std::bit_cast<float>(u); }

}  // namespace detail

inline std::vector<std::uint8_t> encode_header(const FrameHeader& h) {
  if (h.dims.empty() || h.dims.size() > 255) throw std::invalid_argument("frame header: dim_count must be in [1, 255]");
  std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
  detail::put_le<std::uint16_t>(out, h.version);
  out.push_back(static_cast<std::uint8_t>(h.kind));
  out.push_back(static_cast<std::uint8_t>(h.dims.size()));
  for (auto d : h.dims) detail::put_le<std::uint32_t>(out, d);
  out.push_back(static_cast<std::uint8_t>(h.dtype));
  return out;
}

inline void write_frame_file(const std::filesystem::path& path, const FrameHeader& header,
                             std::span<const std::uint8_t> payload) {
  if (payload.size() != header.payload_bytes())
    throw std::invalid_argument("write_frame_file: payload is " + std::to_string(payload.size()) +
                                " bytes, header declares " + std::to_string(header.payload_bytes()));
  const auto head = encode_header(header);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot open '" + path.string() + "' for writing");
  os.write(reinterpret_cast<const char*>(head.data()), static_cast<std::streamsize>(head.size()));
  os.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
  if (!os) throw Error("write to '" + path.string() + "' failed");
}

inline FrameFile decode_frame(std::span<const std::uint8_t> bytes, const std::string& name = "<buffer>") {
  if (bytes.size() < 4) throw TruncatedError(name + ": file shorter than the magic");
  if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin()))
    throw BadMagicError(name + ": bad magic (expected \"DGHM\")");
  if (bytes.size() < 8) throw TruncatedError(name + ": truncated header");
  FrameFile f;
  f.header.version = detail::get_le<std::uint16_t>(bytes.data() + 4);
  if (f.header.version != kFormatVersion)
    throw UnsupportedVersionError(name + ": unsupported version " + std::to_string(f.header.version));
  const std::uint8_t kind = bytes[6];
  if (kind < 1 || kind > 4) throw UnknownKindError(name + ": unknown frame kind " + std::to_string(kind));
  f.header.kind = static_cast<FrameKind>(kind);
  const std::size_t ndim = bytes[7];
  if (ndim == 0) throw FormatError(name + ": dim_count is zero");
  const std::size_t head_len = 8 + 4 * ndim + 1;
  if (bytes.size() < head_len) throw TruncatedError(name + ": truncated header");
  for (std::size_t i = 0; i < ndim; ++i) f.header.dims.push_back(detail::get_le<std::uint32_t>(bytes.data() + 8 + 4 * i));
  const std::uint8_t dtype = bytes[head_len - 1];
  if (dtype != 1 && dtype != 2) throw UnknownDtypeError(name + ": unknown dtype code " + std::to_string(dtype));
  f.header.dtype = static_cast<Dtype>(dtype);
  const std::size_t need = f.header.payload_bytes();
  if (bytes.size() - head_len < need)
    throw TruncatedError(name + ": truncated payload (" + std::to_string(bytes.size() - head_len) + " of " +
                         std::to_string(need) + " bytes)");
  if (bytes.size() - head_len > need) throw FormatError(name + ": trailing bytes after payload");
  f.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(head_len), bytes.end());
  return f;
}

inline FrameFile read_frame_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return decode_frame(bytes, path.string());
}

inline FrameFile read_frame_file(const std::filesystem::path& path, FrameKind expected) {
  auto f = read_frame_file(path);
  if (f.header.kind != expected)
    throw KindMismatchError(path.string() + ": expected " + kind_name(expected) + " (kind " +
                            std::to_string(static_cast<int>(expected)) + "), found " + kind_name(f.header.kind));
  return f;
}

// Typed payload helpers.

inline std::vector<std::uint8_t> encode_float32(std::span<const float> values) {
  std::vector<std::uint8_t> out;
  out.reserve(values.size() * 4);
  for (float v : values) detail::put_le<std::uint32_t>(out, detail::float_bits(v));
  return out;
}

inline std::vector<std::uint8_t> encode_complex64(std::span<const std::complex<float>> values) {
  std::vector<std::uint8_t> out;
  out.reserve(values.size() * 8);
  for (const auto& v : values) {
    detail::put_le<std::uint32_t>(out, detail::float_bits(v.real()));
    detail::put_le<std::uint32_t>(out, detail::float_bits(v.imag()));
  }
  return out;
}

inline std::vector<float> decode_float32(const FrameFile& f) {
  if (f.header.dtype != Dtype::float32) throw FormatError("payload is not float32");
  std::vector<float> out(f.header.element_count());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = detail::bits_float(detail::get_le<std::uint32_t>(&f.payload[4 * i]));
  return out;
}

inline std::vector<std::complex<float>> decode_complex64(const FrameFile& f) {
  if (f.header.dtype != Dtype::complex64) throw FormatError("payload is not complex64");
  std::vector<std::complex<float>> out(f.header.element_count());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = {detail::bits_float(detail::get_le<std::uint32_t>(&f.payload[8 * i])),
              detail::bits_float(detail::get_le<std::uint32_t>(&f.payload[8 * i + 4]))};
  return out;
}

inline std::vector<std::uint32_t> dims_of(const std::vector<std::size_t>& shape) {
  std::vector<std::uint32_t> d;
  for (auto s : shape) {
    if (s > 0xFFFFFFFFu) throw std::invalid_argument("dimension exceeds 32 bits");
    d.push_back(static_cast<std::uint32_t>(s));
  }
  return d;
}

inline void write_complex_tensor(const std::filesystem::path& path, FrameKind kind, const Tensor<Complex>& t) {
  std::vector<std::complex<float>> v(t.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    v[i] = {static_cast<float>(t.values()[i].real()), static_cast<float>(t.values()[i].imag())};
  write_frame_file(path, {kFormatVersion, kind, dims_of(t.shape()), Dtype::complex64}, encode_complex64(v));
}

inline void write_float_tensor(const std::filesystem::path& path, FrameKind kind, const Tensor<float>& t) {
  write_frame_file(path, {kFormatVersion, kind, dims_of(t.shape()), Dtype::float32}, encode_float32(t.values()));
}

inline Tensor<Complex> read_complex_tensor(const std::filesystem::path& path, FrameKind kind) {
  const auto f = read_frame_file(path, kind);
  std::vector<std::size_t> shape(f.header.dims.begin(), f.header.dims.end());
  Tensor<Complex> t(shape);
  const auto v = decode_complex64(f);
  for (std::size_t i = 0; i < v.size(); ++i) t.values()[i] = {v[i].real(), v[i].imag()};
  return t;
}

inline Tensor<float> read_float_tensor(const std::filesystem::path& path, FrameKind kind) {
  const auto f = read_frame_file(path, kind);
  std::vector<std::size_t> shape(f.header.dims.begin(), f.header.dims.end());
  Tensor<float> t(shape);
  t.values() = decode_float32(f);
  return t;
}

}  // namespace mmsense::io
