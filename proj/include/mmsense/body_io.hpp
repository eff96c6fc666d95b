// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "mmsense/metrics.hpp"

namespace mmsense::io {

// One body frame per line:
//   {"frame": 0, "sequence": "S01_A1_1", "joints": [[x,y,z] x 22], "translation": [x,y,z],
//    "rotations": [[r00,r01,...,r22] x 22]  or  "rot6d": [[a1, a2] x 22],
//    "vertices": [[x,y,z], ...]}            (vertices optional)
// Rotation matrices are row-major. rot6d holds the first two matrix columns.
// "sequence" is optional (empty when absent).

struct BodyRecord {
  std::size_t frame = 0;
  std::string sequence;
  metrics::BodyFrame body;
};

class BodyFormatError : public Error {
public:
  using Error::Error;
};

namespace detail {

inline metrics::Vec3d vec3_from(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) throw BodyFormatError(where + ": expected [x, y, z]");
  for (const auto& v : j)
    if (!v.is_number()) throw BodyFormatError(where + ": expected numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline nlohmann::json vec3_to(const metrics::Vec3d& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); }

}  // namespace detail

inline nlohmann::json to_json(const BodyRecord& r) {
  nlohmann::json j;
  j["frame"] = r.frame;
  if (!r.sequence.empty()) j["sequence"] = r.sequence;
  j["joints"] = nlohmann::json::array();
  for (const auto& p : r.body.joints) j["joints"].push_back(detail::vec3_to(p));
  j["translation"] = detail::vec3_to(r.body.translation);
  j["rotations"] = nlohmann::json::array();
  for (const auto& m : r.body.rotations) {
    nlohmann::json row = nlohmann::json::array();
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) row.push_back(m(a, b));
    j["rotations"].push_back(row);
  }
  if (r.body.vertices) {
    j["vertices"] = nlohmann::json::array();
    for (const auto& p : *r.body.vertices) j["vertices"].push_back(detail::vec3_to(p));
  }
  return j;
}

inline BodyRecord body_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_object()) throw BodyFormatError(where + ": expected an object");
  BodyRecord r;
  if (!j.contains("frame") || !j["frame"].is_number_integer() || j["frame"].get<long long>() < 0)
    throw BodyFormatError(where + ": missing 'frame'");
  r.frame = j["frame"].get<std::size_t>();
  if (j.contains("sequence")) {
    if (!j["sequence"].is_string()) throw BodyFormatError(where + ": 'sequence' must be a string");
    r.sequence = j["sequence"].get<std::string>();
  }
  if (!j.contains("joints") || !j["joints"].is_array() || j["joints"].empty())
    throw BodyFormatError(where + ": missing 'joints'");
  r.body.joints.clear();
  for (std::size_t i = 0; i < j["joints"].size(); ++i)
    r.body.joints.push_back(detail::vec3_from(j["joints"][i], where + ".joints[" + std::to_string(i) + "]"));
  if (j.contains("translation")) r.body.translation = detail::vec3_from(j["translation"], where + ".translation");
  r.body.rotations.clear();
  if (j.contains("rotations")) {
    for (std::size_t i = 0; i < j["rotations"].size(); ++i) {
      const auto& m = j["rotations"][i];
      const std::string w = where + ".rotations[" + std::to_string(i) + "]";
      if (!m.is_array() || m.size() != 9) throw BodyFormatError(w + ": expected 9 numbers");
      metrics::Mat3 rot;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) rot(a, b) = m[static_cast<std::size_t>(3 * a + b)].get<double>();
      r.body.rotations.push_back(rot);
    }
  } else if (j.contains("rot6d")) {
    for (std::size_t i = 0; i < j["rot6d"].size(); ++i) {
      const auto& v = j["rot6d"][i];
      const std::string w = where + ".rot6d[" + std::to_string(i) + "]";
      if (!v.is_array() || v.size() != 6) throw BodyFormatError(w + ": expected 6 numbers");
      std::array<double, 6> p{};
      for (std::size_t k = 0; k < 6; ++k) p[k] = v[k].get<double>();
      try {
        r.body.rotations.push_back(metrics::rot6d_to_matrix(p));
      } catch (const std::invalid_argument& e) {
        throw BodyFormatError(w + ": " + e.what());
      }
    }
  } else {
    throw BodyFormatError(where + ": missing 'rotations' or 'rot6d'");
  }
  if (j.contains("vertices")) {
    std::vector<metrics::Vec3d> v;
    for (std::size_t i = 0; i < j["vertices"].size(); ++i)
      v.push_back(detail::vec3_from(j["vertices"][i], where + ".vertices[" + std::to_string(i) + "]"));
    r.body.vertices = std::move(v);
  }
  return r;
}

inline std::vector<BodyRecord> read_bodies(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open '" + path.string() + "'");
  std::vector<BodyRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(lineno);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw BodyFormatError(where + ": malformed JSON (" + e.what() + ")");
    }
    out.push_back(body_from_json(j, where));
  }
  return out;
}

inline void write_bodies(const std::filesystem::path& path, const std::vector<BodyRecord>& records) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error("cannot open '" + path.string() + "' for writing");
  for (const auto& r : records) os << to_json(r).dump() << '\n';
  if (!os) throw Error("write to '" + path.string() + "' failed");
}

}  // namespace mmsense::io
