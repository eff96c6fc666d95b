// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <set>
#include <string_view>

#include <nlohmann/json.hpp>

#include "mmsense/array_geometry.hpp"
#include "mmsense/common.hpp"

namespace mmsense::splits {

enum class ActionCategory { position = 1, orientation = 2, walking = 3 };

struct SequenceEntry {
  std::size_t index = 1;  // 1-based; position / orientation number for categories I and II
  std::size_t frames = 1000;
};

struct ActionEntry {
  std::string id;
  ActionCategory category = ActionCategory::position;
  std::vector<SequenceEntry> sequences;
};

struct SubjectEntry {
  std::string id;
  std::vector<ActionEntry> actions;
};

struct DatasetManifest {
  std::vector<SubjectEntry> subjects;
  /// Explicit cross-subject test list; empty means sorted-id prefix rule.
  std::vector<std::string> test_subjects;

  std::size_t total_frames() const {
    std::size_t n = 0;
    for (const auto& s : subjects)
      for (const auto& a : s.actions)
        for (const auto& q : a.sequences) n += q.frames;
    return n;
  }

  /// 15 subjects x 8 actions x 3 sequences x 1000 frames, with actions 1-4
  /// in category I, 5-7 in category II and 8 in category III.
  bool is_canonical() const {
    if (subjects.size() != 15) return false;
    for (const auto& s : subjects) {
      if (s.actions.size() != 8) return false;
      for (std::size_t a = 0; a < 8; ++a) {
        const auto want = a < 4 ? ActionCategory::position : a < 7 ? ActionCategory::orientation : ActionCategory::walking;
        if (s.actions[a].category != want || s.actions[a].sequences.size() != 3) return false;
        for (std::size_t q = 0; q < 3; ++q)
          if (s.actions[a].sequences[q].frames != 1000 || s.actions[a].sequences[q].index != q + 1) return false;
      }
    }
    return true;
  }
};

inline DatasetManifest canonical_manifest() {
  DatasetManifest m;
  for (int s = 1; s <= 15; ++s) {
    SubjectEntry subj;
    subj.id = (s < 10 ? "S0" : "S") + std::to_string(s);
    for (int a = 1; a <= 8; ++a) {
      ActionEntry act;
      act.id = "A" + std::to_string(a);
      act.category = a <= 4 ? ActionCategory::position : a <= 7 ? ActionCategory::orientation : ActionCategory::walking;
      for (std::size_t q = 1; q <= 3; ++q) act.sequences.push_back({q, 1000});
      subj.actions.push_back(std::move(act));
    }
    m.subjects.push_back(std::move(subj));
  }
  return m;
}

enum class Setting { base, cross_subject, cross_position, cross_orientation, subarray };

inline Setting parse_setting(std::string_view s) {
  if (s == "base") return Setting::base;
  if (s == "cross_subject") return Setting::cross_subject;
  if (s == "cross_position") return Setting::cross_position;
  if (s == "cross_orientation") return Setting::cross_orientation;
  if (s == "subarray") return Setting::subarray;
  throw std::invalid_argument("unknown setting '" + std::string(s) + "'");
}

inline std::string_view to_string(Setting s) {
  switch (s) {
    case Setting::base: return "base";
    case Setting::cross_subject: return "cross_subject";
    case Setting::cross_position: return "cross_position";
    case Setting::cross_orientation: return "cross_orientation";
    case Setting::subarray: return "subarray";
  }
  return "unknown";
}

struct SplitSpec {
  Setting setting = Setting::base;
  std::optional<int> fold;
  std::optional<Subarray> subarray;

  void validate() const {
    const bool needs_fold = setting == Setting::cross_position || setting == Setting::cross_orientation;
    if (needs_fold && (!fold || *fold < 1 || *fold > 3))
      throw std::invalid_argument(std::string(to_string(setting)) + " requires fold in {1, 2, 3}");
    if (setting == Setting::subarray && !subarray)
      throw std::invalid_argument("subarray setting requires a subarray (3x4, 6x8 or 12x16)");
  }
};

/// Inclusive 1-based frame range of one sequence.
struct FrameRange {
  std::string subject;
  std::string action;
  std::size_t sequence = 1;
  std::size_t first = 1;
  std::size_t last = 0;

  std::size_t count() const { return last >= first ? last - first + 1 : 0; }
  bool operator==(const FrameRange&) const = default;
};

struct Split {
  SplitSpec spec;
  std::vector<FrameRange> train;
  std::vector<FrameRange> test;
  bool canonical = true;

  static std::size_t frames(const std::vector<FrameRange>& v) {
    std::size_t n = 0;
    for (const auto& r : v) n += r.count();
    return n;
  }
  std::size_t train_frames() const { return frames(train); }
  std::size_t test_frames() const { return frames(test); }
};

class SplitError : public Error {
public:
  using Error::Error;
};

inline Split make_splits(const DatasetManifest& manifest, const SplitSpec& spec) {
  spec.validate();
  if (manifest.subjects.empty()) throw SplitError("manifest has no subjects");
  Split out;
  out.spec = spec;
  out.canonical = manifest.is_canonical();

  auto whole = [](const SubjectEntry& s, const ActionEntry& a, const SequenceEntry& q) {
    return FrameRange{s.id, a.id, q.index, 1, q.frames};
  };

  switch (spec.setting) {
    case Setting::base:
    case Setting::subarray:
      for (const auto& s : manifest.subjects)
        for (const auto& a : s.actions)
          for (const auto& q : a.sequences) {
            // 800/200 of a 1000-frame sequence, proportionally otherwise.
            const auto cut = static_cast<std::size_t>(std::llround(0.8 * static_cast<double>(q.frames)));
            if (cut > 0) out.train.push_back({s.id, a.id, q.index, 1, cut});
            if (cut < q.frames) out.test.push_back({s.id, a.id, q.index, cut + 1, q.frames});
          }
      break;
    case Setting::cross_subject: {
      std::set<std::string> test_ids(manifest.test_subjects.begin(), manifest.test_subjects.end());
      std::set<std::string> all_ids;
      for (const auto& s : manifest.subjects) all_ids.insert(s.id);
      for (const auto& id : test_ids)
        if (!all_ids.count(id)) throw SplitError("cross_subject: test subject '" + id + "' not in manifest");
      if (test_ids.empty()) {
        const auto n_train = static_cast<std::size_t>(std::ceil(0.8 * static_cast<double>(all_ids.size()) - 1e-9));
        auto it = all_ids.begin();
        std::advance(it, static_cast<std::ptrdiff_t>(n_train));
        test_ids.insert(it, all_ids.end());
      }
      for (const auto& s : manifest.subjects)
        for (const auto& a : s.actions)
          for (const auto& q : a.sequences) (test_ids.count(s.id) ? out.test : out.train).push_back(whole(s, a, q));
      break;
    }
    case Setting::cross_position:
    case Setting::cross_orientation: {
      const auto cat = spec.setting == Setting::cross_position ? ActionCategory::position : ActionCategory::orientation;
      bool any = false;
      for (const auto& s : manifest.subjects)
        for (const auto& a : s.actions) {
          if (a.category != cat) continue;
          any = true;
          for (const auto& q : a.sequences)
            (static_cast<int>(q.index) == *spec.fold ? out.test : out.train).push_back(whole(s, a, q));
        }
      if (!any)
        throw SplitError(std::string(to_string(spec.setting)) + ": manifest has no Action Category " +
                         (cat == ActionCategory::position ? "I" : "II") + " sequences");
      break;
    }
  }
  return out;
}

// JSON forms.

inline nlohmann::json to_json(const FrameRange& r) {
  return {{"subject", r.subject}, {"action", r.action}, {"sequence", r.sequence}, {"first_frame", r.first},
          {"last_frame", r.last}};
}

inline nlohmann::json to_json(const Split& s) {
  nlohmann::json j;
  j["setting"] = std::string(to_string(s.spec.setting));
  j["fold"] = s.spec.fold ? nlohmann::json(*s.spec.fold) : nlohmann::json(nullptr);
  j["subarray"] = s.spec.subarray ? nlohmann::json(std::string(mmsense::to_string(*s.spec.subarray))) : nlohmann::json(nullptr);
  j["canonical"] = s.canonical;
  j["train_frames"] = s.train_frames();
  j["test_frames"] = s.test_frames();
  j["train"] = nlohmann::json::array();
  j["test"] = nlohmann::json::array();
  for (const auto& r : s.train) j["train"].push_back(to_json(r));
  for (const auto& r : s.test) j["test"].push_back(to_json(r));
  return j;
}

inline nlohmann::json to_json(const DatasetManifest& m) {
  nlohmann::json j;
  j["subjects"] = nlohmann::json::array();
  for (const auto& s : m.subjects) {
    nlohmann::json js{{"id", s.id}, {"actions", nlohmann::json::array()}};
    for (const auto& a : s.actions) {
      nlohmann::json ja{{"id", a.id}, {"category", static_cast<int>(a.category)}, {"sequences", nlohmann::json::array()}};
      for (const auto& q : a.sequences) ja["sequences"].push_back({{"index", q.index}, {"frames", q.frames}});
      js["actions"].push_back(ja);
    }
    j["subjects"].push_back(js);
  }
  if (!m.test_subjects.empty()) j["test_subjects"] = m.test_subjects;
  return j;
}

inline DatasetManifest manifest_from_json(const nlohmann::json& j) {
  auto need = [](const nlohmann::json& o, const char* key, const std::string& where) -> const nlohmann::json& {
    if (!o.is_object() || !o.contains(key)) throw SplitError("manifest: missing '" + std::string(key) + "' at " + where);
    return o.at(key);
  };
  DatasetManifest m;
  const auto& subjects = need(j, "subjects", "$");
  if (!subjects.is_array()) throw SplitError("manifest: 'subjects' must be an array");
  for (std::size_t i = 0; i < subjects.size(); ++i) {
    const std::string ws = "subjects[" + std::to_string(i) + "]";
    SubjectEntry s;
    s.id = need(subjects[i], "id", ws).get<std::string>();
    const auto& actions = need(subjects[i], "actions", ws);
    for (std::size_t a = 0; a < actions.size(); ++a) {
      const std::string wa = ws + ".actions[" + std::to_string(a) + "]";
      ActionEntry act;
      act.id = need(actions[a], "id", wa).get<std::string>();
      const int cat = need(actions[a], "category", wa).get<int>();
      if (cat < 1 || cat > 3) throw SplitError("manifest: " + wa + ".category must be 1, 2 or 3");
      act.category = static_cast<ActionCategory>(cat);
      const auto& seqs = need(actions[a], "sequences", wa);
      for (std::size_t q = 0; q < seqs.size(); ++q) {
        const std::string wq = wa + ".sequences[" + std::to_string(q) + "]";
        SequenceEntry e;
        e.index = need(seqs[q], "index", wq).get<std::size_t>();
        e.frames = need(seqs[q], "frames", wq).get<std::size_t>();
        if (e.frames == 0) throw SplitError("manifest: " + wq + ".frames must be positive");
        act.sequences.push_back(e);
      }
      s.actions.push_back(std::move(act));
    }
    m.subjects.push_back(std::move(s));
  }
  if (j.contains("test_subjects")) m.test_subjects = j.at("test_subjects").get<std::vector<std::string>>();
  return m;
}

}  // namespace mmsense::splits
