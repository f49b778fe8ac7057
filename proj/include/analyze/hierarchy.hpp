#pragma once

// Dimension hierarchies: totally ordered level chains with dictionary-encoded
// members. Depth 0 is the most detailed level; the last level is ALL with the
// single member "all". Every coordinate inside the engine is a Code; labels
// exist only at the I/O boundary.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "analyze/error.hpp"

namespace analyze {

using Code = std::uint32_t;

inline constexpr std::string_view kAllLevelName = "ALL";
inline constexpr std::string_view kAllMemberLabel = "all";

inline bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

struct Level {
  std::string dimension_name;
  std::string name;
  int depth = 0;
  std::size_t member_count = 0;
};

/// Label <-> code mapping of one level. Codes are dense, in insertion order.
class MemberDictionary {
 public:
  MemberDictionary() = default;

  /// Keeps the labels verbatim, duplicates included, so that a defective
  /// dictionary can still be inspected by validate_hierarchy.
  explicit MemberDictionary(std::vector<std::string> labels) : labels_(std::move(labels)) {
    for (std::size_t i = 0; i < labels_.size(); ++i) index_.try_emplace(labels_[i], static_cast<Code>(i));
  }

  Code add(std::string_view label) {
    auto it = index_.find(std::string(label));
    if (it != index_.end()) return it->second;
    const auto code = static_cast<Code>(labels_.size());
    labels_.emplace_back(label);
    index_.emplace(labels_.back(), code);
    return code;
  }

  std::optional<Code> find(std::string_view label) const {
    auto it = index_.find(std::string(label));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  Code code(std::string_view label) const {
    if (auto c = find(label)) return *c;
    throw Error(ErrorCode::UnknownMember, "no member '" + std::string(label) + "'");
  }

  const std::string& label(Code code) const {
    if (code >= labels_.size()) throw Error(ErrorCode::UnknownMember, "code " + std::to_string(code) + " out of range");
    return labels_[code];
  }

  std::size_t size() const noexcept { return labels_.size(); }
  bool bijective() const noexcept { return index_.size() == labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, Code> index_;
};

/// parent_of[d][c] is the parent (depth d+1) of member c at depth d.
struct HierarchyMap {
  std::string dimension_name;
  std::vector<std::vector<Code>> parent_of;
};

class Dimension;
std::vector<std::string> validate_hierarchy(const Dimension& dim);

class Dimension {
 public:
  Dimension(std::string name, std::vector<std::string> level_names, std::vector<MemberDictionary> dictionaries,
            HierarchyMap hierarchy)
      : name_(std::move(name)), dictionaries_(std::move(dictionaries)), hierarchy_(std::move(hierarchy)) {
    hierarchy_.dimension_name = name_;
    for (std::size_t d = 0; d < level_names.size(); ++d) {
      const std::size_t members = d < dictionaries_.size() ? dictionaries_[d].size() : 0;
      levels_.push_back(Level{name_, std::move(level_names[d]), static_cast<int>(d), members});
    }
    violations_ = compute_violations();
    if (violations_.empty()) build_indexes();
  }

  Dimension(const Dimension& other)
      : name_(other.name_),
        levels_(other.levels_),
        dictionaries_(other.dictionaries_),
        hierarchy_(other.hierarchy_),
        violations_(other.violations_),
        anc_(other.anc_),
        child_offsets_(other.child_offsets_),
        child_codes_(other.child_codes_) {}
  Dimension(Dimension&& other) noexcept
      : name_(std::move(other.name_)),
        levels_(std::move(other.levels_)),
        dictionaries_(std::move(other.dictionaries_)),
        hierarchy_(std::move(other.hierarchy_)),
        violations_(std::move(other.violations_)),
        anc_(std::move(other.anc_)),
        child_offsets_(std::move(other.child_offsets_)),
        child_codes_(std::move(other.child_codes_)) {}

  const std::string& name() const noexcept { return name_; }
  const std::vector<Level>& levels() const noexcept { return levels_; }
  int level_count() const noexcept { return static_cast<int>(levels_.size()); }
  int all_depth() const noexcept { return level_count() - 1; }
  const HierarchyMap& hierarchy() const noexcept { return hierarchy_; }
  bool valid() const noexcept { return violations_.empty(); }
  const std::vector<std::string>& violations() const noexcept { return violations_; }

  const Level& level(int depth) const {
    check_depth(depth);
    return levels_[static_cast<std::size_t>(depth)];
  }
  const MemberDictionary& dictionary(int depth) const {
    check_depth(depth);
    return dictionaries_[static_cast<std::size_t>(depth)];
  }
  std::size_t member_count(int depth) const { return dictionary(depth).size(); }

  /// Level names match case-insensitively.
  std::optional<int> find_level(std::string_view level_name) const {
    for (const auto& l : levels_)
      if (iequals(l.name, level_name)) return l.depth;
    return std::nullopt;
  }
  int level_depth(std::string_view level_name) const {
    if (auto d = find_level(level_name)) return *d;
    throw Error(ErrorCode::UnknownLevel, "dimension " + name_ + " has no level '" + std::string(level_name) + "'");
  }

  Code anc(int from, int to, Code member) const {
    require_valid();
    check_member(from, member);
    check_depth(to);
    if (from > to)
      throw Error(ErrorCode::LevelOrderViolation,
                  "anc from " + levels_[from].name + " to lower level " + levels_[to].name);
    if (from == to) return member;
    return anc_[static_cast<std::size_t>(from)][static_cast<std::size_t>(to - from - 1)][member];
  }

  /// Ancestor table from `from` to `to`: entry c is anc(from, to, c).
  std::span<const Code> ancestor_table(int from, int to) const {
    require_valid();
    check_depth(from);
    check_depth(to);
    if (from >= to) throw Error(ErrorCode::LevelOrderViolation, "ancestor table needs from < to");
    return anc_[static_cast<std::size_t>(from)][static_cast<std::size_t>(to - from - 1)];
  }

  /// Sorted codes at `to` whose ancestor at `from` is member. Cached per (from, to, member).
  const std::vector<Code>& desc(int from, int to, Code member) const {
    require_valid();
    check_member(from, member);
    check_depth(to);
    if (to > from)
      throw Error(ErrorCode::LevelOrderViolation,
                  "desc from " + levels_[from].name + " to higher level " + levels_[to].name);
    const auto key = std::make_tuple(from, to, member);
    std::lock_guard lock(desc_mutex_);
    auto it = desc_cache_.find(key);
    if (it != desc_cache_.end()) return it->second;
    std::vector<Code> frontier{member};
    for (int depth = from; depth > to; --depth) {
      std::vector<Code> next;
      const auto& offsets = child_offsets_[static_cast<std::size_t>(depth)];
      const auto& codes = child_codes_[static_cast<std::size_t>(depth)];
      for (Code c : frontier) next.insert(next.end(), codes.begin() + offsets[c], codes.begin() + offsets[c + 1]);
      frontier = std::move(next);
    }
    std::sort(frontier.begin(), frontier.end());
    return desc_cache_.emplace(key, std::move(frontier)).first->second;
  }

  /// Members at `depth` that share member's parent, member included.
  std::vector<Code> siblings_under_parent(int depth, Code member) const {
    require_valid();
    check_member(depth, member);
    if (depth >= all_depth())
      throw Error(ErrorCode::NoParentLevel, "level " + levels_[depth].name + " has no parent level");
    return desc(depth + 1, depth, anc(depth, depth + 1, member));
  }

 private:
  void check_depth(int depth) const {
    if (depth < 0 || depth >= level_count())
      throw Error(ErrorCode::UnknownLevel, "depth " + std::to_string(depth) + " not in dimension " + name_);
  }
  void check_member(int depth, Code member) const {
    check_depth(depth);
    if (member >= dictionaries_[static_cast<std::size_t>(depth)].size())
      throw Error(ErrorCode::UnknownMember,
                  "code " + std::to_string(member) + " not in level " + levels_[depth].name);
  }
  void require_valid() const {
    if (!valid()) throw Error(ErrorCode::InvalidHierarchy, "dimension " + name_ + ": " + violations_.front());
  }

  std::vector<std::string> compute_violations() const {
    std::vector<std::string> out;
    if (levels_.empty()) {
      out.emplace_back("dimension has no levels");
      return out;
    }
    if (dictionaries_.size() != levels_.size()) out.emplace_back("one dictionary per level required");
    if (!iequals(levels_.back().name, kAllLevelName)) out.emplace_back("top level must be ALL");
    if (dictionaries_.size() == levels_.size() && dictionaries_.back().size() != 1)
      out.emplace_back("ALL level must have exactly one member");
    for (std::size_t d = 0; d < dictionaries_.size(); ++d)
      if (!dictionaries_[d].bijective())
        out.emplace_back("dictionary not bijective at level " + levels_[std::min(d, levels_.size() - 1)].name);
    if (hierarchy_.parent_of.size() + 1 != levels_.size()) {
      out.emplace_back("non-total ancestor map: expected one parent map per adjacent level pair");
      return out;
    }
    for (std::size_t d = 0; d + 1 < levels_.size() && d + 1 < dictionaries_.size(); ++d) {
      const auto& parents = hierarchy_.parent_of[d];
      bool total = parents.size() == dictionaries_[d].size();
      for (Code p : parents) total = total && p < dictionaries_[d + 1].size();
      if (!total) out.emplace_back("non-total ancestor map between " + levels_[d].name + " and " + levels_[d + 1].name);
    }
    return out;
  }

  void build_indexes() {
    const auto n = levels_.size();
    anc_.assign(n, {});
    for (std::size_t from = 0; from + 1 < n; ++from) {
      auto& tables = anc_[from];
      std::vector<Code> current = hierarchy_.parent_of[from];
      tables.push_back(current);
      for (std::size_t to = from + 2; to < n; ++to) {
        const auto& step = hierarchy_.parent_of[to - 1];
        for (auto& c : current) c = step[c];
        tables.push_back(current);
      }
    }
    // Children in CSR form: child_*[d] lists members at d-1 grouped by parent at d.
    child_offsets_.assign(n, {});
    child_codes_.assign(n, {});
    for (std::size_t d = 1; d < n; ++d) {
      const auto& parents = hierarchy_.parent_of[d - 1];
      auto& offsets = child_offsets_[d];
      offsets.assign(dictionaries_[d].size() + 1, 0);
      for (Code p : parents) ++offsets[p + 1];
      for (std::size_t i = 1; i < offsets.size(); ++i) offsets[i] += offsets[i - 1];
      auto cursor = offsets;
      auto& codes = child_codes_[d];
      codes.resize(parents.size());
      for (std::size_t c = 0; c < parents.size(); ++c) codes[cursor[parents[c]]++] = static_cast<Code>(c);
    }
  }

  std::string name_;
  std::vector<Level> levels_;
  std::vector<MemberDictionary> dictionaries_;
  HierarchyMap hierarchy_;
  std::vector<std::string> violations_;
  std::vector<std::vector<std::vector<Code>>> anc_;
  std::vector<std::vector<std::uint32_t>> child_offsets_;
  std::vector<std::vector<Code>> child_codes_;

  mutable std::mutex desc_mutex_;
  mutable std::map<std::tuple<int, int, Code>, std::vector<Code>> desc_cache_;
};

inline std::vector<std::string> validate_hierarchy(const Dimension& dim) { return dim.violations(); }

/// Builds a Dimension from ancestor paths (detailed label first, ALL excluded).
class DimensionBuilder {
 public:
  DimensionBuilder(std::string name, std::vector<std::string> level_names) : name_(std::move(name)) {
    if (!level_names.empty() && iequals(level_names.back(), kAllLevelName)) level_names.pop_back();
    if (level_names.empty()) throw Error(ErrorCode::InvalidSpec, "dimension " + name_ + " needs at least one level");
    level_names_ = std::move(level_names);
    dictionaries_.resize(level_names_.size());
    parent_of_.resize(level_names_.size());
  }

  std::size_t path_length() const noexcept { return level_names_.size(); }

  /// Adds one detailed member with its ancestors. Returns false (and records a
  /// conflict) when a member already has a different parent.
  bool add_path(std::span<const std::string> labels) {
    if (labels.size() != level_names_.size())
      throw Error(ErrorCode::SchemaMismatch, "path for dimension " + name_ + " has " + std::to_string(labels.size()) +
                                                 " labels, expected " + std::to_string(level_names_.size()));
    bool ok = true;
    Code child = 0;
    for (std::size_t d = 0; d < labels.size(); ++d) {
      const Code code = dictionaries_[d].add(labels[d]);
      if (parent_of_[d].size() <= code) parent_of_[d].resize(code + 1, kUnset);
      if (d > 0) {
        auto& slot = parent_of_[d - 1][child];
        if (slot == kUnset) {
          slot = code;
        } else if (slot != code) {
          ok = false;
          conflicts_.push_back("member '" + labels[d - 1] + "' at level " + level_names_[d - 1] +
                               " has two parents: '" + dictionaries_[d].label(slot) + "' and '" + labels[d] + "'");
        }
      }
      child = code;
    }
    if (parent_of_.back().size() <= child) parent_of_.back().resize(child + 1, kUnset);
    parent_of_.back()[child] = 0;
    return ok;
  }

  Dimension build() const {
    if (!conflicts_.empty()) throw Error(ErrorCode::InvalidHierarchy, "dimension " + name_ + ": " + conflicts_.front());
    auto names = level_names_;
    names.emplace_back(kAllLevelName);
    auto dicts = dictionaries_;
    MemberDictionary all;
    all.add(kAllMemberLabel);
    dicts.push_back(std::move(all));
    HierarchyMap map{name_, parent_of_};
    Dimension dim(name_, std::move(names), std::move(dicts), std::move(map));
    if (!dim.valid()) throw Error(ErrorCode::InvalidHierarchy, "dimension " + name_ + ": " + dim.violations().front());
    return dim;
  }

 private:
  static constexpr Code kUnset = static_cast<Code>(-1);

  std::string name_;
  std::vector<std::string> level_names_;
  std::vector<MemberDictionary> dictionaries_;
  std::vector<std::vector<Code>> parent_of_;
  std::vector<std::string> conflicts_;
};

}  // namespace analyze
