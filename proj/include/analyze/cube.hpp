#pragma once

// The detailed cube C0: one level-0 code column per dimension plus numeric
// measure columns, loaded from star-schema CSV files.

#include <cctype>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "analyze/csv.hpp"
#include "analyze/error.hpp"
#include "analyze/hierarchy.hpp"
#include "analyze/row_set.hpp"

namespace analyze {

enum class MeasureKind { Integer, Decimal };

struct MeasureDef {
  std::string name;
  MeasureKind kind = MeasureKind::Integer;
};

using DimensionPtr = std::shared_ptr<const Dimension>;

struct CubeSchema {
  std::string cube_name;
  std::vector<DimensionPtr> dimensions;
  std::vector<MeasureDef> measures;

  std::optional<std::size_t> find_dimension(std::string_view name) const {
    for (std::size_t i = 0; i < dimensions.size(); ++i)
      if (iequals(dimensions[i]->name(), name)) return i;
    return std::nullopt;
  }
  std::size_t dimension_index(std::string_view name) const {
    if (auto i = find_dimension(name)) return *i;
    throw Error(ErrorCode::UnknownDimension, "no dimension '" + std::string(name) + "'");
  }
  /// Case-insensitive; a space matches an underscore ("Store Sales" finds store_sales).
  std::optional<std::size_t> find_measure(std::string_view name) const {
    auto norm = [](std::string_view s) {
      std::string out(s);
      for (auto& c : out) c = c == ' ' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      return out;
    };
    const auto wanted = norm(name);
    for (std::size_t i = 0; i < measures.size(); ++i)
      if (norm(measures[i].name) == wanted) return i;
    return std::nullopt;
  }
  const Dimension& dimension(std::size_t i) const { return *dimensions.at(i); }

  /// Empty when the schema is well formed.
  std::vector<std::string> violations() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < dimensions.size(); ++i)
      for (std::size_t j = i + 1; j < dimensions.size(); ++j)
        if (iequals(dimensions[i]->name(), dimensions[j]->name()))
          out.push_back("dimension " + dimensions[i]->name() + " appears twice");
    if (measures.empty()) out.emplace_back("cube needs at least one measure");
    return out;
  }
};

using MeasureColumn = std::variant<std::vector<std::int64_t>, std::vector<double>>;

/// Level-0 code sets per dimension; dimensions not listed are unconstrained.
struct DetailedCondition {
  std::vector<std::pair<std::size_t, std::vector<Code>>> atoms;
};

class DetailedCube {
 public:
  DetailedCube(CubeSchema schema, std::vector<std::vector<Code>> coordinates, std::vector<MeasureColumn> measures)
      : schema_(std::move(schema)), coords_(std::move(coordinates)), measures_(std::move(measures)) {
    if (auto v = schema_.violations(); !v.empty()) throw Error(ErrorCode::SchemaMismatch, v.front());
    if (coords_.size() != schema_.dimensions.size())
      throw Error(ErrorCode::SchemaMismatch, "one coordinate column per dimension required");
    if (measures_.size() != schema_.measures.size())
      throw Error(ErrorCode::SchemaMismatch, "one measure column per measure required");
    rows_ = coords_.empty() ? 0 : coords_.front().size();
    for (std::size_t d = 0; d < coords_.size(); ++d) {
      if (coords_[d].size() != rows_) throw Error(ErrorCode::SchemaMismatch, "coordinate column length mismatch");
      const auto members = schema_.dimension(d).member_count(0);
      for (Code c : coords_[d])
        if (c >= members)
          throw Error(ErrorCode::UnknownMember, "coordinate code out of range in dimension " + schema_.dimension(d).name());
    }
    for (std::size_t m = 0; m < measures_.size(); ++m) {
      const auto len = std::visit([](const auto& v) { return v.size(); }, measures_[m]);
      if (len != rows_) throw Error(ErrorCode::SchemaMismatch, "measure column length mismatch");
      schema_.measures[m].kind =
          std::holds_alternative<std::vector<std::int64_t>>(measures_[m]) ? MeasureKind::Integer : MeasureKind::Decimal;
    }
  }

  DetailedCube(const DetailedCube&) = delete;
  DetailedCube& operator=(const DetailedCube&) = delete;

  const CubeSchema& schema() const noexcept { return schema_; }
  std::size_t row_count() const noexcept { return rows_; }
  const std::vector<Code>& coordinates(std::size_t dim) const { return coords_.at(dim); }
  const MeasureColumn& measure(std::size_t m) const { return measures_.at(m); }

  /// Rows whose coordinate lies in the code set of every constrained dimension.
  RowSet filter_rows(const DetailedCondition& condition) const {
    RowSet rows = RowSet::all(rows_);
    for (const auto& [dim, codes] : condition.atoms) {
      if (dim >= coords_.size()) throw Error(ErrorCode::UnknownDimension, "dimension index " + std::to_string(dim));
      std::vector<char> wanted(schema_.dimension(dim).member_count(0), 0);
      for (Code c : codes) {
        if (c >= wanted.size()) throw Error(ErrorCode::UnknownMember, "level-0 code " + std::to_string(c));
        wanted[c] = 1;
      }
      RowSet hit(rows_);
      const auto& column = coords_[dim];
      for (std::size_t r = 0; r < rows_; ++r)
        if (wanted[column[r]]) hit.set(r);
      rows &= hit;
    }
    return rows;
  }

  /// Rows whose ancestor at `depth` is member. Cached per (dimension, depth, member).
  std::shared_ptr<const RowSet> member_rows(std::size_t dim, int depth, Code member) const {
    const auto& dimension = schema_.dimension(dim);
    const Key key{dim, depth, member};
    {
      std::lock_guard lock(cache_mutex_);
      if (auto it = bitmap_cache_.find(key); it != bitmap_cache_.end()) return it->second;
    }
    auto rows = std::make_shared<RowSet>(rows_);
    const auto& column = coords_[dim];
    if (depth == 0) {
      if (member >= dimension.member_count(0)) throw Error(ErrorCode::UnknownMember, "level-0 code out of range");
      for (std::size_t r = 0; r < rows_; ++r)
        if (column[r] == member) rows->set(r);
    } else {
      const auto table = dimension.ancestor_table(0, depth);
      if (member >= dimension.member_count(depth)) throw Error(ErrorCode::UnknownMember, "member code out of range");
      for (std::size_t r = 0; r < rows_; ++r)
        if (table[column[r]] == member) rows->set(r);
    }
    std::lock_guard lock(cache_mutex_);
    return bitmap_cache_.try_emplace(key, std::move(rows)).first->second;
  }

  /// Rows whose ancestor at `depth` is any of values.
  RowSet atom_rows(std::size_t dim, int depth, std::span<const Code> values) const {
    if (depth == schema_.dimension(dim).all_depth()) return RowSet::all(rows_);
    RowSet rows(rows_);
    for (Code v : values) rows |= *member_rows(dim, depth, v);
    return rows;
  }

  std::size_t cached_bitmaps() const {
    std::lock_guard lock(cache_mutex_);
    return bitmap_cache_.size();
  }

 private:
  struct Key {
    std::size_t dim;
    int depth;
    Code member;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
      return (k.dim * 0x9E3779B97F4A7C15ULL) ^ (static_cast<std::size_t>(k.depth) << 40) ^ k.member;
    }
  };

  CubeSchema schema_;
  std::vector<std::vector<Code>> coords_;
  std::vector<MeasureColumn> measures_;
  std::size_t rows_ = 0;

  mutable std::mutex cache_mutex_;
  mutable std::unordered_map<Key, std::shared_ptr<const RowSet>, KeyHash> bitmap_cache_;
};

using CubePtr = std::shared_ptr<const DetailedCube>;

// ---------------------------------------------------------------------------
// Loading

struct SchemaDefinition {
  struct DimensionDef {
    std::string name;
    std::vector<std::string> level_names;  // detailed first, ALL excluded
  };
  std::string cube_name;
  std::vector<DimensionDef> dimensions;
  std::vector<std::pair<std::string, std::optional<MeasureKind>>> measures;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::optional<std::int64_t> parse_int(std::string_view s) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

inline std::optional<double> parse_double(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::string buf(s);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size()) return std::nullopt;
  return v;
}

}  // namespace detail

/// Schema file grammar, one statement per line, '#' starts a comment:
///   cube <name>
///   dimension <Name>: <level0>, <level1>, ... [, ALL]
///   measure <name> [integer|decimal]
inline SchemaDefinition parse_schema(std::istream& in, const std::string& origin = "<schema>") {
  SchemaDefinition def;
  std::string raw;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& msg) {
    throw Error(ErrorCode::ParseError, origin + ":" + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const auto line = detail::trim(raw);
    if (line.empty()) continue;
    std::istringstream words(line);
    std::string keyword;
    words >> keyword;
    if (iequals(keyword, "cube")) {
      words >> def.cube_name;
      if (def.cube_name.empty()) fail("cube needs a name");
    } else if (iequals(keyword, "dimension")) {
      const auto colon = line.find(':');
      if (colon == std::string::npos) fail("expected 'dimension <Name>: <levels>'");
      SchemaDefinition::DimensionDef dim;
      dim.name = detail::trim(std::string_view(line).substr(keyword.size(), colon - keyword.size()));
      if (dim.name.empty()) fail("dimension needs a name");
      std::istringstream levels(line.substr(colon + 1));
      std::string level;
      while (std::getline(levels, level, ',')) {
        level = detail::trim(level);
        if (level.empty()) fail("empty level name");
        dim.level_names.push_back(level);
      }
      if (!dim.level_names.empty() && iequals(dim.level_names.back(), kAllLevelName)) dim.level_names.pop_back();
      if (dim.level_names.empty()) fail("dimension " + dim.name + " needs at least one level below ALL");
      def.dimensions.push_back(std::move(dim));
    } else if (iequals(keyword, "measure")) {
      std::string name, kind;
      words >> name >> kind;
      if (name.empty()) fail("measure needs a name");
      std::optional<MeasureKind> k;
      if (iequals(kind, "integer")) k = MeasureKind::Integer;
      else if (iequals(kind, "decimal")) k = MeasureKind::Decimal;
      else if (!kind.empty()) fail("unknown measure kind '" + kind + "'");
      def.measures.emplace_back(name, k);
    } else {
      fail("unknown statement '" + keyword + "'");
    }
  }
  if (def.cube_name.empty()) throw Error(ErrorCode::ParseError, origin + ": missing 'cube' statement");
  if (def.measures.empty()) throw Error(ErrorCode::ParseError, origin + ": cube needs at least one measure");
  return def;
}

inline SchemaDefinition parse_schema_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  return parse_schema(in, path);
}

/// Member CSV: header row of level names (detailed first; an ALL column is
/// ignored), one row per detailed member giving its full ancestor path.
inline Dimension load_dimension(const SchemaDefinition::DimensionDef& def, const std::string& path, char delimiter = ',') {
  DimensionBuilder builder(def.name, def.level_names);
  std::vector<std::size_t> column_of;
  csv::for_each_record(path, delimiter, [&](std::vector<std::string>& fields, std::size_t line_no) {
    if (column_of.empty()) {
      for (const auto& level : def.level_names) {
        std::optional<std::size_t> col;
        for (std::size_t i = 0; i < fields.size(); ++i)
          if (iequals(detail::trim(fields[i]), level)) col = i;
        if (!col) throw Error(ErrorCode::SchemaMismatch, path + ": header lacks level column '" + level + "'");
        column_of.push_back(*col);
      }
      return;
    }
    std::vector<std::string> labels;
    for (auto col : column_of) {
      if (col >= fields.size())
        throw Error(ErrorCode::SchemaMismatch, path + ":" + std::to_string(line_no) + ": too few columns");
      if (fields[col].empty())
        throw Error(ErrorCode::ParseError, path + ":" + std::to_string(line_no) + ": empty member label");
      labels.push_back(std::move(fields[col]));
    }
    if (!builder.add_path(labels))
      throw Error(ErrorCode::InvalidHierarchy, path + ":" + std::to_string(line_no) + ": conflicting ancestor path");
  });
  if (column_of.empty()) throw Error(ErrorCode::ParseError, path + ": missing header row");
  return builder.build();
}

/// Fact CSV: header naming each dimension's level-0 column (optionally
/// "Dimension.level") and each measure; coordinates are member labels.
inline std::unique_ptr<DetailedCube> load_facts(const SchemaDefinition& def, std::vector<DimensionPtr> dimensions,
                                                const std::string& path, char delimiter = ',') {
  CubeSchema schema{def.cube_name, std::move(dimensions), {}};
  for (const auto& [name, kind] : def.measures) schema.measures.push_back({name, kind.value_or(MeasureKind::Integer)});
  if (auto v = schema.violations(); !v.empty()) throw Error(ErrorCode::SchemaMismatch, v.front());

  const std::size_t n_dims = schema.dimensions.size();
  const std::size_t n_meas = schema.measures.size();
  std::vector<std::vector<Code>> coords(n_dims);
  std::vector<std::vector<std::int64_t>> ints(n_meas);
  std::vector<std::vector<double>> decimals(n_meas);
  std::vector<bool> is_int(n_meas);
  for (std::size_t m = 0; m < n_meas; ++m) is_int[m] = def.measures[m].second != MeasureKind::Decimal;

  std::vector<std::size_t> dim_col(n_dims), meas_col(n_meas);
  bool header_seen = false;
  csv::for_each_record(path, delimiter, [&](std::vector<std::string>& fields, std::size_t line_no) {
    const auto where = [&] { return path + ":" + std::to_string(line_no) + ": "; };
    if (!header_seen) {
      header_seen = true;
      if (fields.size() != n_dims + n_meas)
        throw Error(ErrorCode::SchemaMismatch, where() + "header has " + std::to_string(fields.size()) +
                                                   " columns, expected " + std::to_string(n_dims + n_meas));
      auto find = [&](auto&& matches, const std::string& what) {
        for (std::size_t i = 0; i < fields.size(); ++i)
          if (matches(detail::trim(fields[i]))) return i;
        throw Error(ErrorCode::SchemaMismatch, where() + "header lacks column for " + what);
      };
      for (std::size_t d = 0; d < n_dims; ++d) {
        const auto& dim = schema.dimension(d);
        const auto& level0 = dim.level(0).name;
        dim_col[d] = find([&](const std::string& h) { return iequals(h, level0) || iequals(h, dim.name() + "." + level0); },
                          dim.name() + "." + level0);
      }
      for (std::size_t m = 0; m < n_meas; ++m)
        meas_col[m] = find([&](const std::string& h) { return iequals(h, schema.measures[m].name); },
                           "measure " + schema.measures[m].name);
      return;
    }
    if (fields.size() != n_dims + n_meas)
      throw Error(ErrorCode::SchemaMismatch, where() + "row has " + std::to_string(fields.size()) + " columns, expected " +
                                                 std::to_string(n_dims + n_meas));
    for (std::size_t d = 0; d < n_dims; ++d) {
      const auto& label = fields[dim_col[d]];
      if (label.empty()) throw Error(ErrorCode::ParseError, where() + "null coordinate");
      auto code = schema.dimension(d).dictionary(0).find(label);
      if (!code)
        throw Error(ErrorCode::UnknownMemberLabel,
                    where() + "'" + label + "' is not a member of " + schema.dimension(d).name());
      coords[d].push_back(*code);
    }
    for (std::size_t m = 0; m < n_meas; ++m) {
      const auto text = detail::trim(fields[meas_col[m]]);
      if (text.empty()) throw Error(ErrorCode::ParseError, where() + "null measure " + schema.measures[m].name);
      if (is_int[m]) {
        if (auto v = detail::parse_int(text)) {
          ints[m].push_back(*v);
          continue;
        }
        if (def.measures[m].second == MeasureKind::Integer)
          throw Error(ErrorCode::ParseError, where() + "'" + text + "' is not an integer");
        is_int[m] = false;
        decimals[m].assign(ints[m].begin(), ints[m].end());
        ints[m].clear();
      }
      auto v = detail::parse_double(text);
      if (!v) throw Error(ErrorCode::ParseError, where() + "'" + text + "' is not a number");
      decimals[m].push_back(*v);
    }
  });
  if (!header_seen) throw Error(ErrorCode::ParseError, path + ": missing header row");
  std::vector<MeasureColumn> measures;
  for (std::size_t m = 0; m < n_meas; ++m) {
    if (is_int[m]) measures.emplace_back(std::move(ints[m]));
    else measures.emplace_back(std::move(decimals[m]));
  }
  return std::make_unique<DetailedCube>(std::move(schema), std::move(coords), std::move(measures));
}

/// Dimension files are matched to schema dimensions by file stem (case-insensitive).
inline std::unique_ptr<DetailedCube> load_cube(const std::string& schema_file, const std::vector<std::string>& dimension_files,
                                               const std::string& fact_file, char delimiter = ',') {
  const auto def = parse_schema_file(schema_file);
  std::vector<DimensionPtr> dims;
  for (const auto& d : def.dimensions) {
    std::optional<std::string> file;
    for (const auto& f : dimension_files)
      if (iequals(std::filesystem::path(f).stem().string(), d.name)) file = f;
    if (!file) throw Error(ErrorCode::Io, "no member file for dimension " + d.name);
    dims.push_back(std::make_shared<const Dimension>(load_dimension(d, *file, delimiter)));
  }
  return load_facts(def, std::move(dims), fact_file, delimiter);
}

}  // namespace analyze
