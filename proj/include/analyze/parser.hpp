#pragma once

// Recursive-descent parser for
//
//   ANALYZE agg(measure) [AS alias] FROM cube
//     [FOR level = value ((AND | ∧) level = value)*]
//     GROUP BY level, level [AS name]
//
// Keywords are case-insensitive. Levels are Dimension.Level or a bare level
// name that must be unique across dimensions. Values are 'quoted' (with ''
// escaping a quote) or a bare run such as 1997-Q3.

#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "analyze/analyze_op.hpp"
#include "analyze/error.hpp"
#include "analyze/query.hpp"

namespace analyze {

struct LevelRef {
  std::string qualifier;  // dimension name, empty when bare
  std::string level;
  std::size_t offset = 0;
  std::optional<GrouperLevel> resolved;

  friend bool operator==(const LevelRef& a, const LevelRef& b) {
    return a.qualifier == b.qualifier && a.level == b.level && a.resolved == b.resolved;
  }
};

struct AtomAst {
  LevelRef level;
  std::string value;
  std::size_t value_offset = 0;
  std::optional<Code> code;

  friend bool operator==(const AtomAst& a, const AtomAst& b) {
    return a.level == b.level && a.value == b.value && a.code == b.code;
  }
};

struct AnalyzeStatement {
  std::string agg;
  std::string measure;
  std::string measure_alias;
  std::string cube;
  std::vector<AtomAst> atoms;
  std::vector<LevelRef> groupers;
  std::string name;
  std::size_t grouper_offset = 0;

  friend bool operator==(const AnalyzeStatement& a, const AnalyzeStatement& b) {
    return a.agg == b.agg && a.measure == b.measure && a.measure_alias == b.measure_alias && a.cube == b.cube &&
           a.atoms == b.atoms && a.groupers == b.groupers && a.name == b.name;
  }
};

namespace detail {

inline bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

inline constexpr std::string_view kWedge = "\xE2\x88\xA7";  // ∧

inline std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline std::string at(std::string_view text, std::size_t offset) {
  const auto [line, col] = line_col(text, offset);
  return std::to_string(line) + ":" + std::to_string(col) + ": ";
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  AnalyzeStatement statement() {
    AnalyzeStatement st;
    keyword("ANALYZE");
    skip_ws();
    st.agg = identifier("aggregate function");
    if (!parse_agg(st.agg)) fail(pos_ - st.agg.size(), "unknown aggregate '" + st.agg + "'", "sum, min, max or count");
    symbol('(');
    st.measure = measure_text();
    symbol(')');
    if (try_keyword("AS")) st.measure_alias = identifier("measure alias");
    keyword("FROM");
    skip_ws();
    st.cube = identifier("cube name");
    if (try_keyword("FOR")) {
      st.atoms.push_back(atom());
      while (try_keyword("AND") || try_symbol(kWedge)) st.atoms.push_back(atom());
    }
    keyword("GROUP");
    keyword("BY");
    skip_ws();
    st.grouper_offset = pos_;
    st.groupers.push_back(level_ref());
    while (try_symbol(",")) st.groupers.push_back(level_ref());
    if (try_keyword("AS")) st.name = identifier("query name");
    skip_ws();
    if (pos_ != text_.size()) fail(pos_, "unexpected trailing input", "end of statement");
    return st;
  }

 private:
  [[noreturn]] void fail(std::size_t offset, const std::string& message, const std::string& expected) const {
    const auto [line, col] = line_col(text_, offset);
    throw SyntaxError(offset, line, col, message, expected);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string describe_here() const {
    if (pos_ >= text_.size()) return "end of input";
    return "'" + std::string(text_.substr(pos_, 1)) + "'";
  }

  bool try_keyword(std::string_view kw) {
    skip_ws();
    if (text_.size() - pos_ < kw.size() || !iequals(text_.substr(pos_, kw.size()), kw)) return false;
    if (pos_ + kw.size() < text_.size() && ident_char(text_[pos_ + kw.size()])) return false;
    pos_ += kw.size();
    return true;
  }

  void keyword(std::string_view kw) {
    if (!try_keyword(kw)) fail(pos_, "unexpected " + describe_here(), std::string(kw));
  }

  bool try_symbol(std::string_view sym) {
    skip_ws();
    if (text_.substr(pos_, sym.size()) != sym) return false;
    pos_ += sym.size();
    return true;
  }

  void symbol(char c) {
    if (!try_symbol(std::string_view(&c, 1))) fail(pos_, "unexpected " + describe_here(), std::string("'") + c + "'");
  }

  std::string identifier(const std::string& what) {
    skip_ws();
    if (pos_ >= text_.size() || !ident_start(text_[pos_])) fail(pos_, "unexpected " + describe_here(), what);
    const auto start = pos_;
    while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string measure_text() {
    skip_ws();
    const auto start = pos_;
    while (pos_ < text_.size() && text_[pos_] != ')' && text_[pos_] != '(' && text_[pos_] != '\n') ++pos_;
    auto s = std::string(text_.substr(start, pos_ - start));
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    if (s.empty()) fail(start, "missing measure", "measure name");
    return s;
  }

  LevelRef level_ref() {
    skip_ws();
    LevelRef ref;
    ref.offset = pos_;
    ref.level = identifier("level name");
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      ref.qualifier = std::move(ref.level);
      ref.level = identifier("level name after '.'");
    }
    return ref;
  }

  AtomAst atom() {
    AtomAst a;
    a.level = level_ref();
    if (try_keyword("IN")) {
      const auto [line, col] = line_col(text_, pos_);
      throw Error(ErrorCode::ConstraintViolation, std::to_string(line) + ":" + std::to_string(col) +
                                                      ": analyze atoms must be single-valued");
    }
    symbol('=');
    skip_ws();
    a.value_offset = pos_;
    if (pos_ < text_.size() && text_[pos_] == '\'') {
      ++pos_;
      for (;;) {
        if (pos_ >= text_.size()) fail(a.value_offset, "unterminated quoted value", "closing quote");
        if (text_[pos_] == '\'') {
          if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '\'') {
            a.value += '\'';
            pos_ += 2;
            continue;
          }
          ++pos_;
          break;
        }
        a.value += text_[pos_++];
      }
      return a;
    }
    const auto start = pos_;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '\'' || c == '"' || c == ',' || c == '(' || c == ')') break;
      if (text_.substr(pos_, kWedge.size()) == kWedge) break;
      ++pos_;
    }
    if (pos_ == start) fail(pos_, "unexpected " + describe_here(), "member value");
    a.value = std::string(text_.substr(start, pos_ - start));
    return a;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Grammar only; levels and members stay unresolved.
inline AnalyzeStatement parse_syntax(std::string_view text) { return detail::Parser(text).statement(); }

/// Resolves a level reference against the schema. Bare names must match one
/// level of one dimension; a bare name may also be a dimension name followed
/// by one of its level names (customerRegion).
inline GrouperLevel resolve_level(const CubeSchema& schema, const LevelRef& ref, std::string_view text = {}) {
  const auto where = detail::at(text, ref.offset);
  if (!ref.qualifier.empty()) {
    const auto d = schema.find_dimension(ref.qualifier);
    if (!d) throw Error(ErrorCode::UnknownLevel, where + "unknown dimension '" + ref.qualifier + "'");
    const auto depth = schema.dimension(*d).find_level(ref.level);
    if (!depth) throw Error(ErrorCode::UnknownLevel, where + "dimension " + ref.qualifier + " has no level '" + ref.level + "'");
    return {*d, *depth};
  }
  std::vector<GrouperLevel> hits;
  for (std::size_t d = 0; d < schema.dimensions.size(); ++d)
    if (auto depth = schema.dimension(d).find_level(ref.level)) hits.push_back({d, *depth});
  if (hits.empty()) {
    for (std::size_t d = 0; d < schema.dimensions.size(); ++d) {
      const auto& name = schema.dimension(d).name();
      if (ref.level.size() > name.size() && iequals(std::string_view(ref.level).substr(0, name.size()), name))
        if (auto depth = schema.dimension(d).find_level(std::string_view(ref.level).substr(name.size())))
          hits.push_back({d, *depth});
    }
  }
  if (hits.empty()) throw Error(ErrorCode::UnknownLevel, where + "unknown level '" + ref.level + "'");
  if (hits.size() > 1) {
    std::string dims;
    for (const auto& h : hits) dims += (dims.empty() ? "" : ", ") + schema.dimension(h.dim).name();
    throw Error(ErrorCode::AmbiguousLevel, where + "level '" + ref.level + "' exists in " + dims + "; qualify it");
  }
  return hits.front();
}

/// Parses and resolves every level and member against the schema.
inline AnalyzeStatement parse(std::string_view text, const CubeSchema& schema) {
  auto st = parse_syntax(text);
  if (st.groupers.size() != 2) {
    throw Error(ErrorCode::ConstraintViolation, detail::at(text, st.grouper_offset) + "GROUP BY needs exactly two levels, got " +
                                                    std::to_string(st.groupers.size()));
  }
  if (!schema.find_measure(st.measure))
    throw Error(ErrorCode::UnknownMeasure, "cube " + schema.cube_name + " has no measure '" + st.measure + "'");
  for (auto& a : st.atoms) {
    const auto g = resolve_level(schema, a.level, text);
    a.level.resolved = g;
    const auto code = schema.dimension(g.dim).dictionary(g.depth).find(a.value);
    if (!code)
      throw Error(ErrorCode::UnknownMember, detail::at(text, a.value_offset) + "'" + a.value + "' is not a member of " +
                                                level_name(schema, g.dim, g.depth, true));
    a.code = code;
  }
  for (auto& g : st.groupers) g.resolved = resolve_level(schema, g, text);

  for (std::size_t i = 0; i < st.atoms.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (st.atoms[i].level.resolved->dim == st.atoms[j].level.resolved->dim)
        throw Error(ErrorCode::ConstraintViolation, detail::at(text, st.atoms[i].level.offset) + "second atom on dimension " +
                                                        schema.dimension(st.atoms[i].level.resolved->dim).name());
  if (st.groupers[0].resolved->dim == st.groupers[1].resolved->dim)
    throw Error(ErrorCode::ConstraintViolation, detail::at(text, st.groupers[1].offset) + "both groupers are on dimension " +
                                                    schema.dimension(st.groupers[0].resolved->dim).name());
  for (const auto& g : st.groupers)
    for (const auto& a : st.atoms)
      if (a.level.resolved->dim == g.resolved->dim && a.level.resolved->depth < g.resolved->depth)
        throw Error(ErrorCode::ConstraintViolation, detail::at(text, a.level.offset) + "filter level " +
                                                        level_name(schema, g.resolved->dim, a.level.resolved->depth, true) +
                                                        " is below grouper level " +
                                                        level_name(schema, g.resolved->dim, g.resolved->depth, true));
  return st;
}

/// Builds the operator input from a resolved statement.
inline AnalyzeQuery bind(const AnalyzeStatement& st, const DetailedCube& cube) {
  const auto& schema = cube.schema();
  AnalyzeQuery aq;
  aq.cube = &cube;
  aq.agg = *parse_agg(st.agg);
  aq.measure = schema.measures[*schema.find_measure(st.measure)].name;
  aq.alias = st.measure_alias.empty() ? aq.measure : st.measure_alias;
  aq.name = st.name;
  for (const auto& a : st.atoms) {
    if (!a.level.resolved || !a.code) throw Error(ErrorCode::InvalidQuery, "statement is not resolved");
    aq.condition.atoms.emplace_back(a.level.resolved->dim, a.level.resolved->depth, std::vector<Code>{*a.code});
  }
  if (st.groupers.size() != 2) throw Error(ErrorCode::ConstraintViolation, "GROUP BY needs exactly two levels");
  for (std::size_t i = 0; i < 2; ++i) {
    if (!st.groupers[i].resolved) throw Error(ErrorCode::InvalidQuery, "statement is not resolved");
    aq.groupers[i] = *st.groupers[i].resolved;
  }
  validate_analyze(aq);
  return aq;
}

inline AnalyzeQuery parse_analyze(std::string_view text, const DetailedCube& cube) {
  return bind(parse(text, cube.schema()), cube);
}

/// Canonical text: upper-case keywords, AND between atoms, every value quoted.
inline std::string render(const AnalyzeStatement& st) {
  auto level = [](const LevelRef& r) { return r.qualifier.empty() ? r.level : r.qualifier + "." + r.level; };
  auto quote = [](const std::string& v) {
    std::string out = "'";
    for (char c : v) out += c == '\'' ? std::string("''") : std::string(1, c);
    return out + "'";
  };
  std::string out = "ANALYZE " + st.agg + "(" + st.measure + ")";
  if (!st.measure_alias.empty()) out += " AS " + st.measure_alias;
  out += " FROM " + st.cube;
  for (std::size_t i = 0; i < st.atoms.size(); ++i)
    out += (i ? " AND " : " FOR ") + level(st.atoms[i].level) + " = " + quote(st.atoms[i].value);
  out += " GROUP BY ";
  for (std::size_t i = 0; i < st.groupers.size(); ++i) out += (i ? ", " : "") + level(st.groupers[i]);
  if (!st.name.empty()) out += " AS " + st.name;
  return out;
}

}  // namespace analyze
