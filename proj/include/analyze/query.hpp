#pragma once

// Single cube queries <C0, phi, [groupers], agg(M0)>: representation,
// execution (filter by detailed proxies, roll rows up to the grouper levels,
// aggregate per same-coordinate group), and the cube-usability checklist used
// to decide whether one query's cells can be filtered and re-aggregated into
// another's.

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "analyze/aggregate.hpp"
#include "analyze/cube.hpp"
#include "analyze/error.hpp"
#include "analyze/hierarchy.hpp"
#include "analyze/row_set.hpp"

namespace analyze {

inline constexpr std::size_t kMaxGroupers = 6;

/// D.L in {v1..vk}; values are codes at `depth`, kept sorted and unique.
struct SelectionAtom {
  std::size_t dim = 0;
  int depth = 0;
  std::vector<Code> values;

  SelectionAtom() = default;
  SelectionAtom(std::size_t d, int l, std::vector<Code> v) : dim(d), depth(l), values(std::move(v)) { normalize(); }

  void normalize() {
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
  }
  bool single_valued() const noexcept { return values.size() == 1; }
  friend bool operator==(const SelectionAtom&, const SelectionAtom&) = default;
};

/// Conjunction of atoms. A well-formed condition has at most one atom per dimension.
struct SelectionCondition {
  std::vector<SelectionAtom> atoms;

  const SelectionAtom* find(std::size_t dim) const {
    for (const auto& a : atoms)
      if (a.dim == dim) return &a;
    return nullptr;
  }
  bool one_atom_per_dimension() const {
    std::set<std::size_t> seen;
    for (const auto& a : atoms)
      if (!seen.insert(a.dim).second) return false;
    return true;
  }
  friend bool operator==(const SelectionCondition&, const SelectionCondition&) = default;
};

struct GrouperLevel {
  std::size_t dim = 0;
  int depth = 0;
  friend auto operator<=>(const GrouperLevel&, const GrouperLevel&) = default;
};

struct CubeQuery {
  const DetailedCube* cube = nullptr;
  SelectionCondition condition;
  std::vector<GrouperLevel> groupers;
  std::string measure;
  std::string alias;
  AggFn agg = AggFn::Sum;

  friend bool operator==(const CubeQuery&, const CubeQuery&) = default;
};

/// Cell coordinates: one code per grouper, in grouper order.
struct Coord {
  std::array<Code, kMaxGroupers> v{};
  std::uint8_t n = 0;

  Coord() = default;
  Coord(std::initializer_list<Code> codes) {
    for (Code c : codes) push_back(c);
  }
  void push_back(Code c) { v[n++] = c; }
  std::size_t size() const noexcept { return n; }
  Code operator[](std::size_t i) const { return v[i]; }
  Code& operator[](std::size_t i) { return v[i]; }

  friend bool operator==(const Coord& a, const Coord& b) {
    return a.n == b.n && std::equal(a.v.begin(), a.v.begin() + a.n, b.v.begin());
  }
  friend bool operator<(const Coord& a, const Coord& b) {
    return std::lexicographical_compare(a.v.begin(), a.v.begin() + a.n, b.v.begin(), b.v.begin() + b.n);
  }
};

struct CoordHash {
  std::size_t operator()(const Coord& c) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ c.n;
    for (std::size_t i = 0; i < c.n; ++i) {
      h ^= c.v[i];
      h *= 0x100000001b3ULL;
      h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
  }
};

using CellMap = std::unordered_map<Coord, Value, CoordHash>;

/// A query result: grouper schema plus one value per non-empty group.
struct CellSet {
  std::vector<GrouperLevel> levels;
  std::string alias;
  CellMap cells;

  std::size_t size() const noexcept { return cells.size(); }
  bool empty() const noexcept { return cells.empty(); }

  friend bool operator==(const CellSet& a, const CellSet& b) { return a.levels == b.levels && a.cells == b.cells; }

  /// Equal schema and keys; values equal within rel_tol (exact for integers).
  bool approx_equal(const CellSet& other, double rel_tol = 1e-9) const {
    if (levels != other.levels || cells.size() != other.cells.size()) return false;
    for (const auto& [k, v] : cells) {
      auto it = other.cells.find(k);
      if (it == other.cells.end() || !values_close(v, it->second, rel_tol)) return false;
    }
    return true;
  }
};

/// Per-invocation execution bookkeeping: optional deadline and a fact-scan counter.
struct ExecContext {
  std::optional<std::chrono::steady_clock::time_point> deadline;
  std::size_t fact_scans = 0;

  static ExecContext with_timeout(std::chrono::duration<double> limit) {
    ExecContext ctx;
    ctx.deadline = std::chrono::steady_clock::now() + std::chrono::duration_cast<std::chrono::steady_clock::duration>(limit);
    return ctx;
  }
  void check_deadline() const {
    if (deadline && std::chrono::steady_clock::now() > *deadline) throw Error(ErrorCode::Timeout, "query deadline exceeded");
  }
};

// ---------------------------------------------------------------------------
// Validation

inline std::size_t measure_index(const DetailedCube& cube, std::string_view measure) {
  if (auto m = cube.schema().find_measure(measure)) return *m;
  throw Error(ErrorCode::UnknownMeasure, "cube " + cube.schema().cube_name + " has no measure '" + std::string(measure) + "'");
}

inline void validate_atom(const CubeSchema& schema, const SelectionAtom& atom) {
  if (atom.dim >= schema.dimensions.size()) throw Error(ErrorCode::UnknownDimension, "atom on unknown dimension");
  const auto& dim = schema.dimension(atom.dim);
  if (atom.depth < 0 || atom.depth >= dim.level_count())
    throw Error(ErrorCode::UnknownLevel, "atom level out of range in " + dim.name());
  if (atom.values.empty()) throw Error(ErrorCode::InvalidQuery, "atom on " + dim.name() + " has no values");
  for (Code v : atom.values)
    if (v >= dim.member_count(atom.depth))
      throw Error(ErrorCode::UnknownMember, "atom value out of range in " + dim.name() + "." + dim.level(atom.depth).name);
}

/// Throws InvalidQuery/UnknownMeasure/... when q breaks a CubeQuery invariant.
inline void validate_query(const CubeQuery& q) {
  if (!q.cube) throw Error(ErrorCode::InvalidQuery, "query has no cube");
  const auto& schema = q.cube->schema();
  measure_index(*q.cube, q.measure);
  if (q.groupers.empty() || q.groupers.size() > kMaxGroupers)
    throw Error(ErrorCode::InvalidQuery, "query needs between 1 and " + std::to_string(kMaxGroupers) + " groupers");
  if (!q.condition.one_atom_per_dimension()) throw Error(ErrorCode::InvalidQuery, "more than one atom on a dimension");
  for (const auto& atom : q.condition.atoms) validate_atom(schema, atom);
  for (std::size_t i = 0; i < q.groupers.size(); ++i) {
    const auto& g = q.groupers[i];
    if (g.dim >= schema.dimensions.size()) throw Error(ErrorCode::UnknownDimension, "grouper on unknown dimension");
    const auto& dim = schema.dimension(g.dim);
    if (g.depth < 0 || g.depth >= dim.level_count()) throw Error(ErrorCode::UnknownLevel, "grouper level out of range");
    for (std::size_t j = 0; j < i; ++j)
      if (q.groupers[j] == g) throw Error(ErrorCode::InvalidQuery, "duplicate grouper " + dim.level(g.depth).name);
    if (const auto* atom = q.condition.find(g.dim); atom && atom->depth < g.depth)
      throw Error(ErrorCode::InvalidQuery, "filter on " + dim.name() + "." + dim.level(atom->depth).name +
                                               " is below grouper level " + dim.level(g.depth).name);
  }
}

// ---------------------------------------------------------------------------
// Level arithmetic

/// The same atom re-expressed at level 0.
inline SelectionAtom detailed_proxy(const CubeSchema& schema, const SelectionAtom& atom) {
  validate_atom(schema, atom);
  if (atom.depth == 0) return atom;
  const auto& dim = schema.dimension(atom.dim);
  std::vector<Code> codes;
  for (Code v : atom.values) {
    const auto& d = dim.desc(atom.depth, 0, v);
    codes.insert(codes.end(), d.begin(), d.end());
  }
  return SelectionAtom(atom.dim, 0, std::move(codes));
}

/// Codes at grouper_depth producible under atom (its descendants at that level).
inline std::vector<Code> grouper_domain(const Dimension& dim, const SelectionAtom& atom, int grouper_depth) {
  if (grouper_depth > atom.depth)
    throw Error(ErrorCode::LevelOrderViolation, "grouper level " + dim.level(grouper_depth).name + " above filter level " +
                                                    dim.level(atom.depth).name);
  std::vector<Code> out;
  for (Code v : atom.values) {
    const auto& d = dim.desc(atom.depth, grouper_depth, v);
    out.insert(out.end(), d.begin(), d.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// An absent atom is the trivial D.ALL = all atom.
inline SelectionAtom atom_or_all(const CubeSchema& schema, const SelectionCondition& cond, std::size_t dim) {
  if (const auto* a = cond.find(dim)) return *a;
  return SelectionAtom(dim, schema.dimension(dim).all_depth(), {0});
}

// ---------------------------------------------------------------------------
// Execution

namespace detail {

/// Groups rows on the finest requested level of each grouped dimension;
/// coarser grouper columns of the same dimension are derived per group.
struct GroupKeyer {
  std::vector<const Code*> columns;  // one per distinct grouped dimension
  std::vector<const Code*> tables;   // level 0 -> finest level, nullptr at level 0
  std::vector<std::uint64_t> radix;
  std::vector<std::size_t> source;   // per grouper: index into columns
  std::vector<const Code*> lifts;    // per grouper: finest level -> grouper level, nullptr when equal
  bool packable = true;

  GroupKeyer(const DetailedCube& cube, std::span<const GrouperLevel> groupers) {
    const auto& schema = cube.schema();
    std::vector<std::size_t> dims;
    std::vector<int> finest;
    for (const auto& g : groupers) {
      const auto it = std::find(dims.begin(), dims.end(), g.dim);
      if (it == dims.end()) {
        dims.push_back(g.dim);
        finest.push_back(g.depth);
      } else {
        auto& f = finest[static_cast<std::size_t>(it - dims.begin())];
        f = std::min(f, g.depth);
      }
    }
    std::uint64_t product = 1;
    for (std::size_t i = 0; i < dims.size(); ++i) {
      const auto& dim = schema.dimension(dims[i]);
      columns.push_back(cube.coordinates(dims[i]).data());
      tables.push_back(finest[i] == 0 ? nullptr : dim.ancestor_table(0, finest[i]).data());
      const std::uint64_t r = std::max<std::size_t>(dim.member_count(finest[i]), 1);
      radix.push_back(r);
      if (product > std::numeric_limits<std::uint64_t>::max() / r) packable = false;
      else product *= r;
    }
    for (const auto& g : groupers) {
      const auto b = static_cast<std::size_t>(std::find(dims.begin(), dims.end(), g.dim) - dims.begin());
      source.push_back(b);
      lifts.push_back(g.depth == finest[b] ? nullptr : schema.dimension(g.dim).ancestor_table(finest[b], g.depth).data());
    }
  }

  Code code(std::size_t i, std::size_t row) const {
    const Code c = columns[i][row];
    return tables[i] ? tables[i][c] : c;
  }
  std::uint64_t packed(std::size_t row) const {
    std::uint64_t k = 0;
    for (std::size_t i = 0; i < columns.size(); ++i) k = k * radix[i] + code(i, row);
    return k;
  }
  Coord coord(std::size_t row) const {
    Coord c;
    for (std::size_t i = 0; i < columns.size(); ++i) c.push_back(code(i, row));
    return c;
  }
  /// Grouper coordinates from the per-dimension finest codes.
  Coord expand(const Coord& base) const {
    Coord c;
    for (std::size_t i = 0; i < source.size(); ++i) {
      const Code b = base[source[i]];
      c.push_back(lifts[i] ? lifts[i][b] : b);
    }
    return c;
  }
  Coord unpack(std::uint64_t k) const {
    Coord base;
    base.n = static_cast<std::uint8_t>(columns.size());
    for (std::size_t i = columns.size(); i-- > 0;) {
      base.v[i] = static_cast<Code>(k % radix[i]);
      k /= radix[i];
    }
    return expand(base);
  }
};

template <typename Acc, typename Key, typename KeyFn, typename MeasureFn, typename Hash>
void fold_rows(const RowSet& rows, AggFn agg, KeyFn&& key_of, MeasureFn&& measure_of,
               std::unordered_map<Key, Acc, Hash>& groups, const ExecContext* ctx) {
  std::size_t seen = 0;
  rows.for_each([&](std::size_t r) {
    if (ctx && (++seen & 0xFFFF) == 0) ctx->check_deadline();
    const Acc m = measure_of(r);
    auto [it, inserted] = groups.try_emplace(key_of(r), m);
    if (inserted) return;
    switch (agg) {
      case AggFn::Sum:
      case AggFn::Count: it->second += m; break;
      case AggFn::Min: it->second = std::min(it->second, m); break;
      case AggFn::Max: it->second = std::max(it->second, m); break;
    }
  });
}

template <typename Acc, typename MeasureFn>
CellMap aggregate(const RowSet& rows, const GroupKeyer& keyer, AggFn agg, MeasureFn&& measure_of, const ExecContext* ctx) {
  CellMap cells;
  if (keyer.packable) {
    std::unordered_map<std::uint64_t, Acc, std::hash<std::uint64_t>> groups;
    fold_rows<Acc>(rows, agg, [&](std::size_t r) { return keyer.packed(r); }, measure_of, groups, ctx);
    cells.reserve(groups.size());
    for (const auto& [k, v] : groups) cells.emplace(keyer.unpack(k), Value(v));
  } else {
    std::unordered_map<Coord, Acc, CoordHash> groups;
    fold_rows<Acc>(rows, agg, [&](std::size_t r) { return keyer.coord(r); }, measure_of, groups, ctx);
    cells.reserve(groups.size());
    for (const auto& [k, v] : groups) cells.emplace(keyer.expand(k), Value(v));
  }
  return cells;
}

}  // namespace detail

/// Step (i) of query semantics: the fact rows selected by the conjunction of detailed proxies.
inline RowSet qualifying_rows(const DetailedCube& cube, const SelectionCondition& condition) {
  RowSet rows = RowSet::all(cube.row_count());
  for (const auto& atom : condition.atoms) rows &= cube.atom_rows(atom.dim, atom.depth, atom.values);
  return rows;
}

/// Executes q against its cube; counts one fact scan on ctx.
inline CellSet execute_query(const CubeQuery& q, ExecContext* ctx = nullptr) {
  validate_query(q);
  const auto& cube = *q.cube;
  if (ctx) {
    ctx->check_deadline();
    ++ctx->fact_scans;
  }
  const RowSet rows = qualifying_rows(cube, q.condition);
  const detail::GroupKeyer keyer(cube, q.groupers);

  CellSet out{q.groupers, q.alias, {}};
  if (q.agg == AggFn::Count) {
    out.cells = detail::aggregate<std::int64_t>(rows, keyer, q.agg, [](std::size_t) { return std::int64_t{1}; }, ctx);
    return out;
  }
  const auto& column = cube.measure(measure_index(cube, q.measure));
  std::visit(
      [&](const auto& values) {
        using T = typename std::decay_t<decltype(values)>::value_type;
        const T* data = values.data();
        out.cells = detail::aggregate<T>(rows, keyer, q.agg, [data](std::size_t r) { return data[r]; }, ctx);
      },
      column);
  return out;
}

// ---------------------------------------------------------------------------
// Cube usability

/// Checklist item ids, numbered as in the usability theorem.
enum class UsabilityCondition {
  SameCube = 1,
  SameSchemaAndAggregate = 2,
  OneAtomPerDimension = 3,
  PerfectRollability = 4,
  AncestorLevels = 5,
  AtomWithinGrouperDomain = 6,
};

struct UsabilityReport {
  bool usable = true;
  std::optional<UsabilityCondition> failed;
  std::string detail;

  void fail(UsabilityCondition c, std::string why) {
    if (!usable) return;
    usable = false;
    failed = c;
    detail = std::move(why);
  }
};

namespace detail {

/// Finest grouper depth per dimension, or nullopt when the dimension is not grouped.
inline std::optional<int> finest_depth(const CubeQuery& q, std::size_t dim) {
  std::optional<int> best;
  for (const auto& g : q.groupers)
    if (g.dim == dim && (!best || g.depth < *best)) best = g.depth;
  return best;
}

inline std::optional<std::size_t> finest_position(const CubeQuery& q, std::size_t dim) {
  std::optional<std::size_t> pos;
  for (std::size_t i = 0; i < q.groupers.size(); ++i)
    if (q.groupers[i].dim == dim && (!pos || q.groupers[i].depth < q.groupers[*pos].depth)) pos = i;
  return pos;
}

inline std::set<std::size_t> grouper_dims(const CubeQuery& q) {
  std::set<std::size_t> out;
  for (const auto& g : q.groupers) out.insert(g.dim);
  return out;
}

inline bool same_region(const CubeSchema& schema, const SelectionAtom& a, const SelectionAtom& b) {
  if (a == b) return true;
  return detailed_proxy(schema, a).values == detailed_proxy(schema, b).values;
}

}  // namespace detail

/// Can q_base's cells be filtered and re-aggregated into q_new's?
inline UsabilityReport cube_usable(const CubeQuery& q_base, const CubeQuery& q_new) {
  UsabilityReport report;
  using C = UsabilityCondition;
  if (!q_base.cube || q_base.cube != q_new.cube) {
    report.fail(C::SameCube, "queries run over different detailed cubes");
    return report;
  }
  const auto& schema = q_base.cube->schema();

  if (detail::grouper_dims(q_base) != detail::grouper_dims(q_new))
    report.fail(C::SameSchemaAndAggregate, "grouper dimensions differ");
  else if (!iequals(q_base.measure, q_new.measure))
    report.fail(C::SameSchemaAndAggregate, "measures differ");
  else if (q_base.agg != q_new.agg)
    report.fail(C::SameSchemaAndAggregate, "aggregate functions differ");

  if (!q_base.condition.one_atom_per_dimension() || !q_new.condition.one_atom_per_dimension())
    report.fail(C::OneAtomPerDimension, "a dimension carries more than one atom");

  for (const auto* q : {&q_base, &q_new})
    for (const auto& g : q->groupers)
      if (const auto* atom = q->condition.find(g.dim); atom && atom->depth < g.depth)
        report.fail(C::PerfectRollability, "filter level below grouper level in " + schema.dimension(g.dim).name());

  for (const auto& g : q_new.groupers) {
    const auto base_depth = detail::finest_depth(q_base, g.dim);
    if (base_depth && g.depth < *base_depth)
      report.fail(C::AncestorLevels, "grouper " + schema.dimension(g.dim).level(g.depth).name + " is below the base grouper " +
                                         schema.dimension(g.dim).level(*base_depth).name);
  }
  if (!report.usable) return report;

  // Item (vi): each new atom, lifted to the base grouper level of its
  // dimension, must select a subset of the base atom's grouper domain. A
  // dimension the base does not group is effectively grouped at ALL, where
  // only an atom selecting the same region passes.
  for (std::size_t d = 0; d < schema.dimensions.size(); ++d) {
    const auto& dim = schema.dimension(d);
    const SelectionAtom base_atom = atom_or_all(schema, q_base.condition, d);
    const SelectionAtom new_atom = atom_or_all(schema, q_new.condition, d);
    if (detail::same_region(schema, base_atom, new_atom)) continue;
    const int base_level = detail::finest_depth(q_base, d).value_or(dim.all_depth());
    if (new_atom.depth < base_level) {
      report.fail(C::AtomWithinGrouperDomain, "atom on " + dim.name() + "." + dim.level(new_atom.depth).name +
                                                  " cannot be expressed at base grouper level " + dim.level(base_level).name);
      return report;
    }
    const auto lifted = grouper_domain(dim, new_atom, base_level);
    const auto gdom = grouper_domain(dim, base_atom, base_level);
    if (!std::includes(gdom.begin(), gdom.end(), lifted.begin(), lifted.end())) {
      report.fail(C::AtomWithinGrouperDomain, "atom on " + dim.name() + " selects values outside the base grouper domain");
      return report;
    }
  }
  return report;
}

/// Filters base cells by target's atoms (at the base grouper levels), rolls
/// them up to the target grouper levels and folds them with the adapter.
inline CellSet reaggregate(const CellSet& base_cells, const CubeQuery& target, const CubeQuery& base) {
  const auto report = cube_usable(base, target);
  if (!report.usable) throw Error(ErrorCode::UsabilityViolation, report.detail);
  const auto& schema = target.cube->schema();

  struct Check {
    std::size_t position;
    std::vector<char> allowed;  // over codes at the base level
  };
  std::vector<Check> checks;
  for (const auto& atom : target.condition.atoms) {
    const auto base_pos = detail::finest_position(base, atom.dim);
    if (!base_pos) continue;  // same region as base by usability
    const auto& dim = schema.dimension(atom.dim);
    const SelectionAtom base_atom = atom_or_all(schema, base.condition, atom.dim);
    if (detail::same_region(schema, base_atom, atom)) continue;
    const int base_level = base.groupers[*base_pos].depth;
    Check check{*base_pos, std::vector<char>(dim.member_count(base_level), 0)};
    for (Code c : grouper_domain(dim, atom, base_level)) check.allowed[c] = 1;
    checks.push_back(std::move(check));
  }

  struct Lift {
    std::size_t position;
    int from;
    int to;
    const Dimension* dim;
  };
  std::vector<Lift> lifts;
  for (const auto& g : target.groupers) {
    const auto pos = *detail::finest_position(base, g.dim);
    lifts.push_back({pos, base.groupers[pos].depth, g.depth, &schema.dimension(g.dim)});
  }

  const AggAdapter adapter{target.agg};
  CellSet out{target.groupers, target.alias, {}};
  for (const auto& [coord, value] : base_cells.cells) {
    bool keep = true;
    for (const auto& c : checks) keep = keep && c.allowed[coord[c.position]];
    if (!keep) continue;
    Coord key;
    for (const auto& l : lifts) key.push_back(l.dim->anc(l.from, l.to, coord[l.position]));
    auto [it, inserted] = out.cells.try_emplace(key, value);
    if (!inserted) it->second = adapter.fold(it->second, value);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rendering

inline std::string level_name(const CubeSchema& schema, std::size_t dim, int depth, bool qualified = false) {
  const auto& d = schema.dimension(dim);
  return qualified ? d.name() + "." + d.level(depth).name : d.level(depth).name;
}

inline std::string render_atom(const CubeSchema& schema, const SelectionAtom& atom, bool qualified = false) {
  const auto& dim = schema.dimension(atom.dim);
  std::string out = level_name(schema, atom.dim, atom.depth, qualified);
  auto quoted = [&](Code c) { return "'" + dim.dictionary(atom.depth).label(c) + "'"; };
  if (atom.values.size() == 1) return out + " = " + quoted(atom.values.front());
  out += " IN (";
  for (std::size_t i = 0; i < atom.values.size(); ++i) out += (i ? ", " : "") + quoted(atom.values[i]);
  return out + ")";
}

inline std::string render_condition(const CubeSchema& schema, const SelectionCondition& cond, bool qualified = false) {
  std::string out;
  for (std::size_t i = 0; i < cond.atoms.size(); ++i) out += (i ? " AND " : "") + render_atom(schema, cond.atoms[i], qualified);
  return out;
}

inline std::string render_groupers(const CubeSchema& schema, std::span<const GrouperLevel> groupers, bool qualified = false) {
  std::string out;
  for (std::size_t i = 0; i < groupers.size(); ++i)
    out += (i ? ", " : "") + level_name(schema, groupers[i].dim, groupers[i].depth, qualified);
  return out;
}

/// e.g. "sum(store_sales) FOR country = 'USA' AND year = '2025' GROUP BY city, month"
inline std::string render_query(const CubeQuery& q, bool qualified = false) {
  const auto& schema = q.cube->schema();
  std::string out = std::string(to_string(q.agg)) + "(" + q.measure + ")";
  if (!q.alias.empty()) out += " AS " + q.alias;
  if (!q.condition.atoms.empty()) out += " FOR " + render_condition(schema, q.condition, qualified);
  return out + " GROUP BY " + render_groupers(schema, q.groupers, qualified);
}

}  // namespace analyze
