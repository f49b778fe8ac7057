#pragma once

// Three equivalent ways to compute the five facilitator results:
//   Min: execute the five facilitators directly (5 fact scans, no post-processing)
//   Mid: one merged original+drill-down query plus both siblings (3 scans)
//   Max: one all-encompassing query, distributed into the five maps (1 scan)

#include <array>
#include <chrono>
#include <optional>
#include <string>
#include <string_view>

#include "analyze/analyze_op.hpp"
#include "analyze/query.hpp"

namespace analyze {

enum class Strategy { Min, Mid, Max };

inline std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::Min: return "min";
    case Strategy::Mid: return "mid";
    case Strategy::Max: return "max";
  }
  return "?";
}

inline std::optional<Strategy> parse_strategy(std::string_view s) {
  if (iequals(s, "min")) return Strategy::Min;
  if (iequals(s, "mid")) return Strategy::Mid;
  if (iequals(s, "max")) return Strategy::Max;
  return std::nullopt;
}

/// Coordinate tuple -> aggregate value, with its grouper schema.
using ResultMap = CellSet;

/// Inserts m at key, or folds it into the current value with the adapter.
inline void update_map(ResultMap& h, const Coord& key, const Value& m, const AggAdapter& adapter) {
  if (key.size() != h.levels.size())
    throw Error(ErrorCode::ArityMismatch,
                "key arity " + std::to_string(key.size()) + " vs map arity " + std::to_string(h.levels.size()));
  auto [it, inserted] = h.cells.try_emplace(key, m);
  if (!inserted) it->second = adapter.fold(it->second, m);
}

/// A merged query plus the grouper position serving each facilitator role.
struct MergedQuery {
  CubeQuery query;
  std::size_t grouper_a = 0;  // L_gamma_alpha
  std::size_t grouper_b = 0;  // L_gamma_beta
  std::optional<std::size_t> drill_a;  // L_gamma_alpha-1
  std::optional<std::size_t> drill_b;  // L_gamma_beta-1
  std::optional<std::size_t> sigma_a;  // position carrying L_sigma_alpha codes
  std::optional<std::size_t> sigma_b;
  Code value_a = 0;  // v_alpha, checked at sigma_a
  Code value_b = 0;
};

namespace detail {

inline std::size_t push_grouper(CubeQuery& q, GrouperLevel g) {
  q.groupers.push_back(g);
  return q.groupers.size() - 1;
}

}  // namespace detail

/// All-encompassing query: sibling-widened filters on both grouper dimensions,
/// phi_box intact, grouped by [La-1, Lb-1, La, Lb, Lsa, Lsb]. When a filter
/// level coincides with its grouper level the duplicate slot is taken by the
/// widened filter level instead, and the sigma check reads the grouper position.
inline MergedQuery build_all_encompassing(const AnalyzeQuery& aq) {
  validate_analyze(aq);
  const auto& schema = aq.cube->schema();
  MergedQuery m;
  m.query = CubeQuery{aq.cube, {}, {}, aq.measure, aq.alias + "_A", aq.agg};
  std::array<const SelectionAtom*, 2> atoms{};
  for (auto s : {Side::Alpha, Side::Beta}) {
    const auto i = static_cast<std::size_t>(s);
    const auto& g = aq.grouper(s);
    const auto& dim = schema.dimension(g.dim);
    atoms[i] = aq.atom(s);
    if (!atoms[i]) throw Error(ErrorCode::DegradedStructure, "no filter atom on " + dim.name());
    if (atoms[i]->depth >= dim.all_depth()) throw Error(ErrorCode::DegradedStructure, "filter on " + dim.name() + " is at ALL");
    if (g.depth == 0) throw Error(ErrorCode::DegradedStructure, "grouper on " + dim.name() + " is already most detailed");
  }
  for (auto s : {Side::Alpha, Side::Beta}) {
    const auto* atom = atoms[static_cast<std::size_t>(s)];
    const auto& dim = schema.dimension(atom->dim);
    m.query.condition.atoms.emplace_back(atom->dim, atom->depth + 1,
                                         std::vector<Code>{dim.anc(atom->depth, atom->depth + 1, atom->values.front())});
  }
  for (const auto& a : aq.other_atoms()) m.query.condition.atoms.push_back(a);

  const auto& ga = aq.grouper(Side::Alpha);
  const auto& gb = aq.grouper(Side::Beta);
  m.drill_a = detail::push_grouper(m.query, {ga.dim, ga.depth - 1});
  m.drill_b = detail::push_grouper(m.query, {gb.dim, gb.depth - 1});
  m.grouper_a = detail::push_grouper(m.query, ga);
  m.grouper_b = detail::push_grouper(m.query, gb);
  for (auto s : {Side::Alpha, Side::Beta}) {
    const auto* atom = atoms[static_cast<std::size_t>(s)];
    const auto& g = aq.grouper(s);
    const bool same = atom->depth == g.depth;
    const auto pos = detail::push_grouper(m.query, {g.dim, same ? atom->depth + 1 : atom->depth});
    (s == Side::Alpha ? m.sigma_a : m.sigma_b) = same ? (s == Side::Alpha ? m.grouper_a : m.grouper_b) : pos;
    (s == Side::Alpha ? m.value_a : m.value_b) = atom->values.front();
  }
  return m;
}

/// Original and drill-down queries merged: original condition, groupers
/// [La-1, Lb-1, La, Lb] minus the drill levels that do not exist.
inline MergedQuery build_org_dd_merged(const AnalyzeQuery& aq) {
  validate_analyze(aq);
  MergedQuery m;
  m.query = CubeQuery{aq.cube, aq.condition, {}, aq.measure, aq.alias + "_MID", aq.agg};
  const auto& ga = aq.grouper(Side::Alpha);
  const auto& gb = aq.grouper(Side::Beta);
  if (ga.depth > 0) m.drill_a = detail::push_grouper(m.query, {ga.dim, ga.depth - 1});
  if (gb.depth > 0) m.drill_b = detail::push_grouper(m.query, {gb.dim, gb.depth - 1});
  m.grouper_a = detail::push_grouper(m.query, ga);
  m.grouper_b = detail::push_grouper(m.query, gb);
  if (!m.drill_a && !m.drill_b) m.query.alias = aq.alias;
  return m;
}

struct SlotResult {
  std::optional<CellSet> cells;
  std::string reason;  // set when the slot is empty
};

struct AnalyzeResult {
  std::array<SlotResult, 5> slots;
  Strategy strategy = Strategy::Min;  // strategy that actually ran
  std::string fallback_reason;
  std::size_t fact_scans = 0;
  std::int64_t facilitator_exec_ns = 0;
  std::int64_t postprocess_ns = 0;
  /// Boundary between store execution and in-memory post-processing.
  std::chrono::steady_clock::time_point exec_end{};
  /// Execution time per executed store query, keyed by role or "merged".
  std::vector<std::pair<std::string, std::int64_t>> query_exec_ns;
  std::size_t distributed_tuples = 0;
  std::size_t map_updates = 0;

  SlotResult& operator[](Role r) { return slots[static_cast<std::size_t>(r)]; }
  const SlotResult& operator[](Role r) const { return slots[static_cast<std::size_t>(r)]; }
};

/// Same slot occupancy and cells (values within rel_tol; integers exact).
inline bool same_results(const AnalyzeResult& a, const AnalyzeResult& b, double rel_tol = 1e-9) {
  for (auto r : kAllRoles) {
    const auto& x = a[r].cells;
    const auto& y = b[r].cells;
    if (x.has_value() != y.has_value()) return false;
    if (x && !x->approx_equal(*y, rel_tol)) return false;
  }
  return true;
}

namespace detail {

using Clock = std::chrono::steady_clock;

inline std::int64_t ns_between(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(b - a).count();
}

inline CellSet timed_execute(const CubeQuery& q, std::string label, AnalyzeResult& out, ExecContext& ctx) {
  const auto t0 = Clock::now();
  auto cells = execute_query(q, &ctx);
  out.query_exec_ns.emplace_back(std::move(label), ns_between(t0, Clock::now()));
  return cells;
}

inline ResultMap empty_map(const FacilitatorSet& fs, Role r) {
  const auto& q = *fs[r].query;
  return ResultMap{q.groupers, q.alias, {}};
}

/// Collects one facilitator's cells. Small two-column key spaces (relative to
/// the number of tuples to distribute) use a dense array, others update_map.
class SlotAccumulator {
 public:
  SlotAccumulator(ResultMap map, const CubeSchema& schema, AggAdapter adapter, std::size_t tuples)
      : map_(std::move(map)), adapter_(adapter) {
    const auto& l = map_.levels;
    radix_b_ = schema.dimension(l[1].dim).member_count(l[1].depth);
    const std::size_t space = schema.dimension(l[0].dim).member_count(l[0].depth) * radix_b_;
    if (space <= 4 * tuples + 1024) {
      values_.resize(space);
      present_.assign(space, 0);
    }
  }

  void add(Code a, Code b, const Value& m) {
    if (present_.empty()) {
      update_map(map_, Coord{a, b}, m, adapter_);
      return;
    }
    const std::size_t i = static_cast<std::size_t>(a) * radix_b_ + b;
    if (present_[i]) {
      values_[i] = adapter_.fold(values_[i], m);
    } else {
      values_[i] = m;
      present_[i] = 1;
    }
  }

  ResultMap finish() && {
    for (std::size_t i = 0; i < present_.size(); ++i)
      if (present_[i]) map_.cells.emplace(Coord{static_cast<Code>(i / radix_b_), static_cast<Code>(i % radix_b_)}, values_[i]);
    return std::move(map_);
  }

 private:
  ResultMap map_;
  AggAdapter adapter_;
  std::size_t radix_b_ = 1;
  std::vector<Value> values_;
  std::vector<char> present_;
};

}  // namespace detail

inline AnalyzeResult run_min_mqo(const FacilitatorSet& fs, ExecContext* ctx = nullptr) {
  ExecContext local;
  ExecContext& c = ctx ? *ctx : local;
  const std::size_t scans_before = c.fact_scans;
  AnalyzeResult out;
  out.strategy = Strategy::Min;
  const auto t0 = detail::Clock::now();
  for (auto r : kAllRoles) {
    if (!fs[r].present()) {
      out[r].reason = fs[r].reason;
      continue;
    }
    out[r].cells = detail::timed_execute(*fs[r].query, std::string(to_string(r)), out, c);
  }
  out.exec_end = detail::Clock::now();
  out.facilitator_exec_ns = detail::ns_between(t0, out.exec_end);
  out.fact_scans = c.fact_scans - scans_before;
  return out;
}

inline AnalyzeResult run_mid_mqo(const AnalyzeQuery& aq, const FacilitatorSet& fs, ExecContext* ctx = nullptr) {
  ExecContext local;
  ExecContext& c = ctx ? *ctx : local;
  const std::size_t scans_before = c.fact_scans;
  AnalyzeResult out;
  out.strategy = Strategy::Mid;
  const auto merged = build_org_dd_merged(aq);

  const auto t0 = detail::Clock::now();
  const CellSet merged_cells = detail::timed_execute(merged.query, "merged", out, c);
  for (auto r : {Role::SibA, Role::SibB}) {
    if (fs[r].present()) out[r].cells = detail::timed_execute(*fs[r].query, std::string(to_string(r)), out, c);
    else out[r].reason = fs[r].reason;
  }
  const auto t1 = detail::Clock::now();

  const AggAdapter adapter{aq.agg};
  const auto& schema = aq.cube->schema();
  const std::size_t n = merged_cells.size();
  detail::SlotAccumulator h_org(detail::empty_map(fs, Role::Org), schema, adapter, n);
  std::optional<detail::SlotAccumulator> h_dda, h_ddb;
  if (fs[Role::DdA].present() && merged.drill_a) h_dda.emplace(detail::empty_map(fs, Role::DdA), schema, adapter, n);
  if (fs[Role::DdB].present() && merged.drill_b) h_ddb.emplace(detail::empty_map(fs, Role::DdB), schema, adapter, n);
  // Every merged tuple already satisfies phi_alpha AND phi_beta.
  for (const auto& [t, m] : merged_cells.cells) {
    ++out.distributed_tuples;
    h_org.add(t[merged.grouper_a], t[merged.grouper_b], m);
    if (h_dda) h_dda->add(t[*merged.drill_a], t[merged.grouper_b], m);
    if (h_ddb) h_ddb->add(t[merged.grouper_a], t[*merged.drill_b], m);
    out.map_updates += 1 + (h_dda ? 1 : 0) + (h_ddb ? 1 : 0);
  }
  out[Role::Org].cells = std::move(h_org).finish();
  if (h_dda) out[Role::DdA].cells = std::move(*h_dda).finish();
  else out[Role::DdA].reason = fs[Role::DdA].reason;
  if (h_ddb) out[Role::DdB].cells = std::move(*h_ddb).finish();
  else out[Role::DdB].reason = fs[Role::DdB].reason;

  const auto t2 = detail::Clock::now();
  out.exec_end = t1;
  out.facilitator_exec_ns = detail::ns_between(t0, t1);
  out.postprocess_ns = detail::ns_between(t1, t2);
  out.fact_scans = c.fact_scans - scans_before;
  return out;
}

/// Falls back to Mid-MQO (and says why) when the all-encompassing query cannot be built.
inline AnalyzeResult run_max_mqo(const AnalyzeQuery& aq, const FacilitatorSet& fs, ExecContext* ctx = nullptr) {
  std::optional<MergedQuery> built;
  std::string fallback;
  try {
    built = build_all_encompassing(aq);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegradedStructure) throw;
    fallback = e.what();
  }
  if (!built) {
    auto out = run_mid_mqo(aq, fs, ctx);
    out.fallback_reason = fallback;
    return out;
  }
  const MergedQuery& qa = *built;

  ExecContext local;
  ExecContext& c = ctx ? *ctx : local;
  const std::size_t scans_before = c.fact_scans;
  AnalyzeResult out;
  out.strategy = Strategy::Max;

  const auto t0 = detail::Clock::now();
  const CellSet cells = detail::timed_execute(qa.query, "all", out, c);
  const auto t1 = detail::Clock::now();

  const AggAdapter adapter{aq.agg};
  const auto& schema = aq.cube->schema();
  const std::size_t n = cells.size();
  std::vector<detail::SlotAccumulator> h;
  for (auto r : kAllRoles) h.emplace_back(detail::empty_map(fs, r), schema, adapter, n);
  auto& h_org = h[0];
  auto& h_sa = h[1];
  auto& h_sb = h[2];
  auto& h_dda = h[3];
  auto& h_ddb = h[4];
  const std::size_t ga = qa.grouper_a, gb = qa.grouper_b, da = *qa.drill_a, db = *qa.drill_b;
  const std::size_t sa = *qa.sigma_a, sb = *qa.sigma_b;
  for (const auto& [t, m] : cells.cells) {
    ++out.distributed_tuples;
    const bool phi_a = t[sa] == qa.value_a;
    const bool phi_b = t[sb] == qa.value_b;
    if (phi_a && phi_b) {
      h_org.add(t[ga], t[gb], m);
      h_dda.add(t[da], t[gb], m);
      h_ddb.add(t[ga], t[db], m);
      out.map_updates += 3;
    }
    if (phi_b) {
      h_sa.add(t[sa], t[gb], m);
      ++out.map_updates;
    }
    if (phi_a) {
      h_sb.add(t[ga], t[sb], m);
      ++out.map_updates;
    }
  }
  for (std::size_t i = 0; i < 5; ++i) out.slots[i].cells = std::move(h[i]).finish();

  const auto t2 = detail::Clock::now();
  out.exec_end = t1;
  out.facilitator_exec_ns = detail::ns_between(t0, t1);
  out.postprocess_ns = detail::ns_between(t1, t2);
  out.fact_scans = c.fact_scans - scans_before;
  return out;
}

inline AnalyzeResult run_strategy(Strategy s, const AnalyzeQuery& aq, const FacilitatorSet& fs, ExecContext* ctx = nullptr) {
  switch (s) {
    case Strategy::Min: return run_min_mqo(fs, ctx);
    case Strategy::Mid: return run_mid_mqo(aq, fs, ctx);
    case Strategy::Max: return run_max_mqo(aq, fs, ctx);
  }
  throw Error(ErrorCode::InvalidQuery, "unknown strategy");
}

}  // namespace analyze
