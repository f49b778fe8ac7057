#pragma once

// Chooses between Max-MQO and Mid-MQO from exact fact-touch counts of the
// facilitator filter regions.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <string_view>

#include "analyze/analyze_op.hpp"
#include "analyze/mqo.hpp"

namespace analyze {

struct CostStats {
  std::size_t row_count = 0;
  std::size_t facts_org = 0;
  std::size_t facts_sA = 0;
  std::size_t facts_sB = 0;
  std::size_t facts_A = 0;
  std::size_t facts_sib_union = 0;
  bool has_sA = false;
  bool has_sB = false;
  bool all_encompassing = false;  // q^A constructible (Max-MQO would not fall back)

  double ratio(std::size_t n) const { return row_count ? static_cast<double>(n) / static_cast<double>(row_count) : 0.0; }
};

namespace detail {

/// The region selected by phi with the atom on `widen` (if any) lifted to its parent.
inline RowSet widened_rows(const AnalyzeQuery& aq, std::initializer_list<Side> widen) {
  SelectionCondition cond = aq.condition;
  const auto& schema = aq.cube->schema();
  for (auto s : widen) {
    const auto dim_index = aq.grouper(s).dim;
    for (auto& a : cond.atoms) {
      if (a.dim != dim_index) continue;
      const auto& dim = schema.dimension(dim_index);
      if (a.depth < dim.all_depth()) a = SelectionAtom(a.dim, a.depth + 1, {dim.anc(a.depth, a.depth + 1, a.values.front())});
    }
  }
  return qualifying_rows(*aq.cube, cond);
}

}  // namespace detail

/// Exact counts from intersected per-member bitmaps. A missing sibling counts
/// 0 and clears its flag. facts_A counts the region with both filters widened
/// even when q^A itself is not constructible, so it always contains both siblings.
inline CostStats estimate_stats(const AnalyzeQuery& aq) {
  validate_analyze(aq);
  const auto fs = build_facilitators(aq);
  CostStats st;
  st.row_count = aq.cube->row_count();
  st.facts_org = qualifying_rows(*aq.cube, aq.condition).count();
  RowSet sib_union(st.row_count);
  if (fs[Role::SibA].present()) {
    const auto rows = detail::widened_rows(aq, {Side::Alpha});
    st.has_sA = true;
    st.facts_sA = rows.count();
    sib_union |= rows;
  }
  if (fs[Role::SibB].present()) {
    const auto rows = detail::widened_rows(aq, {Side::Beta});
    st.has_sB = true;
    st.facts_sB = rows.count();
    sib_union |= rows;
  }
  st.facts_sib_union = sib_union.count();
  st.facts_A = detail::widened_rows(aq, {Side::Alpha, Side::Beta}).count();
  try {
    build_all_encompassing(aq);
    st.all_encompassing = true;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegradedStructure) throw;
  }
  return st;
}

struct SelectorConfig {
  double coverage_threshold = 0.40;
  double imbalance_threshold = 0.45;
  bool enabled = true;

  /// Accepts selector.coverage_threshold, selector.imbalance_threshold, selector.enabled.
  void apply(std::string_view key, std::string_view value) {
    auto number = [&] {
      const std::string text(value);
      char* end = nullptr;
      const double v = std::strtod(text.c_str(), &end);
      if (text.empty() || end != text.c_str() + text.size() || v < 0.0 || v > 1.0)
        throw Error(ErrorCode::InvalidSpec, "selector threshold must be a number in [0,1], got '" + text + "'");
      return v;
    };
    if (key == "selector.coverage_threshold") coverage_threshold = number();
    else if (key == "selector.imbalance_threshold") imbalance_threshold = number();
    else if (key == "selector.enabled") {
      if (iequals(value, "true") || value == "1") enabled = true;
      else if (iequals(value, "false") || value == "0") enabled = false;
      else throw Error(ErrorCode::InvalidSpec, "selector.enabled expects true/false");
    } else {
      throw Error(ErrorCode::InvalidSpec, "unknown configuration key " + std::string(key));
    }
  }
};

struct StrategyChoice {
  Strategy chosen = Strategy::Mid;
  double sibling_coverage = 0.0;
  double sibling_imbalance = 0.0;
  std::string reason;

  /// e.g. "strategy=max (coverage=0.50 imbalance=0.30)"
  std::string header() const {
    char buf[96];
    std::snprintf(buf, sizeof buf, "strategy=%s (coverage=%.2f imbalance=%.2f)", std::string(to_string(chosen)).c_str(),
                  sibling_coverage, sibling_imbalance);
    return buf;
  }
};

/// Max iff coverage > coverage_threshold and imbalance < imbalance_threshold.
inline StrategyChoice choose_strategy(double coverage, double imbalance, const SelectorConfig& cfg = {}) {
  StrategyChoice c;
  c.sibling_coverage = coverage;
  c.sibling_imbalance = imbalance;
  if (!cfg.enabled) {
    c.reason = "selector disabled";
    return c;
  }
  if (coverage > cfg.coverage_threshold && imbalance < cfg.imbalance_threshold) {
    c.chosen = Strategy::Max;
    c.reason = "siblings cover a large share of q^A and are balanced";
  } else if (coverage <= cfg.coverage_threshold) {
    c.reason = "sibling coverage at or below threshold";
  } else {
    c.reason = "sibling imbalance at or above threshold";
  }
  return c;
}

inline double sibling_imbalance(const CostStats& st) {
  const auto hi = std::max(st.facts_sA, st.facts_sB);
  const auto lo = std::min(st.facts_sA, st.facts_sB);
  return hi ? 1.0 - static_cast<double>(lo) / static_cast<double>(hi) : 0.0;
}

inline StrategyChoice choose_strategy(const CostStats& st, const SelectorConfig& cfg = {}) {
  if (st.facts_A == 0) {
    StrategyChoice c;
    c.reason = "degenerate statistics: q^A touches no facts";
    return c;
  }
  const double coverage = static_cast<double>(st.facts_sib_union) / static_cast<double>(st.facts_A);
  auto c = choose_strategy(coverage, sibling_imbalance(st), cfg);
  if (c.chosen == Strategy::Max && !st.all_encompassing) {
    c.chosen = Strategy::Mid;
    c.reason = "q^A not constructible";
  }
  return c;
}

}  // namespace analyze
