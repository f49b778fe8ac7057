#pragma once

// One ANALYZE invocation end to end, timed in four contiguous stages:
// parse, construct (facilitators and strategy choice), facilitator execution,
// post-processing.

#include <algorithm>
#include <chrono>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "analyze/csv.hpp"
#include "analyze/mqo.hpp"
#include "analyze/parser.hpp"
#include "analyze/selector.hpp"

namespace analyze {

struct TimingBreakdown {
  std::int64_t parse_ns = 0;
  std::int64_t construct_ns = 0;
  std::int64_t facilitator_exec_ns = 0;
  std::int64_t postprocess_ns = 0;
  std::int64_t total_ns = 0;

  std::int64_t stage_sum() const { return parse_ns + construct_ns + facilitator_exec_ns + postprocess_ns; }
};

struct RunOptions {
  std::optional<Strategy> strategy;  // nullopt: let the selector choose
  SelectorConfig selector;
  std::chrono::duration<double> timeout = std::chrono::seconds(300);
  bool collect_stats = false;  // compute CostStats even when the strategy is forced
};

struct AnalyzeRun {
  AnalyzeStatement statement;
  AnalyzeQuery query;
  FacilitatorSet facilitators;
  std::optional<CostStats> stats;
  std::optional<StrategyChoice> choice;
  AnalyzeResult result;
  TimingBreakdown timing;
};

inline AnalyzeRun run_analyze(std::string_view text, const DetailedCube& cube, const RunOptions& opt = {}) {
  using Clock = std::chrono::steady_clock;
  auto ns = [](Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(b - a).count();
  };
  AnalyzeRun run;
  const auto t0 = Clock::now();
  run.statement = parse(text, cube.schema());
  run.query = bind(run.statement, cube);
  const auto t1 = Clock::now();

  run.facilitators = build_facilitators(run.query);
  Strategy strategy = opt.strategy.value_or(Strategy::Mid);
  if (!opt.strategy || opt.collect_stats) run.stats = estimate_stats(run.query);
  if (!opt.strategy) {
    run.choice = choose_strategy(*run.stats, opt.selector);
    strategy = run.choice->chosen;
  }
  const auto t2 = Clock::now();

  auto ctx = ExecContext::with_timeout(opt.timeout);
  run.result = run_strategy(strategy, run.query, run.facilitators, &ctx);
  const auto t3 = Clock::now();

  const auto boundary = std::clamp(run.result.exec_end, t2, t3);
  run.timing.parse_ns = ns(t0, t1);
  run.timing.construct_ns = ns(t1, t2);
  run.timing.facilitator_exec_ns = ns(t2, boundary);
  run.timing.postprocess_ns = ns(boundary, t3);
  run.timing.total_ns = ns(t0, t3);
  return run;
}

// ---------------------------------------------------------------------------
// Rendering

/// One CSV table: qualified grouper level names plus the alias column, rows
/// sorted by decoded labels.
inline void write_cells_csv(std::ostream& out, const CubeSchema& schema, const CellSet& cells) {
  for (std::size_t i = 0; i < cells.levels.size(); ++i)
    out << csv::quote_field(level_name(schema, cells.levels[i].dim, cells.levels[i].depth, true)) << ',';
  out << csv::quote_field(cells.alias) << '\n';

  std::vector<std::pair<std::vector<std::string>, std::string>> rows;
  rows.reserve(cells.size());
  for (const auto& [coord, value] : cells.cells) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < cells.levels.size(); ++i)
      labels.push_back(schema.dimension(cells.levels[i].dim).dictionary(cells.levels[i].depth).label(coord[i]));
    rows.emplace_back(std::move(labels), format_value(value));
  }
  std::sort(rows.begin(), rows.end());
  for (const auto& [labels, value] : rows) {
    for (const auto& l : labels) out << csv::quote_field(l) << ',';
    out << value << '\n';
  }
}

/// Five sections, [org] [sibA] [sibB] [ddA] [ddB]; an empty slot prints its reason.
inline void write_result_csv(std::ostream& out, const CubeSchema& schema, const AnalyzeResult& result) {
  bool first = true;
  for (auto role : kAllRoles) {
    if (!first) out << '\n';
    first = false;
    out << '[' << to_string(role) << "]\n";
    const auto& slot = result[role];
    if (slot.cells) write_cells_csv(out, schema, *slot.cells);
    else out << "# empty: " << slot.reason << '\n';
  }
}

inline void write_timing(std::ostream& out, const TimingBreakdown& t) {
  out << "parse_ns=" << t.parse_ns << " construct_ns=" << t.construct_ns << " facilitator_exec_ns=" << t.facilitator_exec_ns
      << " postprocess_ns=" << t.postprocess_ns << " total_ns=" << t.total_ns << '\n';
}

}  // namespace analyze
