#pragma once

// Workload runner: every query under every requested strategy, repeated,
// after warmups, one CSV row per run.

#include <array>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "analyze/pipeline.hpp"

namespace analyze {

struct WorkloadQuery {
  std::string label;
  std::string text;
  std::size_t reps = 1;
};

struct WorkloadSpec {
  std::vector<WorkloadQuery> queries;
  std::size_t warmup = 0;
  double timeout_s = 300.0;
};

/// {"warmup": 1, "timeout_s": 300, "queries": [{"label": "q1", "reps": 3, "text": "ANALYZE ..."}]}
inline WorkloadSpec parse_workload(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidSpec, std::string("workload is not valid JSON: ") + e.what());
  }
  WorkloadSpec spec;
  try {
    spec.warmup = j.value("warmup", std::size_t{0});
    spec.timeout_s = j.value("timeout_s", 300.0);
    for (const auto& q : j.at("queries")) {
      WorkloadQuery wq{q.at("label").get<std::string>(), q.at("text").get<std::string>(), q.value("reps", std::size_t{1})};
      if (wq.reps < 1) throw Error(ErrorCode::InvalidSpec, "query " + wq.label + ": reps must be at least 1");
      spec.queries.push_back(std::move(wq));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidSpec, std::string("malformed workload: ") + e.what());
  }
  if (spec.timeout_s <= 0) throw Error(ErrorCode::InvalidSpec, "timeout_s must be positive");
  return spec;
}

/// A requested strategy; nullopt means auto.
using StrategyRequest = std::optional<Strategy>;

inline std::string request_name(const StrategyRequest& r) { return r ? std::string(to_string(*r)) : "auto"; }

struct BenchRow {
  std::string label;
  std::string strategy;  // as requested
  std::size_t rep = 0;
  std::string status;    // ok | timeout
  std::string selected;  // strategy that actually ran
  TimingBreakdown timing;
  CostStats stats;
  std::optional<bool> chosen_ok;  // results equal Min-MQO's; unknown when the reference timed out
  std::string fallback;
  std::vector<std::pair<std::string, std::int64_t>> query_exec_ns;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::size_t queries_all_timed_out = 0;
  std::size_t query_count = 0;

  bool all_timed_out() const { return query_count > 0 && queries_all_timed_out == query_count; }
};

inline constexpr std::array<std::string_view, 7> kExecColumns{"org", "sibA", "sibB", "ddA", "ddB", "merged", "all"};

inline void write_bench_header(std::ostream& out) {
  out << "label,strategy,rep,status,selected,parse_ns,construct_ns,facilitator_exec_ns,postprocess_ns,total_ns,"
         "facts_org,facts_sA,facts_sB,facts_A,chosen_ok,fallback";
  for (auto c : kExecColumns) out << ",exec_" << c << "_ns";
  out << '\n';
}

inline void write_bench_row(std::ostream& out, const BenchRow& r) {
  out << csv::quote_field(r.label) << ',' << r.strategy << ',' << r.rep << ',' << r.status << ',' << r.selected << ',';
  if (r.status == "ok") {
    const auto& t = r.timing;
    out << t.parse_ns << ',' << t.construct_ns << ',' << t.facilitator_exec_ns << ',' << t.postprocess_ns << ',' << t.total_ns;
  } else {
    out << ",,,,";
  }
  out << ',' << r.stats.facts_org << ',' << r.stats.facts_sA << ',' << r.stats.facts_sB << ',' << r.stats.facts_A << ',';
  if (r.chosen_ok) out << (*r.chosen_ok ? "true" : "false");
  out << ',' << csv::quote_field(r.fallback);
  for (auto c : kExecColumns) {
    out << ',';
    for (const auto& [name, ns] : r.query_exec_ns)
      if (name == c) out << ns;
  }
  out << '\n';
}

/// Runs the workload sequentially. Rows are streamed to `csv_out` (if given) as they complete.
inline BenchReport run_bench(const DetailedCube& cube, const WorkloadSpec& workload, const std::vector<StrategyRequest>& strategies,
                             const SelectorConfig& selector = {}, std::ostream* csv_out = nullptr) {
  BenchReport report;
  report.query_count = workload.queries.size();
  if (csv_out) write_bench_header(*csv_out);
  const std::chrono::duration<double> timeout(workload.timeout_s);
  for (const auto& wq : workload.queries) {
    const auto aq = parse_analyze(wq.text, cube);
    const auto stats = estimate_stats(aq);

    std::optional<AnalyzeResult> reference;
    try {
      auto ctx = ExecContext::with_timeout(timeout);
      reference = run_min_mqo(build_facilitators(aq), &ctx);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Timeout) throw;
    }

    RunOptions opt;
    opt.selector = selector;
    opt.timeout = timeout;
    for (std::size_t w = 0; w < workload.warmup; ++w) {
      for (const auto& s : strategies) {
        opt.strategy = s;
        try {
          run_analyze(wq.text, cube, opt);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::Timeout) throw;
        }
      }
    }

    bool any_ok = false;
    for (const auto& s : strategies) {
      opt.strategy = s;
      for (std::size_t rep = 1; rep <= wq.reps; ++rep) {
        BenchRow row;
        row.label = wq.label;
        row.strategy = request_name(s);
        row.rep = rep;
        row.stats = stats;
        try {
          const auto run = run_analyze(wq.text, cube, opt);
          row.status = "ok";
          row.selected = std::string(to_string(run.result.strategy));
          row.timing = run.timing;
          row.fallback = run.result.fallback_reason;
          row.query_exec_ns = run.result.query_exec_ns;
          if (reference) row.chosen_ok = same_results(run.result, *reference);
          any_ok = true;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::Timeout) throw;
          row.status = "timeout";
          row.selected = s ? row.strategy : "";
        }
        if (csv_out) write_bench_row(*csv_out, row);
        report.rows.push_back(std::move(row));
      }
    }
    if (!any_ok) ++report.queries_all_timed_out;
  }
  return report;
}

}  // namespace analyze
