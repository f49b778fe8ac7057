// analyze_cli: load cubes, run ANALYZE queries, drive benchmark workloads and
// generate synthetic datasets.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "analyze/bench.hpp"
#include "analyze/pipeline.hpp"
#include "analyze/synth.hpp"

namespace fs = std::filesystem;
using namespace analyze;

namespace {

enum Exit { kOk = 0, kUsage = 1, kIo = 2, kParse = 3, kExec = 4, kTimeout = 5 };

struct DataFlags {
  std::string data_dir;
  std::string schema;
  std::vector<std::string> dims;
  std::string facts;
  char delimiter = ',';

  void add_to(CLI::App& cmd) {
    cmd.add_option("--data", data_dir, "Dataset directory with schema.txt, facts.csv and one CSV per dimension")
        ->envname("ANALYZE_DATA_DIR");
    cmd.add_option("--schema", schema, "Schema file");
    cmd.add_option("--dims", dims, "Dimension member files, named after their dimension");
    cmd.add_option("--facts", facts, "Fact file");
    cmd.add_option("--delimiter", delimiter, "CSV delimiter");
  }

  std::unique_ptr<DetailedCube> load() const {
    std::string schema_file = schema, fact_file = facts;
    std::vector<std::string> dim_files = dims;
    if (!data_dir.empty()) {
      const fs::path dir(data_dir);
      if (!fs::is_directory(dir)) throw Error(ErrorCode::Io, "no such data directory " + data_dir);
      if (schema_file.empty()) schema_file = (dir / "schema.txt").string();
      if (fact_file.empty()) fact_file = (dir / "facts.csv").string();
      if (dim_files.empty())
        for (const auto& e : fs::directory_iterator(dir))
          if (e.path().extension() == ".csv" && e.path().filename() != "facts.csv") dim_files.push_back(e.path().string());
    }
    if (schema_file.empty() || fact_file.empty())
      throw Error(ErrorCode::Io, "no dataset given: use --data (or ANALYZE_DATA_DIR) or --schema/--dims/--facts");
    return load_cube(schema_file, dim_files, fact_file, delimiter);
  }
};

/// 287998 -> "288K", 2000000 -> "2M", 999 -> "999".
std::string compact_count(std::size_t n) {
  char buf[32];
  if (n < 1000) return std::to_string(n);
  if (n < 1000000) {
    std::snprintf(buf, sizeof buf, "%.0fK", static_cast<double>(n) / 1e3);
    return buf;
  }
  std::snprintf(buf, sizeof buf, "%.1fM", static_cast<double>(n) / 1e6);
  std::string s = buf;
  if (s.size() > 3 && s.compare(s.size() - 3, 3, ".0M") == 0) s.erase(s.size() - 3, 2);
  return s;
}

bool is_load_error(ErrorCode c) {
  switch (c) {
    case ErrorCode::Io:
    case ErrorCode::ParseError:
    case ErrorCode::SchemaMismatch:
    case ErrorCode::InvalidHierarchy:
    case ErrorCode::UnknownMemberLabel:
    case ErrorCode::UnknownDimension:
      return true;
    default:
      return false;
  }
}

std::optional<std::unique_ptr<DetailedCube>> load_or_report(const DataFlags& flags, int& exit_code) {
  try {
    return flags.load();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    exit_code = is_load_error(e.code()) ? kIo : kExec;
    return std::nullopt;
  }
}

SelectorConfig selector_from(double coverage, double imbalance, const std::vector<std::string>& settings) {
  SelectorConfig cfg;
  cfg.coverage_threshold = coverage;
  cfg.imbalance_threshold = imbalance;
  for (const auto& s : settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::InvalidSpec, "--set expects key=value, got '" + s + "'");
    cfg.apply(s.substr(0, eq), s.substr(eq + 1));
  }
  return cfg;
}

StrategyRequest parse_request(const std::string& s) {
  if (iequals(s, "auto")) return std::nullopt;
  if (auto st = parse_strategy(s)) return *st;
  throw Error(ErrorCode::InvalidSpec, "unknown strategy '" + s + "' (auto, min, mid or max)");
}

/// "A:2x4x8,B:3x5" -> dimensions A and B with the given top-down fanouts.
std::vector<SynthDimension> parse_dims_spec(const std::string& text) {
  std::vector<SynthDimension> out;
  std::stringstream items(text);
  std::string item;
  while (std::getline(items, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw Error(ErrorCode::InvalidSpec, "dimension spec '" + item + "' lacks ':'");
    SynthDimension d{item.substr(0, colon), {}};
    std::stringstream fan(item.substr(colon + 1));
    std::string f;
    while (std::getline(fan, f, 'x')) {
      char* end = nullptr;
      const auto v = std::strtoull(f.c_str(), &end, 10);
      if (f.empty() || *end) throw Error(ErrorCode::InvalidSpec, "bad fanout '" + f + "' in '" + item + "'");
      d.fanouts.push_back(v);
    }
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ANALYZE operator engine: original, sibling and drill-down cube queries in one call"};
  app.require_subcommand(1);
  int exit_code = kOk;

  // load
  DataFlags load_flags;
  auto* load_cmd = app.add_subcommand("load", "Load a dataset and print its size");
  load_flags.add_to(*load_cmd);

  // query
  DataFlags query_flags;
  std::string query_text, query_strategy = "auto", query_output;
  double query_timeout = 300.0, coverage = 0.40, imbalance = 0.45;
  std::vector<std::string> query_settings;
  auto* query_cmd = app.add_subcommand("query", "Run one ANALYZE query");
  query_flags.add_to(*query_cmd);
  query_cmd->add_option("text", query_text, "ANALYZE statement")->required();
  query_cmd->add_option("--strategy", query_strategy, "auto, min, mid or max");
  query_cmd->add_option("--output", query_output, "Write result CSV here instead of stdout");
  query_cmd->add_option("--timeout-s", query_timeout, "Execution timeout in seconds");
  query_cmd->add_option("--coverage-threshold", coverage, "Selector: sibling coverage above which Max-MQO is considered");
  query_cmd->add_option("--imbalance-threshold", imbalance, "Selector: sibling imbalance below which Max-MQO is considered");
  query_cmd->add_option("--set", query_settings, "Configuration key=value (selector.*)");

  // bench
  DataFlags bench_flags;
  std::string workload_path, report_path, strategies_text = "min,mid,max";
  std::optional<double> bench_timeout;
  double bench_coverage = 0.40, bench_imbalance = 0.45;
  auto* bench_cmd = app.add_subcommand("bench", "Run a JSON workload and write a CSV report");
  bench_flags.add_to(*bench_cmd);
  bench_cmd->add_option("--workload", workload_path, "Workload JSON")->required();
  bench_cmd->add_option("--report,--output", report_path, "Report CSV (default stdout)");
  bench_cmd->add_option("--strategies", strategies_text, "Comma-separated subset of auto,min,mid,max");
  bench_cmd->add_option("--timeout-s", bench_timeout, "Per-query timeout, overrides the workload's");
  bench_cmd->add_option("--coverage-threshold", bench_coverage, "Selector coverage threshold");
  bench_cmd->add_option("--imbalance-threshold", bench_imbalance, "Selector imbalance threshold");

  // gensynth
  SynthSpec synth;
  std::string synth_out, synth_dims = "A:4x5x10,B:3x4x8";
  auto* gen_cmd = app.add_subcommand("gensynth", "Generate a deterministic synthetic dataset");
  gen_cmd->add_option("--out", synth_out, "Output directory")->required();
  gen_cmd->add_option("--dims", synth_dims, "Dimensions with top-down fanouts, e.g. A:4x5x10,B:3x4x8");
  gen_cmd->add_option("--facts", synth.facts, "Number of facts");
  gen_cmd->add_option("--seed", synth.seed, "Random seed");
  gen_cmd->add_option("--skew", synth.skew, "Zipf exponent over detailed members (0 = uniform)");
  gen_cmd->add_flag("--ragged", synth.ragged, "Vary the number of children per member");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*load_cmd) {
      auto cube = load_or_report(load_flags, exit_code);
      if (!cube) return exit_code;
      const auto& schema = (*cube)->schema();
      std::cout << schema.dimensions.size() << " dimensions, " << compact_count((*cube)->row_count()) << " facts\n";
      for (std::size_t d = 0; d < schema.dimensions.size(); ++d) {
        const auto& dim = schema.dimension(d);
        std::cout << "  " << dim.name() << ':';
        for (const auto& l : dim.levels()) std::cout << ' ' << l.name << '(' << l.member_count << ')';
        std::cout << '\n';
      }
      std::cout << "  measures:";
      for (const auto& m : schema.measures) std::cout << ' ' << m.name;
      std::cout << '\n';
      return kOk;
    }

    if (*query_cmd) {
      RunOptions opt;
      try {
        opt.strategy = parse_request(query_strategy);
        opt.selector = selector_from(coverage, imbalance, query_settings);
      } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
      }
      opt.timeout = std::chrono::duration<double>(query_timeout);
      auto cube = load_or_report(query_flags, exit_code);
      if (!cube) return exit_code;
      try {
        parse_analyze(query_text, **cube);
      } catch (const Error& e) {
        std::cerr << e.what() << '\n';
        return kParse;
      }
      AnalyzeRun run;
      try {
        run = run_analyze(query_text, **cube, opt);
      } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code() == ErrorCode::Timeout ? kTimeout : kExec;
      }
      if (run.choice) std::cout << run.choice->header() << '\n';
      else std::cout << "strategy=" << to_string(run.result.strategy) << " (forced)\n";
      if (!run.result.fallback_reason.empty()) std::cout << "# fallback to mid: " << run.result.fallback_reason << '\n';
      if (query_output.empty()) {
        write_result_csv(std::cout, (*cube)->schema(), run.result);
      } else {
        std::ofstream out(query_output, std::ios::binary);
        if (!out) {
          std::cerr << "error: cannot write " << query_output << '\n';
          return kIo;
        }
        write_result_csv(out, (*cube)->schema(), run.result);
      }
      std::cout << "# ";
      write_timing(std::cout, run.timing);
      return kOk;
    }

    if (*bench_cmd) {
      std::vector<StrategyRequest> strategies;
      SelectorConfig cfg;
      WorkloadSpec workload;
      try {
        std::stringstream items(strategies_text);
        std::string s;
        while (std::getline(items, s, ',')) strategies.push_back(parse_request(s));
        cfg = selector_from(bench_coverage, bench_imbalance, {});
        std::ifstream in(workload_path);
        if (!in) throw Error(ErrorCode::Io, "cannot open " + workload_path);
        workload = parse_workload(in);
        if (bench_timeout) workload.timeout_s = *bench_timeout;
      } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code() == ErrorCode::Io ? kIo : kUsage;
      }
      auto cube = load_or_report(bench_flags, exit_code);
      if (!cube) return exit_code;
      for (const auto& q : workload.queries) {
        try {
          parse_analyze(q.text, **cube);
        } catch (const Error& e) {
          std::cerr << q.label << ": " << e.what() << '\n';
          return kParse;
        }
      }
      std::ofstream file;
      std::ostream* out = &std::cout;
      if (!report_path.empty()) {
        file.open(report_path, std::ios::binary);
        if (!file) {
          std::cerr << "error: cannot write " << report_path << '\n';
          return kIo;
        }
        out = &file;
      }
      BenchReport report;
      try {
        report = run_bench(**cube, workload, strategies, cfg, out);
      } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExec;
      }
      std::size_t timeouts = 0;
      for (const auto& r : report.rows) timeouts += r.status == "timeout";
      std::cerr << report.rows.size() << " runs, " << timeouts << " timed out\n";
      return report.all_timed_out() ? kTimeout : kOk;
    }

    if (*gen_cmd) {
      try {
        synth.dimensions = parse_dims_spec(synth_dims);
        const auto files = write_dataset(synth, synth_out);
        std::cout << "wrote " << files.size() << " files to " << synth_out << " (checksum " << std::hex << fnv1a_files(files)
                  << std::dec << ")\n";
      } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code() == ErrorCode::Io ? kIo : kUsage;
      }
      return kOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExec;
  }
  return kOk;
}
