// Builds a small synthetic cube, expands one ANALYZE query into its five
// facilitator queries and runs it under all three strategies.

#include <iostream>

#include "analyze/pipeline.hpp"
#include "analyze/synth.hpp"

int main() {
  using namespace analyze;
  SynthSpec spec;
  spec.dimensions = {{"Store", {3, 4, 5}}, {"Time", {2, 4, 3}}, {"Promo", {2, 3}}};
  spec.facts = 20000;
  auto cube = generate_cube(spec);

  const std::string text =
      "ANALYZE sum(amount) AS total FROM synth "
      "FOR Store1 = 'Store1_2' AND Time1 = 'Time1_5' AND Promo0 = 'Promo0_1' "
      "GROUP BY Store1, Time1 AS example";
  const auto aq = parse_analyze(text, *cube);
  const auto fs = build_facilitators(aq);
  for (auto role : kAllRoles) {
    std::cout << to_string(role) << ": ";
    if (fs[role].present()) std::cout << render_query(*fs[role].query) << '\n';
    else std::cout << "(empty: " << fs[role].reason << ")\n";
  }
  std::cout << "q^A: " << render_query(build_all_encompassing(aq).query) << "\n\n";

  const auto stats = estimate_stats(aq);
  std::cout << choose_strategy(stats).header() << "\n\n";

  const auto min = run_min_mqo(fs);
  for (auto s : {Strategy::Mid, Strategy::Max}) {
    ExecContext ctx;
    const auto r = run_strategy(s, aq, fs, &ctx);
    std::cout << to_string(s) << ": " << ctx.fact_scans << " fact scans, "
              << (same_results(r, min) ? "same results as min" : "RESULTS DIFFER") << '\n';
  }
  std::cout << '\n';
  write_result_csv(std::cout, cube->schema(), min);
}
