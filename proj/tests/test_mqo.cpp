#include <catch_amalgamated.hpp>

#include "analyze/mqo.hpp"
#include "analyze/parser.hpp"
#include "support.hpp"

using namespace analyze;
using namespace testing_support;

TEST_CASE("update_map inserts, folds and checks arity") {
  ResultMap h{{{0, 0}, {1, 0}}, "m", {}};
  for (auto [agg, expected] : std::vector<std::pair<AggFn, std::int64_t>>{
           {AggFn::Sum, 12}, {AggFn::Count, 12}, {AggFn::Min, 2}, {AggFn::Max, 7}}) {
    h.cells.clear();
    const AggAdapter adapter{agg};
    update_map(h, Coord{1, 2}, Value{std::int64_t{7}}, adapter);
    update_map(h, Coord{1, 2}, Value{std::int64_t{3}}, adapter);
    update_map(h, Coord{1, 2}, Value{std::int64_t{2}}, adapter);
    update_map(h, Coord{0, 2}, Value{std::int64_t{5}}, adapter);
    CHECK(std::get<std::int64_t>(h.cells.at(Coord{1, 2})) == expected);
    CHECK(h.size() == 2);
  }
  try {
    update_map(h, Coord{1}, Value{std::int64_t{1}}, AggAdapter{});
    FAIL("expected ArityMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ArityMismatch);
  }
}

TEST_CASE("walkthrough merged queries") {
  const auto cube = retail_cube(800);
  const auto& s = cube->schema();
  const auto aq = parse_analyze(kWalkthroughQuery, *cube);

  const auto qa = build_all_encompassing(aq);
  CHECK(render_condition(s, qa.query.condition) == "country = 'USA' AND year = '2025'");
  CHECK(render_groupers(s, qa.query.groupers) == "city, month, state, quarter, country, year");
  CHECK(qa.sigma_a == qa.grouper_a);
  CHECK(qa.sigma_b == qa.grouper_b);

  const auto mid = build_org_dd_merged(aq);
  CHECK(render_condition(s, mid.query.condition) == "state = 'CA' AND quarter = '2025-Q4'");
  CHECK(render_groupers(s, mid.query.groupers) == "city, month, state, quarter");
  CHECK(mid.query.alias == "store_sales_MID");
}

TEST_CASE("filters above the grouper keep a separate sigma position") {
  const auto cube = retail_cube(800);
  const auto& s = cube->schema();
  const auto aq = parse_analyze("ANALYZE sum(store_sales) FROM sales FOR country = 'USA' AND year = '2025' GROUP BY city, month", *cube);
  const auto qa = build_all_encompassing(aq);
  CHECK(render_condition(s, qa.query.condition, true) == "Customer.ALL = 'all' AND Date.ALL = 'all'");
  CHECK(render_groupers(s, qa.query.groupers) == "customer, day, city, month, country, year");
  CHECK(qa.sigma_a == 4);
  CHECK(qa.sigma_b == 5);
  const auto fs = build_facilitators(aq);
  CHECK(same_results(run_max_mqo(aq, fs), run_min_mqo(fs)));
}

TEST_CASE("fact scans are 5, 3 and 1") {
  const auto cube = foodmart_cube(2000);
  const auto aq = parse_analyze(kReferenceQuery, *cube);
  const auto fs = build_facilitators(aq);
  for (auto [strategy, scans] : std::vector<std::pair<Strategy, std::size_t>>{{Strategy::Min, 5}, {Strategy::Mid, 3}, {Strategy::Max, 1}}) {
    ExecContext ctx;
    const auto r = run_strategy(strategy, aq, fs, &ctx);
    CHECK(r.strategy == strategy);
    CHECK(r.fact_scans == scans);
    CHECK(ctx.fact_scans == scans);
    CHECK(r.query_exec_ns.size() == scans);
  }
}

TEST_CASE("max falls back to mid when the structure is degraded") {
  const auto cube = retail_cube(500);
  const auto aq = parse_analyze("ANALYZE count(store_sales) FROM sales FOR state = 'CA' GROUP BY city, month", *cube);
  const auto fs = build_facilitators(aq);
  const auto r = run_max_mqo(aq, fs);
  CHECK(r.strategy == Strategy::Mid);
  CHECK(r.fallback_reason.find("no filter atom on Date") != std::string::npos);
  CHECK_FALSE(r[Role::SibB].cells);
  CHECK(r[Role::SibB].reason == "no filter atom");
  CHECK(same_results(r, run_min_mqo(fs)));
  try {
    build_all_encompassing(aq);
    FAIL("expected DegradedStructure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegradedStructure);
  }
}

TEST_CASE("mid without drill levels runs the original under its own alias") {
  const auto cube = retail_cube(300);
  const auto aq = parse_analyze("ANALYZE max(store_sales) AS top FROM sales FOR state = 'CA' GROUP BY customer, day", *cube);
  const auto merged = build_org_dd_merged(aq);
  CHECK(merged.query.alias == "top");
  CHECK(merged.query.groupers.size() == 2);
  const auto fs = build_facilitators(aq);
  const auto r = run_mid_mqo(aq, fs);
  CHECK(r[Role::DdA].reason == "already most detailed");
  CHECK(same_results(r, run_min_mqo(fs)));
}

TEST_CASE("strategies agree on random queries") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 150; ++trial) {
    const auto cube = random_cube(rng, 4, 3000);
    RandomQueryOptions opt;
    opt.require_full_structure = trial % 2 == 0;
    const auto aq = random_analyze_query(*cube, rng, opt);
    const auto fs = build_facilitators(aq);
    const auto min = run_min_mqo(fs);
    for (auto r : kAllRoles)
      if (fs[r].present()) REQUIRE(*min[r].cells == oracle_execute(*fs[r].query));
    const auto mid = run_mid_mqo(aq, fs);
    const auto max = run_max_mqo(aq, fs);
    REQUIRE(same_results(min, mid, 0.0));
    REQUIRE(same_results(min, max, 0.0));
    if (opt.require_full_structure) CHECK(max.strategy == Strategy::Max);
  }
}

TEST_CASE("every merged tuple is distributed") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const auto cube = random_cube(rng, 3, 2000);
    RandomQueryOptions opt;
    opt.require_full_structure = true;
    const auto aq = random_analyze_query(*cube, rng, opt);
    const auto fs = build_facilitators(aq);
    const auto qa = build_all_encompassing(aq);
    const auto cells = execute_query(qa.query);
    const auto max = run_max_mqo(aq, fs);
    CHECK(max.distributed_tuples == cells.size());
    std::size_t expected_updates = 0;
    for (const auto& [t, m] : cells.cells) {
      const bool a = t[*qa.sigma_a] == qa.value_a, b = t[*qa.sigma_b] == qa.value_b;
      expected_updates += (a && b ? 3 : 0) + (a ? 1 : 0) + (b ? 1 : 0);
    }
    CHECK(max.map_updates == expected_updates);
  }
}
