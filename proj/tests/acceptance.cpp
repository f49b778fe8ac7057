// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "analyze/parser.hpp"
#include "analyze/pipeline.hpp"
#include "analyze/selector.hpp"
#include "support.hpp"

using namespace analyze;
using namespace testing_support;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("%s  %d  %s: %s\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. Randomized equivalence of the three strategies

Outcome randomized_equivalence() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20250601);
  const int n = 1000;
  int mismatches = 0, oracle_mismatches = 0, ran_max = 0;
  std::array<int, 4> per_agg{};
  for (int i = 0; i < n; ++i) {
    const auto cube = random_cube(rng, 4, 10000);
    RandomQueryOptions opt;
    opt.require_full_structure = i % 2 == 0;
    auto aq = random_analyze_query(*cube, rng, opt);
    aq.agg = static_cast<AggFn>(i % 4);
    ++per_agg[i % 4];
    const auto fs = build_facilitators(aq);
    const auto min = run_min_mqo(fs);
    const auto mid = run_mid_mqo(aq, fs);
    const auto max = run_max_mqo(aq, fs);
    ran_max += max.strategy == Strategy::Max;
    if (!same_results(min, mid, 0.0) || !same_results(min, max, 0.0)) ++mismatches;
    for (auto r : kAllRoles)
      if (fs[r].present() && !(*min[r].cells == oracle_execute(*fs[r].query))) {
        ++oracle_mismatches;
        break;
      }
  }
  const double secs = seconds_since(t0);
  const bool pass = mismatches == 0 && oracle_mismatches == 0 && secs < 300.0 && ran_max > 0 &&
                    *std::min_element(per_agg.begin(), per_agg.end()) > 0;
  return {pass, fmt("%d queries (sum/min/max/count %d/%d/%d/%d, %d via the all-encompassing query), %d strategy mismatches, "
                    "%d oracle mismatches, %.1f s (limit 300 s)",
                    n, per_agg[0], per_agg[1], per_agg[2], per_agg[3], ran_max, mismatches, oracle_mismatches, secs)};
}

// ---------------------------------------------------------------------------
// 2. Golden structures

Outcome golden_structures() {
  std::vector<std::string> bad;
  auto expect = [&](const std::string& what, const std::string& got, const std::string& want) {
    if (got != want) bad.push_back(what + " got \"" + got + "\" want \"" + want + "\"");
  };
  {
    const auto cube = foodmart_cube(1000);
    const auto& s = cube->schema();
    const auto aq = parse_analyze(kReferenceQuery, *cube);
    const auto fs = build_facilitators(aq);
    const auto& sa = *fs[Role::SibA].query;
    const auto& sb = *fs[Role::SibB].query;
    expect("sibA atom", render_atom(s, *sa.condition.find(s.dimension_index("Date"))), "Year = '1997'");
    expect("sibA groupers", render_groupers(s, sa.groupers), "Quarter, Region");
    expect("sibB atom", render_atom(s, *sb.condition.find(s.dimension_index("Customer"))), "Country = 'USA'");
    expect("sibB groupers", render_groupers(s, sb.groupers), "Month, State");
    expect("ddA groupers", render_groupers(s, fs[Role::DdA].query->groupers), "Day, Region");
    expect("ddB groupers", render_groupers(s, fs[Role::DdB].query->groupers), "Month, CustomerId");
  }
  {
    const auto cube = retail_cube(1000);
    const auto& s = cube->schema();
    const auto aq = parse_analyze(kWalkthroughQuery, *cube);
    const auto qa = build_all_encompassing(aq);
    expect("q^A condition", render_condition(s, qa.query.condition), "country = 'USA' AND year = '2025'");
    expect("q^A groupers", render_groupers(s, qa.query.groupers), "city, month, state, quarter, country, year");
    const auto mid = build_org_dd_merged(aq);
    expect("q^MID groupers", render_groupers(s, mid.query.groupers), "city, month, state, quarter");
    expect("q^MID condition", render_condition(s, mid.query.condition), "state = 'CA' AND quarter = '2025-Q4'");
  }
  std::string detail = "reference facilitators and walkthrough q^A / q^MID match";
  if (!bad.empty()) {
    detail.clear();
    for (const auto& b : bad) detail += b + "; ";
  }
  return {bad.empty(), detail};
}

// ---------------------------------------------------------------------------
// 3. Usability of q^A for every facilitator, and violated pairs

Outcome usability() {
  std::mt19937_64 rng(77001);
  int positives = 0, positive_failures = 0, reagg_failures = 0;
  int negatives = 0, negative_failures = 0;
  std::array<int, 3> kinds{};
  std::string first_problem;
  auto note = [&](const std::string& s) {
    if (first_problem.empty()) first_problem = s;
  };
  while (positives + negatives < 600 || std::min({kinds[0], kinds[1], kinds[2]}) < 50) {
    const auto cube = random_cube(rng, 4, 3000);
    RandomQueryOptions opt;
    opt.require_full_structure = true;
    const auto aq = random_analyze_query(*cube, rng, opt);
    const auto qa = build_all_encompassing(aq).query;
    const auto fs = build_facilitators(aq);
    const auto base_cells = execute_query(qa);
    for (auto r : kAllRoles) {
      const auto& f = *fs[r].query;
      ++positives;
      const auto rep = cube_usable(qa, f);
      if (!rep.usable) {
        ++positive_failures;
        note(std::string(to_string(r)) + " unusable: " + rep.detail);
        continue;
      }
      if (!(reaggregate(base_cells, f, qa) == oracle_execute(f))) {
        ++reagg_failures;
        note(std::string(to_string(r)) + " reaggregation differs from the oracle");
      }

      auto expect_fail = [&](const CubeQuery& bad, UsabilityCondition want, int kind) {
        ++negatives;
        ++kinds[static_cast<std::size_t>(kind)];
        const auto got = cube_usable(qa, bad);
        if (got.usable || got.failed != want) {
          ++negative_failures;
          note(fmt("violation kind %d: expected condition %d, got %s", kind, static_cast<int>(want),
                   got.usable ? "usable" : std::to_string(static_cast<int>(*got.failed)).c_str()));
        }
      };
      // lower grouper than q^A provides
      for (std::size_t i = 0; i < f.groupers.size(); ++i) {
        const int finest = *detail::finest_depth(qa, f.groupers[i].dim);
        if (finest == 0) continue;
        auto bad = f;
        bad.groupers[i].depth = finest - 1;
        if (const auto* a = bad.condition.find(bad.groupers[i].dim); a && a->depth < bad.groupers[i].depth) continue;
        expect_fail(bad, UsabilityCondition::AncestorLevels, 0);
        break;
      }
      // mismatched aggregate
      {
        auto bad = f;
        bad.agg = static_cast<AggFn>((static_cast<int>(f.agg) + 1 + rng() % 3) % 4);
        expect_fail(bad, UsabilityCondition::SameSchemaAndAggregate, 1);
      }
      // extra atom: on a dimension q^A neither filters nor groups, or a second atom on a filtered one
      {
        const auto& s = cube->schema();
        auto bad = f;
        bool placed = false;
        for (std::size_t d = 0; d < s.dimensions.size() && !placed; ++d) {
          if (qa.condition.find(d) || detail::finest_depth(qa, d)) continue;
          const auto& dim = s.dimension(d);
          for (int depth = 0; depth < dim.all_depth() && !placed; ++depth) {
            const Code m = static_cast<Code>(rng() % dim.member_count(depth));
            const SelectionAtom extra(d, depth, {m});
            if (oracle_proxy_codes(dim, extra).size() == dim.member_count(0)) continue;
            bad.condition.atoms.push_back(extra);
            placed = true;
          }
        }
        if (placed) {
          expect_fail(bad, UsabilityCondition::AtomWithinGrouperDomain, 2);
        } else {
          const auto dup = bad.condition.atoms.front();
          bad.condition.atoms.push_back(dup);
          expect_fail(bad, UsabilityCondition::OneAtomPerDimension, 2);
        }
      }
    }
  }
  const bool pass = positive_failures == 0 && reagg_failures == 0 && negative_failures == 0 && positives + negatives >= 500;
  std::string detail = fmt("%d facilitator pairs usable (%d failed, %d reaggregation mismatches); %d violated pairs "
                           "(lower grouper %d, aggregate %d, extra atom %d), %d wrong verdicts",
                           positives, positive_failures, reagg_failures, negatives, kinds[0], kinds[1], kinds[2], negative_failures);
  if (!first_problem.empty()) detail += "; first: " + first_problem;
  return {pass, detail};
}

// ---------------------------------------------------------------------------
// 4. Fact-scan counts

Outcome scan_counts() {
  std::vector<std::string> seen;
  bool pass = true;
  const auto cube = foodmart_cube(3000);
  const auto aq = parse_analyze(kReferenceQuery, *cube);
  const auto fs = build_facilitators(aq);
  for (auto [s, want] : {std::pair{Strategy::Min, 5}, std::pair{Strategy::Mid, 3}, std::pair{Strategy::Max, 1}}) {
    ExecContext ctx;
    const auto r = run_strategy(s, aq, fs, &ctx);
    seen.push_back(std::string(to_string(s)) + "=" + std::to_string(ctx.fact_scans));
    pass = pass && ctx.fact_scans == static_cast<std::size_t>(want) && r.fact_scans == ctx.fact_scans;
  }
  std::mt19937_64 rng(4);
  int random_bad = 0;
  for (int i = 0; i < 100; ++i) {
    const auto c = random_cube(rng, 4, 2000);
    RandomQueryOptions opt;
    opt.require_full_structure = true;
    const auto q = random_analyze_query(*c, rng, opt);
    const auto f = build_facilitators(q);
    random_bad += run_min_mqo(f).fact_scans != 5 || run_mid_mqo(q, f).fact_scans != 3 || run_max_mqo(q, f).fact_scans != 1;
  }
  pass = pass && random_bad == 0;
  return {pass, fmt("reference query %s/%s/%s (want min=5/mid=3/max=1); %d of 100 random full-structure queries off",
                    seen[0].c_str(), seen[1].c_str(), seen[2].c_str(), random_bad)};
}

// ---------------------------------------------------------------------------
// 5. Selector quadrants and cost-statistic containment

Outcome selector_checks() {
  int grid = 0, grid_bad = 0;
  for (int ci = 0; ci <= 100; ++ci)
    for (int ii = 0; ii <= 100; ++ii) {
      const double c = ci / 100.0, m = ii / 100.0;
      const bool want_max = c > 0.40 && m < 0.45;
      ++grid;
      grid_bad += (choose_strategy(c, m).chosen == Strategy::Max) != want_max;
    }
  for (double c : {0.40, std::nextafter(0.40, 1.0)})
    for (double m : {0.45, std::nextafter(0.45, 0.0)}) {
      ++grid;
      grid_bad += (choose_strategy(c, m).chosen == Strategy::Max) != (c > 0.40 && m < 0.45);
    }

  std::mt19937_64 rng(5005);
  int queries = 0, contain_bad = 0, count_bad = 0, downgrade_bad = 0;
  while (queries < 1000) {
    const auto cube = random_cube(rng, 4, 4000);
    const auto aq = random_analyze_query(*cube, rng);
    const auto st = estimate_stats(aq);
    const auto fs = build_facilitators(aq);
    ++queries;
    count_bad += st.facts_org != oracle_count(*cube, aq.condition);
    if (st.has_sA) count_bad += st.facts_sA != oracle_count(*cube, fs[Role::SibA].query->condition);
    if (st.has_sB) count_bad += st.facts_sB != oracle_count(*cube, fs[Role::SibB].query->condition);
    const bool nested = st.facts_org <= st.facts_A && (!(st.has_sA || st.has_sB) || st.facts_org <= st.facts_sib_union) && st.facts_sA <= st.facts_sib_union &&
                        st.facts_sB <= st.facts_sib_union && st.facts_sib_union <= st.facts_A && st.facts_A <= st.row_count &&
                        (!st.has_sA || st.facts_org <= st.facts_sA) && (!st.has_sB || st.facts_org <= st.facts_sB);
    contain_bad += !nested;
    if (st.all_encompassing) {
      const auto qa = build_all_encompassing(aq).query;
      contain_bad += st.facts_A != oracle_count(*cube, qa.condition);
    }
    downgrade_bad += !st.all_encompassing && choose_strategy(st).chosen == Strategy::Max;
  }
  const bool pass = grid_bad == 0 && contain_bad == 0 && count_bad == 0 && downgrade_bad == 0;
  return {pass, fmt("%d threshold points (%d wrong); %d random queries: %d containment violations, %d count mismatches vs "
                    "row scan, %d max choices without q^A",
                    grid, grid_bad, queries, contain_bad, count_bad, downgrade_bad)};
}

// ---------------------------------------------------------------------------
// 6 and 7. Large synthetic workload

struct WorkloadEntry {
  std::string text;
  double org_selectivity = 0;
  std::size_t facts_A = 0;
  std::array<std::vector<TimingBreakdown>, 3> timings;  // min, mid, max
};

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = (static_cast<double>(i + j) / 2.0) + 1.0;
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / rx.size();
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / ry.size();
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxx > 0 && syy > 0 ? sxy / std::sqrt(sxx * syy) : 0.0;
}

std::int64_t median_total(const std::vector<TimingBreakdown>& runs) {
  std::vector<std::int64_t> v;
  for (const auto& t : runs) v.push_back(t.total_ns);
  std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
  return v[v.size() / 2];
}

struct LargeWorkload {
  std::unique_ptr<DetailedCube> cube;
  std::vector<WorkloadEntry> entries;
  double build_s = 0;
  double run_s = 0;
};

LargeWorkload& large_workload() {
  static LargeWorkload w = [] {
    LargeWorkload lw;
    const auto t0 = Clock::now();
    SynthSpec spec;
    spec.dimensions = {{"A", {2, 5, 10}}, {"B", {2, 5, 10}}, {"C", {4, 5}}};
    spec.facts = 2'000'000;
    spec.seed = 42;
    spec.skew = 1.5;
    lw.cube = generate_cube(spec);
    const auto& s = lw.cube->schema();

    // Candidate filters: every member of levels 1 and 2 on A and B, optionally boxed by a C0 or C1 member.
    struct Candidate {
      std::string text;
      double sel;
      std::size_t facts_A;
    };
    std::vector<Candidate> candidates;
    auto atoms_of = [&](const std::string& dim) {
      std::vector<std::string> out;
      const auto& d = s.dimension(s.dimension_index(dim));
      for (int depth = 1; depth <= 2; ++depth)
        for (Code m = 0; m < d.member_count(depth); ++m)
          out.push_back(synth_level_name(dim, depth) + " = '" + d.dictionary(depth).label(m) + "'");
      return out;
    };
    std::vector<std::string> boxes{""};
    for (Code m = 0; m < 4; ++m) boxes.push_back(" AND C1 = 'C1_" + std::to_string(m) + "'");
    for (Code m = 0; m < 5; ++m) boxes.push_back(" AND C0 = 'C0_" + std::to_string(m) + "'");
    for (const auto& a : atoms_of("A"))
      for (const auto& b : atoms_of("B"))
        for (const auto& box : boxes) {
          const std::string text = "ANALYZE sum(amount) FROM synth FOR " + a + " AND " + b + box + " GROUP BY A1, B1";
          const auto st = estimate_stats(parse_analyze(text, *lw.cube));
          candidates.push_back({text, st.ratio(st.facts_org), st.facts_A});
        }
    const std::vector<double> targets{0.01, 0.02, 0.05, 0.10, 0.20, 0.30, 0.45, 0.60, 0.75, 0.90};
    std::vector<bool> used(candidates.size(), false);
    for (double target : targets) {
      std::size_t best = 0;
      double best_err = 1e9;
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (used[i] || candidates[i].sel <= 0) continue;
        const double err = std::abs(std::log(candidates[i].sel / target));
        if (err < best_err) best_err = err, best = i;
      }
      used[best] = true;
      WorkloadEntry e;
      e.text = candidates[best].text;
      e.org_selectivity = candidates[best].sel;
      e.facts_A = candidates[best].facts_A;
      lw.entries.push_back(std::move(e));
    }
    lw.build_s = seconds_since(t0);

    const auto t1 = Clock::now();
    const int reps = 5;
    for (auto& e : lw.entries) {
      for (std::size_t si = 0; si < 3; ++si) {
        RunOptions opt;
        opt.strategy = static_cast<Strategy>(si);
        run_analyze(e.text, *lw.cube, opt);  // warm the member bitmaps
      }
      for (int rep = 0; rep < reps; ++rep)
        for (std::size_t si = 0; si < 3; ++si) {
          RunOptions opt;
          opt.strategy = static_cast<Strategy>(si);
          e.timings[si].push_back(run_analyze(e.text, *lw.cube, opt).timing);
        }
    }
    lw.run_s = seconds_since(t1);
    return lw;
  }();
  return w;
}

Outcome large_cube_scaling() {
  auto& w = large_workload();
  std::vector<double> touch, max_time;
  int mid_le_min = 0;
  std::string table;
  for (const auto& e : w.entries) {
    const auto tmin = median_total(e.timings[0]);
    const auto tmid = median_total(e.timings[1]);
    const auto tmax = median_total(e.timings[2]);
    touch.push_back(static_cast<double>(e.facts_A));
    max_time.push_back(static_cast<double>(tmax));
    mid_le_min += tmid <= tmin;
    table += fmt(" [org %.3f A %zu: min %.1f mid %.1f max %.1f ms]", e.org_selectivity, e.facts_A, tmin / 1e6, tmid / 1e6, tmax / 1e6);
  }
  const double rho = spearman(touch, max_time);
  const double secs = w.build_s + w.run_s;
  const bool pass = w.entries.size() == 10 && rho > 0.8 && mid_le_min >= 8 && secs < 900.0 &&
                    w.entries.front().org_selectivity < 0.02 && w.entries.back().org_selectivity > 0.8;
  return {pass, fmt("2M facts, 10 queries: spearman(max time, q^A facts) = %.3f (need > 0.8), mid <= min on %d/10 (need 8), "
                    "%.1f s (limit 900 s);",
                    rho, mid_le_min, secs) +
                    table};
}

Outcome timing_breakdown() {
  auto& w = large_workload();
  double worst_median = 1.0, worst_single = 1.0, worst_gap = 0.0;
  std::string worst;
  int pairs = 0, runs = 0;
  for (const auto& e : w.entries)
    for (std::size_t si = 0; si < 3; ++si) {
      std::vector<double> shares;
      for (const auto& t : e.timings[si]) {
        ++runs;
        shares.push_back(static_cast<double>(t.facilitator_exec_ns) / static_cast<double>(t.total_ns));
        worst_gap = std::max(worst_gap, std::abs(static_cast<double>(t.stage_sum() - t.total_ns)) / static_cast<double>(t.total_ns));
      }
      ++pairs;
      worst_single = std::min(worst_single, *std::min_element(shares.begin(), shares.end()));
      std::nth_element(shares.begin(), shares.begin() + shares.size() / 2, shares.end());
      const double median = shares[shares.size() / 2];
      if (median < worst_median) {
        worst_median = median;
        worst = fmt("%s at org %.3f", std::string(to_string(static_cast<Strategy>(si))).c_str(), e.org_selectivity);
      }
    }
  const bool pass = pairs == 30 && worst_median >= 0.90 && worst_gap <= 0.01;
  return {pass, fmt("%d query/strategy pairs (%d runs): smallest median facilitator_exec share %.4f at %s (need >= 0.90; "
                    "smallest single run %.4f), largest stage-sum gap %.4f%% (limit 1%%)",
                    pairs, runs, worst_median, worst.c_str(), worst_single, worst_gap * 100.0)};
}

// ---------------------------------------------------------------------------
// 8. Hierarchy primitives

Outcome hierarchy_primitives() {
  std::mt19937_64 rng(808);
  std::size_t checks = 0, bad = 0, largest = 0;
  for (int trial = 0; trial < 24; ++trial) {
    SynthSpec spec;
    if (trial == 0) spec.dimensions = {{"X", {10, 10, 10}}};
    else spec.dimensions = {{"X", {1 + rng() % 10, 1 + rng() % 10, 1 + rng() % 10}}};
    spec.ragged = trial % 2 == 1;
    spec.seed = rng();
    spec.facts = 1;
    const auto cube = generate_cube(spec);
    const auto& schema = cube->schema();
    const auto& dim = schema.dimension(0);
    largest = std::max<std::size_t>(largest, dim.member_count(0));
    const int levels = dim.level_count();
    for (int from = 0; from < levels; ++from)
      for (Code m = 0; m < dim.member_count(from); ++m) {
        for (int to = from; to < levels; ++to) {
          ++checks;
          bad += dim.anc(from, to, m) != oracle_anc(dim, from, to, m);
        }
        for (int to = 0; to <= from; ++to) {
          ++checks;
          bad += dim.desc(from, to, m) != oracle_desc(dim, from, to, m);
        }
        if (from < dim.all_depth()) {
          ++checks;
          bad += dim.siblings_under_parent(from, m) != oracle_siblings(dim, from, m);
        }
        const SelectionAtom atom(0, from, {m});
        ++checks;
        bad += detailed_proxy(schema, atom).values != oracle_proxy_codes(dim, atom);
        for (int g = 0; g <= from; ++g) {
          ++checks;
          bad += grouper_domain(dim, atom, g) != oracle_grouper_domain(dim, atom, g);
        }
      }
  }
  return {bad == 0, fmt("%zu comparisons on 24 random 3-level hierarchies (up to %zu members per level), %zu mismatches", checks,
                        largest, bad)};
}

}  // namespace

int main() {
  report(1, "randomized min/mid/max equivalence", randomized_equivalence);
  report(2, "golden structures", golden_structures);
  report(3, "cube usability", usability);
  report(4, "fact-scan counts", scan_counts);
  report(5, "selector quadrants and statistic containment", selector_checks);
  report(6, "2M-fact workload scaling", large_cube_scaling);
  report(7, "timing breakdown", timing_breakdown);
  report(8, "hierarchy primitives vs brute force", hierarchy_primitives);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
