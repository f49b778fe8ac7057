#pragma once

// Shared test fixtures and brute-force oracles. The oracles only use the raw
// parent maps and fact columns, never the engine's indexes or caches.

#include <algorithm>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "analyze/analyze_op.hpp"
#include "analyze/cube.hpp"
#include "analyze/query.hpp"
#include "analyze/synth.hpp"

namespace testing_support {

using namespace analyze;

// ---------------------------------------------------------------------------
// Oracles

/// Walks the parent maps one level at a time.
inline Code oracle_anc(const Dimension& dim, int from, int to, Code m) {
  for (int d = from; d < to; ++d) m = dim.hierarchy().parent_of[static_cast<std::size_t>(d)][m];
  return m;
}

/// Every member at `to` whose walked ancestor at `from` is m, ascending.
inline std::vector<Code> oracle_desc(const Dimension& dim, int from, int to, Code m) {
  std::vector<Code> out;
  for (Code c = 0; c < dim.member_count(to); ++c)
    if (oracle_anc(dim, to, from, c) == m) out.push_back(c);
  return out;
}

inline std::vector<Code> oracle_siblings(const Dimension& dim, int depth, Code m) {
  std::vector<Code> out;
  const Code parent = oracle_anc(dim, depth, depth + 1, m);
  for (Code c = 0; c < dim.member_count(depth); ++c)
    if (oracle_anc(dim, depth, depth + 1, c) == parent) out.push_back(c);
  return out;
}

inline std::vector<Code> oracle_proxy_codes(const Dimension& dim, const SelectionAtom& atom) {
  std::vector<Code> out;
  for (Code c = 0; c < dim.member_count(0); ++c)
    if (std::binary_search(atom.values.begin(), atom.values.end(), oracle_anc(dim, 0, atom.depth, c))) out.push_back(c);
  return out;
}

inline std::vector<Code> oracle_grouper_domain(const Dimension& dim, const SelectionAtom& atom, int depth) {
  std::vector<Code> out;
  for (Code c = 0; c < dim.member_count(depth); ++c)
    if (std::binary_search(atom.values.begin(), atom.values.end(), oracle_anc(dim, depth, atom.depth, c))) out.push_back(c);
  return out;
}

inline bool oracle_row_matches(const DetailedCube& cube, const SelectionCondition& cond, std::size_t row) {
  const auto& schema = cube.schema();
  for (const auto& a : cond.atoms) {
    const auto& dim = schema.dimension(a.dim);
    const Code v = oracle_anc(dim, 0, a.depth, cube.coordinates(a.dim)[row]);
    if (!std::binary_search(a.values.begin(), a.values.end(), v)) return false;
  }
  return true;
}

inline std::size_t oracle_count(const DetailedCube& cube, const SelectionCondition& cond) {
  std::size_t n = 0;
  for (std::size_t r = 0; r < cube.row_count(); ++r) n += oracle_row_matches(cube, cond, r);
  return n;
}

/// Row-at-a-time evaluation of a cube query: filter, roll up, aggregate.
inline CellSet oracle_execute(const CubeQuery& q) {
  const auto& cube = *q.cube;
  const auto& schema = cube.schema();
  std::map<std::vector<Code>, std::vector<Value>> groups;
  const auto m = *schema.find_measure(q.measure);
  for (std::size_t r = 0; r < cube.row_count(); ++r) {
    if (!oracle_row_matches(cube, q.condition, r)) continue;
    std::vector<Code> key;
    for (const auto& g : q.groupers) key.push_back(oracle_anc(schema.dimension(g.dim), 0, g.depth, cube.coordinates(g.dim)[r]));
    Value v = std::visit([r](const auto& col) -> Value { return col[r]; }, cube.measure(m));
    groups[key].push_back(v);
  }
  CellSet out{q.groupers, q.alias, {}};
  for (const auto& [key, values] : groups) {
    Coord c;
    for (Code k : key) c.push_back(k);
    Value agg;
    if (q.agg == AggFn::Count) {
      agg = static_cast<std::int64_t>(values.size());
    } else {
      agg = values.front();
      for (std::size_t i = 1; i < values.size(); ++i) {
        agg = std::visit(
            [&](auto a) -> Value {
              const auto b = std::get<decltype(a)>(values[i]);
              switch (q.agg) {
                case AggFn::Sum: return a + b;
                case AggFn::Min: return a < b ? a : b;
                case AggFn::Max: return a > b ? a : b;
                default: return a;
              }
            },
            agg);
      }
    }
    out.cells.emplace(c, agg);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fixtures

inline DimensionPtr make_dimension(const std::string& name, const std::vector<std::string>& levels,
                                   const std::vector<std::vector<std::string>>& paths) {
  DimensionBuilder b(name, levels);
  for (const auto& p : paths) b.add_path(p);
  return std::make_shared<const Dimension>(b.build());
}

/// Foodmart-shaped cube: Product, Date, Promo, Customer, Store; measures
/// store_sales, store_cost, unit_sales.
inline std::unique_ptr<DetailedCube> foodmart_cube(std::size_t facts = 3000, std::uint64_t seed = 1997) {
  std::vector<std::vector<std::string>> product, date, promo, customer, store;
  const char* categories[] = {"Food", "Drink", "Non-Consumable"};
  for (int i = 0; i < 12; ++i) product.push_back({"P" + std::to_string(i), categories[i % 3]});
  for (int year : {1997, 1998})
    for (int month = 1; month <= 12; ++month)
      for (int day : {1, 15}) {
        char d[16], m[16], q[16], y[8];
        std::snprintf(d, sizeof d, "%d-%02d-%02d", year, month, day);
        std::snprintf(m, sizeof m, "%d-%02d", year, month);
        std::snprintf(q, sizeof q, "%d-Q%d", year, (month - 1) / 3 + 1);
        std::snprintf(y, sizeof y, "%d", year);
        date.push_back({d, m, q, y});
      }
  const char* media[] = {"Daily Paper", "Radio", "TV"};
  for (int i = 0; i < 6; ++i) promo.push_back({"promo" + std::to_string(i), media[i % 3]});
  struct Geo {
    const char* region;
    const char* state;
    const char* country;
  };
  const Geo geos[] = {{"CA-North", "CA", "USA"},     {"CA-South", "CA", "USA"},   {"OR-West", "OR", "USA"},
                      {"WA-Puget", "WA", "USA"},     {"WA-East", "WA", "USA"},    {"Jalisco-Centro", "Jalisco", "Mexico"},
                      {"BC-Coast", "BC", "Canada"}};
  for (int i = 0; i < 28; ++i) {
    const auto& g = geos[i % 7];
    customer.push_back({"cust" + std::to_string(i), g.region, g.state, g.country});
  }
  for (int i = 0; i < 5; ++i) store.push_back({"store" + std::to_string(i), i < 3 ? "CA" : "WA"});

  std::vector<DimensionPtr> dims{make_dimension("Product", {"ProductId", "Category"}, product),
                                 make_dimension("Date", {"Day", "Month", "Quarter", "Year"}, date),
                                 make_dimension("Promo", {"PromoId", "Media"}, promo),
                                 make_dimension("Customer", {"CustomerId", "Region", "State", "Country"}, customer),
                                 make_dimension("Store", {"StoreId", "StoreState"}, store)};
  CubeSchema schema{"Sales", dims, {{"store_sales", MeasureKind::Integer}, {"store_cost", MeasureKind::Integer},
                                    {"unit_sales", MeasureKind::Integer}}};
  std::mt19937_64 rng(seed);
  std::vector<std::vector<Code>> coords(dims.size(), std::vector<Code>(facts));
  std::vector<std::vector<std::int64_t>> meas(3, std::vector<std::int64_t>(facts));
  for (std::size_t r = 0; r < facts; ++r) {
    for (std::size_t d = 0; d < dims.size(); ++d) coords[d][r] = static_cast<Code>(rng() % dims[d]->member_count(0));
    meas[0][r] = static_cast<std::int64_t>(rng() % 500) + 1;
    meas[1][r] = static_cast<std::int64_t>(rng() % 300) + 1;
    meas[2][r] = static_cast<std::int64_t>(rng() % 9) + 1;
  }
  std::vector<MeasureColumn> columns;
  for (auto& m : meas) columns.emplace_back(std::move(m));
  return std::make_unique<DetailedCube>(std::move(schema), std::move(coords), std::move(columns));
}

inline constexpr const char* kReferenceQuery =
    "ANALYZE sum(Store Sales) as SumSales FROM Sales "
    "FOR Date.Quarter = 1997-Q3 \xE2\x88\xA7 Customer.state = 'CA' \xE2\x88\xA7 Promo.Media = 'Daily Paper' "
    "GROUP BY month, customerRegion AS PaperPromoCA1997Q3";

/// Retail cube: Customer customer < city < state < country, Date day < month < quarter < year.
inline std::unique_ptr<DetailedCube> retail_cube(std::size_t facts = 2000, std::uint64_t seed = 2025) {
  std::vector<std::vector<std::string>> customer, date;
  struct City {
    const char* city;
    const char* state;
    const char* country;
  };
  const City cities[] = {{"Los Angeles", "CA", "USA"}, {"San Diego", "CA", "USA"}, {"Fresno", "CA", "USA"},
                         {"New York", "NY", "USA"},    {"Buffalo", "NY", "USA"},   {"Austin", "TX", "USA"},
                         {"Toronto", "ON", "Canada"},  {"Ottawa", "ON", "Canada"}, {"Montreal", "QC", "Canada"}};
  for (int i = 0; i < 36; ++i) {
    const auto& c = cities[i % 9];
    customer.push_back({"c" + std::to_string(i), c.city, c.state, c.country});
  }
  for (int year : {2024, 2025})
    for (int month = 1; month <= 12; ++month)
      for (int day : {3, 17}) {
        char d[16], m[16], q[16], y[8];
        std::snprintf(d, sizeof d, "%d-%02d-%02d", year, month, day);
        std::snprintf(m, sizeof m, "%d-%02d", year, month);
        std::snprintf(q, sizeof q, "%d-Q%d", year, (month - 1) / 3 + 1);
        std::snprintf(y, sizeof y, "%d", year);
        date.push_back({d, m, q, y});
      }
  std::vector<DimensionPtr> dims{make_dimension("Customer", {"customer", "city", "state", "country"}, customer),
                                 make_dimension("Date", {"day", "month", "quarter", "year"}, date)};
  CubeSchema schema{"sales", dims, {{"store_sales", MeasureKind::Integer}}};
  std::mt19937_64 rng(seed);
  std::vector<std::vector<Code>> coords(2, std::vector<Code>(facts));
  std::vector<std::int64_t> sales(facts);
  for (std::size_t r = 0; r < facts; ++r) {
    for (std::size_t d = 0; d < 2; ++d) coords[d][r] = static_cast<Code>(rng() % dims[d]->member_count(0));
    sales[r] = static_cast<std::int64_t>(rng() % 1000) + 1;
  }
  std::vector<MeasureColumn> columns;
  columns.emplace_back(std::move(sales));
  return std::make_unique<DetailedCube>(std::move(schema), std::move(coords), std::move(columns));
}

inline constexpr const char* kWalkthroughQuery =
    "ANALYZE sum(store_sales) FROM sales FOR state = 'CA' AND quarter = '2025-Q4' GROUP BY state,quarter";

// ---------------------------------------------------------------------------
// Randomized cubes and queries

/// 2..max_dims dimensions with 3..4 levels (ALL excluded), ragged fanouts, skewed facts.
inline std::unique_ptr<DetailedCube> random_cube(std::mt19937_64& rng, std::size_t max_dims = 4, std::size_t max_facts = 10000) {
  SynthSpec spec;
  const std::size_t n_dims = 2 + rng() % (max_dims - 1);
  for (std::size_t d = 0; d < n_dims; ++d) {
    SynthDimension dim{std::string(1, static_cast<char>('A' + d)), {}};
    const std::size_t levels = 3 + rng() % 2;
    for (std::size_t l = 0; l < levels; ++l) dim.fanouts.push_back(1 + rng() % 4);
    spec.dimensions.push_back(std::move(dim));
  }
  spec.facts = 1 + rng() % max_facts;
  spec.seed = rng();
  spec.skew = static_cast<double>(rng() % 150) / 100.0;
  spec.ragged = rng() % 2;
  spec.measure_max = 1 + static_cast<std::int64_t>(rng() % 1000);
  return generate_cube(spec);
}

/// A member at `depth` that some fact row actually reaches (when there are rows).
inline Code populated_member(const DetailedCube& cube, std::size_t dim, int depth, std::mt19937_64& rng) {
  const auto& d = cube.schema().dimension(dim);
  if (cube.row_count() == 0 || rng() % 10 == 0) return static_cast<Code>(rng() % d.member_count(depth));
  const Code leaf = cube.coordinates(dim)[rng() % cube.row_count()];
  return d.anc(0, depth, leaf);
}

struct RandomQueryOptions {
  double atom_probability = 0.85;   // chance of a filter atom on each grouper dimension
  double box_probability = 0.35;    // chance of an atom on each other dimension
  bool allow_all_levels = true;     // groupers/filters at ALL
  bool require_full_structure = false;  // both atoms below ALL and both groupers above depth 0
};

inline AnalyzeQuery random_analyze_query(const DetailedCube& cube, std::mt19937_64& rng, const RandomQueryOptions& opt = {}) {
  const auto& schema = cube.schema();
  const std::size_t n = schema.dimensions.size();
  AnalyzeQuery aq;
  aq.cube = &cube;
  aq.agg = static_cast<AggFn>(rng() % 4);
  aq.measure = schema.measures.front().name;
  aq.alias = "m";
  aq.name = "rq";
  const std::size_t a = rng() % n;
  std::size_t b = rng() % (n - 1);
  if (b >= a) ++b;
  aq.groupers = {GrouperLevel{a, 0}, GrouperLevel{b, 0}};
  auto unit = [&] { return static_cast<double>(rng() % 10000) / 10000.0; };
  for (std::size_t i = 0; i < 2; ++i) {
    auto& g = aq.groupers[i];
    const auto& dim = schema.dimension(g.dim);
    const int top = opt.allow_all_levels && !opt.require_full_structure ? dim.all_depth() : dim.all_depth() - 1;
    const int lowest = opt.require_full_structure ? 1 : 0;
    g.depth = lowest + static_cast<int>(rng() % static_cast<std::uint64_t>(top - lowest + 1));
    if (opt.require_full_structure || unit() < opt.atom_probability) {
      const int ftop = opt.require_full_structure ? dim.all_depth() - 1 : (opt.allow_all_levels ? dim.all_depth() : dim.all_depth() - 1);
      if (ftop < g.depth) continue;
      const int fd = g.depth + static_cast<int>(rng() % static_cast<std::uint64_t>(ftop - g.depth + 1));
      aq.condition.atoms.emplace_back(g.dim, fd, std::vector<Code>{populated_member(cube, g.dim, fd, rng)});
    }
  }
  for (std::size_t d = 0; d < n; ++d) {
    if (d == a || d == b || unit() >= opt.box_probability) continue;
    const int depth = static_cast<int>(rng() % static_cast<std::uint64_t>(schema.dimension(d).level_count()));
    aq.condition.atoms.emplace_back(d, depth, std::vector<Code>{populated_member(cube, d, depth, rng)});
  }
  std::shuffle(aq.condition.atoms.begin(), aq.condition.atoms.end(), rng);
  return aq;
}

}  // namespace testing_support
