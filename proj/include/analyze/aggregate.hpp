#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "analyze/error.hpp"
#include "analyze/hierarchy.hpp"

namespace analyze {

/// Distributive aggregates only; avg and holistic functions are not supported.
enum class AggFn { Sum, Min, Max, Count };

inline std::string_view to_string(AggFn agg) {
  switch (agg) {
    case AggFn::Sum: return "sum";
    case AggFn::Min: return "min";
    case AggFn::Max: return "max";
    case AggFn::Count: return "count";
  }
  return "?";
}

inline std::optional<AggFn> parse_agg(std::string_view name) {
  if (iequals(name, "sum")) return AggFn::Sum;
  if (iequals(name, "min")) return AggFn::Min;
  if (iequals(name, "max")) return AggFn::Max;
  if (iequals(name, "count")) return AggFn::Count;
  return std::nullopt;
}

/// An aggregate value: integer for integer measures and for count, double otherwise.
using Value = std::variant<std::int64_t, double>;

inline double as_double(const Value& v) {
  return std::visit([](auto x) { return static_cast<double>(x); }, v);
}

inline std::string format_value(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", std::get<double>(v));
  return buf;
}

/// Exact for integers; doubles compare within a relative tolerance.
inline bool values_close(const Value& a, const Value& b, double rel_tol = 1e-9) {
  if (a.index() != b.index()) return false;
  if (std::holds_alternative<std::int64_t>(a)) return a == b;
  const double x = std::get<double>(a), y = std::get<double>(b);
  if (x == y) return true;
  return std::abs(x - y) <= rel_tol * std::max(std::abs(x), std::abs(y));
}

/// Combines a running aggregate with an incoming partial aggregate of the same
/// function. For count the partials are counts, so they add up.
struct AggAdapter {
  AggFn base = AggFn::Sum;

  Value fold(const Value& running, const Value& incoming) const {
    if (running.index() != incoming.index()) throw Error(ErrorCode::InvalidQuery, "mixed aggregate value kinds");
    return std::visit(
        [&](auto r) -> Value {
          using T = decltype(r);
          const T m = std::get<T>(incoming);
          switch (base) {
            case AggFn::Sum:
            case AggFn::Count: return r + m;
            case AggFn::Min: return std::min(r, m);
            case AggFn::Max: return std::max(r, m);
          }
          return r;
        },
        running);
  }
};

}  // namespace analyze
