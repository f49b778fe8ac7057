#pragma once

// Expansion of one ANALYZE request into its five facilitator queries: the
// original query, one sibling query per grouper dimension (filter widened to
// the parent value, grouped at the former filter level) and one drill-down per
// grouper dimension (grouper moved one level down).

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "analyze/query.hpp"

namespace analyze {

enum class Side { Alpha = 0, Beta = 1 };

enum class Role { Org = 0, SibA = 1, SibB = 2, DdA = 3, DdB = 4 };

inline constexpr std::array<Role, 5> kAllRoles{Role::Org, Role::SibA, Role::SibB, Role::DdA, Role::DdB};

inline std::string_view to_string(Role role) {
  switch (role) {
    case Role::Org: return "org";
    case Role::SibA: return "sibA";
    case Role::SibB: return "sibB";
    case Role::DdA: return "ddA";
    case Role::DdB: return "ddB";
  }
  return "?";
}

struct AnalyzeQuery {
  const DetailedCube* cube = nullptr;
  AggFn agg = AggFn::Sum;
  std::string measure;
  std::string alias;
  SelectionCondition condition;
  std::array<GrouperLevel, 2> groupers{};  // alpha, beta
  std::string name;

  const GrouperLevel& grouper(Side s) const { return groupers[static_cast<std::size_t>(s)]; }
  /// phi_alpha / phi_beta: the atom on the grouper dimension, when present.
  const SelectionAtom* atom(Side s) const { return condition.find(grouper(s).dim); }

  /// phi_box: atoms on dimensions other than the two grouper dimensions.
  std::vector<SelectionAtom> other_atoms() const {
    std::vector<SelectionAtom> out;
    for (const auto& a : condition.atoms)
      if (a.dim != groupers[0].dim && a.dim != groupers[1].dim) out.push_back(a);
    return out;
  }

  /// The request read as a plain cube query.
  CubeQuery as_cube_query() const {
    return CubeQuery{cube, condition, {groupers[0], groupers[1]}, measure, alias, agg};
  }
};

/// Throws when aq breaks an AnalyzeQuery invariant.
inline void validate_analyze(const AnalyzeQuery& aq) {
  if (!aq.cube) throw Error(ErrorCode::InvalidQuery, "analyze query has no cube");
  if (aq.groupers[0].dim == aq.groupers[1].dim)
    throw Error(ErrorCode::ConstraintViolation, "the two groupers must come from different dimensions");
  for (const auto& a : aq.condition.atoms)
    if (!a.single_valued()) throw Error(ErrorCode::ConstraintViolation, "analyze atoms must be single-valued");
  if (!aq.condition.one_atom_per_dimension())
    throw Error(ErrorCode::ConstraintViolation, "at most one atom per dimension");
  for (auto s : {Side::Alpha, Side::Beta})
    if (const auto* a = aq.atom(s); a && a->depth < aq.grouper(s).depth)
      throw Error(ErrorCode::ConstraintViolation, "filter level below grouper level on " +
                                                      aq.cube->schema().dimension(a->dim).name());
  validate_query(aq.as_cube_query());
}

inline std::string facilitator_alias(const AnalyzeQuery& aq, Role role) {
  return role == Role::Org ? aq.alias : aq.alias + "_" + std::string(to_string(role));
}

/// Sibling query for one side: phi = L_sigma = v becomes parent(L_sigma) = anc(v),
/// and that side's grouper becomes L_sigma.
inline CubeQuery derive_sibling(const AnalyzeQuery& aq, Side side) {
  const auto* atom = aq.atom(side);
  const auto& schema = aq.cube->schema();
  const auto& dim = schema.dimension(aq.grouper(side).dim);
  if (!atom) throw Error(ErrorCode::NoFilterAtom, "no filter atom on " + dim.name());
  if (atom->depth >= dim.all_depth())
    throw Error(ErrorCode::NoParentLevel, "filter on " + dim.name() + " is at ALL and has no parent level");
  CubeQuery q = aq.as_cube_query();
  for (auto& a : q.condition.atoms)
    if (a.dim == atom->dim) a = SelectionAtom(a.dim, atom->depth + 1, {dim.anc(atom->depth, atom->depth + 1, atom->values.front())});
  q.groupers[static_cast<std::size_t>(side)].depth = atom->depth;
  q.alias = facilitator_alias(aq, side == Side::Alpha ? Role::SibA : Role::SibB);
  return q;
}

/// Drill-down for one side: that grouper moves one level down.
inline CubeQuery derive_drilldown(const AnalyzeQuery& aq, Side side) {
  const auto& g = aq.grouper(side);
  if (g.depth == 0)
    throw Error(ErrorCode::AlreadyMostDetailed,
                "grouper " + level_name(aq.cube->schema(), g.dim, g.depth, true) + " is already most detailed");
  CubeQuery q = aq.as_cube_query();
  q.groupers[static_cast<std::size_t>(side)].depth = g.depth - 1;
  q.alias = facilitator_alias(aq, side == Side::Alpha ? Role::DdA : Role::DdB);
  return q;
}

/// A facilitator that could not be derived stays empty and says why.
struct FacilitatorSlot {
  std::optional<CubeQuery> query;
  std::string reason;

  bool present() const noexcept { return query.has_value(); }
};

struct FacilitatorSet {
  std::array<FacilitatorSlot, 5> slots;

  FacilitatorSlot& operator[](Role r) { return slots[static_cast<std::size_t>(r)]; }
  const FacilitatorSlot& operator[](Role r) const { return slots[static_cast<std::size_t>(r)]; }
  const CubeQuery& org() const { return *slots[0].query; }

  std::size_t present_count() const {
    std::size_t n = 0;
    for (const auto& s : slots) n += s.present();
    return n;
  }
};

namespace detail {

template <typename Fn>
FacilitatorSlot derive_slot(Fn&& fn) {
  try {
    return FacilitatorSlot{fn(), {}};
  } catch (const Error& e) {
    switch (e.code()) {
      case ErrorCode::NoFilterAtom: return FacilitatorSlot{std::nullopt, "no filter atom"};
      case ErrorCode::NoParentLevel: return FacilitatorSlot{std::nullopt, "filter level is ALL"};
      case ErrorCode::AlreadyMostDetailed: return FacilitatorSlot{std::nullopt, "already most detailed"};
      default: throw;
    }
  }
}

}  // namespace detail

inline FacilitatorSet build_facilitators(const AnalyzeQuery& aq) {
  validate_analyze(aq);
  FacilitatorSet fs;
  fs[Role::Org] = FacilitatorSlot{aq.as_cube_query(), {}};
  fs[Role::SibA] = detail::derive_slot([&] { return derive_sibling(aq, Side::Alpha); });
  fs[Role::SibB] = detail::derive_slot([&] { return derive_sibling(aq, Side::Beta); });
  fs[Role::DdA] = detail::derive_slot([&] { return derive_drilldown(aq, Side::Alpha); });
  fs[Role::DdB] = detail::derive_slot([&] { return derive_drilldown(aq, Side::Beta); });
  return fs;
}

}  // namespace analyze
