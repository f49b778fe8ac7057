#pragma once

// Deterministic synthetic star schemas. Members are laid out top-down so that
// every subtree occupies a contiguous range of detailed codes; facts draw
// detailed members from a Zipf law over those codes, which makes the first
// members of every level heavy and gives a wide spread of filter selectivities.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "analyze/cube.hpp"

namespace analyze {

struct SynthDimension {
  std::string name;
  /// fanouts[0]: members of the top level; fanouts[i]: children per member one level down.
  std::vector<std::size_t> fanouts;
};

struct SynthSpec {
  std::string cube_name = "synth";
  std::vector<SynthDimension> dimensions;
  std::size_t facts = 0;
  std::uint64_t seed = 42;
  double skew = 1.0;       // Zipf exponent over detailed codes; 0 is uniform
  bool ragged = false;     // each member gets 1..fanout children instead of exactly fanout
  std::vector<std::string> measures{"amount"};
  std::int64_t measure_max = 100;  // measures are uniform integers in [1, measure_max]

  void validate() const {
    if (dimensions.empty()) throw Error(ErrorCode::InvalidSpec, "at least one dimension required");
    if (measures.empty()) throw Error(ErrorCode::InvalidSpec, "at least one measure required");
    if (measure_max < 1) throw Error(ErrorCode::InvalidSpec, "measure_max must be positive");
    if (skew < 0 || !std::isfinite(skew)) throw Error(ErrorCode::InvalidSpec, "skew must be a non-negative number");
    for (const auto& d : dimensions) {
      if (d.name.empty() || !std::all_of(d.name.begin(), d.name.end(), [](char c) { return std::isalpha(static_cast<unsigned char>(c)); }))
        throw Error(ErrorCode::InvalidSpec, "dimension names must be alphabetic, got '" + d.name + "'");
      if (d.fanouts.empty()) throw Error(ErrorCode::InvalidSpec, "dimension " + d.name + " needs at least one level");
      std::size_t members = 1;
      for (auto f : d.fanouts) {
        if (f == 0) throw Error(ErrorCode::InvalidSpec, "dimension " + d.name + " has a zero fanout");
        members *= f;
        if (members > (std::size_t{1} << 24)) throw Error(ErrorCode::InvalidSpec, "dimension " + d.name + " is too large");
      }
    }
  }
};

/// Level name and member label conventions: dimension A has levels A0 (detailed), A1, ...
inline std::string synth_level_name(const std::string& dim, int depth) { return dim + std::to_string(depth); }
inline std::string synth_label(const std::string& dim, int depth, std::size_t index) {
  return dim + std::to_string(depth) + "_" + std::to_string(index);
}

namespace detail {

/// Uniform draws that do not depend on the standard library's distribution code.
struct SynthRng {
  std::mt19937_64 engine;
  explicit SynthRng(std::uint64_t seed) : engine(seed) {}

  std::size_t below(std::size_t n) {
    return static_cast<std::size_t>((static_cast<unsigned __int128>(engine()) * n) >> 64);
  }
  double unit() { return static_cast<double>(engine() >> 11) * 0x1.0p-53; }
};

struct SynthLayout {
  /// parents[j][i]: parent index (level j-1 from the top) of member i at level j from the top.
  std::vector<std::vector<std::size_t>> parents;
  std::vector<std::size_t> counts;  // members per level, top first
};

inline SynthLayout synth_layout(const SynthDimension& dim, bool ragged, SynthRng& rng) {
  SynthLayout layout;
  const std::size_t k = dim.fanouts.size();
  layout.parents.resize(k);
  layout.counts.resize(k);
  layout.counts[0] = dim.fanouts[0];
  for (std::size_t j = 1; j < k; ++j) {
    for (std::size_t p = 0; p < layout.counts[j - 1]; ++p) {
      const std::size_t children = ragged ? 1 + rng.below(dim.fanouts[j]) : dim.fanouts[j];
      layout.parents[j].insert(layout.parents[j].end(), children, p);
    }
    layout.counts[j] = layout.parents[j].size();
  }
  return layout;
}

/// Member paths, detailed label first, for every detailed member in code order.
inline std::vector<std::vector<std::string>> synth_paths(const SynthDimension& dim, const SynthLayout& layout) {
  const std::size_t k = dim.fanouts.size();
  std::vector<std::vector<std::string>> paths(layout.counts[k - 1]);
  for (std::size_t i = 0; i < paths.size(); ++i) {
    std::size_t idx = i;
    for (std::size_t j = k; j-- > 0;) {
      const int depth = static_cast<int>(k - 1 - j);
      paths[i].push_back(synth_label(dim.name, depth, idx));
      if (j > 0) idx = layout.parents[j][idx];
    }
  }
  return paths;
}

struct SynthData {
  SchemaDefinition def;
  std::vector<DimensionPtr> dimensions;
  std::vector<std::vector<std::vector<std::string>>> paths;
  std::vector<std::vector<Code>> coords;
  std::vector<std::vector<std::int64_t>> measures;
};

inline SynthData synth_data(const SynthSpec& spec) {
  spec.validate();
  SynthRng rng(spec.seed);
  SynthData data;
  data.def.cube_name = spec.cube_name;
  for (const auto& m : spec.measures) data.def.measures.emplace_back(m, MeasureKind::Integer);
  std::vector<std::vector<double>> cdfs;
  for (const auto& d : spec.dimensions) {
    const auto layout = synth_layout(d, spec.ragged, rng);
    std::vector<std::string> level_names;
    for (std::size_t depth = 0; depth < d.fanouts.size(); ++depth) level_names.push_back(synth_level_name(d.name, static_cast<int>(depth)));
    data.def.dimensions.push_back({d.name, level_names});
    DimensionBuilder builder(d.name, level_names);
    auto paths = synth_paths(d, layout);
    for (const auto& p : paths) builder.add_path(p);
    data.dimensions.push_back(std::make_shared<const Dimension>(builder.build()));
    data.paths.push_back(std::move(paths));

    std::vector<double> cdf(layout.counts.back());
    double total = 0;
    for (std::size_t i = 0; i < cdf.size(); ++i) cdf[i] = total += std::pow(static_cast<double>(i + 1), -spec.skew);
    for (auto& c : cdf) c /= total;
    cdf.back() = 1.0;
    cdfs.push_back(std::move(cdf));
  }

  data.coords.assign(spec.dimensions.size(), std::vector<Code>(spec.facts));
  data.measures.assign(spec.measures.size(), std::vector<std::int64_t>(spec.facts));
  for (std::size_t r = 0; r < spec.facts; ++r) {
    for (std::size_t d = 0; d < cdfs.size(); ++d) {
      const double u = rng.unit();
      const auto it = std::upper_bound(cdfs[d].begin(), cdfs[d].end(), u);
      data.coords[d][r] = static_cast<Code>(std::min<std::size_t>(it - cdfs[d].begin(), cdfs[d].size() - 1));
    }
    for (auto& m : data.measures) m[r] = 1 + static_cast<std::int64_t>(rng.below(static_cast<std::size_t>(spec.measure_max)));
  }
  return data;
}

}  // namespace detail

/// The cube the written dataset would load into, built in memory.
inline std::unique_ptr<DetailedCube> generate_cube(const SynthSpec& spec) {
  auto data = detail::synth_data(spec);
  CubeSchema schema{data.def.cube_name, data.dimensions, {}};
  for (const auto& [name, kind] : data.def.measures) schema.measures.push_back({name, *kind});
  std::vector<MeasureColumn> measures;
  for (auto& m : data.measures) measures.emplace_back(std::move(m));
  return std::make_unique<DetailedCube>(std::move(schema), std::move(data.coords), std::move(measures));
}

/// Writes schema.txt, one <Dimension>.csv per dimension and facts.csv. Returns the written paths.
inline std::vector<std::filesystem::path> write_dataset(const SynthSpec& spec, const std::filesystem::path& dir) {
  const auto data = detail::synth_data(spec);
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  auto open = [&](const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + p.string());
    written.push_back(p);
    return out;
  };
  {
    auto out = open(dir / "schema.txt");
    out << "cube " << data.def.cube_name << '\n';
    for (const auto& d : data.def.dimensions) {
      out << "dimension " << d.name << ": ";
      for (std::size_t i = 0; i < d.level_names.size(); ++i) out << (i ? ", " : "") << d.level_names[i];
      out << '\n';
    }
    for (const auto& m : data.def.measures) out << "measure " << m.first << " integer\n";
  }
  for (std::size_t d = 0; d < data.def.dimensions.size(); ++d) {
    auto out = open(dir / (data.def.dimensions[d].name + ".csv"));
    const auto& names = data.def.dimensions[d].level_names;
    for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
    out << '\n';
    for (const auto& path : data.paths[d]) {
      for (std::size_t i = 0; i < path.size(); ++i) out << (i ? "," : "") << path[i];
      out << '\n';
    }
  }
  {
    auto out = open(dir / "facts.csv");
    std::string line;
    for (std::size_t d = 0; d < data.def.dimensions.size(); ++d) line += data.def.dimensions[d].level_names[0] + ",";
    for (std::size_t m = 0; m < data.def.measures.size(); ++m) line += (m ? "," : "") + data.def.measures[m].first;
    out << line << '\n';
    for (std::size_t r = 0; r < spec.facts; ++r) {
      line.clear();
      for (std::size_t d = 0; d < data.coords.size(); ++d) line += data.paths[d][data.coords[d][r]][0] + ",";
      for (std::size_t m = 0; m < data.measures.size(); ++m) line += (m ? "," : "") + std::to_string(data.measures[m][r]);
      out << line << '\n';
    }
  }
  return written;
}

/// FNV-1a over the given files' bytes, in order.
inline std::uint64_t fnv1a_files(const std::vector<std::filesystem::path>& files) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + f.string());
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
      for (std::streamsize i = 0; i < in.gcount(); ++i) {
        h ^= static_cast<unsigned char>(buf[i]);
        h *= 0x100000001b3ULL;
      }
    }
  }
  return h;
}

}  // namespace analyze
