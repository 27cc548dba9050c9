#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "khora/f2.hpp"

namespace khora {

struct Generator {
  std::string id;
  int degree = 0;
  std::map<std::string, long long> aux;  // named integer gradings (q, k, w, ...)
};

// Cochain complex over F2: the differential raises degree by one.
// Generators are kept sorted by id so that every report is byte-stable.
struct GradedComplexF2 {
  std::vector<Generator> gens;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> diff;  // (src, dst), sorted

  static GradedComplexF2 make(std::vector<Generator> generators,
                              const std::vector<std::pair<std::string, std::string>>& arrows);

  std::uint32_t index_of(const std::string& id) const;  // throws on miss
  bool has(const std::string& id) const;

  // unique ids, every arrow raises degree by exactly one, and d^2 = 0
  void validate() const;

  nlohmann::json to_json() const;
  static GradedComplexF2 from_json(const nlohmann::json& j);

  std::vector<int> degrees() const;  // sorted, unique
  std::vector<std::uint32_t> gens_in_degree(int d) const;

  // per-source adjacency, each list sorted
  std::vector<std::vector<std::uint32_t>> adjacency() const;

  std::size_t diff_rank(int d) const;  // rank of the block degree d -> d+1
  std::map<int, std::size_t> homology_ranks() const;

  // Rows span H^d: independent cocycles, none a boundary, in coordinates
  // indexed by position within gens_in_degree(d).
  BitMatrix homology_reps(int d) const;
};

// Degree-0 chain map between two complexes, one image list per source
// generator (sorted target indices).
struct ChainMapF2 {
  const GradedComplexF2* src = nullptr;
  const GradedComplexF2* dst = nullptr;
  std::vector<std::vector<std::uint32_t>> images;

  void validate() const;  // degree preserved and commutes with differentials
};

// Cone(f: A -> B): A stays in place, B moves up one degree, and the extra
// arrows are f itself. Ids get "a:" / "b:" prefixes to keep them distinct.
GradedComplexF2 mapping_cone(const ChainMapF2& f);

struct FilteredComplexF2 {
  GradedComplexF2 complex;
  std::vector<int> level;  // parallel to complex.gens

  static FilteredComplexF2 make(GradedComplexF2 c,
                                const std::map<std::string, int>& levels);
  // read levels off an aux grading, optionally flipped and offset:
  // level = sign * aux[key] + offset
  static FilteredComplexF2 from_aux(GradedComplexF2 c, const std::string& key,
                                    int sign = 1, long long offset = 0);

  void validate() const;  // complex valid, differential never drops the level
};

struct SpectralPages {
  // pages[i] holds page r = i + 1; each table maps (degree, level) -> rank
  std::vector<std::map<std::pair<int, int>, std::size_t>> pages;
  // smallest r whose page equals every later one; 0 when max_r cut us off
  // before that point was reached
  std::size_t stable_page = 0;

  std::size_t total_rank(std::size_t r) const;
  const std::map<std::pair<int, int>, std::size_t>& table(std::size_t r) const;
};

// Pages r = 1, 2, ... of the filtration spectral sequence, computed until
// they provably stabilize (level spread + 1) or until max_r if that is
// smaller. max_r = 0 means no cap.
SpectralPages spectral_pages(const FilteredComplexF2& fc, std::size_t max_r = 0);

}  // namespace khora
