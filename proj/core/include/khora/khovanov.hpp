#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "khora/complex.hpp"
#include "khora/diagram.hpp"

namespace khora {

struct CubeOptions {
  int max_crossings = 20;  // refuse larger diagrams with a size estimate
};

// Cube of resolutions over F2. Generators are states with a {1,x} label per
// state circle; degree is j = |s| - n_minus, aux gradings are the quantum
// grading q and the annular grading k (sum of +-1 over essential circles).
// `full` carries the Khovanov differential, `annular` the k-preserving part
// of it on the same generator list.
struct KhComplex {
  GradedComplexF2 full;
  GradedComplexF2 annular;
  int n_pos = 0, n_neg = 0;
  long long k_min = 0, k_max = 0;
};

KhComplex build_cube(const AnnularDiagram& d, const CubeOptions& opt = {});

// homology rank tables; zero entries omitted
std::map<std::pair<int, long long>, std::size_t> kh_ranks(const KhComplex& c);
std::map<std::tuple<int, long long, long long>, std::size_t> akh_ranks(
    const KhComplex& c);
std::map<std::pair<int, long long>, std::size_t> kh_ranks(
    const AnnularDiagram& d, const CubeOptions& opt = {});
std::map<std::tuple<int, long long, long long>, std::size_t> akh_ranks(
    const AnnularDiagram& d, const CubeOptions& opt = {});

// spectral sequence of the annular filtration: level (k_max - k)/2, E_1 the
// annular homology, E_infinity matching the full homology
SpectralPages akh_to_kh_pages(const KhComplex& c);
SpectralPages akh_to_kh_pages(const AnnularDiagram& d,
                              const CubeOptions& opt = {});

// graded Euler characteristic as a Laurent polynomial, exponent -> coefficient
std::map<long long, long long> graded_euler(const KhComplex& c);
std::string laurent_str(const std::map<long long, long long>& p);

// |reduced polynomial at q^2 = -1|: divides the Euler characteristic by the
// unknot factor q + 1/q exactly, then evaluates at q = i
long long determinant(const KhComplex& c);
long long determinant(const AnnularDiagram& d, const CubeOptions& opt = {});

struct PeriodicRankReport {
  std::size_t kh_total = 0;        // dim Kh of the periodic diagram
  std::size_t akh_total = 0;       // dim AKh of the periodic diagram
  std::size_t quotient_akh = 0;    // dim AKh of the quotient
  bool kh_bound_holds = false;     // kh_total >= quotient_akh
  bool akh_bound_holds = false;    // akh_total >= quotient_akh
};

// Rank inequalities between a half-turn symmetric diagram and its quotient.
// Requires check_periodic to pass.
PeriodicRankReport periodic_rank_check(const AnnularDiagram& d,
                                       const CubeOptions& opt = {});

}  // namespace khora
