#pragma once

#include <map>

#include "multizero/numrank.hpp"

namespace multizero {

struct GradedLess {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const {
    return graded_index_less(a, b);
  }
};

// A finite combination of normalized differential monomials at an anchor
// point; the exponent j stands for (1/j!) d^|j|/dx^j evaluated at the anchor.
struct DualFunctional {
  std::map<MultiIndex, Complex, GradedLess> terms;
  Point anchor;

  int order() const;
  Complex coeff(const MultiIndex& j) const;
};

inline constexpr double kCoeffPrune = 1e-14;

DualFunctional kernel_to_dual(const Eigen::VectorXcd& z,
                              const IndexOrdering& ordering, const Point& at);

struct ClosednessReport {
  struct Entry {
    MultiIndex shift;
    int eq = 0;
    double magnitude = 0.0;
  };
  std::vector<Entry> entries;
  double max_residual = 0.0;
};

// Applies the functional to every shifted equation (x - xhat)^k f_i with
// |k| up to the functional's order; a member of the dual space annihilates
// them all.
ClosednessReport closedness_residual(const DualFunctional& c, const System& sys,
                                     const Point& at);

struct MultiplicityStructure {
  int multiplicity = 0;
  std::vector<int> hilbert;  // h(0), h(1), ..., trailing 0 when terminated
  int breadth = 0;
  int depth = 0;
  std::vector<DualFunctional> dual_basis;  // ascending by order
  std::vector<int> basis_orders;           // adoption order per basis entry
  double theta = 0.0;
  std::uint64_t seed = 0;
  bool terminated = true;
  std::vector<std::string> warnings;
};

// The main driver: grows the multiplicity matrices order by order, carrying
// the kernel factorization along, and stops at the first order that adds no
// new dual functional.
MultiplicityStructure multiplicity_structure(const System& sys, const Point& at,
                                             double theta = 1e-8,
                                             int max_order = 50,
                                             std::uint64_t seed = kDefaultSeed);

}  // namespace multizero
