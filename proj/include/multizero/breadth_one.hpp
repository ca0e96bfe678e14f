#pragma once

#include "multizero/words.hpp"

namespace multizero {

// One application of Psi = sum_eta x_{eta+1} . Delta_{x_eta} to a word
// combo: each word gains letter 2 (differentiation of the base argument),
// and each occurrence of a letter L is promoted to L+1 by the product rule.
FunctionalCombo psi_apply(const FunctionalCombo& c);

struct BreadthOneResult {
  int gamma = 0;                        // multiplicity = gamma + 1
  std::vector<Point> anchors;           // x1 .. x_{gamma+1}
  std::vector<FunctionalCombo> combos;  // rho_0 .. rho_gamma as word combos
  std::vector<DualFunctional> basis;    // their partial-derivative expansions
  Point b;                              // random border vector, normalized
  std::uint64_t seed = 0;
};

// Breadth-one multiplicity structure: grows the anchor chain one block per
// stage by solving the fixed bordered system [J(x1); b^H] against the word
// algebra right-hand sides, so the work stays linear in the multiplicity.
// theta gates the nullity-one precondition; tol is the relative residual
// above which the bordered solve counts as unsolvable (floored at 1e-8).
BreadthOneResult breadth_one_multiplicity(const System& sys, const Point& at,
                                          double theta = 1e-8,
                                          double tol = 1e-8,
                                          std::uint64_t seed = kDefaultSeed,
                                          int stage_cap = 64);

}  // namespace multizero
