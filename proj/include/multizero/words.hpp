#pragma once

#include "multizero/dual_space.hpp"

namespace multizero {

// A word is a sorted multiset of block letters >= 2; letter L stands for a
// directional differentiation along the vector bound to block L.  The empty
// word is plain evaluation.
using Word = std::vector<int>;

// Finite combination of words; map order makes iteration deterministic.
using FunctionalCombo = std::map<Word, Complex>;

void prune_combo(FunctionalCombo& combo, double tol = kCoeffPrune);

// Largest letter used by any word (1 if the combo is constant-only).
int max_letter(const FunctionalCombo& combo);

// Evaluates sum_w c_w (grad_{v_w1} ... grad_{v_wm} f)(at), where
// dirs_by_letter[L] supplies the vector for letter L (entries 0 and 1 are
// unused).
Complex apply_combo(const FunctionalCombo& combo, const Expression& f,
                    const Point& at,
                    const std::vector<Point>& dirs_by_letter);

// Expands the directional-derivative words into normalized partials: each
// word contributes the product of its letters' linear forms, and the
// monomial coefficient at exponent j picks up a factor j! to land in the
// d_j normalization.
DualFunctional word_to_partial(const FunctionalCombo& combo,
                               const std::vector<Point>& dirs_by_letter,
                               const Point& at);

}  // namespace multizero
