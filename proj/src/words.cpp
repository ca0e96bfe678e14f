#include "multizero/words.hpp"

#include <stdexcept>

#include "multizero/expr.hpp"
#include "multizero/jet.hpp"

namespace multizero {

void prune_combo(FunctionalCombo& combo, double tol) {
  for (auto it = combo.begin(); it != combo.end();) {
    if (std::abs(it->second) < tol)
      it = combo.erase(it);
    else
      ++it;
  }
}

int max_letter(const FunctionalCombo& combo) {
  int m = 1;
  for (const auto& [w, c] : combo)
    for (int letter : w) m = std::max(m, letter);
  return m;
}

namespace {

const Point& letter_dir(const std::vector<Point>& dirs, int letter) {
  if (letter < 2 || letter >= static_cast<int>(dirs.size()) ||
      dirs[static_cast<size_t>(letter)].empty())
    throw std::invalid_argument("missing direction vector for letter " +
                                std::to_string(letter));
  return dirs[static_cast<size_t>(letter)];
}

}  // namespace

Complex apply_combo(const FunctionalCombo& combo, const Expression& f,
                    const Point& at,
                    const std::vector<Point>& dirs_by_letter) {
  Complex total(0.0, 0.0);
  for (const auto& [w, c] : combo) {
    std::vector<Point> dirs;
    dirs.reserve(w.size());
    for (int letter : w) dirs.push_back(letter_dir(dirs_by_letter, letter));
    total += c * directional_derivative(f, at, dirs);
  }
  return total;
}

DualFunctional word_to_partial(const FunctionalCombo& combo,
                               const std::vector<Point>& dirs_by_letter,
                               const Point& at) {
  const int s = static_cast<int>(at.size());
  DualFunctional d;
  d.anchor = at;

  int cap = 0;
  for (const auto& [w, c] : combo) cap = std::max(cap, static_cast<int>(w.size()));
  auto space = std::make_shared<const JetSpace>(s, cap);

  // factorial per exponent, following the normalization of the d_j basis
  auto factorial_of = [](const MultiIndex& j) {
    double f = 1.0;
    for (int e : j)
      for (int k = 2; k <= e; ++k) f *= k;
    return f;
  };

  for (const auto& [w, c] : combo) {
    Jet poly(space, Complex(1.0, 0.0));
    for (int letter : w) {
      const Point& v = letter_dir(dirs_by_letter, letter);
      Jet form(space, Complex(0.0, 0.0));
      MultiIndex unit(static_cast<size_t>(s), 0);
      for (int i = 0; i < s; ++i) {
        unit[static_cast<size_t>(i)] = 1;
        form[space->position(unit)] = v[static_cast<size_t>(i)];
        unit[static_cast<size_t>(i)] = 0;
      }
      poly = poly * form;
    }
    const int deg = static_cast<int>(w.size());
    for (int p = 0; p < space->size(); ++p) {
      const MultiIndex& j = space->index_at(p);
      if (total_degree(j) != deg) continue;
      Complex contrib = c * poly[p] * factorial_of(j);
      if (contrib == Complex(0.0, 0.0)) continue;
      d.terms[j] += contrib;
    }
  }
  for (auto it = d.terms.begin(); it != d.terms.end();) {
    if (std::abs(it->second) < kCoeffPrune)
      it = d.terms.erase(it);
    else
      ++it;
  }
  return d;
}

}  // namespace multizero
