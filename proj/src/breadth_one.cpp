#include "multizero/breadth_one.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <string>

#include "multizero/expr.hpp"
#include "multizero/jet.hpp"

namespace multizero {

FunctionalCombo psi_apply(const FunctionalCombo& c) {
  FunctionalCombo out;
  for (const auto& [w, a] : c) {
    Word grown = w;
    grown.push_back(2);
    std::sort(grown.begin(), grown.end());
    out[grown] += a;

    for (size_t i = 0; i < w.size(); ++i) {
      if (i > 0 && w[i] == w[i - 1]) continue;
      double mult = static_cast<double>(std::count(w.begin(), w.end(), w[i]));
      Word repl = w;
      repl.erase(repl.begin() + static_cast<std::ptrdiff_t>(i));
      repl.push_back(w[i] + 1);
      std::sort(repl.begin(), repl.end());
      out[repl] += a * mult;
    }
  }
  prune_combo(out);
  return out;
}

namespace {

// Like psi_apply, but stops the letter promotion at max_eta: the dropped
// eta = k term is exactly the unknown J(x1) x_{k+1} block the bordered
// system solves for.  A global minus sign moves it to the right-hand side.
FunctionalCombo rhs_combo(const FunctionalCombo& p, int max_eta) {
  FunctionalCombo out;
  for (const auto& [w, a] : p) {
    Word grown = w;
    grown.push_back(2);
    std::sort(grown.begin(), grown.end());
    out[grown] -= a;

    for (size_t i = 0; i < w.size(); ++i) {
      if (i > 0 && w[i] == w[i - 1]) continue;
      if (w[i] > max_eta) continue;
      double mult = static_cast<double>(std::count(w.begin(), w.end(), w[i]));
      Word repl = w;
      repl.erase(repl.begin() + static_cast<std::ptrdiff_t>(i));
      repl.push_back(w[i] + 1);
      std::sort(repl.begin(), repl.end());
      out[repl] -= a * mult;
    }
  }
  prune_combo(out);
  return out;
}

}  // namespace

BreadthOneResult breadth_one_multiplicity(const System& sys, const Point& at,
                                          double theta, double tol,
                                          std::uint64_t seed, int stage_cap) {
  if (static_cast<int>(at.size()) != sys.num_vars())
    throw std::invalid_argument("breadth_one_multiplicity: point size mismatch");

  const int t = sys.num_eqs();
  const int s = sys.num_vars();

  auto jac_rows = system_jacobian(sys, at);
  Eigen::MatrixXcd j(t, s);
  for (int i = 0; i < t; ++i)
    for (int v = 0; v < s; ++v) j(i, v) = jac_rows[static_cast<size_t>(i)][static_cast<size_t>(v)];

  const int nullity = numerical_kernel(j, theta, seed).dimension();
  if (nullity != 1)
    throw std::invalid_argument("breadth_one_multiplicity: Jacobian nullity is " +
                                std::to_string(nullity) +
                                ", not 1; use the general driver");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::VectorXcd b(s);
  do {
    for (int v = 0; v < s; ++v) b(v) = Complex(nd(rng), nd(rng));
  } while (b.norm() == 0.0);
  b.normalize();

  // The bordered matrix never changes, so one factorization serves every
  // stage of the chain.
  Eigen::MatrixXcd bordered(t + 1, s);
  bordered.topRows(t) = j;
  bordered.row(t) = b.adjoint();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(bordered);

  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(t + 1);
  rhs(t) = Complex(1.0, 0.0);
  Eigen::VectorXcd x2 = qr.solve(rhs);

  BreadthOneResult result;
  result.seed = seed;
  result.b.assign(b.data(), b.data() + s);
  result.anchors.push_back(at);
  result.anchors.push_back(Point(x2.data(), x2.data() + s));
  result.combos.push_back(FunctionalCombo{{Word{}, Complex(1.0, 0.0)}});
  result.combos.push_back(FunctionalCombo{{Word{2}, Complex(1.0, 0.0)}});

  const double no_solution = std::max(tol, 1e-8);
  const double matrix_scale = std::max(1.0, bordered.cwiseAbs().rowwise().sum().maxCoeff());
  for (int k = 2;; ++k) {
    if (k - 1 > stage_cap)
      throw std::runtime_error("breadth_one_multiplicity: stage cap exceeded");

    // dirs_by_letter[L] = anchor x_L; letters in the rhs combo stay <= k.
    std::vector<Point> dirs(static_cast<size_t>(k) + 1);
    std::vector<double> dir_norm(static_cast<size_t>(k) + 1, 0.0);
    for (int l = 2; l <= k; ++l) {
      const Point& a = result.anchors[static_cast<size_t>(l - 1)];
      dirs[static_cast<size_t>(l)] = a;
      double nrm2 = 0.0;
      for (const Complex& c : a) nrm2 += std::norm(c);
      dir_norm[static_cast<size_t>(l)] = std::sqrt(nrm2);
    }

    const FunctionalCombo d = rhs_combo(result.combos.back(), k - 1);
    rhs.setZero();
    for (int i = 0; i < t; ++i)
      rhs(i) = apply_combo(d, *sys.equations[static_cast<size_t>(i)], at, dirs);

    // On inexact systems a right-hand side that should vanish comes out at
    // roundoff level instead, so the unsolvability test is scaled by the
    // magnitude the word sums could reach: |grad_{v1}..grad_{vr} f_i| is at
    // most r! * (sum of |Taylor coeffs| of f_i at order r) * prod |v| norms,
    // and the word coefficients weight those bounds.  Scaling by the
    // noise-level ||rhs|| itself would misfire on the exactly-zero stages.
    const auto tables = system_tables(sys, at, k);
    std::vector<double> fact(static_cast<size_t>(k) + 1, 1.0);
    for (size_t r = 1; r < fact.size(); ++r)
      fact[r] = fact[r - 1] * static_cast<double>(r);
    double word_scale = 0.0;
    for (int i = 0; i < t; ++i) {
      const auto& tbl = tables[static_cast<size_t>(i)];
      std::vector<double> mass(static_cast<size_t>(k) + 1, 0.0);
      for (int p = 0; p < tbl.space().size(); ++p) {
        int deg = total_degree(tbl.space().index_at(p));
        mass[static_cast<size_t>(deg)] += std::abs(tbl.raw()[static_cast<size_t>(p)]);
      }
      double row = 0.0;
      for (const auto& [w, c] : d) {
        double prod = std::abs(c) * fact[w.size()] * mass[w.size()];
        for (int letter : w) prod *= dir_norm[static_cast<size_t>(letter)];
        row += prod;
      }
      word_scale = std::max(word_scale, row);
    }

    Eigen::VectorXcd xk = qr.solve(rhs);
    double resid = (bordered * xk - rhs).norm();
    if (resid > no_solution * std::max({1.0, matrix_scale, word_scale})) {
      result.gamma = k - 1;
      break;
    }

    result.anchors.push_back(Point(xk.data(), xk.data() + s));
    result.combos.push_back(psi_apply(result.combos.back()));
  }

  std::vector<Point> dirs(result.anchors.size() + 1);
  for (size_t l = 2; l <= result.anchors.size(); ++l) dirs[l] = result.anchors[l - 1];
  for (const auto& c : result.combos)
    result.basis.push_back(word_to_partial(c, dirs, at));
  return result;
}

}  // namespace multizero
