// Acceptance sweep: eight end-to-end criteria, one PASS/FAIL line each.
// Tolerances are pinned here on purpose; loosening one is a code review
// event, not a local edit.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "multizero/breadth_one.hpp"
#include "multizero/deflation.hpp"
#include "multizero/dual_space.hpp"
#include "multizero/jet.hpp"
#include "multizero/macaulay.hpp"
#include "multizero/numrank.hpp"
#include "support/oracles.hpp"

using namespace multizero;
using multizero::testing::exact_integer_nullity;
using multizero::testing::planted_matrix;
using multizero::testing::subspace_angle;
using multizero::testing::svd_kernel;

namespace {

struct Criterion {
  std::vector<std::string> problems;

  void require(bool ok, const std::string& what) {
    if (!ok) problems.push_back(what);
  }
};

std::string fmt(double x) {
  std::ostringstream out;
  out.precision(3);
  out << std::scientific << x;
  return out.str();
}

std::string fmt_hilbert(const std::vector<int>& h) {
  std::string out;
  for (size_t i = 0; i < h.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(h[i]);
  }
  return out;
}

System example2() {
  return parse_system("vars x1 x2\nx1 - x2 + x1^2\nx1 - x2 + x2^2\n");
}

System intro_system() {
  return parse_system(
      "vars x1 x2\n"
      "sin(x1)*cos(x1) - x1\n"
      "sin(x2)*sin(x1)^2 + x2^4\n");
}

System twelve_b() {
  return parse_system("vars x1 x2\nx1^2*sin(x1)\nx2^2 - x2^2*cos(x2)\n");
}

System twelve_c() {
  return parse_system("vars x1 x2 x3\nx2^3\nx2 - x3^2\nx3 - x1^2\n");
}

System trig3() {
  return parse_system(
      "vars x y z\n"
      "(x-1)^3 + .416146836547142*(z-3)*sin(y) + .909297426825682*(z-3)*cos(y)\n"
      "(y-2)^3 + .989992496600445*(x-1)*sin(z) + .141120008059867*(x-1)*cos(z)\n"
      "(z-3)^3 - .540302305868140*(y-2)*sin(x) + .841470984807897*(y-2)*cos(x)\n");
}

System expcube() {
  return parse_system(
      "vars x y z\n"
      "exp(z) - .944956946314738*cos(y) + .327194696796152*sin(y)\n"
      "z^2 - y^3 - y^2 - .333333333333333*y - .0370370370370370\n"
      "y^2 + .666666666666667*y + .148148148148148 - x^3 + x^2 - "
      ".333333333333333*x\n");
}

System mbc(int k) {
  return parse_system(
      "vars x y z\nx^2*sin(y)\ny - z^2\nz - 1.772453850905516*cos(x^" +
      std::to_string(k) + ")\n");
}

System cluster_system(const std::string& eps) {
  return parse_system("vars x y\nsin(x)*cos(y) - x - " + eps +
                      "\nsin(y)*sin(x)^2 + y^2 + " + eps + "\n");
}

Point origin(int n) { return Point(static_cast<size_t>(n), Complex(0.0)); }

Point mbc_zero() {
  return {Complex(0.0), Complex(3.141592653589793), Complex(1.772453850905516)};
}

DualFunctional make_functional(
    const std::vector<std::pair<MultiIndex, Complex>>& terms, int nvars) {
  DualFunctional c;
  c.anchor = origin(nvars);
  for (const auto& [j, v] : terms) c.terms[j] = v;
  return c;
}

Eigen::MatrixXcd to_columns(const std::vector<DualFunctional>& fs,
                            const IndexOrdering& ord) {
  Eigen::MatrixXcd m =
      Eigen::MatrixXcd::Zero(ord.count(), static_cast<Eigen::Index>(fs.size()));
  for (size_t c = 0; c < fs.size(); ++c)
    for (const auto& [j, v] : fs[c].terms)
      m(ord.position(j), static_cast<Eigen::Index>(c)) = v;
  return m;
}

void check_structure(Criterion& c, const std::string& tag,
                     const MultiplicityStructure& ms, int m,
                     const std::vector<int>& hilbert, int breadth, int depth) {
  c.require(ms.terminated, tag + " did not terminate");
  c.require(ms.multiplicity == m, tag + " multiplicity " +
                                      std::to_string(ms.multiplicity) + " != " +
                                      std::to_string(m));
  c.require(ms.hilbert == hilbert, tag + " hilbert " + fmt_hilbert(ms.hilbert) +
                                       " != " + fmt_hilbert(hilbert));
  c.require(ms.breadth == breadth,
            tag + " breadth " + std::to_string(ms.breadth));
  c.require(ms.depth == depth, tag + " depth " + std::to_string(ms.depth));
}

void criterion1(Criterion& c) {
  MultiplicityStructure ms = multiplicity_structure(example2(), origin(2), 1e-8);
  check_structure(c, "example 2", ms, 3, {1, 1, 1, 0}, 1, 2);

  std::vector<DualFunctional> golden{
      make_functional({{{0, 0}, 1.0}}, 2),
      make_functional({{{1, 0}, 1.0}, {{0, 1}, 1.0}}, 2),
      make_functional(
          {{{1, 0}, -1.0}, {{2, 0}, 1.0}, {{1, 1}, 1.0}, {{0, 2}, 1.0}}, 2),
  };
  IndexOrdering ord(2, 2);
  double angle = subspace_angle(to_columns(ms.dual_basis, ord),
                                to_columns(golden, ord));
  c.require(angle < 1e-8, "dual basis principal angle " + fmt(angle));
}

void criterion2(Criterion& c) {
  MultiplicityStructure ms = multiplicity_structure(intro_system(), origin(2));
  check_structure(c, "intro system", ms, 12, {1, 2, 3, 2, 2, 1, 1, 0}, 2, 6);
}

void criterion3(Criterion& c) {
  MultiplicityStructure b = multiplicity_structure(twelve_b(), origin(2));
  check_structure(c, "system (b)", b, 12, {1, 2, 3, 3, 2, 1, 0}, 2, 5);

  std::vector<int> ones(12, 1);
  ones.push_back(0);
  MultiplicityStructure d = multiplicity_structure(twelve_c(), origin(3));
  check_structure(c, "system (c)", d, 12, ones, 1, 11);
}

void criterion4(Criterion& c) {
  System sys = trig3();
  // the four-correct-digit iterate that an undeflated Newton run is known
  // to produce on this system; kappa * residual must rate it near 2.7e-4
  Point x0{Complex(1.0003), Complex(1.9997), Complex(3.0003)};

  ConditionEstimate at_stall = condition_number(sys, x0);
  c.require(!at_stall.infinite, "stall iterate rated as exact singularity");
  bool in_band = at_stall.error_estimate > 2.7e-4 / 3.0 &&
                 at_stall.error_estimate < 2.7e-4 * 3.0;
  c.require(in_band, "stall error estimate " + fmt(at_stall.error_estimate) +
                         " not within 3x of 2.7e-4");

  DeflationChain chain = depth_deflate(sys, x0);
  c.require(chain.stages == 1,
            "stages " + std::to_string(chain.stages) + " != 1");
  for (int i = 0; i < 3; ++i)
    c.require(std::abs(chain.zero[static_cast<size_t>(i)] - double(i + 1)) <
                  1e-12,
              "refined coordinate " + std::to_string(i) + " off (1,2,3)");
  c.require(chain.condition.error_estimate <= 5e-14,
            "refined error estimate " + fmt(chain.condition.error_estimate));

  MultiplicityStructure ms = multiplicity_structure(sys, chain.zero, 1e-12);
  check_structure(c, "refined structure", ms, 11, {1, 3, 3, 3, 1, 0}, 3, 4);
}

void criterion5(Criterion& c) {
  System sys = expcube();
  DeflationChain chain =
      depth_deflate(sys, {Complex(0.31), Complex(-0.31), Complex(0.01)});
  c.require(chain.stages == 3,
            "stages " + std::to_string(chain.stages) + " != 3");
  const double golden[3] = {1.0 / 3.0, -1.0 / 3.0, 0.0};
  for (int i = 0; i < 3; ++i) {
    double err = std::abs(chain.zero[static_cast<size_t>(i)] - golden[i]);
    c.require(err <= 1e-12,
              "coordinate " + std::to_string(i) + " error " + fmt(err));
  }

  MultiplicityStructure ms = multiplicity_structure(sys, chain.zero, 1e-8);
  check_structure(c, "structure", ms, 9, {1, 2, 2, 2, 1, 1, 0}, 2, 5);
}

void criterion6(Criterion& c) {
  const int ks[] = {2, 4, 6, 8, 10};
  const int depths[] = {5, 9, 13, 17, 21};
  BreadthOneResult base;
  for (int t = 0; t < 5; ++t) {
    BreadthOneResult r = breadth_one_multiplicity(mbc(ks[t]), mbc_zero());
    c.require(r.gamma == depths[t],
              "k=" + std::to_string(ks[t]) + " depth " +
                  std::to_string(r.gamma) + " != " + std::to_string(depths[t]));
    if (ks[t] == 2) base = r;
  }

  // the functional led by d_y, scaled monic in that coefficient, carries
  // -1/pi on d^4_x and 1/sqrt(4 pi) on d_z
  const DualFunctional* led = nullptr;
  double best = 0.0;
  for (const auto& f : base.basis) {
    double norm2 = 0.0;
    for (const auto& [j, v] : f.terms) norm2 += std::norm(v);
    if (norm2 == 0.0) continue;
    double score = std::abs(f.coeff({0, 1, 0})) / std::sqrt(norm2);
    if (score > best) {
      best = score;
      led = &f;
    }
  }
  c.require(led != nullptr, "no basis functional carries d_y");
  if (led != nullptr) {
    Complex dy = led->coeff({0, 1, 0});
    double e1 = std::abs(led->coeff({0, 0, 1}) / dy - 0.2820947917738781);
    double e2 = std::abs(led->coeff({4, 0, 0}) / dy + 0.3183098861837908);
    c.require(e1 < 1e-9, "d_z coefficient off by " + fmt(e1));
    c.require(e2 < 1e-9, "d^4_x coefficient off by " + fmt(e2));
  }
}

void criterion7(Criterion& c) {
  using Row = std::array<Complex, 2>;
  auto sweep = [&](const std::string& eps, const std::vector<Row>& table,
                   double tol) {
    System sys = cluster_system(eps);
    auto zeros = cluster_search(sys, origin(2), 0.02, 500, 1e-12);
    c.require(zeros.size() == 6, "eps=" + eps + " found " +
                                     std::to_string(zeros.size()) +
                                     " zeros, expected 6");
    for (size_t r = 0; r < table.size(); ++r) {
      bool matched = false;
      for (const auto& z : zeros)
        if (std::abs(z.zero[0] - table[r][0]) <= tol &&
            std::abs(z.zero[1] - table[r][1]) <= tol)
          matched = true;
      c.require(matched, "eps=" + eps + " table row " + std::to_string(r) +
                             " unmatched at " + fmt(tol));
    }
  };

  const Complex i(0.0, 1.0);
  std::vector<Row> table8{
      {Complex(-0.0039173928) - 0.0000003908 * i,
       Complex(-0.0000076728) + 0.0000997037 * i},
      {Complex(-0.0039173928) + 0.0000003908 * i,
       Complex(-0.0000076728) - 0.0000997037 * i},
      {Complex(0.0019584003) + 0.0033883580 * i,
       Complex(0.0000035695) + 0.0000935115 * i},
      {Complex(0.0019584003) - 0.0033883580 * i,
       Complex(0.0000035695) - 0.0000935115 * i},
      {Complex(0.0019590795) - 0.0033879671 * i,
       Complex(0.0000040733) + 0.0001067848 * i},
      {Complex(0.0019590795) + 0.0033879671 * i,
       Complex(0.0000040733) - 0.0001067848 * i},
  };
  std::vector<Row> table12{
      {Complex(-0.000181717560) - 0.000000000182 * i,
       Complex(-0.000000016511) + 0.000000999864 * i},
      {Complex(-0.000181717560) + 0.000000000182 * i,
       Complex(-0.000000016511) - 0.000000999864 * i},
      {Complex(0.000090858627) + 0.000157362584 * i,
       Complex(0.000000008136) + 0.000000985770 * i},
      {Complex(0.000090858627) - 0.000157362584 * i,
       Complex(0.000000008136) - 0.000000985770 * i},
      {Complex(0.000090858942) - 0.000157362403 * i,
       Complex(0.000000008372) + 0.000001014366 * i},
      {Complex(0.000090858942) + 0.000157362403 * i,
       Complex(0.000000008372) - 0.000001014366 * i},
  };
  sweep("1e-8", table8, 1e-9);
  sweep("1e-12", table12, 1e-11);
}

void criterion8(Criterion& c) {
  struct Case {
    std::string tag;
    System sys;
    Point at;
    double theta;
  };
  std::vector<Case> cases{
      {"example 2", example2(), origin(2), 1e-8},
      {"intro", intro_system(), origin(2), 1e-8},
      {"system (b)", twelve_b(), origin(2), 1e-8},
      {"system (c)", twelve_c(), origin(3), 1e-8},
  };

  // jet invariance at depth+1, and closedness of every emitted functional
  for (const auto& k : cases) {
    MultiplicityStructure full = multiplicity_structure(k.sys, k.at, k.theta);
    System jet = jet_truncate(k.sys, k.at, full.depth + 1);
    MultiplicityStructure trunc = multiplicity_structure(jet, k.at, k.theta);
    bool same = trunc.multiplicity == full.multiplicity &&
                trunc.hilbert == full.hilbert &&
                trunc.breadth == full.breadth && trunc.depth == full.depth;
    c.require(same, k.tag + ": jet at depth+1 changed the structure");

    MacaulayMatrix sd = build_macaulay(k.sys, k.at, full.depth);
    double bound = 100.0 * k.theta * inf_norm(sd.m);
    for (const auto& f : full.dual_basis) {
      double resid = closedness_residual(f, k.sys, k.at).max_residual;
      c.require(resid < bound, k.tag + ": closedness residual " + fmt(resid) +
                                   " >= " + fmt(bound));
    }
  }

  // trig system functionals at theta = 1e-12 obey the same closedness bound
  {
    System sys = trig3();
    DeflationChain chain = depth_deflate(
        sys, {Complex(1.001), Complex(1.999), Complex(3.001)});
    MultiplicityStructure ms = multiplicity_structure(sys, chain.zero, 1e-12);
    MacaulayMatrix sd = build_macaulay(sys, chain.zero, ms.depth);
    double bound = 100.0 * ms.theta * inf_norm(sd.m);
    for (const auto& f : ms.dual_basis) {
      double resid = closedness_residual(f, sys, chain.zero).max_residual;
      c.require(resid < bound, "trig system closedness residual " + fmt(resid));
    }

    // deflation invariants: stage count under the depth, live anchors at
    // every block opening a stage
    c.require(chain.stages <= ms.depth, "trig stages exceed the depth");
    DeflationChain cube = depth_deflate(
        expcube(), {Complex(0.31), Complex(-0.31), Complex(0.01)});
    c.require(cube.stages <= 5, "exp-cube stages exceed the depth");
    for (const DeflationChain* ch : {&chain, &cube})
      for (int j = 0; (1 << j) + 1 <= (1 << ch->stages); ++j) {
        size_t idx = static_cast<size_t>((1 << j) + 1 - 2);
        double n2 = 0.0;
        for (const auto& v : ch->anchors[idx]) n2 += std::norm(v);
        c.require(std::sqrt(n2) > 1e-8,
                  "deflation anchor block " + std::to_string((1 << j) + 1) +
                      " is numerically zero");
      }
  }

  // exact-rank oracle: rational nullity equals the numerical one at every
  // order for the polynomial systems
  struct PolyCase {
    std::string tag;
    System sys;
    Point at;
    int top;
  };
  std::vector<PolyCase> polys{
      {"example 2", example2(), origin(2), 3},
      {"system (c)", twelve_c(), origin(3), 12},
      {"x^2,y^2", parse_system("vars x y\nx^2\ny^2\n"), origin(2), 3},
  };
  for (const auto& p : polys)
    for (int alpha = 1; alpha <= p.top; ++alpha) {
      MacaulayMatrix s = build_macaulay(p.sys, p.at, alpha);
      int numeric = numerical_kernel(s.m, 1e-8).dimension();
      int exact = exact_integer_nullity(s.m);
      c.require(numeric == exact,
                p.tag + " S_" + std::to_string(alpha) + " nullity " +
                    std::to_string(numeric) + " != exact " +
                    std::to_string(exact));
    }
  MultiplicityStructure squares = multiplicity_structure(
      parse_system("vars x y\nx^2\ny^2\n"), origin(2), 1e-8);
  check_structure(c, "x^2,y^2", squares, 4, {1, 2, 1, 0}, 2, 2);

  // numerical kernels against the SVD oracle on planted spectra
  std::mt19937_64 rng(777);
  for (int trial = 0; trial < 20; ++trial) {
    int cols = 5 + static_cast<int>(rng() % 4);
    int rows = cols + 2 + static_cast<int>(rng() % 5);
    int small = static_cast<int>(rng() % 4);
    std::vector<double> sigmas;
    for (int s = 0; s < cols - small; ++s)
      sigmas.push_back(0.01 * std::pow(10.0, static_cast<double>(rng() % 3)));
    for (int s = 0; s < small; ++s)
      sigmas.push_back(1e-12 * std::pow(10.0, -static_cast<double>(rng() % 3)));
    auto planted = planted_matrix(rows, cols, sigmas, rng);
    KernelBasis kb = numerical_kernel(planted.a, 1e-6);
    Eigen::MatrixXcd oracle = svd_kernel(planted.a, 1e-6);
    c.require(kb.dimension() == small && oracle.cols() == small,
              "trial " + std::to_string(trial) + " kernel dimension " +
                  std::to_string(kb.dimension()) + " vs planted " +
                  std::to_string(small));
    if (kb.dimension() == small && small > 0) {
      double angle = subspace_angle(kb.z, oracle);
      c.require(angle < 1e-6,
                "trial " + std::to_string(trial) + " kernel angle " +
                    fmt(angle));
    }
  }

  // the word algebra: Psi turns {2} into {2,2} + {3}, exactly
  FunctionalCombo rho1{{Word{2}, Complex(1.0)}};
  FunctionalCombo rho2 = psi_apply(rho1);
  FunctionalCombo want{{Word{2, 2}, Complex(1.0)}, {Word{3}, Complex(1.0)}};
  c.require(rho2 == want, "Psi({2}) expansion is wrong");

  // plain Gauss-Newton on a regular zero
  System simple = parse_system("vars x y\nx^2 - 1\n(x - 1)*y\n");
  GaussNewtonReport gn =
      gauss_newton(simple, {Complex(-1.2), Complex(-0.1)});
  c.require(gn.converged && gn.iterations <= 8 &&
                gn.residuals.back() < 1e-14,
            "simple zero took " + std::to_string(gn.iterations) +
                " iterations to residual " + fmt(gn.residuals.back()));
}

}  // namespace

int main() {
  struct Entry {
    int number;
    std::string title;
    std::function<void(Criterion&)> body;
  };
  std::vector<Entry> entries{
      {1, "worked quadratic system golden structure", criterion1},
      {2, "intro system multiplicity twelve", criterion2},
      {3, "deceptive pair both of multiplicity twelve", criterion3},
      {4, "trig system: stall, one deflation stage, fine structure", criterion4},
      {5, "exponential cube: three stages to the exact zero", criterion5},
      {6, "breadth-one family depth/multiplicity table", criterion6},
      {7, "perturbed cluster matches the tabulated six zeros", criterion7},
      {8, "property suite", criterion8},
  };

  int failed = 0;
  for (const auto& e : entries) {
    Criterion c;
    try {
      e.body(c);
    } catch (const std::exception& ex) {
      c.problems.push_back(std::string("exception: ") + ex.what());
    }
    if (c.problems.empty()) {
      std::cout << "PASS criterion " << e.number << ": " << e.title << "\n";
    } else {
      ++failed;
      std::cout << "FAIL criterion " << e.number << ": " << e.title;
      for (const auto& p : c.problems) std::cout << " | " << p;
      std::cout << "\n";
    }
  }
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
