#include <random>

#include "doctest.h"
#include "multizero/numrank.hpp"
#include "support/oracles.hpp"

using namespace multizero;
using multizero::testing::planted_matrix;
using multizero::testing::subspace_angle;
using multizero::testing::svd_kernel;

TEST_CASE("null vector iteration walks to the small singular pair") {
  Eigen::MatrixXcd a(2, 2);
  a << 1, 0, 0, 0;
  Eigen::VectorXcd u0(2);
  u0 << 0.6, 0.8;

  NullVectorResult r = null_vector_iterate(a, u0, 1e-8);
  CHECK(r.converged);
  CHECK(std::abs(r.u.norm() - 1.0) < 1e-12);
  CHECK(std::abs(std::abs(r.u(1)) - 1.0) < 1e-10);
  CHECK(r.sigma < 1e-12);

  a(1, 1) = 1e-12;
  NullVectorResult tiny = null_vector_iterate(a, u0, 1e-8);
  CHECK(tiny.sigma == doctest::Approx(1e-12).epsilon(1e-3));
  CHECK(std::abs((a * tiny.u).norm() - tiny.sigma) < 1e-15);
}

TEST_CASE("numerical_kernel counts singular values against theta") {
  Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(3, 3);
  KernelBasis all = numerical_kernel(zero, 1e-8);
  REQUIRE(all.dimension() == 3);
  Eigen::MatrixXcd gram = all.z.adjoint() * all.z;
  CHECK((gram - Eigen::MatrixXcd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);

  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(3, 3);
  d(0, 0) = 1.0;
  d(1, 1) = 1e-3;
  d(2, 2) = 1e-9;
  CHECK(numerical_kernel(d, 1e-6).dimension() == 1);
  CHECK(numerical_kernel(d, 1e-2).dimension() == 2);
  CHECK(numerical_kernel(d, 1e-12).dimension() == 0);
}

TEST_CASE("kernels match the dense SVD oracle on planted spectra") {
  std::mt19937_64 rng(12345);
  const double theta = 1e-6;

  for (int trial = 0; trial < 20; ++trial) {
    int cols = 5 + static_cast<int>(rng() % 4);
    int rows = cols + 2 + static_cast<int>(rng() % 5);
    int small = static_cast<int>(rng() % 4);

    std::vector<double> sigmas;
    for (int i = 0; i < cols - small; ++i)
      sigmas.push_back(0.01 * std::pow(10.0, static_cast<double>(rng() % 3)));
    for (int i = 0; i < small; ++i)
      sigmas.push_back(1e-12 * std::pow(10.0, -static_cast<double>(rng() % 3)));

    auto planted = planted_matrix(rows, cols, sigmas, rng);
    KernelBasis kb = numerical_kernel(planted.a, theta);

    double scale = std::max(1.0, inf_norm(planted.a));
    int expect = 0;
    for (double s : planted.sigmas)
      if (s < theta * scale) ++expect;

    REQUIRE(kb.dimension() == expect);
    REQUIRE(expect == small);
    if (small > 0) {
      Eigen::MatrixXcd oracle = svd_kernel(planted.a, theta);
      REQUIRE(oracle.cols() == small);
      CHECK(subspace_angle(kb.z, oracle) < 1e-6);
    }
    for (double s : kb.sigmas) CHECK(s <= theta * scale);
  }
}

TEST_CASE("incremental kernel factorization tracks the from-scratch result") {
  System sys = parse_system("vars x1 x2\nx1 - x2 + x1^2\nx1 - x2 + x2^2\n");
  Point origin{Complex(0.0), Complex(0.0)};
  auto tables = system_tables(sys, origin, 4);
  const double theta = 1e-8;

  MacaulayMatrix s = build_macaulay(sys, origin, 0, tables);
  KernelState state(s, theta);
  CHECK(state.nullity() == 1);
  CHECK(state.verify(s) < 1e-10);

  std::vector<int> gains;
  for (int order = 1; order <= 3; ++order) {
    s = expand_macaulay(s, sys, origin, tables);
    gains.push_back(kernel_expand(state, s));
    CHECK(state.order() == order);
    CHECK(state.verify(s) < 1e-10);

    KernelBasis fresh = numerical_kernel(s.m, theta);
    REQUIRE(fresh.dimension() == state.nullity());
    CHECK(subspace_angle(state.z(), fresh.z) < 1e-8);
  }
  CHECK(gains == std::vector<int>{1, 1, 0});

  // adoption certificates: every accepted vector passed its threshold
  REQUIRE(state.sigmas().size() == state.scales().size());
  for (size_t i = 0; i < state.sigmas().size(); ++i)
    CHECK(state.sigmas()[i] <= theta * state.scales()[i]);

  // the order that added nothing must have turned down a clear non-candidate
  REQUIRE(!state.rejection_ratios().empty());
  CHECK(state.rejection_ratios().back() > 1e-4);
}
