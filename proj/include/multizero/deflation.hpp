#pragma once

#include "multizero/words.hpp"

namespace multizero {

// One equation block of a deflated system.  Analytic blocks hold the t
// equations Phi_W f expanded into directional-derivative words whose
// letters are block indices; linear blocks hold the bordering rows
// R_stage * (shifted tail) - rhs.
struct DeflationBlock {
  enum class Kind { Analytic, Linear };
  Kind kind = Kind::Analytic;
  std::vector<int> phi_word;  // applied Phi stages, descending

  FunctionalCombo terms;  // analytic only

  int stage = 0;        // linear only: which R matrix
  int offset = 0;       // linear only: block-index shift from later Phi's
  bool has_rhs = false;  // linear only: subtract e1 (only the undifferentiated row)
};

// The expanded system f_sigma of the depth-deflation process, kept in
// structural form: evaluation and Jacobian go through jet directional
// derivatives of the base system, never through symbolic expansion.
class DeflatedSystem {
 public:
  DeflatedSystem() = default;  // empty placeholder, only assignment is valid
  explicit DeflatedSystem(System base);

  int stage() const { return stage_; }
  int num_groups() const { return 1 << stage_; }  // variable blocks
  int base_vars() const { return base_.num_vars(); }
  int total_vars() const { return num_groups() * base_.num_vars(); }
  int total_eqs() const;
  const System& base() const { return base_; }
  const std::vector<Eigen::MatrixXcd>& r_matrices() const { return r_; }
  const std::vector<DeflationBlock>& blocks() const { return blocks_; }

  // Grows the chain by one stage with the given bordering matrix
  // (rows = Jacobian nullity, cols = current total_vars()).
  void push_stage(const Eigen::MatrixXcd& r);

  Eigen::VectorXcd eval(const Eigen::VectorXcd& x) const;
  Eigen::MatrixXcd jacobian(const Eigen::VectorXcd& x) const;

 private:
  System base_;
  int stage_ = 0;
  std::vector<Eigen::MatrixXcd> r_;
  std::vector<DeflationBlock> blocks_;
};

struct GaussNewtonReport {
  Point x;
  int iterations = 0;
  bool converged = false;
  std::vector<double> residuals;  // 2-norms, starting with the initial point
  std::vector<double> steps;      // accepted step norms
};

GaussNewtonReport gauss_newton(const System& sys, const Point& x0,
                               double tol = 1e-12, int max_iter = 100);
GaussNewtonReport gauss_newton(const DeflatedSystem& ds, const Point& x0,
                               double tol = 1e-12, int max_iter = 100);

struct ConditionEstimate {
  double kappa = 0.0;   // 1/sigma_min, or infinite
  bool infinite = false;
  double sigma_min = 0.0;
  double residual = 0.0;        // ||f(x)||_2
  double error_estimate = 0.0;  // kappa * residual
};

ConditionEstimate condition_number(const System& sys, const Point& at,
                                   double theta_j = 1e-6,
                                   std::uint64_t seed = kDefaultSeed);
ConditionEstimate condition_number(const DeflatedSystem& ds, const Point& at,
                                   double theta_j = 1e-6,
                                   std::uint64_t seed = kDefaultSeed);

struct DeflateStepResult {
  DeflatedSystem system;
  Point start;  // previous point with the solved tail appended
  Eigen::MatrixXcd r;
};

// One deflation step: measures the Jacobian nullity at the point, draws the
// random bordering matrix, and solves the bordered system for the unique
// tail start values.  Redraws R up to three times if the border is bad.
DeflateStepResult deflate_step(const DeflatedSystem& ds, const Point& at,
                               double theta_j, std::uint64_t seed);

struct DeflationChain {
  int stages = 0;
  std::uint64_t seed = 0;
  Point zero;           // refined first block
  Point full_zero;      // all blocks of the final system
  double residual = 0.0;           // base system at `zero`
  double deflated_residual = 0.0;  // final system at `full_zero`
  ConditionEstimate condition;     // of the final deflated system
  std::vector<std::vector<int>> functional_words;  // descending Phi words
  std::vector<FunctionalCombo> induced_combos;
  std::vector<DualFunctional> induced_functionals;
  std::vector<Point> anchors;  // blocks 2 .. 2^sigma of full_zero
  std::vector<GaussNewtonReport> stage_reports;
  DeflatedSystem system;
};

// Alternates Gauss-Newton refinement with deflation steps until the
// expanded system is regular at its zero, then reports the refined first
// block together with the induced dual functionals.
DeflationChain depth_deflate(const System& sys, const Point& x0,
                             double theta_j = 1e-6, double tol = 1e-12,
                             std::uint64_t seed = kDefaultSeed,
                             int stage_cap = 8, int known_depth = -1);

struct ClusterZero {
  Point zero;
  double residual = 0.0;
  int hits = 0;  // how many starts converged to it
};

// Random-start Gauss-Newton sweep over a polydisc; returns the distinct
// converged zeros inside the ball, deterministically ordered.
std::vector<ClusterZero> cluster_search(const System& sys, const Point& center,
                                        double radius, int n_starts,
                                        double tol = 1e-10,
                                        std::uint64_t seed = kDefaultSeed);

}  // namespace multizero
