#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

#include "multizero/macaulay.hpp"

namespace multizero {

inline constexpr std::uint64_t kDefaultSeed = 20240915u;

struct NullVectorResult {
  Eigen::VectorXcd u;   // unit 2-norm
  double sigma = 0.0;   // ||A u||_2 at the final iterate
  bool converged = false;
  int iterations = 0;
};

// Gauss-Newton style iteration for the smallest singular pair: repeatedly
// solves the least-squares system stacking a normalization row on top of A.
// Stops when the step drops below 1e-3*theta, when sigma stagnates (under
// 0.1 relative change over two consecutive steps), or after max_iter steps
// (then converged stays false and the best iterate seen is returned).
NullVectorResult null_vector_iterate(const Eigen::MatrixXcd& a,
                                     const Eigen::VectorXcd& u0,
                                     double theta = 1e-8, int max_iter = 50);

struct KernelBasis {
  Eigen::MatrixXcd z;          // orthonormal columns, in the order found
  std::vector<double> sigmas;  // residual certificate per column
  double theta = 0.0;
  bool converged = true;  // false if some iteration hit max_iter

  int dimension() const { return static_cast<int>(z.cols()); }
};

// All numerical null vectors of A with respect to the relative threshold
// theta: vectors are found one at a time, each previous one stacked on top
// of A with weight max(1, ||A||_inf) so the iteration is pushed into the
// orthogonal complement; stops when the next sigma exceeds the threshold.
KernelBasis numerical_kernel(const Eigen::MatrixXcd& a, double theta,
                             std::uint64_t seed = kDefaultSeed);

// Incrementally maintained QR factorization of the stacked matrix
//
//   M_alpha = [ T Z^H ]      one row per adopted kernel vector, newest on
//             [ S_alpha ]    top, T = diag of the adoption-time weights
//
// with M_alpha = Q [R; O].  Expanding to order alpha+1 reuses the factor:
// prior kernel vectors are zero-padded, the nested S_alpha block keeps its
// rows, new Macaulay rows are folded in by Givens row updates against R
// (their entries in old columns are the near-zero values f_i(xhat), never
// assumed to be exact zeros), and the remaining block gets a Householder
// QR.  New kernel vectors are then hunted on R alone, which is cheap and
// already excludes everything previously adopted.
class KernelState {
 public:
  KernelState(const MacaulayMatrix& s0, double theta,
              std::uint64_t seed = kDefaultSeed);

  int order() const { return order_; }
  int nullity() const { return static_cast<int>(z_.cols()); }
  double theta() const { return theta_; }
  bool converged() const { return converged_; }
  const Eigen::MatrixXcd& z() const { return z_; }
  const Eigen::MatrixXcd& r() const { return r_; }
  const std::vector<double>& sigmas() const { return sigmas_; }
  const std::vector<double>& scales() const { return scales_; }
  // sigma/scale of the best candidate turned down at each order, for
  // threshold-ambiguity diagnostics
  const std::vector<double>& rejection_ratios() const { return rejection_ratios_; }

  KernelBasis basis() const;

  // Relative residual ||M_alpha - Q [R; O]|| / max(1, ||M_alpha||), where
  // M_alpha is rebuilt from s_alpha and the adopted vectors.
  double verify(const MacaulayMatrix& s_alpha) const;

 private:
  friend int kernel_expand(KernelState& state, const MacaulayMatrix& s_alpha);

  int hunt_new_vectors(double scale);
  void prepend_vector_row(const Eigen::VectorXcd& zvec, double weight);

  int order_;
  double theta_;
  bool converged_ = true;
  int num_eqs_;
  int nvars_;
  int macaulay_rows_;
  double norm_s_;
  std::mt19937_64 rng_;
  Eigen::MatrixXcd z_;  // columns oldest-first; stacked rows newest-first
  Eigen::MatrixXcd q_;
  Eigen::MatrixXcd r_;
  std::vector<double> sigmas_;
  std::vector<double> scales_;
  std::vector<double> rejection_ratios_;
};

// Expands the factorization from order s_alpha.order-1 to s_alpha.order and
// returns the number of kernel vectors gained; state.nullity() grows by
// exactly that amount.
int kernel_expand(KernelState& state, const MacaulayMatrix& s_alpha);

}  // namespace multizero
