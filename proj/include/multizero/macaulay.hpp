#pragma once

#include <Eigen/Dense>
#include <iosfwd>

#include "multizero/jet.hpp"

namespace multizero {

// All exponents with total degree <= cap, in the canonical graded order,
// with O(1) rank lookups.  Lower caps are prefixes of higher ones, so a
// position is stable as the cap grows.
class IndexOrdering {
 public:
  IndexOrdering(int nvars, int cap);

  int nvars() const { return nvars_; }
  int cap() const { return cap_; }
  int count() const { return static_cast<int>(indices_.size()); }
  int count_up_to(int degree) const;  // how many indices have |j| <= degree
  const MultiIndex& at(int pos) const { return indices_[static_cast<size_t>(pos)]; }
  const std::vector<MultiIndex>& indices() const { return indices_; }
  int position(const MultiIndex& j) const;  // -1 when |j| > cap

 private:
  int nvars_;
  int cap_;
  std::vector<MultiIndex> indices_;
  std::unordered_map<MultiIndex, int, MultiIndexHash> pos_;
};

// The multiplicity matrix of a system at a point, for one truncation order.
// Columns are indexed by differential exponents |j| <= order; rows by
// (shift monomial, equation) pairs with |shift| <= order-1, shift-major.
// The entry at ((k,i), j) is the Taylor coefficient of f_i at exponent j-k,
// zero when j-k has a negative component.  The order-0 matrix is the t x 1
// column of equation values at the point.
struct MacaulayMatrix {
  int order = 0;
  int num_eqs = 0;
  IndexOrdering columns{1, 0};
  IndexOrdering shifts{1, 0};
  Eigen::MatrixXcd m;

  int rows() const { return static_cast<int>(m.rows()); }
  int cols() const { return static_cast<int>(m.cols()); }
  int row_of(int shift_pos, int eq) const { return shift_pos * num_eqs + eq; }
};

MacaulayMatrix build_macaulay(const System& sys, const Point& at, int order,
                              const std::vector<TaylorTable>& tables);
MacaulayMatrix build_macaulay(const System& sys, const Point& at, int order);

// Same matrix as build_macaulay at order prev.order+1; the previous matrix
// is copied verbatim into the upper-left block.
MacaulayMatrix expand_macaulay(const MacaulayMatrix& prev, const System& sys,
                               const Point& at,
                               const std::vector<TaylorTable>& tables);

double inf_norm(const Eigen::MatrixXcd& m);

std::string column_label(const MultiIndex& j);
std::string row_label(const MultiIndex& shift, int eq,
                      const std::vector<std::string>& var_names, const Point& at);
void write_macaulay_csv(const MacaulayMatrix& mm,
                        const std::vector<std::string>& var_names, const Point& at,
                        std::ostream& out);

}  // namespace multizero
