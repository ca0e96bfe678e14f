#pragma once

#include <memory>
#include <unordered_map>
#include <vector>

#include "multizero/expr.hpp"

namespace multizero {

using MultiIndex = std::vector<int>;

int total_degree(const MultiIndex& j);

// Canonical term order: by total degree, ties broken lexicographically with
// the larger exponent sequence first, e.g. for two variables
// (0,0) (1,0) (0,1) (2,0) (1,1) (0,2) ...
bool graded_index_less(const MultiIndex& a, const MultiIndex& b);

struct MultiIndexHash {
  size_t operator()(const MultiIndex& j) const {
    size_t h = 1469598103934665603ull;
    for (int v : j) {
      h ^= static_cast<size_t>(static_cast<unsigned>(v));
      h *= 1099511628211ull;
    }
    return h;
  }
};

// The index bookkeeping behind a truncated power-series algebra: either all
// exponents with total degree <= cap, or all exponents below a per-variable
// box (used for mixed directional derivatives).  Holds a precomputed list of
// admissible product index pairs in a fixed order; jets multiplied through it
// accumulate coefficients in that order, which keeps low-order coefficients
// identical when the same series is rebuilt at a higher truncation order.
class JetSpace {
 public:
  JetSpace(int nvars, int total_cap);
  JetSpace(int nvars, std::vector<int> box);

  int nvars() const { return nvars_; }
  int size() const { return static_cast<int>(indices_.size()); }
  int total_cap() const { return total_cap_; }
  const MultiIndex& index_at(int pos) const { return indices_[static_cast<size_t>(pos)]; }
  const std::vector<MultiIndex>& indices() const { return indices_; }
  int position(const MultiIndex& j) const;  // -1 when outside the space

  struct MulTriple {
    int a, b, c;  // coefficient positions: out[c] += x[a] * y[b]
  };
  const std::vector<MulTriple>& mul_table() const { return mul_; }

 private:
  void build();

  int nvars_;
  int total_cap_;
  std::vector<int> box_;  // empty means only the total-degree cap applies
  std::vector<MultiIndex> indices_;
  std::unordered_map<MultiIndex, int, MultiIndexHash> pos_;
  std::vector<MulTriple> mul_;
};

using JetSpacePtr = std::shared_ptr<const JetSpace>;

class Jet {
 public:
  Jet() = default;
  Jet(JetSpacePtr space, Complex constant_term);

  const JetSpacePtr& space() const { return space_; }
  int size() const { return static_cast<int>(c_.size()); }
  Complex& operator[](int pos) { return c_[static_cast<size_t>(pos)]; }
  const Complex& operator[](int pos) const { return c_[static_cast<size_t>(pos)]; }
  Complex coeff(const MultiIndex& j) const;
  Complex constant_term() const { return c_.empty() ? Complex{} : c_[0]; }

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(Complex s);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator-(const Jet& a);
  friend Jet operator*(const Jet& x, const Jet& y);
  friend Jet operator*(Jet a, Complex s) { return a *= s; }
  friend Jet operator*(Complex s, Jet a) { return a *= s; }

 private:
  JetSpacePtr space_;
  std::vector<Complex> c_;
};

// Elementary functions; the argument's constant term must be nonzero for
// recip/log/sqrt (the series has a pole or branch point there otherwise).
Jet recip(const Jet& u);
Jet sin(const Jet& u);
Jet cos(const Jet& u);
Jet tan(const Jet& u);
Jet exp(const Jet& u);
Jet log_op(const Jet& u);
Jet sqrt_op(const Jet& u);
Jet pow_int(const Jet& u, int n);
inline Jet div_op(const Jet& a, const Jet& b) { return a * recip(b); }

// All scaled partial derivatives of f at a point up to a total order:
// the entry at exponent j is the Taylor coefficient of (x - at)^j,
// i.e. the j-th mixed partial divided by the factorial of each exponent.
class TaylorTable {
 public:
  TaylorTable(const Expression& f, const Point& at, int order);

  int order() const { return order_; }
  int num_vars() const { return static_cast<int>(at_.size()); }
  const Point& at() const { return at_; }
  // requires |j| <= order and all components nonnegative
  Complex coeff(const MultiIndex& j) const;
  const JetSpace& space() const { return *space_; }
  const std::vector<Complex>& raw() const { return c_; }

 private:
  int order_;
  Point at_;
  JetSpacePtr space_;
  std::vector<Complex> c_;
};

TaylorTable taylor_table(const Expression& f, const Point& at, int order);
std::vector<TaylorTable> system_tables(const System& sys, const Point& at,
                                       int order);

// Mixed directional derivative of f at the point along the given direction
// vectors (unnormalized; repeating a direction raises the derivative order).
// An empty list evaluates f itself.
Complex directional_derivative(const Expression& f, const Point& at,
                               const std::vector<Point>& directions);

// Replaces every equation by its Taylor polynomial of total degree <= order
// about the point; exact-zero coefficients are dropped.
System jet_truncate(const System& sys, const Point& at, int order);

// Jacobian of the system at a point (rows = equations).
std::vector<std::vector<Complex>> system_jacobian(const System& sys,
                                                  const Point& at);

}  // namespace multizero
