#include "multizero/jet.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace multizero {

int total_degree(const MultiIndex& j) {
  int d = 0;
  for (int v : j) d += v;
  return d;
}

bool graded_index_less(const MultiIndex& a, const MultiIndex& b) {
  int da = total_degree(a), db = total_degree(b);
  if (da != db) return da < db;
  return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

JetSpace::JetSpace(int nvars, int total_cap)
    : nvars_(nvars), total_cap_(total_cap) {
  if (nvars < 1 || total_cap < 0) throw std::invalid_argument("bad jet space");
  build();
}

JetSpace::JetSpace(int nvars, std::vector<int> box)
    : nvars_(nvars), box_(std::move(box)) {
  if (nvars < 1 || static_cast<int>(box_.size()) != nvars)
    throw std::invalid_argument("bad jet space box");
  total_cap_ = 0;
  for (int b : box_) {
    if (b < 0) throw std::invalid_argument("bad jet space box");
    total_cap_ += b;
  }
  build();
}

void JetSpace::build() {
  MultiIndex cur(static_cast<size_t>(nvars_), 0);
  std::function<void(int, int)> rec = [&](int var, int used) {
    if (var == nvars_) {
      indices_.push_back(cur);
      return;
    }
    int hi = total_cap_ - used;
    if (!box_.empty()) hi = std::min(hi, box_[static_cast<size_t>(var)]);
    for (int e = 0; e <= hi; ++e) {
      cur[static_cast<size_t>(var)] = e;
      rec(var + 1, used + e);
    }
    cur[static_cast<size_t>(var)] = 0;
  };
  rec(0, 0);
  std::sort(indices_.begin(), indices_.end(), graded_index_less);
  pos_.reserve(indices_.size() * 2);
  for (size_t p = 0; p < indices_.size(); ++p)
    pos_.emplace(indices_[p], static_cast<int>(p));

  // Product pairs in a fixed scan order; see the class comment.
  int n = size();
  MultiIndex sum(static_cast<size_t>(nvars_));
  for (int a = 0; a < n; ++a) {
    const MultiIndex& ja = indices_[static_cast<size_t>(a)];
    for (int b = 0; b < n; ++b) {
      const MultiIndex& jb = indices_[static_cast<size_t>(b)];
      bool ok = true;
      int tot = 0;
      for (int v = 0; v < nvars_; ++v) {
        sum[static_cast<size_t>(v)] = ja[static_cast<size_t>(v)] + jb[static_cast<size_t>(v)];
        tot += sum[static_cast<size_t>(v)];
        if (!box_.empty() && sum[static_cast<size_t>(v)] > box_[static_cast<size_t>(v)]) ok = false;
      }
      if (!ok || tot > total_cap_) continue;
      auto it = pos_.find(sum);
      if (it != pos_.end()) mul_.push_back({a, b, it->second});
    }
  }
}

int JetSpace::position(const MultiIndex& j) const {
  auto it = pos_.find(j);
  return it == pos_.end() ? -1 : it->second;
}

Jet::Jet(JetSpacePtr space, Complex constant_term) : space_(std::move(space)) {
  c_.assign(static_cast<size_t>(space_->size()), Complex(0.0, 0.0));
  c_[0] = constant_term;  // position 0 is always the zero exponent
}

Complex Jet::coeff(const MultiIndex& j) const {
  int p = space_->position(j);
  if (p < 0) throw std::invalid_argument("exponent outside jet space");
  return c_[static_cast<size_t>(p)];
}

Jet& Jet::operator+=(const Jet& o) {
  if (space_.get() != o.space_.get()) throw std::invalid_argument("jet space mismatch");
  for (size_t p = 0; p < c_.size(); ++p) c_[p] += o.c_[p];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  if (space_.get() != o.space_.get()) throw std::invalid_argument("jet space mismatch");
  for (size_t p = 0; p < c_.size(); ++p) c_[p] -= o.c_[p];
  return *this;
}

Jet& Jet::operator*=(Complex s) {
  for (auto& v : c_) v *= s;
  return *this;
}

Jet operator-(const Jet& a) {
  Jet out = a;
  for (auto& v : out.c_) v = -v;
  return out;
}

Jet operator*(const Jet& x, const Jet& y) {
  if (x.space_.get() != y.space_.get()) throw std::invalid_argument("jet space mismatch");
  Jet out(x.space_, Complex(0.0, 0.0));
  for (const auto& t : x.space_->mul_table())
    out.c_[static_cast<size_t>(t.c)] +=
        x.c_[static_cast<size_t>(t.a)] * y.c_[static_cast<size_t>(t.b)];
  return out;
}

namespace {

// Sums c[k] * (u - u0)^k from the bottom up.  Contributions to a retained
// coefficient only come from k <= its total degree, so the result at any
// exponent does not depend on the truncation order.
Jet compose(const Jet& u, const std::vector<Complex>& c) {
  Jet uhat = u;
  uhat[0] = Complex(0.0, 0.0);
  Jet acc(u.space(), c[0]);
  Jet pw(u.space(), Complex(1.0, 0.0));
  for (size_t k = 1; k < c.size(); ++k) {
    pw = pw * uhat;
    if (c[k] != Complex(0.0, 0.0)) acc += c[k] * pw;
  }
  return acc;
}

int series_len(const Jet& u) { return u.space()->total_cap() + 1; }

}  // namespace

Jet recip(const Jet& u) {
  Complex u0 = u.constant_term();
  if (u0 == Complex(0.0, 0.0)) throw DomainError("division by a series with zero constant term");
  std::vector<Complex> c(static_cast<size_t>(series_len(u)));
  Complex inv = Complex(1.0, 0.0) / u0;
  c[0] = inv;
  for (size_t k = 1; k < c.size(); ++k) c[k] = -c[k - 1] * inv;
  return compose(u, c);
}

Jet sin(const Jet& u) {
  Complex s = std::sin(u.constant_term()), co = std::cos(u.constant_term());
  std::vector<Complex> c(static_cast<size_t>(series_len(u)));
  c[0] = s;
  if (c.size() > 1) c[1] = co;
  for (size_t k = 2; k < c.size(); ++k)
    c[k] = -c[k - 2] / Complex(static_cast<double>(k * (k - 1)), 0.0);
  return compose(u, c);
}

Jet cos(const Jet& u) {
  Complex s = std::sin(u.constant_term()), co = std::cos(u.constant_term());
  std::vector<Complex> c(static_cast<size_t>(series_len(u)));
  c[0] = co;
  if (c.size() > 1) c[1] = -s;
  for (size_t k = 2; k < c.size(); ++k)
    c[k] = -c[k - 2] / Complex(static_cast<double>(k * (k - 1)), 0.0);
  return compose(u, c);
}

Jet tan(const Jet& u) { return sin(u) * recip(cos(u)); }

Jet exp(const Jet& u) {
  std::vector<Complex> c(static_cast<size_t>(series_len(u)));
  c[0] = std::exp(u.constant_term());
  for (size_t k = 1; k < c.size(); ++k)
    c[k] = c[k - 1] / Complex(static_cast<double>(k), 0.0);
  return compose(u, c);
}

Jet log_op(const Jet& u) {
  Complex u0 = u.constant_term();
  if (u0 == Complex(0.0, 0.0)) throw DomainError("log of a series with zero constant term");
  std::vector<Complex> c(static_cast<size_t>(series_len(u)));
  c[0] = std::log(u0);
  if (c.size() > 1) c[1] = Complex(1.0, 0.0) / u0;
  for (size_t k = 2; k < c.size(); ++k)
    c[k] = -c[k - 1] * Complex(static_cast<double>(k - 1), 0.0) /
           (Complex(static_cast<double>(k), 0.0) * u0);
  return compose(u, c);
}

Jet sqrt_op(const Jet& u) {
  Complex u0 = u.constant_term();
  if (u0 == Complex(0.0, 0.0)) throw DomainError("sqrt of a series with zero constant term");
  std::vector<Complex> c(static_cast<size_t>(series_len(u)));
  c[0] = std::sqrt(u0);
  for (size_t k = 1; k < c.size(); ++k)
    c[k] = c[k - 1] * Complex(1.5 - static_cast<double>(k), 0.0) /
           (Complex(static_cast<double>(k), 0.0) * u0);
  return compose(u, c);
}

Jet pow_int(const Jet& u, int n) {
  if (n < 0) throw std::invalid_argument("negative exponent");
  Jet acc(u.space(), Complex(1.0, 0.0));
  for (int k = 0; k < n; ++k) acc = acc * u;
  return acc;
}

namespace {
struct JetCtx {
  JetSpacePtr space;
  const std::vector<Jet>* vars;
  Jet constant(Complex v) const { return Jet(space, v); }
  Jet variable(int idx) const {
    if (idx < 0 || idx >= static_cast<int>(vars->size()))
      throw std::invalid_argument("variable index outside system");
    return (*vars)[static_cast<size_t>(idx)];
  }
};
}  // namespace

TaylorTable::TaylorTable(const Expression& f, const Point& at, int order)
    : order_(order), at_(at) {
  if (order < 0) throw std::invalid_argument("negative truncation order");
  if (at.empty()) throw std::invalid_argument("empty point");
  int s = static_cast<int>(at.size());
  auto space = std::make_shared<const JetSpace>(s, order);
  std::vector<Jet> seeds;
  seeds.reserve(at.size());
  for (int v = 0; v < s; ++v) {
    Jet x(space, at[static_cast<size_t>(v)]);
    if (order >= 1) {
      MultiIndex e(static_cast<size_t>(s), 0);
      e[static_cast<size_t>(v)] = 1;
      x[space->position(e)] = Complex(1.0, 0.0);
    }
    seeds.push_back(std::move(x));
  }
  Jet value = eval_tree<Jet>(f, JetCtx{space, &seeds});
  space_ = std::move(space);
  c_.assign(value.size(), Complex{});
  for (int p = 0; p < value.size(); ++p) c_[static_cast<size_t>(p)] = value[p];
}

Complex TaylorTable::coeff(const MultiIndex& j) const {
  int p = space_->position(j);
  if (p < 0) throw std::invalid_argument("exponent outside table");
  return c_[static_cast<size_t>(p)];
}

TaylorTable taylor_table(const Expression& f, const Point& at, int order) {
  return TaylorTable(f, at, order);
}

std::vector<TaylorTable> system_tables(const System& sys, const Point& at,
                                       int order) {
  if (static_cast<int>(at.size()) != sys.num_vars())
    throw std::invalid_argument("point dimension does not match system");
  std::vector<TaylorTable> out;
  out.reserve(sys.equations.size());
  for (size_t i = 0; i < sys.equations.size(); ++i) {
    try {
      out.emplace_back(*sys.equations[i], at, order);
    } catch (const DomainError& err) {
      throw DomainError(err.what(), static_cast<int>(i));
    }
  }
  return out;
}

Complex directional_derivative(const Expression& f, const Point& at,
                               const std::vector<Point>& directions) {
  if (directions.empty()) return eval_expression(f, at);
  int s = static_cast<int>(at.size());
  std::vector<Point> distinct;
  std::vector<int> mult;
  for (const auto& d : directions) {
    if (static_cast<int>(d.size()) != s)
      throw std::invalid_argument("direction dimension does not match point");
    bool found = false;
    for (size_t r = 0; r < distinct.size(); ++r) {
      if (distinct[r] == d) {
        ++mult[r];
        found = true;
        break;
      }
    }
    if (!found) {
      distinct.push_back(d);
      mult.push_back(1);
    }
  }
  int r = static_cast<int>(distinct.size());
  auto space = std::make_shared<const JetSpace>(r, mult);
  std::vector<Jet> seeds;
  seeds.reserve(at.size());
  for (int v = 0; v < s; ++v) {
    Jet x(space, at[static_cast<size_t>(v)]);
    for (int q = 0; q < r; ++q) {
      MultiIndex e(static_cast<size_t>(r), 0);
      e[static_cast<size_t>(q)] = 1;
      int p = space->position(e);
      if (p >= 0) x[p] += distinct[static_cast<size_t>(q)][static_cast<size_t>(v)];
    }
    seeds.push_back(std::move(x));
  }
  Jet value = eval_tree<Jet>(f, JetCtx{space, &seeds});
  double fact = 1.0;
  for (int m : mult)
    for (int k = 2; k <= m; ++k) fact *= static_cast<double>(k);
  return value.coeff(mult) * fact;
}

System jet_truncate(const System& sys, const Point& at, int order) {
  System out;
  out.variables = sys.variables;
  std::vector<ExprPtr> shifted;
  for (int v = 0; v < sys.num_vars(); ++v) {
    ExprPtr xv = Expression::variable(v);
    Complex c = at[static_cast<size_t>(v)];
    shifted.push_back(c == Complex(0.0, 0.0)
                          ? xv
                          : Expression::binary(BinaryOp::Sub, xv,
                                               Expression::constant(c)));
  }
  auto tables = system_tables(sys, at, order);
  for (const auto& table : tables) {
    ExprPtr sum;
    for (const auto& j : table.space().indices()) {
      Complex c = table.coeff(j);
      if (c == Complex(0.0, 0.0)) continue;
      ExprPtr term;
      for (size_t v = 0; v < j.size(); ++v) {
        if (j[v] == 0) continue;
        ExprPtr f = j[v] == 1 ? shifted[v] : Expression::power(shifted[v], j[v]);
        term = term ? Expression::binary(BinaryOp::Mul, term, f) : f;
      }
      if (c != Complex(1.0, 0.0) || !term) {
        ExprPtr cn = Expression::constant(c);
        term = term ? Expression::binary(BinaryOp::Mul, cn, term) : cn;
      }
      sum = sum ? Expression::binary(BinaryOp::Add, sum, term) : term;
    }
    out.equations.push_back(sum ? sum : Expression::constant(Complex{}));
  }
  return out;
}

std::vector<std::vector<Complex>> system_jacobian(const System& sys,
                                                  const Point& at) {
  auto tables = system_tables(sys, at, 1);
  std::vector<std::vector<Complex>> J;
  J.reserve(tables.size());
  int s = sys.num_vars();
  for (const auto& table : tables) {
    std::vector<Complex> row(static_cast<size_t>(s));
    for (int v = 0; v < s; ++v) {
      MultiIndex e(static_cast<size_t>(s), 0);
      e[static_cast<size_t>(v)] = 1;
      row[static_cast<size_t>(v)] = table.coeff(e);
    }
    J.push_back(std::move(row));
  }
  return J;
}

}  // namespace multizero
