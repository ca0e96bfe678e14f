#include "multizero/dual_space.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "multizero/expr.hpp"

namespace multizero {

int DualFunctional::order() const {
  int o = 0;
  for (const auto& [j, c] : terms) o = std::max(o, total_degree(j));
  return o;
}

Complex DualFunctional::coeff(const MultiIndex& j) const {
  auto it = terms.find(j);
  return it == terms.end() ? Complex(0.0, 0.0) : it->second;
}

DualFunctional kernel_to_dual(const Eigen::VectorXcd& z,
                              const IndexOrdering& ordering, const Point& at) {
  if (z.size() > ordering.count())
    throw std::invalid_argument("kernel_to_dual: vector longer than ordering");
  DualFunctional d;
  d.anchor = at;
  for (int p = 0; p < z.size(); ++p) {
    if (std::abs(z(p)) < kCoeffPrune) continue;
    d.terms.emplace(ordering.at(p), z(p));
  }
  return d;
}

ClosednessReport closedness_residual(const DualFunctional& c, const System& sys,
                                     const Point& at) {
  const int s = sys.num_vars();
  const int order = c.order();
  auto tables = system_tables(sys, at, order);
  IndexOrdering shifts(s, order);

  ClosednessReport rep;
  MultiIndex diff(static_cast<size_t>(s), 0);
  for (int kp = 0; kp < shifts.count(); ++kp) {
    const MultiIndex& k = shifts.at(kp);
    for (int i = 0; i < sys.num_eqs(); ++i) {
      Complex val(0.0, 0.0);
      for (const auto& [j, cj] : c.terms) {
        bool negative = false;
        for (int v = 0; v < s; ++v) {
          diff[static_cast<size_t>(v)] = j[static_cast<size_t>(v)] - k[static_cast<size_t>(v)];
          if (diff[static_cast<size_t>(v)] < 0) negative = true;
        }
        if (negative) continue;
        val += cj * tables[static_cast<size_t>(i)].coeff(diff);
      }
      rep.entries.push_back({k, i, std::abs(val)});
      rep.max_residual = std::max(rep.max_residual, std::abs(val));
    }
  }
  return rep;
}

namespace {

// Reduced row echelon form with partial pivoting; keeps the row span.
void rref_rows(Eigen::MatrixXcd& block, double pivot_tol) {
  const int rows = static_cast<int>(block.rows());
  const int cols = static_cast<int>(block.cols());
  int r = 0;
  for (int lead = 0; lead < cols && r < rows; ++lead) {
    int piv = r;
    double best = std::abs(block(r, lead));
    for (int i = r + 1; i < rows; ++i) {
      double m = std::abs(block(i, lead));
      if (m > best) {
        best = m;
        piv = i;
      }
    }
    if (best <= pivot_tol) continue;
    block.row(r).swap(block.row(piv));
    block.row(r) /= block(r, lead);
    for (int i = 0; i < rows; ++i) {
      if (i == r) continue;
      Complex f = block(i, lead);
      if (f != Complex(0.0, 0.0)) block.row(i) -= f * block.row(r);
    }
    ++r;
  }
}

void orthonormalize_rows(Eigen::MatrixXcd& block) {
  for (int pass = 0; pass < 2; ++pass) {
    for (int r = 0; r < block.rows(); ++r) {
      for (int p = 0; p < r; ++p) {
        Complex proj = block.row(p).dot(block.row(r));
        block.row(r) -= proj * block.row(p);
      }
      double n = block.row(r).norm();
      if (n == 0.0) throw std::runtime_error("dual basis group degenerated");
      block.row(r) /= n;
    }
  }
}

// Rotate each row's global phase so its largest coefficient is positive real.
void canonical_phase(Eigen::MatrixXcd& block) {
  for (int r = 0; r < block.rows(); ++r) {
    double best = 0.0;
    for (int j = 0; j < block.cols(); ++j) best = std::max(best, std::abs(block(r, j)));
    if (best == 0.0) continue;
    for (int j = 0; j < block.cols(); ++j) {
      Complex v = block(r, j);
      if (std::abs(v) >= best * (1.0 - 1e-12)) {
        block.row(r) *= std::conj(v) / std::abs(v);
        break;
      }
    }
  }
}

}  // namespace

MultiplicityStructure multiplicity_structure(const System& sys, const Point& at,
                                             double theta, int max_order,
                                             std::uint64_t seed) {
  if (static_cast<int>(at.size()) != sys.num_vars())
    throw std::invalid_argument("multiplicity_structure: point size mismatch");
  if (theta <= 0.0) throw std::invalid_argument("multiplicity_structure: theta must be positive");
  if (max_order < 1) throw std::invalid_argument("multiplicity_structure: max_order must be >= 1");

  MultiplicityStructure out;
  out.theta = theta;
  out.seed = seed;

  auto tables0 = system_tables(sys, at, 0);
  MacaulayMatrix s_prev = build_macaulay(sys, at, 0, tables0);
  KernelState st(s_prev, theta, seed);
  out.hilbert.push_back(st.nullity());

  if (st.nullity() == 0) {
    out.warnings.push_back("point is not a zero at this threshold; multiplicity 0");
    out.depth = 0;
    return out;
  }

  const MultiIndex zero_idx(static_cast<size_t>(sys.num_vars()), 0);
  double fres = 0.0;
  for (const auto& tab : tables0) fres = std::max(fres, std::abs(tab.coeff(zero_idx)));

  int delta = -1;
  for (int alpha = 1; alpha <= max_order; ++alpha) {
    auto tables = system_tables(sys, at, alpha);
    MacaulayMatrix s_alpha = expand_macaulay(s_prev, sys, at, tables);
    if (alpha == 1 && fres > theta * inf_norm(s_alpha.m))
      out.warnings.push_back(
          "residual at the point exceeds theta times the matrix scale; "
          "refine the zero (deflation) before trusting the structure");
    int nu = kernel_expand(st, s_alpha);
    out.hilbert.push_back(nu);
    s_prev = std::move(s_alpha);
    if (nu == 0) {
      delta = alpha - 1;
      break;
    }
  }
  if (delta < 0) {
    out.terminated = false;
    delta = max_order;
  }
  out.depth = delta;
  out.breadth = out.hilbert.size() > 1 ? out.hilbert[1] : 0;
  out.multiplicity = std::accumulate(out.hilbert.begin(), out.hilbert.end(), 0);

  bool ambiguous = false;
  for (size_t i = 0; i < st.sigmas().size(); ++i) {
    double ratio = st.sigmas()[i] / st.scales()[i];
    ambiguous = ambiguous || (ratio >= 0.1 * theta && ratio <= 10.0 * theta);
  }
  for (double ratio : st.rejection_ratios())
    ambiguous = ambiguous || (ratio >= 0.1 * theta && ratio <= 10.0 * theta);
  if (ambiguous)
    out.warnings.push_back(
        "threshold ambiguity: a singular value ratio lies within a decade of theta");
  if (!st.converged())
    out.warnings.push_back("a null-vector iteration hit its iteration cap");

  const IndexOrdering& ordering = s_prev.columns;
  const int n = static_cast<int>(st.z().rows());
  int col = 0;
  for (size_t alpha = 0; alpha < out.hilbert.size(); ++alpha) {
    const int h = out.hilbert[alpha];
    if (h == 0) continue;
    Eigen::MatrixXcd block(h, n);
    for (int r = 0; r < h; ++r) block.row(r) = st.z().col(col + r).transpose();
    rref_rows(block, 1e-10);
    orthonormalize_rows(block);
    canonical_phase(block);
    for (int r = 0; r < h; ++r) {
      out.dual_basis.push_back(
          kernel_to_dual(block.row(r).transpose(), ordering, at));
      out.basis_orders.push_back(static_cast<int>(alpha));
    }
    col += h;
  }
  return out;
}

}  // namespace multizero
