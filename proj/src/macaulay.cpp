#include "multizero/macaulay.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "multizero/expr.hpp"

namespace multizero {

namespace {

void enumerate_rec(int nvars, int cap, int var, int used, MultiIndex& cur,
                   std::vector<MultiIndex>& out) {
  if (var == nvars) {
    out.push_back(cur);
    return;
  }
  for (int e = 0; used + e <= cap; ++e) {
    cur[static_cast<size_t>(var)] = e;
    enumerate_rec(nvars, cap, var + 1, used + e, cur, out);
  }
  cur[static_cast<size_t>(var)] = 0;
}

}  // namespace

IndexOrdering::IndexOrdering(int nvars, int cap) : nvars_(nvars), cap_(cap) {
  if (nvars < 1) throw std::invalid_argument("IndexOrdering: need at least one variable");
  if (cap < 0) throw std::invalid_argument("IndexOrdering: negative cap");
  MultiIndex cur(static_cast<size_t>(nvars), 0);
  enumerate_rec(nvars, cap, 0, 0, cur, indices_);
  std::sort(indices_.begin(), indices_.end(), graded_index_less);
  pos_.reserve(indices_.size());
  for (size_t p = 0; p < indices_.size(); ++p)
    pos_.emplace(indices_[p], static_cast<int>(p));
}

int IndexOrdering::count_up_to(int degree) const {
  auto it = std::partition_point(
      indices_.begin(), indices_.end(),
      [degree](const MultiIndex& j) { return total_degree(j) <= degree; });
  return static_cast<int>(it - indices_.begin());
}

int IndexOrdering::position(const MultiIndex& j) const {
  auto it = pos_.find(j);
  return it == pos_.end() ? -1 : it->second;
}

namespace {

void fill_block(MacaulayMatrix& mm, const std::vector<TaylorTable>& tables,
                int shift_from, int col_from) {
  const int s = mm.columns.nvars();
  MultiIndex diff(static_cast<size_t>(s), 0);
  for (int kp = shift_from; kp < mm.shifts.count(); ++kp) {
    const MultiIndex& k = mm.shifts.at(kp);
    for (int jp = col_from; jp < mm.columns.count(); ++jp) {
      const MultiIndex& j = mm.columns.at(jp);
      bool negative = false;
      for (int v = 0; v < s; ++v) {
        diff[static_cast<size_t>(v)] = j[static_cast<size_t>(v)] - k[static_cast<size_t>(v)];
        if (diff[static_cast<size_t>(v)] < 0) negative = true;
      }
      for (int i = 0; i < mm.num_eqs; ++i)
        mm.m(mm.row_of(kp, i), jp) =
            negative ? Complex(0.0, 0.0) : tables[static_cast<size_t>(i)].coeff(diff);
    }
  }
}

}  // namespace

MacaulayMatrix build_macaulay(const System& sys, const Point& at, int order,
                              const std::vector<TaylorTable>& tables) {
  const int s = sys.num_vars();
  const int t = sys.num_eqs();
  if (order < 0) throw std::invalid_argument("build_macaulay: negative order");
  if (static_cast<int>(at.size()) != s)
    throw std::invalid_argument("build_macaulay: point size mismatch");
  if (static_cast<int>(tables.size()) != t ||
      (t > 0 && tables[0].order() < order))
    throw std::invalid_argument("build_macaulay: tables missing or too short");

  MacaulayMatrix mm;
  mm.order = order;
  mm.num_eqs = t;
  mm.columns = IndexOrdering(s, order);
  mm.shifts = IndexOrdering(s, std::max(0, order - 1));
  mm.m.setZero(static_cast<Eigen::Index>(mm.shifts.count()) * t, mm.columns.count());
  fill_block(mm, tables, 0, 0);
  return mm;
}

MacaulayMatrix build_macaulay(const System& sys, const Point& at, int order) {
  return build_macaulay(sys, at, order, system_tables(sys, at, order));
}

MacaulayMatrix expand_macaulay(const MacaulayMatrix& prev, const System& sys,
                               const Point& at,
                               const std::vector<TaylorTable>& tables) {
  const int order = prev.order + 1;
  const int t = sys.num_eqs();
  if (t != prev.num_eqs) throw std::invalid_argument("expand_macaulay: system mismatch");
  if (static_cast<int>(tables.size()) != t ||
      (t > 0 && tables[0].order() < order))
    throw std::invalid_argument("expand_macaulay: tables missing or too short");

  MacaulayMatrix mm;
  mm.order = order;
  mm.num_eqs = t;
  mm.columns = IndexOrdering(sys.num_vars(), order);
  mm.shifts = IndexOrdering(sys.num_vars(), order - 1);
  mm.m.setZero(static_cast<Eigen::Index>(mm.shifts.count()) * t, mm.columns.count());
  mm.m.topLeftCorner(prev.m.rows(), prev.m.cols()) = prev.m;
  fill_block(mm, tables, prev.shifts.count(), 0);
  fill_block(mm, tables, 0, prev.columns.count());
  return mm;
}

double inf_norm(const Eigen::MatrixXcd& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

std::string column_label(const MultiIndex& j) {
  bool wide = false;
  for (int e : j) wide = wide || e > 9;
  std::string label = "d";
  for (size_t v = 0; v < j.size(); ++v) {
    if (wide && v > 0) label += '_';
    label += std::to_string(j[v]);
  }
  return label;
}

namespace {

std::string entry_string(const Complex& z) {
  if (z.imag() == 0.0) return format_double(z.real());
  std::ostringstream os;
  os << format_double(z.real()) << (z.imag() < 0.0 ? '-' : '+')
     << format_double(std::abs(z.imag())) << 'i';
  return os.str();
}

}  // namespace

std::string row_label(const MultiIndex& shift, int eq,
                      const std::vector<std::string>& var_names, const Point& at) {
  std::string label;
  for (size_t v = 0; v < shift.size(); ++v) {
    if (shift[v] == 0) continue;
    if (!label.empty()) label += '*';
    const Complex& c = at[v];
    if (c == Complex(0.0, 0.0)) {
      label += var_names[v];
    } else {
      label += '(' + var_names[v];
      if (c.imag() == 0.0) {
        label += c.real() < 0.0 ? '+' : '-';
        label += format_double(std::abs(c.real()));
      } else {
        label += "-(" + entry_string(c) + ')';
      }
      label += ')';
    }
    if (shift[v] > 1) label += '^' + std::to_string(shift[v]);
  }
  if (!label.empty()) label += ' ';
  label += 'f' + std::to_string(eq + 1);
  return label;
}

void write_macaulay_csv(const MacaulayMatrix& mm,
                        const std::vector<std::string>& var_names, const Point& at,
                        std::ostream& out) {
  out << "row";
  for (int jp = 0; jp < mm.columns.count(); ++jp)
    out << ',' << column_label(mm.columns.at(jp));
  out << '\n';
  for (int kp = 0; kp < mm.shifts.count(); ++kp) {
    for (int i = 0; i < mm.num_eqs; ++i) {
      out << row_label(mm.shifts.at(kp), i, var_names, at);
      for (int jp = 0; jp < mm.columns.count(); ++jp)
        out << ',' << entry_string(mm.m(mm.row_of(kp, i), jp));
      out << '\n';
    }
  }
}

}  // namespace multizero
