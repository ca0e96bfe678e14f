#include "multizero/report.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"
#include "multizero/expr.hpp"
#include "multizero/macaulay.hpp"

namespace multizero {

namespace {

using nlohmann::json;

json complex_json(const Complex& c) {
  return json{{"re", c.real()}, {"im", c.imag()}};
}

json point_json(const Point& p) {
  json a = json::array();
  for (const Complex& c : p) a.push_back(complex_json(c));
  return a;
}

json functional_json(const DualFunctional& d, int order) {
  json terms = json::array();
  for (const auto& [idx, c] : d.terms) {
    json t;
    t["index"] = idx;
    t["re"] = c.real();
    t["im"] = c.imag();
    terms.push_back(t);
  }
  return json{{"order", order}, {"terms", terms}};
}

std::string fmt_complex(const Complex& c) {
  if (c.imag() == 0.0) return format_double(c.real());
  if (c.real() == 0.0) return format_double(c.imag()) + "i";
  std::string out = "(" + format_double(c.real());
  out += c.imag() < 0.0 ? "-" : "+";
  out += format_double(std::abs(c.imag())) + "i)";
  return out;
}

std::string point_text(const Point& p) {
  std::string out = "(";
  for (size_t i = 0; i < p.size(); ++i) {
    if (i > 0) out += ", ";
    out += fmt_complex(p[i]);
  }
  return out + ")";
}

std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += ",";
    out += std::to_string(v[i]);
  }
  return out;
}

}  // namespace

std::string functional_string(const DualFunctional& d) {
  std::string out;
  for (const auto& [idx, c] : d.terms) {
    std::string coef = fmt_complex(c);
    if (!out.empty()) out += " + ";
    if (coef == "1")
      out += column_label(idx);
    else if (coef == "-1")
      out += "-" + column_label(idx);
    else
      out += coef + "*" + column_label(idx);
  }
  return out.empty() ? "0" : out;
}

std::string structure_json(const MultiplicityStructure& ms) {
  json j;
  j["version"] = kToolVersion;
  j["multiplicity"] = ms.multiplicity;
  j["hilbert"] = ms.hilbert;
  j["breadth"] = ms.breadth;
  j["depth"] = ms.depth;
  j["terminated"] = ms.terminated;
  j["threshold"] = ms.theta;
  j["seed"] = ms.seed;
  json basis = json::array();
  for (size_t i = 0; i < ms.dual_basis.size(); ++i)
    basis.push_back(functional_json(ms.dual_basis[i], ms.basis_orders[i]));
  j["dual_basis"] = basis;
  j["warnings"] = ms.warnings;
  return j.dump(2) + "\n";
}

std::string deflation_json(const DeflationChain& chain, double theta_j,
                           double tol) {
  json j;
  j["version"] = kToolVersion;
  j["stages"] = chain.stages;
  j["seed"] = chain.seed;
  j["theta_j"] = theta_j;
  j["tol"] = tol;
  j["zero"] = point_json(chain.zero);
  j["residual"] = chain.residual;
  j["deflated_residual"] = chain.deflated_residual;
  if (chain.condition.infinite) {
    j["condition"] = "inf";
    j["error_estimate"] = "inf";
  } else {
    j["condition"] = chain.condition.kappa;
    j["error_estimate"] = chain.condition.error_estimate;
  }
  j["functional_words"] = chain.functional_words;
  json anchors = json::array();
  for (const Point& a : chain.anchors) anchors.push_back(point_json(a));
  j["anchors"] = anchors;
  return j.dump(2) + "\n";
}

std::string breadth_one_json(const BreadthOneResult& r, double theta,
                             double tol) {
  json j;
  j["version"] = kToolVersion;
  j["gamma"] = r.gamma;
  j["multiplicity"] = r.gamma + 1;
  std::vector<int> hilbert(static_cast<size_t>(r.gamma) + 1, 1);
  hilbert.push_back(0);
  j["hilbert"] = hilbert;
  j["breadth"] = 1;
  j["depth"] = r.gamma;
  j["terminated"] = true;
  j["threshold"] = theta;
  j["tol"] = tol;
  j["seed"] = r.seed;
  json basis = json::array();
  for (size_t i = 0; i < r.basis.size(); ++i)
    basis.push_back(functional_json(r.basis[i], static_cast<int>(i)));
  j["dual_basis"] = basis;
  j["b"] = point_json(r.b);
  json anchors = json::array();
  for (const Point& a : r.anchors) anchors.push_back(point_json(a));
  j["anchors"] = anchors;
  j["warnings"] = json::array();
  return j.dump(2) + "\n";
}

std::string cluster_json(const std::vector<ClusterZero>& zeros,
                         const Point& center, double radius, int n_starts,
                         double tol, std::uint64_t seed) {
  json j;
  j["version"] = kToolVersion;
  j["seed"] = seed;
  j["tol"] = tol;
  j["radius"] = radius;
  j["n_starts"] = n_starts;
  j["center"] = point_json(center);
  json zs = json::array();
  for (const ClusterZero& z : zeros) {
    json e;
    e["zero"] = point_json(z.zero);
    e["residual"] = z.residual;
    e["hits"] = z.hits;
    zs.push_back(e);
  }
  j["zeros"] = zs;
  return j.dump(2) + "\n";
}

std::string structure_text(const MultiplicityStructure& ms) {
  std::ostringstream out;
  // The trailing zero of the Hilbert function is implied by termination and
  // only clutters the one-line summary; the JSON report keeps the full vector.
  std::vector<int> h = ms.hilbert;
  if (ms.terminated && !h.empty() && h.back() == 0) h.pop_back();
  out << "multiplicity " << ms.multiplicity << ", hilbert " << join_ints(h)
      << ", breadth " << ms.breadth << ", depth " << ms.depth << "\n";
  if (!ms.terminated)
    out << "NOT terminated: the Hilbert function never reached 0 (nonisolated zero?)\n";
  out << "dual basis:\n";
  for (size_t i = 0; i < ms.dual_basis.size(); ++i)
    out << "  order " << ms.basis_orders[i] << ": "
        << functional_string(ms.dual_basis[i]) << "\n";
  for (const std::string& w : ms.warnings) out << "warning: " << w << "\n";
  out << "theta " << format_double(ms.theta) << ", seed " << ms.seed << ", version "
      << kToolVersion << "\n";
  return out.str();
}

std::string deflation_text(const DeflationChain& chain) {
  std::ostringstream out;
  out << "stages " << chain.stages << "\n";
  const auto& names = chain.system.base().variables;
  for (size_t v = 0; v < chain.zero.size(); ++v)
    out << "  " << names[v] << " = " << fmt_complex(chain.zero[v]) << "\n";
  out << "residual " << format_double(chain.residual) << " (deflated system "
      << format_double(chain.deflated_residual) << ")\n";
  if (chain.condition.infinite) {
    out << "condition inf\n";
  } else {
    out << "condition " << format_double(chain.condition.kappa)
        << ", error estimate " << format_double(chain.condition.error_estimate)
        << "\n";
  }
  out << "functional words:";
  for (const auto& w : chain.functional_words) out << " [" << join_ints(w) << "]";
  out << "\n";
  for (size_t a = 0; a < chain.anchors.size(); ++a)
    out << "anchor " << a + 2 << ": " << point_text(chain.anchors[a]) << "\n";
  out << "seed " << chain.seed << ", version " << kToolVersion << "\n";
  return out.str();
}

std::string breadth_one_text(const BreadthOneResult& r) {
  std::ostringstream out;
  out << "multiplicity " << r.gamma + 1 << ", breadth 1, depth " << r.gamma << "\n";
  out << "dual basis:\n";
  for (size_t i = 0; i < r.basis.size(); ++i)
    out << "  rho_" << i << ": " << functional_string(r.basis[i]) << "\n";
  for (size_t a = 1; a < r.anchors.size(); ++a)
    out << "anchor " << a + 1 << ": " << point_text(r.anchors[a]) << "\n";
  out << "b = " << point_text(r.b) << "\n";
  out << "seed " << r.seed << ", version " << kToolVersion << "\n";
  return out.str();
}

std::string cluster_text(const std::vector<ClusterZero>& zeros) {
  std::ostringstream out;
  out << zeros.size() << (zeros.size() == 1 ? " zero" : " zeros") << " found\n";
  for (size_t i = 0; i < zeros.size(); ++i)
    out << "  " << i + 1 << ": " << point_text(zeros[i].zero) << ", residual "
        << format_double(zeros[i].residual) << ", hits " << zeros[i].hits << "\n";
  return out.str();
}

}  // namespace multizero
