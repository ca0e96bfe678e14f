#include "multizero/deflation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "multizero/expr.hpp"
#include "multizero/jet.hpp"

namespace multizero {

namespace {

// Regularity test threshold at a Gauss-Newton stall: the iterate then
// carries roughly 1e-4 error, which pollutes small Jacobian singular
// values by a similar amount, so only a coarse spectral gap is meaningful.
constexpr double kStallGapTheta = 0.05;

Eigen::VectorXcd to_vector(const Point& p) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(p.size()));
  for (size_t i = 0; i < p.size(); ++i) v(static_cast<Eigen::Index>(i)) = p[i];
  return v;
}

Point to_point(const Eigen::VectorXcd& v) {
  Point p(static_cast<size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) p[static_cast<size_t>(i)] = v(i);
  return p;
}

Eigen::MatrixXcd jacobian_matrix(const System& sys, const Point& at) {
  auto rows = system_jacobian(sys, at);
  Eigen::MatrixXcd j(sys.num_eqs(), sys.num_vars());
  for (int i = 0; i < sys.num_eqs(); ++i)
    for (int v = 0; v < sys.num_vars(); ++v)
      j(i, v) = rows[static_cast<size_t>(i)][static_cast<size_t>(v)];
  return j;
}

Eigen::VectorXcd random_unit(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::VectorXcd v(n);
  do {
    for (int i = 0; i < n; ++i) v(i) = Complex(nd(rng), nd(rng));
  } while (v.norm() == 0.0);
  v.normalize();
  return v;
}

// Phi_sigma on a word combo: the fresh tail block differentiates the base
// argument (new letter 2^{sigma-1}+1), and each existing letter's block is
// itself a variable that shifts by 2^{sigma-1} under the product rule.
FunctionalCombo phi_apply(const FunctionalCombo& combo, int sigma) {
  const int shift = 1 << (sigma - 1);
  FunctionalCombo out;
  for (const auto& [w, c] : combo) {
    Word grown = w;
    grown.push_back(shift + 1);
    std::sort(grown.begin(), grown.end());
    out[grown] += c;

    for (size_t i = 0; i < w.size(); ++i) {
      if (i > 0 && w[i] == w[i - 1]) continue;  // one hit per distinct letter
      double mult = static_cast<double>(std::count(w.begin(), w.end(), w[i]));
      Word repl = w;
      repl.erase(repl.begin() + static_cast<std::ptrdiff_t>(i));
      repl.push_back(w[i] + shift);
      std::sort(repl.begin(), repl.end());
      out[repl] += c * mult;
    }
  }
  return out;
}

}  // namespace

DeflatedSystem::DeflatedSystem(System base) : base_(std::move(base)) {
  if (base_.num_eqs() < base_.num_vars())
    throw std::invalid_argument("DeflatedSystem: need at least as many equations as variables");
  DeflationBlock b;
  b.kind = DeflationBlock::Kind::Analytic;
  b.terms.emplace(Word{}, Complex(1.0, 0.0));
  blocks_.push_back(std::move(b));
}

int DeflatedSystem::total_eqs() const {
  int n = 0;
  for (const auto& b : blocks_)
    n += b.kind == DeflationBlock::Kind::Analytic
             ? base_.num_eqs()
             : static_cast<int>(r_[static_cast<size_t>(b.stage - 1)].rows());
  return n;
}

void DeflatedSystem::push_stage(const Eigen::MatrixXcd& r) {
  if (r.cols() != total_vars())
    throw std::invalid_argument("push_stage: R column count must match the variable count");
  if (r.rows() < 1) throw std::invalid_argument("push_stage: R needs at least one row");

  const int sigma = stage_ + 1;
  std::vector<DeflationBlock> next = blocks_;
  for (const auto& b : blocks_) {
    DeflationBlock nb;
    nb.phi_word = b.phi_word;
    nb.phi_word.insert(nb.phi_word.begin(), sigma);
    nb.kind = b.kind;
    if (b.kind == DeflationBlock::Kind::Analytic) {
      nb.terms = phi_apply(b.terms, sigma);
    } else {
      nb.stage = b.stage;
      nb.offset = b.offset + (1 << (sigma - 1));
      nb.has_rhs = false;
    }
    next.push_back(std::move(nb));
  }
  DeflationBlock lin;
  lin.kind = DeflationBlock::Kind::Linear;
  lin.stage = sigma;
  lin.offset = 0;
  lin.has_rhs = true;
  next.push_back(std::move(lin));

  blocks_ = std::move(next);
  r_.push_back(r);
  stage_ = sigma;
}

namespace {

// Splits the stacked variable vector into 1-based blocks and the
// letter-to-direction binding used by the word combos.
struct BlockView {
  std::vector<Point> xb;    // xb[1] .. xb[groups]
  std::vector<Point> dirs;  // dirs[letter] for letters >= 2
};

BlockView split_blocks(const Eigen::VectorXcd& x, int groups, int s) {
  BlockView bv;
  bv.xb.assign(static_cast<size_t>(groups) + 1, Point());
  for (int k = 1; k <= groups; ++k) {
    Point p(static_cast<size_t>(s));
    for (int v = 0; v < s; ++v) p[static_cast<size_t>(v)] = x((k - 1) * s + v);
    bv.xb[static_cast<size_t>(k)] = std::move(p);
  }
  bv.dirs = bv.xb;
  bv.dirs[0].clear();
  if (groups >= 1) bv.dirs[1].clear();
  return bv;
}

}  // namespace

Eigen::VectorXcd DeflatedSystem::eval(const Eigen::VectorXcd& x) const {
  if (x.size() != total_vars())
    throw std::invalid_argument("DeflatedSystem::eval: point size mismatch");
  const int s = base_.num_vars();
  BlockView bv = split_blocks(x, num_groups(), s);

  Eigen::VectorXcd out(total_eqs());
  int row = 0;
  for (const auto& b : blocks_) {
    if (b.kind == DeflationBlock::Kind::Analytic) {
      for (int i = 0; i < base_.num_eqs(); ++i)
        out(row++) = apply_combo(b.terms, *base_.equations[static_cast<size_t>(i)],
                                 bv.xb[1], bv.dirs);
    } else {
      const Eigen::MatrixXcd& r = r_[static_cast<size_t>(b.stage - 1)];
      const int half = 1 << (b.stage - 1);
      Eigen::VectorXcd tail(half * s);
      for (int k = 1; k <= half; ++k)
        for (int v = 0; v < s; ++v)
          tail((k - 1) * s + v) = bv.xb[static_cast<size_t>(half + k + b.offset)][static_cast<size_t>(v)];
      Eigen::VectorXcd val = r * tail;
      if (b.has_rhs) val(0) -= Complex(1.0, 0.0);
      out.segment(row, r.rows()) = val;
      row += static_cast<int>(r.rows());
    }
  }
  return out;
}

Eigen::MatrixXcd DeflatedSystem::jacobian(const Eigen::VectorXcd& x) const {
  if (x.size() != total_vars())
    throw std::invalid_argument("DeflatedSystem::jacobian: point size mismatch");
  const int s = base_.num_vars();
  BlockView bv = split_blocks(x, num_groups(), s);

  Eigen::MatrixXcd j = Eigen::MatrixXcd::Zero(total_eqs(), total_vars());
  int row = 0;
  for (const auto& b : blocks_) {
    if (b.kind == DeflationBlock::Kind::Analytic) {
      for (int i = 0; i < base_.num_eqs(); ++i) {
        const Expression& f = *base_.equations[static_cast<size_t>(i)];
        for (const auto& [w, c] : b.terms) {
          std::vector<Point> base_dirs;
          base_dirs.reserve(w.size() + 1);
          for (int letter : w) base_dirs.push_back(bv.dirs[static_cast<size_t>(letter)]);

          Point unit(static_cast<size_t>(s), Complex(0.0, 0.0));
          for (int v = 0; v < s; ++v) {
            unit[static_cast<size_t>(v)] = Complex(1.0, 0.0);
            std::vector<Point> dirs = base_dirs;
            dirs.push_back(unit);
            j(row, v) += c * directional_derivative(f, bv.xb[1], dirs);
            unit[static_cast<size_t>(v)] = Complex(0.0, 0.0);
          }

          for (size_t p = 0; p < w.size(); ++p) {
            if (p > 0 && w[p] == w[p - 1]) continue;
            double mult = static_cast<double>(std::count(w.begin(), w.end(), w[p]));
            std::vector<Point> reduced;
            reduced.reserve(w.size());
            bool dropped = false;
            for (size_t q = 0; q < w.size(); ++q) {
              if (!dropped && w[q] == w[p]) {
                dropped = true;
                continue;
              }
              reduced.push_back(bv.dirs[static_cast<size_t>(w[q])]);
            }
            const int col0 = (w[p] - 1) * s;
            for (int v = 0; v < s; ++v) {
              unit[static_cast<size_t>(v)] = Complex(1.0, 0.0);
              std::vector<Point> dirs = reduced;
              dirs.push_back(unit);
              j(row, col0 + v) += c * mult * directional_derivative(f, bv.xb[1], dirs);
              unit[static_cast<size_t>(v)] = Complex(0.0, 0.0);
            }
          }
        }
        ++row;
      }
    } else {
      const Eigen::MatrixXcd& r = r_[static_cast<size_t>(b.stage - 1)];
      const int half = 1 << (b.stage - 1);
      for (int k = 1; k <= half; ++k) {
        const int col0 = (half + k + b.offset - 1) * s;
        j.block(row, col0, r.rows(), s) = r.middleCols((k - 1) * s, s);
      }
      row += static_cast<int>(r.rows());
    }
  }
  return j;
}

namespace {

template <class Model>
GaussNewtonReport gn_core(const Model& model, const Eigen::VectorXcd& x0,
                          double tol, int max_iter) {
  GaussNewtonReport rep;
  Eigen::VectorXcd x = x0;
  Eigen::VectorXcd fx = model.eval(x);
  double res = fx.norm();
  rep.residuals.push_back(res);
  if (res == 0.0) {
    rep.converged = true;
    rep.x = to_point(x);
    return rep;
  }

  for (int it = 1; it <= max_iter; ++it) {
    Eigen::MatrixXcd j = model.jac(x);
    Eigen::VectorXcd step = j.colPivHouseholderQr().solve(fx);

    double lam = 1.0;
    bool accepted = false;
    Eigen::VectorXcd xn, fn;
    double rn = 0.0;
    for (int h = 0; h <= 10; ++h) {
      xn = x - lam * step;
      fn = model.eval(xn);
      rn = fn.norm();
      if (rn < res) {
        accepted = true;
        break;
      }
      lam *= 0.5;
    }
    if (!accepted) break;  // residual stagnation

    double stepn = lam * step.norm();
    x = xn;
    fx = fn;
    res = rn;
    rep.iterations = it;
    rep.residuals.push_back(res);
    rep.steps.push_back(stepn);
    if (stepn <= tol * (1.0 + x.norm())) {
      rep.converged = true;
      break;
    }
  }
  rep.x = to_point(x);
  return rep;
}

struct SystemModel {
  const System& sys;
  Eigen::VectorXcd eval(const Eigen::VectorXcd& x) const {
    return to_vector(eval_system(sys, to_point(x)));
  }
  Eigen::MatrixXcd jac(const Eigen::VectorXcd& x) const {
    return jacobian_matrix(sys, to_point(x));
  }
};

struct DeflatedModel {
  const DeflatedSystem& ds;
  Eigen::VectorXcd eval(const Eigen::VectorXcd& x) const { return ds.eval(x); }
  Eigen::MatrixXcd jac(const Eigen::VectorXcd& x) const { return ds.jacobian(x); }
};

}  // namespace

GaussNewtonReport gauss_newton(const System& sys, const Point& x0, double tol,
                               int max_iter) {
  if (sys.num_eqs() < sys.num_vars())
    throw std::invalid_argument("gauss_newton: need at least as many equations as variables");
  if (static_cast<int>(x0.size()) != sys.num_vars())
    throw std::invalid_argument("gauss_newton: start point size mismatch");
  return gn_core(SystemModel{sys}, to_vector(x0), tol, max_iter);
}

GaussNewtonReport gauss_newton(const DeflatedSystem& ds, const Point& x0,
                               double tol, int max_iter) {
  if (static_cast<int>(x0.size()) != ds.total_vars())
    throw std::invalid_argument("gauss_newton: start point size mismatch");
  return gn_core(DeflatedModel{ds}, to_vector(x0), tol, max_iter);
}

namespace {

ConditionEstimate condition_from(const Eigen::MatrixXcd& j, double fres,
                                 double theta_j, std::uint64_t seed) {
  ConditionEstimate ce;
  ce.residual = fres;
  KernelBasis kb = numerical_kernel(j, theta_j, seed);
  if (kb.dimension() > 0) {
    ce.infinite = true;
    ce.kappa = std::numeric_limits<double>::infinity();
    ce.sigma_min = kb.sigmas.front();
    ce.error_estimate = std::numeric_limits<double>::infinity();
    return ce;
  }
  std::mt19937_64 rng(seed);
  NullVectorResult res =
      null_vector_iterate(j, random_unit(rng, static_cast<int>(j.cols())), theta_j);
  ce.sigma_min = res.sigma;
  if (res.sigma == 0.0) {
    ce.infinite = true;
    ce.kappa = std::numeric_limits<double>::infinity();
    ce.error_estimate = std::numeric_limits<double>::infinity();
  } else {
    ce.kappa = 1.0 / res.sigma;
    ce.error_estimate = ce.kappa * fres;
  }
  return ce;
}

}  // namespace

ConditionEstimate condition_number(const System& sys, const Point& at,
                                   double theta_j, std::uint64_t seed) {
  double fres = to_vector(eval_system(sys, at)).norm();
  return condition_from(jacobian_matrix(sys, at), fres, theta_j, seed);
}

ConditionEstimate condition_number(const DeflatedSystem& ds, const Point& at,
                                   double theta_j, std::uint64_t seed) {
  Eigen::VectorXcd x = to_vector(at);
  double fres = ds.eval(x).norm();
  return condition_from(ds.jacobian(x), fres, theta_j, seed);
}

DeflateStepResult deflate_step(const DeflatedSystem& ds, const Point& at,
                               double theta_j, std::uint64_t seed) {
  Eigen::VectorXcd x = to_vector(at);
  Eigen::MatrixXcd j = ds.jacobian(x);
  const int nullity = numerical_kernel(j, theta_j, seed).dimension();
  if (nullity == 0)
    throw std::invalid_argument("deflate_step: Jacobian nullity is zero, nothing to deflate");

  const int cols = static_cast<int>(j.cols());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);

  for (int attempt = 0; attempt < 3; ++attempt) {
    Eigen::MatrixXcd r(nullity, cols);
    for (int i = 0; i < nullity; ++i)
      for (int k = 0; k < cols; ++k) r(i, k) = Complex(nd(rng), nd(rng));

    Eigen::MatrixXcd bordered(j.rows() + nullity, cols);
    bordered.topRows(j.rows()) = j;
    bordered.bottomRows(nullity) = r;
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(bordered.rows());
    rhs(j.rows()) = Complex(1.0, 0.0);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(bordered);
    Eigen::VectorXcd diag = qr.matrixR().diagonal();
    double dmax = diag.cwiseAbs().maxCoeff();
    double dmin = diag.cwiseAbs().minCoeff();
    if (dmin <= 0.0 || dmax / dmin > 1e12) continue;  // bad border, redraw

    Eigen::VectorXcd tail = qr.solve(rhs);

    DeflateStepResult out{ds, Point(), r};
    out.system.push_stage(r);
    Point start = at;
    Point tail_pt = to_point(tail);
    start.insert(start.end(), tail_pt.begin(), tail_pt.end());
    out.start = std::move(start);
    return out;
  }
  throw std::runtime_error("deflate_step: bordered matrix stayed ill-conditioned after three draws");
}

DeflationChain depth_deflate(const System& sys, const Point& x0, double theta_j,
                             double tol, std::uint64_t seed, int stage_cap,
                             int known_depth) {
  DeflationChain chain;
  chain.seed = seed;

  DeflatedSystem ds(sys);
  Eigen::VectorXcd x = to_vector(x0);
  std::mt19937_64 seeder(seed);

  while (true) {
    GaussNewtonReport gn = gauss_newton(ds, to_point(x), tol, 100);
    chain.stage_reports.push_back(gn);
    x = to_vector(gn.x);

    Eigen::MatrixXcd j = ds.jacobian(x);
    const double eff = gn.converged ? theta_j : kStallGapTheta;
    const std::uint64_t stage_seed = seeder();
    const int nullity = numerical_kernel(j, eff, stage_seed).dimension();

    if (nullity == 0) {
      if (!gn.converged)
        throw std::runtime_error(
            "depth_deflate: iteration failed to converge although the Jacobian looks regular");
      break;
    }

    if (ds.stage() >= stage_cap)
      throw std::runtime_error("depth_deflate: stage cap exceeded");
    if (known_depth >= 0 && ds.stage() + 1 > known_depth)
      throw std::logic_error("depth_deflate: stage count exceeded the known depth bound");

    DeflateStepResult step = deflate_step(ds, to_point(x), eff, stage_seed);
    ds = std::move(step.system);
    x = to_vector(step.start);
  }

  chain.stages = ds.stage();
  chain.full_zero = to_point(x);
  chain.zero = Point(chain.full_zero.begin(), chain.full_zero.begin() + sys.num_vars());
  chain.residual = to_vector(eval_system(sys, chain.zero)).norm();
  chain.deflated_residual = ds.eval(x).norm();
  chain.condition = condition_number(ds, chain.full_zero, theta_j, seed);

  const int s = sys.num_vars();
  std::vector<Point> dirs(static_cast<size_t>(ds.num_groups()) + 1);
  for (int k = 2; k <= ds.num_groups(); ++k) {
    Point block(static_cast<size_t>(s));
    for (int v = 0; v < s; ++v) block[static_cast<size_t>(v)] = chain.full_zero[static_cast<size_t>((k - 1) * s + v)];
    dirs[static_cast<size_t>(k)] = block;
    chain.anchors.push_back(std::move(block));
  }
  for (const auto& b : ds.blocks()) {
    if (b.kind != DeflationBlock::Kind::Analytic) continue;
    chain.functional_words.push_back(b.phi_word);
    chain.induced_combos.push_back(b.terms);
    chain.induced_functionals.push_back(word_to_partial(b.terms, dirs, chain.zero));
  }
  chain.system = ds;
  return chain;
}

std::vector<ClusterZero> cluster_search(const System& sys, const Point& center,
                                        double radius, int n_starts, double tol,
                                        std::uint64_t seed) {
  if (radius <= 0.0) throw std::invalid_argument("cluster_search: radius must be positive");
  if (n_starts < 1) throw std::invalid_argument("cluster_search: need at least one start");
  if (static_cast<int>(center.size()) != sys.num_vars())
    throw std::invalid_argument("cluster_search: center size mismatch");

  const int s = sys.num_vars();
  std::vector<ClusterZero> zeros;

  for (int k = 0; k < n_starts; ++k) {
    // independent stream per start, so ordering and worker count can't matter
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(k + 1));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Point start = center;
    for (int v = 0; v < s; ++v) {
      double mag = radius * std::sqrt(unif(rng));
      double arg = 2.0 * M_PI * unif(rng);
      start[static_cast<size_t>(v)] += std::polar(mag, arg);
    }

    GaussNewtonReport gn = gauss_newton(sys, start, tol, 50);
    if (!gn.converged) continue;

    double dist2 = 0.0;
    for (int v = 0; v < s; ++v) dist2 += std::norm(gn.x[static_cast<size_t>(v)] - center[static_cast<size_t>(v)]);
    if (std::sqrt(dist2) > radius) continue;

    double res = to_vector(eval_system(sys, gn.x)).norm();
    bool merged = false;
    for (auto& z : zeros) {
      double d2 = 0.0;
      for (int v = 0; v < s; ++v) d2 += std::norm(z.zero[static_cast<size_t>(v)] - gn.x[static_cast<size_t>(v)]);
      if (std::sqrt(d2) < 10.0 * tol) {
        ++z.hits;
        if (res < z.residual) {
          z.zero = gn.x;
          z.residual = res;
        }
        merged = true;
        break;
      }
    }
    if (!merged) zeros.push_back({gn.x, res, 1});
  }

  std::sort(zeros.begin(), zeros.end(), [](const ClusterZero& a, const ClusterZero& b) {
    for (size_t v = 0; v < a.zero.size(); ++v) {
      if (a.zero[v].real() != b.zero[v].real()) return a.zero[v].real() < b.zero[v].real();
      if (a.zero[v].imag() != b.zero[v].imag()) return a.zero[v].imag() < b.zero[v].imag();
    }
    return false;
  });
  return zeros;
}

}  // namespace multizero
