#include "multizero/numrank.hpp"

#include <limits>
#include <stdexcept>

namespace multizero {

namespace {

Eigen::VectorXcd random_unit_vector(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::VectorXcd v(n);
  do {
    for (int i = 0; i < n; ++i) v(i) = Complex(nd(rng), nd(rng));
  } while (v.norm() == 0.0);
  v.normalize();
  return v;
}

double relative_change(double cur, double prev) {
  double denom = std::max(prev, std::numeric_limits<double>::min());
  return std::abs(cur - prev) / denom;
}

// Rotation sending (a, b) to (r, 0) with r real and nonnegative:
// apply_rows computes (conj(c) u + conj(s) v, -s u + c v).
struct Givens {
  Complex c{1.0, 0.0};
  Complex s{0.0, 0.0};
};

Givens make_givens(Complex a, Complex b) {
  Givens g;
  double r = std::sqrt(std::norm(a) + std::norm(b));
  if (r == 0.0) return g;
  g.c = a / r;
  g.s = b / r;
  return g;
}

using RowRef = Eigen::Ref<Eigen::RowVectorXcd, 0, Eigen::InnerStride<>>;

void rotate_rows(const Givens& g, RowRef u, RowRef v) {
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    Complex a = u(j), b = v(j);
    u(j) = std::conj(g.c) * a + std::conj(g.s) * b;
    v(j) = -g.s * a + g.c * b;
  }
}

// Columns of Q transform with the adjoint rotation so that Q W is invariant.
void rotate_q_cols(const Givens& g, Eigen::MatrixXcd& q, int cu, int cv) {
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    Complex a = q(i, cu), b = q(i, cv);
    q(i, cu) = g.c * a + g.s * b;
    q(i, cv) = -std::conj(g.s) * a + std::conj(g.c) * b;
  }
}

void orthogonalize_against(const Eigen::MatrixXcd& z, Eigen::VectorXcd& v) {
  for (int pass = 0; pass < 2; ++pass)
    for (int c = 0; c < z.cols(); ++c) v -= z.col(c) * (z.col(c).adjoint() * v);
}

}  // namespace

NullVectorResult null_vector_iterate(const Eigen::MatrixXcd& a,
                                     const Eigen::VectorXcd& u0, double theta,
                                     int max_iter) {
  if (u0.size() != a.cols()) throw std::invalid_argument("null_vector_iterate: size mismatch");
  if (u0.norm() == 0.0) throw std::invalid_argument("null_vector_iterate: zero start vector");

  // max(1, .) guards the degenerate all-zero matrix; any positive weight on
  // the normalization row is admissible.
  const double w = std::max(1.0, inf_norm(a));
  Eigen::VectorXcd u = u0;

  NullVectorResult best;
  best.u = u0.normalized();
  best.sigma = (a * best.u).norm();

  double prev = -1.0, prev2 = -1.0;
  for (int k = 1; k <= max_iter; ++k) {
    Eigen::MatrixXcd b(a.rows() + 1, a.cols());
    b.row(0) = 2.0 * w * u.adjoint();
    b.bottomRows(a.rows()) = a;
    Eigen::VectorXcd rhs(a.rows() + 1);
    rhs(0) = Complex(w * (u.squaredNorm() - 1.0), 0.0);
    rhs.tail(a.rows()) = a * u;

    Eigen::VectorXcd step = b.colPivHouseholderQr().solve(rhs);
    u -= step;
    double un = u.norm();
    if (un == 0.0) break;  // degenerate; fall back to best seen
    double sigma = (a * u).norm() / un;

    best.iterations = k;
    if (sigma < best.sigma) {
      best.u = u / un;
      best.sigma = sigma;
    }

    bool small_step = step.norm() <= 1e-3 * theta;
    bool stagnant = prev >= 0.0 && prev2 >= 0.0 &&
                    relative_change(sigma, prev) <= 0.1 &&
                    relative_change(prev, prev2) <= 0.1;
    if (small_step || stagnant) {
      best.u = u / un;
      best.sigma = sigma;
      best.converged = true;
      return best;
    }
    prev2 = prev;
    prev = sigma;
  }
  return best;  // converged stays false
}

namespace {

// Up to three random restarts; returns as soon as a converged run certifies
// a vector below the acceptance bound.
NullVectorResult hunt_once(const Eigen::MatrixXcd& a, double theta,
                           double accept, std::mt19937_64& rng) {
  NullVectorResult best;
  bool have = false;
  for (int attempt = 0; attempt < 3; ++attempt) {
    Eigen::VectorXcd u0 = random_unit_vector(rng, static_cast<int>(a.cols()));
    NullVectorResult res = null_vector_iterate(a, u0, theta);
    if (!have || res.sigma < best.sigma) {
      best = res;
      have = true;
    }
    if (res.converged && res.sigma <= accept) break;
  }
  return best;
}

}  // namespace

KernelBasis numerical_kernel(const Eigen::MatrixXcd& a, double theta,
                             std::uint64_t seed) {
  if (theta <= 0.0) throw std::invalid_argument("numerical_kernel: theta must be positive");
  const int n = static_cast<int>(a.cols());
  const double scale = std::max(1.0, inf_norm(a));
  std::mt19937_64 rng(seed);

  KernelBasis kb;
  kb.theta = theta;
  kb.z = Eigen::MatrixXcd(n, 0);

  Eigen::MatrixXcd stacked = a;
  while (kb.dimension() < n) {
    NullVectorResult best = hunt_once(stacked, theta, theta * scale, rng);
    if (best.sigma > theta * scale) break;
    if (!best.converged) kb.converged = false;

    Eigen::VectorXcd v = best.u;
    orthogonalize_against(kb.z, v);
    double nv = v.norm();
    if (nv < 0.5) throw std::runtime_error("numerical_kernel: dependent null vector");
    v /= nv;

    kb.sigmas.push_back((a * v).norm());
    kb.z.conservativeResize(Eigen::NoChange, kb.dimension() + 1);
    kb.z.col(kb.dimension() - 1) = v;

    Eigen::MatrixXcd grown(stacked.rows() + 1, n);
    grown.row(0) = scale * v.adjoint();
    grown.bottomRows(stacked.rows()) = stacked;
    stacked.swap(grown);
  }
  return kb;
}

KernelState::KernelState(const MacaulayMatrix& s0, double theta,
                         std::uint64_t seed)
    : order_(s0.order),
      theta_(theta),
      num_eqs_(s0.num_eqs),
      nvars_(s0.columns.nvars()),
      macaulay_rows_(s0.rows()),
      norm_s_(inf_norm(s0.m)),
      rng_(seed) {
  if (s0.order != 0) throw std::invalid_argument("KernelState: must start from order 0");
  if (theta <= 0.0) throw std::invalid_argument("KernelState: theta must be positive");

  const int n = s0.cols();
  Eigen::HouseholderQR<Eigen::MatrixXcd> hq(s0.m);
  q_ = hq.householderQ();
  r_ = Eigen::MatrixXcd::Zero(n, n);
  r_ = Eigen::MatrixXcd(hq.matrixQR().topRows(n).triangularView<Eigen::Upper>());
  z_ = Eigen::MatrixXcd(n, 0);

  hunt_new_vectors(std::max(1.0, norm_s_));
}

int KernelState::hunt_new_vectors(double scale) {
  const int n = static_cast<int>(r_.cols());
  int found = 0;
  while (static_cast<int>(z_.cols()) < n) {
    NullVectorResult best = hunt_once(r_, theta_, theta_ * scale, rng_);
    if (best.sigma > theta_ * scale) {
      rejection_ratios_.push_back(best.sigma / scale);
      break;
    }
    if (!best.converged) converged_ = false;

    Eigen::VectorXcd v = best.u;
    orthogonalize_against(z_, v);
    double nv = v.norm();
    if (nv < 0.5) throw std::runtime_error("kernel hunt: dependent null vector");
    v /= nv;

    double cert = (r_ * v).norm();
    prepend_vector_row(v, scale);
    z_.conservativeResize(Eigen::NoChange, z_.cols() + 1);
    z_.col(z_.cols() - 1) = v;
    sigmas_.push_back(cert);
    scales_.push_back(scale);
    ++found;
  }
  return found;
}

void KernelState::prepend_vector_row(const Eigen::VectorXcd& zvec, double weight) {
  const int rold = static_cast<int>(q_.rows());
  const int n = static_cast<int>(r_.cols());

  Eigen::MatrixXcd qn = Eigen::MatrixXcd::Zero(rold + 1, rold + 1);
  qn(0, 0) = Complex(1.0, 0.0);
  qn.block(1, 1, rold, rold) = q_;

  // W rows: 0 is the fresh vector row, 1+p is R row p.  Rotate the fresh
  // row to zero against each pivot in turn.
  Eigen::RowVectorXcd w = weight * zvec.adjoint();
  for (int p = 0; p < n; ++p) {
    if (w(p) == Complex(0.0, 0.0)) continue;
    Givens g = make_givens(r_(p, p), w(p));
    rotate_rows(g, r_.row(p).segment(p, n - p), w.segment(p, n - p));
    rotate_q_cols(g, qn, 1 + p, 0);
  }

  // The emptied row joins the zero block: move its Q column past the pivots.
  Eigen::MatrixXcd qfinal(rold + 1, rold + 1);
  qfinal.leftCols(rold) = qn.rightCols(rold);
  qfinal.col(rold) = qn.col(0);
  q_.swap(qfinal);
}

KernelBasis KernelState::basis() const {
  KernelBasis kb;
  kb.z = z_;
  kb.sigmas = sigmas_;
  kb.theta = theta_;
  kb.converged = converged_;
  return kb;
}

double KernelState::verify(const MacaulayMatrix& s_alpha) const {
  if (s_alpha.order != order_ || s_alpha.rows() != macaulay_rows_ ||
      s_alpha.cols() != r_.cols())
    throw std::invalid_argument("KernelState::verify: matrix does not match state");

  const int mu = static_cast<int>(z_.cols());
  const int rows = mu + macaulay_rows_;
  const int n = static_cast<int>(r_.cols());

  Eigen::MatrixXcd m(rows, n);
  for (int c = 0; c < mu; ++c)
    m.row(mu - 1 - c) = scales_[static_cast<size_t>(c)] * z_.col(c).adjoint();
  m.bottomRows(macaulay_rows_) = s_alpha.m;

  Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(rows, n);
  w.topRows(n) = r_;
  return (m - q_ * w).norm() / std::max(1.0, m.norm());
}

int kernel_expand(KernelState& st, const MacaulayMatrix& sa) {
  if (sa.order != st.order_ + 1)
    throw std::invalid_argument("kernel_expand: order must advance by one");
  if (sa.num_eqs != st.num_eqs_ || sa.columns.nvars() != st.nvars_)
    throw std::invalid_argument("kernel_expand: matrix does not nest the state");

  const int n_old = static_cast<int>(st.r_.cols());
  const int n_new = sa.cols();
  const int dn = n_new - n_old;
  const int mrows_old = st.macaulay_rows_;
  const int qrows_old = static_cast<int>(st.q_.rows());
  const int mac_new = sa.rows() - mrows_old;
  const int rows_new = qrows_old + mac_new;
  if (rows_new - n_old < dn)
    throw std::runtime_error("kernel_expand: stacked matrix has too few rows (underdetermined system)");

  // Column growth: old rows acquire the new-column block F; kernel-vector
  // rows are zero there since prior vectors embed by zero-padding.
  Eigen::MatrixXcd f = Eigen::MatrixXcd::Zero(qrows_old, dn);
  f.bottomRows(mrows_old) = sa.m.block(0, n_old, mrows_old, dn);
  Eigen::MatrixXcd fq = st.q_.adjoint() * f;

  Eigen::MatrixXcd rn = Eigen::MatrixXcd::Zero(n_new, n_new);
  rn.topLeftCorner(n_old, n_old) = st.r_;
  rn.topRightCorner(n_old, dn) = fq.topRows(n_old);

  Eigen::MatrixXcd qb = Eigen::MatrixXcd::Zero(rows_new, rows_new);
  qb.topLeftCorner(qrows_old, qrows_old) = st.q_;
  qb.bottomRightCorner(mac_new, mac_new).setIdentity();

  // Fold each new Macaulay row into the factor.  Its old-column entries are
  // the values f_i(xhat) sitting at j = k; at an approximate zero they are
  // small but not zero, so they are rotated out rather than discarded.
  Eigen::MatrixXcd newrows = sa.m.bottomRows(mac_new);
  for (int rnew = 0; rnew < mac_new; ++rnew) {
    Eigen::RowVectorXcd w = newrows.row(rnew);
    const int qcol = qrows_old + rnew;
    for (int p = 0; p < n_old; ++p) {
      if (w(p) == Complex(0.0, 0.0)) continue;
      Givens g = make_givens(rn(p, p), w(p));
      rotate_rows(g, rn.row(p).segment(p, n_new - p), w.segment(p, n_new - p));
      rotate_q_cols(g, qb, p, qcol);
    }
    newrows.row(rnew) = w;
  }

  // Remaining block under the pivots: [F2; G-tilde] over the new columns.
  const int rb = rows_new - n_old;
  Eigen::MatrixXcd b(rb, dn);
  b.topRows(qrows_old - n_old) = fq.bottomRows(qrows_old - n_old);
  b.bottomRows(mac_new) = newrows.rightCols(dn);

  Eigen::HouseholderQR<Eigen::MatrixXcd> hq(b);
  rn.block(n_old, n_old, dn, dn) =
      Eigen::MatrixXcd(hq.matrixQR().topRows(dn).triangularView<Eigen::Upper>());
  Eigen::MatrixXcd qhat = hq.householderQ();
  Eigen::MatrixXcd blk = qb.rightCols(rb) * qhat;
  qb.rightCols(rb) = blk;

  st.r_.swap(rn);
  st.q_.swap(qb);
  st.order_ = sa.order;
  st.macaulay_rows_ = sa.rows();
  st.norm_s_ = inf_norm(sa.m);
  st.z_.conservativeResize(n_new, Eigen::NoChange);
  st.z_.bottomRows(dn).setZero();

  return st.hunt_new_vectors(std::max(1.0, st.norm_s_));
}

}  // namespace multizero
