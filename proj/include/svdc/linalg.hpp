#pragma once

// Dense SVD by one-sided (Hestenes) Jacobi, rank-k truncation and reconstruction.
// Everything here is header-only and templated on the scalar type; the library
// itself only instantiates double.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "svdc/error.hpp"

namespace svdc {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

struct SvdOptions {
  /// A column pair counts as orthogonal once |a_i . a_j| <= tolerance * |a_i| |a_j|.
  double tolerance = 1e-12;
  int max_sweeps = 60;
  /// sigma_i <= rank_tolerance * sigma_1 is treated as zero when counting the rank.
  double rank_tolerance = 1e-12;
};

/// A = u * diag(sigma) * v^T with p = min(m, n) retained columns.
template <typename Scalar>
struct SvdFactors {
  Matrix<Scalar> u;      // m x p, orthonormal columns
  Vector<Scalar> sigma;  // p, non-increasing, >= 0
  Matrix<Scalar> v;      // n x p, orthonormal columns
  Eigen::Index rank = 0;
  int sweeps = 0;

  Eigen::Index rows() const { return u.rows(); }
  Eigen::Index cols() const { return v.rows(); }
  Eigen::Index size() const { return sigma.size(); }
};

/// Rank-k slice of a factorization. `total_energy` is the squared Frobenius norm of
/// the source matrix, kept so the energy ratio survives truncation.
template <typename Scalar>
struct TruncatedSvd {
  Eigen::Index k = 0;
  Matrix<Scalar> u_k;      // m x k
  Vector<Scalar> sigma_k;  // k
  Matrix<Scalar> v_k;      // n x k
  Eigen::Index source_rows = 0;
  Eigen::Index source_cols = 0;
  double total_energy = 0.0;
};

namespace detail {

template <typename Scalar>
struct Rotation {
  Scalar c;
  Scalar s;
};

// Rotation that zeroes the off-diagonal of [[alpha, gamma], [gamma, beta]].
template <typename Scalar>
Rotation<Scalar> jacobi_rotation(Scalar alpha, Scalar beta, Scalar gamma) {
  const Scalar zeta = (beta - alpha) / (Scalar(2) * gamma);
  Scalar t;
  if (std::abs(zeta) > Scalar(1e150)) {
    t = Scalar(1) / (Scalar(2) * zeta);
  } else {
    const Scalar sign = zeta < Scalar(0) ? Scalar(-1) : Scalar(1);
    t = sign / (std::abs(zeta) + std::sqrt(Scalar(1) + zeta * zeta));
  }
  const Scalar c = Scalar(1) / std::sqrt(Scalar(1) + t * t);
  return {c, c * t};
}

template <typename Scalar>
void rotate_columns(Matrix<Scalar>& a, Eigen::Index i, Eigen::Index j, Rotation<Scalar> r) {
  Scalar* x = a.col(i).data();
  Scalar* y = a.col(j).data();
  const Eigen::Index n = a.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    const Scalar xi = x[k];
    const Scalar yj = y[k];
    x[k] = r.c * xi - r.s * yj;
    y[k] = r.s * xi + r.c * yj;
  }
}

// Fused pass computing |x|^2, |y|^2 and x . y.
template <typename Scalar>
void column_grams(const Matrix<Scalar>& a, Eigen::Index i, Eigen::Index j, Scalar& alpha,
                  Scalar& beta, Scalar& gamma) {
  const Scalar* x = a.col(i).data();
  const Scalar* y = a.col(j).data();
  Scalar sa = 0, sb = 0, sg = 0;
  const Eigen::Index n = a.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    sa += x[k] * x[k];
    sb += y[k] * y[k];
    sg += x[k] * y[k];
  }
  alpha = sa;
  beta = sb;
  gamma = sg;
}

// Projects column `col` of q off the span of columns [0, col), twice.
template <typename Scalar>
void orthogonalize_against_prefix(Matrix<Scalar>& q, Eigen::Index col) {
  if (col == 0) return;
  for (int pass = 0; pass < 2; ++pass) {
    const Vector<Scalar> coeffs = q.leftCols(col).transpose() * q.col(col);
    q.col(col).noalias() -= q.leftCols(col) * coeffs;
  }
}

// Fills columns [first, p) of q with unit vectors orthogonal to everything before
// them. `seed` holds the unnormalized Jacobi columns and `norms` their lengths; a
// seed column is kept when it survives re-orthogonalization, otherwise the standard
// basis vector with the largest residual is used.
template <typename Scalar>
void complete_orthonormal(Matrix<Scalar>& q, Eigen::Index first, const Matrix<Scalar>& seed,
                          const Vector<Scalar>& norms) {
  const Eigen::Index m = q.rows();
  Vector<Scalar> row_sq = q.leftCols(first).rowwise().squaredNorm();
  for (Eigen::Index col = first; col < q.cols(); ++col) {
    bool accepted = false;
    if (norms(col) > Scalar(0)) {
      q.col(col) = seed.col(col) / norms(col);
      orthogonalize_against_prefix(q, col);
      const Scalar len = q.col(col).norm();
      if (len > Scalar(0.5)) {
        q.col(col) /= len;
        accepted = true;
      }
    }
    if (!accepted) {
      Eigen::Index best = 0;
      (Vector<Scalar>::Ones(m) - row_sq).maxCoeff(&best);
      q.col(col).setZero();
      q(best, col) = Scalar(1);
      orthogonalize_against_prefix(q, col);
      q.col(col).normalize();
    }
    row_sq += q.col(col).cwiseAbs2();
  }
}

// Factors a tall (m >= n) matrix.
template <typename Scalar>
SvdFactors<Scalar> jacobi_tall(Matrix<Scalar> work, const SvdOptions& opts) {
  const Eigen::Index m = work.rows();
  const Eigen::Index n = work.cols();
  Matrix<Scalar> v = Matrix<Scalar>::Identity(n, n);
  const Scalar tol = static_cast<Scalar>(opts.tolerance);

  int sweeps = 0;
  bool converged = n < 2;
  double residual = 0.0;
  while (!converged) {
    if (sweeps == opts.max_sweeps) throw NoConvergenceError(sweeps, residual);
    ++sweeps;
    converged = true;
    residual = 0.0;
    // Columns at rounding level relative to the largest one carry no information and
    // are never rotated; otherwise they shrink forever and eventually underflow.
    Scalar max_norm = 0;
    for (Eigen::Index j = 0; j < n; ++j) max_norm = std::max(max_norm, work.col(j).norm());
    const Scalar negligible =
        std::numeric_limits<Scalar>::epsilon() * static_cast<Scalar>(m) * max_norm;
    // cyclic-by-rows ordering
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        Scalar alpha, beta, gamma;
        column_grams(work, i, j, alpha, beta, gamma);
        const Scalar norm_i = std::sqrt(alpha);
        const Scalar norm_j = std::sqrt(beta);
        if (norm_i <= negligible || norm_j <= negligible) continue;
        const Scalar scale = norm_i * norm_j;
        if (std::abs(gamma) <= tol * scale) continue;
        converged = false;
        residual = std::max(residual, static_cast<double>(std::abs(gamma) / scale));
        const auto rot = jacobi_rotation(alpha, beta, gamma);
        rotate_columns(work, i, j, rot);
        rotate_columns(v, i, j, rot);
      }
    }
  }

  Vector<Scalar> norms(n);
  for (Eigen::Index j = 0; j < n; ++j) norms(j) = work.col(j).norm();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return norms(a) > norms(b); });

  SvdFactors<Scalar> out;
  out.sweeps = sweeps;
  out.sigma.resize(n);
  out.v.resize(n, n);
  Matrix<Scalar> sorted_work(m, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    out.sigma(k) = norms(src);
    out.v.col(k) = v.col(src);
    sorted_work.col(k) = work.col(src);
  }

  const Scalar cutoff = static_cast<Scalar>(opts.rank_tolerance) * (n > 0 ? out.sigma(0) : Scalar(0));
  out.rank = 0;
  while (out.rank < n && out.sigma(out.rank) > cutoff) ++out.rank;

  out.u.resize(m, n);
  for (Eigen::Index k = 0; k < out.rank; ++k) out.u.col(k) = sorted_work.col(k) / out.sigma(k);
  complete_orthonormal(out.u, out.rank, sorted_work, out.sigma);
  return out;
}

}  // namespace detail

/// Singular value decomposition of `a`. Wide inputs are factored through their
/// transpose, so u is m x p and v is n x p with p = min(m, n).
template <typename Derived>
SvdFactors<typename Derived::Scalar> svd(const Eigen::MatrixBase<Derived>& a,
                                         const SvdOptions& opts = {}) {
  using Scalar = typename Derived::Scalar;
  if (a.rows() < 1 || a.cols() < 1) throw Error(ErrorCode::OutOfRange, "empty matrix");
  if (!a.allFinite()) throw Error(ErrorCode::NonFiniteInput, "svd input contains NaN or Inf");
  if (a.rows() >= a.cols()) return detail::jacobi_tall<Scalar>(a, opts);
  auto f = detail::jacobi_tall<Scalar>(a.transpose(), opts);
  std::swap(f.u, f.v);
  return f;
}

/// Squared Frobenius norm, accumulated in double.
template <typename Derived>
double frobenius_sq(const Eigen::MatrixBase<Derived>& a) {
  return a.template cast<double>().squaredNorm();
}

/// Sum of sigma_i^2 accumulated from the smallest value upward.
template <typename Derived>
double sum_of_squares_ascending(const Eigen::MatrixBase<Derived>& sigma) {
  double total = 0.0;
  for (Eigen::Index i = sigma.size(); i-- > 0;) {
    const double s = static_cast<double>(sigma(i));
    total += s * s;
  }
  return total;
}

template <typename Scalar>
TruncatedSvd<Scalar> truncate(const SvdFactors<Scalar>& f, Eigen::Index k) {
  const Eigen::Index p = f.size();
  if (k < 1 || k > p) {
    throw Error(ErrorCode::RankOutOfRange,
                "k = " + std::to_string(k) + " outside [1, " + std::to_string(p) + "]");
  }
  TruncatedSvd<Scalar> t;
  t.k = k;
  t.u_k = f.u.leftCols(k);
  t.sigma_k = f.sigma.head(k);
  t.v_k = f.v.leftCols(k);
  t.source_rows = f.rows();
  t.source_cols = f.cols();
  t.total_energy = sum_of_squares_ascending(f.sigma);
  return t;
}

/// sum_{i<k} sigma_i u_i v_i^T, unclamped.
template <typename Scalar>
Matrix<Scalar> reconstruct(const TruncatedSvd<Scalar>& t) {
  return t.u_k * t.sigma_k.asDiagonal() * t.v_k.transpose();
}

}  // namespace svdc
