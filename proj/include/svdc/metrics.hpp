#pragma once

// Reconstruction quality: MSE, PSNR, SSIM and the singular-value energy ratio,
// plus the 99 / 999 / 9999 zone classifier for the energy ratio.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include "svdc/error.hpp"
#include "svdc/linalg.hpp"

namespace svdc {

/// PSNR value used when the two images are identical.
inline constexpr double kPlusInfinity = std::numeric_limits<double>::infinity();

enum class SsimMode { Global, Windowed };

struct SsimParams {
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 255.0;
  SsimMode mode = SsimMode::Windowed;
  int window_size = 11;
  double window_sigma = 1.5;

  double c1() const { return (k1 * dynamic_range) * (k1 * dynamic_range); }
  double c2() const { return (k2 * dynamic_range) * (k2 * dynamic_range); }
  double c3() const { return c2() / 2.0; }

  /// Throws OutOfRange on non-positive constants or an even/too-small window.
  void validate() const;
};

enum class Zone { BelowThreshold, Poor99, Good999, VeryGood9999 };

std::string_view zone_label(Zone z) noexcept;
std::string_view zone_appreciation(Zone z) noexcept;

struct QualityReport {
  Eigen::Index k = 0;
  double mse = 0.0;
  double psnr_db = kPlusInfinity;
  double ssim = 1.0;
  double energy_ratio = 1.0;
  Zone zone = Zone::VeryGood9999;
};

namespace detail {
template <typename A, typename B>
void require_same_shape(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " vs " +
                    std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
}
}  // namespace detail

template <typename A, typename B>
double mse(const Eigen::MatrixBase<A>& original, const Eigen::MatrixBase<B>& other) {
  detail::require_same_shape(original, other);
  const auto diff = original.template cast<double>() - other.template cast<double>();
  return diff.squaredNorm() / static_cast<double>(original.size());
}

/// 10 log10(peak^2 / MSE). The peak defaults to the largest entry of `original`;
/// pass 255 to use the nominal 8-bit peak instead. Returns kPlusInfinity at zero MSE.
template <typename A, typename B>
double psnr(const Eigen::MatrixBase<A>& original, const Eigen::MatrixBase<B>& other,
            std::optional<double> peak = std::nullopt) {
  detail::require_same_shape(original, other);
  const double p = peak ? *peak : static_cast<double>(original.maxCoeff());
  if (!(p > 0.0)) throw Error(ErrorCode::ZeroPeak, "peak of the original image is not positive");
  const double e = mse(original, other);
  if (e == 0.0) return kPlusInfinity;
  return 10.0 * std::log10(p * p / e);
}

double ssim(const Eigen::Ref<const Eigen::MatrixXd>& original,
            const Eigen::Ref<const Eigen::MatrixXd>& other, const SsimParams& params = {});

/// Entry j is sigma_1^2 + ... + sigma_{j+1}^2.
template <typename Scalar>
Eigen::VectorXd cumulative_energy(const SvdFactors<Scalar>& f) {
  Eigen::VectorXd out(f.size());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const double s = static_cast<double>(f.sigma(i));
    acc += s * s;
    out(i) = acc;
  }
  return out;
}

/// Fraction of the total energy carried by the first k singular values. Evaluated
/// as 1 - tail / total with both sums accumulated from the smallest value upward,
/// which keeps it monotone in k and exactly 1 once the tail is numerically zero.
template <typename Scalar>
double energy_ratio(const SvdFactors<Scalar>& f, Eigen::Index k) {
  const Eigen::Index p = f.size();
  if (k < 1 || k > p) {
    throw Error(ErrorCode::RankOutOfRange,
                "k = " + std::to_string(k) + " outside [1, " + std::to_string(p) + "]");
  }
  const double total = sum_of_squares_ascending(f.sigma);
  if (!(total > 0.0)) throw Error(ErrorCode::ZeroEnergy, "all singular values are zero");
  const double tail = sum_of_squares_ascending(f.sigma.tail(p - k));
  return std::clamp(1.0 - tail / total, 0.0, 1.0);
}

template <typename Scalar>
double energy_ratio_truncated(const TruncatedSvd<Scalar>& t) {
  if (!(t.total_energy > 0.0)) throw Error(ErrorCode::ZeroEnergy, "total energy is zero");
  return std::clamp(sum_of_squares_ascending(t.sigma_k) / t.total_energy, 0.0, 1.0);
}

/// Half-open bands [0.99, 0.999), [0.999, 0.9999), [0.9999, 1]; below 0.99 is
/// BelowThreshold. Throws OutOfRange outside [0, 1].
Zone classify_zone(double e);

/// All four metrics of the unquantized rank-k reconstruction against `original`.
QualityReport quality_report(const Eigen::Ref<const Eigen::MatrixXd>& original,
                             const SvdFactors<double>& factors, Eigen::Index k,
                             const SsimParams& params = {},
                             std::optional<double> peak = std::nullopt);

}  // namespace svdc
