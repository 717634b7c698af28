#include "svdc/metrics.hpp"

#include <cmath>
#include <vector>

namespace svdc {

namespace {

Eigen::VectorXd gaussian_window(int size, double sigma) {
  Eigen::VectorXd w(size);
  const double center = (size - 1) / 2.0;
  for (int i = 0; i < size; ++i) {
    const double d = i - center;
    w(i) = std::exp(-d * d / (2.0 * sigma * sigma));
  }
  return w / w.sum();
}

// Separable weighted average over every fully contained window (no padding).
Eigen::ArrayXXd filter_valid(const Eigen::ArrayXXd& x, const Eigen::VectorXd& w) {
  const Eigen::Index size = w.size();
  const Eigen::Index out_rows = x.rows() - size + 1;
  const Eigen::Index out_cols = x.cols() - size + 1;
  Eigen::ArrayXXd tmp = Eigen::ArrayXXd::Zero(out_rows, x.cols());
  for (Eigen::Index t = 0; t < size; ++t) tmp += w(t) * x.middleRows(t, out_rows);
  Eigen::ArrayXXd out = Eigen::ArrayXXd::Zero(out_rows, out_cols);
  for (Eigen::Index t = 0; t < size; ++t) out += w(t) * tmp.middleCols(t, out_cols);
  return out;
}

// Luminance * contrast * structure with C3 = C2 / 2, which reduces to the
// two-factor form below.
template <typename T>
auto ssim_formula(const T& mu_x, const T& mu_y, const T& var_x, const T& var_y, const T& cov,
                  double c1, double c2) {
  return ((2.0 * mu_x * mu_y + c1) * (2.0 * cov + c2)) /
         ((mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2));
}

double ssim_global(const Eigen::ArrayXXd& x, const Eigen::ArrayXXd& y, const SsimParams& p) {
  const double mu_x = x.mean();
  const double mu_y = y.mean();
  const Eigen::ArrayXXd dx = x - mu_x;
  const Eigen::ArrayXXd dy = y - mu_y;
  const double var_x = dx.square().mean();
  const double var_y = dy.square().mean();
  const double cov = (dx * dy).mean();
  return ssim_formula(mu_x, mu_y, var_x, var_y, cov, p.c1(), p.c2());
}

double ssim_windowed(const Eigen::ArrayXXd& x, const Eigen::ArrayXXd& y, const SsimParams& p) {
  if (x.rows() < p.window_size || x.cols() < p.window_size) {
    throw Error(ErrorCode::ImageTooSmall,
                std::to_string(x.rows()) + "x" + std::to_string(x.cols()) + " is smaller than a " +
                    std::to_string(p.window_size) + "-pixel window");
  }
  const Eigen::VectorXd w = gaussian_window(p.window_size, p.window_sigma);
  const Eigen::ArrayXXd mu_x = filter_valid(x, w);
  const Eigen::ArrayXXd mu_y = filter_valid(y, w);
  const Eigen::ArrayXXd var_x = filter_valid(x * x, w) - mu_x * mu_x;
  const Eigen::ArrayXXd var_y = filter_valid(y * y, w) - mu_y * mu_y;
  const Eigen::ArrayXXd cov = filter_valid(x * y, w) - mu_x * mu_y;
  const Eigen::ArrayXXd map = ssim_formula(mu_x, mu_y, var_x, var_y, cov, p.c1(), p.c2());
  return map.sum() / static_cast<double>(map.size());
}

}  // namespace

void SsimParams::validate() const {
  if (!(k1 > 0.0) || !(k2 > 0.0) || !(dynamic_range > 0.0)) {
    throw Error(ErrorCode::OutOfRange, "SSIM constants k1, k2 and L must be positive");
  }
  if (window_size < 3 || window_size % 2 == 0) {
    throw Error(ErrorCode::OutOfRange, "SSIM window size must be odd and at least 3");
  }
  if (!(window_sigma > 0.0)) throw Error(ErrorCode::OutOfRange, "SSIM window sigma must be positive");
}

double ssim(const Eigen::Ref<const Eigen::MatrixXd>& original,
            const Eigen::Ref<const Eigen::MatrixXd>& other, const SsimParams& params) {
  detail::require_same_shape(original, other);
  params.validate();
  const Eigen::ArrayXXd x = original.array();
  const Eigen::ArrayXXd y = other.array();
  return params.mode == SsimMode::Global ? ssim_global(x, y, params)
                                         : ssim_windowed(x, y, params);
}

std::string_view zone_label(Zone z) noexcept {
  switch (z) {
    case Zone::BelowThreshold: return "below";
    case Zone::Poor99: return "99";
    case Zone::Good999: return "999";
    case Zone::VeryGood9999: return "9999";
  }
  return "";
}

std::string_view zone_appreciation(Zone z) noexcept {
  switch (z) {
    case Zone::BelowThreshold: return "";
    case Zone::Poor99: return "Poor quality";
    case Zone::Good999: return "Good quality";
    case Zone::VeryGood9999: return "Very good quality";
  }
  return "";
}

Zone classify_zone(double e) {
  if (!(e >= 0.0 && e <= 1.0)) {
    throw Error(ErrorCode::OutOfRange, "energy ratio " + std::to_string(e) + " outside [0, 1]");
  }
  if (e >= 0.9999) return Zone::VeryGood9999;
  if (e >= 0.999) return Zone::Good999;
  if (e >= 0.99) return Zone::Poor99;
  return Zone::BelowThreshold;
}

QualityReport quality_report(const Eigen::Ref<const Eigen::MatrixXd>& original,
                             const SvdFactors<double>& factors, Eigen::Index k,
                             const SsimParams& params, std::optional<double> peak) {
  if (original.rows() != factors.rows() || original.cols() != factors.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "factors do not belong to this image");
  }
  // At or beyond the numerical rank the discarded tail is zero, so the rank-k
  // approximation is the image itself; comparing against the rounded product
  // would report ~1e-26 MSE instead of 0.
  const Eigen::MatrixXd approx = k >= factors.rank ? Eigen::MatrixXd(original)
                                                   : reconstruct(truncate(factors, k));
  QualityReport r;
  r.k = k;
  r.mse = mse(original, approx);
  r.psnr_db = psnr(original, approx, peak);
  r.ssim = ssim(original, approx, params);
  r.energy_ratio = energy_ratio(factors, k);
  r.zone = classify_zone(r.energy_ratio);
  return r;
}

}  // namespace svdc
