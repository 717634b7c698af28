#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "svdc/linalg.hpp"
#include "svdc/metrics.hpp"

namespace svdc::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kNumeric = 3 };

struct SweepRow {
  Eigen::Index k = 0;
  double mse = 0.0;
  double psnr_db = 0.0;
  double ssim = 0.0;
  double energy_ratio = 0.0;
  Zone zone = Zone::BelowThreshold;
  double compression_ratio = 0.0;
};

using Factorizer = std::function<SvdFactors<double>(const Eigen::MatrixXd&)>;

inline constexpr std::string_view kSweepCsvHeader =
    "k,mse,psnr_db,ssim,energy_ratio,zone,compression_ratio";

/// 8, 16, ..., 448, dropping ranks the image cannot support.
std::vector<Eigen::Index> default_sweep_ranks(Eigen::Index rows, Eigen::Index cols);

/// Comma-separated items, each a rank or an inclusive range "start:stop[:step]".
/// The result is sorted and deduplicated.
std::vector<Eigen::Index> parse_ranks(std::string_view text);

/// One factorization shared by every rank; rows come back in ascending k.
std::vector<SweepRow> sweep(const Eigen::MatrixXd& image, std::span<const Eigen::Index> ks,
                            const SsimParams& params = {},
                            std::optional<double> peak = std::nullopt,
                            const Factorizer& factorize = {});

std::string sweep_csv(std::span<const SweepRow> rows);

/// "inf" for +infinity, otherwise shortest round-trippable form.
std::string format_number(double x);

/// Runs the command line (without the program name). Returns the process exit code.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace svdc::cli
