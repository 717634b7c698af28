// Acceptance run: one PASS/FAIL line per criterion, indented detail lines
// beneath. Usage: svdc_acceptance [directory of 512x512 PGM images]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "svdc/cli.hpp"
#include "svdc/codec.hpp"
#include "svdc/imageio.hpp"
#include "svdc/linalg.hpp"
#include "svdc/metrics.hpp"

namespace {

using namespace svdc;
using Clock = std::chrono::steady_clock;

int g_failures = 0;

void verdict(bool ok, const std::string& name, const std::string& summary) {
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), summary.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

void detail(const char* fmt, auto... args) {
  std::printf("    ");
  std::printf(fmt, args...);
  std::printf("\n");
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void energy_identity() {
  std::mt19937_64 rng(20240301);
  std::uniform_int_distribution<int> dim(1, 64);
  double worst = 0.0;
  const auto t0 = Clock::now();
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::MatrixXd a = testing::random_matrix(rng, dim(rng), dim(rng));
    const double energy = frobenius_sq(a);
    worst = std::max(worst, std::abs(energy - svd(a).sigma.squaredNorm()) / energy);
  }
  const double secs = seconds_since(t0);
  verdict(worst <= 1e-10 && secs < 10.0, "energy identity",
          fmt("200 matrices, max relative gap %.3e (<= 1e-10), %.2f s (< 10 s)", worst, secs));
}

void svd_correctness() {
  const Eigen::MatrixXd ex = (Eigen::MatrixXd(2, 2) << 3, 0, 4, 5).finished();
  const auto f2 = svd(ex);
  const double rel = std::max(std::abs(f2.sigma(0) - 3 * std::sqrt(5.0)) / (3 * std::sqrt(5.0)),
                              std::abs(f2.sigma(1) - std::sqrt(5.0)) / std::sqrt(5.0));
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> dim(1, 64);
  double orth = 0.0, recon = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::MatrixXd a = testing::random_matrix(rng, dim(rng), dim(rng));
    const auto f = svd(a);
    orth = std::max({orth, testing::max_abs_offidentity(f.u), testing::max_abs_offidentity(f.v)});
    const double err = (reconstruct(truncate(f, f.size())) - a).cwiseAbs().maxCoeff();
    recon = std::max(recon, err / f.sigma(0));
  }
  verdict(rel <= 1e-10 && orth <= 1e-10 && recon <= 1e-8, "SVD correctness",
          fmt("2x2 oracle rel %.2e (<= 1e-10), orthogonality %.2e (<= 1e-10), "
              "reconstruction %.2e sigma1 (<= 1e-8)",
              rel, orth, recon));
}

void eckart_young() {
  std::mt19937_64 rng(16);
  double worst_residual = 0.0, worst_link = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd a = testing::random_matrix(rng, 16, 16);
    const auto f = svd(a);
    const double energy = testing::brute_force_sum_sq(a);
    for (Eigen::Index k = 1; k < 16; ++k) {
      const Eigen::MatrixXd ak = reconstruct(truncate(f, k));
      const double residual = testing::brute_force_sum_sq(a - ak);
      const double tail = f.sigma.tail(16 - k).squaredNorm();
      worst_residual = std::max(worst_residual, std::abs(residual - tail) / tail);
      const double lhs = 256.0 * mse(a, ak);
      const double rhs = energy * (1.0 - energy_ratio(f, k));
      worst_link = std::max(worst_link, std::abs(lhs - rhs) / rhs);
    }
  }
  verdict(worst_residual <= 1e-8 && worst_link <= 1e-8, "Eckart-Young residual",
          fmt("20 matrices 16x16, every k: residual rel %.2e, m n MSE link rel %.2e (<= 1e-8)",
              worst_residual, worst_link));
}

struct ImageRun {
  std::string name;
  Eigen::MatrixXd pixels;
  std::vector<cli::SweepRow> rows;
  double seconds = 0.0;

  const cli::SweepRow& at(Eigen::Index k) const {
    return *std::find_if(rows.begin(), rows.end(), [k](const auto& r) { return r.k == k; });
  }
};

std::vector<ImageRun> load_and_sweep(const std::filesystem::path& dir) {
  std::vector<ImageRun> runs;
  if (!std::filesystem::is_directory(dir)) return runs;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const auto ext = entry.path().extension();
    if (ext == ".pgm" || ext == ".ppm") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    ImageRun run;
    run.name = file.filename().string();
    run.pixels = image_to_matrix(read_pnm_gray(read_file(file)));
    if (run.pixels.rows() != 512 || run.pixels.cols() != 512) {
      detail("skipping %s: %ldx%ld, not 512x512", run.name.c_str(), long(run.pixels.rows()),
             long(run.pixels.cols()));
      continue;
    }
    const auto t0 = Clock::now();
    run.rows = cli::sweep(run.pixels, cli::default_sweep_ranks(512, 512));
    run.seconds = seconds_since(t0);
    runs.push_back(std::move(run));
  }
  return runs;
}

void quality_bands(const std::vector<ImageRun>& runs) {
  if (runs.size() < 3) {
    verdict(false, "natural-image quality bands",
            fmt("needs >= 3 natural 512x512 images, found %zu", runs.size()));
    return;
  }
  const double n = static_cast<double>(runs.size());
  auto average = [&](auto field) {
    double s = 0.0;
    for (const auto& r : runs) s += field(r);
    return s / n;
  };
  for (const auto& r : runs) {
    const auto& row = r.at(40);
    detail("%-16s k=40  E=%.6f  PSNR=%.2f dB  SSIM=%.4f  E(8)=%.6f  E(128)=%.7f  sweep %.1f s",
           r.name.c_str(), row.energy_ratio, row.psnr_db, row.ssim, r.at(8).energy_ratio,
           r.at(128).energy_ratio, r.seconds);
  }
  const double e40 = average([](const ImageRun& r) { return r.at(40).energy_ratio; });
  const double psnr40 = average([](const ImageRun& r) { return r.at(40).psnr_db; });
  const double ssim40 = average([](const ImageRun& r) { return r.at(40).ssim; });

  bool low_ok = true, high_ok = true;
  double low_min = 1.0, low_max = 0.0, high_min = 1.0;
  for (Eigen::Index k = 8; k <= 448; k += 8) {
    const double e = average([k](const ImageRun& r) { return r.at(k).energy_ratio; });
    if (k <= 32) {
      low_min = std::min(low_min, e);
      low_max = std::max(low_max, e);
      low_ok = low_ok && e >= 0.99 && e < 0.999;
    } else if (k >= 128) {
      high_min = std::min(high_min, e);
      high_ok = high_ok && e >= 0.9999;
    }
  }
  double slowest = 0.0;
  for (const auto& r : runs) slowest = std::max(slowest, r.seconds);

  const bool e_ok = e40 >= 0.999;
  const bool psnr_ok = std::abs(psnr40 - 35.0) <= 3.0;
  const bool ssim_ok = std::abs(ssim40 - 0.94) <= 0.04;
  detail("k=40 average E %.6f (>= 0.999): %s", e40, e_ok ? "ok" : "miss");
  detail("k=40 average PSNR %.2f dB (35 +- 3): %s", psnr40, psnr_ok ? "ok" : "miss");
  detail("k=40 average windowed SSIM %.4f (0.94 +- 0.04): %s", ssim40, ssim_ok ? "ok" : "miss");
  detail("k=8..32 average E in [%.6f, %.6f] (within [0.99, 0.999)): %s", low_min, low_max,
         low_ok ? "ok" : "miss");
  detail("k=128..448 average E >= %.7f (>= 0.9999): %s", high_min, high_ok ? "ok" : "miss");
  detail("slowest full sweep %.1f s (< 120 s): %s", slowest, slowest < 120.0 ? "ok" : "miss");
  verdict(e_ok && psnr_ok && ssim_ok && low_ok && high_ok && slowest < 120.0, "natural-image quality bands",
          fmt("%zu images, k=40 averages E=%.5f PSNR=%.2f dB SSIM=%.3f", runs.size(), e40, psnr40, ssim40));
}

void metric_spot_values() {
  const Eigen::MatrixXd white = Eigen::MatrixXd::Constant(2, 2, 255);
  const Eigen::MatrixXd gray = Eigen::MatrixXd::Constant(2, 2, 253);
  const double m = mse(white, gray);
  const double p = psnr(white, gray);
  std::mt19937_64 rng(1);
  const Eigen::MatrixXd img = testing::random_pixels(rng, 32, 32);
  SsimParams global;
  global.mode = SsimMode::Global;
  const double self_w = ssim(img, img);
  const double self_g = ssim(img, img, global);
  const double bw = ssim(Eigen::MatrixXd::Zero(16, 16), Eigen::MatrixXd::Constant(16, 16, 255), global);
  const bool ok = m == 4.0 && std::abs(p - 42.111) <= 1e-3 && self_w == 1.0 && self_g == 1.0 &&
                  std::abs(bw - 6.5025 / 65031.5025) <= 1e-15 && std::abs(bw - 9.9989e-5) <= 2e-9;
  verdict(ok, "metric spot values",
          fmt("MSE=%g PSNR=%.4f dB SSIM(I,I)=%g/%g global black-white SSIM=%.5e", m, p, self_w, self_g, bw));
}

void energy_band(const std::vector<ImageRun>& runs) {
  if (runs.empty()) {
    verdict(false, "E band", "no natural 512x512 images found");
    return;
  }
  bool ok = true;
  for (const auto& r : runs) {
    double lo = 1.0, hi = 0.0;
    for (const auto& row : r.rows) {
      lo = std::min(lo, row.energy_ratio);
      hi = std::max(hi, row.energy_ratio);
    }
    const bool inside = lo >= 0.99 && hi <= 1.0;
    detail("%-16s sweep E in [%.6f, %.6f]: %s", r.name.c_str(), lo, hi, inside ? "ok" : "miss");
    ok = ok && inside;
  }
  verdict(ok, "E band", "every default-sweep E within [0.99, 1] on every image");
}

void zone_classifier() {
  struct Probe {
    double e;
    Zone zone;
  };
  const Probe probes[] = {{0.9899, Zone::BelowThreshold}, {0.99, Zone::Poor99},
                          {0.9989, Zone::Poor99},         {0.999, Zone::Good999},
                          {0.99899, Zone::Poor99},        {0.9999, Zone::VeryGood9999},
                          {0.999899, Zone::Good999},      {1.0, Zone::VeryGood9999},
                          {0.5, Zone::BelowThreshold}};
  int probe_misses = 0;
  for (const auto& p : probes) {
    if (classify_zone(p.e) != p.zone) {
      ++probe_misses;
      detail("probe %.6f -> %s, expected %s", p.e, std::string(zone_label(classify_zone(p.e))).c_str(),
             std::string(zone_label(p.zone)).c_str());
    }
  }
  std::mt19937_64 rng(10000);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> draws(10000);
  for (auto& d : draws) d = unit(rng);
  std::sort(draws.begin(), draws.end());
  int monotone_breaks = 0;
  for (std::size_t i = 1; i < draws.size(); ++i) {
    if (static_cast<int>(classify_zone(draws[i])) < static_cast<int>(classify_zone(draws[i - 1]))) {
      ++monotone_breaks;
    }
  }
  verdict(probe_misses == 0 && monotone_breaks == 0, "zone classifier",
          fmt("9 probes, %d mismatches; 10000 sorted draws, %d order breaks", probe_misses,
              monotone_breaks));
}

void codec_roundtrips(const std::vector<ImageRun>& runs) {
  std::mt19937_64 rng(100);
  std::uniform_int_distribution<int> dim(1, 40);
  int container_misses = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::MatrixXd a = testing::random_pixels(rng, dim(rng), dim(rng));
    const auto f = svd(a);
    std::uniform_int_distribution<Eigen::Index> rank(1, f.size());
    const CompressedImage c =
        encode_factors(f, rank(rng), trial % 2 ? Precision::F64 : Precision::F32, a.maxCoeff());
    const auto bytes = write_container(c);
    if (!(read_container(bytes) == c) || write_container(read_container(bytes)) != bytes) ++container_misses;
  }

  int lossless_misses = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd a = testing::random_pixels(rng, dim(rng), dim(rng));
    const ImageGray img = matrix_to_image(a);
    const Eigen::Index p = std::min(a.rows(), a.cols());
    const ImageGray back = matrix_to_image(decode(encode(a, p, Precision::F64)));
    if (write_pgm(back) != write_pgm(img)) ++lossless_misses;
  }

  double worst = 0.0;
  for (const auto& r : runs) {
    const auto f = svd(r.pixels);
    double image_worst = 0.0;
    for (Eigen::Index k = 8; k <= 128; k += 8) {
      const Eigen::MatrixXd r32 = reconstruct(encode_factors(f, k, Precision::F32, 255).truncated());
      const Eigen::MatrixXd r64 = reconstruct(encode_factors(f, k, Precision::F64, 255).truncated());
      image_worst = std::max(image_worst, (r32 - r64).cwiseAbs().maxCoeff());
    }
    detail("%-16s max |F32 - F64| over k=8..128: %.3e gray levels", r.name.c_str(), image_worst);
    worst = std::max(worst, image_worst);
  }
  verdict(container_misses == 0 && lossless_misses == 0 && worst <= 0.5 && !runs.empty(),
          "codec roundtrips",
          fmt("100 containers, %d mismatches; 20 full-rank F64 images, %d not byte-identical; "
              "F32 vs F64 max %.3e (<= 0.5) on %zu images",
              container_misses, lossless_misses, worst, runs.size()));
}

void pgm_checks() {
  const ImageGray fixture{2, 2, {0, 64, 128, 255}};
  const std::vector<std::uint8_t> golden = {'P', '5', '\n', '2', ' ', '2', '\n', '2', '5',
                                            '5', '\n', 0,    64,  128, 255};
  const bool golden_ok = write_pgm(fixture) == golden;
  std::mt19937_64 rng(64);
  std::uniform_int_distribution<int> dim(1, 64), px(0, 255);
  int misses = 0;
  for (int trial = 0; trial < 500; ++trial) {
    ImageGray img;
    img.width = dim(rng);
    img.height = dim(rng);
    img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
    for (auto& p : img.pixels) p = static_cast<std::uint8_t>(px(rng));
    if (!(read_pgm(write_pgm(img)) == img)) ++misses;
  }
  verdict(golden_ok && misses == 0, "PGM",
          fmt("2x2 golden fixture %s; 500 random images, %d roundtrip mismatches",
              golden_ok ? "byte-exact" : "differs", misses));
}

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path dir = argc > 1 ? argv[1] : SVDC_NATURAL_IMAGE_DIR;
  try {
    energy_identity();
    svd_correctness();
    eckart_young();
    std::printf("sweeping natural images in %s\n", dir.string().c_str());
    const std::vector<ImageRun> runs = load_and_sweep(dir);
    quality_bands(runs);
    metric_spot_values();
    energy_band(runs);
    zone_classifier();
    codec_roundtrips(runs);
    pgm_checks();
  } catch (const std::exception& e) {
    std::printf("FAIL acceptance run aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%d criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
