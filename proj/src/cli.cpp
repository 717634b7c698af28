#include "svdc/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "svdc/codec.hpp"
#include "svdc/error.hpp"
#include "svdc/imageio.hpp"

namespace svdc::cli {

namespace {

Eigen::Index parse_index(std::string_view s) {
  Eigen::Index v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || s.empty() || v < 0) {
    throw Error(ErrorCode::OutOfRange, "bad rank '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) return parts;
    start = pos + 1;
  }
}

Eigen::MatrixXd load_image(const std::string& path) {
  return image_to_matrix(read_pnm_gray(read_file(path)));
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoConvergence:
    case ErrorCode::ZeroEnergy:
    case ErrorCode::ZeroPeak:
    case ErrorCode::NonFiniteInput:
      return kNumeric;
    default:
      return kUsage;
  }
}

std::optional<double> peak_override(bool nominal) {
  return nominal ? std::optional<double>(255.0) : std::nullopt;
}

struct CompressArgs {
  std::string input, output;
  std::optional<Eigen::Index> rank;
  std::optional<double> target_e;
  Precision precision = Precision::F32;
};

int cmd_compress(const CompressArgs& a, std::ostream& out) {
  if (a.rank.has_value() == a.target_e.has_value()) {
    throw CLI::ValidationError("compress", "exactly one of --rank and --target-e is required");
  }
  const Eigen::MatrixXd image = load_image(a.input);
  const Eigen::Index p = std::min(image.rows(), image.cols());
  if (a.rank && (*a.rank < 1 || *a.rank > p)) {
    throw Error(ErrorCode::RankOutOfRange, "--rank must lie in [1, " + std::to_string(p) + "]");
  }
  if (a.target_e && !(*a.target_e > 0.0 && *a.target_e <= 1.0)) {
    throw Error(ErrorCode::OutOfRange, "--target-e must lie in (0, 1]");
  }
  const SvdFactors<double> factors = svd(image);
  const Eigen::Index k = a.rank ? *a.rank : choose_rank(factors, *a.target_e).k;
  const double e = energy_ratio(factors, k);
  const Zone zone = classify_zone(e);
  const CompressedImage c = encode_factors(factors, k, a.precision, image.maxCoeff());
  write_file(a.output, write_container(c));
  out << "k=" << k << " energy_ratio=" << format_number(e) << " zone=" << zone_label(zone)
      << " compression_ratio=" << format_number(compression_ratio(image.rows(), image.cols(), k))
      << " quality=\"" << zone_appreciation(zone) << "\"\n";
  return kOk;
}

int cmd_decompress(const std::string& input, const std::string& output) {
  const CompressedImage c = read_container(read_file(input));
  write_file(output, write_pgm(matrix_to_image(decode(c))));
  return kOk;
}

struct MetricsArgs {
  std::string original, other;
  SsimMode mode = SsimMode::Windowed;
  bool nominal_peak = false;
};

int cmd_metrics(const MetricsArgs& a, std::ostream& out) {
  const Eigen::MatrixXd original = load_image(a.original);
  const std::vector<std::uint8_t> other_bytes = read_file(a.other);
  Eigen::MatrixXd other;
  std::optional<CompressedImage> container;
  if (is_container(other_bytes)) {
    container = read_container(other_bytes);
    other = decode(*container);
  } else {
    other = image_to_matrix(read_pnm_gray(other_bytes));
  }
  SsimParams params;
  params.mode = a.mode;
  const double m = mse(original, other);
  const double p = psnr(original, other, peak_override(a.nominal_peak));
  const double s = ssim(original, other, params);
  out << "mse=" << format_number(m) << "\n"
      << "psnr=" << format_number(p) << "\n"
      << "ssim=" << format_number(s) << "\n";
  if (container) {
    const double e = energy_ratio_truncated(container->truncated());
    const Zone zone = classify_zone(e);
    out << "k=" << container->rank << "\n"
        << "e=" << format_number(e) << "\n"
        << "zone=" << zone_label(zone) << "\n"
        << "quality=" << zone_appreciation(zone) << "\n";
  }
  return kOk;
}

struct SweepArgs {
  std::string input, output;
  std::string ks;
  SsimMode mode = SsimMode::Windowed;
  bool nominal_peak = false;
};

int cmd_sweep(const SweepArgs& a) {
  const Eigen::MatrixXd image = load_image(a.input);
  const std::vector<Eigen::Index> ks =
      a.ks.empty() ? default_sweep_ranks(image.rows(), image.cols()) : parse_ranks(a.ks);
  const Eigen::Index p = std::min(image.rows(), image.cols());
  if (ks.empty() || ks.front() < 1 || ks.back() > p) {
    throw Error(ErrorCode::RankOutOfRange, "ranks must lie in [1, " + std::to_string(p) + "]");
  }
  SsimParams params;
  params.mode = a.mode;
  const std::vector<SweepRow> rows = sweep(image, ks, params, peak_override(a.nominal_peak));
  const std::string csv = sweep_csv(rows);
  write_file(a.output, std::span(reinterpret_cast<const std::uint8_t*>(csv.data()), csv.size()));
  return kOk;
}

const std::map<std::string, SsimMode> kSsimModes = {{"global", SsimMode::Global},
                                                    {"windowed", SsimMode::Windowed}};

}  // namespace

std::vector<Eigen::Index> default_sweep_ranks(Eigen::Index rows, Eigen::Index cols) {
  std::vector<Eigen::Index> ks;
  const Eigen::Index p = std::min(rows, cols);
  for (Eigen::Index k = 8; k <= 448 && k <= p; k += 8) ks.push_back(k);
  return ks;
}

std::vector<Eigen::Index> parse_ranks(std::string_view text) {
  std::vector<Eigen::Index> ks;
  for (std::string_view item : split(text, ',')) {
    const auto fields = split(item, ':');
    if (fields.size() == 1) {
      ks.push_back(parse_index(fields[0]));
      continue;
    }
    if (fields.size() > 3) throw Error(ErrorCode::OutOfRange, "bad range '" + std::string(item) + "'");
    const Eigen::Index start = parse_index(fields[0]);
    const Eigen::Index stop = parse_index(fields[1]);
    const Eigen::Index step = fields.size() == 3 ? parse_index(fields[2]) : 1;
    if (step < 1 || stop < start) throw Error(ErrorCode::OutOfRange, "bad range '" + std::string(item) + "'");
    for (Eigen::Index k = start; k <= stop; k += step) ks.push_back(k);
  }
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  return ks;
}

std::vector<SweepRow> sweep(const Eigen::MatrixXd& image, std::span<const Eigen::Index> ks,
                            const SsimParams& params, std::optional<double> peak,
                            const Factorizer& factorize) {
  if (!std::is_sorted(ks.begin(), ks.end()) ||
      std::adjacent_find(ks.begin(), ks.end()) != ks.end()) {
    throw Error(ErrorCode::OutOfRange, "sweep ranks must be strictly increasing");
  }
  const SvdFactors<double> factors = factorize ? factorize(image) : svd(image);
  std::vector<SweepRow> rows;
  rows.reserve(ks.size());
  for (const Eigen::Index k : ks) {
    const QualityReport r = quality_report(image, factors, k, params, peak);
    rows.push_back({k, r.mse, r.psnr_db, r.ssim, r.energy_ratio, r.zone,
                    compression_ratio(image.rows(), image.cols(), k)});
  }
  return rows;
}

std::string sweep_csv(std::span<const SweepRow> rows) {
  std::ostringstream os;
  os << kSweepCsvHeader << "\n";
  for (const SweepRow& r : rows) {
    os << r.k << ',' << format_number(r.mse) << ',' << format_number(r.psnr_db) << ','
       << format_number(r.ssim) << ',' << format_number(r.energy_ratio) << ','
       << zone_label(r.zone) << ',' << format_number(r.compression_ratio) << "\n";
  }
  return os.str();
}

std::string format_number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Grayscale image compression by truncated SVD, with energy-ratio quality metrics"};
  app.name("svdc");
  app.require_subcommand(1);

  CompressArgs compress;
  auto* c = app.add_subcommand("compress", "Write a rank-k SVDC container for a PGM/PPM image");
  c->add_option("input", compress.input, "Input PGM (P5) or PPM (P6)")->required();
  c->add_option("output", compress.output, "Output container")->required();
  auto* rank_opt = c->add_option("--rank", compress.rank, "Number of singular values to keep");
  auto* target_opt =
      c->add_option("--target-e", compress.target_e, "Smallest energy ratio to reach, in (0, 1]");
  rank_opt->excludes(target_opt);
  c->add_option("--precision", compress.precision, "Stored scalar width")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, Precision>{{"f32", Precision::F32}, {"f64", Precision::F64}}));

  std::string dec_in, dec_out;
  auto* d = app.add_subcommand("decompress", "Reconstruct a PGM from an SVDC container");
  d->add_option("input", dec_in, "Input container")->required();
  d->add_option("output", dec_out, "Output PGM")->required();

  MetricsArgs metrics;
  auto* m = app.add_subcommand("metrics", "Compare an image with a PGM or an SVDC container");
  m->add_option("original", metrics.original, "Reference PGM")->required();
  m->add_option("other", metrics.other, "PGM or SVDC container")->required();
  m->add_option("--ssim-mode", metrics.mode)->transform(CLI::CheckedTransformer(kSsimModes));
  m->add_flag("--peak-255", metrics.nominal_peak, "Use 255 as the PSNR peak");

  SweepArgs sw;
  auto* s = app.add_subcommand("sweep", "Tabulate metrics over a list of ranks as CSV");
  s->add_option("input", sw.input, "Input PGM (P5) or PPM (P6)")->required();
  s->add_option("output", sw.output, "Output CSV")->required();
  s->add_option("--ks", sw.ks, "Ranks, e.g. 8:448:8 or 8,40,128 (default 8:448:8)");
  s->add_option("--ssim-mode", sw.mode)->transform(CLI::CheckedTransformer(kSsimModes));
  s->add_flag("--peak-255", sw.nominal_peak, "Use 255 as the PSNR peak");

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
    if (*c) return cmd_compress(compress, out);
    if (*d) return cmd_decompress(dec_in, dec_out);
    if (*m) return cmd_metrics(metrics, out);
    return cmd_sweep(sw);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  } catch (const Error& e) {
    err << "svdc: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "svdc: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace svdc::cli
