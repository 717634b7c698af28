#include "svdc/codec.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <limits>
#include <string>

#include "svdc/error.hpp"
#include "svdc/imageio.hpp"
#include "svdc/metrics.hpp"

namespace svdc {

namespace {

constexpr std::array<std::uint8_t, 4> kMagic = {'S', 'V', 'D', 'C'};

void check_rank(Eigen::Index rows, Eigen::Index cols, Eigen::Index k) {
  if (rows < 1 || cols < 1) throw Error(ErrorCode::OutOfRange, "image dimensions must be positive");
  const Eigen::Index p = std::min(rows, cols);
  if (k < 1 || k > p) {
    throw Error(ErrorCode::RankOutOfRange,
                "k = " + std::to_string(k) + " outside [1, " + std::to_string(p) + "]");
  }
}

class ByteWriter {
 public:
  explicit ByteWriter(std::size_t reserve) { out_.reserve(reserve); }

  void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) { little_endian(v, 4); }
  void f32(float v) { little_endian(std::bit_cast<std::uint32_t>(v), 4); }
  void f64(double v) { little_endian(std::bit_cast<std::uint64_t>(v), 8); }

  template <typename Derived>
  void scalars(const Eigen::DenseBase<Derived>& values, Precision p) {
    // Column-major traversal for matrices.
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      for (Eigen::Index r = 0; r < values.rows(); ++r) {
        if (p == Precision::F32) {
          f32(static_cast<float>(values(r, c)));
        } else {
          f64(values(r, c));
        }
      }
    }
  }

  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  void little_endian(std::uint64_t v, int width) {
    for (int i = 0; i < width; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  std::vector<std::uint8_t> out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t remaining() const { return bytes_.size() - pos_; }

  std::uint8_t u8() { return static_cast<std::uint8_t>(little_endian(1)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(little_endian(4)); }
  double f64() { return std::bit_cast<double>(little_endian(8)); }
  double scalar(Precision p) {
    if (p == Precision::F32) return std::bit_cast<float>(static_cast<std::uint32_t>(little_endian(4)));
    return f64();
  }

  void read_into(Eigen::Ref<Eigen::MatrixXd> dst, Precision p) {
    for (Eigen::Index c = 0; c < dst.cols(); ++c) {
      for (Eigen::Index r = 0; r < dst.rows(); ++r) dst(r, c) = scalar(p);
    }
  }

 private:
  std::uint64_t little_endian(int width) {
    if (remaining() < static_cast<std::size_t>(width)) {
      throw Error(ErrorCode::CorruptContainer, "unexpected end of data");
    }
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += static_cast<std::size_t>(width);
    return v;
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

void CompressedImage::validate() const {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::CorruptContainer, why); };
  if (precision != Precision::F32 && precision != Precision::F64) fail("unknown precision");
  if (rows < 1 || cols < 1) fail("zero image dimension");
  if (rank < 1 || rank > std::min(rows, cols)) fail("rank " + std::to_string(rank) + " out of range");
  if (sigma.size() != rank) fail("sigma length differs from rank");
  if (u.rows() != rows || u.cols() != rank) fail("u payload has the wrong shape");
  if (v.rows() != cols || v.cols() != rank) fail("v payload has the wrong shape");
  if (!sigma.allFinite() || !u.allFinite() || !v.allFinite()) fail("non-finite payload");
  if ((sigma.array() < 0.0).any()) fail("negative singular value");
  if (!std::isfinite(total_energy) || !std::isfinite(pixel_peak)) fail("non-finite header field");
  // f32 rounding may push the stored sigmas slightly above the recorded total.
  const double slack = precision == Precision::F32 ? 1e-6 : 1e-12;
  if (total_energy < sum_of_squares_ascending(sigma) * (1.0 - slack)) {
    fail("total energy below the retained energy");
  }
}

TruncatedSvd<double> CompressedImage::truncated() const {
  TruncatedSvd<double> t;
  t.k = rank;
  t.u_k = u;
  t.sigma_k = sigma;
  t.v_k = v;
  t.source_rows = rows;
  t.source_cols = cols;
  t.total_energy = total_energy;
  return t;
}

bool CompressedImage::operator==(const CompressedImage& o) const {
  auto same = [](const auto& a, const auto& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
  };
  return precision == o.precision && rows == o.rows && cols == o.cols && rank == o.rank &&
         total_energy == o.total_energy && pixel_peak == o.pixel_peak && same(sigma, o.sigma) &&
         same(u, o.u) && same(v, o.v);
}

RankSelection choose_rank(const SvdFactors<double>& factors, double target_e) {
  if (!(target_e > 0.0 && target_e <= 1.0)) {
    throw Error(ErrorCode::OutOfRange, "target energy ratio must lie in (0, 1]");
  }
  for (Eigen::Index k = 1; k <= factors.size(); ++k) {
    const double e = energy_ratio(factors, k);
    if (e >= target_e) return {k, e, target_e};
  }
  // energy_ratio(f, p) is exactly 1, so the loop always returns.
  throw Error(ErrorCode::OutOfRange, "target energy ratio not reachable");
}

CompressedImage encode(const Eigen::Ref<const Eigen::MatrixXd>& image, Eigen::Index k,
                       Precision precision, const SvdOptions& opts) {
  check_rank(image.rows(), image.cols(), k);
  if (!image.allFinite()) throw Error(ErrorCode::NonFiniteInput, "image contains NaN or Inf");
  if (image.minCoeff() < 0.0 || image.maxCoeff() > 255.0) {
    throw Error(ErrorCode::OutOfRange, "image entries must lie in [0, 255]");
  }
  return encode_factors(svd(image, opts), k, precision, image.maxCoeff());
}

CompressedImage encode_factors(const SvdFactors<double>& factors, Eigen::Index k,
                               Precision precision, double pixel_peak) {
  constexpr auto kMax = static_cast<Eigen::Index>(std::numeric_limits<std::uint32_t>::max());
  if (factors.rows() > kMax || factors.cols() > kMax) {
    throw Error(ErrorCode::OutOfRange, "image too large for the container");
  }
  const TruncatedSvd<double> t = truncate(factors, k);
  CompressedImage c;
  c.precision = precision;
  c.rows = static_cast<std::uint32_t>(t.source_rows);
  c.cols = static_cast<std::uint32_t>(t.source_cols);
  c.rank = static_cast<std::uint32_t>(t.k);
  c.total_energy = t.total_energy;
  c.pixel_peak = pixel_peak;
  if (precision == Precision::F32) {
    c.sigma = t.sigma_k.cast<float>().cast<double>();
    c.u = t.u_k.cast<float>().cast<double>();
    c.v = t.v_k.cast<float>().cast<double>();
  } else {
    c.sigma = t.sigma_k;
    c.u = t.u_k;
    c.v = t.v_k;
  }
  return c;
}

Eigen::MatrixXd decode(const CompressedImage& c) {
  c.validate();
  return reconstruct(c.truncated()).unaryExpr([](double x) { return quantize_pixel(x); });
}

double compression_ratio(Eigen::Index rows, Eigen::Index cols, Eigen::Index k) {
  check_rank(rows, cols, k);
  return static_cast<double>(rows) * static_cast<double>(cols) /
         (static_cast<double>(k) * static_cast<double>(rows + cols + 1));
}

double byte_compression_ratio(Eigen::Index rows, Eigen::Index cols, Eigen::Index k,
                              Precision precision) {
  return compression_ratio(rows, cols, k) / static_cast<double>(scalar_bytes(precision));
}

std::vector<std::uint8_t> write_container(const CompressedImage& c) {
  c.validate();
  const std::size_t count = static_cast<std::size_t>(c.rank) * (1u + c.rows + c.cols);
  ByteWriter w(kContainerHeaderSize + count * scalar_bytes(c.precision));
  w.bytes(kMagic);
  w.u8(kContainerVersion);
  w.u8(static_cast<std::uint8_t>(c.precision));
  w.u8(0);
  w.u8(0);
  w.u32(c.rows);
  w.u32(c.cols);
  w.u32(c.rank);
  w.f64(c.total_energy);
  w.f64(c.pixel_peak);
  w.scalars(c.sigma, c.precision);
  w.scalars(c.u, c.precision);
  w.scalars(c.v, c.precision);
  return w.take();
}

bool is_container(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= kMagic.size() && std::equal(kMagic.begin(), kMagic.end(), bytes.begin());
}

CompressedImage read_container(std::span<const std::uint8_t> bytes) {
  if (!is_container(bytes)) {
    const bool prefix = bytes.size() < kMagic.size() &&
                        std::equal(bytes.begin(), bytes.end(), kMagic.begin());
    if (prefix) throw Error(ErrorCode::CorruptContainer, "stream shorter than the magic");
    throw Error(ErrorCode::BadMagic);
  }
  ByteReader r(bytes.subspan(kMagic.size()));
  const std::uint8_t version = r.u8();
  if (version != kContainerVersion) {
    throw Error(ErrorCode::UnsupportedVersion, "version " + std::to_string(version));
  }
  const std::uint8_t precision = r.u8();
  if (precision > 1) throw Error(ErrorCode::CorruptContainer, "unknown precision byte");
  if (r.u8() != 0 || r.u8() != 0) throw Error(ErrorCode::CorruptContainer, "reserved bytes not zero");

  CompressedImage c;
  c.precision = static_cast<Precision>(precision);
  c.rows = r.u32();
  c.cols = r.u32();
  c.rank = r.u32();
  c.total_energy = r.f64();
  c.pixel_peak = r.f64();
  if (c.rows < 1 || c.cols < 1 || c.rank < 1 || c.rank > std::min(c.rows, c.cols)) {
    throw Error(ErrorCode::CorruptContainer, "inconsistent dimensions");
  }
  const std::uint64_t per_rank = 1ull + c.rows + c.cols;
  const std::uint64_t width = scalar_bytes(c.precision);
  if (r.remaining() / width / c.rank != per_rank || r.remaining() % (width * c.rank) != 0) {
    throw Error(ErrorCode::CorruptContainer,
                "payload is " + std::to_string(r.remaining()) + " bytes, expected " +
                    std::to_string(per_rank * c.rank * width));
  }
  c.sigma.resize(c.rank);
  c.u.resize(c.rows, c.rank);
  c.v.resize(c.cols, c.rank);
  r.read_into(c.sigma, c.precision);
  r.read_into(c.u, c.precision);
  r.read_into(c.v, c.precision);
  c.validate();
  return c;
}

}  // namespace svdc
