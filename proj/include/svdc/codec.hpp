#pragma once

// SVDC container: truncated SVD factors of an 8-bit grayscale image.
//
// Layout (little-endian):
//   0..3   "SVDC"
//   4      version (1)
//   5      precision (0 = f32, 1 = f64)
//   6..7   reserved, zero
//   8      u32 rows m
//   12     u32 cols n
//   16     u32 rank k
//   20     f64 total energy (squared Frobenius norm of the source image)
//   28     f64 pixel peak (largest source pixel)
//   36     sigma_k (k scalars), u_k (m*k, column-major), v_k (n*k, column-major)

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

#include "svdc/linalg.hpp"

namespace svdc {

enum class Precision : std::uint8_t { F32 = 0, F64 = 1 };

inline constexpr std::uint8_t kContainerVersion = 1;
inline constexpr std::size_t kContainerHeaderSize = 36;

inline std::size_t scalar_bytes(Precision p) { return p == Precision::F32 ? 4 : 8; }

/// Payload values are held as doubles; with F32 they are exactly the stored floats.
struct CompressedImage {
  Precision precision = Precision::F32;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::uint32_t rank = 0;
  double total_energy = 0.0;
  double pixel_peak = 0.0;
  Eigen::VectorXd sigma;  // rank
  Eigen::MatrixXd u;      // rows x rank
  Eigen::MatrixXd v;      // cols x rank

  /// Throws CorruptContainer when the fields are inconsistent.
  void validate() const;
  TruncatedSvd<double> truncated() const;

  bool operator==(const CompressedImage& o) const;
};

struct RankSelection {
  Eigen::Index k = 0;
  double achieved_e = 0.0;
  double target_e = 0.0;
};

/// Smallest k whose energy ratio reaches `target_e` (0 < target_e <= 1).
RankSelection choose_rank(const SvdFactors<double>& factors, double target_e);

/// Factor, truncate and store an image whose entries lie in [0, 255].
CompressedImage encode(const Eigen::Ref<const Eigen::MatrixXd>& image, Eigen::Index k,
                       Precision precision, const SvdOptions& opts = {});

/// Same as encode() for a factorization the caller already holds.
CompressedImage encode_factors(const SvdFactors<double>& factors, Eigen::Index k,
                               Precision precision, double pixel_peak);

/// Reconstruction clamped to [0, 255] and rounded half away from zero.
Eigen::MatrixXd decode(const CompressedImage& c);

/// Stored values over pixel count, m n / (k (m + n + 1)).
double compression_ratio(Eigen::Index rows, Eigen::Index cols, Eigen::Index k);
/// Same, counting bytes: one per source pixel against the stored scalar width.
double byte_compression_ratio(Eigen::Index rows, Eigen::Index cols, Eigen::Index k,
                              Precision precision);

std::vector<std::uint8_t> write_container(const CompressedImage& c);
CompressedImage read_container(std::span<const std::uint8_t> bytes);

/// True when `bytes` starts with the container magic.
bool is_container(std::span<const std::uint8_t> bytes);

}  // namespace svdc
