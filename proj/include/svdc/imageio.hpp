#pragma once

// Binary PGM (P5) reading and writing, RGB to gray conversion, and the bridge
// between 8-bit pixels and real matrices.

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace svdc {

/// 8-bit grayscale raster, row-major.
struct ImageGray {
  static constexpr int kMaxval = 255;

  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(int row, int col) const {
    return pixels[static_cast<std::size_t>(row) * width + col];
  }
  bool operator==(const ImageGray&) const = default;
};

/// Parses binary PGM. Comments ("#" to end of line) are accepted wherever the
/// header allows whitespace. Only P5 with maxval <= 255 is supported.
ImageGray read_pgm(std::span<const std::uint8_t> bytes);

/// Parses P5 directly or P6 through to_gray().
ImageGray read_pnm_gray(std::span<const std::uint8_t> bytes);

/// Emits "P5\n<w> <h>\n255\n" followed by the raw pixels.
std::vector<std::uint8_t> write_pgm(const ImageGray& img);

/// Rec. 601 luma, rounded and clamped to [0, 255].
std::uint8_t to_gray(std::uint8_t r, std::uint8_t g, std::uint8_t b);

/// Rows are image rows: the result is height x width.
Eigen::MatrixXd image_to_matrix(const ImageGray& img);

/// Clamps each entry to [0, 255] then rounds half away from zero.
ImageGray matrix_to_image(const Eigen::Ref<const Eigen::MatrixXd>& m);

/// The pixel quantization rule shared by decode and matrix_to_image.
double quantize_pixel(double value);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace svdc
