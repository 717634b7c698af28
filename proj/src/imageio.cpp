#include "svdc/imageio.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include "svdc/error.hpp"

namespace svdc {

namespace {

constexpr long kMaxDimension = 1L << 20;

bool is_space(std::uint8_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  // Reads the two-byte magic and returns its digit ('5' for P5, ...).
  char signature() {
    if (bytes_.size() < 2 || bytes_[0] != 'P') throw Error(ErrorCode::BadSignature, "not a PNM file");
    pos_ = 2;
    return static_cast<char>(bytes_[1]);
  }

  long number(const char* field) {
    skip_space_and_comments();
    long value = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > kMaxDimension) throw Error(ErrorCode::MalformedHeader, std::string(field) + " too large");
      ++pos_;
      ++digits;
    }
    if (digits == 0) throw Error(ErrorCode::MalformedHeader, std::string("expected ") + field);
    return value;
  }

  // The single whitespace byte that separates maxval from the raster.
  void raster_separator() {
    if (pos_ >= bytes_.size() || !is_space(bytes_[pos_])) {
      throw Error(ErrorCode::MalformedHeader, "missing whitespace after maxval");
    }
    ++pos_;
  }

  std::span<const std::uint8_t> rest() const { return bytes_.subspan(pos_); }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (is_space(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else {
        return;
      }
    }
    throw Error(ErrorCode::MalformedHeader, "header ends early");
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

struct PnmHeader {
  char kind;
  int width;
  int height;
  std::span<const std::uint8_t> raster;
};

PnmHeader parse_header(std::span<const std::uint8_t> bytes) {
  HeaderReader reader(bytes);
  const char kind = reader.signature();
  if (kind != '5' && kind != '6') {
    throw Error(ErrorCode::BadSignature, std::string("unsupported PNM variant P") + kind);
  }
  const long width = reader.number("width");
  const long height = reader.number("height");
  const long maxval = reader.number("maxval");
  if (width < 1 || height < 1) throw Error(ErrorCode::MalformedHeader, "zero image dimension");
  if (maxval > ImageGray::kMaxval) {
    throw Error(ErrorCode::MaxvalUnsupported, "maxval " + std::to_string(maxval) + " > 255");
  }
  if (maxval < 1) throw Error(ErrorCode::MalformedHeader, "maxval must be positive");
  reader.raster_separator();
  return {kind, static_cast<int>(width), static_cast<int>(height), reader.rest()};
}

ImageGray decode_raster(const PnmHeader& h) {
  const std::size_t count = static_cast<std::size_t>(h.width) * static_cast<std::size_t>(h.height);
  const std::size_t channels = h.kind == '6' ? 3 : 1;
  if (h.raster.size() < count * channels) {
    throw Error(ErrorCode::TruncatedPixelData, "expected " + std::to_string(count * channels) +
                                                   " pixel bytes, found " + std::to_string(h.raster.size()));
  }
  ImageGray img;
  img.width = h.width;
  img.height = h.height;
  if (channels == 1) {
    img.pixels.assign(h.raster.begin(), h.raster.begin() + static_cast<std::ptrdiff_t>(count));
  } else {
    img.pixels.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      img.pixels[i] = to_gray(h.raster[3 * i], h.raster[3 * i + 1], h.raster[3 * i + 2]);
    }
  }
  return img;
}

}  // namespace

ImageGray read_pgm(std::span<const std::uint8_t> bytes) {
  const PnmHeader h = parse_header(bytes);
  if (h.kind != '5') throw Error(ErrorCode::BadSignature, "expected P5");
  return decode_raster(h);
}

ImageGray read_pnm_gray(std::span<const std::uint8_t> bytes) { return decode_raster(parse_header(bytes)); }

std::vector<std::uint8_t> write_pgm(const ImageGray& img) {
  const std::string header =
      "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.pixels.begin(), img.pixels.end());
  return out;
}

std::uint8_t to_gray(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const double y = 0.299 * r + 0.587 * g + 0.114 * b;
  return static_cast<std::uint8_t>(std::clamp(std::round(y), 0.0, 255.0));
}

double quantize_pixel(double value) { return std::round(std::clamp(value, 0.0, 255.0)); }

Eigen::MatrixXd image_to_matrix(const ImageGray& img) {
  Eigen::MatrixXd m(img.height, img.width);
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) m(r, c) = img.at(r, c);
  }
  return m;
}

ImageGray matrix_to_image(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  if (!m.allFinite()) throw Error(ErrorCode::NonFiniteInput, "matrix contains NaN or Inf");
  ImageGray img;
  img.height = static_cast<int>(m.rows());
  img.width = static_cast<int>(m.cols());
  img.pixels.resize(static_cast<std::size_t>(m.size()));
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      img.pixels[static_cast<std::size_t>(r) * img.width + c] =
          static_cast<std::uint8_t>(quantize_pixel(m(r, c)));
    }
  }
  return img;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::Io, "read failed for " + path.string());
  return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace svdc
