#include "corrsync/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

namespace corrsync {

FrameImage::FrameImage(int height, int width, double fill) : height_(height), width_(width) {
  require(height > 0 && width > 0, Errc::invalid_argument, "FrameImage: dimensions must be positive");
  values_.assign(static_cast<std::size_t>(kChannels) * height * width, fill);
}

FrameImage::FrameImage(int height, int width, std::vector<double> values)
    : height_(height), width_(width), values_(std::move(values)) {
  require(height > 0 && width > 0, Errc::invalid_argument, "FrameImage: dimensions must be positive");
  require(values_.size() == static_cast<std::size_t>(kChannels) * height * width, Errc::shape_mismatch,
          "FrameImage: value count does not match dimensions");
}

Tensor FrameImage::to_tensor() const {
  return Tensor::from<double>({kChannels, static_cast<std::uint64_t>(height_), static_cast<std::uint64_t>(width_)},
                              values_);
}

FrameImage FrameImage::from_tensor(const Tensor& t) {
  require(t.dtype() == DType::f64 || t.dtype() == DType::f32, Errc::format, "image tensor must be f32 or f64");
  require(t.ndim() == 3 && t.dim(0) == kChannels, Errc::shape_mismatch, "image tensor must have shape 3 x H x W");
  return FrameImage(static_cast<int>(t.dim(1)), static_cast<int>(t.dim(2)), t.as_f64());
}

Rgb8Image to_rgb8(const FrameImage& img) {
  Rgb8Image out{img.width(), img.height(), {}};
  out.rgb.resize(static_cast<std::size_t>(img.width()) * img.height() * 3);
  std::size_t k = 0;
  for (int r = 0; r < img.height(); ++r)
    for (int c = 0; c < img.width(); ++c)
      for (int ch = 0; ch < 3; ++ch)
        out.rgb[k++] = static_cast<std::uint8_t>(std::lround(std::clamp(img(ch, r, c), 0.0, 1.0) * 255.0));
  return out;
}

std::vector<std::uint8_t> encode_ppm(const Rgb8Image& img) {
  require(img.rgb.size() == static_cast<std::size_t>(img.width) * img.height * 3, Errc::shape_mismatch,
          "encode_ppm: pixel buffer size mismatch");
  const std::string header = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.rgb.begin(), img.rgb.end());
  return out;
}

Rgb8Image decode_ppm(const std::vector<std::uint8_t>& bytes) {
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_int = [&] {
    skip_space();
    require(pos < bytes.size() && std::isdigit(bytes[pos]), Errc::format, "PPM: expected integer in header");
    long v = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      v = v * 10 + (bytes[pos++] - '0');
      require(v <= 1 << 20, Errc::format, "PPM: header value too large");
    }
    return static_cast<int>(v);
  };
  require(bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6', Errc::format, "PPM: not a binary P6 file");
  pos = 2;
  Rgb8Image img;
  img.width = read_int();
  img.height = read_int();
  const int maxval = read_int();
  require(maxval == 255, Errc::format, "PPM: only maxval 255 is supported");
  require(pos < bytes.size() && std::isspace(bytes[pos]), Errc::format, "PPM: missing separator before raster");
  ++pos;
  const std::size_t n = static_cast<std::size_t>(img.width) * img.height * 3;
  require(bytes.size() - pos == n, Errc::format, "PPM: raster size mismatch");
  img.rgb.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end());
  return img;
}

void write_ppm(const std::filesystem::path& path, const Rgb8Image& img) {
  const auto bytes = encode_ppm(img);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(Errc::io, "cannot open for writing: " + path.string());
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) fail(Errc::io, "write failed: " + path.string());
}

Rgb8Image read_ppm(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(Errc::io, "cannot open for reading: " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return decode_ppm(bytes);
}

}  // namespace corrsync
