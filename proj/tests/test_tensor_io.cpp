#include <filesystem>

#include "corrsync/image.hpp"
#include "corrsync/rng.hpp"
#include "corrsync/tensor_io.hpp"
#include "doctest.h"

using namespace corrsync;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("corrsync_test_" + name);
}

Tensor random_tensor(Rng& rng, DType dt) {
  const std::uint64_t ndim = 1 + rng.below(3);
  std::vector<std::uint64_t> dims;
  for (std::uint64_t i = 0; i < ndim; ++i) dims.push_back(rng.below(6));
  Tensor t(dt, dims);
  for (auto& b : t.bytes()) b = static_cast<std::byte>(rng.below(256));
  return t;
}

}  // namespace

TEST_CASE("CTF empty tensor round trips") {
  const Tensor t(DType::f32, {0});
  const auto bytes = encode_tensor(t);
  CHECK(bytes.size() == 16);
  CHECK(decode_tensor(bytes) == t);
}

TEST_CASE("CTF header layout and size for f64 3x2") {
  const std::vector<double> v = {1, 2, 3, 4, 5, 6};
  const Tensor t = Tensor::from<double>({3, 2}, v);
  const auto path = temp_file("f64_3x2.ctf");
  write_tensor(path, t);
  CHECK(std::filesystem::file_size(path) == 8 + 2 * 8 + 48);

  const auto b = encode_tensor(t);
  CHECK(static_cast<char>(b[0]) == 'C');
  CHECK(static_cast<char>(b[3]) == '1');
  CHECK(std::to_integer<int>(b[4]) == 1);  // version, little-endian
  CHECK(std::to_integer<int>(b[5]) == 0);
  CHECK(std::to_integer<int>(b[6]) == 3);  // f64
  CHECK(std::to_integer<int>(b[7]) == 2);  // ndim
  CHECK(std::to_integer<int>(b[8]) == 3);
  CHECK(std::to_integer<int>(b[16]) == 2);
  // 1.0 = 0x3FF0000000000000, little-endian: last byte of the first element.
  CHECK(std::to_integer<int>(b[24 + 7]) == 0x3f);
  CHECK(std::to_integer<int>(b[24 + 6]) == 0xf0);
  CHECK(read_tensor(path) == t);
}

TEST_CASE("CTF random tensors round trip bit-exactly for every dtype") {
  Rng rng(11);
  for (DType dt : {DType::u8, DType::i32, DType::f32, DType::f64}) {
    for (int k = 0; k < 25; ++k) {
      const Tensor t = random_tensor(rng, dt);
      CHECK(decode_tensor(encode_tensor(t)) == t);
    }
  }
  const Tensor t = random_tensor(rng, DType::i32);
  const auto path = temp_file("random.ctf");
  write_tensor(path, t);
  CHECK(read_tensor(path) == t);
}

TEST_CASE("CTF rejects malformed input") {
  const Tensor t = Tensor::from<std::int32_t>({2}, std::vector<std::int32_t>{7, 9});
  auto good = encode_tensor(t);

  auto bad_magic = good;
  bad_magic[0] = std::byte{'X'};
  CHECK_THROWS_AS(decode_tensor(bad_magic), Error);

  auto truncated = good;
  truncated.pop_back();
  CHECK_THROWS_AS(decode_tensor(truncated), Error);

  auto bad_dtype = good;
  bad_dtype[6] = std::byte{9};
  CHECK_THROWS_AS(decode_tensor(bad_dtype), Error);

  auto trailing = good;
  trailing.push_back(std::byte{0});
  CHECK_THROWS_AS(decode_tensor(trailing), Error);

  std::vector<std::byte> tiny(5);
  CHECK_THROWS_AS(decode_tensor(tiny), Error);

  CHECK_THROWS_AS(read_tensor("/nonexistent/dir/x.ctf"), Error);
}

TEST_CASE("CTF dtype conversion to f64") {
  const Tensor t = Tensor::from<std::uint8_t>({3}, std::vector<std::uint8_t>{0, 128, 255});
  CHECK(t.as_f64() == std::vector<double>{0.0, 128.0, 255.0});
  CHECK_THROWS_AS(t.values<double>(), Error);
}

TEST_CASE("PPM encoding is byte exact") {
  Rgb8Image img{2, 1, {255, 0, 0, 1, 2, 3}};
  const auto bytes = encode_ppm(img);
  const std::string header = "P6\n2 1\n255\n";
  REQUIRE(bytes.size() == header.size() + 6);
  CHECK(std::string(bytes.begin(), bytes.begin() + header.size()) == header);
  CHECK(bytes.back() == 3);
  CHECK(decode_ppm(bytes) == img);

  const auto path = temp_file("img.ppm");
  write_ppm(path, img);
  CHECK(read_ppm(path) == img);
}

TEST_CASE("PPM decoder tolerates comments and rejects other formats") {
  const std::string text = "P6\n# comment\n1 1\n255\n";
  std::vector<std::uint8_t> bytes(text.begin(), text.end());
  bytes.insert(bytes.end(), {10, 20, 30});
  CHECK(decode_ppm(bytes).rgb == std::vector<std::uint8_t>{10, 20, 30});

  const std::string p3 = "P3\n1 1\n255\n1 2 3\n";
  CHECK_THROWS_AS(decode_ppm(std::vector<std::uint8_t>(p3.begin(), p3.end())), Error);
  const std::string deep = "P6\n1 1\n65535\n";
  CHECK_THROWS_AS(decode_ppm(std::vector<std::uint8_t>(deep.begin(), deep.end())), Error);
}

TEST_CASE("FrameImage to 8-bit rounds and clamps") {
  FrameImage img(1, 1);
  img(0, 0, 0) = 0.5;
  img(1, 0, 0) = -2.0;
  img(2, 0, 0) = 1.5;
  const auto rgb = to_rgb8(img);
  CHECK(rgb.rgb == std::vector<std::uint8_t>{128, 0, 255});
}
