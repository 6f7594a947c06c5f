#include "corrsync/tensor_io.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <iterator>

namespace corrsync {

namespace {

constexpr std::array<char, 4> kMagic = {'C', 'T', 'F', '1'};
constexpr std::uint16_t kVersion = 1;
constexpr std::size_t kFixedHeader = 8;

void put_le(std::vector<std::byte>& out, std::uint64_t v, int nbytes) {
  for (int i = 0; i < nbytes; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_le(std::span<const std::byte> buf, std::size_t off, int nbytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < nbytes; ++i) v |= static_cast<std::uint64_t>(buf[off + i]) << (8 * i);
  return v;
}

// Payload is stored little-endian; swap element bytes in place on big-endian hosts.
void to_from_le(std::span<std::byte> payload, std::size_t elem) {
  if constexpr (std::endian::native == std::endian::little) {
    (void)payload;
    (void)elem;
  } else {
    for (std::size_t i = 0; i + elem <= payload.size(); i += elem)
      std::reverse(payload.begin() + i, payload.begin() + i + elem);
  }
}

bool valid_dtype(std::uint8_t code) { return code <= 3; }

}  // namespace

std::size_t dtype_size(DType dt) {
  switch (dt) {
    case DType::u8: return 1;
    case DType::i32: return 4;
    case DType::f32: return 4;
    case DType::f64: return 8;
  }
  fail(Errc::format, "unknown dtype");
}

std::string_view dtype_name(DType dt) {
  switch (dt) {
    case DType::u8: return "u8";
    case DType::i32: return "i32";
    case DType::f32: return "f32";
    case DType::f64: return "f64";
  }
  return "?";
}

Tensor::Tensor(DType dtype, std::vector<std::uint64_t> dims) : dtype_(dtype), dims_(std::move(dims)) {
  require(!dims_.empty() && dims_.size() <= 255, Errc::invalid_argument, "Tensor: ndim must be in [1, 255]");
  data_.resize(numel() * dtype_size(dtype_));
}

std::size_t Tensor::numel() const noexcept {
  if (dims_.empty()) return 0;
  std::size_t n = 1;
  for (auto d : dims_) n *= static_cast<std::size_t>(d);
  return n;
}

std::vector<double> Tensor::as_f64() const {
  const std::size_t n = numel();
  std::vector<double> out(n);
  switch (dtype_) {
    case DType::u8:
      for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<double>(std::to_integer<std::uint8_t>(data_[i]));
      break;
    case DType::i32: {
      auto v = values<std::int32_t>();
      std::copy(v.begin(), v.end(), out.begin());
      break;
    }
    case DType::f32: {
      auto v = values<float>();
      std::copy(v.begin(), v.end(), out.begin());
      break;
    }
    case DType::f64:
      out = values<double>();
      break;
  }
  return out;
}

std::vector<std::byte> encode_tensor(const Tensor& t) {
  std::vector<std::byte> out;
  out.reserve(kFixedHeader + 8 * t.ndim() + t.bytes().size());
  for (char c : kMagic) out.push_back(static_cast<std::byte>(c));
  put_le(out, kVersion, 2);
  put_le(out, static_cast<std::uint8_t>(t.dtype()), 1);
  put_le(out, t.ndim(), 1);
  for (auto d : t.dims()) put_le(out, d, 8);
  const std::size_t payload_at = out.size();
  out.insert(out.end(), t.bytes().begin(), t.bytes().end());
  to_from_le(std::span(out).subspan(payload_at), dtype_size(t.dtype()));
  return out;
}

Tensor decode_tensor(std::span<const std::byte> buf) {
  require(buf.size() >= kFixedHeader, Errc::format, "CTF: truncated header");
  for (std::size_t i = 0; i < kMagic.size(); ++i)
    require(static_cast<char>(buf[i]) == kMagic[i], Errc::format, "CTF: bad magic");
  const auto version = get_le(buf, 4, 2);
  require(version == kVersion, Errc::format, "CTF: unsupported version");
  const auto code = static_cast<std::uint8_t>(get_le(buf, 6, 1));
  require(valid_dtype(code), Errc::format, "CTF: unknown dtype");
  const auto ndim = static_cast<std::size_t>(get_le(buf, 7, 1));
  require(ndim >= 1, Errc::format, "CTF: ndim must be at least 1");
  require(buf.size() >= kFixedHeader + 8 * ndim, Errc::format, "CTF: truncated dims");
  std::vector<std::uint64_t> dims(ndim);
  for (std::size_t i = 0; i < ndim; ++i) dims[i] = get_le(buf, kFixedHeader + 8 * i, 8);

  const auto dtype = static_cast<DType>(code);
  // Guard the product against overflow before allocating.
  const bool has_zero = std::find(dims.begin(), dims.end(), 0) != dims.end();
  std::uint64_t need = has_zero ? 0 : dtype_size(dtype);
  for (auto d : dims) {
    if (need != 0 && need > buf.size() / d) fail(Errc::format, "CTF: truncated payload");
    need *= d;
  }
  const std::size_t payload_at = kFixedHeader + 8 * ndim;
  require(buf.size() - payload_at == static_cast<std::size_t>(need), Errc::format,
          buf.size() - payload_at < need ? "CTF: truncated payload" : "CTF: trailing bytes after payload");

  Tensor t(dtype, std::move(dims));
  std::copy(buf.begin() + payload_at, buf.end(), t.bytes().begin());
  to_from_le(t.bytes(), dtype_size(dtype));
  return t;
}

void write_tensor(const std::filesystem::path& path, const Tensor& t) {
  const auto bytes = encode_tensor(t);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(Errc::io, "cannot open for writing: " + path.string());
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) fail(Errc::io, "write failed: " + path.string());
}

Tensor read_tensor(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(Errc::io, "cannot open for reading: " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return decode_tensor(std::as_bytes(std::span(raw)));
}

}  // namespace corrsync
