#pragma once

// CTF1 tensor container.
//
//   offset  size        field
//   0       4           magic "CTF1"
//   4       2           u16 version (= 1)
//   6       1           u8 dtype (0=u8, 1=i32, 2=f32, 3=f64)
//   7       1           u8 ndim
//   8       8*ndim      u64 dims
//   ...     prod(dims)*sizeof(dtype)   row-major payload
//
// All multi-byte fields are little-endian.

#include <cstddef>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "corrsync/error.hpp"

namespace corrsync {

enum class DType : std::uint8_t { u8 = 0, i32 = 1, f32 = 2, f64 = 3 };

std::size_t dtype_size(DType dt);
std::string_view dtype_name(DType dt);

template <class T>
constexpr DType dtype_of() {
  if constexpr (std::is_same_v<T, std::uint8_t>) return DType::u8;
  else if constexpr (std::is_same_v<T, std::int32_t>) return DType::i32;
  else if constexpr (std::is_same_v<T, float>) return DType::f32;
  else {
    static_assert(std::is_same_v<T, double>, "unsupported tensor element type");
    return DType::f64;
  }
}

class Tensor {
 public:
  Tensor() = default;
  /// Zero-filled tensor.
  Tensor(DType dtype, std::vector<std::uint64_t> dims);

  template <class T>
  static Tensor from(std::vector<std::uint64_t> dims, std::span<const T> values) {
    Tensor t(dtype_of<T>(), std::move(dims));
    require(values.size() == t.numel(), Errc::shape_mismatch, "Tensor::from: value count does not match dims");
    if (!values.empty()) std::memcpy(t.data_.data(), values.data(), values.size_bytes());
    return t;
  }
  template <class T>
  static Tensor from(std::vector<std::uint64_t> dims, const std::vector<T>& values) {
    return from<T>(std::move(dims), std::span<const T>(values));
  }

  DType dtype() const noexcept { return dtype_; }
  const std::vector<std::uint64_t>& dims() const noexcept { return dims_; }
  std::size_t ndim() const noexcept { return dims_.size(); }
  std::uint64_t dim(std::size_t i) const { return dims_.at(i); }
  std::size_t numel() const noexcept;

  std::span<const std::byte> bytes() const noexcept { return data_; }
  std::span<std::byte> bytes() noexcept { return data_; }

  /// Copy of the payload; the dtype must match T exactly.
  template <class T>
  std::vector<T> values() const {
    require(dtype_ == dtype_of<T>(), Errc::format, "Tensor::values: dtype mismatch");
    std::vector<T> out(numel());
    if (!out.empty()) std::memcpy(out.data(), data_.data(), data_.size());
    return out;
  }

  /// Payload converted to double from any dtype.
  std::vector<double> as_f64() const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  DType dtype_ = DType::u8;
  std::vector<std::uint64_t> dims_;
  std::vector<std::byte> data_;
};

std::vector<std::byte> encode_tensor(const Tensor& t);
Tensor decode_tensor(std::span<const std::byte> buf);

void write_tensor(const std::filesystem::path& path, const Tensor& t);
Tensor read_tensor(const std::filesystem::path& path);

}  // namespace corrsync
