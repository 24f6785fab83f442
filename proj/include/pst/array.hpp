#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <new>
#include <span>
#include <vector>

#include "pst/error.hpp"

namespace pst {

/// Allocator handing out 64-byte aligned storage so every buffer shares the
/// alignment the FFT plans were created with.
template <class T, std::size_t Alignment = 64>
struct AlignedAllocator {
  using value_type = T;

  template <class U>
  struct rebind {
    using other = AlignedAllocator<U, Alignment>;
  };

  AlignedAllocator() noexcept = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U, Alignment>&) noexcept {}

  T* allocate(std::size_t n) {
    return static_cast<T*>(::operator new(n * sizeof(T), std::align_val_t{Alignment}));
  }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, std::align_val_t{Alignment}); }

  template <class U>
  bool operator==(const AlignedAllocator<U, Alignment>&) const noexcept {
    return true;
  }
};

/// Row-major 2D array. A 1D signal is an array of height 1.
template <class T, class Alloc = std::allocator<T>>
class Array2 {
 public:
  using value_type = T;

  Array2() = default;
  Array2(std::size_t width, std::size_t height, const T& fill = T{})
      : width_(width), height_(height), data_(width * height, fill) {}

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t x, std::size_t y) noexcept { return data_[y * width_ + x]; }
  const T& operator()(std::size_t x, std::size_t y) const noexcept { return data_[y * width_ + x]; }

  T& operator[](std::size_t i) noexcept { return data_[i]; }
  const T& operator[](std::size_t i) const noexcept { return data_[i]; }

  T* data() noexcept { return data_.data(); }
  const T* data() const noexcept { return data_.data(); }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }

  std::span<T> row(std::size_t y) noexcept { return {data_.data() + y * width_, width_}; }
  std::span<const T> row(std::size_t y) const noexcept { return {data_.data() + y * width_, width_}; }

  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  template <class U, class A>
  bool same_shape(const Array2<U, A>& other) const noexcept {
    return width_ == other.width() && height_ == other.height();
  }

  bool operator==(const Array2& other) const = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<T, Alloc> data_;
};

using Complex = std::complex<double>;

/// Real-valued spatial field (image intensities, responses, kernels).
using Field = Array2<double>;

/// Complex spatial field, e.g. the stretch operator output E_o.
using ComplexField = Array2<Complex, AlignedAllocator<Complex>>;

/// Real field in FFT-aligned storage.
using AlignedField = Array2<double, AlignedAllocator<double>>;

inline Field as_row(std::span<const double> signal) {
  Field out(signal.size(), 1);
  std::copy(signal.begin(), signal.end(), out.begin());
  return out;
}

}  // namespace pst
