#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <new>
#include <vector>

namespace wigner::detail {

template <class T>
struct FftwAllocator {
  using value_type = T;

  FftwAllocator() = default;
  template <class U>
  FftwAllocator(const FftwAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) {
    void* p = fftw_malloc(n * sizeof(T));
    if (p == nullptr) throw std::bad_alloc();
    return static_cast<T*>(p);
  }
  void deallocate(T* p, std::size_t) noexcept { fftw_free(p); }

  template <class U>
  bool operator==(const FftwAllocator<U>&) const noexcept { return true; }
};

using Complex = std::complex<double>;
/// Complex storage with FFTW's SIMD alignment. Plans are created for aligned
/// arrays, so every transformed buffer must be one of these.
using ComplexBuffer = std::vector<Complex, FftwAllocator<Complex>>;

enum class FftSign : int { forward = FFTW_FORWARD, backward = FFTW_BACKWARD };

struct FftLayout {
  int n;
  int howmany;
  int stride;
  int dist;
  FftSign sign;

  auto operator<=>(const FftLayout&) const = default;
};

// Plans are cached for the lifetime of the process. Planning is serialised;
// fftw_execute_dft on distinct arrays is thread-safe.
inline fftw_plan cached_plan(const FftLayout& layout) {
  static std::mutex mutex;
  static std::map<FftLayout, fftw_plan> plans;

  std::lock_guard lock(mutex);
  if (auto it = plans.find(layout); it != plans.end()) return it->second;

  const std::size_t extent = static_cast<std::size_t>(layout.howmany - 1) * layout.dist +
                             static_cast<std::size_t>(layout.n - 1) * layout.stride + 1;
  ComplexBuffer scratch(extent);
  auto* data = reinterpret_cast<fftw_complex*>(scratch.data());
  int n = layout.n;
  fftw_plan plan = fftw_plan_many_dft(1, &n, layout.howmany, data, nullptr, layout.stride,
                                      layout.dist, data, nullptr, layout.stride, layout.dist,
                                      static_cast<int>(layout.sign), FFTW_ESTIMATE);
  plans.emplace(layout, plan);
  return plan;
}

/// Unnormalised in-place transform of `rows` contiguous rows of length `cols`.
inline void fft_rows(ComplexBuffer& data, std::size_t rows, std::size_t cols, FftSign sign) {
  const FftLayout layout{static_cast<int>(cols), static_cast<int>(rows), 1,
                         static_cast<int>(cols), sign};
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(cached_plan(layout), p, p);
}

/// Unnormalised in-place transform along the columns of a row-major array.
inline void fft_cols(ComplexBuffer& data, std::size_t rows, std::size_t cols, FftSign sign) {
  const FftLayout layout{static_cast<int>(rows), static_cast<int>(cols),
                         static_cast<int>(cols), 1, sign};
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(cached_plan(layout), p, p);
}

inline void fft(ComplexBuffer& data, FftSign sign) { fft_rows(data, 1, data.size(), sign); }

/// Signed frequency index of FFT bin j for a transform of length n, in [-n/2, n/2).
inline long signed_index(std::size_t j, std::size_t n) {
  const long jj = static_cast<long>(j);
  const long nn = static_cast<long>(n);
  return jj < (nn + 1) / 2 ? jj : jj - nn;
}

}  // namespace wigner::detail
