#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>

namespace rodnn::fft {

enum class Direction { forward, inverse };

/// Heap buffer with the alignment FFTW's SIMD kernels expect.
class AlignedBuffer {
 public:
  AlignedBuffer() = default;
  explicit AlignedBuffer(std::size_t n);
  ~AlignedBuffer();
  AlignedBuffer(AlignedBuffer&& other) noexcept;
  AlignedBuffer& operator=(AlignedBuffer&& other) noexcept;
  AlignedBuffer(const AlignedBuffer&) = delete;
  AlignedBuffer& operator=(const AlignedBuffer&) = delete;

  std::complex<double>* data() { return data_; }
  const std::complex<double>* data() const { return data_; }
  std::size_t size() const { return size_; }
  std::span<std::complex<double>> span() { return {data_, size_}; }

  /// Resizes to n elements, reallocating only when n exceeds the capacity.
  /// Contents are unspecified afterwards.
  void reserve(std::size_t n);

 private:
  std::complex<double>* data_ = nullptr;
  std::size_t size_ = 0;
  std::size_t capacity_ = 0;
};

enum class PlannerEffort { estimate, measure };

/// Selects how plans for not-yet-seen shapes are chosen. `estimate` is
/// reproducible from process to process. `measure` times candidate algorithms
/// (about twice as fast at 240x240) and is reproducible only through the
/// wisdom file: it is imported before the first plan and rewritten after each
/// new plan, so later processes reuse the same algorithms. Existing plans are
/// kept.
void configure_planner(PlannerEffort effort, const std::optional<std::filesystem::path>& wisdom_file = std::nullopt);

/// Unnormalized in-place 2D transform of an ny x nx row-major array that
/// lives in an AlignedBuffer. Forward uses exp(-i...), inverse exp(+i...).
/// Plans are created once per shape under a lock and executed lock-free, so
/// concurrent callers are safe.
void transform_2d(AlignedBuffer& buffer, int ny, int nx, Direction dir);

}  // namespace rodnn::fft
