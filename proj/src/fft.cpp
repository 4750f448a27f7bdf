#include "rodnn/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <utility>

#include "rodnn/error.hpp"

namespace rodnn::fft {

AlignedBuffer::AlignedBuffer(std::size_t n) { reserve(n); }

AlignedBuffer::~AlignedBuffer() {
  if (data_ != nullptr) fftw_free(data_);
}

AlignedBuffer::AlignedBuffer(AlignedBuffer&& other) noexcept
    : data_(std::exchange(other.data_, nullptr)),
      size_(std::exchange(other.size_, 0)),
      capacity_(std::exchange(other.capacity_, 0)) {}

AlignedBuffer& AlignedBuffer::operator=(AlignedBuffer&& other) noexcept {
  if (this != &other) {
    if (data_ != nullptr) fftw_free(data_);
    data_ = std::exchange(other.data_, nullptr);
    size_ = std::exchange(other.size_, 0);
    capacity_ = std::exchange(other.capacity_, 0);
  }
  return *this;
}

void AlignedBuffer::reserve(std::size_t n) {
  if (n <= capacity_) {
    size_ = n;
    return;
  }
  if (data_ != nullptr) fftw_free(data_);
  data_ = reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(n));
  if (data_ == nullptr) throw std::bad_alloc();
  size_ = capacity_ = n;
}

namespace {

class PlanCache {
 public:
  void configure(PlannerEffort effort, const std::optional<std::filesystem::path>& wisdom) {
    std::lock_guard lock(mutex_);
    effort_ = effort;
    wisdom_ = wisdom;
    if (wisdom_ && std::filesystem::exists(*wisdom_)) {
      fftw_import_wisdom_from_filename(wisdom_->c_str());
    }
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int ny, int nx, Direction dir) {
    const auto key = std::make_tuple(ny, nx, dir);
    std::lock_guard lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    AlignedBuffer scratch(static_cast<std::size_t>(ny) * static_cast<std::size_t>(nx));
    auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
    const unsigned flags = effort_ == PlannerEffort::measure ? FFTW_MEASURE : FFTW_ESTIMATE;
    fftw_plan plan =
        fftw_plan_dft_2d(ny, nx, p, p, dir == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD, flags);
    if (plan == nullptr) throw Error("fftw: failed to create plan");
    plans_.emplace(key, plan);
    if (effort_ == PlannerEffort::measure && wisdom_) save_wisdom();
    return plan;
  }

 private:
  void save_wisdom() const {
    // Write-then-rename so a concurrent reader never sees a partial file.
    auto tmp = *wisdom_;
    tmp += ".tmp";
    if (fftw_export_wisdom_to_filename(tmp.c_str()) != 0) {
      std::error_code ec;
      std::filesystem::rename(tmp, *wisdom_, ec);
    }
  }

  PlannerEffort effort_ = PlannerEffort::estimate;
  std::optional<std::filesystem::path> wisdom_;
  std::mutex mutex_;
  std::map<std::tuple<int, int, Direction>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

}  // namespace

void configure_planner(PlannerEffort effort, const std::optional<std::filesystem::path>& wisdom_file) {
  plan_cache().configure(effort, wisdom_file);
}

void transform_2d(AlignedBuffer& buffer, int ny, int nx, Direction dir) {
  if (buffer.size() != static_cast<std::size_t>(ny) * static_cast<std::size_t>(nx)) {
    throw DimensionError("fft: buffer size does not match transform shape");
  }
  fftw_plan plan = plan_cache().get(ny, nx, dir);
  auto* p = reinterpret_cast<fftw_complex*>(buffer.data());
  fftw_execute_dft(plan, p, p);
}

}  // namespace rodnn::fft
