#include "rodnn/propagation.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <tuple>

#include "rodnn/error.hpp"
#include "rodnn/fft.hpp"

namespace rodnn {

void PropagationParams::validate() const {
  if (pad_factor < 1) throw InvalidArgument("propagation: pad_factor must be >= 1");
}

std::vector<Complex> transfer_function(const GridSpec& grid, double z, EvanescentPolicy policy) {
  grid.validate();
  const double k = 2.0 * std::numbers::pi / grid.wavelength;
  const double lambda2 = grid.wavelength * grid.wavelength;
  std::vector<Complex> h(grid.size());
  for (int iy = 0; iy < grid.ny; ++iy) {
    const double fy = spatial_frequency(iy, grid.ny, grid.pitch);
    for (int ix = 0; ix < grid.nx; ++ix) {
      const double fx = spatial_frequency(ix, grid.nx, grid.pitch);
      const double arg = 1.0 - lambda2 * (fx * fx + fy * fy);
      Complex& out = h[static_cast<std::size_t>(iy) * grid.nx + ix];
      if (arg >= 0.0) {
        out = std::polar(1.0, k * z * std::sqrt(arg));
      } else if (policy == EvanescentPolicy::keep_decaying) {
        out = std::exp(-k * std::abs(z) * std::sqrt(-arg));
      } else {
        out = 0.0;
      }
    }
  }
  return h;
}

namespace {

// H / N for a padded grid, so a forward FFT, one multiply, and an inverse FFT
// implement the unit-gain convolution.
using Kernel = std::vector<Complex>;
using KernelKey = std::tuple<int, int, double, double, double, EvanescentPolicy>;

class KernelCache {
 public:
  std::shared_ptr<const Kernel> get(const GridSpec& padded, double z, EvanescentPolicy policy) {
    const KernelKey key{padded.nx, padded.ny, padded.pitch, padded.wavelength, z, policy};
    {
      std::shared_lock lock(mutex_);
      if (auto it = kernels_.find(key); it != kernels_.end()) return it->second;
    }
    auto h = transfer_function(padded, z, policy);
    const double scale = 1.0 / static_cast<double>(padded.size());
    for (auto& v : h) v *= scale;
    auto kernel = std::make_shared<const Kernel>(std::move(h));

    std::unique_lock lock(mutex_);
    if (auto it = kernels_.find(key); it != kernels_.end()) return it->second;
    if (kernels_.size() >= kMaxEntries) kernels_.clear();
    kernels_.emplace(key, kernel);
    return kernel;
  }

  void clear() {
    std::unique_lock lock(mutex_);
    kernels_.clear();
  }

 private:
  static constexpr std::size_t kMaxEntries = 64;
  std::shared_mutex mutex_;
  std::map<KernelKey, std::shared_ptr<const Kernel>> kernels_;
};

KernelCache& kernel_cache() {
  static KernelCache cache;
  return cache;
}

WaveField filter(const WaveField& field, double z, const PropagationParams& params, bool adjoint) {
  params.validate();
  const GridSpec& g = field.grid();
  GridSpec padded = g;
  padded.nx = g.nx * params.pad_factor;
  padded.ny = g.ny * params.pad_factor;
  const int ox = (padded.nx - g.nx) / 2;
  const int oy = (padded.ny - g.ny) / 2;

  const auto kernel = kernel_cache().get(padded, z, params.evanescent);

  thread_local fft::AlignedBuffer buf;
  buf.reserve(padded.size());
  std::fill(buf.data(), buf.data() + buf.size(), Complex{});
  for (int iy = 0; iy < g.ny; ++iy) {
    const Complex* src = &field.at(iy, 0);
    std::copy(src, src + g.nx, buf.data() + static_cast<std::size_t>(iy + oy) * padded.nx + ox);
  }

  fft::transform_2d(buf, padded.ny, padded.nx, fft::Direction::forward);
  const Complex* h = kernel->data();
  Complex* d = buf.data();
  if (adjoint) {
    for (std::size_t i = 0; i < buf.size(); ++i) d[i] *= std::conj(h[i]);
  } else {
    for (std::size_t i = 0; i < buf.size(); ++i) d[i] *= h[i];
  }
  fft::transform_2d(buf, padded.ny, padded.nx, fft::Direction::inverse);

  WaveField out(g);
  for (int iy = 0; iy < g.ny; ++iy) {
    const Complex* src = buf.data() + static_cast<std::size_t>(iy + oy) * padded.nx + ox;
    std::copy(src, src + g.nx, &out.at(iy, 0));
  }
  return out;
}

}  // namespace

WaveField propagate(const WaveField& field, double z, const PropagationParams& params) {
  return filter(field, z, params, false);
}

WaveField propagate_adjoint(const WaveField& field, double z, const PropagationParams& params) {
  return filter(field, z, params, true);
}

void clear_transfer_cache() { kernel_cache().clear(); }

}  // namespace rodnn
