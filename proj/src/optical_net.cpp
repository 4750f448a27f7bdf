#include "rodnn/optical_net.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rodnn/error.hpp"

namespace rodnn {

void NeuronPhysics::validate() const {
  if (!(theta_max > 0.0 && theta_max < 2.0 * std::numbers::pi)) {
    throw InvalidArgument("physics: Theta must lie in (0, 2pi), got " + std::to_string(theta_max));
  }
  if (!(k_ratio > 0.0) || !std::isfinite(k_ratio)) {
    throw InvalidArgument("physics: K must be > 0, got " + std::to_string(k_ratio));
  }
}

Complex neuron_transmission(NeuronState state, const NeuronPhysics& physics) {
  if (state == NeuronState::amorphous) return {1.0, 0.0};
  return std::polar(std::sqrt(physics.k_ratio), physics.theta_max);
}

WaveField apply_layer(const WaveField& field, const DiffractiveLayer& layer) {
  if (!field.grid().same_shape(layer.grid) || layer.phase.size() != field.grid().size() ||
      layer.amplitude.size() != field.grid().size()) {
    throw DimensionError("apply_layer: field is " + std::to_string(field.grid().nx) + "x" +
                         std::to_string(field.grid().ny) + " but layer is " +
                         std::to_string(layer.grid.nx) + "x" + std::to_string(layer.grid.ny));
  }
  WaveField out = field;
  auto s = out.samples();
  for (std::size_t i = 0; i < s.size(); ++i) s[i] *= std::polar(layer.amplitude[i], layer.phase[i]);
  return out;
}

bool DetectorRegion::contains(double x, double y) const {
  const double h = side / 2.0;
  return x >= cx - h && x < cx + h && y >= cy - h && y < cy + h;
}

DetectorLayout DetectorLayout::rows_3_4_3(double side, double row_spacing, double col_pitch) {
  DetectorLayout layout;
  constexpr std::array<int, 3> per_row{3, 4, 3};
  int idx = 0;
  for (int r = 0; r < 3; ++r) {
    const double y = (r - 1) * row_spacing;
    for (int j = 0; j < per_row[r]; ++j) {
      const double x = (j - (per_row[r] - 1) / 2.0) * col_pitch;
      layout.regions[idx++] = DetectorRegion{x, y, side};
    }
  }
  return layout;
}

void DetectorLayout::validate(const GridSpec& grid) const {
  const double hx = grid.extent_x() / 2.0;
  const double hy = grid.extent_y() / 2.0;
  for (int i = 0; i < kNumClasses; ++i) {
    const auto& r = regions[i];
    const double h = r.side / 2.0;
    if (!(r.side > 0.0)) throw InvalidArgument("detector " + std::to_string(i) + ": side must be > 0");
    if (r.cx - h < -hx || r.cx + h > hx || r.cy - h < -hy || r.cy + h > hy) {
      throw InvalidArgument("detector " + std::to_string(i) + " extends outside the grid");
    }
    for (int j = 0; j < i; ++j) {
      const auto& o = regions[j];
      const double reach = (r.side + o.side) / 2.0;
      if (std::abs(r.cx - o.cx) < reach && std::abs(r.cy - o.cy) < reach) {
        throw InvalidArgument("detectors " + std::to_string(j) + " and " + std::to_string(i) + " overlap");
      }
    }
  }
}

std::array<std::vector<std::size_t>, kNumClasses> DetectorLayout::masks(const GridSpec& grid) const {
  // Candidate index window from the region bounds (padded by one sample),
  // then the exact half-open membership test.
  auto window = [](double lo, double hi, int n, double pitch) {
    const int a = std::max(0, static_cast<int>(std::floor(lo / pitch + n / 2.0 - 0.5)) - 1);
    const int b = std::min(n - 1, static_cast<int>(std::ceil(hi / pitch + n / 2.0 - 0.5)) + 1);
    return std::pair{a, b};
  };
  std::array<std::vector<std::size_t>, kNumClasses> out;
  for (int d = 0; d < kNumClasses; ++d) {
    const auto& r = regions[d];
    const auto [x0, x1] = window(r.cx - r.side / 2.0, r.cx + r.side / 2.0, grid.nx, grid.pitch);
    const auto [y0, y1] = window(r.cy - r.side / 2.0, r.cy + r.side / 2.0, grid.ny, grid.pitch);
    for (int iy = y0; iy <= y1; ++iy) {
      for (int ix = x0; ix <= x1; ++ix) {
        if (r.contains(grid.x_center(ix), grid.y_center(iy))) {
          out[d].push_back(static_cast<std::size_t>(iy) * grid.nx + ix);
        }
      }
    }
  }
  return out;
}

DiffractiveNetwork DiffractiveNetwork::uniform(const GridSpec& grid, int num_layers, double distance,
                                               const DetectorLayout& detectors) {
  DiffractiveNetwork net;
  net.grid = grid;
  net.layers.assign(static_cast<std::size_t>(std::max(num_layers, 0)), DiffractiveLayer(grid));
  net.distances.assign(static_cast<std::size_t>(std::max(num_layers, 0)) + 1, distance);
  net.detectors = detectors;
  net.validate();
  return net;
}

void DiffractiveNetwork::validate() const {
  grid.validate();
  physics.validate();
  propagation.validate();
  detectors.validate(grid);
  if (distances.size() != layers.size() + 1) {
    throw InvalidArgument("network: expected " + std::to_string(layers.size() + 1) + " distances, got " +
                          std::to_string(distances.size()));
  }
  for (double d : distances) {
    if (!(d > 0.0) || !std::isfinite(d)) throw InvalidArgument("network: distances must be > 0");
  }
  for (const auto& layer : layers) {
    if (!(layer.grid == grid) || layer.phase.size() != grid.size() || layer.amplitude.size() != grid.size()) {
      throw DimensionError("network: layer grid does not match network grid");
    }
  }
}

ClassVector detect(const WaveField& field, const DetectorLayout& layout) {
  const auto& g = field.grid();
  const auto masks = layout.masks(g);
  const double area = g.pitch * g.pitch;
  ClassVector x{};
  for (int d = 0; d < kNumClasses; ++d) {
    double sum = 0.0;
    for (std::size_t i : masks[d]) sum += std::norm(field.samples()[i]);
    x[d] = sum * area;
  }
  return x;
}

int classify(std::span<const double> scores) {
  if (scores.empty()) return -1;
  // max_element keeps the first maximum, which is the lowest-index tie-break.
  return static_cast<int>(std::max_element(scores.begin(), scores.end()) - scores.begin());
}

ForwardModel::ForwardModel(const DiffractiveNetwork& net)
    : grid_(net.grid),
      distances_(net.distances),
      propagation_(net.propagation),
      masks_(net.detectors.masks(net.grid)) {
  if (distances_.size() != net.layers.size() + 1) throw InvalidArgument("network: distances/layers mismatch");
  transmission_.reserve(net.layers.size());
  for (const auto& layer : net.layers) {
    if (!layer.grid.same_shape(grid_) || layer.phase.size() != grid_.size() ||
        layer.amplitude.size() != grid_.size()) {
      throw DimensionError("network: layer grid does not match network grid");
    }
    std::vector<Complex> t(layer.phase.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::polar(layer.amplitude[i], layer.phase[i]);
    transmission_.push_back(std::move(t));
  }
}

void ForwardModel::check_input(const WaveField& input) const {
  if (!input.grid().same_shape(grid_)) throw DimensionError("forward: input grid does not match network");
}

ClassVector ForwardModel::detect(const WaveField& field) const {
  const double area = grid_.pitch * grid_.pitch;
  const auto s = field.samples();
  ClassVector x{};
  for (int d = 0; d < kNumClasses; ++d) {
    double sum = 0.0;
    for (std::size_t i : masks_[d]) sum += std::norm(s[i]);
    x[d] = sum * area;
  }
  return x;
}

ForwardResult ForwardModel::forward(const WaveField& input) const {
  check_input(input);
  WaveField current = input;
  for (std::size_t l = 0; l < transmission_.size(); ++l) {
    current = propagate(current, distances_[l], propagation_);
    auto s = current.samples();
    for (std::size_t i = 0; i < s.size(); ++i) s[i] *= transmission_[l][i];
  }
  WaveField out = propagate(current, distances_.back(), propagation_);
  const ClassVector powers = detect(out);
  return {powers, std::move(out)};
}

ForwardTrace ForwardModel::trace(const WaveField& input) const {
  check_input(input);
  ForwardTrace trace{input, {}, WaveField(grid_), {}};
  trace.layer_outputs.reserve(transmission_.size());
  const WaveField* current = &trace.input;
  for (std::size_t l = 0; l < transmission_.size(); ++l) {
    WaveField next = propagate(*current, distances_[l], propagation_);
    auto s = next.samples();
    for (std::size_t i = 0; i < s.size(); ++i) s[i] *= transmission_[l][i];
    trace.layer_outputs.push_back(std::move(next));
    current = &trace.layer_outputs.back();
  }
  trace.detector_field = propagate(*current, distances_.back(), propagation_);
  trace.powers = detect(trace.detector_field);
  return trace;
}

ForwardTrace forward_trace(const DiffractiveNetwork& net, const WaveField& input) {
  return ForwardModel(net).trace(input);
}

ForwardResult forward(const DiffractiveNetwork& net, const WaveField& input) {
  return ForwardModel(net).forward(input);
}

NeuronPhysics slab_phase_model(const NeuronGeometry& geometry) {
  const auto& g = geometry;
  if (!(g.thickness >= 0.0) || !(g.side > 0.0) || !(g.pitch > 0.0) || !(g.wavelength > 0.0) ||
      !(g.n_crystalline > 0.0) || !(g.n_amorphous > 0.0) || !(g.n_clad > 0.0)) {
    throw InvalidArgument("geometry: lengths and indices must be positive");
  }
  if (g.side > g.pitch) throw InvalidArgument("geometry: side length exceeds cell pitch");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double theta = two_pi * g.thickness * (g.n_amorphous - g.n_crystalline) / g.wavelength;
  theta = std::fmod(theta, two_pi);
  if (theta < 0.0) theta += two_pi;
  return NeuronPhysics{theta, 1.0};
}

namespace {

// Re-expresses every crystalline neuron (non-zero binarized phase) with new physics.
void apply_neuron_physics(DiffractiveNetwork& net, const NeuronPhysics& physics) {
  physics.validate();
  if (!net.binarized) throw InvalidArgument("inject_error: neuron errors need a binarized network");
  const double amp = std::sqrt(physics.k_ratio);
  for (auto& layer : net.layers) {
    for (std::size_t i = 0; i < layer.phase.size(); ++i) {
      if (layer.phase[i] != 0.0) {
        layer.phase[i] = physics.theta_max;
        layer.amplitude[i] = amp;
      }
    }
  }
  net.physics = physics;
}

}  // namespace

DiffractiveNetwork inject_error(const DiffractiveNetwork& net, const ErrorSpec& spec) {
  DiffractiveNetwork out = net;
  if (const auto* shift = std::get_if<AxialShift>(&spec)) {
    if (shift->delta.size() != out.distances.size()) {
      throw InvalidArgument("inject_error: axial shift needs one delta per gap (" +
                            std::to_string(out.distances.size()) + ")");
    }
    for (std::size_t g = 0; g < out.distances.size(); ++g) {
      out.distances[g] += shift->delta[g];
      if (!(out.distances[g] > 0.0)) {
        throw InvalidArgument("inject_error: gap " + std::to_string(g) + " becomes non-positive");
      }
    }
  } else if (const auto* phase = std::get_if<PhaseDifference>(&spec)) {
    apply_neuron_physics(out, NeuronPhysics{phase->theta, out.physics.k_ratio});
  } else if (const auto* ratio = std::get_if<TransmittanceRatio>(&spec)) {
    apply_neuron_physics(out, NeuronPhysics{out.physics.theta_max, ratio->k_ratio});
  } else if (const auto* geom = std::get_if<GeometryError>(&spec)) {
    apply_neuron_physics(out, slab_phase_model(geom->geometry));
  }
  return out;
}

}  // namespace rodnn
