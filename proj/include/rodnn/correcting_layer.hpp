#pragma once

#include <array>

#include "rodnn/optical_net.hpp"

namespace rodnn {

/// The electronic 10x10 map applied to the detector powers: L = W X, plus
/// mean(X) b when the optional bias is enabled. Only argmax(L) is used, and
/// scaling the bias with the input keeps that argmax invariant under positive
/// rescaling of X.
struct CorrectingLayer {
  std::array<double, kNumClasses * kNumClasses> weights{};  // row-major W
  std::array<double, kNumClasses> bias{};
  bool use_bias = false;

  static CorrectingLayer identity();
  double& at(int row, int col) { return weights[row * kNumClasses + col]; }
  double at(int row, int col) const { return weights[row * kNumClasses + col]; }

  bool operator==(const CorrectingLayer&) const = default;
};

ClassVector apply_correcting(const CorrectingLayer& layer, const ClassVector& x);

}  // namespace rodnn
