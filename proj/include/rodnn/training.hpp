#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "rodnn/correcting_layer.hpp"
#include "rodnn/dataio.hpp"
#include "rodnn/optical_net.hpp"

namespace rodnn {

// ---------------------------------------------------------------------------
// Losses

/// Logit preparation ahead of the softmax. Raw detector powers are small and
/// close to each other, so by default they are divided by their mean and
/// multiplied by `scale`.
struct LogitConfig {
  double scale = 10.0;
  bool normalize = true;
};

ClassVector softmax(const ClassVector& x, const LogitConfig& cfg = {});

inline constexpr double kProbabilityFloor = 1e-12;

/// -ln(max(y[label], 1e-12)).
double cross_entropy(const ClassVector& y, int label);

enum class PenaltyForm {
  double_well,  // gamma * d0^2 * dTheta^2
  literal       // gamma * (|d0| + |dTheta|)
};

struct PenaltyValue {
  double value = 0.0;
  double derivative = 0.0;
};

/// Binarization penalty for one weight. d0 and dTheta are circular distances
/// from theta to 0 and to Theta. Positive gamma pulls theta toward the nearer
/// of {0, Theta}; negative gamma pushes it toward the thresholds Theta/2 and
/// -(pi - Theta/2).
PenaltyValue penalty(double theta, double gamma, double theta_max,
                     PenaltyForm form = PenaltyForm::double_well);

/// Wraps an angle into (-pi, pi].
double wrap_phase(double theta);

/// Mean cross-entropy over the batch plus the penalty averaged over every neuron.
double total_loss(std::span<const ClassVector> batch_powers, std::span<const int> labels,
                  std::span<const DiffractiveLayer> layers, double gamma, double theta_max,
                  const LogitConfig& logits = {}, PenaltyForm form = PenaltyForm::double_well);

/// dL/dX for L = cross_entropy(softmax(X), label).
ClassVector cross_entropy_gradient(const ClassVector& powers, int label, const LogitConfig& logits);

// ---------------------------------------------------------------------------
// Gradients

using LayerGradients = std::vector<std::vector<double>>;

struct SampleGradient {
  double loss = 0.0;  // cross-entropy; backward() adds the penalty term
  ClassVector powers{};
  LayerGradients phase;  // dLoss/dtheta, one array per layer
  // dLoss/dtheta if each transmission were rotated by +pi/2. For a phase
  // offset d the gradient is phase*cos(d) + quadrature*sin(d).
  LayerGradients quadrature;
};

/// Data-term gradient of one sample through the adjoint of forward().
SampleGradient data_gradient(const ForwardModel& model, const WaveField& input, int label,
                             const LogitConfig& logits = {});
SampleGradient data_gradient(const DiffractiveNetwork& net, const WaveField& input, int label,
                             const LogitConfig& logits = {});

/// Gradient of total_loss for a single-sample batch: data term plus the
/// per-neuron-averaged penalty derivative.
SampleGradient backward(const DiffractiveNetwork& net, const WaveField& input, int label,
                        double gamma, const LogitConfig& logits = {},
                        PenaltyForm form = PenaltyForm::double_well);

// ---------------------------------------------------------------------------
// Optimizer

struct AdamParams {
  double learning_rate = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Real-valued neuron weights plus Adam moments.
struct TrainState {
  LayerGradients weights;
  LayerGradients first_moment;
  LayerGradients second_moment;
  std::int64_t step = 0;
  int epoch = 0;
  AdamParams adam;

  static TrainState from_network(const DiffractiveNetwork& net, const AdamParams& adam);
};

/// One bias-corrected Adam step; weights are re-wrapped to (-pi, pi].
void adam_step(TrainState& state, const LayerGradients& gradients);

/// 0 on (-(pi - Theta/2), Theta/2], Theta elsewhere.
double binarize(double theta, double theta_max);
std::vector<double> binarize(std::span<const double> weights, double theta_max);

/// Replaces every layer phase by its binarized value and sets the crystalline
/// amplitude to sqrt(K).
DiffractiveNetwork binarize_network(const DiffractiveNetwork& net);

// ---------------------------------------------------------------------------
// Optical training

struct PenaltySchedule {
  double gamma_start = -1e-3;
  double gamma_max = 1e-1;
  int ramp_epochs = 300;
  int hold_epochs = 200;

  int total_epochs() const { return ramp_epochs + hold_epochs; }
  /// Linear from gamma_start (epoch 0) to gamma_max (epoch ramp_epochs), then flat.
  double gamma_at(int epoch) const;
  void validate() const;
};

enum class TrainingMode { penalty, straight_through };

/// Where the straight-through backward pass evaluates dT/dtheta. `binarized`
/// takes it at the binarized phase, so d(binarize)/dtheta = 1 exactly.
/// `latent` takes it at the real-valued weight, so the binarizer acts as the
/// identity on the transmission T rather than on theta.
enum class SteJacobian { latent, binarized };

struct OpticalTrainConfig {
  PenaltySchedule schedule;
  PenaltyForm penalty_form = PenaltyForm::double_well;
  TrainingMode mode = TrainingMode::penalty;
  SteJacobian ste_jacobian = SteJacobian::latent;
  AdamParams adam;
  LogitConfig logits;
  EncodingSpec encoding;
  int batch_size = 64;
  int threads = 1;
};

struct EpochMetrics {
  int epoch = 0;
  double gamma = 0.0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_accuracy = 0.0;
};

struct OpticalTrainResult {
  DiffractiveNetwork network;  // binarized
  std::vector<EpochMetrics> history;
  double val_accuracy_real = 0.0;    // before binarization
  double val_accuracy_binary = 0.0;  // after binarization
};

using EpochCallback = std::function<void(const EpochMetrics&)>;

/// Penalty-scheduled training of the phase layers, finishing with binarize.
/// Weights start uniform on (-pi, pi] from `seed`; the same seed reproduces
/// the same history bit for bit regardless of thread count. In
/// straight_through mode the forward pass sees binarized phases and the
/// gradient passes through the binarizer as set by ste_jacobian; the
/// schedule then only sets the epoch count.
OpticalTrainResult train_optical(const DiffractiveNetwork& net, const Dataset& train,
                                 const Dataset& validation, const OpticalTrainConfig& config,
                                 std::uint64_t seed, const EpochCallback& on_epoch = {});

/// train_optical with config.mode forced to straight_through.
OpticalTrainResult ste_train_optical(const DiffractiveNetwork& net, const Dataset& train,
                                     const Dataset& validation, OpticalTrainConfig config,
                                     std::uint64_t seed, const EpochCallback& on_epoch = {});

// ---------------------------------------------------------------------------
// Evaluation

struct ConfusionMatrix {
  std::array<std::array<std::int64_t, kNumClasses>, kNumClasses> counts{};  // [true][predicted]

  void add(int truth, int predicted) { ++counts[truth][predicted]; }
  std::int64_t total() const;
  std::int64_t correct() const;
  double accuracy() const;
};

/// Detector powers of every sample, computed on `threads` workers.
std::vector<ClassVector> detector_outputs(const DiffractiveNetwork& net, const Dataset& data,
                                          const EncodingSpec& encoding, int threads = 1);

// ---------------------------------------------------------------------------
ConfusionMatrix evaluate(const DiffractiveNetwork& net, const Dataset& data,
                         const EncodingSpec& encoding, int threads = 1,
                         const CorrectingLayer* correcting = nullptr);

ConfusionMatrix evaluate_outputs(std::span<const ClassVector> outputs, std::span<const int> labels,
                                 const CorrectingLayer* correcting = nullptr);

struct CorrectingTrainConfig {
  AdamParams adam;
  int epochs = 20;
  int batch_size = 64;
  bool use_bias = false;
  bool identity_init = false;  // random init otherwise
};

struct CorrectingTrainResult {
  CorrectingLayer layer;
  std::vector<EpochMetrics> history;  // gamma column unused
};

/// Trains W on precomputed detector outputs with softmax / cross-entropy and
/// Adam. Features are the mean-normalized powers X / mean(X).
/// Validation accuracy per epoch is reported when validation outputs are given.
CorrectingTrainResult train_correcting(std::span<const ClassVector> outputs,
                                       std::span<const int> labels,
                                       const CorrectingTrainConfig& config, std::uint64_t seed,
                                       std::span<const ClassVector> val_outputs = {},
                                       std::span<const int> val_labels = {});

/// Convenience overload: computes the frozen optical outputs first. The
/// network must be binarized.
CorrectingTrainResult train_correcting(const DiffractiveNetwork& net, const Dataset& data,
                                       const EncodingSpec& encoding,
                                       const CorrectingTrainConfig& config, std::uint64_t seed,
                                       int threads = 1);

}  // namespace rodnn
