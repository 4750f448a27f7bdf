#include "rodnn/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "parallel.hpp"
#include "rodnn/error.hpp"

namespace rodnn {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double mean(const ClassVector& x) { return std::accumulate(x.begin(), x.end(), 0.0) / kNumClasses; }

ClassVector logits_of(const ClassVector& x, const LogitConfig& cfg) {
  ClassVector z{};
  double norm = 1.0;
  if (cfg.normalize) {
    const double m = mean(x);
    norm = m != 0.0 ? 1.0 / m : 0.0;
  }
  for (int i = 0; i < kNumClasses; ++i) z[i] = cfg.scale * x[i] * norm;
  return z;
}

ClassVector softmax_of_logits(const ClassVector& z) {
  const double zmax = *std::max_element(z.begin(), z.end());
  ClassVector y{};
  double sum = 0.0;
  for (int i = 0; i < kNumClasses; ++i) {
    y[i] = std::exp(z[i] - zmax);
    sum += y[i];
  }
  for (auto& v : y) v /= sum;
  return y;
}

std::size_t neuron_count(std::span<const DiffractiveLayer> layers) {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.phase.size();
  return n;
}

void adam_update(std::span<double> w, std::span<double> m, std::span<double> v, std::span<const double> g,
                 const AdamParams& p, std::int64_t step) {
  const double c1 = 1.0 - std::pow(p.beta1, static_cast<double>(step));
  const double c2 = 1.0 - std::pow(p.beta2, static_cast<double>(step));
  for (std::size_t i = 0; i < w.size(); ++i) {
    m[i] = p.beta1 * m[i] + (1.0 - p.beta1) * g[i];
    v[i] = p.beta2 * v[i] + (1.0 - p.beta2) * g[i] * g[i];
    w[i] -= p.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + p.epsilon);
  }
}

void check_finite(double value, int epoch, const char* what) {
  if (!std::isfinite(value)) {
    throw DivergenceError(std::string("training diverged: non-finite ") + what + " in epoch " +
                          std::to_string(epoch));
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Losses

ClassVector softmax(const ClassVector& x, const LogitConfig& cfg) { return softmax_of_logits(logits_of(x, cfg)); }

double cross_entropy(const ClassVector& y, int label) { return -std::log(std::max(y[label], kProbabilityFloor)); }

ClassVector cross_entropy_gradient(const ClassVector& powers, int label, const LogitConfig& cfg) {
  const ClassVector y = softmax(powers, cfg);
  ClassVector gz{};
  if (y[label] >= kProbabilityFloor) {
    gz = y;
    gz[label] -= 1.0;
  }
  ClassVector gx{};
  if (!cfg.normalize) {
    for (int i = 0; i < kNumClasses; ++i) gx[i] = cfg.scale * gz[i];
    return gx;
  }
  const double m = mean(powers);
  if (m == 0.0) return gx;
  // z_j = s X_j / m with m = mean(X): dz_j/dX_i = s (delta_ij / m - X_j / (n m^2)).
  double coupling = 0.0;
  for (int j = 0; j < kNumClasses; ++j) coupling += gz[j] * powers[j];
  coupling /= kNumClasses * m;
  for (int i = 0; i < kNumClasses; ++i) gx[i] = cfg.scale / m * (gz[i] - coupling);
  return gx;
}

double wrap_phase(double theta) {
  double w = theta - kTwoPi * std::ceil((theta - kPi) / kTwoPi);
  if (w <= -kPi) w += kTwoPi;
  if (w > kPi) w -= kTwoPi;
  return w;
}

PenaltyValue penalty(double theta, double gamma, double theta_max, PenaltyForm form) {
  if (gamma == 0.0) return {};
  const double w0 = wrap_phase(theta);
  const double wt = wrap_phase(theta - theta_max);
  if (form == PenaltyForm::literal) {
    auto sgn = [](double v) { return static_cast<double>((v > 0.0) - (v < 0.0)); };
    return {gamma * (std::abs(w0) + std::abs(wt)), gamma * (sgn(w0) + sgn(wt))};
  }
  const double d0 = w0 * w0;
  const double dt = wt * wt;
  return {gamma * d0 * dt, 2.0 * gamma * (w0 * dt + d0 * wt)};
}

double total_loss(std::span<const ClassVector> batch_powers, std::span<const int> labels,
                  std::span<const DiffractiveLayer> layers, double gamma, double theta_max,
                  const LogitConfig& logits, PenaltyForm form) {
  if (batch_powers.size() != labels.size()) throw DimensionError("total_loss: outputs and labels differ in size");
  double ce = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) ce += cross_entropy(softmax(batch_powers[i], logits), labels[i]);
  if (!labels.empty()) ce /= static_cast<double>(labels.size());
  double pen = 0.0;
  const std::size_t n = neuron_count(layers);
  if (gamma != 0.0 && n > 0) {
    for (const auto& layer : layers) {
      for (double th : layer.phase) pen += penalty(th, gamma, theta_max, form).value;
    }
    pen /= static_cast<double>(n);
  }
  return ce + pen;
}

// ---------------------------------------------------------------------------
// Gradients

SampleGradient data_gradient(const ForwardModel& model, const WaveField& input, int label,
                             const LogitConfig& logits) {
  const ForwardTrace trace = model.trace(input);
  SampleGradient out;
  out.powers = trace.powers;
  out.loss = cross_entropy(softmax(trace.powers, logits), label);

  // dL/dconj(f) on the detector plane: dL/dX_d * pitch^2 * f over region d.
  const ClassVector dx = cross_entropy_gradient(trace.powers, label, logits);
  const double area = model.grid().pitch * model.grid().pitch;
  WaveField adjoint(model.grid());
  for (int d = 0; d < kNumClasses; ++d) {
    for (std::size_t i : model.masks()[d]) {
      adjoint.samples()[i] = dx[d] * area * trace.detector_field.samples()[i];
    }
  }

  const std::size_t num_layers = model.num_layers();
  out.phase.resize(num_layers);
  out.quadrature.resize(num_layers);
  adjoint = propagate_adjoint(adjoint, model.distance(num_layers), model.propagation());
  for (std::size_t l = num_layers; l-- > 0;) {
    const auto t = model.transmission(l);
    const auto b = trace.layer_outputs[l].samples();
    auto g = adjoint.samples();
    auto& grad = out.phase[l];
    auto& quad = out.quadrature[l];
    grad.resize(b.size());
    quad.resize(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
      // b = k e^{i theta} a  =>  dL/dtheta = 2 Re(conj(g) i b) = -2 Im(conj(g) b)
      const std::complex<double> c = std::conj(g[i]) * b[i];
      grad[i] = -2.0 * c.imag();
      quad[i] = -2.0 * c.real();
      g[i] *= std::conj(t[i]);
    }
    if (l > 0) adjoint = propagate_adjoint(adjoint, model.distance(l), model.propagation());
  }
  return out;
}

SampleGradient data_gradient(const DiffractiveNetwork& net, const WaveField& input, int label,
                             const LogitConfig& logits) {
  return data_gradient(ForwardModel(net), input, label, logits);
}

SampleGradient backward(const DiffractiveNetwork& net, const WaveField& input, int label, double gamma,
                        const LogitConfig& logits, PenaltyForm form) {
  SampleGradient out = data_gradient(net, input, label, logits);
  const std::size_t n = neuron_count(net.layers);
  if (gamma == 0.0 || n == 0) return out;
  const double inv_n = 1.0 / static_cast<double>(n);
  double pen = 0.0;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto& phase = net.layers[l].phase;
    for (std::size_t i = 0; i < phase.size(); ++i) {
      const auto p = penalty(phase[i], gamma, net.physics.theta_max, form);
      pen += p.value;
      out.phase[l][i] += p.derivative * inv_n;
    }
  }
  out.loss += pen * inv_n;
  return out;
}

// ---------------------------------------------------------------------------
// Optimizer

TrainState TrainState::from_network(const DiffractiveNetwork& net, const AdamParams& adam) {
  TrainState s;
  s.adam = adam;
  for (const auto& layer : net.layers) {
    s.weights.push_back(layer.phase);
    s.first_moment.emplace_back(layer.phase.size(), 0.0);
    s.second_moment.emplace_back(layer.phase.size(), 0.0);
  }
  return s;
}

void adam_step(TrainState& state, const LayerGradients& gradients) {
  if (gradients.size() != state.weights.size()) throw DimensionError("adam_step: layer count mismatch");
  ++state.step;
  for (std::size_t l = 0; l < state.weights.size(); ++l) {
    if (gradients[l].size() != state.weights[l].size()) throw DimensionError("adam_step: layer shape mismatch");
    adam_update(state.weights[l], state.first_moment[l], state.second_moment[l], gradients[l], state.adam,
                state.step);
    for (auto& w : state.weights[l]) w = wrap_phase(w);
  }
}

double binarize(double theta, double theta_max) {
  return (theta > -(kPi - theta_max / 2.0) && theta <= theta_max / 2.0) ? 0.0 : theta_max;
}

std::vector<double> binarize(std::span<const double> weights, double theta_max) {
  std::vector<double> out(weights.size());
  std::transform(weights.begin(), weights.end(), out.begin(), [&](double w) { return binarize(w, theta_max); });
  return out;
}

DiffractiveNetwork binarize_network(const DiffractiveNetwork& net) {
  DiffractiveNetwork out = net;
  const double theta_max = net.physics.theta_max;
  const double crystalline_amp = std::sqrt(net.physics.k_ratio);
  for (auto& layer : out.layers) {
    for (std::size_t i = 0; i < layer.phase.size(); ++i) {
      // Binarized weights are already exact states; re-wrapping Theta > pi would misclassify them.
      const double th = net.binarized ? layer.phase[i] : binarize(wrap_phase(layer.phase[i]), theta_max);
      layer.phase[i] = th;
      layer.amplitude[i] = th == 0.0 ? 1.0 : crystalline_amp;
    }
  }
  out.binarized = true;
  return out;
}

// ---------------------------------------------------------------------------
// Optical training

double PenaltySchedule::gamma_at(int epoch) const {
  if (ramp_epochs <= 0 || epoch >= ramp_epochs) return gamma_max;
  const double t = static_cast<double>(std::max(epoch, 0)) / ramp_epochs;
  return gamma_start + (gamma_max - gamma_start) * t;
}

void PenaltySchedule::validate() const {
  if (!(gamma_start < 0.0 && gamma_max > 0.0)) {
    throw InvalidArgument("penalty schedule: need gamma_start < 0 < gamma_max");
  }
  if (ramp_epochs < 0 || hold_epochs < 0) throw InvalidArgument("penalty schedule: epochs must be >= 0");
}

std::int64_t ConfusionMatrix::total() const {
  std::int64_t t = 0;
  for (const auto& row : counts) t += std::accumulate(row.begin(), row.end(), std::int64_t{0});
  return t;
}

std::int64_t ConfusionMatrix::correct() const {
  std::int64_t c = 0;
  for (int i = 0; i < kNumClasses; ++i) c += counts[i][i];
  return c;
}

double ConfusionMatrix::accuracy() const {
  const auto t = total();
  return t == 0 ? 0.0 : static_cast<double>(correct()) / static_cast<double>(t);
}

std::vector<ClassVector> detector_outputs(const DiffractiveNetwork& net, const Dataset& data,
                                          const EncodingSpec& encoding, int threads) {
  const ForwardModel model(net);
  std::vector<ClassVector> out(data.size());
  detail::parallel_for(data.size(), threads, [&](std::size_t i) {
    out[i] = model.forward(encode_image(data.image(i), data.rows, data.cols, encoding, net.grid)).powers;
  });
  return out;
}

ConfusionMatrix evaluate_outputs(std::span<const ClassVector> outputs, std::span<const int> labels,
                                 const CorrectingLayer* correcting) {
  if (outputs.size() != labels.size()) throw DimensionError("evaluate: outputs and labels differ in size");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    const ClassVector scores = correcting ? apply_correcting(*correcting, outputs[i]) : outputs[i];
    cm.add(labels[i], classify(scores));
  }
  return cm;
}

ConfusionMatrix evaluate(const DiffractiveNetwork& net, const Dataset& data, const EncodingSpec& encoding,
                         int threads, const CorrectingLayer* correcting) {
  const auto outputs = detector_outputs(net, data, encoding, threads);
  return evaluate_outputs(outputs, data.labels, correcting);
}

namespace {

void load_weights(DiffractiveNetwork& net, const TrainState& state) {
  for (std::size_t l = 0; l < net.layers.size(); ++l) net.layers[l].phase = state.weights[l];
}

// Network seen by the forward pass: the real-valued weights in penalty mode,
// their binarized projection in straight-through mode.
DiffractiveNetwork forward_view(const DiffractiveNetwork& work, TrainingMode mode) {
  return mode == TrainingMode::straight_through ? binarize_network(work) : work;
}

}  // namespace

OpticalTrainResult train_optical(const DiffractiveNetwork& net, const Dataset& train, const Dataset& validation,
                                 const OpticalTrainConfig& config, std::uint64_t seed,
                                 const EpochCallback& on_epoch) {
  net.validate();
  if (config.mode == TrainingMode::penalty) config.schedule.validate();
  if (train.size() == 0) throw InvalidArgument("train_optical: empty training set");
  if (config.batch_size < 1) throw InvalidArgument("train_optical: batch_size must be >= 1");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> init(-kPi, kPi);

  DiffractiveNetwork work = net;
  work.binarized = false;
  for (auto& layer : work.layers) {
    for (auto& th : layer.phase) th = wrap_phase(init(rng));
    std::fill(layer.amplitude.begin(), layer.amplitude.end(), 1.0);
  }
  TrainState state = TrainState::from_network(work, config.adam);

  const std::size_t n = train.size();
  const std::size_t neurons = neuron_count(work.layers);
  const double theta_max = work.physics.theta_max;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  OpticalTrainResult result;
  const int epochs = config.schedule.total_epochs();
  std::vector<SampleGradient> per_sample;
  const bool latent_jacobian =
      config.mode == TrainingMode::straight_through && config.ste_jacobian == SteJacobian::latent;
  LayerGradients offset_cos(work.layers.size()), offset_sin(work.layers.size());
  for (std::size_t l = 0; l < work.layers.size(); ++l) {
    offset_cos[l].assign(work.layers[l].phase.size(), 1.0);
    offset_sin[l].assign(work.layers[l].phase.size(), 0.0);
  }

  for (int epoch = 0; epoch < epochs; ++epoch) {
    const double gamma = config.mode == TrainingMode::penalty ? config.schedule.gamma_at(epoch) : 0.0;
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t correct = 0;

    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t batch = std::min<std::size_t>(config.batch_size, n - start);
      const DiffractiveNetwork view_net = forward_view(work, config.mode);
      const ForwardModel view(view_net);
      if (latent_jacobian) {
        for (std::size_t l = 0; l < work.layers.size(); ++l) {
          for (std::size_t i = 0; i < work.layers[l].phase.size(); ++i) {
            const double d = work.layers[l].phase[i] - view_net.layers[l].phase[i];
            offset_cos[l][i] = std::cos(d);
            offset_sin[l][i] = std::sin(d);
          }
        }
      }

      auto sample_gradient = [&](std::size_t b) {
        const std::size_t idx = order[start + b];
        const WaveField input = encode_image(train.image(idx), train.rows, train.cols, config.encoding, work.grid);
        SampleGradient sg = data_gradient(view, input, train.labels[idx], config.logits);
        if (latent_jacobian) {
          for (std::size_t l = 0; l < sg.phase.size(); ++l) {
            for (std::size_t i = 0; i < sg.phase[l].size(); ++i) {
              sg.phase[l][i] = sg.phase[l][i] * offset_cos[l][i] + sg.quadrature[l][i] * offset_sin[l][i];
            }
          }
        }
        return sg;
      };

      // Sum per-sample gradients in batch order so the result does not depend
      // on the number of workers.
      LayerGradients grad(work.layers.size());
      for (std::size_t l = 0; l < grad.size(); ++l) grad[l].assign(work.layers[l].phase.size(), 0.0);
      double ce_sum = 0.0;
      auto accumulate = [&](const SampleGradient& sg, std::size_t b) {
        for (std::size_t l = 0; l < grad.size(); ++l) {
          for (std::size_t i = 0; i < grad[l].size(); ++i) grad[l][i] += sg.phase[l][i];
        }
        ce_sum += sg.loss;
        if (classify(sg.powers) == train.labels[order[start + b]]) ++correct;
      };
      if (config.threads <= 1) {
        for (std::size_t b = 0; b < batch; ++b) accumulate(sample_gradient(b), b);
      } else {
        per_sample.resize(batch);
        detail::parallel_for(batch, config.threads, [&](std::size_t b) { per_sample[b] = sample_gradient(b); });
        for (std::size_t b = 0; b < batch; ++b) accumulate(per_sample[b], b);
      }

      const double inv_batch = 1.0 / static_cast<double>(batch);
      const double inv_n = 1.0 / static_cast<double>(neurons);
      double pen = 0.0;
      for (std::size_t l = 0; l < grad.size(); ++l) {
        for (std::size_t i = 0; i < grad[l].size(); ++i) {
          grad[l][i] *= inv_batch;
          if (gamma != 0.0) {
            const auto p = penalty(state.weights[l][i], gamma, theta_max, config.penalty_form);
            grad[l][i] += p.derivative * inv_n;
            pen += p.value;
          }
        }
      }
      const double batch_loss = ce_sum * inv_batch + pen * inv_n;
      check_finite(batch_loss, epoch, "loss");
      loss_sum += batch_loss * static_cast<double>(batch);

      adam_step(state, grad);
      load_weights(work, state);
    }
    state.epoch = epoch + 1;

    EpochMetrics m;
    m.epoch = epoch;
    m.gamma = gamma;
    m.train_loss = loss_sum / static_cast<double>(n);
    m.train_accuracy = static_cast<double>(correct) / static_cast<double>(n);
    m.val_accuracy = validation.size() > 0
                         ? evaluate(forward_view(work, config.mode), validation, config.encoding, config.threads)
                               .accuracy()
                         : 0.0;
    result.history.push_back(m);
    if (on_epoch) on_epoch(m);
  }

  if (validation.size() > 0) {
    result.val_accuracy_real =
        evaluate(forward_view(work, config.mode), validation, config.encoding, config.threads).accuracy();
  }
  result.network = binarize_network(work);
  if (validation.size() > 0) {
    result.val_accuracy_binary = evaluate(result.network, validation, config.encoding, config.threads).accuracy();
  }
  return result;
}

OpticalTrainResult ste_train_optical(const DiffractiveNetwork& net, const Dataset& train, const Dataset& validation,
                                     OpticalTrainConfig config, std::uint64_t seed, const EpochCallback& on_epoch) {
  config.mode = TrainingMode::straight_through;
  return train_optical(net, train, validation, config, seed, on_epoch);
}

// ---------------------------------------------------------------------------
// Correcting layer

CorrectingLayer CorrectingLayer::identity() {
  CorrectingLayer c;
  for (int i = 0; i < kNumClasses; ++i) c.at(i, i) = 1.0;
  return c;
}

ClassVector apply_correcting(const CorrectingLayer& layer, const ClassVector& x) {
  ClassVector out{};
  const double scale = layer.use_bias ? mean(x) : 0.0;
  for (int r = 0; r < kNumClasses; ++r) {
    double acc = 0.0;
    for (int c = 0; c < kNumClasses; ++c) acc += layer.at(r, c) * x[c];
    out[r] = acc + scale * layer.bias[r];
  }
  return out;
}

namespace {

ClassVector normalized_features(const ClassVector& x) {
  const double m = mean(x);
  ClassVector f{};
  if (m != 0.0) {
    for (int i = 0; i < kNumClasses; ++i) f[i] = x[i] / m;
  }
  return f;
}

}  // namespace

CorrectingTrainResult train_correcting(std::span<const ClassVector> outputs, std::span<const int> labels,
                                       const CorrectingTrainConfig& config, std::uint64_t seed,
                                       std::span<const ClassVector> val_outputs, std::span<const int> val_labels) {
  if (outputs.size() != labels.size()) throw DimensionError("train_correcting: outputs and labels differ in size");
  if (val_outputs.size() != val_labels.size()) {
    throw DimensionError("train_correcting: validation outputs and labels differ in size");
  }
  if (outputs.empty()) throw InvalidArgument("train_correcting: empty training set");
  if (config.batch_size < 1 || config.epochs < 0) throw InvalidArgument("train_correcting: bad batch size or epochs");

  constexpr std::size_t kW = kNumClasses * kNumClasses;
  std::mt19937_64 rng(seed);
  CorrectingTrainResult result;
  CorrectingLayer& layer = result.layer;
  layer.use_bias = config.use_bias;
  if (config.identity_init) {
    layer = CorrectingLayer::identity();
    layer.use_bias = config.use_bias;
  } else {
    const double bound = 1.0 / std::sqrt(static_cast<double>(kNumClasses));
    std::uniform_real_distribution<double> init(-bound, bound);
    for (auto& w : layer.weights) w = init(rng);
  }

  std::vector<ClassVector> features(outputs.size());
  std::transform(outputs.begin(), outputs.end(), features.begin(), normalized_features);

  // Parameters are W (row-major) followed by the bias.
  std::vector<double> params(kW + kNumClasses, 0.0);
  std::copy(layer.weights.begin(), layer.weights.end(), params.begin());
  std::copy(layer.bias.begin(), layer.bias.end(), params.begin() + kW);
  std::vector<double> m1(params.size(), 0.0), m2(params.size(), 0.0), grad(params.size(), 0.0);
  std::int64_t step = 0;

  const LogitConfig raw{1.0, false};
  std::vector<std::size_t> order(outputs.size());
  std::iota(order.begin(), order.end(), 0);

  auto store = [&] {
    std::copy(params.begin(), params.begin() + kW, layer.weights.begin());
    std::copy(params.begin() + kW, params.end(), layer.bias.begin());
  };

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t batch = std::min<std::size_t>(config.batch_size, order.size() - start);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t b = 0; b < batch; ++b) {
        const std::size_t idx = order[start + b];
        const ClassVector& f = features[idx];
        ClassVector logits{};
        for (int r = 0; r < kNumClasses; ++r) {
          double acc = config.use_bias ? params[kW + r] : 0.0;
          for (int c = 0; c < kNumClasses; ++c) acc += params[r * kNumClasses + c] * f[c];
          logits[r] = acc;
        }
        const ClassVector y = softmax(logits, raw);
        loss_sum += cross_entropy(y, labels[idx]);
        if (classify(logits) == labels[idx]) ++correct;
        for (int r = 0; r < kNumClasses; ++r) {
          const double gr = y[r] - (r == labels[idx] ? 1.0 : 0.0);
          for (int c = 0; c < kNumClasses; ++c) grad[r * kNumClasses + c] += gr * f[c];
          if (config.use_bias) grad[kW + r] += gr;
        }
      }
      for (auto& g : grad) g /= static_cast<double>(batch);
      adam_update(params, m1, m2, grad, config.adam, ++step);
    }
    check_finite(loss_sum, epoch, "correcting-layer loss");
    store();

    EpochMetrics m;
    m.epoch = epoch;
    m.train_loss = loss_sum / static_cast<double>(order.size());
    m.train_accuracy = static_cast<double>(correct) / static_cast<double>(order.size());
    m.val_accuracy = val_outputs.empty() ? 0.0 : evaluate_outputs(val_outputs, val_labels, &layer).accuracy();
    result.history.push_back(m);
  }
  store();
  return result;
}

CorrectingTrainResult train_correcting(const DiffractiveNetwork& net, const Dataset& data,
                                       const EncodingSpec& encoding, const CorrectingTrainConfig& config,
                                       std::uint64_t seed, int threads) {
  if (!net.binarized) throw InvalidArgument("train_correcting: the optical network must be binarized");
  const auto outputs = detector_outputs(net, data, encoding, threads);
  return train_correcting(outputs, data.labels, config, seed);
}

}  // namespace rodnn
