#pragma once

#include <vector>

#include "rodnn/wavefield.hpp"

namespace rodnn {

enum class EvanescentPolicy { zero_out, keep_decaying };

struct PropagationParams {
  int pad_factor = 2;
  EvanescentPolicy evanescent = EvanescentPolicy::zero_out;

  void validate() const;
  bool operator==(const PropagationParams&) const = default;
};

/// Angular-spectrum transfer function H(fx, fy) sampled on the DFT bins of
/// `grid` (row-major, unshifted). Propagating bins get
/// exp(i 2pi/lambda z sqrt(1 - (lambda fx)^2 - (lambda fy)^2)); evanescent bins
/// are zero or exp(-2pi/lambda |z| sqrt(...)) depending on the policy.
std::vector<Complex> transfer_function(const GridSpec& grid, double z, EvanescentPolicy policy);

/// Propagates `field` by distance z (um, may be negative). The field is
/// zero-padded by params.pad_factor, filtered with H in the spectral domain,
/// and cropped back to the original window.
WaveField propagate(const WaveField& field, double z, const PropagationParams& params = {});

/// Hermitian adjoint of propagate(., z, params): same pad/crop with conj(H).
/// Equals propagate(., -z) whenever no evanescent energy is kept.
WaveField propagate_adjoint(const WaveField& field, double z, const PropagationParams& params = {});

/// Drops every cached transfer function.
void clear_transfer_cache();

}  // namespace rodnn
