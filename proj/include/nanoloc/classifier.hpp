#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nanoloc/array.hpp"
#include "nanoloc/doa.hpp"
#include "nanoloc/pulse.hpp"

namespace nanoloc {

struct EstimatedPsd {
  std::vector<double> bins_hz;
  std::vector<double> values;  // >= 0
};

/// Per bin, S = a^+ R (a^H)^+ = a^H R a / N^2 for the unit-modulus steering
/// vector at `theta_hat_deg`; negative values clamp to zero.
EstimatedPsd estimate_psd(std::span<const BinCovariance> covariances, const UlaConfig& ula,
                          double theta_hat_deg);

/// sum f S / sum S. Throws DegenerateInputError when the PSD has no mass.
double spectral_centroid(const EstimatedPsd& psd);

/// Index of the nearest center frequency; ties go to the lower index.
std::size_t classify(double centroid_hz, const EventAlphabet& alphabet);

}  // namespace nanoloc
