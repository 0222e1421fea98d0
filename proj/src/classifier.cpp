#include "nanoloc/classifier.hpp"

#include <cmath>

#include "nanoloc/errors.hpp"

namespace nanoloc {

EstimatedPsd estimate_psd(std::span<const BinCovariance> covariances, const UlaConfig& ula,
                          double theta_hat_deg) {
  if (!(std::abs(theta_hat_deg) < 90.0)) throw RangeError("DOA estimate must lie in (-90, 90) degrees");
  const double n2 = static_cast<double>(ula.elements() * ula.elements());
  EstimatedPsd out;
  out.bins_hz.reserve(covariances.size());
  out.values.reserve(covariances.size());
  for (const auto& cov : covariances) {
    const CVector a = steering_vector(cov.bin_hz, theta_hat_deg, ula.elements(), ula.spacing_m());
    const double s = (a.adjoint() * cov.r * a)(0, 0).real() / n2;
    out.bins_hz.push_back(cov.bin_hz);
    out.values.push_back(s > 0.0 ? s : 0.0);
  }
  return out;
}

double spectral_centroid(const EstimatedPsd& psd) {
  if (psd.bins_hz.size() != psd.values.size()) throw ContractError("PSD bins and values differ in length");
  double weighted = 0.0;
  double total = 0.0;
  for (std::size_t b = 0; b < psd.values.size(); ++b) {
    weighted += psd.bins_hz[b] * psd.values[b];
    total += psd.values[b];
  }
  if (!(total > 0.0)) throw DegenerateInputError("spectral centroid of an all-zero PSD is undefined");
  return weighted / total;
}

std::size_t classify(double centroid_hz, const EventAlphabet& alphabet) {
  if (alphabet.empty()) throw ConfigError("cannot classify against an empty alphabet");
  std::size_t best = 0;
  double best_distance = std::abs(centroid_hz - alphabet[0].center_hz);
  for (std::size_t i = 1; i < alphabet.size(); ++i) {
    const double d = std::abs(centroid_hz - alphabet[i].center_hz);
    if (d < best_distance) {
      best = i;
      best_distance = d;
    }
  }
  return best;
}

}  // namespace nanoloc
