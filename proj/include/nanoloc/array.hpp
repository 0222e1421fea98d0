#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "nanoloc/channel.hpp"
#include "nanoloc/pulse.hpp"

namespace nanoloc {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

struct FrequencyBins {
  double width_hz;
  std::vector<double> freqs_hz;

  std::size_t count() const noexcept { return freqs_hz.size(); }
};

/// L = floor((f_h - f_l) * dT) + 1 bins spaced 1/dT from f_l. An override
/// forces L bins on the same spacing, possibly running past f_h.
FrequencyBins frequency_bins(double f_low_hz, double f_high_hz, double window_s,
                             std::optional<std::size_t> bins_override = std::nullopt);

/// Uniform linear array receiving over [f_low, f_high].
class UlaConfig {
 public:
  /// Rejects N < 2, an empty band, and spacings above c0 / (2 f_high)
  /// (0.1% slack for spacings quoted to the micrometre).
  UlaConfig(std::size_t elements, double spacing_m, double f_low_hz, double f_high_hz, double window_s,
            std::optional<std::size_t> bins_override = std::nullopt);

  std::size_t elements() const noexcept { return elements_; }
  double spacing_m() const noexcept { return spacing_m_; }
  double f_low_hz() const noexcept { return f_low_hz_; }
  double f_high_hz() const noexcept { return f_high_hz_; }
  double window_s() const noexcept { return window_s_; }
  double bin_width_hz() const noexcept { return bins_.width_hz; }
  const std::vector<double>& bins_hz() const noexcept { return bins_.freqs_hz; }
  std::size_t bin_count() const noexcept { return bins_.count(); }
  std::optional<std::size_t> bins_override() const noexcept { return bins_override_; }

 private:
  std::size_t elements_;
  double spacing_m_;
  double f_low_hz_;
  double f_high_hz_;
  double window_s_;
  std::optional<std::size_t> bins_override_;
  FrequencyBins bins_;
};

inline constexpr double kAliasingSlack = 1e-3;

/// Element i (0-based): exp(-j 2 pi f i d_s sin(theta) / c0).
CVector steering_vector(double f_hz, double theta_deg, std::size_t elements, double spacing_m);

struct SourceTruth {
  double theta_deg;
  double distance_m;
  std::size_t event = 0;

  void validate() const;
};

/// One frequency bin's N x K block of Fourier-series coefficients.
struct Snapshot {
  double bin_hz;
  CMatrix data;
};

/// Coefficient variance of the molecular absorption noise in a bin of width
/// `bin_width_hz` centered at f_b (rectangle rule). The transmitted pulse's
/// PSD is its energy density spread over the observation window.
double noise_variance_per_bin(const AbsorptionTable& medium, double temperature_k, const PulseSpec& pulse,
                              double f_bin_hz, double distance_m, double bin_width_hz,
                              double window_s);

/// Per bin: Y = df * H(f_b) * a(f_b, theta) * P_n(f_b) * 1_{1xK} + V with V
/// i.i.d. CN(0, sigma^2(f_b)). Deterministic in `seed`.
std::vector<Snapshot> simulate_snapshots(const UlaConfig& ula, const PulseSpec& pulse,
                                         const AbsorptionTable& medium, const SourceTruth& truth,
                                         std::size_t snapshots, std::uint64_t seed,
                                         double temperature_k = kDefaultTemperature);

}  // namespace nanoloc
