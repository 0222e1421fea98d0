#include "nanoloc/array.hpp"

#include <cmath>
#include <random>

#include <fmt/format.h>

#include "nanoloc/constants.hpp"
#include "nanoloc/errors.hpp"

namespace nanoloc {

FrequencyBins frequency_bins(double f_low_hz, double f_high_hz, double window_s,
                             std::optional<std::size_t> bins_override) {
  if (!(f_low_hz > 0.0) || !(f_high_hz > f_low_hz) || !(window_s > 0.0)) {
    throw ConfigError("frequency bins need f_h > f_l > 0 and dT > 0");
  }
  const double width = 1.0 / window_s;
  FrequencyBins out{width, bin_grid({f_low_hz, f_high_hz}, width)};
  if (bins_override) {
    if (*bins_override == 0) throw ConfigError("bins_override must be >= 1");
    out.freqs_hz.resize(*bins_override);
    for (std::size_t b = 0; b < *bins_override; ++b) out.freqs_hz[b] = f_low_hz + static_cast<double>(b) * width;
  }
  return out;
}

UlaConfig::UlaConfig(std::size_t elements, double spacing_m, double f_low_hz, double f_high_hz,
                     double window_s, std::optional<std::size_t> bins_override)
    : elements_(elements),
      spacing_m_(spacing_m),
      f_low_hz_(f_low_hz),
      f_high_hz_(f_high_hz),
      window_s_(window_s),
      bins_override_(bins_override),
      bins_(frequency_bins(f_low_hz, f_high_hz, window_s, bins_override)) {
  if (elements_ < 2) throw ConfigError("a ULA needs at least two elements");
  if (!(spacing_m_ > 0.0)) throw ConfigError("element spacing must be > 0");
  const double half_wavelength = kSpeedOfLight / (2.0 * f_high_hz_);
  if (spacing_m_ > half_wavelength * (1.0 + kAliasingSlack)) {
    throw ConfigError(fmt::format(
        "element spacing {:.4g} um exceeds half a wavelength at {:.4g} THz ({:.4g} um): spatial aliasing",
        spacing_m_ * 1e6, f_high_hz_ / kTera, half_wavelength * 1e6));
  }
}

CVector steering_vector(double f_hz, double theta_deg, std::size_t elements, double spacing_m) {
  if (!(std::abs(theta_deg) < 90.0)) throw RangeError("steering angle must lie in (-90, 90) degrees");
  const double phase_step = kTwoPi * f_hz * spacing_m * std::sin(theta_deg * kPi / 180.0) / kSpeedOfLight;
  CVector a(static_cast<Eigen::Index>(elements));
  for (std::size_t i = 0; i < elements; ++i) {
    a(static_cast<Eigen::Index>(i)) = std::polar(1.0, -phase_step * static_cast<double>(i));
  }
  return a;
}

void SourceTruth::validate() const {
  if (!(std::abs(theta_deg) < 90.0)) throw ConfigError("source angle must lie in (-90, 90) degrees");
  if (!(distance_m > 0.0)) throw ConfigError("source distance must be > 0");
}

double noise_variance_per_bin(const AbsorptionTable& medium, double temperature_k, const PulseSpec& pulse,
                              double f_bin_hz, double distance_m, double bin_width_hz,
                              double window_s) {
  const ChannelParams params{distance_m, center_frequency(pulse.order, pulse.sigma_s), temperature_k};
  const double pulse_psd = pulse_energy_density(pulse, f_bin_hz) / window_s;
  return noise_psd(params, medium, pulse_psd, f_bin_hz) * bin_width_hz;
}

std::vector<Snapshot> simulate_snapshots(const UlaConfig& ula, const PulseSpec& pulse,
                                         const AbsorptionTable& medium, const SourceTruth& truth,
                                         std::size_t snapshots, std::uint64_t seed, double temperature_k) {
  pulse.validate();
  truth.validate();
  if (snapshots < 1) throw ConfigError("snapshot count K must be >= 1");
  if (pulse_duration(pulse.sigma_s) > ula.window_s()) {
    throw ConfigError(fmt::format("pulse does not fit observation window ({:.4g} ps > {:.4g} ps)",
                                  pulse_duration(pulse.sigma_s) * 1e12, ula.window_s() * 1e12));
  }
  const ChannelParams params{truth.distance_m, center_frequency(pulse.order, pulse.sigma_s), temperature_k};
  params.validate();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto n = static_cast<Eigen::Index>(ula.elements());
  const auto k = static_cast<Eigen::Index>(snapshots);
  const double df = ula.bin_width_hz();

  std::vector<Snapshot> out;
  out.reserve(ula.bin_count());
  for (double fb : ula.bins_hz()) {
    const std::complex<double> coefficient = df * channel_response(params, medium, fb) * pulse_spectrum(pulse, fb);
    const CVector signal = coefficient * steering_vector(fb, truth.theta_deg, ula.elements(), ula.spacing_m());
    const double variance =
        noise_variance_per_bin(medium, temperature_k, pulse, fb, truth.distance_m, df, ula.window_s());
    const double scale = std::sqrt(0.5 * variance);

    Snapshot snap{fb, CMatrix(n, k)};
    for (Eigen::Index col = 0; col < k; ++col) {
      for (Eigen::Index row = 0; row < n; ++row) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        snap.data(row, col) = signal(row) + scale * std::complex<double>(re, im);
      }
    }
    out.push_back(std::move(snap));
  }
  return out;
}

}  // namespace nanoloc
