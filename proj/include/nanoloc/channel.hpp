#pragma once

#include <complex>
#include <filesystem>
#include <span>
#include <vector>

#include "nanoloc/constants.hpp"

namespace nanoloc {

struct AbsorptionEntry {
  double frequency_hz;
  double k_per_m;

  friend bool operator==(const AbsorptionEntry&, const AbsorptionEntry&) = default;
};

/// Medium absorption coefficient k(f), tabulated over a frequency band and
/// linearly interpolated between grid points.
class AbsorptionTable {
 public:
  /// Throws ConfigError unless frequencies are strictly increasing, all
  /// k >= 0 and at least two entries are present.
  explicit AbsorptionTable(std::vector<AbsorptionEntry> entries);

  const std::vector<AbsorptionEntry>& entries() const noexcept { return entries_; }
  double band_lo() const noexcept { return entries_.front().frequency_hz; }
  double band_hi() const noexcept { return entries_.back().frequency_hz; }
  bool contains(double f_hz) const noexcept { return f_hz >= band_lo() && f_hz <= band_hi(); }

  /// k(f) in 1/m. Throws RangeError outside [band_lo, band_hi].
  double at(double f_hz) const;

  /// Max and min of k over [lo, hi], including interior grid points.
  std::pair<double, double> extrema(double lo_hz, double hi_hz) const;

 private:
  std::vector<AbsorptionEntry> entries_;
};

inline double absorption_at(const AbsorptionTable& table, double f_hz) { return table.at(f_hz); }

struct LorentzPeak {
  double center_hz;
  double amplitude_per_m;
  double halfwidth_hz;
};

/// k(f) = baseline + sum_i A_i * g_i^2 / ((f - c_i)^2 + g_i^2), sampled on `grid_hz`.
AbsorptionTable synth_absorption(std::span<const LorentzPeak> peaks, double baseline_per_m,
                                 std::span<const double> grid_hz);

/// lo, lo+step, ... up to and including hi (within half a step).
std::vector<double> uniform_grid(double lo_hz, double hi_hz, double step_hz);

/// Line list of the shipped synthetic medium: a humid-air stand-in whose
/// resonances cluster between 2.1 and 3.4 THz.
std::vector<LorentzPeak> default_medium_peaks();
inline constexpr double kDefaultMediumBaseline = 2e-3;  // 1/m

/// Default synthetic medium on a 1 GHz grid over 0.05-10.5 THz.
AbsorptionTable default_medium();

/// Transparent medium (k = 0 everywhere) over the same band.
AbsorptionTable transparent_medium();

/// Reads `frequency_hz,k_per_m` rows. An optional first line starting with a
/// non-numeric token is treated as a header. Frequencies must be strictly
/// increasing; out-of-order rows, negative k or unparsable fields raise IngestionError.
AbsorptionTable load_absorption_csv(const std::filesystem::path& path);
void save_absorption_csv(const AbsorptionTable& table, const std::filesystem::path& path);

struct ChannelParams {
  double distance_m;
  double center_hz;  // transmitted pulse's center frequency
  double temperature_k = kDefaultTemperature;

  void validate() const;
};

/// c0 / (4 pi d_r f_c)
double spreading_gain(const ChannelParams& params);

/// H(f, d_r) = spreading gain * exp(-j 2 pi f d_r / c0) * exp(-k(f) d_r / 2)
std::complex<double> channel_response(const ChannelParams& params, const AbsorptionTable& table,
                                      double f_hz);

struct NoisePsd {
  double background;     // W/Hz
  double self_induced;   // W/Hz
  double total() const noexcept { return background + self_induced; }
};

/// Molecular absorption noise PSD. The background term uses the saturated
/// emissivity (1 when k(f) > 0, else 0); the self-induced term re-radiates
/// the fraction 1 - exp(-k d_r) of `pulse_psd`.
NoisePsd noise_psd_terms(const ChannelParams& params, const AbsorptionTable& table,
                         double pulse_psd, double f_hz);

inline double noise_psd(const ChannelParams& params, const AbsorptionTable& table,
                        double pulse_psd, double f_hz) {
  return noise_psd_terms(params, table, pulse_psd, f_hz).total();
}

/// Magnitude factor of the signal/noise cross term in the covariance,
/// sqrt(1 - e^-x) / e^{x/2} * (c0 / (4 pi d_r f_c))^2 with x = k d_r.
double cross_term_factor(const ChannelParams& params, double k_per_m);

}  // namespace nanoloc
