#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace nanoloc {

struct Band {
  double lo_hz;
  double hi_hz;
};

/// nth time-derivative Gaussian pulse.
struct PulseSpec {
  int order;          // n >= 1
  double sigma_s;     // Gaussian standard deviation
  double amplitude;   // a_n, chosen so |P_n|^2 is an energy spectral density (J/Hz)
  double energy_j;

  void validate() const;
};

/// P_n(f) = a_n (j 2 pi f)^n exp(-(2 pi sigma f)^2 / 2)
std::complex<double> pulse_spectrum(const PulseSpec& spec, double f_hz);

/// |P_n(f)|^2 without forming the complex power (safe for large n).
double pulse_energy_density(const PulseSpec& spec, double f_hz);

/// sqrt(n) / (2 pi sigma)
double center_frequency(int order, double sigma_s);
double sigma_for_center(int order, double center_hz);

/// Duration holding 99.99% of the pulse energy, taken as 10 sigma.
inline double pulse_duration(double sigma_s) { return 10.0 * sigma_s; }

/// Bins lo, lo + df, ... not exceeding hi.
std::vector<double> bin_grid(Band band, double bin_width_hz);

/// a_n giving 2 * sum_b |P_n(f_b)|^2 * df == target_energy on the bin grid
/// of `band` (one-sided sum of a real pulse).
double normalize_energy(int order, double sigma_s, double target_energy_j, Band band,
                        double bin_width_hz);

/// Frequencies either side of the center where |P_n|^2 falls to half its
/// peak, located by bisection.
Band half_power_band(int order, double sigma_s);

struct EventSymbol {
  std::size_t id;  // 0-based
  double center_hz;
  PulseSpec pulse;
  Band half_power;
};

class EventAlphabet {
 public:
  EventAlphabet() = default;
  /// Throws AlphabetError if centers are not strictly increasing or if
  /// consecutive half-power bands overlap.
  explicit EventAlphabet(std::vector<EventSymbol> symbols);

  const std::vector<EventSymbol>& symbols() const noexcept { return symbols_; }
  const EventSymbol& operator[](std::size_t i) const { return symbols_.at(i); }
  std::size_t size() const noexcept { return symbols_.size(); }
  bool empty() const noexcept { return symbols_.empty(); }
  std::vector<double> center_frequencies() const;

 private:
  std::vector<EventSymbol> symbols_;
};

EventAlphabet build_alphabet(int order, std::span<const double> centers_hz, double energy_j,
                             Band band, double bin_width_hz);

}  // namespace nanoloc
