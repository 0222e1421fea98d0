#include "nanoloc/pulse.hpp"

#include <cmath>

#include <fmt/format.h>

#include "nanoloc/constants.hpp"
#include "nanoloc/errors.hpp"

namespace nanoloc {

void PulseSpec::validate() const {
  if (order < 1) throw ConfigError("pulse derivative order must be >= 1");
  if (!(sigma_s > 0.0)) throw ConfigError("pulse sigma must be > 0");
  if (!(energy_j > 0.0)) throw ConfigError("pulse energy must be > 0");
  if (!(amplitude > 0.0)) throw ConfigError("pulse normalization must be > 0");
}

namespace {

// ln of the unnormalized magnitude: n ln(2 pi f) - (2 pi sigma f)^2 / 2
double log_shape(int order, double sigma_s, double f_hz) {
  const double w = kTwoPi * f_hz;
  const double s = w * sigma_s;
  return order * std::log(w) - 0.5 * s * s;
}

}  // namespace

std::complex<double> pulse_spectrum(const PulseSpec& spec, double f_hz) {
  if (f_hz < 0.0) throw RangeError("pulse spectrum is evaluated for f >= 0");
  if (f_hz == 0.0) return {0.0, 0.0};
  const double magnitude = spec.amplitude * std::exp(log_shape(spec.order, spec.sigma_s, f_hz));
  // j^n
  static constexpr std::complex<double> kJPowers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return magnitude * kJPowers[spec.order % 4];
}

double pulse_energy_density(const PulseSpec& spec, double f_hz) {
  if (f_hz <= 0.0) return 0.0;
  return spec.amplitude * spec.amplitude * std::exp(2.0 * log_shape(spec.order, spec.sigma_s, f_hz));
}

double center_frequency(int order, double sigma_s) {
  if (order < 1 || !(sigma_s > 0.0)) throw RangeError("center_frequency needs n >= 1 and sigma > 0");
  return std::sqrt(static_cast<double>(order)) / (kTwoPi * sigma_s);
}

double sigma_for_center(int order, double center_hz) {
  if (order < 1 || !(center_hz > 0.0)) throw RangeError("sigma_for_center needs n >= 1 and f_c > 0");
  return std::sqrt(static_cast<double>(order)) / (kTwoPi * center_hz);
}

std::vector<double> bin_grid(Band band, double bin_width_hz) {
  if (!(bin_width_hz > 0.0) || !(band.hi_hz > band.lo_hz) || !(band.lo_hz >= 0.0)) {
    throw ConfigError("degenerate band or bin width");
  }
  // Tolerate representation error so that e.g. 8 THz * 9 ps counts as 72.
  const auto spans = static_cast<std::size_t>(std::floor((band.hi_hz - band.lo_hz) / bin_width_hz + 1e-9));
  std::vector<double> bins(spans + 1);
  for (std::size_t b = 0; b <= spans; ++b) bins[b] = band.lo_hz + static_cast<double>(b) * bin_width_hz;
  return bins;
}

double normalize_energy(int order, double sigma_s, double target_energy_j, Band band,
                        double bin_width_hz) {
  if (!(target_energy_j > 0.0)) throw ConfigError("target energy must be > 0");
  const auto bins = bin_grid(band, bin_width_hz);
  // Work relative to the peak of the shape to stay clear of overflow for large n.
  const double peak = log_shape(order, sigma_s, center_frequency(order, sigma_s));
  double sum = 0.0;
  for (double f : bins) {
    if (f > 0.0) sum += std::exp(2.0 * (log_shape(order, sigma_s, f) - peak));
  }
  const double unit_energy = 2.0 * sum * bin_width_hz;
  if (!(unit_energy > 0.0)) {
    throw ConfigError("pulse has no energy on the normalization grid");
  }
  return std::sqrt(target_energy_j / unit_energy) * std::exp(-peak);
}

Band half_power_band(int order, double sigma_s) {
  const double fc = center_frequency(order, sigma_s);
  const double target = log_shape(order, sigma_s, fc) + 0.5 * std::log(0.5);
  auto bisect = [&](double inside, double outside) {
    // log_shape(inside) > target >= log_shape(outside)
    for (int it = 0; it < 200 && std::abs(outside - inside) > 1e-12 * fc; ++it) {
      const double mid = 0.5 * (inside + outside);
      (log_shape(order, sigma_s, mid) > target ? inside : outside) = mid;
    }
    return 0.5 * (inside + outside);
  };
  double lo_out = 0.5 * fc;
  while (log_shape(order, sigma_s, lo_out) > target) lo_out *= 0.5;
  double hi_out = 2.0 * fc;
  while (log_shape(order, sigma_s, hi_out) > target) hi_out *= 2.0;
  return {bisect(fc, lo_out), bisect(fc, hi_out)};
}

EventAlphabet::EventAlphabet(std::vector<EventSymbol> symbols) : symbols_(std::move(symbols)) {
  for (std::size_t i = 1; i < symbols_.size(); ++i) {
    const auto& prev = symbols_[i - 1];
    const auto& cur = symbols_[i];
    if (!(cur.center_hz > prev.center_hz)) {
      throw AlphabetError(fmt::format("center frequencies must be strictly increasing (events {} and {})",
                                      i, i + 1));
    }
    if (cur.half_power.lo_hz <= prev.half_power.hi_hz) {
      throw AlphabetError(fmt::format(
          "half-power bands of events {} ({:.4g} THz) and {} ({:.4g} THz) overlap", i,
          prev.center_hz / kTera, i + 1, cur.center_hz / kTera));
    }
  }
}

std::vector<double> EventAlphabet::center_frequencies() const {
  std::vector<double> out;
  out.reserve(symbols_.size());
  for (const auto& s : symbols_) out.push_back(s.center_hz);
  return out;
}

EventAlphabet build_alphabet(int order, std::span<const double> centers_hz, double energy_j, Band band,
                             double bin_width_hz) {
  if (centers_hz.empty()) throw AlphabetError("alphabet needs at least one center frequency");
  std::vector<EventSymbol> symbols;
  symbols.reserve(centers_hz.size());
  for (std::size_t i = 0; i < centers_hz.size(); ++i) {
    const double fc = centers_hz[i];
    const double sigma = sigma_for_center(order, fc);
    PulseSpec pulse{order, sigma, normalize_energy(order, sigma, energy_j, band, bin_width_hz), energy_j};
    symbols.push_back({i, fc, pulse, half_power_band(order, sigma)});
  }
  return EventAlphabet(std::move(symbols));
}

}  // namespace nanoloc
