#include "nanoloc/channel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string>
#include <string_view>

#include <fmt/format.h>

#include "nanoloc/errors.hpp"

namespace nanoloc {

AbsorptionTable::AbsorptionTable(std::vector<AbsorptionEntry> entries) : entries_(std::move(entries)) {
  if (entries_.size() < 2) {
    throw ConfigError("absorption table needs at least two entries");
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (!std::isfinite(e.frequency_hz) || !std::isfinite(e.k_per_m) || e.k_per_m < 0.0) {
      throw ConfigError(fmt::format("absorption entry {} is invalid (f={}, k={})", i, e.frequency_hz,
                                    e.k_per_m));
    }
    if (i > 0 && !(e.frequency_hz > entries_[i - 1].frequency_hz)) {
      throw ConfigError(fmt::format("absorption frequencies must be strictly increasing (entry {})", i));
    }
  }
}

double AbsorptionTable::at(double f_hz) const {
  if (!contains(f_hz)) {
    throw RangeError(fmt::format("frequency {} Hz outside absorption band [{}, {}] Hz", f_hz, band_lo(),
                                 band_hi()));
  }
  auto it = std::lower_bound(entries_.begin(), entries_.end(), f_hz,
                             [](const AbsorptionEntry& e, double f) { return e.frequency_hz < f; });
  if (it->frequency_hz == f_hz) return it->k_per_m;
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double t = (f_hz - lo.frequency_hz) / (hi.frequency_hz - lo.frequency_hz);
  return lo.k_per_m + t * (hi.k_per_m - lo.k_per_m);
}

std::pair<double, double> AbsorptionTable::extrema(double lo_hz, double hi_hz) const {
  lo_hz = std::max(lo_hz, band_lo());
  hi_hz = std::min(hi_hz, band_hi());
  if (lo_hz > hi_hz) throw RangeError("extrema interval does not intersect the absorption band");
  double kmax = std::max(at(lo_hz), at(hi_hz));
  double kmin = std::min(at(lo_hz), at(hi_hz));
  for (const auto& e : entries_) {
    if (e.frequency_hz > lo_hz && e.frequency_hz < hi_hz) {
      kmax = std::max(kmax, e.k_per_m);
      kmin = std::min(kmin, e.k_per_m);
    }
  }
  return {kmax, kmin};
}

AbsorptionTable synth_absorption(std::span<const LorentzPeak> peaks, double baseline_per_m,
                                 std::span<const double> grid_hz) {
  if (grid_hz.empty()) throw ConfigError("synthetic absorption grid is empty");
  if (!(baseline_per_m >= 0.0)) throw ConfigError("absorption baseline must be >= 0");
  for (const auto& p : peaks) {
    if (!(p.amplitude_per_m > 0.0) || !(p.halfwidth_hz > 0.0)) {
      throw ConfigError(fmt::format("Lorentzian peak at {} Hz needs positive amplitude and halfwidth",
                                    p.center_hz));
    }
  }
  std::vector<AbsorptionEntry> entries;
  entries.reserve(grid_hz.size());
  for (double f : grid_hz) {
    double k = baseline_per_m;
    for (const auto& p : peaks) {
      const double g2 = p.halfwidth_hz * p.halfwidth_hz;
      const double df = f - p.center_hz;
      k += p.amplitude_per_m * g2 / (df * df + g2);
    }
    entries.push_back({f, k});
  }
  return AbsorptionTable(std::move(entries));
}

std::vector<double> uniform_grid(double lo_hz, double hi_hz, double step_hz) {
  if (!(step_hz > 0.0) || !(hi_hz >= lo_hz)) throw ConfigError("invalid uniform grid");
  const auto count = static_cast<std::size_t>(std::floor((hi_hz - lo_hz) / step_hz + 0.5)) + 1;
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) grid[i] = lo_hz + static_cast<double>(i) * step_hz;
  return grid;
}

std::vector<LorentzPeak> default_medium_peaks() {
  // center [THz], amplitude [1/m], halfwidth [GHz]
  struct Line {
    double center_thz, amplitude, halfwidth_ghz;
  };
  static constexpr Line kLines[] = {
      {0.5570, 0.5, 4.0},   {0.7520, 0.8, 5.0},   {0.9880, 0.6, 5.0},   {1.0970, 3.0, 8.0},
      {1.1630, 2.5, 8.0},   {1.2290, 3.0, 8.0},   {1.4110, 4.0, 10.0},  {1.6020, 5.0, 10.0},
      {1.7170, 6.0, 12.0},  {1.8670, 8.0, 15.0},  {1.9190, 8.0, 15.0},  {2.1056, 30.0, 8.0},
      {2.2167, 38.0, 9.0},  {2.3278, 45.0, 10.0}, {2.4389, 34.0, 8.0},  {2.5500, 42.0, 9.0},
      {2.6612, 40.0, 10.0}, {2.7723, 28.0, 8.0},  {2.8834, 36.0, 9.0},  {2.9945, 44.0, 10.0},
      {3.1056, 33.0, 8.0},  {3.2167, 39.0, 9.0},  {3.3278, 30.0, 10.0}, {3.9000, 6.0, 20.0},
      {4.5200, 5.0, 20.0},  {5.1100, 6.0, 20.0},  {6.3500, 5.0, 20.0},  {7.2600, 4.0, 20.0},
      {8.4400, 5.0, 20.0},
  };
  std::vector<LorentzPeak> peaks;
  for (const auto& l : kLines) peaks.push_back({l.center_thz * kTera, l.amplitude, l.halfwidth_ghz * 1e9});
  return peaks;
}

AbsorptionTable default_medium() {
  const auto grid = uniform_grid(0.05 * kTera, 10.5 * kTera, 1e9);
  const auto peaks = default_medium_peaks();
  return synth_absorption(peaks, kDefaultMediumBaseline, grid);
}

AbsorptionTable transparent_medium() {
  const auto grid = uniform_grid(0.05 * kTera, 10.5 * kTera, 1e9);
  return synth_absorption({}, 0.0, grid);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

AbsorptionTable load_absorption_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError(0, fmt::format("cannot open absorption file '{}'", path.string()));

  std::vector<AbsorptionEntry> entries;
  std::string line;
  std::size_t row = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++row;
    auto text = trim(line);
    if (text.empty()) continue;
    const auto comma = text.find(',');
    const auto first = text.substr(0, comma);
    double f = 0.0;
    double k = 0.0;
    if (first_content) {
      first_content = false;
      if (!parse_double(first, f)) continue;  // header line
    }
    if (comma == std::string_view::npos) throw IngestionError(row, "expected two comma-separated columns");
    const auto second = text.substr(comma + 1);
    if (second.find(',') != std::string_view::npos) throw IngestionError(row, "expected exactly two columns");
    if (!parse_double(first, f) || !std::isfinite(f)) throw IngestionError(row, "unparsable frequency");
    if (!parse_double(second, k) || !std::isfinite(k)) throw IngestionError(row, "unparsable absorption coefficient");
    if (k < 0.0) throw IngestionError(row, fmt::format("negative absorption coefficient {}", k));
    if (!entries.empty() && !(f > entries.back().frequency_hz)) {
      throw IngestionError(row, "frequencies must be strictly increasing");
    }
    entries.push_back({f, k});
  }
  if (entries.size() < 2) throw IngestionError(row, "absorption file needs at least two data rows");
  return AbsorptionTable(std::move(entries));
}

void save_absorption_csv(const AbsorptionTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  out << "frequency_hz,k_per_m\n";
  for (const auto& e : table.entries()) out << fmt::format("{},{}\n", e.frequency_hz, e.k_per_m);
  if (!out) throw Error(fmt::format("write failed for '{}'", path.string()));
}

void ChannelParams::validate() const {
  if (!(distance_m > 0.0)) throw ConfigError("path length must be > 0");
  if (!(center_hz > 0.0)) throw ConfigError("center frequency must be > 0");
  if (!(temperature_k > 0.0)) throw ConfigError("temperature must be > 0");
}

double spreading_gain(const ChannelParams& params) {
  params.validate();
  return kSpeedOfLight / (4.0 * kPi * params.distance_m * params.center_hz);
}

std::complex<double> channel_response(const ChannelParams& params, const AbsorptionTable& table,
                                      double f_hz) {
  const double k = table.at(f_hz);
  const double magnitude = spreading_gain(params) * std::exp(-0.5 * k * params.distance_m);
  return std::polar(magnitude, -kTwoPi * f_hz * params.distance_m / kSpeedOfLight);
}

NoisePsd noise_psd_terms(const ChannelParams& params, const AbsorptionTable& table, double pulse_psd,
                         double f_hz) {
  if (pulse_psd < 0.0) throw RangeError("pulse PSD must be >= 0");
  const double k = table.at(f_hz);
  const double emissivity_limit = k > 0.0 ? 1.0 : 0.0;
  const double aperture = kSpeedOfLight / (std::sqrt(4.0 * kPi) * params.center_hz);
  const double spread = spreading_gain(params);
  return {
      kBoltzmann * params.temperature_k * emissivity_limit * aperture * aperture,
      pulse_psd * -std::expm1(-k * params.distance_m) * spread * spread,
  };
}

double cross_term_factor(const ChannelParams& params, double k_per_m) {
  const double x = k_per_m * params.distance_m;
  const double spread = spreading_gain(params);
  return std::sqrt(-std::expm1(-x)) * std::exp(-0.5 * x) * spread * spread;
}

}  // namespace nanoloc
