#include "nanoloc/harness.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "nanoloc/errors.hpp"

namespace nanoloc {

std::string_view to_string(UlaMode mode) { return mode == UlaMode::single ? "single" : "dual"; }

UlaMode parse_ula_mode(std::string_view text) {
  if (text == "single") return UlaMode::single;
  if (text == "dual") return UlaMode::dual;
  throw ConfigError(fmt::format("unknown ULA mode '{}' (expected single or dual)", text));
}

std::vector<double> default_distances() { return {0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0}; }

namespace {

bool close(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b)); }

std::size_t route(double fc, UlaMode mode, const std::vector<UlaConfig>& ulas) {
  if (mode == UlaMode::single) {
    const auto& u = ulas.at(0);
    if (fc < u.f_low_hz() || fc > u.f_high_hz()) {
      throw ConfigError(fmt::format("center frequency {:.4g} THz outside the ULA band", fc / kTera));
    }
    return 0;
  }
  const auto& lo = ulas.at(0);
  const auto& hi = ulas.at(1);
  if (fc >= lo.f_low_hz() && fc < lo.f_high_hz()) return 0;
  if (fc >= hi.f_low_hz() && fc <= hi.f_high_hz()) return 1;
  throw ConfigError(fmt::format("center frequency {:.4g} THz outside both ULA bands", fc / kTera));
}

}  // namespace

void ExperimentConfig::validate() const {
  const std::size_t expected = mode == UlaMode::single ? 1 : 2;
  if (ulas.size() != expected) {
    throw ConfigError(fmt::format("{} mode needs {} ULA(s), got {}", to_string(mode), expected, ulas.size()));
  }
  if (mode == UlaMode::dual && !close(ulas[0].f_high_hz(), ulas[1].f_low_hz())) {
    throw ConfigError("dual mode: ULA1 upper band edge must equal ULA2 lower band edge");
  }
  if (alphabet.empty()) throw ConfigError("alphabet is empty");
  if (!(std::abs(theta_deg) < 90.0)) throw ConfigError("source angle must lie in (-90, 90) degrees");
  for (double d : distances_m)
    if (!(d > 0.0)) throw ConfigError("distances must be > 0");
  if (runs < 1) throw ConfigError("runs must be >= 1");
  if (!medium) throw ConfigError("no absorption medium configured");
  if (!(temperature_k > 0.0)) throw ConfigError("temperature must be > 0");
  if (options.snapshots < 1) throw ConfigError("snapshot count K must be >= 1");
  for (std::size_t e : overall_exclusions)
    if (e >= alphabet.size()) throw ConfigError(fmt::format("excluded event {} not in alphabet", e + 1));

  for (const auto& u : ulas) {
    if (options.num_sources < 1 || options.num_sources >= u.elements()) {
      throw ConfigError("number of sources must satisfy 1 <= M < N");
    }
    if (!medium->contains(u.bins_hz().front()) || !medium->contains(u.bins_hz().back())) {
      throw ConfigError(fmt::format("absorption medium [{:.4g}, {:.4g}] THz does not cover ULA bins [{:.4g}, {:.4g}] THz",
                                    medium->band_lo() / kTera, medium->band_hi() / kTera,
                                    u.bins_hz().front() / kTera, u.bins_hz().back() / kTera));
    }
  }
  for (const auto& s : alphabet.symbols()) {
    const auto& u = ulas[route(s.center_hz, mode, ulas)];
    if (pulse_duration(s.pulse.sigma_s) > u.window_s()) {
      throw ConfigError(fmt::format(
          "event {} ({:.4g} THz): pulse duration {:.4g} ps exceeds observation window {:.4g} ps; lower the "
          "order or raise the window",
          s.id + 1, s.center_hz / kTera, pulse_duration(s.pulse.sigma_s) * 1e12, u.window_s() * 1e12));
    }
  }
}

std::size_t route_ula(double center_hz, const ExperimentConfig& config) {
  return route(center_hz, config.mode, config.ulas);
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t event, std::size_t distance_index,
                         std::size_t trial) {
  auto mix = [](std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  };
  std::uint64_t h = mix(master_seed);
  h = mix(h ^ static_cast<std::uint64_t>(event));
  h = mix(h ^ static_cast<std::uint64_t>(distance_index));
  h = mix(h ^ static_cast<std::uint64_t>(trial));
  return h;
}

TrialDetail run_trial_detailed(const ExperimentConfig& config, std::size_t event, double distance_m,
                               std::uint64_t seed) {
  const auto& symbol = config.alphabet[event];
  const std::size_t ula_index = route_ula(symbol.center_hz, config);
  const auto& ula = config.ulas[ula_index];

  TrialDetail detail;
  detail.snapshots = simulate_snapshots(ula, symbol.pulse, *config.medium,
                                        SourceTruth{config.theta_deg, distance_m, event},
                                        config.options.snapshots, seed, config.temperature_k);
  const auto covariances = sample_covariances(detail.snapshots);
  const auto grid = angle_grid(config.options.grid_step_deg);
  detail.spectrum = imusic_spectrum(covariances, ula, grid,
                                    {config.options.num_sources, config.options.snr_threshold_db});
  const double theta_hat = estimate_doa(detail.spectrum, config.options.parabolic_refinement);
  detail.psd = estimate_psd(covariances, ula, theta_hat);
  const double centroid = spectral_centroid(detail.psd);
  detail.result = TrialResult{event, classify(centroid, config.alphabet), theta_hat, centroid, distance_m,
                              0, ula_index, seed};
  return detail;
}

TrialResult run_trial(const ExperimentConfig& config, std::size_t event, double distance_m, std::uint64_t seed,
                      std::size_t distance_index) {
  auto r = run_trial_detailed(config, event, distance_m, seed).result;
  r.distance_index = distance_index;
  return r;
}

const PointMetrics& MetricsReport::point(std::size_t event, std::size_t distance_index) const {
  return points.at(distance_index * centers_hz.size() + event);
}

MetricsReport aggregate(const ExperimentConfig& config, std::span<const TrialResult> trials) {
  const std::size_t m = config.alphabet.size();
  const std::size_t nd = config.distances_m.size();
  MetricsReport report{config.mode, config.alphabet.center_frequencies(), config.distances_m,
                       config.overall_exclusions, {}, {}};

  std::vector<std::vector<double>> doa(nd * m);
  std::vector<std::vector<double>> fcen(nd * m);
  std::vector<std::size_t> correct(nd * m, 0);
  std::vector<DistanceSummary> summaries(nd);
  for (std::size_t d = 0; d < nd; ++d) {
    summaries[d].distance_m = config.distances_m[d];
    summaries[d].confusion.assign(m, std::vector<std::size_t>(m, 0));
  }
  for (const auto& t : trials) {
    if (t.distance_index >= nd || t.event_true >= m || t.event_est >= m) {
      throw ContractError("trial result does not belong to this experiment");
    }
    const std::size_t slot = t.distance_index * m + t.event_true;
    doa[slot].push_back(t.theta_hat_deg);
    fcen[slot].push_back(t.f_cen_hz);
    correct[slot] += t.event_est == t.event_true ? 1 : 0;
    ++summaries[t.distance_index].confusion[t.event_est][t.event_true];
  }

  auto excluded = [&](std::size_t e) {
    for (std::size_t x : config.overall_exclusions)
      if (x == e) return true;
    return false;
  };
  // Sorting each bucket makes the floating-point sums independent of the
  // order in which trials arrive.
  for (auto& v : doa) std::sort(v.begin(), v.end());
  for (auto& v : fcen) std::sort(v.begin(), v.end());

  for (std::size_t d = 0; d < nd; ++d) {
    std::size_t total = 0, hits = 0, total_ex = 0, hits_ex = 0, kept = 0;
    double rmse_sum_ex = 0.0;
    for (std::size_t e = 0; e < m; ++e) {
      const std::size_t slot = d * m + e;
      const std::size_t count = doa[slot].size();
      PointMetrics p{e,
                     report.centers_hz[e],
                     d,
                     config.distances_m[d],
                     count,
                     rmse(doa[slot], config.theta_deg),
                     rmse(fcen[slot], report.centers_hz[e]),
                     count ? static_cast<double>(correct[slot]) / static_cast<double>(count) : 0.0};
      total += count;
      hits += correct[slot];
      if (!excluded(e)) {
        total_ex += count;
        hits_ex += correct[slot];
        if (count) {
          rmse_sum_ex += p.rmse_doa_deg;
          ++kept;
        }
      }
      report.points.push_back(p);
    }
    auto& s = summaries[d];
    s.overall_tpr = total ? static_cast<double>(hits) / static_cast<double>(total) : 0.0;
    s.overall_tpr_excluding = total_ex ? static_cast<double>(hits_ex) / static_cast<double>(total_ex) : 0.0;
    s.mean_rmse_doa_excluding = kept ? rmse_sum_ex / static_cast<double>(kept) : 0.0;
  }
  report.per_distance = std::move(summaries);
  return report;
}

MetricsReport run_experiment(const ExperimentConfig& config, std::vector<TrialResult>* trials_out) {
  config.validate();
  const std::size_t m = config.alphabet.size();
  const std::size_t nd = config.distances_m.size();
  const std::size_t total = nd * m * config.runs;
  std::vector<TrialResult> results(total);

  auto work = [&](std::size_t index) {
    const std::size_t trial = index % config.runs;
    const std::size_t event = (index / config.runs) % m;
    const std::size_t d = index / (config.runs * m);
    results[index] = run_trial(config, event, config.distances_m[d],
                               trial_seed(config.master_seed, event, d, trial), d);
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(config.options.threads, static_cast<unsigned>(std::max<std::size_t>(total, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < total; ++i) work(i);
  } else {
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t i = t; i < total; i += threads) work(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  auto report = aggregate(config, results);
  if (trials_out) *trials_out = std::move(results);
  return report;
}

}  // namespace nanoloc
