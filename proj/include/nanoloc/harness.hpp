#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "nanoloc/array.hpp"
#include "nanoloc/channel.hpp"
#include "nanoloc/classifier.hpp"
#include "nanoloc/doa.hpp"
#include "nanoloc/pulse.hpp"

namespace nanoloc {

enum class UlaMode { single, dual };

std::string_view to_string(UlaMode mode);
UlaMode parse_ula_mode(std::string_view text);

struct ExperimentOptions {
  double grid_step_deg = 0.05;
  std::optional<double> snr_threshold_db;
  bool parabolic_refinement = false;
  std::size_t snapshots = 1;
  std::size_t num_sources = 1;
  unsigned threads = 1;
};

inline constexpr double kDefaultTheta = -18.525;  // deg

std::vector<double> default_distances();

struct ExperimentConfig {
  UlaMode mode = UlaMode::dual;
  std::vector<UlaConfig> ulas;  // one (single) or two (dual, ascending bands)
  EventAlphabet alphabet;
  double theta_deg = kDefaultTheta;
  std::vector<double> distances_m = default_distances();
  std::size_t runs = 100;
  std::uint64_t master_seed = 1;
  std::shared_ptr<const AbsorptionTable> medium;
  double temperature_k = kDefaultTemperature;
  /// Events left out of the "excluding" overall aggregates (0-based).
  std::vector<std::size_t> overall_exclusions = {3};
  ExperimentOptions options;

  /// Throws ConfigError on inconsistent geometry, routing or pulse/window fit.
  void validate() const;
};

/// ULA index receiving a pulse centered at `center_hz`: in dual mode ULA 0
/// covers [f_l1, f_h1) and ULA 1 covers [f_l2, f_h2].
std::size_t route_ula(double center_hz, const ExperimentConfig& config);

/// splitmix64-based, order-free derivation of a trial's RNG seed.
std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t event, std::size_t distance_index,
                         std::size_t trial);

struct TrialResult {
  std::size_t event_true;
  std::size_t event_est;
  double theta_hat_deg;
  double f_cen_hz;
  double distance_m;
  std::size_t distance_index;
  std::size_t ula_index;
  std::uint64_t seed;
};

struct TrialDetail {
  TrialResult result;
  std::vector<Snapshot> snapshots;
  ImusicSpectrum spectrum;
  EstimatedPsd psd;
};

TrialDetail run_trial_detailed(const ExperimentConfig& config, std::size_t event, double distance_m,
                               std::uint64_t seed);
TrialResult run_trial(const ExperimentConfig& config, std::size_t event, double distance_m,
                      std::uint64_t seed, std::size_t distance_index = 0);

struct PointMetrics {
  std::size_t event;
  double center_hz;
  std::size_t distance_index;
  double distance_m;
  std::size_t trials;
  double rmse_doa_deg;
  double rmse_fc_hz;  // raw centroid against the true center
  double tpr;
};

struct DistanceSummary {
  double distance_m;
  std::vector<std::vector<std::size_t>> confusion;  // [estimated][true]
  double overall_tpr;
  double overall_tpr_excluding;
  double mean_rmse_doa_excluding;
};

struct MetricsReport {
  UlaMode mode;
  std::vector<double> centers_hz;
  std::vector<double> distances_m;
  std::vector<std::size_t> exclusions;
  std::vector<PointMetrics> points;  // distance-major, then event
  std::vector<DistanceSummary> per_distance;

  const PointMetrics& point(std::size_t event, std::size_t distance_index) const;
};

inline double rmse(std::span<const double> estimates, double truth) {
  if (estimates.empty()) return 0.0;
  double sum = 0.0;
  for (double e : estimates) sum += (e - truth) * (e - truth);
  return std::sqrt(sum / static_cast<double>(estimates.size()));
}

/// Metrics from an arbitrary set of trials of `config`.
MetricsReport aggregate(const ExperimentConfig& config, std::span<const TrialResult> trials);

/// All (distance, event, trial) combinations, fanned out over
/// `options.threads` workers. Output is independent of the thread count.
MetricsReport run_experiment(const ExperimentConfig& config, std::vector<TrialResult>* trials_out = nullptr);

}  // namespace nanoloc
