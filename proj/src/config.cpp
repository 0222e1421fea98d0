#include "nanoloc/config.hpp"

#include <fstream>

#include <fmt/format.h>

#include "nanoloc/errors.hpp"

namespace nanoloc {

namespace {

using nlohmann::json;

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.is_object() || !obj.contains(key) || obj.at(key).is_null()) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("config key '{}' has the wrong type: {}", key, e.what()));
  }
}

const json& section(const json& doc, const char* name) {
  if (!doc.contains(name) || !doc.at(name).is_object()) {
    throw ConfigError(fmt::format("config is missing the '{}' section", name));
  }
  return doc.at(name);
}

std::shared_ptr<const AbsorptionTable> load_csv_medium(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw ConfigError(fmt::format("medium file '{}' not found", path.string()));
  }
  try {
    return std::make_shared<const AbsorptionTable>(load_absorption_csv(path));
  } catch (const IngestionError& e) {
    throw ConfigError(fmt::format("medium file '{}': {}", path.string(), e.what()));
  }
}

std::vector<UlaConfig> parse_ulas(const json& list, double window_s, const char* which) {
  if (!list.is_array()) throw ConfigError(fmt::format("ulas.{} must be an array", which));
  std::vector<UlaConfig> out;
  for (const auto& u : list) {
    const auto elements = get_or<std::size_t>(u, "elements", 8);
    const auto spacing_um = get_or<double>(u, "spacing_um", 0.0);
    const auto lo = get_or<double>(u, "f_low_THz", 0.0) * kTera;
    const auto hi = get_or<double>(u, "f_high_THz", 0.0) * kTera;
    std::optional<std::size_t> override_bins;
    if (u.contains("bins_override") && !u.at("bins_override").is_null())
      override_bins = get_or<std::size_t>(u, "bins_override", 0);
    try {
      out.emplace_back(elements, spacing_um * 1e-6, lo, hi, window_s, override_bins);
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("ulas.{}: {}", which, e.what()));
    }
  }
  return out;
}

}  // namespace

std::shared_ptr<const AbsorptionTable> load_medium_spec(const json& medium, const std::filesystem::path& base_dir) {
  const auto source = get_or<std::string>(medium, "source", "synthetic");
  if (source == "csv") {
    const auto rel = get_or<std::string>(medium, "path", "");
    if (rel.empty()) throw ConfigError("medium.source is csv but medium.path is empty");
    std::filesystem::path p(rel);
    return load_csv_medium(p.is_absolute() ? p : base_dir / p);
  }
  if (source != "synthetic") throw ConfigError(fmt::format("unknown medium.source '{}'", source));

  const auto preset = get_or<std::string>(medium, "preset", "default");
  if (preset == "default") return std::make_shared<const AbsorptionTable>(default_medium());
  if (preset == "transparent") return std::make_shared<const AbsorptionTable>(transparent_medium());
  if (preset != "custom") throw ConfigError(fmt::format("unknown medium.preset '{}'", preset));

  const auto grid_thz = get_or<std::vector<double>>(medium, "grid_THz", {0.05, 10.5});
  if (grid_thz.size() != 2) throw ConfigError("medium.grid_THz must be [lo, hi]");
  const auto step = get_or<double>(medium, "grid_step_GHz", 1.0) * 1e9;
  std::vector<LorentzPeak> peaks;
  if (medium.contains("peaks")) {
    for (const auto& p : medium.at("peaks")) {
      peaks.push_back({get_or<double>(p, "center_THz", 0.0) * kTera, get_or<double>(p, "amplitude_per_m", 0.0),
                       get_or<double>(p, "halfwidth_GHz", 0.0) * 1e9});
    }
  }
  const auto grid = uniform_grid(grid_thz[0] * kTera, grid_thz[1] * kTera, step);
  return std::make_shared<const AbsorptionTable>(
      synth_absorption(peaks, get_or<double>(medium, "baseline_per_m", 0.0), grid));
}

ExperimentConfig LoadedConfig::for_mode(UlaMode mode) const {
  ExperimentConfig out = experiment;
  out.mode = mode;
  out.ulas = mode == UlaMode::single ? single_ulas : dual_ulas;
  return out;
}

LoadedConfig parse_config(const json& doc, const std::filesystem::path& base_dir, const ConfigOverrides& overrides) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  const auto& medium = section(doc, "medium");
  const auto& pulse = section(doc, "pulse");
  const auto& alphabet = section(doc, "alphabet");
  const auto& ulas = section(doc, "ulas");
  const json experiment = doc.contains("experiment") ? doc.at("experiment") : json::object();

  const double window_s = get_or<double>(pulse, "observation_window_ps", 9.0) * 1e-12;
  if (!(window_s > 0.0)) throw ConfigError("pulse.observation_window_ps must be > 0");

  const int order = get_or<int>(alphabet, "order", 6);
  const double energy_j = get_or<double>(alphabet, "energy_aJ", 1.0) * 1e-18;
  std::vector<double> centers;
  for (double c : get_or<std::vector<double>>(alphabet, "centers_THz", {})) centers.push_back(c * kTera);
  if (centers.empty()) throw ConfigError("alphabet.centers_THz must list at least one frequency");
  const auto band_thz = get_or<std::vector<double>>(pulse, "energy_band_THz", {0.1, 10.0});
  if (band_thz.size() != 2) throw ConfigError("pulse.energy_band_THz must be [lo, hi]");

  LoadedConfig out;
  auto& cfg = out.experiment;
  try {
    cfg.alphabet = build_alphabet(order, centers, energy_j, {band_thz[0] * kTera, band_thz[1] * kTera}, 1.0 / window_s);
  } catch (const AlphabetError& e) {
    throw ConfigError(fmt::format("alphabet: {}", e.what()));
  }

  if (ulas.contains("single")) out.single_ulas = parse_ulas(ulas.at("single"), window_s, "single");
  if (ulas.contains("dual")) out.dual_ulas = parse_ulas(ulas.at("dual"), window_s, "dual");

  if (overrides.medium) {
    cfg.medium = *overrides.medium == "synthetic"
                     ? std::make_shared<const AbsorptionTable>(default_medium())
                     : load_csv_medium(*overrides.medium);
  } else {
    cfg.medium = load_medium_spec(medium, base_dir);
  }
  cfg.temperature_k = get_or<double>(medium, "temperature_K", kDefaultTemperature);

  cfg.mode = overrides.mode.value_or(parse_ula_mode(get_or<std::string>(ulas, "mode", "dual")));
  cfg.theta_deg = get_or<double>(experiment, "theta_deg", kDefaultTheta);
  cfg.distances_m = overrides.distances_m.value_or(get_or<std::vector<double>>(experiment, "distances_m", default_distances()));
  cfg.runs = overrides.runs.value_or(get_or<std::size_t>(experiment, "runs", 100));
  cfg.master_seed = overrides.seed.value_or(get_or<std::uint64_t>(experiment, "seed", 1));
  std::vector<std::size_t> exclusions;
  for (auto e : get_or<std::vector<std::size_t>>(experiment, "exclude_from_overall", {4})) {
    if (e < 1) throw ConfigError("experiment.exclude_from_overall uses 1-based event numbers");
    exclusions.push_back(e - 1);
  }
  cfg.overall_exclusions = exclusions;

  auto& opt = cfg.options;
  opt.grid_step_deg = get_or<double>(experiment, "grid_step_deg", 0.05);
  if (experiment.contains("snr_threshold_db") && !experiment.at("snr_threshold_db").is_null())
    opt.snr_threshold_db = get_or<double>(experiment, "snr_threshold_db", 0.0);
  opt.parabolic_refinement = get_or<bool>(experiment, "parabolic_refinement", false);
  opt.snapshots = get_or<std::size_t>(experiment, "snapshots", 1);
  opt.num_sources = get_or<std::size_t>(experiment, "num_sources", 1);
  opt.threads = overrides.threads.value_or(get_or<unsigned>(experiment, "threads", 1));

  cfg.ulas = cfg.mode == UlaMode::single ? out.single_ulas : out.dual_ulas;
  cfg.validate();
  return out;
}

LoadedConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path.string()));
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("config file '{}' is not valid JSON: {}", path.string(), e.what()));
  }
  return parse_config(doc, path.parent_path(), overrides);
}

}  // namespace nanoloc
