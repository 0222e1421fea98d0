#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nanoloc/harness.hpp"

namespace nanoloc {

/// Command-line values that take precedence over the config file.
struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs;
  std::optional<std::vector<double>> distances_m;
  std::optional<std::string> medium;  // "synthetic" or a CSV path
  std::optional<UlaMode> mode;
  std::optional<unsigned> threads;
};

/// Experiment description parsed from a JSON document with sections
/// {medium, pulse, alphabet, ulas, experiment}. Frequencies are in THz,
/// distances in m, energies in aJ, angles in degrees.
struct LoadedConfig {
  ExperimentConfig experiment;  // for the selected mode
  std::vector<UlaConfig> single_ulas;
  std::vector<UlaConfig> dual_ulas;

  /// Copy of the experiment retargeted to `mode`.
  ExperimentConfig for_mode(UlaMode mode) const;
};

/// Throws ConfigError with an actionable message on any schema or physical
/// inconsistency. Relative medium paths in the file resolve against
/// `base_dir`; a medium override resolves against the working directory.
LoadedConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir,
                          const ConfigOverrides& overrides = {});

LoadedConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides = {});

std::shared_ptr<const AbsorptionTable> load_medium_spec(const nlohmann::json& medium,
                                                        const std::filesystem::path& base_dir);

}  // namespace nanoloc
