#include "nanoloc/cli.hpp"

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "CLI11.hpp"
#include "nanoloc/config.hpp"
#include "nanoloc/errors.hpp"
#include "nanoloc/report.hpp"

namespace nanoloc {

namespace {

namespace fs = std::filesystem;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs;
  std::vector<double> distances;
  std::optional<std::string> medium;
  std::optional<std::string> ula_mode;
  std::optional<unsigned> threads;

  ConfigOverrides overrides() const {
    ConfigOverrides o;
    o.seed = seed;
    o.runs = runs;
    if (!distances.empty()) o.distances_m = distances;
    o.medium = medium;
    if (ula_mode) o.mode = parse_ula_mode(*ula_mode);
    o.threads = threads;
    return o;
  }
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--config", a.config_path, "experiment config (JSON)")->required();
  cmd->add_option("--out", a.out_dir, "output directory");
  cmd->add_option("--seed", a.seed, "master seed");
  cmd->add_option("--runs", a.runs, "trials per (event, distance)");
  cmd->add_option("--distances", a.distances, "distance sweep in m");
  cmd->add_option("--medium", a.medium, "absorption CSV path or 'synthetic'");
  cmd->add_option("--ula-mode", a.ula_mode, "single or dual")->check(CLI::IsMember({"single", "dual"}));
  cmd->add_option("--threads", a.threads, "worker threads");
}

int cmd_simulate(const CommonArgs& a, bool dump_trials, std::ostream& out) {
  const auto loaded = load_config(a.config_path, a.overrides());
  const auto& cfg = loaded.experiment;
  std::vector<TrialResult> trials;
  const auto report = run_experiment(cfg, dump_trials ? &trials : nullptr);
  emit_report(report, a.out_dir);
  if (dump_trials) write_trials_jsonl(trials, report, fs::path(a.out_dir) / "trials.jsonl");
  for (const auto& s : report.per_distance) {
    fmt::print(out, "{} d_r={} m  tpr={:.3f}  tpr_excl={:.3f}  rmse_doa_excl={:.3f} deg\n", to_string(cfg.mode),
               s.distance_m, s.overall_tpr, s.overall_tpr_excluding, s.mean_rmse_doa_excluding);
  }
  return kExitOk;
}

int cmd_spectrum(const CommonArgs& a, std::size_t event_1based, double distance_m, bool dump_snapshots,
                 std::ostream& out) {
  const auto loaded = load_config(a.config_path, a.overrides());
  const auto& cfg = loaded.experiment;
  if (event_1based < 1 || event_1based > cfg.alphabet.size()) {
    throw ConfigError(fmt::format("--event must be in 1..{}", cfg.alphabet.size()));
  }
  if (!(distance_m > 0.0)) throw ConfigError("--distance must be > 0");
  const std::size_t event = event_1based - 1;
  const auto seed = trial_seed(cfg.master_seed, event, 0, 0);
  const auto detail = run_trial_detailed(cfg, event, distance_m, seed);

  fs::create_directories(a.out_dir);
  const fs::path dir(a.out_dir);
  write_spectrum_csv(detail.spectrum, dir / "spectrum.csv");
  write_psd_csv(detail.psd, dir / "psd.csv");
  if (dump_snapshots) write_snapshots_csv(detail.snapshots, dir / "snapshots.csv");

  const auto& r = detail.result;
  fmt::print(out, "theta_hat_deg={}\nf_cen_hz={}\nevent_est={}\nula={}\n", r.theta_hat_deg, r.f_cen_hz,
             r.event_est + 1, r.ula_index + 1);
  return kExitOk;
}

int cmd_medium_info(const CommonArgs& a, double step_ghz, std::ostream& out) {
  const auto loaded = load_config(a.config_path, a.overrides());
  const auto& cfg = loaded.experiment;
  const auto& medium = *cfg.medium;
  if (!(step_ghz > 0.0)) throw ConfigError("--step-ghz must be > 0");

  fs::create_directories(a.out_dir);
  const fs::path dir(a.out_dir);
  std::ofstream samples(dir / "medium.csv");
  std::ofstream bands(dir / "medium_bands.csv");
  if (!samples || !bands) throw Error(fmt::format("cannot write into '{}'", dir.string()));
  samples << "event,f_c_thz,frequency_hz,k_per_m\n";
  bands << "event,f_c_thz,band_lo_hz,band_hi_hz,k_max_per_m,k_min_per_m,k_mean_per_m\n";

  for (std::size_t e = 0; e < cfg.alphabet.size(); ++e) {
    const auto& sym = cfg.alphabet[e];
    const auto [lo, hi] = sym.half_power;
    if (!medium.contains(lo) || !medium.contains(hi)) {
      throw ConfigError(fmt::format("medium does not cover the half-power band of event {} ({}-{} THz)", e + 1,
                                    lo / kTera, hi / kTera));
    }
    auto grid = uniform_grid(lo, hi, step_ghz * 1e9);
    if (grid.back() < hi) grid.push_back(hi);
    double sum = 0.0;
    for (double f : grid) {
      const double k = medium.at(f);
      sum += k;
      fmt::print(samples, "{},{},{},{}\n", e + 1, sym.center_hz / kTera, f, k);
    }
    const auto [kmax, kmin] = medium.extrema(lo, hi);
    const double kmean = sum / static_cast<double>(grid.size());
    fmt::print(bands, "{},{},{},{},{},{},{}\n", e + 1, sym.center_hz / kTera, lo, hi, kmax, kmin, kmean);
    fmt::print(out, "event {} f_c={:.3f} THz band {:.3f}-{:.3f} THz k max {:.4g} min {:.4g} mean {:.4g} 1/m\n",
               e + 1, sym.center_hz / kTera, lo / kTera, hi / kTera, kmax, kmin, kmean);
  }
  return kExitOk;
}

int cmd_compare(const CommonArgs& a, const std::string& reference_path, double distance_m, std::ostream& out) {
  auto overrides = a.overrides();
  overrides.distances_m = std::vector<double>{distance_m};
  overrides.mode.reset();
  const auto loaded = load_config(a.config_path, overrides);
  const auto single_cfg = loaded.for_mode(UlaMode::single);
  const auto dual_cfg = loaded.for_mode(UlaMode::dual);
  single_cfg.validate();
  dual_cfg.validate();
  const auto reference = load_confusion_reference(reference_path, loaded.experiment.alphabet.size());

  const fs::path dir(a.out_dir);
  const auto single = run_experiment(single_cfg);
  const auto dual = run_experiment(dual_cfg);
  emit_report(single, dir / "single");
  emit_report(dual, dir / "dual");
  write_confusion_comparison(single, dual, 0, reference, dir);
  fmt::print(out, "d_r={} m  single tpr={:.3f}  dual tpr={:.3f} (excluding: {:.3f} / {:.3f})\n", distance_m,
             single.per_distance[0].overall_tpr, dual.per_distance[0].overall_tpr,
             single.per_distance[0].overall_tpr_excluding, dual.per_distance[0].overall_tpr_excluding);
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"THz nano-IoT event localization and classification simulator", "nanoloc"};
  app.require_subcommand(1);

  CommonArgs sim_args, spec_args, med_args, cmp_args;
  bool dump_trials = false;
  auto* sim = app.add_subcommand("simulate", "run the Monte-Carlo distance sweep and write metrics");
  add_common(sim, sim_args);
  sim->add_flag("--trials", dump_trials, "also write per-trial JSON lines");

  std::size_t event = 1;
  double distance = 0.005;
  bool dump_snapshots = false;
  auto* spec = app.add_subcommand("spectrum", "single trial: IMUSIC spectrum and PSD estimate");
  add_common(spec, spec_args);
  spec->add_option("--event", event, "event number (1-based)");
  spec->add_option("--distance", distance, "source distance in m");
  spec->add_flag("--snapshots", dump_snapshots, "also write raw snapshots");

  double step_ghz = 1.0;
  auto* med = app.add_subcommand("medium-info", "absorption over each symbol's half-power band");
  add_common(med, med_args);
  med->add_option("--step-ghz", step_ghz, "sampling step inside each band");

  std::string reference;
  double cmp_distance = 1.0;
  auto* cmp = app.add_subcommand("compare", "single vs dual confusion matrices against reference counts");
  add_common(cmp, cmp_args);
  cmp->add_option("--reference", reference, "reference confusion CSV")->required();
  cmp->add_option("--distance", cmp_distance, "distance in m");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (sim->parsed()) return cmd_simulate(sim_args, dump_trials, out);
    if (spec->parsed()) return cmd_spectrum(spec_args, event, distance, dump_snapshots, out);
    if (med->parsed()) return cmd_medium_info(med_args, step_ghz, out);
    if (cmp->parsed()) return cmd_compare(cmp_args, reference, cmp_distance, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const AlphabetError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IngestionError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}

}  // namespace nanoloc
