#pragma once

#include <array>
#include <filesystem>
#include <ostream>
#include <span>
#include <vector>

#include "nanoloc/harness.hpp"

namespace nanoloc {

// Long format: ula_mode,f_c_thz,d_r_m,metric,value
void write_metrics_csv(const MetricsReport& report, std::ostream& out);

// One block per distance: rows are estimated events plus a TPR row, columns
// are true events.
void write_confusion_csv(const MetricsReport& report, std::ostream& out);

/// Writes metrics.csv and confusion.csv into `dir` (created if missing).
void emit_report(const MetricsReport& report, const std::filesystem::path& dir);

void write_trials_jsonl(std::span<const TrialResult> trials, const MetricsReport& report,
                        const std::filesystem::path& path);
void write_spectrum_csv(const ImusicSpectrum& spectrum, const std::filesystem::path& path);
void write_psd_csv(const EstimatedPsd& psd, const std::filesystem::path& path);
void write_snapshots_csv(std::span<const Snapshot> snapshots, const std::filesystem::path& path);

/// Reference confusion counts per mode, indexed [estimated][true].
struct ConfusionReference {
  std::vector<std::vector<double>> single;
  std::vector<std::vector<double>> dual;
};

/// CSV with header `ula_mode,estimated,true_1,...,true_M` and M rows per mode
/// (`estimated` is the 1-based event number).
ConfusionReference load_confusion_reference(const std::filesystem::path& path, std::size_t events);

/// Writes confusion_table.csv (single and dual side by side with TPR and
/// overall rows) and confusion_deviation.csv (per-cell simulated minus
/// reference) for distance `distance_index` of both reports.
void write_confusion_comparison(const MetricsReport& single, const MetricsReport& dual,
                                std::size_t distance_index, const ConfusionReference& reference,
                                const std::filesystem::path& dir);

}  // namespace nanoloc
