#include "nanoloc/report.hpp"

#include <fstream>
#include <sstream>
#include <string>

#include <fmt/format.h>
#include "json.hpp"

#include "nanoloc/errors.hpp"

namespace nanoloc {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot open '{}' for writing", path.string()));
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(fmt::format("write failed for '{}'", path.string()));
}

std::string thz(double hz) { return fmt::format("{}", hz / kTera); }

}  // namespace

void write_metrics_csv(const MetricsReport& report, std::ostream& out) {
  const auto mode = to_string(report.mode);
  out << "ula_mode,f_c_thz,d_r_m,metric,value\n";
  for (std::size_t d = 0; d < report.distances_m.size(); ++d) {
    const double dist = report.distances_m[d];
    for (std::size_t e = 0; e < report.centers_hz.size(); ++e) {
      const auto& p = report.point(e, d);
      const auto f = thz(p.center_hz);
      out << fmt::format("{},{},{},rmse_doa_deg,{}\n", mode, f, dist, p.rmse_doa_deg);
      out << fmt::format("{},{},{},rmse_fc_hz,{}\n", mode, f, dist, p.rmse_fc_hz);
      out << fmt::format("{},{},{},tpr,{}\n", mode, f, dist, p.tpr);
    }
    const auto& s = report.per_distance[d];
    out << fmt::format("{},all,{},tpr_overall,{}\n", mode, dist, s.overall_tpr);
    out << fmt::format("{},all,{},tpr_overall_excluding,{}\n", mode, dist, s.overall_tpr_excluding);
    out << fmt::format("{},all,{},rmse_doa_mean_excluding,{}\n", mode, dist, s.mean_rmse_doa_excluding);
  }
}

void write_confusion_csv(const MetricsReport& report, std::ostream& out) {
  const auto mode = to_string(report.mode);
  const std::size_t m = report.centers_hz.size();
  out << "ula_mode,d_r_m,estimated_f_c_thz";
  for (double c : report.centers_hz) out << ",true_" << thz(c);
  out << '\n';
  for (std::size_t d = 0; d < report.per_distance.size(); ++d) {
    const auto& s = report.per_distance[d];
    for (std::size_t est = 0; est < m; ++est) {
      out << fmt::format("{},{},{}", mode, s.distance_m, thz(report.centers_hz[est]));
      for (std::size_t tru = 0; tru < m; ++tru) out << ',' << s.confusion[est][tru];
      out << '\n';
    }
    out << fmt::format("{},{},TPR", mode, s.distance_m);
    for (std::size_t tru = 0; tru < m; ++tru) out << ',' << fmt::format("{}", report.point(tru, d).tpr);
    out << '\n';
  }
}

void emit_report(const MetricsReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    const auto path = dir / "metrics.csv";
    auto out = open_output(path);
    write_metrics_csv(report, out);
    finish(out, path);
  }
  {
    const auto path = dir / "confusion.csv";
    auto out = open_output(path);
    write_confusion_csv(report, out);
    finish(out, path);
  }
}

void write_trials_jsonl(std::span<const TrialResult> trials, const MetricsReport& report,
                        const std::filesystem::path& path) {
  auto out = open_output(path);
  for (const auto& t : trials) {
    nlohmann::ordered_json j;
    j["ula_mode"] = to_string(report.mode);
    j["event_true"] = t.event_true + 1;
    j["event_est"] = t.event_est + 1;
    j["f_c_true_thz"] = report.centers_hz.at(t.event_true) / kTera;
    j["theta_hat_deg"] = t.theta_hat_deg;
    j["f_cen_hz"] = t.f_cen_hz;
    j["d_r_m"] = t.distance_m;
    j["ula"] = t.ula_index + 1;
    j["seed"] = t.seed;
    out << j.dump() << '\n';
  }
  finish(out, path);
}

void write_spectrum_csv(const ImusicSpectrum& spectrum, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "theta_deg,p_imusic\n";
  for (std::size_t i = 0; i < spectrum.values.size(); ++i)
    out << fmt::format("{},{}\n", spectrum.grid_deg[i], spectrum.values[i]);
  finish(out, path);
}

void write_psd_csv(const EstimatedPsd& psd, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "bin_hz,s_hat\n";
  for (std::size_t i = 0; i < psd.values.size(); ++i) out << fmt::format("{},{}\n", psd.bins_hz[i], psd.values[i]);
  finish(out, path);
}

void write_snapshots_csv(std::span<const Snapshot> snapshots, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "bin_hz,element,snapshot,re,im\n";
  for (const auto& s : snapshots)
    for (Eigen::Index k = 0; k < s.data.cols(); ++k)
      for (Eigen::Index i = 0; i < s.data.rows(); ++i)
        out << fmt::format("{},{},{},{},{}\n", s.bin_hz, i, k, s.data(i, k).real(), s.data(i, k).imag());
  finish(out, path);
}

ConfusionReference load_confusion_reference(const std::filesystem::path& path, std::size_t events) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open reference confusion file '{}'", path.string()));
  ConfusionReference ref{std::vector<std::vector<double>>(events, std::vector<double>(events, -1.0)),
                         std::vector<std::vector<double>>(events, std::vector<double>(events, -1.0))};
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || row == 1) continue;
    std::stringstream ss(line);
    std::string mode, cell;
    std::getline(ss, mode, ',');
    std::getline(ss, cell, ',');
    std::size_t est = 0;
    try {
      est = std::stoul(cell);
    } catch (const std::exception&) {
      throw IngestionError(row, "unparsable estimated-event index");
    }
    if (est < 1 || est > events) throw IngestionError(row, "estimated-event index out of range");
    auto& target = mode == "single" ? ref.single : mode == "dual" ? ref.dual
                                                                 : throw IngestionError(row, "unknown ula_mode");
    for (std::size_t t = 0; t < events; ++t) {
      if (!std::getline(ss, cell, ',')) throw IngestionError(row, "too few columns");
      try {
        target[est - 1][t] = std::stod(cell);
      } catch (const std::exception&) {
        throw IngestionError(row, "unparsable count");
      }
    }
  }
  for (const auto* m : {&ref.single, &ref.dual})
    for (const auto& r : *m)
      for (double v : r)
        if (v < 0.0) throw ConfigError(fmt::format("reference confusion file '{}' is incomplete", path.string()));
  return ref;
}

void write_confusion_comparison(const MetricsReport& single, const MetricsReport& dual,
                                std::size_t distance_index, const ConfusionReference& reference,
                                const std::filesystem::path& dir) {
  const std::size_t m = single.centers_hz.size();
  if (dual.centers_hz.size() != m) throw ContractError("single and dual reports use different alphabets");
  const auto& s = single.per_distance.at(distance_index);
  const auto& d = dual.per_distance.at(distance_index);
  std::filesystem::create_directories(dir);

  {
    const auto path = dir / "confusion_table.csv";
    auto out = open_output(path);
    out << "estimated";
    for (const char* mode : {"single", "dual"})
      for (std::size_t t = 0; t < m; ++t) out << ',' << mode << "_true_f_c" << t + 1;
    out << '\n';
    for (std::size_t est = 0; est < m; ++est) {
      out << "f_c" << est + 1;
      for (std::size_t t = 0; t < m; ++t) out << ',' << s.confusion[est][t];
      for (std::size_t t = 0; t < m; ++t) out << ',' << d.confusion[est][t];
      out << '\n';
    }
    out << "TPR";
    for (std::size_t t = 0; t < m; ++t) out << ',' << fmt::format("{}", single.point(t, distance_index).tpr);
    for (std::size_t t = 0; t < m; ++t) out << ',' << fmt::format("{}", dual.point(t, distance_index).tpr);
    out << '\n';
    out << "overall_tpr_excluding";
    for (std::size_t t = 0; t < m; ++t) out << ',' << (t == 0 ? fmt::format("{}", s.overall_tpr_excluding) : "");
    for (std::size_t t = 0; t < m; ++t) out << ',' << (t == 0 ? fmt::format("{}", d.overall_tpr_excluding) : "");
    out << '\n';
    finish(out, path);
  }
  {
    const auto path = dir / "confusion_deviation.csv";
    auto out = open_output(path);
    out << "ula_mode,estimated,true,simulated,reference,deviation\n";
    auto emit = [&](const char* mode, const DistanceSummary& sim, const std::vector<std::vector<double>>& ref) {
      for (std::size_t est = 0; est < m; ++est)
        for (std::size_t t = 0; t < m; ++t) {
          const double simulated = static_cast<double>(sim.confusion[est][t]);
          out << fmt::format("{},{},{},{},{},{}\n", mode, est + 1, t + 1, simulated, ref[est][t],
                             simulated - ref[est][t]);
        }
    };
    emit("single", s, reference.single);
    emit("dual", d, reference.dual);
    finish(out, path);
  }
}

}  // namespace nanoloc
