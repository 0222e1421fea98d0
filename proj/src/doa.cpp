#include "nanoloc/doa.hpp"

#include <algorithm>
#include <cmath>

#include "nanoloc/constants.hpp"
#include "nanoloc/errors.hpp"

namespace nanoloc {

CMatrix sample_covariance(const CMatrix& y) {
  if (y.cols() < 1) throw ContractError("sample covariance needs at least one snapshot");
  return (y * y.adjoint()) / static_cast<double>(y.cols());
}

std::vector<BinCovariance> sample_covariances(std::span<const Snapshot> snapshots) {
  std::vector<BinCovariance> out;
  out.reserve(snapshots.size());
  for (const auto& s : snapshots) out.push_back({s.bin_hz, sample_covariance(s.data)});
  return out;
}

CMatrix noise_subspace(const EigPair& eig, std::size_t num_sources) {
  const auto n = static_cast<std::size_t>(eig.vectors.cols());
  if (num_sources < 1 || num_sources >= n) {
    throw ConfigError("number of sources must satisfy 1 <= M < N");
  }
  return eig.vectors.rightCols(static_cast<Eigen::Index>(n - num_sources));
}

std::vector<double> angle_grid(double step_deg) {
  if (!(step_deg > 0.0) || step_deg >= 90.0) throw ConfigError("angle grid step must lie in (0, 90)");
  std::vector<double> grid;
  for (std::size_t i = 1;; ++i) {
    const double theta = -90.0 + static_cast<double>(i) * step_deg;
    if (theta >= 90.0 - 1e-9) break;
    grid.push_back(theta);
  }
  return grid;
}

namespace {

// For a ULA, a^H P a = r_0 + 2 Re sum_{k>=1} r_k z^k with r_k the k-th
// superdiagonal sum of P and z = exp(-j phase_step).
struct BinProjector {
  double bin_hz;
  double top_eigenvalue;
  std::vector<std::complex<double>> diagonal_sums;
};

BinProjector make_projector(const BinCovariance& cov, std::size_t num_sources) {
  const EigPair eig = hermitian_eig(cov.r);
  const CMatrix en = noise_subspace(eig, num_sources);
  const CMatrix p = en * en.adjoint();
  const Eigen::Index n = p.rows();
  BinProjector out{cov.bin_hz, eig.values(0), std::vector<std::complex<double>>(static_cast<std::size_t>(n))};
  for (Eigen::Index k = 0; k < n; ++k) {
    std::complex<double> sum = 0.0;
    for (Eigen::Index i = 0; i + k < n; ++i) sum += p(i, i + k);
    out.diagonal_sums[static_cast<std::size_t>(k)] = sum;
  }
  return out;
}

}  // namespace

ImusicSpectrum imusic_spectrum(std::span<const BinCovariance> covariances, const UlaConfig& ula,
                               std::span<const double> grid_deg, const ImusicOptions& options) {
  if (grid_deg.empty()) throw ConfigError("angle grid is empty");
  for (std::size_t i = 0; i < grid_deg.size(); ++i) {
    if (!(std::abs(grid_deg[i]) < 90.0)) throw ConfigError("angle grid must lie inside (-90, 90)");
    if (i > 0 && !(grid_deg[i] > grid_deg[i - 1])) throw ConfigError("angle grid must be increasing");
  }
  const auto n = ula.elements();
  std::vector<BinProjector> projectors;
  projectors.reserve(covariances.size());
  for (const auto& cov : covariances) {
    if (static_cast<std::size_t>(cov.r.rows()) != n || cov.r.cols() != cov.r.rows()) {
      throw ContractError("covariance size does not match the array");
    }
    projectors.push_back(make_projector(cov, options.num_sources));
  }

  double keep_above = -1.0;
  if (options.snr_threshold_db && !projectors.empty()) {
    double strongest = 0.0;
    for (const auto& p : projectors) strongest = std::max(strongest, p.top_eigenvalue);
    keep_above = strongest * std::pow(10.0, -*options.snr_threshold_db / 10.0);
  }

  std::vector<double> sin_theta(grid_deg.size());
  for (std::size_t i = 0; i < grid_deg.size(); ++i) sin_theta[i] = std::sin(grid_deg[i] * kPi / 180.0);

  ImusicSpectrum out{{grid_deg.begin(), grid_deg.end()}, std::vector<double>(grid_deg.size(), 0.0)};
  const double aha = static_cast<double>(n);
  for (const auto& proj : projectors) {
    if (proj.top_eigenvalue < keep_above) continue;
    const double phase_scale = kTwoPi * proj.bin_hz * ula.spacing_m() / kSpeedOfLight;
    const auto& r = proj.diagonal_sums;
    for (std::size_t i = 0; i < grid_deg.size(); ++i) {
      const std::complex<double> z = std::polar(1.0, -phase_scale * sin_theta[i]);
      std::complex<double> zk = 1.0;
      double cross = 0.0;
      for (std::size_t k = 1; k < n; ++k) {
        zk *= z;
        cross += (r[k] * zk).real();
      }
      const double denominator = std::max(r[0].real() + 2.0 * cross, kMusicDenominatorFloor);
      out.values[i] += aha / denominator;
    }
  }
  return out;
}

double estimate_doa(const ImusicSpectrum& spectrum, bool parabolic_refinement) {
  const auto& v = spectrum.values;
  if (v.empty() || v.size() != spectrum.grid_deg.size()) throw ContractError("invalid IMUSIC spectrum");
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  double theta = spectrum.grid_deg[best];
  if (parabolic_refinement && best > 0 && best + 1 < v.size()) {
    const double y0 = v[best - 1];
    const double y1 = v[best];
    const double y2 = v[best + 1];
    const double curvature = y0 - 2.0 * y1 + y2;
    if (curvature < 0.0) {
      const double offset = std::clamp(0.5 * (y0 - y2) / curvature, -0.5, 0.5);
      const double step = 0.5 * (spectrum.grid_deg[best + 1] - spectrum.grid_deg[best - 1]);
      theta += offset * step;
    }
  }
  return theta;
}

}  // namespace nanoloc
