#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "nanoloc/array.hpp"
#include "nanoloc/linalg.hpp"

namespace nanoloc {

/// Sample covariance of one bin.
struct BinCovariance {
  double bin_hz;
  CMatrix r;
};

/// (1/K) Y Y^H
CMatrix sample_covariance(const CMatrix& y);

std::vector<BinCovariance> sample_covariances(std::span<const Snapshot> snapshots);

/// Eigenvectors of the N - num_sources smallest eigenvalues.
CMatrix noise_subspace(const EigPair& eig, std::size_t num_sources);

/// Open interval (-90, 90) sampled every `step_deg`, anchored at -90.
std::vector<double> angle_grid(double step_deg);

struct ImusicSpectrum {
  std::vector<double> grid_deg;
  std::vector<double> values;
};

struct ImusicOptions {
  std::size_t num_sources = 1;
  /// Drop bins whose largest eigenvalue sits more than this many dB below the
  /// strongest bin's. Disabled when empty.
  std::optional<double> snr_threshold_db;
};

inline constexpr double kMusicDenominatorFloor = 1e-12;

/// Incoherent MUSIC pseudo-spectrum: sum over bins of
/// a^H a / (a^H E_n E_n^H a), denominator floored at 1e-12.
ImusicSpectrum imusic_spectrum(std::span<const BinCovariance> covariances, const UlaConfig& ula,
                               std::span<const double> grid_deg, const ImusicOptions& options = {});

/// Grid angle of the spectrum's maximum (first one on ties). With
/// `parabolic_refinement`, a 3-point parabola through the peak and its
/// neighbours shifts the estimate by at most half a grid step.
double estimate_doa(const ImusicSpectrum& spectrum, bool parabolic_refinement = false);

}  // namespace nanoloc
