#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "nanoloc/doa.hpp"
#include "nanoloc/errors.hpp"
#include "nanoloc/linalg.hpp"

using namespace nanoloc;

namespace {

constexpr double THz = 1e12;
constexpr double kWindow = 9e-12;

CMatrix random_hermitian(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  CMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = {g(rng), g(rng)};
  return 0.5 * (a + a.adjoint());
}

CVector random_vector(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  CVector v(n);
  for (int i = 0; i < n; ++i) v(i) = {g(rng), g(rng)};
  return v;
}

// Exact model covariance of one source plus white noise on every bin.
std::vector<BinCovariance> model_covariances(const UlaConfig& ula, double theta, double noise) {
  std::vector<BinCovariance> out;
  for (double f : ula.bins_hz()) {
    const CVector a = steering_vector(f, theta, ula.elements(), ula.spacing_m());
    CMatrix r = a * a.adjoint();
    r += noise * CMatrix::Identity(r.rows(), r.cols());
    out.push_back({f, r});
  }
  return out;
}

// Direct evaluation of sum_b N / (a^H E_n E_n^H a).
std::vector<double> brute_force_imusic(std::span<const BinCovariance> covs, const UlaConfig& ula,
                                       std::span<const double> grid) {
  std::vector<double> out(grid.size(), 0.0);
  for (const auto& c : covs) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(c.r);
    const CMatrix en = es.eigenvectors().leftCols(c.r.rows() - 1);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const CVector a = steering_vector(c.bin_hz, grid[g], ula.elements(), ula.spacing_m());
      const double den = (en.adjoint() * a).squaredNorm();
      out[g] += static_cast<double>(ula.elements()) / std::max(den, kMusicDenominatorFloor);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("sample covariance") {
  std::mt19937_64 rng(1);
  SUBCASE("single column") {
    const CVector y = random_vector(rng, 8);
    const CMatrix r = sample_covariance(y);
    CHECK((r - y * y.adjoint()).norm() < 1e-14 * r.norm());
    CHECK(r.trace().real() == doctest::Approx(y.squaredNorm()));
  }
  SUBCASE("identity block") {
    const CMatrix r = sample_covariance(CMatrix::Identity(8, 8));
    CHECK((r - CMatrix::Identity(8, 8) / 8.0).norm() < 1e-15);
  }
  SUBCASE("random block is Hermitian PSD with rank at most K") {
    std::normal_distribution<double> g;
    CMatrix y(8, 3);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 3; ++j) y(i, j) = {g(rng), g(rng)};
    const CMatrix r = sample_covariance(y);
    CHECK((r - r.adjoint()).norm() == 0.0);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(r);
    for (int i = 0; i < 8; ++i) CHECK(es.eigenvalues()(i) >= -1e-12 * r.norm());
    for (int i = 0; i < 5; ++i) CHECK(std::abs(es.eigenvalues()(i)) < 1e-12 * r.norm());
  }
}

TEST_CASE("Hermitian eigendecomposition on small cases") {
  SUBCASE("diagonal") {
    CMatrix r = CMatrix::Zero(2, 2);
    r(0, 0) = 1.0;
    r(1, 1) = 3.0;
    const auto e = hermitian_eig(r);
    CHECK(e.values(0) == doctest::Approx(3.0));
    CHECK(e.values(1) == doctest::Approx(1.0));
    CHECK(std::abs(e.vectors(1, 0) - 1.0) < 1e-14);
    CHECK(std::abs(e.vectors(0, 1) - 1.0) < 1e-14);
  }
  SUBCASE("rank one") {
    std::mt19937_64 rng(3);
    CVector a = random_vector(rng, 8);
    a.normalize();
    const auto e = hermitian_eig(a * a.adjoint());
    CHECK(e.values(0) == doctest::Approx(1.0).epsilon(1e-12));
    for (int i = 1; i < 8; ++i) CHECK(std::abs(e.values(i)) < 1e-12);
    CHECK(std::abs(e.vectors.col(0).dot(a)) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("zero matrix") {
    const auto e = hermitian_eig(CMatrix::Zero(4, 4));
    CHECK(e.values.isZero());
    CHECK(e.vectors.isIdentity());
  }
  SUBCASE("non-Hermitian input is a contract violation") {
    CMatrix r = CMatrix::Identity(3, 3);
    r(0, 1) = 1.0;
    CHECK_THROWS_AS(hermitian_eig(r), ContractError);
  }
}

TEST_CASE("Hermitian eigendecomposition agrees with a reference solver") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 9;
    const CMatrix r = random_hermitian(rng, n);
    const auto e = hermitian_eig(r);
    Eigen::SelfAdjointEigenSolver<CMatrix> ref(r);
    for (int i = 0; i < n; ++i) {
      CHECK(e.values(i) == doctest::Approx(ref.eigenvalues()(n - 1 - i)).epsilon(1e-10).scale(r.norm()));
      if (i > 0) CHECK(e.values(i - 1) >= e.values(i));
    }
    const CMatrix recon = e.vectors * e.values.cast<std::complex<double>>().asDiagonal() * e.vectors.adjoint();
    CHECK((recon - r).norm() <= 1e-10 * r.norm());
    CHECK((e.vectors.adjoint() * e.vectors - CMatrix::Identity(n, n)).norm() <= 1e-10);
    for (int i = 0; i < n; ++i) CHECK((r * e.vectors.col(i) - e.values(i) * e.vectors.col(i)).norm() <= 1e-8 * r.norm());
  }
}

TEST_CASE("eigendecomposition is deterministic and phase-normalized") {
  std::mt19937_64 rng(8);
  const CMatrix r = random_hermitian(rng, 8);
  const auto a = hermitian_eig(r);
  const auto b = hermitian_eig(r);
  CHECK(a.values == b.values);
  CHECK(a.vectors == b.vectors);
  for (int c = 0; c < 8; ++c) {
    int lead = 0;
    while (std::abs(a.vectors(lead, c)) <= 1e-6) ++lead;
    CHECK(a.vectors(lead, c).imag() == 0.0);
    CHECK(a.vectors(lead, c).real() > 0.0);
  }
  // fully degenerate spectrum: columns ascend lexicographically, so the
  // standard basis comes back reversed
  const auto id = hermitian_eig(CMatrix::Identity(4, 4) * 2.0);
  CHECK(id.vectors.isApprox(CMatrix::Identity(4, 4).rowwise().reverse()));
}

TEST_CASE("noise subspace") {
  const UlaConfig ula(8, 15e-6, 2 * THz, 10 * THz, kWindow);
  const CVector a = steering_vector(5 * THz, -18.525, 8, 15e-6);
  const auto e = hermitian_eig(a * a.adjoint());
  const CMatrix en = noise_subspace(e, 1);
  CHECK(en.rows() == 8);
  CHECK(en.cols() == 7);
  CHECK((en.adjoint() * a).norm() < 1e-8);
  CHECK((en.adjoint() * en - CMatrix::Identity(7, 7)).norm() < 1e-10);
  CHECK(noise_subspace(e, 3).cols() == 5);
  CHECK_THROWS_AS(noise_subspace(e, 0), ConfigError);
  CHECK_THROWS_AS(noise_subspace(e, 8), ConfigError);
}

TEST_CASE("signal and noise blocks are orthogonal for random PSD matrices") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 50; ++t) {
    const CVector s = random_vector(rng, 8);
    const CMatrix r = s * s.adjoint() + 0.1 * CMatrix::Identity(8, 8);
    const auto e = hermitian_eig(r);
    CHECK((e.vectors.leftCols(1).adjoint() * noise_subspace(e, 1)).norm() < 1e-10);
  }
}

TEST_CASE("angle grid") {
  const auto g = angle_grid(0.05);
  CHECK(g.size() == 3599);
  CHECK(g.front() == doctest::Approx(-89.95));
  CHECK(g.back() == doctest::Approx(89.95));
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
  CHECK(angle_grid(1.0).size() == 179);
  CHECK_THROWS_AS(angle_grid(0.0), ConfigError);
}

TEST_CASE("IMUSIC matches a brute-force projector evaluation") {
  const UlaConfig ula(8, 15e-6, 2 * THz, 10 * THz, kWindow);
  const auto grid = angle_grid(0.5);
  std::mt19937_64 rng(21);
  std::vector<BinCovariance> covs;
  for (double f : ula.bins_hz()) {
    const CVector a = steering_vector(f, 23.0, 8, 15e-6);
    const CVector v = random_vector(rng, 8);
    const CMatrix y = a * 3.0 + 0.3 * v;
    covs.push_back({f, y * y.adjoint() + 0.01 * CMatrix::Identity(8, 8)});
  }
  const auto fast = imusic_spectrum(covs, ula, grid);
  const auto slow = brute_force_imusic(covs, ula, grid);
  REQUIRE(fast.values.size() == grid.size());
  CHECK(fast.grid_deg == grid);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(fast.values[i] == doctest::Approx(slow[i]).epsilon(1e-6));
}

TEST_CASE("noiseless IMUSIC peaks at the source") {
  const UlaConfig ula1(8, 75e-6, 0.2 * THz, 2 * THz, kWindow);
  const UlaConfig ula2(8, 15e-6, 2 * THz, 10 * THz, kWindow);
  const auto grid = angle_grid(0.05);
  for (const auto* ula : {&ula1, &ula2}) {
    for (double theta : {-60.0, -18.5, 0.0, 33.35, 70.0}) {
      const auto spec = imusic_spectrum(model_covariances(*ula, theta, 0.0), *ula, grid);
      CHECK(estimate_doa(spec) == doctest::Approx(theta).epsilon(1e-9));
      for (double v : spec.values) CHECK(v > 0.0);
    }
  }
}

TEST_CASE("spectrum argmax is invariant to covariance scaling") {
  const UlaConfig ula(8, 75e-6, 0.2 * THz, 2 * THz, kWindow);
  const auto grid = angle_grid(0.1);
  auto covs = model_covariances(ula, -18.525, 0.2);
  const double base = estimate_doa(imusic_spectrum(covs, ula, grid));
  for (double s : {1e-30, 1e-6, 1e9}) {
    auto scaled = covs;
    for (auto& c : scaled) c.r *= s;
    CHECK(estimate_doa(imusic_spectrum(scaled, ula, grid)) == base);
  }
}

TEST_CASE("eigenvector phases do not change the spectrum") {
  std::mt19937_64 rng(4);
  const CMatrix r = random_hermitian(rng, 8);
  const auto e = hermitian_eig(r);
  CMatrix rotated = noise_subspace(e, 1);
  for (Eigen::Index c = 0; c < rotated.cols(); ++c) rotated.col(c) *= std::polar(1.0, 0.7 * static_cast<double>(c + 1));
  const CVector a = steering_vector(5 * THz, 12.0, 8, 15e-6);
  CHECK((rotated.adjoint() * a).squaredNorm() == doctest::Approx((noise_subspace(e, 1).adjoint() * a).squaredNorm()));
}

TEST_CASE("single-snapshot covariance keeps a 7-dimensional noise subspace") {
  const UlaConfig ula(8, 15e-6, 2 * THz, 10 * THz, kWindow);
  std::mt19937_64 rng(31);
  std::vector<BinCovariance> covs;
  for (double f : ula.bins_hz()) {
    const CVector y = steering_vector(f, -18.525, 8, 15e-6) + 0.05 * random_vector(rng, 8);
    covs.push_back({f, sample_covariance(y)});
    CHECK(noise_subspace(hermitian_eig(covs.back().r), 1).cols() == 7);
  }
  const auto spec = imusic_spectrum(covs, ula, angle_grid(0.05));
  CHECK(std::abs(estimate_doa(spec) + 18.525) < 1.0);
}

TEST_CASE("SNR threshold drops weak bins") {
  const UlaConfig ula(8, 15e-6, 2 * THz, 10 * THz, kWindow);
  const auto grid = angle_grid(0.5);
  auto covs = model_covariances(ula, 10.0, 1e-3);
  // Bins past the first ten carry a different source 60 dB down.
  for (std::size_t b = 10; b < covs.size(); ++b) {
    const CVector a = steering_vector(covs[b].bin_hz, -40.0, 8, 15e-6);
    covs[b].r = 1e-6 * (a * a.adjoint() + 1e-3 * CMatrix::Identity(8, 8));
  }
  ImusicOptions opt;
  opt.snr_threshold_db = 30.0;
  const auto kept = imusic_spectrum(covs, ula, grid, opt);
  const std::span<const BinCovariance> strong(covs.data(), 10);
  const auto only_strong = imusic_spectrum(strong, ula, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(kept.values[i] == doctest::Approx(only_strong.values[i]));
  CHECK(estimate_doa(kept) == doctest::Approx(10.0));
}

TEST_CASE("peak picking") {
  ImusicSpectrum monotone{{-2, -1, 0, 1, 2}, {1, 2, 3, 4, 5}};
  CHECK(estimate_doa(monotone) == 2.0);
  ImusicSpectrum tie{{-10, 0, 10}, {5, 1, 5}};
  CHECK(estimate_doa(tie) == -10.0);

  ImusicSpectrum skewed{{-1, 0, 1}, {1.0, 3.0, 2.0}};
  const double refined = estimate_doa(skewed, true);
  // vertex of the parabola through (-1,1), (0,3), (1,2)
  CHECK(refined == doctest::Approx(0.5 * (2.0 - 1.0) / (2.0 * 3.0 - 1.0 - 2.0)));
  CHECK(std::abs(refined) <= 0.5);
  CHECK(estimate_doa(skewed, false) == 0.0);
}
