#include <cmath>
#include <complex>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "nanoloc/array.hpp"
#include "nanoloc/errors.hpp"

using namespace nanoloc;

namespace {

constexpr double THz = 1e12;
constexpr double c0 = 2.99792458e8;
constexpr double kWindow = 9e-12;

PulseSpec pulse_at(double fc) {
  const double sigma = sigma_for_center(6, fc);
  const Band band{0.1 * THz, 10 * THz};
  return {6, sigma, normalize_energy(6, sigma, 1e-18, band, 1.0 / kWindow), 1e-18};
}

UlaConfig ula2() { return UlaConfig(8, 15e-6, 2 * THz, 10 * THz, kWindow); }

}  // namespace

TEST_CASE("bin count follows the bandwidth") {
  CHECK(frequency_bins(2 * THz, 10 * THz, kWindow).count() == 73);
  CHECK(frequency_bins(0.2 * THz, 2 * THz, kWindow).count() == 17);
  CHECK(frequency_bins(0.1 * THz, 10 * THz, kWindow).count() == 90);
  CHECK(frequency_bins(1 * THz, 2 * THz, 1.0 / (1 * THz)).count() == 2);

  const auto bins = frequency_bins(2 * THz, 10 * THz, kWindow);
  CHECK(bins.width_hz == doctest::Approx(1.0 / kWindow));
  for (std::size_t b = 0; b < bins.count(); ++b) {
    CHECK(bins.freqs_hz[b] == doctest::Approx(2 * THz + b / kWindow).epsilon(1e-14));
    CHECK(bins.freqs_hz[b] <= 10 * THz);
  }
}

TEST_CASE("bin override forces the tabulated counts") {
  CHECK(frequency_bins(0.1 * THz, 10 * THz, kWindow, 91).count() == 91);
  CHECK(frequency_bins(0.2 * THz, 2 * THz, kWindow, 19).count() == 19);
  UlaConfig u(8, 75e-6, 0.2 * THz, 2 * THz, kWindow, 19);
  CHECK(u.bin_count() == 19);
  CHECK(u.bins_override() == std::optional<std::size_t>(19));
}

TEST_CASE("ULA construction rejects aliasing and degenerate geometry") {
  CHECK_NOTHROW(UlaConfig(8, 15e-6, 0.1 * THz, 10 * THz, kWindow));
  CHECK_NOTHROW(UlaConfig(8, 75e-6, 0.2 * THz, 2 * THz, kWindow));
  CHECK_THROWS_AS(UlaConfig(8, 16e-6, 0.1 * THz, 10 * THz, kWindow), ConfigError);
  CHECK_THROWS_AS(UlaConfig(8, 75e-6, 0.2 * THz, 10 * THz, kWindow), ConfigError);
  CHECK_THROWS_AS(UlaConfig(1, 15e-6, 0.1 * THz, 10 * THz, kWindow), ConfigError);
  CHECK_THROWS_AS(UlaConfig(8, 15e-6, 10 * THz, 2 * THz, kWindow), ConfigError);
  CHECK_THROWS_AS(UlaConfig(8, 15e-6, 2 * THz, 10 * THz, 0.0), ConfigError);
}

TEST_CASE("steering vector") {
  SUBCASE("broadside is all ones") {
    auto a = steering_vector(5 * THz, 0.0, 8, 15e-6);
    for (Eigen::Index i = 0; i < a.size(); ++i) CHECK(std::abs(a(i) - 1.0) < 1e-15);
  }
  SUBCASE("unit modulus, first element exactly one") {
    for (double th = -89.0; th < 90.0; th += 7.3) {
      auto a = steering_vector(7.3 * THz, th, 8, 15e-6);
      CHECK(a(0) == std::complex<double>(1.0, 0.0));
      for (Eigen::Index i = 0; i < a.size(); ++i) CHECK(std::abs(a(i)) == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
  SUBCASE("half-wavelength spacing near endfire approaches a pi step") {
    const double ds = 15e-6;
    auto a = steering_vector(c0 / (2.0 * ds), 89.999, 2, ds);
    CHECK(std::abs(std::abs(std::arg(a(1))) - M_PI) < 1e-6);
  }
  SUBCASE("phase step for the reference geometry") {
    // 2 pi f d_s |sin(theta)| / c0 with f = 10 THz, d_s = 15 um
    const double theta = -18.525;
    const double cycles = 10 * THz * 15e-6 * std::sin(-theta * M_PI / 180.0) / c0;
    CHECK(cycles == doctest::Approx(0.158969).epsilon(1e-5));
    auto a = steering_vector(10 * THz, theta, 8, 15e-6);
    for (Eigen::Index i = 1; i < 8; ++i) {
      const auto ratio = a(i) / a(i - 1);
      CHECK(std::arg(ratio) == doctest::Approx(2.0 * M_PI * cycles).epsilon(1e-9));
    }
  }
  SUBCASE("endfire is rejected") {
    CHECK_THROWS_AS(steering_vector(THz, 90.0, 8, 15e-6), RangeError);
    CHECK_THROWS_AS(steering_vector(THz, -90.0, 8, 15e-6), RangeError);
  }
}

TEST_CASE("noiseless snapshots are exactly the rank-1 model") {
  const auto ula = ula2();
  const auto p = pulse_at(4.7 * THz);
  const auto medium = transparent_medium();
  const SourceTruth truth{-18.525, 0.1};
  const auto snaps = simulate_snapshots(ula, p, medium, truth, 3, 42);
  REQUIRE(snaps.size() == ula.bin_count());
  const ChannelParams params{0.1, 4.7 * THz};
  for (const auto& s : snaps) {
    const auto coeff = ula.bin_width_hz() * channel_response(params, medium, s.bin_hz) * pulse_spectrum(p, s.bin_hz);
    const CVector a = steering_vector(s.bin_hz, truth.theta_deg, 8, 15e-6);
    for (Eigen::Index k = 0; k < 3; ++k) CHECK((s.data.col(k) - coeff * a).norm() <= 1e-12 * std::abs(coeff) * 3);

    const CMatrix r = s.data.col(0) * s.data.col(0).adjoint();
    CHECK((r - r.adjoint()).norm() <= 1e-14 * r.norm());
    CHECK(r.trace().real() == doctest::Approx(8.0 * std::norm(coeff)).epsilon(1e-12));
    Eigen::SelfAdjointEigenSolver<CMatrix> es(r);
    const auto ev = es.eigenvalues();
    CHECK(ev(7) > 0.0);
    for (int i = 0; i < 7; ++i) CHECK(std::abs(ev(i)) <= 1e-10 * ev(7));
  }
}

TEST_CASE("same seed gives bit-identical snapshots, different seeds do not") {
  const auto ula = ula2();
  const auto p = pulse_at(2.75 * THz);
  const auto medium = default_medium();
  const SourceTruth truth{-18.525, 0.5};
  const auto a = simulate_snapshots(ula, p, medium, truth, 2, 123);
  const auto b = simulate_snapshots(ula, p, medium, truth, 2, 123);
  const auto c = simulate_snapshots(ula, p, medium, truth, 2, 124);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].bin_hz == b[i].bin_hz);
    CHECK(a[i].data == b[i].data);
    any_diff = any_diff || a[i].data != c[i].data;
  }
  CHECK(any_diff);
}

TEST_CASE("noise moments match the per-bin variance") {
  // Subtract the deterministic signal and compare E|v|^2 and its split into
  // real and imaginary parts with sigma^2 over 10^4 snapshots.
  const auto ula = ula2();
  const auto p = pulse_at(2.75 * THz);
  const auto medium = default_medium();
  const SourceTruth truth{-18.525, 1.0};
  const std::size_t k = 10000;
  const auto snaps = simulate_snapshots(ula, p, medium, truth, k, 99);
  const ChannelParams params{1.0, 2.75 * THz};
  int checked = 0;
  for (std::size_t b = 0; b < snaps.size(); b += 9) {
    const double fb = snaps[b].bin_hz;
    const double var = noise_variance_per_bin(medium, kDefaultTemperature, p, fb, 1.0, ula.bin_width_hz(), kWindow);
    REQUIRE(var > 0.0);
    const auto coeff = ula.bin_width_hz() * channel_response(params, medium, fb) * pulse_spectrum(p, fb);
    const CVector sig = coeff * steering_vector(fb, truth.theta_deg, 8, 15e-6);
    const CMatrix v = snaps[b].data.colwise() - sig;
    const double power = v.squaredNorm() / static_cast<double>(k * 8);
    const double re_power = v.real().squaredNorm() / static_cast<double>(k * 8);
    const std::complex<double> mean = v.sum() / static_cast<double>(k * 8);
    CHECK(power == doctest::Approx(var).epsilon(0.03));
    CHECK(re_power == doctest::Approx(0.5 * var).epsilon(0.03));
    CHECK(std::abs(mean) < 0.05 * std::sqrt(var));
    ++checked;
  }
  CHECK(checked >= 8);
}

TEST_CASE("per-bin noise variance") {
  const auto p = pulse_at(4.7 * THz);
  const double df = 1.0 / kWindow;

  SUBCASE("transparent medium") {
    CHECK(noise_variance_per_bin(transparent_medium(), 296, p, 4 * THz, 0.5, df, kWindow) == 0.0);
  }
  SUBCASE("linear in bin width") {
    const auto m = default_medium();
    const double one = noise_variance_per_bin(m, 296, p, 4 * THz, 0.5, df, kWindow);
    const double two = noise_variance_per_bin(m, 296, p, 4 * THz, 0.5, 2 * df, kWindow);
    CHECK(two == doctest::Approx(2.0 * one).epsilon(1e-14));
  }
  SUBCASE("rectangle rule agrees with trapezoid integration over the bin") {
    const std::vector<LorentzPeak> peaks{{4.5 * THz, 3.0, 600e9}};
    const auto m = synth_absorption(peaks, 0.01, uniform_grid(3 * THz, 6 * THz, 1e9));
    const ChannelParams params{0.5, 4.7 * THz};
    for (double fb : {4.2 * THz, 4.7 * THz, 5.1 * THz}) {
      const int steps = 1000;
      const double h = df / steps;
      double integral = 0.0;
      for (int i = 0; i <= steps; ++i) {
        const double f = fb - 0.5 * df + i * h;
        const double w = (i == 0 || i == steps) ? 0.5 : 1.0;
        integral += w * noise_psd(params, m, pulse_energy_density(p, f) / kWindow, f);
      }
      integral *= h;
      CHECK(noise_variance_per_bin(m, 296, p, fb, 0.5, df, kWindow) == doctest::Approx(integral).epsilon(0.01));
    }
  }
}

TEST_CASE("snapshot preconditions") {
  const auto medium = default_medium();
  SUBCASE("pulse longer than the window") {
    const double sigma = sigma_for_center(6, 0.3 * THz);  // 10 sigma = 13 ps
    const PulseSpec slow{6, sigma, 1.0, 1e-18};
    try {
      simulate_snapshots(ula2(), slow, medium, {-18.525, 0.1}, 1, 1);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("pulse does not fit observation window") != std::string::npos);
    }
  }
  SUBCASE("angle outside the open interval") {
    CHECK_THROWS_AS(simulate_snapshots(ula2(), pulse_at(4.7 * THz), medium, {90.0, 0.1}, 1, 1), ConfigError);
  }
  SUBCASE("zero snapshots") {
    CHECK_THROWS_AS(simulate_snapshots(ula2(), pulse_at(4.7 * THz), medium, {-18.525, 0.1}, 0, 1), ConfigError);
  }
}
