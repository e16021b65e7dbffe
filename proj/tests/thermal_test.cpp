#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kerr_otto/thermal.hpp"
#include "oracles/closed_forms.hpp"

namespace kerr_otto {
namespace {

constexpr double kLn2 = std::numbers::ln2;
const double kOmegaH = 2.0 * std::numbers::pi * 4e9;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

TEST(InverseTemperature, RejectsNonPositive) {
  EXPECT_THROW(InverseTemperature(0.0), InvalidArgument);
  EXPECT_THROW(InverseTemperature(-2.0), InvalidArgument);
  EXPECT_THROW(InverseTemperature::from_temperature(0.0), InvalidArgument);
  EXPECT_DOUBLE_EQ(InverseTemperature::from_temperature(4.0).value(), 0.25);
}

TEST(GibbsState, GeometricSeriesAtLn2) {
  const auto t = gibbs_state(KerrSpectrum(1.0, 0.0), InverseTemperature(kLn2));
  EXPECT_DOUBLE_EQ(t.partition_function(), 2.0);
  const auto p = t.populations();
  for (std::size_t n = 0; n < 40; ++n) {
    EXPECT_LE(rel(p[n], std::ldexp(1.0, -static_cast<int>(n) - 1)), 1e-13) << n;
  }
}

TEST(GibbsState, LowTemperatureSaturatesGroundState) {
  for (double kerr : {0.0, 0.1, 3.0}) {
    const auto t = gibbs_state(KerrSpectrum(1.0, kerr), InverseTemperature(50.0));
    EXPECT_GE(t.populations()[0], 1.0 - 2e-22);
    for (std::size_t n = 1; n < t.level_count(); ++n) {
      EXPECT_LT(t.populations()[n], 2e-22);
    }
  }
}

TEST(GibbsState, FigureColdBathMatchesOversizedBruteForce) {
  const double omega_c = 0.7 * kOmegaH;
  const double kerr_c = 2.0 * omega_c / 100.0;
  for (double th_over_omega_h : {0.05, 0.5, 5.0, 40.0}) {
    const double beta_c = 1.0 / (0.1 * th_over_omega_h * kOmegaH);
    const auto t = gibbs_state(KerrSpectrum(omega_c, kerr_c), InverseTemperature(beta_c));
    const auto ref = oracle::naive_thermal(omega_c, kerr_c, beta_c, 4096);
    ASSERT_LT(t.level_count(), 4096u);
    EXPECT_LE(rel(t.partition_function(), ref.partition_function), 1e-10);
    for (std::size_t n = 0; n < t.level_count(); ++n) {
      if (ref.populations[n] < 1e-290) break;
      EXPECT_LE(rel(t.populations()[n], ref.populations[n]), 1e-10) << "n=" << n;
    }
  }
}

TEST(GibbsState, InvariantsHoldOnRandomInputs) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> log_bw(std::log(0.05), std::log(50.0));
  std::uniform_real_distribution<double> kerr_ratio(0.0, 0.3);
  const TruncationPolicy policy;
  for (int trial = 0; trial < 300; ++trial) {
    const double omega = kOmegaH * std::exp(log_bw(rng) * 0.1);
    const double beta = std::exp(log_bw(rng)) / omega;
    const KerrSpectrum s(omega, kerr_ratio(rng) * omega);
    const auto t = gibbs_state(s, InverseTemperature(beta), policy);
    const auto p = t.populations();
    double total = 0.0;
    for (std::size_t n = 0; n < p.size(); ++n) {
      ASSERT_GE(p[n], 0.0);
      ASSERT_LE(p[n], 1.0);
      if (n + 1 < p.size() && p[n] > 0.0) {
        ASSERT_LT(p[n + 1], p[n]);
      }
      total += p[n];
    }
    EXPECT_LE(t.tail_bound(), policy.tail_tolerance);
    EXPECT_LE(std::abs(total - 1.0), t.tail_bound() + 1e-14);
    EXPECT_GE(t.partition_function(), 1.0);
  }
}

TEST(GibbsState, HarmonicClosedFormsAcrossTemperatureGrid) {
  const double omega = kOmegaH;
  const int points = 60;
  for (int i = 0; i < points; ++i) {
    const double bw = 0.05 * std::pow(1000.0, static_cast<double>(i) / (points - 1));
    const auto t = gibbs_state(KerrSpectrum(omega, 0.0), InverseTemperature(bw / omega));
    EXPECT_LE(rel(t.partition_function(), oracle::harmonic_partition(bw)), 1e-10) << bw;
    EXPECT_LE(rel(mean_occupation(t), oracle::bose_einstein(bw)), 1e-10) << bw;
  }
}

TEST(GibbsState, TighterToleranceBarelyMovesMeanEnergy) {
  TruncationPolicy tight;
  tight.tail_tolerance = TruncationPolicy{}.tail_tolerance / 100.0;
  for (double kerr_ratio : {0.0, 0.002, 0.2}) {
    for (double bw : {0.05, 0.3, 2.0, 20.0}) {
      const KerrSpectrum s(kOmegaH, kerr_ratio * kOmegaH);
      const InverseTemperature beta(bw / kOmegaH);
      const double loose = mean_energy(gibbs_state(s, beta), s);
      const double strict = mean_energy(gibbs_state(s, beta, tight), s);
      EXPECT_LE(rel(loose, strict), 1e-9);
    }
  }
}

TEST(GibbsState, HarmonicNearInfiniteTemperatureDoesNotConverge) {
  TruncationPolicy policy;
  policy.level_cap = 1 << 12;
  try {
    gibbs_state(KerrSpectrum(1.0, 0.0), InverseTemperature(1e-4), policy);
    FAIL() << "expected TruncationNotConverged";
  } catch (const TruncationNotConverged& e) {
    EXPECT_GT(e.achieved_tail_bound(), policy.tail_tolerance);
    EXPECT_EQ(e.truncation(), policy.level_cap - 1);
  }
}

TEST(GibbsState, KerrTamesHighTemperature) {
  // Same temperature as above but the quadratic ladder makes the sum short.
  const auto t = gibbs_state(KerrSpectrum(1.0, 0.2), InverseTemperature(1e-4));
  EXPECT_LE(t.tail_bound(), 1e-14);
}

TEST(GibbsState, Deterministic) {
  const KerrSpectrum s(kOmegaH, 0.2 * kOmegaH);
  const InverseTemperature beta(0.7 / kOmegaH);
  const auto a = gibbs_state(s, beta);
  const auto b = gibbs_state(s, beta);
  ASSERT_EQ(a.level_count(), b.level_count());
  for (std::size_t n = 0; n < a.level_count(); ++n) {
    EXPECT_EQ(a.populations()[n], b.populations()[n]);
  }
}

TEST(GibbsState, RejectsBadPolicy) {
  TruncationPolicy bad;
  bad.tail_tolerance = 0.0;
  EXPECT_THROW(gibbs_state(KerrSpectrum(1.0, 0.0), InverseTemperature(1.0), bad), InvalidArgument);
}

TEST(MeanOccupation, Examples) {
  const auto frozen = gibbs_state(KerrSpectrum(1.0, 0.1), InverseTemperature(1e4));
  EXPECT_EQ(mean_occupation(frozen), 0.0);
  const auto ln2 = gibbs_state(KerrSpectrum(1.0, 0.0), InverseTemperature(kLn2));
  EXPECT_NEAR(mean_occupation(ln2), 1.0, 1e-13);
  const auto unit = gibbs_state(KerrSpectrum(1.0, 0.0), InverseTemperature(1.0));
  EXPECT_NEAR(mean_occupation(unit), 1.0 / (std::numbers::e - 1.0), 1e-13);
  EXPECT_NEAR(mean_occupation(unit), 0.581976707, 1e-9);
}

TEST(MeanEnergy, Examples) {
  const KerrSpectrum cold(1.0, 0.1);
  EXPECT_EQ(mean_energy(gibbs_state(cold, InverseTemperature(1e4)), cold), 0.0);

  const KerrSpectrum harmonic(1.0, 0.0);
  EXPECT_NEAR(mean_energy(gibbs_state(harmonic, InverseTemperature(kLn2)), harmonic), 1.0, 1e-13);

  const KerrSpectrum kerr(1.0, 0.2);
  const auto ref = oracle::naive_thermal(1.0, 0.2, 1.0, 4096);
  EXPECT_LE(rel(mean_energy(gibbs_state(kerr, InverseTemperature(1.0)), kerr), ref.mean_energy),
            1e-12);
}

TEST(MeanEnergy, RejectsForeignSpectrum) {
  const auto t = gibbs_state(KerrSpectrum(1.0, 0.2), InverseTemperature(1.0));
  EXPECT_THROW(mean_energy(t, KerrSpectrum(1.0, 0.3)), SpectrumMismatch);
}

TEST(GibbsStateFixed, ExtendsTruncation) {
  const KerrSpectrum s(1.0, 0.2);
  const auto adaptive = gibbs_state(s, InverseTemperature(1.0));
  const auto extended = gibbs_state_fixed(s, InverseTemperature(1.0), 500);
  EXPECT_EQ(extended.level_count(), 500u);
  EXPECT_LE(extended.tail_bound(), adaptive.tail_bound());
  EXPECT_LE(rel(extended.partition_function(), adaptive.partition_function()), 1e-14);
  EXPECT_THROW(gibbs_state_fixed(s, InverseTemperature(1.0), 0), InvalidArgument);
}

}  // namespace
}  // namespace kerr_otto
