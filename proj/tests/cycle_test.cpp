#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "kerr_otto/cycle.hpp"
#include "oracles/closed_forms.hpp"

namespace kerr_otto {
namespace {

const double kOmegaH4 = 2.0 * std::numbers::pi * 4e9;
const double kOmegaH8 = 2.0 * std::numbers::pi * 8e9;
const double kOmegaC16 = 2.0 * std::numbers::pi * 1.6e9;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

OttoCycleSpec make(double wc, double wh, double kc, double kh, double tc, double th) {
  return OttoCycleSpec(KerrSpectrum(wc, kc), KerrSpectrum(wh, kh),
                       InverseTemperature::from_temperature(tc),
                       InverseTemperature::from_temperature(th));
}

// Engine figure parameters; T_h given in units of omega_h.
OttoCycleSpec engine_figure(double kc_over_wc, double th) {
  const double wh = kOmegaH4, wc = 0.7 * kOmegaH4;
  return make(wc, wh, kc_over_wc * wc, 0.2 * wh, 0.1 * th * wh, th * wh);
}

OttoCycleSpec refrigerator_figure(double kh_over_wh, double th) {
  const double wh = kOmegaH8, wc = kOmegaC16;
  return make(wc, wh, 0.2 * wc, kh_over_wh * wh, 0.7 * th * wh, th * wh);
}

TEST(OttoCycleSpec, RejectsColdHotterThanHot) {
  EXPECT_THROW(make(1.0, 2.0, 0.0, 0.0, 2.0, 1.0), InvalidArgument);
  EXPECT_NO_THROW(make(1.0, 2.0, 0.0, 0.0, 1.0, 1.0));
}

TEST(EvaluateCycle, IdenticalEndpointsAreDegenerate) {
  const auto r = evaluate_cycle(make(1.0, 1.0, 0.1, 0.1, 0.8, 0.8));
  EXPECT_EQ(r.work, 0.0);
  EXPECT_EQ(r.heat_cold, 0.0);
  EXPECT_EQ(r.heat_hot, 0.0);
  EXPECT_EQ(r.regime, Regime::Other);
  EXPECT_TRUE(r.degenerate);
  EXPECT_FALSE(r.efficiency);
  EXPECT_FALSE(r.cop);
}

TEST(EvaluateCycle, EqualSpectraOnlyConductHeat) {
  const auto r = evaluate_cycle(make(1.3, 1.3, 0.05, 0.05, 0.4, 2.0));
  EXPECT_EQ(r.work, 0.0);
  EXPECT_GT(r.heat_hot, 0.0);
  EXPECT_EQ(r.heat_hot, -r.heat_cold);
  EXPECT_EQ(r.regime, Regime::Other);
  EXPECT_FALSE(r.degenerate);
}

TEST(EvaluateCycle, HarmonicMatchesBoseEinstein) {
  struct Case { double wc, wh, tc, th; };
  for (const auto& c : {Case{0.7, 1.0, 0.1, 1.0}, Case{0.2, 1.0, 0.7, 1.0},
                        Case{1.5, 1.0, 0.3, 3.0}, Case{0.05, 1.0, 0.5, 9.0}}) {
    const auto r = evaluate_cycle(make(c.wc, c.wh, 0.0, 0.0, c.tc, c.th));
    const double nc = oracle::bose_einstein(c.wc / c.tc);
    const double nh = oracle::bose_einstein(c.wh / c.th);
    EXPECT_LE(rel(r.work, -(c.wh - c.wc) * (nh - nc)), 1e-10);
    EXPECT_LE(rel(r.heat_hot, c.wh * (nh - nc)), 1e-10);
    EXPECT_LE(rel(r.heat_cold, -c.wc * (nh - nc)), 1e-10);
  }
}

TEST(EvaluateCycle, EngineFigureParametersAreEngines) {
  for (double kc : {0.0, 0.002, 0.02}) {
    for (double th : {0.05, 0.3, 1.0, 5.0, 20.0, 40.0}) {
      const auto r = evaluate_cycle(engine_figure(kc, th));
      EXPECT_EQ(r.regime, Regime::Engine) << "K_c/w_c=" << kc << " T_h/w_h=" << th;
      EXPECT_LT(r.work, 0.0);
      EXPECT_GT(r.heat_hot, 0.0);
      EXPECT_LT(r.heat_cold, 0.0);
      EXPECT_LT(-r.work, r.heat_hot);
    }
  }
}

TEST(EvaluateCycle, StrongColdKerrIsAnEngineOnlyWhenCold) {
  // K_c > K_h: engine at low T_h with efficiency below the harmonic value.
  const double wh = kOmegaH4, wc = 0.7 * wh;
  const auto low = evaluate_cycle(make(wc, wh, 0.3 * wh, 0.2 * wh, 0.1 * wh, 1.0 * wh));
  ASSERT_EQ(low.regime, Regime::Engine);
  EXPECT_LT(*low.efficiency, low.otto_efficiency_baseline);
  const auto high = evaluate_cycle(make(wc, wh, 0.3 * wh, 0.2 * wh, 4.0 * wh, 40.0 * wh));
  EXPECT_NE(high.regime, Regime::Engine);
}

TEST(EvaluateCycle, BaselinesAndCarnot) {
  const auto r = evaluate_cycle(engine_figure(0.0, 1.0));
  EXPECT_DOUBLE_EQ(r.otto_efficiency_baseline, 0.3);
  ASSERT_TRUE(r.otto_cop_baseline);
  EXPECT_DOUBLE_EQ(*r.otto_cop_baseline, 0.7 / 0.3);
  EXPECT_DOUBLE_EQ(r.carnot_efficiency, 0.9);
  const auto f = evaluate_cycle(refrigerator_figure(0.0, 1.0));
  ASSERT_TRUE(f.otto_cop_baseline);
  EXPECT_DOUBLE_EQ(*f.otto_cop_baseline, 0.25);
  // omega_h < omega_c: no refrigerator baseline.
  EXPECT_FALSE(evaluate_cycle(make(2.0, 1.0, 0.0, 0.0, 0.5, 1.0)).otto_cop_baseline);
}

TEST(EngineEfficiency, HarmonicIsOttoEfficiency) {
  const auto spec = engine_figure(0.0, 1.0);
  const double wh = kOmegaH4;
  const auto qho = make(0.7 * wh, wh, 0.0, 0.0, 0.1 * wh, wh);
  EXPECT_NEAR(engine_efficiency(qho), 0.3, 1e-12);
  EXPECT_NEAR(*evaluate_cycle(qho).efficiency, 0.3, 1e-12);
  (void)spec;
}

TEST(EngineEfficiency, EqualKerrRatiosReduceToOtto) {
  const double wh = kOmegaH4;
  for (double ratio : {0.0, 0.01, 0.2, 0.3}) {
    for (double th : {0.1, 1.0, 10.0}) {
      const auto spec = make(0.7 * wh, wh, ratio * 0.7 * wh, ratio * wh, 0.1 * th * wh, th * wh);
      ASSERT_EQ(evaluate_cycle(spec).regime, Regime::Engine);
      EXPECT_NEAR(engine_efficiency(spec), 0.3, 1e-12);
    }
  }
}

TEST(EngineEfficiency, HighTemperaturePlateau) {
  const double eta = engine_efficiency(engine_figure(0.0, 40.0));
  EXPECT_NEAR(eta, 0.75, 0.05);
}

TEST(EngineEfficiency, AgreesWithWorkOverHeat) {
  for (double kc : {0.0, 0.002, 0.02}) {
    for (double th : {0.1, 1.0, 10.0, 40.0}) {
      const auto spec = engine_figure(kc, th);
      EXPECT_LE(rel(engine_efficiency(spec), *evaluate_cycle(spec).efficiency), 1e-12);
    }
  }
}

TEST(EngineEfficiency, RejectsNonEngine) {
  EXPECT_THROW(engine_efficiency(refrigerator_figure(0.0, 1.0)), NotAnEngine);
}

TEST(RefrigeratorCop, HarmonicIsOttoCop) {
  const double wh = 1.0, wc = 0.2;
  const auto spec = make(wc, wh, 0.0, 0.0, 0.7, 1.0);
  ASSERT_EQ(evaluate_cycle(spec).regime, Regime::Refrigerator);
  EXPECT_NEAR(refrigerator_cop(spec), wc / (wh - wc), 1e-12);
}

TEST(RefrigeratorCop, ProportionalKerrSplitReducesToOtto) {
  // K_c / (K_h - K_c) = w_c / (w_h - w_c)
  const double wh = 1.0, wc = 0.2, kc = 0.04, kh = kc * wh / wc;
  const auto spec = make(wc, wh, kc, kh, 0.7, 1.0);
  ASSERT_EQ(evaluate_cycle(spec).regime, Regime::Refrigerator);
  EXPECT_NEAR(refrigerator_cop(spec), wc / (wh - wc), 1e-12);
}

TEST(RefrigeratorCop, FigureParametersBeatOttoBelowCarnot) {
  for (double kh : {0.0, 0.002, 0.02}) {
    const auto spec = refrigerator_figure(kh, 1.0);
    const auto r = evaluate_cycle(spec);
    ASSERT_EQ(r.regime, Regime::Refrigerator);
    const double cop = refrigerator_cop(spec);
    EXPECT_GT(cop, 0.25);
    EXPECT_LE(cop, 7.0 / 3.0);
    EXPECT_LE(rel(cop, *r.cop), 1e-12);
  }
}

TEST(RefrigeratorCop, Errors) {
  EXPECT_THROW(refrigerator_cop(make(2.0, 1.0, 0.0, 0.0, 0.5, 1.0)), DegenerateFrequencySplit);
  EXPECT_THROW(refrigerator_cop(make(1.0, 1.0, 0.0, 0.0, 0.5, 1.0)), DegenerateFrequencySplit);
  EXPECT_THROW(refrigerator_cop(engine_figure(0.0, 1.0)), NotARefrigerator);
}

TEST(CarnotBounds, Examples) {
  const auto engine = carnot_bounds(make(1.0, 2.0, 0.0, 0.0, 0.1, 1.0));
  EXPECT_DOUBLE_EQ(engine.efficiency, 0.9);
  const auto fridge = carnot_bounds(make(1.0, 2.0, 0.0, 0.0, 0.7, 1.0));
  EXPECT_DOUBLE_EQ(fridge.cop, 7.0 / 3.0);
  const auto frozen = carnot_bounds(make(1.0, 2.0, 0.0, 0.0, 1e-12, 1.0));
  EXPECT_NEAR(frozen.efficiency, 1.0, 1e-11);
}

TEST(ClassifyRegime, ToleranceBand) {
  EXPECT_EQ(classify_regime(-1.0, -1.0, 2.0, 0.1), Regime::Engine);
  EXPECT_EQ(classify_regime(1.0, 1.0, -2.0, 0.1), Regime::Refrigerator);
  EXPECT_EQ(classify_regime(-0.05, -1.0, 2.0, 0.1), Regime::Other);
  EXPECT_EQ(classify_regime(1.0, 0.05, -2.0, 0.1), Regime::Other);
  EXPECT_EQ(classify_regime(-1.0, 1.0, 0.0, 0.1), Regime::Other);
}

// Property checks on random cycles.
class RandomCycles : public ::testing::Test {
 protected:
  std::mt19937_64 rng{2024};

  OttoCycleSpec draw() {
    std::uniform_real_distribution<double> log_bw(std::log(0.05), std::log(50.0));
    std::uniform_real_distribution<double> log_w(std::log(0.1), std::log(10.0));
    std::uniform_real_distribution<double> kerr(0.0, 0.3);
    for (;;) {
      const double wh = kOmegaH4 * std::exp(log_w(rng) * 0.2);
      const double wc = wh * std::exp(log_w(rng) * 0.3);
      const double bc = std::exp(log_bw(rng)) / wc;
      const double bh = std::exp(log_bw(rng)) / wh;
      if (!(bc > bh)) continue;
      return OttoCycleSpec(KerrSpectrum(wc, kerr(rng) * wc), KerrSpectrum(wh, kerr(rng) * wh),
                           InverseTemperature(bc), InverseTemperature(bh));
    }
  }
};

TEST_F(RandomCycles, FirstLawCloses) {
  for (int i = 0; i < 300; ++i) {
    const auto spec = draw();
    const auto r = evaluate_cycle(spec);
    const double scale = std::max(std::abs(r.work), spec.hot_spectrum().omega());
    EXPECT_LE(std::abs(r.work + r.heat_cold + r.heat_hot), 1e-12 * scale);
  }
}

TEST_F(RandomCycles, FiguresOfMeritRespectCarnotAndAgreeAcrossRoutes) {
  int engines = 0, fridges = 0;
  for (int i = 0; i < 400; ++i) {
    const auto spec = draw();
    const auto r = evaluate_cycle(spec);
    EXPECT_EQ(r.efficiency.has_value(), r.regime == Regime::Engine);
    EXPECT_EQ(r.cop.has_value(), r.regime == Regime::Refrigerator);
    if (r.efficiency) {
      ++engines;
      EXPECT_GT(*r.efficiency, 0.0);
      EXPECT_LT(*r.efficiency, r.carnot_efficiency);
      EXPECT_LE(rel(engine_efficiency(spec), *r.efficiency), 1e-12);
    }
    if (r.cop) {
      ++fridges;
      EXPECT_GT(*r.cop, 0.0);
      EXPECT_LT(*r.cop, r.carnot_cop);
      if (spec.hot_spectrum().omega() > spec.cold_spectrum().omega()) {
        EXPECT_LE(rel(refrigerator_cop(spec), *r.cop), 1e-12);
      } else {
        EXPECT_THROW(refrigerator_cop(spec), DegenerateFrequencySplit);
      }
    }
  }
  EXPECT_GT(engines, 20);
  EXPECT_GT(fridges, 5);
}

}  // namespace
}  // namespace kerr_otto
