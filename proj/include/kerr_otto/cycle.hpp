#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kerr_otto/detail/summation.hpp"
#include "kerr_otto/errors.hpp"
#include "kerr_otto/spectrum.hpp"
#include "kerr_otto/thermal.hpp"

namespace kerr_otto {

enum class Regime { Engine, Refrigerator, Other };

inline std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::Engine:
      return "engine";
    case Regime::Refrigerator:
      return "refrigerator";
    case Regime::Other:
      return "other";
  }
  return "other";
}

/// Quasi-static Otto cycle: thermalize with (cold spectrum, beta_cold),
/// switch to the hot spectrum, thermalize with (hot spectrum, beta_hot),
/// switch back. Requires T_c <= T_h; T_c == T_h is accepted only so the
/// degenerate no-op cycle can be represented.
class OttoCycleSpec {
 public:
  OttoCycleSpec(KerrSpectrum cold, KerrSpectrum hot, InverseTemperature beta_cold,
                InverseTemperature beta_hot, TruncationPolicy truncation = {})
      : cold_(cold), hot_(hot), beta_cold_(beta_cold), beta_hot_(beta_hot),
        truncation_(truncation) {
    if (!(beta_cold.value() >= beta_hot.value())) {
      throw InvalidArgument("cycle requires T_c <= T_h (beta_cold >= beta_hot)");
    }
    truncation.validate();
  }

  const KerrSpectrum& cold_spectrum() const noexcept { return cold_; }
  const KerrSpectrum& hot_spectrum() const noexcept { return hot_; }
  InverseTemperature beta_cold() const noexcept { return beta_cold_; }
  InverseTemperature beta_hot() const noexcept { return beta_hot_; }
  const TruncationPolicy& truncation() const noexcept { return truncation_; }

 private:
  KerrSpectrum cold_;
  KerrSpectrum hot_;
  InverseTemperature beta_cold_;
  InverseTemperature beta_hot_;
  TruncationPolicy truncation_;
};

struct CarnotBounds {
  double efficiency;  // 1 - T_c/T_h
  double cop;         // T_c/(T_h - T_c)
};

/// Sign convention: W < 0 is work delivered by the oscillator; heats are
/// positive when absorbed by it.
struct CycleResult {
  double work = 0.0;
  double heat_cold = 0.0;
  double heat_hot = 0.0;
  Regime regime = Regime::Other;
  std::optional<double> efficiency;  // -W/Q_h, engine only
  std::optional<double> cop;         // Q_c/W, refrigerator only
  double otto_efficiency_baseline = 0.0;
  std::optional<double> otto_cop_baseline;  // absent when omega_h <= omega_c
  double carnot_efficiency = 0.0;
  double carnot_cop = 0.0;
  std::int64_t population_overlap_truncation = 0;
  double tail_bound = 0.0;  // max of the two states' certified tails
  bool degenerate = false;  // identical endpoints: nothing happens
};

inline CarnotBounds carnot_bounds(const OttoCycleSpec& spec) {
  const double tc = spec.beta_cold().temperature();
  const double th = spec.beta_hot().temperature();
  if (tc == th) {
    return {0.0, std::numeric_limits<double>::infinity()};
  }
  return {1.0 - tc / th, tc / (th - tc)};
}

/// Zero band for the regime inequalities, tied to the hot-stroke energy scale.
inline double regime_tolerance(const OttoCycleSpec& spec) {
  return 1e-12 * spec.hot_spectrum().omega();
}

inline Regime classify_regime(double work, double heat_cold, double heat_hot,
                              double tolerance) {
  if (work < -tolerance && heat_hot > tolerance && heat_cold < -tolerance) {
    return Regime::Engine;
  }
  if (work > tolerance && heat_cold > tolerance && heat_hot < -tolerance) {
    return Regime::Refrigerator;
  }
  return Regime::Other;
}

namespace detail {

/// Both thermal endpoints on one index range, plus Delta p_n = p^h_n - p^c_n.
struct CyclePopulations {
  ThermalState cold;
  ThermalState hot;
  std::vector<double> delta;
};

inline CyclePopulations cycle_populations(const OttoCycleSpec& spec) {
  auto cold = gibbs_state(spec.cold_spectrum(), spec.beta_cold(), spec.truncation());
  auto hot = gibbs_state(spec.hot_spectrum(), spec.beta_hot(), spec.truncation());
  const auto levels = static_cast<std::int64_t>(std::max(cold.level_count(), hot.level_count()));
  if (static_cast<std::int64_t>(cold.level_count()) < levels) {
    cold = gibbs_state_fixed(spec.cold_spectrum(), spec.beta_cold(), levels);
  }
  if (static_cast<std::int64_t>(hot.level_count()) < levels) {
    hot = gibbs_state_fixed(spec.hot_spectrum(), spec.beta_hot(), levels);
  }
  std::vector<double> delta(static_cast<std::size_t>(levels));
  const auto pc = cold.populations();
  const auto ph = hot.populations();
  for (std::size_t n = 0; n < delta.size(); ++n) {
    delta[n] = ph[n] - pc[n];
  }
  return {std::move(cold), std::move(hot), std::move(delta)};
}

/// sum_n Delta p_n * (a*n + b*(n^2 - n)/2), accumulated from the top index down.
inline double weighted_delta_sum(const std::vector<double>& delta, double linear,
                                 double quadratic) {
  CompensatedSum acc;
  for (std::size_t n = delta.size(); n-- > 0;) {
    if (delta[n] == 0.0) {
      continue;
    }
    const auto idx = static_cast<std::int64_t>(n);
    const double level = linear * static_cast<double>(idx) +
                         quadratic * static_cast<double>(pair_count(idx));
    acc += delta[n] * level;
  }
  return acc.value();
}

}  // namespace detail

inline CycleResult evaluate_cycle(const OttoCycleSpec& spec) {
  const auto& cs = spec.cold_spectrum();
  const auto& hs = spec.hot_spectrum();
  const auto pops = detail::cycle_populations(spec);

  CycleResult r;
  r.work = -detail::weighted_delta_sum(pops.delta, hs.omega() - cs.omega(),
                                       hs.kerr() - cs.kerr());
  r.heat_cold = -detail::weighted_delta_sum(pops.delta, cs.omega(), cs.kerr());
  r.heat_hot = detail::weighted_delta_sum(pops.delta, hs.omega(), hs.kerr());
  r.population_overlap_truncation = static_cast<std::int64_t>(pops.delta.size()) - 1;
  r.tail_bound = std::max(pops.cold.tail_bound(), pops.hot.tail_bound());
  r.degenerate = cs == hs && spec.beta_cold() == spec.beta_hot();

  r.regime = classify_regime(r.work, r.heat_cold, r.heat_hot, regime_tolerance(spec));
  if (r.regime == Regime::Engine) {
    r.efficiency = -r.work / r.heat_hot;
  } else if (r.regime == Regime::Refrigerator) {
    r.cop = r.heat_cold / r.work;
  }

  r.otto_efficiency_baseline = 1.0 - cs.omega() / hs.omega();
  const double split = hs.omega() - cs.omega();
  if (split > 0.0) {
    r.otto_cop_baseline = cs.omega() / split;
  }
  const auto carnot = carnot_bounds(spec);
  r.carnot_efficiency = carnot.efficiency;
  r.carnot_cop = carnot.cop;
  return r;
}

/// Efficiency from the explicit population-sum ratio
///   1 - (w_c/w_h) * S(K_c/2w_c) / S(K_h/2w_h),  S(k) = sum Dp_n [n + k(n^2-n)].
/// Agrees with CycleResult::efficiency; kept as an independent route.
inline double engine_efficiency(const OttoCycleSpec& spec) {
  const auto pops = detail::cycle_populations(spec);
  const auto& cs = spec.cold_spectrum();
  const auto& hs = spec.hot_spectrum();
  const double work = -detail::weighted_delta_sum(pops.delta, hs.omega() - cs.omega(),
                                                  hs.kerr() - cs.kerr());
  const double heat_cold = -detail::weighted_delta_sum(pops.delta, cs.omega(), cs.kerr());
  const double heat_hot = detail::weighted_delta_sum(pops.delta, hs.omega(), hs.kerr());
  if (classify_regime(work, heat_cold, heat_hot, regime_tolerance(spec)) != Regime::Engine) {
    throw NotAnEngine("cycle parameters do not satisfy W < 0, Q_h > 0, Q_c < 0");
  }
  const double numerator = detail::weighted_delta_sum(pops.delta, 1.0, cs.kerr() / cs.omega());
  const double denominator = detail::weighted_delta_sum(pops.delta, 1.0, hs.kerr() / hs.omega());
  return 1.0 - (cs.omega() / hs.omega()) * (numerator / denominator);
}

/// COP from the explicit ratio
///   (w_c/Dw) * S(K_c/2w_c) / S(DK/2Dw).
inline double refrigerator_cop(const OttoCycleSpec& spec) {
  const auto& cs = spec.cold_spectrum();
  const auto& hs = spec.hot_spectrum();
  const double split = hs.omega() - cs.omega();
  if (!(split > 0.0)) {
    throw DegenerateFrequencySplit("refrigerator COP needs omega_h > omega_c");
  }
  const auto pops = detail::cycle_populations(spec);
  const double work = -detail::weighted_delta_sum(pops.delta, split, hs.kerr() - cs.kerr());
  const double heat_cold = -detail::weighted_delta_sum(pops.delta, cs.omega(), cs.kerr());
  const double heat_hot = detail::weighted_delta_sum(pops.delta, hs.omega(), hs.kerr());
  if (classify_regime(work, heat_cold, heat_hot, regime_tolerance(spec)) !=
      Regime::Refrigerator) {
    throw NotARefrigerator("cycle parameters do not satisfy W > 0, Q_c > 0, Q_h < 0");
  }
  const double numerator = detail::weighted_delta_sum(pops.delta, 1.0, cs.kerr() / cs.omega());
  const double denominator =
      detail::weighted_delta_sum(pops.delta, 1.0, (hs.kerr() - cs.kerr()) / split);
  return (cs.omega() / split) * (numerator / denominator);
}

}  // namespace kerr_otto
