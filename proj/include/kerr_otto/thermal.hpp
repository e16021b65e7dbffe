#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kerr_otto/detail/summation.hpp"
#include "kerr_otto/errors.hpp"
#include "kerr_otto/spectrum.hpp"

namespace kerr_otto {

/// beta = 1/T with k_B = hbar = 1, so beta carries units of s/rad.
class InverseTemperature {
 public:
  explicit InverseTemperature(double beta) : beta_(beta) {
    if (!(std::isfinite(beta) && beta > 0.0)) {
      throw InvalidArgument("inverse temperature must be finite and > 0, got " +
                            std::to_string(beta));
    }
  }

  static InverseTemperature from_temperature(double temperature) {
    if (!(std::isfinite(temperature) && temperature > 0.0)) {
      throw InvalidArgument("temperature must be finite and > 0, got " +
                            std::to_string(temperature));
    }
    return InverseTemperature(1.0 / temperature);
  }

  double value() const noexcept { return beta_; }
  double temperature() const noexcept { return 1.0 / beta_; }

  friend bool operator==(const InverseTemperature&, const InverseTemperature&) = default;

 private:
  double beta_;
};

struct TruncationPolicy {
  double tail_tolerance = 1e-14;       // bound on neglected probability mass
  std::int64_t level_cap = 1 << 20;    // hard cap on levels kept
  std::int64_t initial_levels = 32;

  void validate() const {
    if (!(std::isfinite(tail_tolerance) && tail_tolerance > 0.0)) {
      throw InvalidArgument("tail tolerance must be > 0");
    }
    if (initial_levels < 2 || level_cap < initial_levels) {
      throw InvalidArgument("truncation needs 2 <= initial levels <= level cap");
    }
  }

  friend bool operator==(const TruncationPolicy&, const TruncationPolicy&) = default;
};

/// Truncated Gibbs populations p_n = exp(-beta E_n) / Z over n = 0..N_max.
class ThermalState {
 public:
  ThermalState(KerrSpectrum spectrum, InverseTemperature beta,
               std::vector<double> populations, double partition_function,
               double tail_bound)
      : spectrum_(spectrum),
        beta_(beta),
        populations_(std::move(populations)),
        partition_function_(partition_function),
        tail_bound_(tail_bound) {}

  std::span<const double> populations() const noexcept { return populations_; }
  double partition_function() const noexcept { return partition_function_; }
  /// Largest Fock index kept.
  std::int64_t truncation() const noexcept {
    return static_cast<std::int64_t>(populations_.size()) - 1;
  }
  std::size_t level_count() const noexcept { return populations_.size(); }
  /// Certified upper bound on the probability mass beyond truncation().
  double tail_bound() const noexcept { return tail_bound_; }
  const KerrSpectrum& spectrum() const noexcept { return spectrum_; }
  InverseTemperature beta() const noexcept { return beta_; }

 private:
  KerrSpectrum spectrum_;
  InverseTemperature beta_;
  std::vector<double> populations_;
  double partition_function_;
  double tail_bound_;
};

namespace detail {

struct TruncatedSum {
  std::vector<double> weights;  // exp(-beta E_n), n < levels
  double partition_function = 0.0;
  double last_weight = 0.0;
  double tail_bound = 0.0;      // relative to partition_function
};

inline TruncatedSum truncated_sum(const KerrSpectrum& s, double beta,
                                  std::int64_t levels) {
  TruncatedSum out;
  out.weights.resize(static_cast<std::size_t>(levels));
  for (std::int64_t n = 0; n < levels; ++n) {
    out.weights[static_cast<std::size_t>(n)] = std::exp(-beta * energy_level(s, n));
  }
  CompensatedSum z;
  for (auto it = out.weights.rbegin(); it != out.weights.rend(); ++it) {
    z += *it;
  }
  out.partition_function = z.value();
  out.last_weight = out.weights.back();

  // Neglected terms n >= levels. Gaps grow with n (K >= 0), so successive
  // ratios are bounded by exp(-beta * gap(levels)); for K = 0 this is exact.
  const double first_neglected = std::exp(-beta * energy_level(s, levels));
  const double one_minus_ratio = -std::expm1(-beta * level_gap(s, levels));
  out.tail_bound = first_neglected / one_minus_ratio / out.partition_function;
  return out;
}

inline ThermalState normalize(const KerrSpectrum& s, InverseTemperature beta,
                              TruncatedSum sum) {
  for (double& w : sum.weights) {
    w /= sum.partition_function;
  }
  return ThermalState(s, beta, std::move(sum.weights), sum.partition_function,
                      sum.tail_bound);
}

}  // namespace detail

/// Gibbs state with adaptive truncation: the level count starts at
/// policy.initial_levels and doubles until the last kept weight and the
/// certified tail mass are both below policy.tail_tolerance (relative to Z).
inline ThermalState gibbs_state(const KerrSpectrum& s, InverseTemperature beta,
                                const TruncationPolicy& policy = {}) {
  policy.validate();
  std::int64_t levels = std::min(policy.initial_levels, policy.level_cap);
  for (;;) {
    auto sum = detail::truncated_sum(s, beta.value(), levels);
    const double tol = policy.tail_tolerance;
    if (sum.last_weight <= tol * sum.partition_function && sum.tail_bound <= tol) {
      return detail::normalize(s, beta, std::move(sum));
    }
    if (levels >= policy.level_cap) {
      throw TruncationNotConverged(sum.tail_bound, levels - 1);
    }
    levels = std::min(levels * 2, policy.level_cap);
  }
}

/// Gibbs state on exactly `levels` Fock levels; no convergence requirement.
inline ThermalState gibbs_state_fixed(const KerrSpectrum& s, InverseTemperature beta,
                                      std::int64_t levels) {
  if (levels < 1) {
    throw InvalidArgument("fixed truncation needs at least one level");
  }
  return detail::normalize(s, beta, detail::truncated_sum(s, beta.value(), levels));
}

inline double mean_occupation(const ThermalState& t) {
  const auto p = t.populations();
  detail::CompensatedSum acc;
  for (std::size_t n = p.size(); n-- > 0;) {
    acc += static_cast<double>(n) * p[n];
  }
  return acc.value();
}

/// Tr(rho H) for a diagonal state; `s` must be the spectrum `t` was built from.
inline double mean_energy(const ThermalState& t, const KerrSpectrum& s) {
  if (!(t.spectrum() == s)) {
    throw SpectrumMismatch("thermal state was generated from a different spectrum");
  }
  const auto p = t.populations();
  detail::CompensatedSum acc;
  for (std::size_t n = p.size(); n-- > 0;) {
    acc += p[n] * energy_level(s, static_cast<std::int64_t>(n));
  }
  return acc.value();
}

}  // namespace kerr_otto
