#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "kerr_otto/errors.hpp"

namespace kerr_otto {

/// Diagonal energy ladder of a Kerr-nonlinear oscillator,
/// E_n = omega*n + (K/2)*(n^2 - n), in natural units (hbar = 1, rad/s).
/// K = 0 is the harmonic oscillator.
class KerrSpectrum {
 public:
  KerrSpectrum(double omega, double kerr) : omega_(omega), kerr_(kerr) {
    if (!(std::isfinite(omega) && omega > 0.0)) {
      throw InvalidArgument("KerrSpectrum: omega must be finite and > 0, got " +
                            std::to_string(omega));
    }
    // Attractive (negative) Kerr is not modelled.
    if (!(std::isfinite(kerr) && kerr >= 0.0)) {
      throw InvalidArgument("KerrSpectrum: kerr must be finite and >= 0, got " +
                            std::to_string(kerr));
    }
  }

  double omega() const noexcept { return omega_; }
  double kerr() const noexcept { return kerr_; }

  friend bool operator==(const KerrSpectrum&, const KerrSpectrum&) = default;

 private:
  double omega_;
  double kerr_;
};

namespace detail {

inline void require_level_index(std::int64_t n) {
  if (n < 0) {
    throw InvalidArgument("level index must be >= 0, got " + std::to_string(n));
  }
}

// n(n-1)/2 in exact integer arithmetic.
inline std::int64_t pair_count(std::int64_t n) {
  std::int64_t product = 0;
  if (__builtin_mul_overflow(n, n - 1, &product)) {
    throw ComputationError("level index " + std::to_string(n) +
                           " overflows n^2 - n");
  }
  return product / 2;
}

inline double checked_energy(double value, std::int64_t n) {
  if (!std::isfinite(value)) {
    throw ComputationError("energy of level " + std::to_string(n) +
                           " is not finite");
  }
  return value;
}

}  // namespace detail

inline double energy_level(const KerrSpectrum& s, std::int64_t n) {
  detail::require_level_index(n);
  const double e = s.omega() * static_cast<double>(n) +
                   s.kerr() * static_cast<double>(detail::pair_count(n));
  return detail::checked_energy(e, n);
}

/// E_{n+1} - E_n = omega + K*n.
inline double level_gap(const KerrSpectrum& s, std::int64_t n) {
  detail::require_level_index(n);
  if (n == std::numeric_limits<std::int64_t>::max()) {
    throw ComputationError("level index overflows n + 1");
  }
  detail::pair_count(n + 1);  // same overflow contract as energy_level(n + 1)
  return detail::checked_energy(s.omega() + s.kerr() * static_cast<double>(n), n);
}

}  // namespace kerr_otto
