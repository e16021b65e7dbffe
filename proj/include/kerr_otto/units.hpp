#pragma once

#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>

#include "kerr_otto/errors.hpp"

namespace kerr_otto::units {

inline constexpr double kHbar = 1.054571817e-34;      // J s
inline constexpr double kBoltzmann = 1.380649e-23;    // J/K
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// omega = 2 pi nu for nu given in GHz.
inline double ghz_to_angular(double ghz) { return kTwoPi * ghz * 1e9; }

/// k_B T / hbar, the temperature as an angular frequency.
inline double kelvin_to_angular(double kelvin) { return kBoltzmann * kelvin / kHbar; }

inline double angular_to_kelvin(double angular) { return kHbar * angular / kBoltzmann; }

/// A quantity string had no unit tag, or one that does not fit the quantity.
class UnitError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

enum class Quantity { Frequency, Temperature };

/// Parses a plain floating-point literal; the whole string must be consumed.
inline std::optional<double> parse_number(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) return std::nullopt;
  return value;
}

/// Parses "<number><unit>" into natural units (rad/s).
///   frequencies (omega, K): GHz, rad/s, wh
///   temperatures:           K,   rad/s, wh
/// "wh" means a multiple of omega_h and needs `omega_h`. A bare 0 is
/// accepted since it is unit-free; any other bare number is ambiguous.
inline double parse_quantity(std::string_view text, Quantity kind,
                             std::optional<double> omega_h = std::nullopt) {
  const std::string original(text);
  std::size_t split = text.size();
  while (split > 0) {
    const char c = text[split - 1];
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '/') {
      --split;
    } else {
      break;
    }
  }
  const auto number = parse_number(text.substr(0, split));
  const std::string_view unit = text.substr(split);
  if (!number) {
    throw UnitError("cannot parse quantity '" + original + "'");
  }
  if (unit.empty()) {
    if (*number == 0.0) return 0.0;
    throw UnitError("quantity '" + original +
                    "' needs a unit tag (" +
                    (kind == Quantity::Frequency ? "GHz, rad/s or wh" : "K, rad/s or wh") + ")");
  }
  if (unit == "rad/s") return *number;
  if (unit == "wh") {
    if (!omega_h) {
      throw UnitError("quantity '" + original + "' uses 'wh' but omega_h is not fixed");
    }
    return *number * *omega_h;
  }
  if (kind == Quantity::Frequency && unit == "GHz") return ghz_to_angular(*number);
  if (kind == Quantity::Temperature && unit == "K") return kelvin_to_angular(*number);
  throw UnitError("unit '" + std::string(unit) + "' does not apply to quantity '" +
                  original + "'");
}

}  // namespace kerr_otto::units
