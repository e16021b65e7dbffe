#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kerr_otto/sweep.hpp"
#include "kerr_otto/units.hpp"

namespace kerr_otto {

enum class FigureId { Fig2, Fig3, Fig4, Fig5 };

struct FigureCurve {
  std::string label;
  RatioLock kerr;  // the per-curve Kerr setting
};

/// Frozen parameter set of one published figure. The temperature axis is
/// T_h / omega_h (k_B = hbar = 1) on a log grid.
struct FigurePreset {
  FigureId id;
  std::string_view name;
  std::string_view plotted;  // which outputs the figure shows
  CycleParameters base;      // T fields are overwritten by the axis and lock
  std::vector<RatioLock> locks;
  double dimensionless_th_start;
  double dimensionless_th_stop;
  std::vector<FigureCurve> curves;
  std::optional<double> caption_cop_otto;  // baseline printed in the caption

  Axis axis(std::size_t points) const {
    return {Parameter::TemperatureHot, dimensionless_th_start * base.omega_h,
            dimensionless_th_stop * base.omega_h, points, Spacing::Log};
  }

  std::vector<SweepSpec> curve_specs(const TruncationPolicy& policy, std::size_t points) const {
    std::vector<SweepSpec> specs;
    for (const auto& curve : curves) {
      SweepSpec s;
      s.base = base;
      s.truncation = policy;
      s.axes = {axis(points)};
      s.locks = locks;
      s.locks.push_back(curve.kerr);
      specs.push_back(std::move(s));
    }
    return specs;
  }
};

namespace detail {

// omega_h = 2 pi 4 GHz, omega_c = 0.7 omega_h, T_c = 0.1 T_h, K_h/2 = 0.1 omega_h,
// K_c/2 in {0, omega_c/1000, omega_c/100}.
inline FigurePreset engine_preset(FigureId id, std::string_view name, std::string_view plotted) {
  const double omega_h = units::ghz_to_angular(4.0);
  return FigurePreset{
      id,
      name,
      plotted,
      CycleParameters{0.7 * omega_h, omega_h, 0.0, 0.2 * omega_h, 0.1 * omega_h, omega_h},
      {{Parameter::TemperatureCold, Parameter::TemperatureHot, 0.1},
       {Parameter::KerrHot, Parameter::OmegaHot, 0.2}},
      0.05,
      40.0,
      {{"K_c=0", {Parameter::KerrCold, Parameter::OmegaCold, 0.0}},
       {"K_c/2=omega_c/1000", {Parameter::KerrCold, Parameter::OmegaCold, 0.002}},
       {"K_c/2=omega_c/100", {Parameter::KerrCold, Parameter::OmegaCold, 0.02}}},
      std::nullopt};
}

// omega_h = 2 pi 8 GHz, omega_c = 2 pi 1.6 GHz, K_c/2 = omega_c/10, T_c = 0.7 T_h,
// K_h/2 in {0, omega_h/1000, omega_h/100}.
inline FigurePreset refrigerator_preset(FigureId id, std::string_view name,
                                        std::string_view plotted) {
  const double omega_h = units::ghz_to_angular(8.0);
  const double omega_c = units::ghz_to_angular(1.6);
  return FigurePreset{
      id,
      name,
      plotted,
      CycleParameters{omega_c, omega_h, 0.2 * omega_c, 0.0, 0.7 * omega_h, omega_h},
      {{Parameter::TemperatureCold, Parameter::TemperatureHot, 0.7},
       {Parameter::KerrCold, Parameter::OmegaCold, 0.2}},
      0.05,
      25.0,
      {{"K_h=0", {Parameter::KerrHot, Parameter::OmegaHot, 0.0}},
       {"K_h/2=omega_h/1000", {Parameter::KerrHot, Parameter::OmegaHot, 0.002}},
       {"K_h/2=omega_h/100", {Parameter::KerrHot, Parameter::OmegaHot, 0.02}}},
      1.0 / 3.0};
}

}  // namespace detail

inline const FigurePreset& figure_preset(FigureId id) {
  static const std::array<FigurePreset, 4> presets{
      detail::engine_preset(FigureId::Fig2, "fig2", "Q_h, W, Q_c vs T_h (engine)"),
      detail::engine_preset(FigureId::Fig3, "fig3", "eta/eta_otto vs T_h (engine)"),
      detail::refrigerator_preset(FigureId::Fig4, "fig4", "Q_c, W, Q_h vs T_h (refrigerator)"),
      detail::refrigerator_preset(FigureId::Fig5, "fig5", "cop/cop_otto vs T_h (refrigerator)"),
  };
  return presets[static_cast<std::size_t>(id)];
}

inline std::optional<FigureId> parse_figure(std::string_view name) {
  for (auto id : {FigureId::Fig2, FigureId::Fig3, FigureId::Fig4, FigureId::Fig5}) {
    if (figure_preset(id).name == name) return id;
  }
  return std::nullopt;
}

inline constexpr std::size_t kDefaultFigurePoints = 200;

/// Rows of every curve, curve by curve, each in axis order.
inline std::vector<SweepRecord> run_figure(const FigurePreset& preset,
                                           const TruncationPolicy& policy = {},
                                           std::size_t points = kDefaultFigurePoints,
                                           unsigned threads = 1) {
  std::vector<SweepRecord> rows;
  for (const auto& spec : preset.curve_specs(policy, points)) {
    auto part = run_sweep(spec, threads);
    rows.insert(rows.end(), std::make_move_iterator(part.begin()),
                std::make_move_iterator(part.end()));
  }
  return rows;
}

}  // namespace kerr_otto
