#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "kerr_otto/cycle.hpp"
#include "kerr_otto/errors.hpp"

namespace kerr_otto {

/// Resolved cycle parameters in natural units (rad/s for every field).
struct CycleParameters {
  double omega_c = 0.0;
  double omega_h = 0.0;
  double kerr_c = 0.0;
  double kerr_h = 0.0;
  double temperature_c = 0.0;
  double temperature_h = 0.0;

  friend bool operator==(const CycleParameters&, const CycleParameters&) = default;
};

enum class Parameter {
  TemperatureHot,
  TemperatureCold,
  OmegaCold,
  OmegaHot,
  KerrCold,
  KerrHot,
  RatioTcTh,        // T_c/T_h, drives the T_c lock
  RatioOmegaCOmegaH // omega_c/omega_h, drives the omega_c lock
};

inline constexpr std::array<std::pair<Parameter, std::string_view>, 8> kParameterNames{{
    {Parameter::TemperatureHot, "T_h"},
    {Parameter::TemperatureCold, "T_c"},
    {Parameter::OmegaCold, "omega_c"},
    {Parameter::OmegaHot, "omega_h"},
    {Parameter::KerrCold, "K_c"},
    {Parameter::KerrHot, "K_h"},
    {Parameter::RatioTcTh, "ratio:T_c/T_h"},
    {Parameter::RatioOmegaCOmegaH, "ratio:omega_c/omega_h"},
}};

inline std::string_view to_string(Parameter p) {
  for (const auto& [value, name] : kParameterNames) {
    if (value == p) return name;
  }
  return "?";
}

inline std::optional<Parameter> parse_parameter(std::string_view name) {
  for (const auto& [value, text] : kParameterNames) {
    if (text == name) return value;
  }
  return std::nullopt;
}

inline bool is_ratio(Parameter p) {
  return p == Parameter::RatioTcTh || p == Parameter::RatioOmegaCOmegaH;
}

inline double& field(CycleParameters& c, Parameter p) {
  switch (p) {
    case Parameter::TemperatureHot: return c.temperature_h;
    case Parameter::TemperatureCold: return c.temperature_c;
    case Parameter::OmegaCold: return c.omega_c;
    case Parameter::OmegaHot: return c.omega_h;
    case Parameter::KerrCold: return c.kerr_c;
    case Parameter::KerrHot: return c.kerr_h;
    default: break;
  }
  throw InvalidArgument("ratio axis has no direct cycle field");
}

inline double field(const CycleParameters& c, Parameter p) {
  return field(const_cast<CycleParameters&>(c), p);
}

enum class Spacing { Linear, Log };

struct Axis {
  Parameter parameter = Parameter::TemperatureHot;
  double start = 0.0;
  double stop = 1.0;
  std::size_t count = 2;
  Spacing spacing = Spacing::Linear;

  void validate() const {
    if (count < 2) throw InvalidArgument("axis needs at least 2 points");
    if (!(std::isfinite(start) && std::isfinite(stop) && start < stop)) {
      throw InvalidArgument("axis " + std::string(to_string(parameter)) +
                            " needs finite start < stop");
    }
    if (spacing == Spacing::Log && !(start > 0.0)) {
      throw InvalidArgument("log axis needs start > 0");
    }
  }

  /// Endpoints are hit exactly.
  double value(std::size_t i) const {
    if (i == 0) return start;
    if (i + 1 == count) return stop;
    const double t = static_cast<double>(i) / static_cast<double>(count - 1);
    if (spacing == Spacing::Log) {
      return std::exp(std::log(start) + t * (std::log(stop) - std::log(start)));
    }
    return start + t * (stop - start);
  }
};

/// target = factor * source, re-applied at every grid point.
struct RatioLock {
  Parameter target;
  Parameter source;
  double factor;
};

struct SweepSpec {
  CycleParameters base;
  TruncationPolicy truncation;
  std::vector<Axis> axes;  // 0 (single point), 1 or 2
  std::vector<RatioLock> locks;

  void validate() const;
  std::size_t point_count() const {
    std::size_t n = 1;
    for (const auto& a : axes) n *= a.count;
    return n;
  }
  /// Axis values for flat index `flat` (last axis fastest).
  std::vector<double> axis_values(std::size_t flat) const {
    std::vector<double> v(axes.size());
    for (std::size_t k = axes.size(); k-- > 0;) {
      v[k] = axes[k].value(flat % axes[k].count);
      flat /= axes[k].count;
    }
    return v;
  }
};

namespace detail {

inline Parameter ratio_target(Parameter ratio) {
  return ratio == Parameter::RatioTcTh ? Parameter::TemperatureCold : Parameter::OmegaCold;
}

inline Parameter ratio_source(Parameter ratio) {
  return ratio == Parameter::RatioTcTh ? Parameter::TemperatureHot : Parameter::OmegaHot;
}

/// Locks in application order (a lock whose source is another lock's target
/// runs after it). Ratio axes contribute their implied lock.
inline std::vector<RatioLock> effective_locks(const SweepSpec& spec) {
  std::vector<RatioLock> locks = spec.locks;
  for (const auto& axis : spec.axes) {
    if (is_ratio(axis.parameter)) {
      locks.push_back({detail::ratio_target(axis.parameter),
                       detail::ratio_source(axis.parameter), axis.start});
    }
  }
  std::vector<RatioLock> ordered;
  std::vector<bool> placed(locks.size(), false);
  while (ordered.size() < locks.size()) {
    bool progressed = false;
    for (std::size_t i = 0; i < locks.size(); ++i) {
      if (placed[i]) continue;
      bool source_pending = false;
      for (std::size_t j = 0; j < locks.size(); ++j) {
        if (j != i && !placed[j] && locks[j].target == locks[i].source) source_pending = true;
      }
      if (!source_pending) {
        ordered.push_back(locks[i]);
        placed[i] = true;
        progressed = true;
      }
    }
    if (!progressed) throw InvalidArgument("ratio locks form a cycle");
  }
  return ordered;
}

}  // namespace detail

inline void SweepSpec::validate() const {
  truncation.validate();
  if (axes.size() > 2) throw InvalidArgument("at most two sweep axes");
  std::vector<Parameter> targets;
  for (const auto& a : axes) {
    a.validate();
  }
  if (axes.size() == 2 && axes[0].parameter == axes[1].parameter) {
    throw InvalidArgument("both axes sweep the same parameter");
  }
  for (const auto& lock : locks) {
    if (is_ratio(lock.target) || is_ratio(lock.source) || lock.target == lock.source) {
      throw InvalidArgument("lock must relate two distinct cycle parameters");
    }
    if (!(std::isfinite(lock.factor) && lock.factor >= 0.0)) {
      throw InvalidArgument("lock factor must be finite and >= 0");
    }
    targets.push_back(lock.target);
  }
  for (const auto& a : axes) {
    if (is_ratio(a.parameter)) targets.push_back(detail::ratio_target(a.parameter));
  }
  for (std::size_t i = 0; i < targets.size(); ++i) {
    for (std::size_t j = i + 1; j < targets.size(); ++j) {
      if (targets[i] == targets[j]) {
        throw InvalidArgument("parameter " + std::string(to_string(targets[i])) +
                              " is locked more than once");
      }
    }
    for (const auto& a : axes) {
      if (a.parameter == targets[i]) {
        throw InvalidArgument("parameter " + std::string(to_string(targets[i])) +
                              " is both swept and locked");
      }
    }
  }
  (void)detail::effective_locks(*this);
}

/// Applies axis values and locks to the base parameters.
inline CycleParameters resolve_point(const SweepSpec& spec, std::span<const double> axis_values) {
  CycleParameters p = spec.base;
  auto locks = detail::effective_locks(spec);
  for (std::size_t k = 0; k < spec.axes.size(); ++k) {
    const auto param = spec.axes[k].parameter;
    if (is_ratio(param)) {
      for (auto& lock : locks) {
        if (lock.target == detail::ratio_target(param)) lock.factor = axis_values[k];
      }
    } else {
      field(p, param) = axis_values[k];
    }
  }
  for (const auto& lock : locks) {
    field(p, lock.target) = lock.factor * field(p, lock.source);
  }
  return p;
}

inline OttoCycleSpec make_cycle_spec(const CycleParameters& p, const TruncationPolicy& policy) {
  return OttoCycleSpec(KerrSpectrum(p.omega_c, p.kerr_c), KerrSpectrum(p.omega_h, p.kerr_h),
                       InverseTemperature::from_temperature(p.temperature_c),
                       InverseTemperature::from_temperature(p.temperature_h), policy);
}

struct SweepRecord {
  std::vector<double> axis_values;
  CycleParameters parameters;
  std::optional<CycleResult> result;
  /// Set when the point failed; the row is kept.
  std::optional<std::string> error;
  double tail_bound = 0.0;
  std::int64_t truncation = 0;
};

inline SweepRecord evaluate_point(const SweepSpec& spec, std::vector<double> axis_values) {
  SweepRecord rec;
  rec.parameters = resolve_point(spec, axis_values);
  rec.axis_values = std::move(axis_values);
  try {
    auto result = evaluate_cycle(make_cycle_spec(rec.parameters, spec.truncation));
    rec.tail_bound = result.tail_bound;
    rec.truncation = result.population_overlap_truncation;
    rec.result = result;
  } catch (const TruncationNotConverged& e) {
    rec.error = "truncation_error";
    rec.tail_bound = e.achieved_tail_bound();
    rec.truncation = e.truncation();
  }
  return rec;
}

inline unsigned resolve_thread_count(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Calls task(i) for i in [0, count) on up to `threads` workers.
/// Each index is visited exactly once; callers write into slot i only.
template <class Task>
void parallel_for(std::size_t count, unsigned threads, Task&& task) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(resolve_thread_count(threads), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count || failed.load(std::memory_order_relaxed)) return;
      try {
        task(i);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

/// One record per grid point, ordered lexicographically by axis index
/// (first axis slowest). Output does not depend on `threads`.
inline std::vector<SweepRecord> run_sweep(const SweepSpec& spec, unsigned threads = 1) {
  spec.validate();
  std::vector<SweepRecord> records(spec.point_count());
  parallel_for(records.size(), threads, [&](std::size_t i) {
    records[i] = evaluate_point(spec, spec.axis_values(i));
  });
  return records;
}

enum class Objective { Efficiency, Cop };

struct MaximizeDiagnostics {
  std::size_t evaluations = 0;
  std::size_t rounds = 0;
  std::size_t coarse_feasible = 0;
  double coarse_best = 0.0;
  bool converged = false;  // stopped on the relative-change criterion
};

struct MaximizeResult {
  SweepRecord best;
  double best_value = 0.0;
  MaximizeDiagnostics diagnostics;
};

struct MaximizeOptions {
  double shrink = 3.0;
  std::size_t max_rounds = 12;
  double relative_change = 1e-9;
  std::size_t refine_points = 7;  // per axis, per round
  unsigned threads = 1;
};

namespace detail {

inline std::optional<double> objective_value(const SweepRecord& rec, Objective objective,
                                             Regime required) {
  if (!rec.result || rec.result->regime != required) return std::nullopt;
  return objective == Objective::Efficiency ? rec.result->efficiency : rec.result->cop;
}

// Works in log space for log axes so refinement stays geometric.
inline double to_search(const Axis& a, double x) {
  return a.spacing == Spacing::Log ? std::log(x) : x;
}
inline double from_search(const Axis& a, double u) {
  return a.spacing == Spacing::Log ? std::exp(u) : u;
}

}  // namespace detail

/// Coarse scan of the region's grid keeping only points in `required`
/// regime, then repeated local re-gridding around the incumbent with the
/// half-width divided by options.shrink each round.
inline MaximizeResult maximize(Objective objective, const SweepSpec& region, Regime required,
                               const MaximizeOptions& options = {}) {
  const bool consistent = (objective == Objective::Efficiency && required == Regime::Engine) ||
                          (objective == Objective::Cop && required == Regime::Refrigerator);
  if (!consistent) {
    throw InvalidArgument("objective does not match the required regime");
  }
  region.validate();

  MaximizeResult out;
  std::optional<double> best_value;
  auto consider = [&](std::vector<SweepRecord>& records) {
    out.diagnostics.evaluations += records.size();
    bool improved = false;
    for (auto& rec : records) {
      const auto v = detail::objective_value(rec, objective, required);
      if (v && (!best_value || *v > *best_value)) {
        best_value = v;
        out.best = std::move(rec);
        improved = true;
      }
    }
    return improved;
  };

  auto coarse = run_sweep(region, options.threads);
  for (const auto& rec : coarse) {
    if (detail::objective_value(rec, objective, required)) ++out.diagnostics.coarse_feasible;
  }
  consider(coarse);
  if (!best_value) {
    throw Infeasible("no grid point satisfies the " + std::string(to_string(required)) +
                     " regime");
  }
  out.diagnostics.coarse_best = *best_value;

  std::vector<double> half_width(region.axes.size());
  for (std::size_t k = 0; k < region.axes.size(); ++k) {
    const auto& a = region.axes[k];
    half_width[k] = (detail::to_search(a, a.stop) - detail::to_search(a, a.start)) /
                    static_cast<double>(a.count - 1);
  }

  for (std::size_t round = 0; round < options.max_rounds && !region.axes.empty(); ++round) {
    SweepSpec local = region;
    for (std::size_t k = 0; k < region.axes.size(); ++k) {
      const auto& a = region.axes[k];
      const double centre = detail::to_search(a, out.best.axis_values[k]);
      const double lo = std::max(detail::to_search(a, a.start), centre - half_width[k]);
      const double hi = std::min(detail::to_search(a, a.stop), centre + half_width[k]);
      auto& axis = local.axes[k];
      axis.start = detail::from_search(a, lo);
      axis.stop = detail::from_search(a, hi);
      axis.count = std::max<std::size_t>(options.refine_points, 3);
      if (!(axis.start < axis.stop)) {
        // collapsed: keep a 2-point axis on the incumbent
        axis.stop = std::nextafter(axis.start, std::numeric_limits<double>::infinity());
        axis.count = 2;
      }
      half_width[k] /= options.shrink;
    }
    const double previous = *best_value;
    auto records = run_sweep(local, options.threads);
    consider(records);
    ++out.diagnostics.rounds;
    if (std::abs(*best_value - previous) <= options.relative_change * std::abs(previous)) {
      out.diagnostics.converged = true;
      break;
    }
  }
  out.best_value = *best_value;
  return out;
}

}  // namespace kerr_otto
