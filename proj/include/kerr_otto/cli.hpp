#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "kerr_otto/cycle.hpp"
#include "kerr_otto/io.hpp"
#include "kerr_otto/presets.hpp"
#include "kerr_otto/sweep.hpp"
#include "kerr_otto/units.hpp"

namespace kerr_otto::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Bad invocation; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// --help was given; what() holds the rendered help text.
class HelpRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Mode { Point, Sweep, Figure, Optimize };

struct RunConfig {
  Mode mode = Mode::Point;
  io::Format format = io::Format::Csv;
  std::optional<std::string> out_path;
  TruncationPolicy truncation;
  unsigned threads = 0;

  SweepSpec spec;  // point, sweep, optimize
  std::optional<std::string> replay_path;
  std::optional<FigureId> figure;
  std::size_t figure_points = kDefaultFigurePoints;
  Objective objective = Objective::Efficiency;
};

namespace detail {

// Raw flag values before unit resolution.
struct RawOptions {
  std::string format = "csv";
  std::string out;
  double tail_tol = TruncationPolicy{}.tail_tolerance;
  std::int64_t n_cap = TruncationPolicy{}.level_cap;
  unsigned threads = 0;

  std::string omega_h, omega_h_ghz;
  std::string omega_c, omega_c_ghz, omega_c_ratio;
  std::string kh, kh_over_omegah;
  std::string kc, kc_over_omegac;
  std::string th, th_kelvin, th_dimensionless;
  std::string tc, tc_kelvin, tc_dimensionless, tc_ratio;
  std::vector<std::string> axes;

  std::string replay;
  std::string figure;
  std::size_t points = kDefaultFigurePoints;
  std::string objective = "efficiency";
};

inline void add_output_options(CLI::App* app, RawOptions& raw) {
  app->add_option("--format", raw.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--out", raw.out, "output path (default stdout)");
  app->add_option("--tail-tol", raw.tail_tol, "certified tail-mass tolerance");
  app->add_option("--n-cap", raw.n_cap, "hard cap on Fock levels");
  app->add_option("--threads", raw.threads, "worker threads, 0 = auto");
}

inline void add_parameter_options(CLI::App* app, RawOptions& raw) {
  auto* wh = app->add_option("--omega-h", raw.omega_h, "hot frequency with unit (GHz, rad/s)");
  auto* wh_ghz = app->add_option("--omega-h-ghz", raw.omega_h_ghz, "hot frequency nu_h in GHz");
  wh->excludes(wh_ghz);

  auto* wc = app->add_option("--omega-c", raw.omega_c, "cold frequency with unit (GHz, rad/s, wh)");
  auto* wc_ghz = app->add_option("--omega-c-ghz", raw.omega_c_ghz, "cold frequency nu_c in GHz");
  auto* wc_ratio = app->add_option("--omega-c-ratio", raw.omega_c_ratio, "lock omega_c = r omega_h");
  wc->excludes(wc_ghz)->excludes(wc_ratio);
  wc_ghz->excludes(wc_ratio);

  auto* kh = app->add_option("--kh", raw.kh, "hot Kerr K_h with unit (GHz, rad/s, wh)");
  auto* kh_r = app->add_option("--kh-over-omegah", raw.kh_over_omegah, "lock K_h = r omega_h");
  kh->excludes(kh_r);
  auto* kc = app->add_option("--kc", raw.kc, "cold Kerr K_c with unit (GHz, rad/s, wh)");
  auto* kc_r = app->add_option("--kc-over-omegac", raw.kc_over_omegac, "lock K_c = r omega_c");
  kc->excludes(kc_r);

  auto* th = app->add_option("--th", raw.th, "hot temperature with unit (K, rad/s, wh)");
  auto* th_k = app->add_option("--th-kelvin", raw.th_kelvin, "hot temperature in kelvin");
  auto* th_d = app->add_option("--th-dimensionless", raw.th_dimensionless, "k_B T_h / hbar omega_h");
  th->excludes(th_k)->excludes(th_d);
  th_k->excludes(th_d);

  auto* tc = app->add_option("--tc", raw.tc, "cold temperature with unit (K, rad/s, wh)");
  auto* tc_k = app->add_option("--tc-kelvin", raw.tc_kelvin, "cold temperature in kelvin");
  auto* tc_d = app->add_option("--tc-dimensionless", raw.tc_dimensionless, "k_B T_c / hbar omega_h");
  auto* tc_r = app->add_option("--tc-ratio", raw.tc_ratio, "lock T_c = r T_h");
  tc->excludes(tc_k)->excludes(tc_d)->excludes(tc_r);
  tc_k->excludes(tc_d)->excludes(tc_r);
  tc_d->excludes(tc_r);
}

inline void add_axis_option(CLI::App* app, RawOptions& raw) {
  app->add_option("--axis", raw.axes,
                  "PARAM:START:STOP:COUNT[:linear|log]; PARAM in T_h, T_c, omega_c, omega_h, "
                  "K_c, K_h, ratio:T_c/T_h, ratio:omega_c/omega_h")
      ->take_all()
      ->allow_extra_args(false);
}

inline double bare_number(const std::string& text, const std::string& flag) {
  const auto v = units::parse_number(text);
  if (!v) throw UsageError("option " + flag + ": '" + text + "' is not a number");
  return *v;
}

inline units::Quantity quantity_of(Parameter p) {
  return (p == Parameter::TemperatureHot || p == Parameter::TemperatureCold)
             ? units::Quantity::Temperature
             : units::Quantity::Frequency;
}

inline double quantity(const std::string& text, units::Quantity kind,
                       std::optional<double> omega_h, const std::string& flag) {
  try {
    return units::parse_quantity(text, kind, omega_h);
  } catch (const units::UnitError& e) {
    throw UsageError("option " + flag + ": " + e.what());
  }
}

inline Axis parse_axis(const std::string& text, std::optional<double> omega_h) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (!parts.empty() && parts.front() == "ratio" && parts.size() > 1) {
    parts[1] = "ratio:" + parts[1];
    parts.erase(parts.begin());
  }
  if (parts.size() != 4 && parts.size() != 5) {
    throw UsageError("option --axis: expected PARAM:START:STOP:COUNT[:spacing], got '" + text + "'");
  }
  const auto param = parse_parameter(parts[0]);
  if (!param) throw UsageError("option --axis: unknown parameter '" + parts[0] + "'");
  Axis axis;
  axis.parameter = *param;
  if (is_ratio(*param)) {
    axis.start = bare_number(parts[1], "--axis");
    axis.stop = bare_number(parts[2], "--axis");
  } else {
    axis.start = quantity(parts[1], quantity_of(*param), omega_h, "--axis");
    axis.stop = quantity(parts[2], quantity_of(*param), omega_h, "--axis");
  }
  const auto count = bare_number(parts[3], "--axis");
  if (!(count >= 2 && count == std::floor(count) && count < 1e7)) {
    throw UsageError("option --axis: point count must be an integer >= 2");
  }
  axis.count = static_cast<std::size_t>(count);
  if (parts.size() == 5) {
    if (parts[4] == "log") {
      axis.spacing = Spacing::Log;
    } else if (parts[4] == "linear") {
      axis.spacing = Spacing::Linear;
    } else {
      throw UsageError("option --axis: spacing must be linear or log, got '" + parts[4] + "'");
    }
  }
  try {
    axis.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(std::string("option --axis: ") + e.what());
  }
  return axis;
}

inline SweepSpec resolve_parameters(const RawOptions& raw, bool axes_allowed) {
  SweepSpec spec;
  std::optional<double> omega_h;
  if (!raw.omega_h_ghz.empty()) omega_h = units::ghz_to_angular(bare_number(raw.omega_h_ghz, "--omega-h-ghz"));
  if (!raw.omega_h.empty()) omega_h = quantity(raw.omega_h, units::Quantity::Frequency, std::nullopt, "--omega-h");

  // Provisional axes parse to know which parameters are swept; 'wh' needs a fixed omega_h.
  std::vector<std::string> swept;
  for (const auto& text : raw.axes) {
    const auto head = text.rfind("ratio:", 0) == 0 ? text.substr(0, text.find(':', 6))
                                                    : text.substr(0, text.find(':'));
    swept.push_back(head);
  }
  auto is_swept = [&](std::string_view name) {
    return std::find(swept.begin(), swept.end(), name) != swept.end();
  };
  const std::optional<double> wh_unit = is_swept("omega_h") ? std::nullopt : omega_h;

  if (!axes_allowed && !raw.axes.empty()) throw UsageError("--axis is not valid in this mode");
  for (const auto& text : raw.axes) spec.axes.push_back(parse_axis(text, wh_unit));
  if (spec.axes.size() > 2) throw UsageError("option --axis: at most two axes");

  auto require = [&](bool present, std::string_view param, const std::string& flags) {
    if (!present && !is_swept(param)) {
      throw UsageError("missing " + flags + " (or a " + std::string(param) + " axis)");
    }
  };
  auto& b = spec.base;

  require(omega_h.has_value(), "omega_h", "--omega-h/--omega-h-ghz");
  b.omega_h = omega_h.value_or(0.0);

  if (!raw.omega_c_ratio.empty()) {
    spec.locks.push_back({Parameter::OmegaCold, Parameter::OmegaHot,
                          bare_number(raw.omega_c_ratio, "--omega-c-ratio")});
  } else if (!raw.omega_c_ghz.empty()) {
    b.omega_c = units::ghz_to_angular(bare_number(raw.omega_c_ghz, "--omega-c-ghz"));
  } else if (!raw.omega_c.empty()) {
    b.omega_c = quantity(raw.omega_c, units::Quantity::Frequency, wh_unit, "--omega-c");
  } else if (!is_swept("ratio:omega_c/omega_h")) {
    require(false, "omega_c", "--omega-c/--omega-c-ghz/--omega-c-ratio");
  }

  if (!raw.kh_over_omegah.empty()) {
    spec.locks.push_back({Parameter::KerrHot, Parameter::OmegaHot,
                          bare_number(raw.kh_over_omegah, "--kh-over-omegah")});
  } else {
    require(!raw.kh.empty(), "K_h", "--kh/--kh-over-omegah");
    if (!raw.kh.empty()) b.kerr_h = quantity(raw.kh, units::Quantity::Frequency, wh_unit, "--kh");
  }
  if (!raw.kc_over_omegac.empty()) {
    spec.locks.push_back({Parameter::KerrCold, Parameter::OmegaCold,
                          bare_number(raw.kc_over_omegac, "--kc-over-omegac")});
  } else {
    require(!raw.kc.empty(), "K_c", "--kc/--kc-over-omegac");
    if (!raw.kc.empty()) b.kerr_c = quantity(raw.kc, units::Quantity::Frequency, wh_unit, "--kc");
  }

  auto temperature = [&](const std::string& tagged, const std::string& kelvin,
                         const std::string& dimensionless, const std::string& prefix)
      -> std::optional<double> {
    if (!tagged.empty()) return quantity(tagged, units::Quantity::Temperature, wh_unit, "--" + prefix);
    if (!kelvin.empty()) return units::kelvin_to_angular(bare_number(kelvin, "--" + prefix + "-kelvin"));
    if (!dimensionless.empty()) {
      if (!wh_unit) throw UsageError("--" + prefix + "-dimensionless needs a fixed omega_h");
      return bare_number(dimensionless, "--" + prefix + "-dimensionless") * *wh_unit;
    }
    return std::nullopt;
  };
  const auto th = temperature(raw.th, raw.th_kelvin, raw.th_dimensionless, "th");
  require(th.has_value(), "T_h", "--th/--th-kelvin/--th-dimensionless");
  b.temperature_h = th.value_or(0.0);

  if (!raw.tc_ratio.empty()) {
    spec.locks.push_back({Parameter::TemperatureCold, Parameter::TemperatureHot,
                          bare_number(raw.tc_ratio, "--tc-ratio")});
  } else {
    const auto tc = temperature(raw.tc, raw.tc_kelvin, raw.tc_dimensionless, "tc");
    if (!tc && !is_swept("ratio:T_c/T_h")) {
      require(false, "T_c", "--tc/--tc-kelvin/--tc-dimensionless/--tc-ratio");
    }
    b.temperature_c = tc.value_or(0.0);
  }
  return spec;
}

/// Reads `key = value` lines (# comments) into (key, value) pairs in file order.
inline std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::vector<std::pair<std::string, std::string>> entries;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config " + path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return entries;
}

inline bool flag_given(std::span<const std::string> args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.rfind(flag + "=", 0) == 0;
  });
}

inline std::string describe(const SweepSpec& spec) {
  std::ostringstream os;
  const auto& b = spec.base;
  os << "# resolved parameters (natural units, hbar = k_B = 1, rad/s)\n"
     << "#   omega_h = " << io::format_double(b.omega_h) << "\n"
     << "#   omega_c = " << io::format_double(b.omega_c) << "\n"
     << "#   K_h     = " << io::format_double(b.kerr_h) << "\n"
     << "#   K_c     = " << io::format_double(b.kerr_c) << "\n"
     << "#   T_h     = " << io::format_double(b.temperature_h) << "\n"
     << "#   T_c     = " << io::format_double(b.temperature_c) << "\n";
  for (const auto& l : spec.locks) {
    os << "#   lock " << to_string(l.target) << " = " << io::format_double(l.factor) << " * "
       << to_string(l.source) << "\n";
  }
  for (const auto& a : spec.axes) {
    os << "#   axis " << to_string(a.parameter) << " " << io::format_double(a.start) << " .. "
       << io::format_double(a.stop) << " (" << a.count << " points, "
       << (a.spacing == Spacing::Log ? "log" : "linear") << ")\n";
  }
  return os.str();
}

}  // namespace detail

/// Parses argv (without the program name). A `--config PATH` file supplies
/// defaults for flags absent from argv; argv always wins. Throws UsageError.
inline RunConfig parse_config(std::vector<std::string> args, std::ostream& diag) {
  detail::RawOptions raw;
  CLI::App app{"Quasi-static quantum Otto cycle of a Kerr-nonlinear oscillator", "kerr-otto"};
  app.require_subcommand(1, 1);
  std::string config_path;

  auto* point = app.add_subcommand("point", "evaluate one cycle");
  auto* sweep = app.add_subcommand("sweep", "evaluate a 1-D or 2-D parameter grid");
  auto* figure = app.add_subcommand("figure", "reproduce a figure preset (fig2..fig5)");
  auto* optimize = app.add_subcommand("optimize", "maximize efficiency or COP over a box");
  for (auto* sub : {point, sweep, figure, optimize}) {
    detail::add_output_options(sub, raw);
    sub->add_option("--config", config_path, "key = value defaults file");
  }
  for (auto* sub : {point, sweep, optimize}) detail::add_parameter_options(sub, raw);
  for (auto* sub : {sweep, optimize}) detail::add_axis_option(sub, raw);
  sweep->add_option("--replay", raw.replay, "re-run the sweep stored in a JSON output file");
  figure->add_option("preset", raw.figure, "fig2, fig3, fig4 or fig5")
      ->required()
      ->check(CLI::IsMember({"fig2", "fig3", "fig4", "fig5"}));
  figure->add_option("--points", raw.points, "temperature points per curve")
      ->check(CLI::Range(std::size_t{2}, std::size_t{100000}));
  optimize->add_option("--objective", raw.objective, "efficiency or cop")
      ->check(CLI::IsMember({"efficiency", "cop"}));

  // Splice config-file entries in as flags, unless argv already sets them.
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
  }
  if (!config_path.empty() && !args.empty()) {
    std::vector<std::string> extra;
    for (const auto& [key, value] : detail::read_config_file(config_path)) {
      const std::string flag = "--" + key;
      if (key == "config") throw UsageError("config file may not set 'config'");
      if (detail::flag_given(args, flag)) continue;
      extra.push_back(flag);
      extra.push_back(value);
    }
    args.insert(args.end(), extra.begin(), extra.end());
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    std::ostringstream text;
    std::ostringstream ignored;
    app.exit(e, text, ignored);
    throw HelpRequested(text.str());
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  RunConfig cfg;
  cfg.format = raw.format == "json" ? io::Format::Json : io::Format::Csv;
  if (!raw.out.empty()) cfg.out_path = raw.out;
  cfg.truncation.tail_tolerance = raw.tail_tol;
  cfg.truncation.level_cap = raw.n_cap;
  cfg.threads = raw.threads;
  try {
    cfg.truncation.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(std::string("--tail-tol/--n-cap: ") + e.what());
  }

  if (figure->parsed()) {
    cfg.mode = Mode::Figure;
    cfg.figure = parse_figure(raw.figure);
    cfg.figure_points = raw.points;
    diag << "# figure preset " << raw.figure << " (" << figure_preset(*cfg.figure).plotted << ")\n";
    for (const auto& s : figure_preset(*cfg.figure).curve_specs(cfg.truncation, cfg.figure_points)) {
      diag << detail::describe(s);
    }
    return cfg;
  }
  if (sweep->parsed() && !raw.replay.empty()) {
    cfg.mode = Mode::Sweep;
    cfg.replay_path = raw.replay;
    diag << "# replaying " << raw.replay << "\n";
    return cfg;
  }

  cfg.mode = point->parsed() ? Mode::Point : sweep->parsed() ? Mode::Sweep : Mode::Optimize;
  cfg.spec = detail::resolve_parameters(raw, cfg.mode != Mode::Point);
  cfg.spec.truncation = cfg.truncation;
  if (cfg.mode == Mode::Sweep && cfg.spec.axes.empty()) {
    throw UsageError("sweep needs at least one --axis");
  }
  if (cfg.mode == Mode::Optimize) {
    cfg.objective = raw.objective == "cop" ? Objective::Cop : Objective::Efficiency;
  }
  try {
    cfg.spec.validate();
    if (cfg.mode == Mode::Point) {
      (void)make_cycle_spec(resolve_point(cfg.spec, {}), cfg.truncation);
    }
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  diag << detail::describe(cfg.spec);
  return cfg;
}

namespace detail {

inline nlohmann::json base_metadata(const RunConfig& cfg, std::string_view mode) {
  nlohmann::json meta;
  meta["mode"] = mode;
  meta["preset"] = nullptr;
  meta["truncation"] = io::truncation_json(cfg.truncation);
  return meta;
}

inline std::vector<SweepRecord> run_specs(const std::vector<SweepSpec>& specs, unsigned threads) {
  std::vector<SweepRecord> rows;
  for (const auto& s : specs) {
    auto part = run_sweep(s, threads);
    rows.insert(rows.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return rows;
}

/// Largest figure of merit over the given rows, per curve block.
inline nlohmann::json curve_peaks(const FigurePreset& preset, std::span<const SweepRecord> rows,
                                  std::size_t points) {
  nlohmann::json peaks = nlohmann::json::array();
  for (std::size_t c = 0; c < preset.curves.size(); ++c) {
    std::optional<double> best;
    std::optional<double> at;
    for (std::size_t i = c * points; i < (c + 1) * points && i < rows.size(); ++i) {
      if (!rows[i].result) continue;
      const auto& r = *rows[i].result;
      const auto v = r.efficiency ? r.efficiency : r.cop;
      if (v && (!best || *v > *best)) {
        best = v;
        at = rows[i].parameters.temperature_h;
      }
    }
    nlohmann::json entry{{"curve", preset.curves[c].label}};
    entry["max_figure_of_merit"] = best ? nlohmann::json(*best) : nlohmann::json(nullptr);
    entry["at_T_h"] = at ? nlohmann::json(*at) : nlohmann::json(nullptr);
    peaks.push_back(entry);
  }
  return peaks;
}

}  // namespace detail

/// Runs a parsed configuration; returns the process exit status.
inline int execute(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  switch (cfg.mode) {
    case Mode::Figure: {
      const auto& preset = figure_preset(*cfg.figure);
      const auto specs = preset.curve_specs(cfg.truncation, cfg.figure_points);
      const auto rows = detail::run_specs(specs, cfg.threads);
      auto meta = detail::base_metadata(cfg, "figure");
      meta["preset"] = preset.name;
      meta["plotted"] = preset.plotted;
      meta["temperature_axis"] = {{"quantity", "k_B T_h / hbar omega_h"},
                                  {"start", preset.dimensionless_th_start},
                                  {"stop", preset.dimensionless_th_stop},
                                  {"points", cfg.figure_points},
                                  {"spacing", "log"}};
      meta["curves"] = nlohmann::json::array();
      for (const auto& c : preset.curves) meta["curves"].push_back(c.label);
      meta["runs"] = nlohmann::json::array();
      for (const auto& s : specs) meta["runs"].push_back(io::sweep_spec_json(s));
      const auto& b = preset.base;
      meta["eta_otto"] = 1.0 - b.omega_c / b.omega_h;
      const double tc_ratio = preset.locks.front().factor;
      meta["eta_carnot"] = 1.0 - tc_ratio;
      meta["cop_carnot"] = tc_ratio / (1.0 - tc_ratio);
      meta["peaks"] = detail::curve_peaks(preset, rows, cfg.figure_points);
      if (preset.caption_cop_otto) {
        const double computed = b.omega_c / (b.omega_h - b.omega_c);
        meta["cop_otto"] = computed;
        meta["caption_cop_otto"] = *preset.caption_cop_otto;
        meta["caption_discrepancy"] = std::abs(computed - *preset.caption_cop_otto) > 1e-12;
        for (auto& peak : meta["peaks"]) {
          if (peak["max_figure_of_merit"].is_null()) continue;
          const double best = peak["max_figure_of_merit"].get<double>();
          peak["ratio_to_cop_otto"] = best / computed;
          peak["ratio_to_caption_cop_otto"] = best / *preset.caption_cop_otto;
        }
      } else {
        meta["cop_otto"] = b.omega_c / (b.omega_h - b.omega_c);
      }
      return io::emit(rows, specs.front().axes, cfg.format, cfg.out_path, meta, out, err);
    }
    case Mode::Point:
    case Mode::Sweep: {
      std::vector<SweepSpec> specs;
      if (cfg.replay_path) {
        std::ifstream in(*cfg.replay_path);
        if (!in) {
          err << "error: cannot read " << *cfg.replay_path << "\n";
          return kExitRuntime;
        }
        try {
          const auto doc = nlohmann::json::parse(in);
          for (const auto& run : doc.at("metadata").at("runs")) {
            specs.push_back(io::sweep_spec_from_json(run));
          }
        } catch (const std::exception& e) {
          err << "error: " << *cfg.replay_path << ": " << e.what() << "\n";
          return kExitUsage;
        }
        if (specs.empty()) {
          err << "error: " << *cfg.replay_path << " holds no runs\n";
          return kExitUsage;
        }
        for (auto& s : specs) s.truncation = specs.front().truncation;
      } else {
        specs.push_back(cfg.spec);
      }
      const auto rows = detail::run_specs(specs, cfg.threads);
      auto meta = detail::base_metadata(cfg, cfg.mode == Mode::Point ? "point" : "sweep");
      meta["truncation"] = io::truncation_json(specs.front().truncation);
      meta["runs"] = nlohmann::json::array();
      for (const auto& s : specs) meta["runs"].push_back(io::sweep_spec_json(s));
      return io::emit(rows, specs.front().axes, cfg.format, cfg.out_path, meta, out, err);
    }
    case Mode::Optimize: {
      const Regime required =
          cfg.objective == Objective::Cop ? Regime::Refrigerator : Regime::Engine;
      MaximizeOptions options;
      options.threads = cfg.threads;
      const auto result = maximize(cfg.objective, cfg.spec, required, options);
      const auto& d = result.diagnostics;
      err << "# best " << (cfg.objective == Objective::Cop ? "cop" : "efficiency") << " = "
          << io::format_double(result.best_value) << " after " << d.evaluations
          << " evaluations, " << d.rounds << " refinement rounds (coarse best "
          << io::format_double(d.coarse_best) << ", " << d.coarse_feasible
          << " feasible coarse points)\n";
      auto meta = detail::base_metadata(cfg, "optimize");
      meta["objective"] = cfg.objective == Objective::Cop ? "cop" : "efficiency";
      meta["required_regime"] = to_string(required);
      meta["best_value"] = result.best_value;
      meta["diagnostics"] = {{"evaluations", d.evaluations},
                             {"rounds", d.rounds},
                             {"coarse_feasible", d.coarse_feasible},
                             {"coarse_best", d.coarse_best},
                             {"converged", d.converged}};
      meta["region"] = io::sweep_spec_json(cfg.spec);
      const std::vector<SweepRecord> rows{result.best};
      return io::emit(rows, cfg.spec.axes, cfg.format, cfg.out_path, meta, out, err);
    }
  }
  return kExitRuntime;
}

/// Entry point shared by the executable and the tests.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = parse_config(std::move(args), err);
  } catch (const HelpRequested& help) {
    out << help.what();
    return kExitOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    return execute(cfg, out, err);
  } catch (const Infeasible& e) {
    err << "error: infeasible: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace kerr_otto::cli
