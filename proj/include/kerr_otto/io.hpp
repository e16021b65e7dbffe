#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "kerr_otto/sweep.hpp"

namespace kerr_otto::io {

inline constexpr std::string_view kToolName = "kerr-otto";
inline constexpr std::string_view kToolVersion = "1.0.0";

enum class Format { Csv, Json };

/// 17 significant digits: parses back to the same double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

inline const std::vector<std::string>& fixed_columns() {
  static const std::vector<std::string> columns{
      "omega_c", "omega_h", "K_c",      "K_h",      "T_c",        "T_h",
      "W",       "Q_c",     "Q_h",      "regime",   "eta",        "cop",
      "eta_otto", "cop_otto", "eta_carnot", "cop_carnot", "N_trunc", "tail_bound"};
  return columns;
}

inline std::string axis_column(const Axis& a) {
  return "axis:" + std::string(to_string(a.parameter));
}

inline std::vector<std::string> columns(std::span<const Axis> axes) {
  std::vector<std::string> out;
  for (const auto& a : axes) out.push_back(axis_column(a));
  const auto& fixed = fixed_columns();
  out.insert(out.end(), fixed.begin(), fixed.end());
  return out;
}

/// Cell values of one row, in column order. Absent values are nullopt.
using Cell = std::optional<std::variant<double, std::string, std::int64_t>>;

inline std::vector<Cell> row_cells(const SweepRecord& rec) {
  std::vector<Cell> cells;
  for (double v : rec.axis_values) cells.emplace_back(v);
  const auto& p = rec.parameters;
  for (double v : {p.omega_c, p.omega_h, p.kerr_c, p.kerr_h, p.temperature_c, p.temperature_h}) {
    cells.emplace_back(v);
  }
  auto opt = [](const std::optional<double>& v) -> Cell {
    if (v) return Cell{*v};
    return std::nullopt;
  };
  if (rec.result) {
    const auto& r = *rec.result;
    cells.emplace_back(r.work);
    cells.emplace_back(r.heat_cold);
    cells.emplace_back(r.heat_hot);
    cells.emplace_back(std::string(to_string(r.regime)));
    cells.push_back(opt(r.efficiency));
    cells.push_back(opt(r.cop));
    cells.emplace_back(r.otto_efficiency_baseline);
    cells.push_back(opt(r.otto_cop_baseline));
    cells.emplace_back(r.carnot_efficiency);
    cells.emplace_back(r.carnot_cop);
  } else {
    cells.emplace_back(std::nullopt);
    cells.emplace_back(std::nullopt);
    cells.emplace_back(std::nullopt);
    cells.emplace_back(rec.error.value_or("truncation_error"));
    for (int i = 0; i < 6; ++i) cells.emplace_back(std::nullopt);
  }
  cells.emplace_back(rec.truncation);
  cells.emplace_back(rec.tail_bound);
  return cells;
}

inline void write_csv(std::ostream& os, std::span<const SweepRecord> records,
                      std::span<const Axis> axes) {
  const auto header = columns(axes);
  for (std::size_t i = 0; i < header.size(); ++i) {
    os << (i ? "," : "") << header[i];
  }
  os << '\n';
  for (const auto& rec : records) {
    const auto cells = row_cells(rec);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os << ',';
      if (!cells[i]) continue;
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
              os << format_double(v);
            } else {
              os << v;
            }
          },
          *cells[i]);
    }
    os << '\n';
  }
}

inline nlohmann::json record_json(const SweepRecord& rec, std::span<const Axis> axes) {
  const auto names = columns(axes);
  const auto cells = row_cells(rec);
  nlohmann::json obj = nlohmann::json::object();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!cells[i]) {
      obj[names[i]] = nullptr;
      continue;
    }
    std::visit([&](const auto& v) { obj[names[i]] = v; }, *cells[i]);
  }
  return obj;
}

inline nlohmann::json truncation_json(const TruncationPolicy& t) {
  return {{"tail_tolerance", t.tail_tolerance},
          {"level_cap", t.level_cap},
          {"initial_levels", t.initial_levels}};
}

inline nlohmann::json sweep_spec_json(const SweepSpec& spec) {
  const auto& b = spec.base;
  nlohmann::json j;
  j["base"] = {{"omega_c", b.omega_c}, {"omega_h", b.omega_h}, {"K_c", b.kerr_c},
               {"K_h", b.kerr_h},     {"T_c", b.temperature_c}, {"T_h", b.temperature_h}};
  j["truncation"] = truncation_json(spec.truncation);
  j["axes"] = nlohmann::json::array();
  for (const auto& a : spec.axes) {
    j["axes"].push_back({{"parameter", to_string(a.parameter)},
                         {"start", a.start},
                         {"stop", a.stop},
                         {"count", a.count},
                         {"spacing", a.spacing == Spacing::Log ? "log" : "linear"}});
  }
  j["locks"] = nlohmann::json::array();
  for (const auto& l : spec.locks) {
    j["locks"].push_back(
        {{"target", to_string(l.target)}, {"source", to_string(l.source)}, {"factor", l.factor}});
  }
  return j;
}

inline Parameter parameter_from_json(const nlohmann::json& j) {
  const auto name = j.get<std::string>();
  const auto p = parse_parameter(name);
  if (!p) throw InvalidArgument("unknown parameter '" + name + "'");
  return *p;
}

inline SweepSpec sweep_spec_from_json(const nlohmann::json& j) {
  SweepSpec spec;
  const auto& b = j.at("base");
  spec.base = {b.at("omega_c").get<double>(), b.at("omega_h").get<double>(),
               b.at("K_c").get<double>(),     b.at("K_h").get<double>(),
               b.at("T_c").get<double>(),     b.at("T_h").get<double>()};
  const auto& t = j.at("truncation");
  spec.truncation.tail_tolerance = t.at("tail_tolerance").get<double>();
  spec.truncation.level_cap = t.at("level_cap").get<std::int64_t>();
  spec.truncation.initial_levels = t.at("initial_levels").get<std::int64_t>();
  for (const auto& a : j.at("axes")) {
    const auto spacing = a.at("spacing").get<std::string>();
    if (spacing != "log" && spacing != "linear") {
      throw InvalidArgument("unknown spacing '" + spacing + "'");
    }
    spec.axes.push_back({parameter_from_json(a.at("parameter")), a.at("start").get<double>(),
                         a.at("stop").get<double>(), a.at("count").get<std::size_t>(),
                         spacing == "log" ? Spacing::Log : Spacing::Linear});
  }
  for (const auto& l : j.at("locks")) {
    spec.locks.push_back({parameter_from_json(l.at("target")), parameter_from_json(l.at("source")),
                          l.at("factor").get<double>()});
  }
  spec.validate();
  return spec;
}

/// {"metadata": ..., "records": [...]}
inline nlohmann::json document_json(std::span<const SweepRecord> records,
                                    std::span<const Axis> axes, const nlohmann::json& metadata) {
  nlohmann::json doc;
  doc["metadata"] = metadata;
  doc["metadata"]["tool"] = kToolName;
  doc["metadata"]["version"] = kToolVersion;
  doc["metadata"]["columns"] = columns(axes);
  doc["records"] = nlohmann::json::array();
  for (const auto& rec : records) doc["records"].push_back(record_json(rec, axes));
  return doc;
}

inline std::string render(std::span<const SweepRecord> records, std::span<const Axis> axes,
                          Format format, const nlohmann::json& metadata) {
  std::ostringstream os;
  if (format == Format::Csv) {
    write_csv(os, records, axes);
  } else {
    os << document_json(records, axes, metadata).dump(2) << '\n';
  }
  return os.str();
}

/// Writes to `path` (via a sibling temporary that is renamed into place) or
/// to `out` when no path is given. Returns 0 on success, 1 on I/O failure;
/// a failed write leaves no partial file behind.
inline int emit(std::span<const SweepRecord> records, std::span<const Axis> axes, Format format,
                const std::optional<std::string>& path, const nlohmann::json& metadata,
                std::ostream& out, std::ostream& err) {
  const std::string text = render(records, axes, format, metadata);
  if (!path) {
    out << text;
    out.flush();
    if (!out) {
      err << "error: failed to write output\n";
      return 1;
    }
    return 0;
  }
  const std::filesystem::path target(*path);
  std::filesystem::path partial = target;
  partial += ".partial";
  {
    std::ofstream file(partial, std::ios::binary | std::ios::trunc);
    if (file) {
      file << text;
      file.flush();
    }
    if (!file) {
      std::error_code ignored;
      std::filesystem::remove(partial, ignored);
      err << "error: cannot write " << target.string() << '\n';
      return 1;
    }
  }
  std::error_code ec;
  std::filesystem::rename(partial, target, ec);
  if (ec) {
    std::filesystem::remove(partial, ec);
    err << "error: cannot write " << target.string() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace kerr_otto::io
