#include <cmath>
#include <initializer_list>
#include <set>
#include <string>

#include "reschaos/error.hpp"
#include "reschaos/experiments.hpp"
#include "reschaos/io.hpp"

namespace reschaos {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::config_error, what); }

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) config_error(where + " must be a JSON object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!keys.contains(key)) config_error("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read_into(const json& obj, const char* key, T& target, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    target = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    config_error("bad value for '" + std::string(key) + "' in " + where + ": " + e.what());
  }
}

template <typename T>
void read_optional(const json& obj, const char* key, std::optional<T>& target, const std::string& where) {
  if (!obj.contains(key) || obj.at(key).is_null()) return;
  T value{};
  read_into(obj, key, value, where);
  target = value;
}

template <typename T>
void put_optional(json& obj, const char* key, const std::optional<T>& value) {
  if (value) obj[key] = *value;
}

json widths_to_json(const WidthRule& rule) {
  return std::visit(
      [](const auto& r) -> json {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, EqualWidths>) {
          return {{"rule", "equal"}, {"delta", r.delta}};
        } else if constexpr (std::is_same_v<T, LogUniformWidths>) {
          return {{"rule", "log_uniform"}, {"min", r.delta_min}, {"max", r.delta_max}};
        } else {
          return {{"rule", "explicit"}, {"values", r.values}};
        }
      },
      rule);
}

WidthRule widths_from_json(const json& j) {
  const std::string where = "ensemble.widths";
  if (!j.is_object() || !j.contains("rule")) config_error(where + " needs a 'rule'");
  const auto rule = j.at("rule").get<std::string>();
  if (rule == "equal") {
    check_keys(j, {"rule", "delta"}, where);
    EqualWidths w;
    read_into(j, "delta", w.delta, where);
    return w;
  }
  if (rule == "log_uniform") {
    check_keys(j, {"rule", "min", "max"}, where);
    LogUniformWidths w;
    read_into(j, "min", w.delta_min, where);
    read_into(j, "max", w.delta_max, where);
    return w;
  }
  if (rule == "explicit") {
    check_keys(j, {"rule", "values"}, where);
    ExplicitWidths w;
    read_into(j, "values", w.values, where);
    return w;
  }
  config_error("unknown width rule '" + rule + "'");
}

}  // namespace

std::string_view to_string(ExperimentKind kind) noexcept {
  switch (kind) {
    case ExperimentKind::brody_sweep: return "brody_sweep";
    case ExperimentKind::a_scan: return "a_scan";
    case ExperimentKind::spacing_hist: return "spacing_hist";
    case ExperimentKind::number_variance: return "number_variance";
    case ExperimentKind::phase_grid: return "phase_grid";
  }
  return "unknown";
}

ExperimentKind experiment_kind_from_string(std::string_view name) {
  for (auto kind : {ExperimentKind::brody_sweep, ExperimentKind::a_scan, ExperimentKind::spacing_hist,
                    ExperimentKind::number_variance, ExperimentKind::phase_grid}) {
    if (to_string(kind) == name) return kind;
  }
  config_error("unknown experiment kind '" + std::string(name) + "'");
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  c.ensemble.n = 50;
  c.ensemble.b_max = 50.0;
  c.ensemble.realization_count = 25;
  c.ensemble.widths = EqualWidths{2.0};
  switch (kind) {
    case ExperimentKind::brody_sweep:
      c.widths = {0.1, 0.2, 0.5, 1.0, 1.5, 2.0, 2.5, 5.0, 10.0};
      break;
    case ExperimentKind::number_variance:
      c.widths = {0.2, 0.5, 1.0, 1.5, 2.5};
      for (int i = 1; i <= 20; ++i) c.number_variance.lengths.push_back(0.5 * i);
      break;
    case ExperimentKind::a_scan:
    case ExperimentKind::spacing_hist:
    case ExperimentKind::phase_grid:
      break;
  }
  return c;
}

void ExperimentConfig::validate() const {
  try {
    ensemble.validate();
    (void)background.make();
  } catch (const Error& e) {
    config_error(e.what());
  }
  for (double w : widths) {
    if (!(w > 0.0) || !std::isfinite(w)) config_error("swept widths must be positive");
  }
  if ((kind == ExperimentKind::brody_sweep || kind == ExperimentKind::number_variance) && widths.empty()) {
    config_error(std::string(to_string(kind)) + " needs a nonempty 'widths' list");
  }
  if (kind == ExperimentKind::brody_sweep && ensemble.realization_count < 2) {
    config_error("brody_sweep needs at least two realizations");
  }
  if (!(fit.bin_width > 0.0) || !(fit.s_max > fit.bin_width)) config_error("fit needs 0 < bin_width < s_max");
  if (kind == ExperimentKind::number_variance) {
    if (number_variance.lengths.empty()) config_error("number_variance needs window lengths");
    for (std::size_t i = 0; i < number_variance.lengths.size(); ++i) {
      if (!(number_variance.lengths[i] > 0.0)) config_error("window lengths must be positive");
      if (i > 0 && !(number_variance.lengths[i] > number_variance.lengths[i - 1])) {
        config_error("window lengths must be increasing");
      }
    }
    if (!(number_variance.stride > 0.0)) config_error("stride must be positive");
  }
  if (!(scan.points_per_spacing > 0.0)) config_error("scan.points_per_spacing must be positive");
  if (scan.b_lo && scan.b_hi && !(*scan.b_hi > *scan.b_lo)) config_error("scan range is empty");
  if (scan.realization >= ensemble.realization_count) config_error("scan.realization out of range");
  const auto& pg = phase_grid;
  if (!(pg.e_min >= 0.0) || !(pg.e_max >= pg.e_min)) config_error("phase_grid needs 0 <= e_min <= e_max");
  if (pg.e_points < 1) config_error("phase_grid.e_points must be >= 1");
  if (!(pg.b_points_per_spacing > 0.0)) config_error("phase_grid.b_points_per_spacing must be positive");
  if (!(pg.delta_mu_lo >= 0.0) || !(pg.delta_mu_hi > pg.delta_mu_lo)) {
    config_error("phase_grid needs 0 <= delta_mu_lo < delta_mu_hi");
  }
  if (pg.b_lo && pg.b_hi && !(*pg.b_hi > *pg.b_lo)) config_error("phase_grid field range is empty");
  if (pg.realization >= ensemble.realization_count) config_error("phase_grid.realization out of range");
  if (output_dir.empty()) config_error("output_dir must be set");
}

json to_json(const ExperimentConfig& c) {
  json scan = {{"points_per_spacing", c.scan.points_per_spacing}, {"realization", c.scan.realization}};
  put_optional(scan, "b_lo", c.scan.b_lo);
  put_optional(scan, "b_hi", c.scan.b_hi);
  json pg = {
      {"e_min", c.phase_grid.e_min},
      {"e_max", c.phase_grid.e_max},
      {"e_points", c.phase_grid.e_points},
      {"b_points_per_spacing", c.phase_grid.b_points_per_spacing},
      {"delta_mu_lo", c.phase_grid.delta_mu_lo},
      {"delta_mu_hi", c.phase_grid.delta_mu_hi},
      {"realization", c.phase_grid.realization},
  };
  put_optional(pg, "b_lo", c.phase_grid.b_lo);
  put_optional(pg, "b_hi", c.phase_grid.b_hi);
  return {
      {"schema_version", kConfigSchemaVersion},
      {"experiment", to_string(c.kind)},
      {"ensemble",
       {{"n", c.ensemble.n},
        {"b_max", c.ensemble.b_max},
        {"kind", to_string(c.ensemble.kind)},
        {"widths", widths_to_json(c.ensemble.widths)},
        {"master_seed", c.ensemble.master_seed},
        {"realizations", c.ensemble.realization_count}}},
      {"background", {{"r", c.background.r}, {"abar", c.background.abar}, {"ebar", c.background.ebar}}},
      {"widths", c.widths},
      {"fit",
       {{"method", to_string(c.fit.method)},
        {"bin_width", c.fit.bin_width},
        {"s_max", c.fit.s_max},
        {"pooled", c.pooled_fit}}},
      {"number_variance", {{"lengths", c.number_variance.lengths}, {"stride", c.number_variance.stride}}},
      {"scan", scan},
      {"phase_grid", pg},
      {"output_dir", c.output_dir},
  };
}

ExperimentConfig config_from_json(const json& j) {
  check_keys(j, {"schema_version", "experiment", "ensemble", "background", "widths", "fit",
                 "number_variance", "scan", "phase_grid", "output_dir"},
             "config");
  if (!j.contains("schema_version")) config_error("config lacks 'schema_version'");
  if (j.at("schema_version") != kConfigSchemaVersion) {
    config_error("unsupported schema_version " + j.at("schema_version").dump());
  }
  if (!j.contains("experiment") || !j.at("experiment").is_string()) config_error("config lacks 'experiment'");

  ExperimentConfig c = default_config(experiment_kind_from_string(j.at("experiment").get<std::string>()));

  if (j.contains("ensemble")) {
    const auto& e = j.at("ensemble");
    check_keys(e, {"n", "b_max", "kind", "widths", "master_seed", "realizations"}, "ensemble");
    read_into(e, "n", c.ensemble.n, "ensemble");
    read_into(e, "b_max", c.ensemble.b_max, "ensemble");
    if (e.contains("kind")) c.ensemble.kind = ensemble_kind_from_string(e.at("kind").get<std::string>());
    if (e.contains("widths")) c.ensemble.widths = widths_from_json(e.at("widths"));
    read_into(e, "master_seed", c.ensemble.master_seed, "ensemble");
    read_into(e, "realizations", c.ensemble.realization_count, "ensemble");
  }
  if (j.contains("background")) {
    const auto& b = j.at("background");
    check_keys(b, {"r", "abar", "ebar"}, "background");
    read_into(b, "r", c.background.r, "background");
    read_into(b, "abar", c.background.abar, "background");
    read_into(b, "ebar", c.background.ebar, "background");
  }
  read_into(j, "widths", c.widths, "config");
  if (j.contains("fit")) {
    const auto& f = j.at("fit");
    check_keys(f, {"method", "bin_width", "s_max", "pooled"}, "fit");
    if (f.contains("method")) c.fit.method = fit_method_from_string(f.at("method").get<std::string>());
    read_into(f, "bin_width", c.fit.bin_width, "fit");
    read_into(f, "s_max", c.fit.s_max, "fit");
    read_into(f, "pooled", c.pooled_fit, "fit");
  }
  if (j.contains("number_variance")) {
    const auto& nv = j.at("number_variance");
    check_keys(nv, {"lengths", "stride"}, "number_variance");
    read_into(nv, "lengths", c.number_variance.lengths, "number_variance");
    read_into(nv, "stride", c.number_variance.stride, "number_variance");
  }
  if (j.contains("scan")) {
    const auto& s = j.at("scan");
    check_keys(s, {"points_per_spacing", "b_lo", "b_hi", "realization"}, "scan");
    read_into(s, "points_per_spacing", c.scan.points_per_spacing, "scan");
    read_optional(s, "b_lo", c.scan.b_lo, "scan");
    read_optional(s, "b_hi", c.scan.b_hi, "scan");
    read_into(s, "realization", c.scan.realization, "scan");
  }
  if (j.contains("phase_grid")) {
    const auto& p = j.at("phase_grid");
    check_keys(p, {"e_min", "e_max", "e_points", "b_points_per_spacing", "b_lo", "b_hi", "delta_mu_lo",
                   "delta_mu_hi", "realization"},
               "phase_grid");
    auto& pg = c.phase_grid;
    read_into(p, "e_min", pg.e_min, "phase_grid");
    read_into(p, "e_max", pg.e_max, "phase_grid");
    read_into(p, "e_points", pg.e_points, "phase_grid");
    read_into(p, "b_points_per_spacing", pg.b_points_per_spacing, "phase_grid");
    read_optional(p, "b_lo", pg.b_lo, "phase_grid");
    read_optional(p, "b_hi", pg.b_hi, "phase_grid");
    read_into(p, "delta_mu_lo", pg.delta_mu_lo, "phase_grid");
    read_into(p, "delta_mu_hi", pg.delta_mu_hi, "phase_grid");
    read_into(p, "realization", pg.realization, "phase_grid");
  }
  read_into(j, "output_dir", c.output_dir, "config");
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  json j;
  try {
    j = io::read_json_file(path);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::io_error && std::filesystem::exists(path)) config_error(e.what());
    throw;
  }
  return config_from_json(j);
}

}  // namespace reschaos
