#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "core.hpp"
#include "fdm.hpp"
#include "multi_layer.hpp"

namespace echolab {

/// Fixed float formatting for all emitted data: 17 significant digits.
inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace detail {

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::invalid_input, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::invalid_input, "cannot write " + path);
  out << text;
}

inline void reject_unknown_keys(const nlohmann::json& obj, std::vector<std::string> allowed,
                                const std::string& where,
                                ErrorCode code = ErrorCode::invalid_config) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const std::string& key : allowed)
      if (it.key() == key) {
        known = true;
        break;
      }
    if (!known) fail(code, "unknown key \"" + it.key() + "\" in " + where);
  }
}

inline double require_number(const nlohmann::json& obj, const std::string& key,
                             const std::string& where) {
  if (!obj.contains(key)) fail(ErrorCode::invalid_config, "missing \"" + key + "\" in " + where);
  if (!obj[key].is_number()) fail(ErrorCode::invalid_config, "\"" + key + "\" must be a number in " + where);
  return obj[key].get<double>();
}

inline double parse_csv_field(const char* s, const char** end) {
  char* stop = nullptr;
  double v = std::strtod(s, &stop);
  if (stop == s) fail(ErrorCode::invalid_input, "malformed CSV: expected a number");
  *end = stop;
  return v;
}

}  // namespace detail

/// Example-2 profile: zero up to the cutoff, then cos(x) / (x - pole).
inline InitialPulse cosine_tail_pulse(double cutoff = 1.5 * M_PI, double pole = 3.0) {
  return InitialPulse::analytic([cutoff, pole](double x) {
    if (x <= cutoff) return 0.0;
    return std::cos(x) / (x - pole);
  });
}

struct SceneConfig {
  Scene scene;
  InitialPulse pulse;
};

/**
 * Scene/pulse configuration document:
 *
 *   {
 *     "layer_order": "interface_to_wall",            // optional, only legal value
 *     "layers": [{"length": r, "speed": r}, ...],     // first entry touches x = L
 *     "detector_offset": r,
 *     "source_position": r,
 *     "pulse": {"type": "delta"|"gaussian"|"tabulated"|"cosine_tail", ...}
 *   }
 *
 * Field order is free; unknown keys are rejected. Pulse parameters:
 * delta {x0, point_tolerance?}, gaussian {x0, sharpness},
 * tabulated {x: [...], values: [...]}, cosine_tail {cutoff?, pole?}.
 */
inline SceneConfig parse_config(const nlohmann::json& doc) {
  if (!doc.is_object()) fail(ErrorCode::invalid_config, "config root must be an object");
  detail::reject_unknown_keys(
      doc, {"layer_order", "layers", "detector_offset", "source_position", "pulse"}, "config");
  if (doc.contains("layer_order")) {
    if (!doc["layer_order"].is_string() || doc["layer_order"] != "interface_to_wall")
      fail(ErrorCode::invalid_config,
           "layer_order must be \"interface_to_wall\" (first layer adjacent to x = L)");
  }
  if (!doc.contains("layers") || !doc["layers"].is_array() || doc["layers"].empty())
    fail(ErrorCode::invalid_config, "config needs a non-empty \"layers\" array");
  std::vector<Layer> layers;
  for (const nlohmann::json& item : doc["layers"]) {
    if (!item.is_object()) fail(ErrorCode::invalid_config, "each layer must be an object");
    detail::reject_unknown_keys(item, {"length", "speed"}, "layer");
    layers.push_back({detail::require_number(item, "length", "layer"),
                      detail::require_number(item, "speed", "layer")});
  }
  double offset = detail::require_number(doc, "detector_offset", "config");
  double source = detail::require_number(doc, "source_position", "config");

  if (!doc.contains("pulse") || !doc["pulse"].is_object())
    fail(ErrorCode::invalid_config, "config needs a \"pulse\" object");
  const nlohmann::json& p = doc["pulse"];
  if (!p.contains("type") || !p["type"].is_string())
    fail(ErrorCode::invalid_config, "pulse needs a string \"type\"");
  const std::string type = p["type"].get<std::string>();

  InitialPulse pulse = InitialPulse::delta(0.0);
  if (type == "delta") {
    detail::reject_unknown_keys(p, {"type", "x0", "point_tolerance"}, "delta pulse");
    double tol = p.contains("point_tolerance")
                     ? detail::require_number(p, "point_tolerance", "delta pulse")
                     : 1e-12;
    pulse = InitialPulse::delta(detail::require_number(p, "x0", "delta pulse"), tol);
  } else if (type == "gaussian") {
    detail::reject_unknown_keys(p, {"type", "x0", "sharpness"}, "gaussian pulse");
    pulse = InitialPulse::gaussian(detail::require_number(p, "x0", "gaussian pulse"),
                                   detail::require_number(p, "sharpness", "gaussian pulse"));
  } else if (type == "tabulated") {
    detail::reject_unknown_keys(p, {"type", "x", "values"}, "tabulated pulse");
    if (!p.contains("x") || !p["x"].is_array() || !p.contains("values") || !p["values"].is_array())
      fail(ErrorCode::invalid_config, "tabulated pulse needs \"x\" and \"values\" arrays");
    pulse = InitialPulse::tabulated(p["x"].get<std::vector<double>>(),
                                    p["values"].get<std::vector<double>>());
  } else if (type == "cosine_tail") {
    detail::reject_unknown_keys(p, {"type", "cutoff", "pole"}, "cosine_tail pulse");
    double cutoff =
        p.contains("cutoff") ? detail::require_number(p, "cutoff", "cosine_tail pulse") : 1.5 * M_PI;
    double pole = p.contains("pole") ? detail::require_number(p, "pole", "cosine_tail pulse") : 3.0;
    pulse = cosine_tail_pulse(cutoff, pole);
  } else {
    fail(ErrorCode::invalid_config, "unknown pulse type \"" + type + "\"");
  }

  return SceneConfig{Scene(std::move(layers), offset, source), std::move(pulse)};
}

inline SceneConfig load_config(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(detail::read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::invalid_config, path + ": " + e.what());
  }
  return parse_config(doc);
}

// ---------------------------------------------------------------------------
// CSV emission (17 significant digits throughout)

inline std::string time_series_csv(const TimeSeries& series, const std::string& label = "m") {
  std::string out = "t," + label + "\n";
  for (std::size_t i = 0; i < series.size(); ++i)
    out += format_g17(series.time(i)) + "," + format_g17(series.values[i]) + "\n";
  return out;
}

inline std::string event_series_csv(const EventSeries& series) {
  std::string out = "t,amplitude\n";
  for (const Event& e : series.events())
    out += format_g17(e.time) + "," + format_g17(e.amplitude) + "\n";
  return out;
}

inline std::string coupled_traces_csv(const CoupledTraces& traces) {
  std::string out = "t,G0,G1\n";
  for (std::size_t i = 0; i < traces.g0.size(); ++i)
    out += format_g17(traces.g0.time(i)) + "," + format_g17(traces.g0.values[i]) + "," +
           format_g17(traces.g1.values[i]) + "\n";
  return out;
}

/// Dense field table W(x, t) over the product grid, t varying fastest.
inline std::string field_grid_csv(const std::vector<double>& xs, const std::vector<double>& ts,
                                  const std::vector<double>& values,
                                  const std::string& label = "W") {
  if (values.size() != xs.size() * ts.size())
    fail(ErrorCode::invalid_input, "field grid size mismatch");
  std::string out = "x,t," + label + "\n";
  std::size_t k = 0;
  for (double x : xs)
    for (double t : ts)
      out += format_g17(x) + "," + format_g17(t) + "," + format_g17(values[k++]) + "\n";
  return out;
}

inline std::string snapshots_csv(const FdmResult& result) {
  std::string out = "x,t,u\n";
  for (const auto& [t, u] : result.snapshots)
    for (std::size_t i = 0; i < u.size(); ++i)
      out += format_g17(result.grid[i]) + "," + format_g17(t) + "," + format_g17(u[i]) + "\n";
  return out;
}

inline std::string peaks_csv(const PeakList& peaks) {
  std::string out = "t,h\n";
  for (const Peak& p : peaks.peaks) out += format_g17(p.time) + "," + format_g17(p.height) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Peak input: CSV "t,h" (header optional) or JSON {"magnitude_only":b,"peaks":[{"t":r,"h":r}...]}

inline PeakList parse_peaks_csv(const std::string& text, bool magnitude_only = false) {
  PeakList out;
  out.magnitude_only = magnitude_only;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      first = false;
      char* stop = nullptr;
      std::strtod(line.c_str(), &stop);
      if (stop == line.c_str()) continue;  // header row
    }
    const char* s = line.c_str();
    const char* end = nullptr;
    double t = detail::parse_csv_field(s, &end);
    while (*end == ' ' || *end == '\t') ++end;
    if (*end != ',') fail(ErrorCode::invalid_input, "malformed CSV: expected \"t,h\"");
    double h = detail::parse_csv_field(end + 1, &end);
    while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
    if (*end != '\0') fail(ErrorCode::invalid_input, "malformed CSV: trailing characters");
    out.peaks.push_back({t, h});
  }
  if (out.peaks.empty()) fail(ErrorCode::empty_peaks, "no peaks in input");
  return out;
}

inline PeakList parse_peaks_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::invalid_input, std::string("peaks JSON: ") + e.what());
  }
  if (!doc.is_object()) fail(ErrorCode::invalid_input, "peaks JSON root must be an object");
  detail::reject_unknown_keys(doc, {"magnitude_only", "peaks"}, "peaks document",
                              ErrorCode::invalid_input);
  PeakList out;
  if (doc.contains("magnitude_only")) {
    if (!doc["magnitude_only"].is_boolean())
      fail(ErrorCode::invalid_input, "magnitude_only must be a boolean");
    out.magnitude_only = doc["magnitude_only"].get<bool>();
  }
  if (!doc.contains("peaks") || !doc["peaks"].is_array())
    fail(ErrorCode::invalid_input, "peaks JSON needs a \"peaks\" array");
  for (const nlohmann::json& item : doc["peaks"]) {
    if (!item.is_object()) fail(ErrorCode::invalid_input, "each peak must be an object");
    detail::reject_unknown_keys(item, {"t", "h"}, "peak", ErrorCode::invalid_input);
    if (!item.contains("t") || !item.contains("h") || !item["t"].is_number() ||
        !item["h"].is_number())
      fail(ErrorCode::invalid_input, "each peak needs numeric \"t\" and \"h\"");
    out.peaks.push_back({item["t"].get<double>(), item["h"].get<double>()});
  }
  if (out.peaks.empty()) fail(ErrorCode::empty_peaks, "no peaks in input");
  return out;
}

inline PeakList load_peaks(const std::string& path, bool magnitude_only = false) {
  std::string text = detail::read_text_file(path);
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    PeakList peaks = parse_peaks_json(text);
    if (magnitude_only) peaks.magnitude_only = true;
    return peaks;
  }
  return parse_peaks_csv(text, magnitude_only);
}

// ---------------------------------------------------------------------------
// Reconstruction output (manual emission to keep the 17-digit contract)

inline std::string reconstruction_json(const ReconstructionResult& result) {
  auto array = [](const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += ",";
      s += format_g17(v[i]);
    }
    return s + "]";
  };
  std::string out = "{\n  \"candidates\": [\n";
  for (std::size_t i = 0; i < result.candidates.size(); ++i) {
    const Candidate& c = result.candidates[i];
    out += "    {\"speeds\": " + array(c.speeds) + ", \"lengths\": " + array(c.lengths) +
           ", \"length_sum\": " + format_g17(c.length_sum) + "}";
    out += i + 1 < result.candidates.size() ? ",\n" : "\n";
  }
  out += "  ],\n";
  out += "  \"selected_index\": " +
         (result.selected_index ? std::to_string(*result.selected_index) : std::string("null")) +
         ",\n";
  out += std::string("  \"ambiguous\": ") + (result.ambiguous ? "true" : "false") + ",\n";
  out += "  \"wall_residuals\": " + array(result.wall_residuals) + "\n}\n";
  return out;
}

inline ReconstructionResult parse_reconstruction_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::invalid_input, std::string("reconstruction JSON: ") + e.what());
  }
  ReconstructionResult res;
  for (const nlohmann::json& item : doc.at("candidates")) {
    Candidate c;
    c.speeds = item.at("speeds").get<std::vector<double>>();
    c.lengths = item.at("lengths").get<std::vector<double>>();
    c.length_sum = item.at("length_sum").get<double>();
    res.candidates.push_back(std::move(c));
  }
  if (doc.contains("selected_index") && !doc["selected_index"].is_null())
    res.selected_index = doc["selected_index"].get<std::size_t>();
  res.ambiguous = doc.value("ambiguous", false);
  if (doc.contains("wall_residuals"))
    res.wall_residuals = doc["wall_residuals"].get<std::vector<double>>();
  return res;
}

// ---------------------------------------------------------------------------
// Run manifest: reproducibility record written alongside every output file.

struct RunManifest {
  std::string subcommand;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  double duration_seconds = 0.0;
};

inline std::string manifest_json(const RunManifest& m) {
  nlohmann::ordered_json doc;
  doc["tool"] = "echolab";
  doc["version"] = version_string;
  doc["subcommand"] = m.subcommand;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [key, value] : m.parameters) params[key] = value;
  doc["parameters"] = params;
  doc["inputs"] = m.inputs;
  doc["outputs"] = m.outputs;
  doc["duration_seconds"] = m.duration_seconds;
  return doc.dump(2) + "\n";
}

inline std::string manifest_path_for(const std::string& out_path) {
  return out_path + ".manifest.json";
}

inline void write_manifest(const RunManifest& m, const std::string& out_path) {
  detail::write_text_file(manifest_path_for(out_path), manifest_json(m));
}

}  // namespace echolab
