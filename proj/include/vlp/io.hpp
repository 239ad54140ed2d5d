#pragma once

// Scene configuration (JSON) and tabular data (CSV) for the pipeline.
//
// CSV numbers are written with 6 fixed decimals so that reruns produce
// byte-identical files.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "vlp/analysis.hpp"
#include "vlp/calibration.hpp"
#include "vlp/error.hpp"
#include "vlp/positioning.hpp"
#include "vlp/simulator.hpp"

namespace vlp::io {

using json = nlohmann::json;

inline constexpr const char* kToolVersion = "1.0.0";

/// Experiment settings stored next to the scene.
struct ExperimentConfig {
  std::vector<WorldPoint> grid = default_grid();
  std::size_t trials_per_point = 12;
  std::size_t sweep_samples = 12;
  std::size_t dispersion_samples = 432;
  std::optional<std::pair<BeaconId, BeaconId>> two_led_pair;
};

struct SceneFile {
  SceneConfig scene;
  ExperimentConfig experiment;
};

inline std::string fmt6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

// ---------------------------------------------------------------- JSON scene

namespace detail {

inline const json& field(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object())
    throw Error(ErrorCode::ConfigParse, "field '" + path + "' must be an object");
  auto it = obj.find(key);
  if (it == obj.end())
    throw Error(ErrorCode::ConfigParse, "missing field '" + path + "." + key + "'");
  return *it;
}

inline double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw Error(ErrorCode::ConfigParse, "field '" + path + "' must be a number");
  return v.get<double>();
}

inline double number_or(const json& obj, const std::string& key, double fallback,
                        const std::string& path) {
  auto it = obj.find(key);
  return it == obj.end() ? fallback : number(*it, path + "." + key);
}

inline std::vector<double> numbers(const json& v, std::size_t n, const std::string& path) {
  if (!v.is_array() || v.size() != n)
    throw Error(ErrorCode::ConfigParse,
                "field '" + path + "' must be an array of " + std::to_string(n) + " numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < n; ++k) out.push_back(number(v[k], path + "[" + std::to_string(k) + "]"));
  return out;
}

inline WorldPoint point3(const json& v, const std::string& path) {
  auto p = numbers(v, 3, path);
  return {p[0], p[1], p[2]};
}

inline json to_json(WorldPoint p) { return json::array({p.x, p.y, p.z}); }
inline json to_json(PixelPoint p) { return json::array({p.u, p.v}); }

}  // namespace detail

inline SceneFile scene_from_json(const json& root) {
  using namespace detail;
  SceneFile out;
  SceneConfig& s = out.scene;

  const json& intr = field(root, "intrinsics", "scene");
  const json& res = field(intr, "resolution", "intrinsics");
  auto wh = numbers(res, 2, "intrinsics.resolution");
  try {
    s.intrinsics = CameraIntrinsics(number(field(intr, "focal_length_mm", "intrinsics"),
                                           "intrinsics.focal_length_mm"),
                                    number_or(intr, "pitch_i_mm", CameraIntrinsics::kDefaultPitchMm,
                                              "intrinsics"),
                                    number_or(intr, "pitch_j_mm", CameraIntrinsics::kDefaultPitchMm,
                                              "intrinsics"),
                                    {static_cast<int>(wh[0]), static_cast<int>(wh[1])});
    if (auto it = intr.find("corrected_principal_point"); it != intr.end()) {
      auto pp = numbers(*it, 2, "intrinsics.corrected_principal_point");
      s.intrinsics = s.intrinsics.with_principal_point({pp[0], pp[1]});
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigParse) throw;
    throw Error(ErrorCode::ConfigParse, std::string("intrinsics: ") + e.what());
  }

  const json& beacons = field(root, "beacons", "scene");
  if (!beacons.is_array()) throw Error(ErrorCode::ConfigParse, "field 'scene.beacons' must be an array");
  for (std::size_t n = 0; n < beacons.size(); ++n) {
    const std::string path = "beacons[" + std::to_string(n) + "]";
    const json& id = field(beacons[n], "id", path);
    if (!id.is_number_integer())
      throw Error(ErrorCode::ConfigParse, "field '" + path + ".id' must be an integer");
    s.beacons.push_back({{id.get<int>()}, point3(field(beacons[n], "position", path), path + ".position")});
  }

  if (auto it = root.find("camera"); it != root.end()) {
    s.camera.position = point3(field(*it, "position", "camera"), "camera.position");
    s.camera.yaw = number_or(*it, "yaw_rad", 0.0, "camera");
  }
  s.true_principal_point = s.intrinsics.nominal_principal_point();
  if (auto it = root.find("true_principal_point"); it != root.end()) {
    auto pp = numbers(*it, 2, "true_principal_point");
    s.true_principal_point = {pp[0], pp[1]};
  }
  if (auto it = root.find("noise"); it != root.end()) {
    s.noise.pixel_sigma = number_or(*it, "pixel_sigma", 0.0, "noise");
    if (auto q = it->find("quantize"); q != it->end()) {
      if (!q->is_boolean()) throw Error(ErrorCode::ConfigParse, "field 'noise.quantize' must be a boolean");
      s.noise.quantize = q->get<bool>();
    }
  }
  if (auto it = root.find("seed"); it != root.end()) {
    if (!it->is_number_unsigned()) throw Error(ErrorCode::ConfigParse, "field 'seed' must be a non-negative integer");
    s.seed = it->get<std::uint64_t>();
  }

  if (auto it = root.find("experiment"); it != root.end()) {
    ExperimentConfig& x = out.experiment;
    if (auto g = it->find("grid"); g != it->end()) {
      if (!g->is_array() || g->empty())
        throw Error(ErrorCode::ConfigParse, "field 'experiment.grid' must be a non-empty array");
      x.grid.clear();
      for (std::size_t n = 0; n < g->size(); ++n)
        x.grid.push_back(point3((*g)[n], "experiment.grid[" + std::to_string(n) + "]"));
    }
    auto count = [&](const char* key, std::size_t& dst) {
      if (auto c = it->find(key); c != it->end()) {
        if (!c->is_number_unsigned() || c->get<std::size_t>() == 0)
          throw Error(ErrorCode::ConfigParse,
                      std::string("field 'experiment.") + key + "' must be a positive integer");
        dst = c->get<std::size_t>();
      }
    };
    count("trials_per_point", x.trials_per_point);
    count("sweep_samples", x.sweep_samples);
    count("dispersion_samples", x.dispersion_samples);
    if (auto p = it->find("two_led_pair"); p != it->end()) {
      if (!p->is_array() || p->size() != 2 || !(*p)[0].is_number_integer() ||
          !(*p)[1].is_number_integer())
        throw Error(ErrorCode::ConfigParse, "field 'experiment.two_led_pair' must be two beacon ids");
      x.two_led_pair = std::pair{BeaconId{(*p)[0].get<int>()}, BeaconId{(*p)[1].get<int>()}};
    }
  }

  try {
    s.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigParse, std::string("invalid scene: ") + e.what());
  }
  return out;
}

inline json scene_to_json(const SceneFile& file) {
  using detail::to_json;
  const SceneConfig& s = file.scene;
  json root;
  root["intrinsics"] = {
      {"focal_length_mm", s.intrinsics.focal_length()},
      {"pitch_i_mm", s.intrinsics.pitch_i()},
      {"pitch_j_mm", s.intrinsics.pitch_j()},
      {"resolution", json::array({s.intrinsics.resolution().width_px, s.intrinsics.resolution().height_px})},
      {"corrected_principal_point", to_json(s.intrinsics.corrected_principal_point())},
  };
  json beacons = json::array();
  for (const auto& b : s.beacons) beacons.push_back({{"id", b.id.value}, {"position", to_json(b.position)}});
  root["beacons"] = beacons;
  root["camera"] = {{"position", to_json(s.camera.position)}, {"yaw_rad", s.camera.yaw}};
  root["true_principal_point"] = to_json(s.true_principal_point);
  root["noise"] = {{"pixel_sigma", s.noise.pixel_sigma}, {"quantize", s.noise.quantize}};
  root["seed"] = s.seed;

  const ExperimentConfig& x = file.experiment;
  json grid = json::array();
  for (const auto& p : x.grid) grid.push_back(to_json(p));
  root["experiment"] = {{"grid", grid},
                        {"trials_per_point", x.trials_per_point},
                        {"sweep_samples", x.sweep_samples},
                        {"dispersion_samples", x.dispersion_samples}};
  if (x.two_led_pair)
    root["experiment"]["two_led_pair"] = json::array({x.two_led_pair->first.value, x.two_led_pair->second.value});
  return root;
}

inline SceneFile read_scene(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigParse, "cannot open scene file " + path.string());
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    // nlohmann reports "at line L, column C" in the message.
    throw Error(ErrorCode::ConfigParse, path.string() + ": " + e.what());
  }
  try {
    return scene_from_json(root);
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigParse, path.string() + ": " + e.what());
  }
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidInput, "cannot write " + path.string());
  out << text;
}

inline void write_scene(const std::filesystem::path& path, const SceneFile& file) {
  write_text(path, scene_to_json(file).dump(2) + "\n");
}

/// 64-bit FNV-1a, used to fingerprint configurations in run metadata.
inline std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string config_hash(const SceneFile& file) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(scene_to_json(file).dump())));
  return buf;
}

// ----------------------------------------------------------------------- CSV

class CsvTable {
 public:
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line per row
  std::string source;

  std::optional<std::size_t> column(std::string_view name) const {
    for (std::size_t c = 0; c < header.size(); ++c)
      if (header[c] == name) return c;
    return std::nullopt;
  }

  std::size_t require(std::string_view name) const {
    auto c = column(name);
    if (!c) throw Error(ErrorCode::ConfigParse, source + ": missing column '" + std::string(name) + "'");
    return *c;
  }

  double number(std::size_t row, std::size_t col) const {
    const std::string& cell = rows[row][col];
    try {
      std::size_t used = 0;
      double v = std::stod(cell, &used);
      if (used != cell.size()) throw std::invalid_argument(cell);
      return v;
    } catch (const std::exception&) {
      throw Error(ErrorCode::ConfigParse, source + ":" + std::to_string(line_numbers[row]) +
                                              ": column '" + header[col] +
                                              "' is not a number: '" + cell + "'");
    }
  }

  long long integer(std::size_t row, std::size_t col) const {
    const std::string& cell = rows[row][col];
    try {
      std::size_t used = 0;
      long long v = std::stoll(cell, &used);
      if (used != cell.size()) throw std::invalid_argument(cell);
      return v;
    } catch (const std::exception&) {
      throw Error(ErrorCode::ConfigParse, source + ":" + std::to_string(line_numbers[row]) +
                                              ": column '" + header[col] +
                                              "' is not an integer: '" + cell + "'");
    }
  }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigParse, "cannot open " + path.string());
  CsvTable t;
  t.source = path.string();
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r" || line[0] == '#') continue;
    auto cells = split_csv_line(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size())
      throw Error(ErrorCode::ConfigParse, t.source + ":" + std::to_string(lineno) + ": expected " +
                                              std::to_string(t.header.size()) + " fields, got " +
                                              std::to_string(cells.size()));
    t.rows.push_back(std::move(cells));
    t.line_numbers.push_back(lineno);
  }
  if (t.header.empty()) throw Error(ErrorCode::ConfigParse, t.source + ": empty file");
  return t;
}

// Detections grouped per trial. Files without a trial_id column form one trial.
struct TrialDetections {
  long long trial_id = 0;
  std::vector<Detection> detections;
};

inline std::vector<TrialDetections> read_detections(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const auto trial_col = t.column("trial_id");
  const auto id_col = t.require("beacon_id");
  const auto u_col = t.require("u");
  const auto v_col = t.require("v");
  std::vector<TrialDetections> out;
  std::map<long long, std::size_t> index;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const long long trial = trial_col ? t.integer(r, *trial_col) : 0;
    auto [it, inserted] = index.try_emplace(trial, out.size());
    if (inserted) out.push_back({trial, {}});
    out[it->second].detections.push_back(
        {{static_cast<int>(t.integer(r, id_col))}, {t.number(r, u_col), t.number(r, v_col)}});
  }
  return out;
}

inline std::string detections_csv(const std::vector<TrialRecord>& records) {
  std::string s = "trial_id,point_index,trial_index,beacon_id,u,v\n";
  for (std::size_t n = 0; n < records.size(); ++n)
    for (const auto& d : records[n].detections)
      s += std::to_string(n) + "," + std::to_string(records[n].point_index) + "," +
           std::to_string(records[n].trial_index) + "," + std::to_string(d.beacon_id.value) + "," +
           fmt6(d.pixel.u) + "," + fmt6(d.pixel.v) + "\n";
  return s;
}

struct GroundTruthRow {
  long long trial_id = 0;
  CameraPose pose;
};

inline std::string ground_truth_csv(const std::vector<TrialRecord>& records) {
  std::string s = "trial_id,point_index,trial_index,x,y,z,yaw\n";
  for (std::size_t n = 0; n < records.size(); ++n) {
    const auto& r = records[n];
    s += std::to_string(n) + "," + std::to_string(r.point_index) + "," +
         std::to_string(r.trial_index) + "," + fmt6(r.truth.position.x) + "," +
         fmt6(r.truth.position.y) + "," + fmt6(r.truth.position.z) + "," + fmt6(r.truth.yaw) + "\n";
  }
  return s;
}

inline std::vector<GroundTruthRow> read_ground_truth(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const auto id = t.require("trial_id");
  const auto x = t.require("x"), y = t.require("y"), z = t.require("z");
  const auto yaw = t.column("yaw");
  std::vector<GroundTruthRow> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    out.push_back({t.integer(r, id),
                   {{t.number(r, x), t.number(r, y), t.number(r, z)}, yaw ? t.number(r, *yaw) : 0.0}});
  return out;
}

/// Outcome of locating one trial: a fix or the error that prevented it.
struct FixRow {
  long long trial_id = 0;
  PositioningMethod method = PositioningMethod::ThreeLed;
  std::optional<PositionFix> fix;
  std::string error_code;
  std::string error;
};

inline std::string fixes_csv(const std::vector<FixRow>& rows) {
  std::string s = "trial_id,method,status,x,y,z,H,d,D,theta,error\n";
  for (const auto& r : rows) {
    s += std::to_string(r.trial_id) + "," + std::string(to_string(r.method)) + ",";
    if (r.fix) {
      const auto& p = r.fix->position;
      const auto& d = *r.fix->diagnostics;
      s += "ok," + fmt6(p.x) + "," + fmt6(p.y) + "," + fmt6(p.z) + "," + fmt6(d.height) + "," +
           fmt6(d.image_distance) + "," + fmt6(d.world_distance) + "," +
           (d.theta ? fmt6(*d.theta) : std::string()) + ",\n";
    } else {
      std::string msg = r.error;
      for (char& c : msg)
        if (c == ',' || c == '\n') c = ';';
      s += r.error_code + ",,,,,,,," + msg + "\n";
    }
  }
  return s;
}

inline std::vector<FixRow> read_fixes(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const auto id = t.require("trial_id"), status = t.require("status");
  const auto x = t.require("x"), y = t.require("y"), z = t.require("z");
  const auto method = t.column("method");
  const auto H = t.column("H"), d = t.column("d"), D = t.column("D"), theta = t.column("theta");
  std::vector<FixRow> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    FixRow row;
    row.trial_id = t.integer(r, id);
    if (method && t.rows[r][*method] == "two-led") row.method = PositioningMethod::TwoLed;
    if (t.rows[r][status] != "ok") {
      row.error_code = t.rows[r][status];
      out.push_back(std::move(row));
      continue;
    }
    PositionFix fix;
    fix.method = row.method;
    fix.position = {t.number(r, x), t.number(r, y), t.number(r, z)};
    if (H && !t.rows[r][*H].empty()) {
      Diagnostics diag;
      diag.height = t.number(r, *H);
      if (d && !t.rows[r][*d].empty()) diag.image_distance = t.number(r, *d);
      if (D && !t.rows[r][*D].empty()) diag.world_distance = t.number(r, *D);
      if (theta && !t.rows[r][*theta].empty()) diag.theta = t.number(r, *theta);
      fix.diagnostics = std::move(diag);
    }
    row.fix = std::move(fix);
    out.push_back(std::move(row));
  }
  return out;
}

inline std::string tracks_csv(const std::vector<std::vector<PixelPoint>>& tracks) {
  std::string s = "track_id,sample_index,u,v\n";
  for (std::size_t t = 0; t < tracks.size(); ++t)
    for (std::size_t k = 0; k < tracks[t].size(); ++k)
      s += std::to_string(t) + "," + std::to_string(k) + "," + fmt6(tracks[t][k].u) + "," +
           fmt6(tracks[t][k].v) + "\n";
  return s;
}

inline std::vector<std::vector<PixelPoint>> read_tracks(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const auto id = t.require("track_id"), idx = t.require("sample_index");
  const auto u = t.require("u"), v = t.require("v");
  std::map<long long, std::map<long long, PixelPoint>> grouped;
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    grouped[t.integer(r, id)][t.integer(r, idx)] = {t.number(r, u), t.number(r, v)};
  std::vector<std::vector<PixelPoint>> out;
  for (const auto& [_, samples] : grouped) {
    out.emplace_back();
    for (const auto& [__, p] : samples) out.back().push_back(p);
  }
  return out;
}

inline std::string errors_csv(const ErrorReport& r, std::span<const long long> trial_ids) {
  std::string s = "trial_id,error_cm,error_3d_cm\n";
  for (std::size_t n = 0; n < r.per_trial_errors.size(); ++n)
    s += std::to_string(trial_ids[n]) + "," + fmt6(r.per_trial_errors[n]) + "," +
         fmt6(r.per_trial_errors_3d[n]) + "\n";
  return s;
}

inline std::string cdf_csv(const ErrorReport& r) {
  std::string s = "error_cm,fraction\n";
  for (const auto& p : r.cdf) s += fmt6(p.error) + "," + fmt6(p.fraction) + "\n";
  return s;
}

inline std::string histogram_csv(const ErrorReport& r) {
  std::string s = "bin_lo_cm,bin_hi_cm,count\n";
  for (std::size_t b = 0; b < r.histogram.counts.size(); ++b)
    s += fmt6(r.histogram.edges[b]) + "," + fmt6(r.histogram.edges[b + 1]) + "," +
         std::to_string(r.histogram.counts[b]) + "\n";
  return s;
}

inline std::string summary_block(const std::string& title, const ErrorReport& r,
                                 std::size_t failed) {
  std::string s = "[" + title + "]\n";
  s += "  trials: " + std::to_string(r.per_trial_errors.size()) + " located, " +
       std::to_string(failed) + " failed\n";
  s += "  mean_cm: " + fmt6(r.mean) + "\n";
  s += "  p90_cm: " + fmt6(r.p90) + "\n";
  s += "  max_cm: " + fmt6(r.max) + "\n";
  s += "  rms_cm: " + fmt6(r.rms) + "\n";
  s += "  " + headline(r) + "\n";
  if (r.dispersion) {
    const auto& d = *r.dispersion;
    s += "  dispersion: mean offset (" + fmt6(d.mean_offset.x) + ", " + fmt6(d.mean_offset.y) +
         ") cm, enclosing circle center (" + fmt6(d.enclosing_center.x) + ", " +
         fmt6(d.enclosing_center.y) + ") radius " + fmt6(d.enclosing_radius) + " cm over " +
         std::to_string(d.sample_count) + " fixes\n";
  }
  return s;
}

}  // namespace vlp::io
