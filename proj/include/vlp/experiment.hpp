#pragma once

// Grid replication experiment: simulate the grid, locate it uncalibrated,
// calibrate the principal point with both methods at a reference position,
// relocate, and report errors for every (positioning method, calibration)
// cell.

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vlp/analysis.hpp"
#include "vlp/calibration.hpp"
#include "vlp/io.hpp"
#include "vlp/positioning.hpp"
#include "vlp/simulator.hpp"

namespace vlp {

enum class CalibrationKind { None, Rotation, Dispersion };

constexpr std::string_view to_string(CalibrationKind c) noexcept {
  switch (c) {
    case CalibrationKind::None: return "none";
    case CalibrationKind::Rotation: return "rotation";
    case CalibrationKind::Dispersion: return "dispersion";
  }
  return "none";
}

/// Picks the two detections used by two-LED positioning: the configured pair
/// when given, otherwise the detected pair with the longest world baseline
/// (ties broken toward lower ids).
inline std::vector<Detection> select_two_led_pair(
    std::span<const Detection> detections, std::span<const LedBeacon> beacons,
    const std::optional<std::pair<BeaconId, BeaconId>>& preferred) {
  if (preferred) {
    std::vector<Detection> out;
    for (BeaconId id : {preferred->first, preferred->second})
      for (const auto& d : detections)
        if (d.beacon_id == id) {
          out.push_back(d);
          break;
        }
    if (out.size() != 2)
      throw Error(ErrorCode::InvalidInput, "configured two-LED pair not detected");
    return out;
  }
  if (detections.size() < 2)
    throw Error(ErrorCode::InvalidInput, "two-LED positioning needs 2 detections, got " +
                                             std::to_string(detections.size()));
  std::vector<Detection> sorted(detections.begin(), detections.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const Detection& a, const Detection& b) { return a.beacon_id < b.beacon_id; });
  double best = -1.0;
  std::vector<Detection> out;
  for (std::size_t a = 0; a < sorted.size(); ++a)
    for (std::size_t b = a + 1; b < sorted.size(); ++b) {
      const auto& pa = detail::find_beacon(beacons, sorted[a].beacon_id).position;
      const auto& pb = detail::find_beacon(beacons, sorted[b].beacon_id).position;
      const double len = std::hypot(pa.x - pb.x, pa.y - pb.y);
      if (len > best) {
        best = len;
        out = {sorted[a], sorted[b]};
      }
    }
  return out;
}

struct LocateSettings {
  PositioningMethod method = PositioningMethod::ThreeLed;
  PositioningOptions options;
  std::optional<std::pair<BeaconId, BeaconId>> two_led_pair;
};

/// Locates one trial. Three-LED uses the three lowest-id detections.
inline PositionFix locate_trial(std::span<const Detection> detections,
                                std::span<const LedBeacon> beacons, const CameraIntrinsics& k,
                                const LocateSettings& settings) {
  if (settings.method == PositioningMethod::TwoLed)
    return locate_two(select_two_led_pair(detections, beacons, settings.two_led_pair), beacons, k);
  std::vector<Detection> sorted(detections.begin(), detections.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const Detection& a, const Detection& b) { return a.beacon_id < b.beacon_id; });
  if (sorted.size() > 3) sorted.resize(3);
  return trilaterate_three(sorted, beacons, k, settings.options);
}

inline io::FixRow locate_row(long long trial_id, std::span<const Detection> detections,
                             std::span<const LedBeacon> beacons, const CameraIntrinsics& k,
                             const LocateSettings& settings) {
  io::FixRow row;
  row.trial_id = trial_id;
  row.method = settings.method;
  try {
    row.fix = locate_trial(detections, beacons, k, settings);
  } catch (const Error& e) {
    row.error_code = std::string(to_string(e.code()));
    row.error = e.what();
  }
  return row;
}

inline std::vector<io::FixRow> locate_records(const std::vector<TrialRecord>& records,
                                              std::span<const LedBeacon> beacons,
                                              const CameraIntrinsics& k,
                                              const LocateSettings& settings) {
  std::vector<io::FixRow> rows;
  rows.reserve(records.size());
  for (std::size_t n = 0; n < records.size(); ++n)
    rows.push_back(locate_row(static_cast<long long>(n), records[n].detections, beacons, k, settings));
  return rows;
}

struct ReplicationConfig {
  SceneConfig scene;  // intrinsics = what the localizer assumes before calibration
  io::ExperimentConfig experiment;
  std::uint64_t seed = 2020;
  PositioningOptions options;
  DispersionMode dispersion_mode = DispersionMode::Physical;
};

/// Reference replication: reference rig, principal point off by (6.3, -4.1) px,
/// 0.5 px detection noise with integer quantization, 36 x 12 grid.
inline ReplicationConfig default_replication() {
  ReplicationConfig c;
  c.scene = default_scene();
  const PixelPoint nominal = c.scene.intrinsics.nominal_principal_point();
  c.scene.true_principal_point = {nominal.u + 6.3, nominal.v - 4.1};
  c.scene.noise = {0.5, true};
  c.scene.seed = c.seed;
  return c;
}

struct Cell {
  PositioningMethod method = PositioningMethod::ThreeLed;
  CalibrationKind calibration = CalibrationKind::None;
  CameraIntrinsics intrinsics;
  std::vector<io::FixRow> rows;
  ErrorReport report;
  std::vector<long long> located_ids;
  std::size_t failed = 0;
};

struct MethodCalibrations {
  PositioningMethod method = PositioningMethod::ThreeLed;
  std::vector<io::FixRow> dispersion_rows;  // fixes at the reference position
  DispersionCalibration dispersion;
};

struct ReplicationResult {
  ReplicationConfig config;
  std::vector<TrialRecord> dataset;
  std::vector<TrialRecord> dispersion_dataset;
  std::vector<std::vector<PixelPoint>> sweep_tracks;
  RotationCalibration rotation;
  std::vector<MethodCalibrations> dispersion;
  std::vector<Cell> cells;  // (method, calibration) in method-major order

  const Cell& cell(PositioningMethod m, CalibrationKind c) const {
    for (const auto& x : cells)
      if (x.method == m && x.calibration == c) return x;
    throw Error(ErrorCode::InvalidInput, "no such cell");
  }
};

namespace detail {

inline Cell evaluate_cell(PositioningMethod method, CalibrationKind kind,
                          const CameraIntrinsics& k, const ReplicationConfig& config,
                          const std::vector<TrialRecord>& dataset,
                          std::optional<DispersionSummary> dispersion) {
  Cell cell;
  cell.method = method;
  cell.calibration = kind;
  cell.intrinsics = k;
  const LocateSettings settings{method, config.options, config.experiment.two_led_pair};
  cell.rows = locate_records(dataset, config.scene.beacons, k, settings);
  std::vector<WorldPoint> fixes, truths;
  for (const auto& row : cell.rows) {
    if (!row.fix) {
      ++cell.failed;
      continue;
    }
    fixes.push_back(row.fix->position);
    truths.push_back(dataset[static_cast<std::size_t>(row.trial_id)].truth.position);
    cell.located_ids.push_back(row.trial_id);
  }
  if (fixes.empty())
    throw Error(ErrorCode::EmptyInput, std::string("no trial could be located for ") +
                                           std::string(to_string(method)) + "/" +
                                           std::string(to_string(kind)));
  cell.report = error_stats(std::span<const WorldPoint>(fixes), truths);
  cell.report.dispersion = dispersion;
  return cell;
}

}  // namespace detail

/// Runs the full experiment. The reference position for both calibrations is
/// the scene's camera position.
inline ReplicationResult run_replication(const ReplicationConfig& config) {
  config.scene.validate();
  ReplicationResult out;
  out.config = config;
  const auto& x = config.experiment;
  const CameraIntrinsics uncalibrated = config.scene.intrinsics;

  out.dataset = generate_trials(x.grid, x.trials_per_point, config.scene, config.seed, Stream::Trials);

  const std::array<WorldPoint, 1> reference{config.scene.camera.position};
  out.dispersion_dataset =
      generate_trials(reference, x.dispersion_samples, config.scene, config.seed, Stream::Dispersion);

  Rng sweep_rng = trial_rng(config.seed, Stream::Sweep, 0, 0);
  out.sweep_tracks = rotation_sweep(config.scene, sweep_angles(x.sweep_samples), sweep_rng);
  out.rotation = calibrate_rotation(out.sweep_tracks, uncalibrated);

  for (PositioningMethod method : {PositioningMethod::TwoLed, PositioningMethod::ThreeLed}) {
    MethodCalibrations mc;
    mc.method = method;
    const LocateSettings settings{method, config.options, x.two_led_pair};
    mc.dispersion_rows =
        locate_records(out.dispersion_dataset, config.scene.beacons, uncalibrated, settings);
    std::vector<PositionFix> fixes;
    for (const auto& row : mc.dispersion_rows)
      if (row.fix) fixes.push_back(*row.fix);
    mc.dispersion = calibrate_dispersion(fixes, reference[0], uncalibrated, config.dispersion_mode);

    out.cells.push_back(detail::evaluate_cell(method, CalibrationKind::None, uncalibrated, config,
                                              out.dataset, std::nullopt));
    out.cells.push_back(detail::evaluate_cell(method, CalibrationKind::Rotation,
                                              out.rotation.intrinsics, config, out.dataset,
                                              std::nullopt));
    out.cells.push_back(detail::evaluate_cell(method, CalibrationKind::Dispersion,
                                              mc.dispersion.intrinsics, config, out.dataset,
                                              mc.dispersion.summary));
    out.dispersion.push_back(std::move(mc));
  }
  return out;
}

inline std::string replication_summary(const ReplicationResult& r) {
  using io::fmt6;
  const auto& s = r.config.scene;
  std::string out = "replication summary\n";
  out += "seed: " + std::to_string(r.config.seed) + "\n";
  out += "grid points: " + std::to_string(r.config.experiment.grid.size()) +
         ", trials per point: " + std::to_string(r.config.experiment.trials_per_point) +
         ", records: " + std::to_string(r.dataset.size()) + "\n";
  out += "true principal point: (" + fmt6(s.true_principal_point.u) + ", " +
         fmt6(s.true_principal_point.v) + ") px\n";
  out += "noise: sigma " + fmt6(s.noise.pixel_sigma) + " px, quantize " +
         (s.noise.quantize ? "on" : "off") + "\n";
  const PixelPoint rot = r.rotation.intrinsics.corrected_principal_point();
  out += "rotation calibration: (" + fmt6(rot.u) + ", " + fmt6(rot.v) + ") px from " +
         std::to_string(r.rotation.tracks_used) + " tracks\n";
  for (const auto& mc : r.dispersion) {
    const PixelPoint pp = mc.dispersion.intrinsics.corrected_principal_point();
    out += "dispersion calibration (" + std::string(to_string(mc.method)) + "): (" + fmt6(pp.u) +
           ", " + fmt6(pp.v) + ") px from " + std::to_string(mc.dispersion.summary.sample_count) +
           " fixes\n";
  }
  out += "\n";
  for (const auto& c : r.cells)
    out += io::summary_block(std::string(to_string(c.method)) + " / " +
                                 std::string(to_string(c.calibration)),
                             c.report, c.failed);
  out += "\ncomparisons (ratio = second / first)\n";
  for (PositioningMethod m : {PositioningMethod::TwoLed, PositioningMethod::ThreeLed}) {
    const auto& none = r.cell(m, CalibrationKind::None).report;
    const auto& rot_r = r.cell(m, CalibrationKind::Rotation).report;
    const auto& disp = r.cell(m, CalibrationKind::Dispersion).report;
    auto line = [&](const char* label, const ErrorReport& a, const ErrorReport& b) {
      const auto cmp = compare_reports(a, b);
      out += "  " + std::string(to_string(m)) + " " + label + ": mean ratio " +
             fmt6(cmp.mean_ratio) + ", p90 ratio " + fmt6(cmp.p90_ratio) + ", max ratio " +
             fmt6(cmp.max_ratio) + "\n";
    };
    line("none -> rotation", none, rot_r);
    line("none -> dispersion", none, disp);
    line("rotation -> dispersion", rot_r, disp);
  }
  return out;
}

}  // namespace vlp
