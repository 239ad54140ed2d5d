#pragma once

// Principal-point correction.
//
// Rotation method: spinning the camera about its optical axis moves every LED
// image along a circle centered on the true principal point. Fitting those
// circles locates it directly.
//
// Dispersion-circle method: repeated fixes at a known position scatter around
// a biased center. The mean offset, mapped back through the magnification
// f / H, is the principal-point error.

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vlp/camera_model.hpp"
#include "vlp/circle.hpp"
#include "vlp/error.hpp"
#include "vlp/positioning.hpp"

namespace vlp {

struct TrackFit {
  std::size_t track_index = 0;
  std::optional<CircleFit> fit;  // empty when the track was degenerate
  std::string error;
};

struct RotationCalibration {
  CameraIntrinsics intrinsics;
  std::vector<TrackFit> tracks;
  std::size_t tracks_used = 0;
};

/// Fits a circle to each LED track and writes the unweighted mean of the
/// centers into the corrected principal point. Degenerate tracks are reported
/// and skipped.
inline RotationCalibration calibrate_rotation(std::span<const std::vector<PixelPoint>> tracks,
                                              const CameraIntrinsics& k) {
  RotationCalibration out;
  double su = 0.0, sv = 0.0;
  for (std::size_t t = 0; t < tracks.size(); ++t) {
    TrackFit tf;
    tf.track_index = t;
    try {
      tf.fit = fit_circle(tracks[t]);
      su += tf.fit->center.u;
      sv += tf.fit->center.v;
      ++out.tracks_used;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateCircle) throw;
      tf.error = e.what();
    }
    out.tracks.push_back(std::move(tf));
  }
  if (out.tracks_used == 0)
    throw Error(ErrorCode::InsufficientTracks,
                "none of " + std::to_string(tracks.size()) + " tracks could be fitted");
  const double n = static_cast<double>(out.tracks_used);
  out.intrinsics = k.with_principal_point({su / n, sv / n});
  return out;
}

enum class DispersionMode {
  Physical,      // offset scaled by f / H before dividing by the pitch
  Literal,       // u1 = u0 + dx / pitch_i with the numbers taken as given
};

struct DispersionSummary {
  Vec2 mean_offset;       // cm, world frame
  Vec2 enclosing_center;  // cm
  double enclosing_radius = 0.0;
  std::size_t sample_count = 0;
};

struct DispersionCalibration {
  CameraIntrinsics intrinsics;
  DispersionSummary summary;
  PixelPoint correction;  // px added to the principal point the fixes used
  double mean_height = 0.0;
};

/// Corrects the principal point from fixes taken at one known position.
///
/// `k` must be the intrinsics the fixes were computed with; the correction is
/// applied on top of its principal point. In physical mode the offset is
/// expressed in the camera frame (using each fix's yaw when it has one), so
/// a fix biased by +dx on the ground corresponds to the principal point being
/// dx * f / (H * pitch) pixels further toward -u than assumed.
inline DispersionCalibration calibrate_dispersion(std::span<const PositionFix> fixes,
                                                  const WorldPoint& ground_truth,
                                                  const CameraIntrinsics& k,
                                                  DispersionMode mode = DispersionMode::Physical) {
  if (fixes.empty()) throw Error(ErrorCode::EmptyInput, "no fixes to calibrate from");

  const double n = static_cast<double>(fixes.size());
  double sx = 0.0, sy = 0.0;        // world-frame offset sums
  double cam_x = 0.0, cam_y = 0.0;  // camera-frame offset sums
  double sum_h = 0.0;
  std::vector<Vec2> planar;
  planar.reserve(fixes.size());
  for (std::size_t idx = 0; idx < fixes.size(); ++idx) {
    const auto& fix = fixes[idx];
    if (!fix.diagnostics || !(fix.diagnostics->height > 0.0))
      throw Error(ErrorCode::MissingDiagnostics,
                  "fix " + std::to_string(idx) + " carries no height diagnostic");
    const double dx = fix.position.x - ground_truth.x;
    const double dy = fix.position.y - ground_truth.y;
    sx += dx;
    sy += dy;
    const double yaw = fix.diagnostics->theta.value_or(0.0);
    const double c = std::cos(yaw), s = std::sin(yaw);
    cam_x += c * dx + s * dy;
    cam_y += -s * dx + c * dy;
    sum_h += fix.diagnostics->height;
    planar.push_back({fix.position.x, fix.position.y});
  }

  DispersionCalibration out;
  out.mean_height = sum_h / n;
  out.summary.mean_offset = {sx / n, sy / n};
  out.summary.sample_count = fixes.size();
  const Circle mec = min_enclosing_circle(planar);
  out.summary.enclosing_center = mec.center;
  out.summary.enclosing_radius = mec.radius;

  if (mode == DispersionMode::Physical) {
    // cm * mm / (cm * mm/px) = px
    const double gain = k.focal_length() / out.mean_height;
    out.correction = {-(cam_x / n) * gain / k.pitch_i(), -(cam_y / n) * gain / k.pitch_j()};
  } else {
    out.correction = {out.summary.mean_offset.x / k.pitch_i(),
                      out.summary.mean_offset.y / k.pitch_j()};
  }

  const PixelPoint pp = k.corrected_principal_point();
  out.intrinsics = k.with_principal_point({pp.u + out.correction.u, pp.v + out.correction.v});
  return out;
}

}  // namespace vlp
