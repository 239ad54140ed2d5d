#pragma once

// Forward pinhole simulator: projects world LEDs into pixels through a true
// principal point that may differ from the one the localizer assumes.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "vlp/camera_model.hpp"
#include "vlp/error.hpp"
#include "vlp/positioning.hpp"

namespace vlp {

/// Seeded random stream. Uniform and Gaussian variates are derived from the
/// raw 64-bit engine output so sequences match across standard libraries.
class Rng {
 public:
  explicit Rng(std::initializer_list<std::uint64_t> key) {
    std::vector<std::uint32_t> words;
    for (std::uint64_t k : key) {
      words.push_back(static_cast<std::uint32_t>(k));
      words.push_back(static_cast<std::uint32_t>(k >> 32));
    }
    std::seed_seq seq(words.begin(), words.end());
    engine_.seed(seq);
  }

  // [0, 1)
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Box-Muller, one variate per call.
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

// Distinguishes the independent streams drawn from one base seed.
enum class Stream : std::uint64_t { Observe = 1, Trials = 2, Sweep = 3, Dispersion = 4 };

struct CameraPose {
  WorldPoint position;
  double yaw = 0.0;  // rad, about the vertical axis
};

struct NoiseModel {
  double pixel_sigma = 0.0;  // px, isotropic Gaussian
  bool quantize = false;     // round to integer pixels
};

struct SceneConfig {
  std::vector<LedBeacon> beacons;
  CameraPose camera;
  CameraIntrinsics intrinsics;  // what the localizer assumes
  PixelPoint true_principal_point;
  NoiseModel noise;
  std::uint64_t seed = 0;

  void validate() const {
    intrinsics.validate();
    if (!(noise.pixel_sigma >= 0.0))
      throw Error(ErrorCode::InvalidInput, "pixel_sigma must be non-negative");
    if (!std::isfinite(true_principal_point.u) || !std::isfinite(true_principal_point.v))
      throw Error(ErrorCode::InvalidInput, "true principal point must be finite");
    for (const auto& b : beacons)
      if (!(b.position.z > camera.position.z))
        throw Error(ErrorCode::BeaconBehindCamera,
                    "beacon " + std::to_string(b.id.value) + " is not above the camera");
    for (std::size_t a = 0; a < beacons.size(); ++a)
      for (std::size_t b = a + 1; b < beacons.size(); ++b)
        if (beacons[a].id == beacons[b].id)
          throw Error(ErrorCode::InvalidInput,
                      "duplicate beacon id " + std::to_string(beacons[a].id.value));
  }
};

/// LEDs of the reference rig, cm.
inline std::vector<LedBeacon> reference_beacons() {
  return {{{1}, {-46.5, -49.5, 150.0}}, {{2}, {-46.0, -42.0, 150.0}}, {{3}, {46.0, 49.0, 150.0}}};
}

/// Reference scene: the reference rig with the camera at the origin, no offset and
/// no noise.
inline SceneConfig default_scene() {
  SceneConfig s;
  s.beacons = reference_beacons();
  s.intrinsics = CameraIntrinsics::reference_rig();
  s.true_principal_point = s.intrinsics.nominal_principal_point();
  return s;
}

/// 6 x 6 grid at z = 0, spanning 60 cm on each axis around the origin.
inline std::vector<WorldPoint> default_grid() {
  std::vector<WorldPoint> grid;
  for (int row = 0; row < 6; ++row)
    for (int col = 0; col < 6; ++col)
      grid.push_back({-30.0 + 12.0 * col, -30.0 + 12.0 * row, 0.0});
  return grid;
}

struct Projection {
  PixelPoint pixel;
  bool in_frame = false;
};

/// Noiseless projection of one LED. The world offset is rotated by -yaw into
/// the camera frame, scaled by f / H onto the image plane (cm ratio times mm
/// gives mm) and placed about the true principal point.
inline Projection project(const LedBeacon& beacon, const SceneConfig& scene) {
  const WorldPoint& cam = scene.camera.position;
  const double H = beacon.position.z - cam.z;
  if (!(H > 0.0))
    throw Error(ErrorCode::BeaconBehindCamera,
                "beacon " + std::to_string(beacon.id.value) + " is not above the camera");
  const double dx = beacon.position.x - cam.x;
  const double dy = beacon.position.y - cam.y;
  const double c = std::cos(scene.camera.yaw);
  const double s = std::sin(scene.camera.yaw);
  const double x_rel = c * dx + s * dy;
  const double y_rel = -s * dx + c * dy;
  const double f = scene.intrinsics.focal_length();
  const ImagePoint img{x_rel * f / H, y_rel * f / H};

  const CameraIntrinsics truth = scene.intrinsics.with_principal_point(scene.true_principal_point);
  Projection p;
  p.pixel = image_to_pixel(img, truth);
  p.in_frame = truth.contains(p.pixel);
  return p;
}

inline PixelPoint apply_noise(PixelPoint p, const NoiseModel& noise, Rng& rng) {
  if (noise.pixel_sigma > 0.0) {
    p.u += noise.pixel_sigma * rng.normal();
    p.v += noise.pixel_sigma * rng.normal();
  }
  if (noise.quantize) {
    p.u = std::round(p.u);
    p.v = std::round(p.v);
  }
  return p;
}

/// Detections of every in-frame beacon with the scene's noise model applied.
/// Visibility is decided on the noiseless projection.
inline std::vector<Detection> observe(const SceneConfig& scene, Rng& rng) {
  std::vector<Detection> out;
  for (const auto& b : scene.beacons) {
    const Projection p = project(b, scene);
    // Draw noise for every beacon so the stream does not depend on visibility.
    const PixelPoint noisy = apply_noise(p.pixel, scene.noise, rng);
    if (p.in_frame) out.push_back({b.id, noisy});
  }
  return out;
}

inline std::vector<Detection> observe(const SceneConfig& scene) {
  Rng rng{scene.seed, static_cast<std::uint64_t>(Stream::Observe)};
  return observe(scene, rng);
}

/// Evenly spaced yaw angles over one revolution; 12 gives 30 degree steps.
inline std::vector<double> sweep_angles(std::size_t count = 12) {
  std::vector<double> out;
  for (std::size_t n = 0; n < count; ++n)
    out.push_back(2.0 * std::numbers::pi * static_cast<double>(n) / static_cast<double>(count));
  return out;
}

/// One pixel track per beacon (scene order) while the camera yaws through
/// `angles` about its optical axis. Samples that leave the frame are dropped.
inline std::vector<std::vector<PixelPoint>> rotation_sweep(const SceneConfig& scene,
                                                           std::span<const double> angles,
                                                           Rng& rng) {
  if (angles.size() < 3)
    throw Error(ErrorCode::InvalidInput, "rotation sweep needs at least 3 angles");
  std::vector<std::vector<PixelPoint>> tracks(scene.beacons.size());
  SceneConfig rotated = scene;
  for (double angle : angles) {
    rotated.camera.yaw = angle;
    for (std::size_t b = 0; b < scene.beacons.size(); ++b) {
      const Projection p = project(scene.beacons[b], rotated);
      const PixelPoint noisy = apply_noise(p.pixel, scene.noise, rng);
      if (p.in_frame) tracks[b].push_back(noisy);
    }
  }
  return tracks;
}

inline std::vector<std::vector<PixelPoint>> rotation_sweep(const SceneConfig& scene,
                                                           std::span<const double> angles) {
  Rng rng{scene.seed, static_cast<std::uint64_t>(Stream::Sweep)};
  return rotation_sweep(scene, angles, rng);
}

struct TrialRecord {
  std::size_t point_index = 0;
  std::size_t trial_index = 0;
  CameraPose truth;
  std::vector<Detection> detections;
};

/// Stream key of trial (p, t). The tuple itself seeds the engine, so distinct
/// trials never share a key and any trial can be regenerated on its own.
inline Rng trial_rng(std::uint64_t base_seed, Stream stream, std::size_t point,
                     std::size_t trial) {
  return Rng{base_seed, static_cast<std::uint64_t>(stream), point, trial};
}

/// Dataset of `trials_per_point` observations at every grid position, ordered
/// by (point, trial). The template's yaw is kept at every point.
inline std::vector<TrialRecord> generate_trials(std::span<const WorldPoint> grid,
                                                std::size_t trials_per_point,
                                                const SceneConfig& scene_template,
                                                std::uint64_t base_seed,
                                                Stream stream = Stream::Trials) {
  if (grid.empty()) throw Error(ErrorCode::EmptyInput, "empty grid");
  if (trials_per_point == 0) throw Error(ErrorCode::InvalidInput, "trials_per_point must be >= 1");
  std::vector<TrialRecord> out;
  out.reserve(grid.size() * trials_per_point);
  SceneConfig scene = scene_template;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    scene.camera.position = grid[p];
    scene.validate();
    for (std::size_t t = 0; t < trials_per_point; ++t) {
      Rng rng = trial_rng(base_seed, stream, p, t);
      out.push_back({p, t, scene.camera, observe(scene, rng)});
    }
  }
  return out;
}

}  // namespace vlp
