#pragma once

// Camera positioning from LED detections: height from an LED pair, three-LED
// trilateration and two-LED rotation-corrected positioning.
//
// World coordinates are cm, image coordinates mm. The camera plane is parallel
// to the LED plane. Image offsets follow the non-inverting pinhole used by the
// simulator: an LED displaced by +dx from the camera (camera frame) appears at
// i = +dx * f / H.

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vlp/camera_model.hpp"
#include "vlp/error.hpp"

namespace vlp {

struct BeaconId {
  int value = 0;

  friend auto operator<=>(const BeaconId&, const BeaconId&) = default;
};

struct WorldPoint {
  double x = 0.0;  // cm
  double y = 0.0;  // cm
  double z = 0.0;  // cm

  friend bool operator==(const WorldPoint&, const WorldPoint&) = default;
};

inline WorldPoint operator+(WorldPoint a, WorldPoint b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline WorldPoint operator-(WorldPoint a, WorldPoint b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }

struct LedBeacon {
  BeaconId id;
  WorldPoint position;
};

struct Detection {
  BeaconId beacon_id;
  PixelPoint pixel;
};

enum class PositioningMethod { TwoLed, ThreeLed };

constexpr std::string_view to_string(PositioningMethod m) noexcept {
  return m == PositioningMethod::TwoLed ? "two-led" : "three-led";
}

/// Intermediate quantities of a fix. Per-beacon vectors are ordered by
/// ascending beacon id.
struct Diagnostics {
  double height = 0.0;                 // H, cm
  double image_distance = 0.0;         // d, mm
  double world_distance = 0.0;         // D, cm
  std::vector<double> image_radius;    // L_i, mm
  std::vector<double> world_radius;    // R_i, cm
  std::optional<double> theta;         // camera yaw, rad; two-LED only
};

struct PositionFix {
  WorldPoint position;
  PositioningMethod method = PositioningMethod::ThreeLed;
  std::optional<Diagnostics> diagnostics;
};

struct HeightEstimate {
  double height = 0.0;          // H, cm
  double camera_z = 0.0;        // z_c, cm
  double image_distance = 0.0;  // d, mm
  double world_distance = 0.0;  // D, cm
};

struct PositioningOptions {
  // Three-LED height from the two lowest-id beacons only, instead of the
  // pooled estimate over all pairs.
  bool single_pair_height = false;
};

namespace tolerance {
inline constexpr double kEqualHeightCm = 0.1;
inline constexpr double kSingularDeterminant = 1e-9;
inline constexpr double kCoincidentProjectionMm = 1e-6;
}  // namespace tolerance

namespace detail {

inline double hypot2(double a, double b) noexcept { return std::hypot(a, b); }

inline void require_equal_heights(std::span<const LedBeacon> beacons) {
  for (const auto& b : beacons) {
    if (std::abs(b.position.z - beacons.front().position.z) > tolerance::kEqualHeightCm)
      throw Error(ErrorCode::UnequalBeaconHeights,
                  "beacons " + std::to_string(beacons.front().id.value) + " and " +
                      std::to_string(b.id.value) + " differ in z by more than " +
                      std::to_string(tolerance::kEqualHeightCm) + " cm");
  }
}

inline const LedBeacon& find_beacon(std::span<const LedBeacon> beacons, BeaconId id) {
  auto it = std::find_if(beacons.begin(), beacons.end(),
                         [&](const LedBeacon& b) { return b.id == id; });
  if (it == beacons.end())
    throw Error(ErrorCode::UnknownBeacon, "no beacon with id " + std::to_string(id.value));
  return *it;
}

struct Observed {
  ImagePoint image;
  LedBeacon beacon;
};

// Resolves detections against the beacon set and orders them by beacon id.
inline std::vector<Observed> resolve(std::span<const Detection> detections,
                                     std::span<const LedBeacon> beacons,
                                     const CameraIntrinsics& k, std::size_t expected) {
  if (detections.size() != expected)
    throw Error(ErrorCode::InvalidInput, "expected " + std::to_string(expected) +
                                             " detections, got " +
                                             std::to_string(detections.size()));
  std::vector<Observed> out;
  out.reserve(expected);
  for (const auto& det : detections) {
    if (!std::isfinite(det.pixel.u) || !std::isfinite(det.pixel.v))
      throw Error(ErrorCode::InvalidInput, "non-finite detection");
    out.push_back({pixel_to_image(det.pixel, k), find_beacon(beacons, det.beacon_id)});
  }
  std::sort(out.begin(), out.end(),
            [](const Observed& a, const Observed& b) { return a.beacon.id < b.beacon.id; });
  for (std::size_t n = 1; n < out.size(); ++n)
    if (out[n].beacon.id == out[n - 1].beacon.id)
      throw Error(ErrorCode::InvalidInput,
                  "duplicate detection of beacon " + std::to_string(out[n].beacon.id.value));
  return out;
}

inline std::vector<LedBeacon> beacons_of(const std::vector<Observed>& obs) {
  std::vector<LedBeacon> out;
  for (const auto& o : obs) out.push_back(o.beacon);
  return out;
}

inline void fill_radii(const std::vector<Observed>& obs, double height, double focal,
                       Diagnostics& diag) {
  for (const auto& o : obs) {
    const double radius_mm = hypot2(o.image.i, o.image.j);
    diag.image_radius.push_back(radius_mm);
    diag.world_radius.push_back(height / focal * radius_mm);
  }
}

}  // namespace detail

/// Camera height below the LED plane from one LED pair, by similar triangles:
/// H = D / d * f, with D the world baseline and d its image length.
inline HeightEstimate estimate_height(const ImagePoint& image_a, const LedBeacon& beacon_a,
                                      const ImagePoint& image_b, const LedBeacon& beacon_b,
                                      const CameraIntrinsics& k) {
  if (beacon_a.id == beacon_b.id)
    throw Error(ErrorCode::InvalidInput, "height needs two distinct beacons");
  const std::array<LedBeacon, 2> pair{beacon_a, beacon_b};
  detail::require_equal_heights(pair);

  const double d = detail::hypot2(image_a.i - image_b.i, image_a.j - image_b.j);
  if (d < tolerance::kCoincidentProjectionMm)
    throw Error(ErrorCode::CoincidentProjection,
                "beacons " + std::to_string(beacon_a.id.value) + " and " +
                    std::to_string(beacon_b.id.value) + " project to the same image point");
  const double D = detail::hypot2(beacon_a.position.x - beacon_b.position.x,
                                  beacon_a.position.y - beacon_b.position.y);
  // D/d is cm/mm and f is mm, so H comes out in cm.
  const double H = D / d * k.focal_length();
  const LedBeacon& first = beacon_a.id < beacon_b.id ? beacon_a : beacon_b;
  return {H, first.position.z - H, d, D};
}

/// Three-LED trilateration. Radii R_i = H/f * L_i are intersected through the
/// linearized circle system, solved relative to the lowest-id beacon.
inline PositionFix trilaterate_three(std::span<const Detection> detections,
                                     std::span<const LedBeacon> beacons,
                                     const CameraIntrinsics& k,
                                     const PositioningOptions& options = {}) {
  const auto obs = detail::resolve(detections, beacons, k, 3);
  const auto used = detail::beacons_of(obs);
  detail::require_equal_heights(used);

  const WorldPoint& p1 = obs[0].beacon.position;
  const double a11 = obs[1].beacon.position.x - p1.x;
  const double a12 = obs[1].beacon.position.y - p1.y;
  const double a21 = obs[2].beacon.position.x - p1.x;
  const double a22 = obs[2].beacon.position.y - p1.y;
  const double det = a11 * a22 - a12 * a21;
  const double scale = std::hypot(a11, a12) * std::hypot(a21, a22);
  if (scale == 0.0 || std::abs(det) / scale < tolerance::kSingularDeterminant)
    throw Error(ErrorCode::SingularGeometry, "beacons " +
                                                 std::to_string(obs[0].beacon.id.value) + ", " +
                                                 std::to_string(obs[1].beacon.id.value) + ", " +
                                                 std::to_string(obs[2].beacon.id.value) +
                                                 " are collinear");

  HeightEstimate primary = estimate_height(obs[0].image, obs[0].beacon, obs[1].image,
                                           obs[1].beacon, k);
  double H = primary.height;
  if (!options.single_pair_height) {
    // Pooled over the three pairs: f * sum(D) / sum(d). Long baselines carry
    // proportionally more weight than in a plain mean of per-pair heights.
    double sum_D = 0.0;
    double sum_d = 0.0;
    for (auto [a, b] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}}) {
      const auto e = estimate_height(obs[a].image, obs[a].beacon, obs[b].image, obs[b].beacon, k);
      sum_D += e.world_distance;
      sum_d += e.image_distance;
    }
    H = sum_D / sum_d * k.focal_length();
  }

  Diagnostics diag;
  diag.height = H;
  diag.image_distance = primary.image_distance;
  diag.world_distance = primary.world_distance;
  detail::fill_radii(obs, H, k.focal_length(), diag);

  const auto& R = diag.world_radius;
  const double b2 = a11 * a11 + a12 * a12;
  const double b3 = a21 * a21 + a22 * a22;
  const double rhs1 = 0.5 * (R[0] * R[0] - R[1] * R[1] + b2);
  const double rhs2 = 0.5 * (R[0] * R[0] - R[2] * R[2] + b3);
  const double xr = (rhs1 * a22 - a12 * rhs2) / det;
  const double yr = (a11 * rhs2 - rhs1 * a21) / det;

  PositionFix fix;
  fix.method = PositioningMethod::ThreeLed;
  fix.position = {p1.x + xr, p1.y + yr, p1.z - H};
  fix.diagnostics = std::move(diag);
  return fix;
}

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) noexcept {
  a = std::remainder(a, 2.0 * std::numbers::pi);
  if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

/// Two-LED positioning. The image baseline angle atan2(j1 - j2, i1 - i2)
/// against the world baseline bearing gives the camera yaw; the image midpoint
/// offset, scaled by H/f and rotated by the yaw, is subtracted from the world
/// midpoint. With the LEDs on a world-X-parallel baseline the bearing is 0 or pi.
inline PositionFix locate_two(std::span<const Detection> detections,
                              std::span<const LedBeacon> beacons,
                              const CameraIntrinsics& k) {
  const auto obs = detail::resolve(detections, beacons, k, 2);
  const auto& [img1, led1] = obs[0];
  const auto& [img2, led2] = obs[1];
  const HeightEstimate h = estimate_height(img1, led1, img2, led2, k);

  const double image_bearing = std::atan2(img1.j - img2.j, img1.i - img2.i);
  const double world_bearing = std::atan2(led1.position.y - led2.position.y,
                                          led1.position.x - led2.position.x);
  const double yaw = wrap_angle(world_bearing - image_bearing);

  // Camera-frame offset of the LED midpoint from the camera, in cm.
  const double scale = h.height / k.focal_length();
  const double off_x = 0.5 * (img1.i + img2.i) * scale;
  const double off_y = 0.5 * (img1.j + img2.j) * scale;
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);

  const double mid_x = 0.5 * (led1.position.x + led2.position.x);
  const double mid_y = 0.5 * (led1.position.y + led2.position.y);

  Diagnostics diag;
  diag.height = h.height;
  diag.image_distance = h.image_distance;
  diag.world_distance = h.world_distance;
  diag.theta = yaw;
  detail::fill_radii(obs, h.height, k.focal_length(), diag);

  PositionFix fix;
  fix.method = PositioningMethod::TwoLed;
  fix.position = {mid_x - (c * off_x - s * off_y), mid_y - (s * off_x + c * off_y), h.camera_z};
  fix.diagnostics = std::move(diag);
  return fix;
}

/// Dispatches on method; two-LED expects exactly the two chosen detections.
inline PositionFix locate(PositioningMethod method, std::span<const Detection> detections,
                          std::span<const LedBeacon> beacons, const CameraIntrinsics& k,
                          const PositioningOptions& options = {}) {
  return method == PositioningMethod::TwoLed ? locate_two(detections, beacons, k)
                                             : trilaterate_three(detections, beacons, k, options);
}

}  // namespace vlp
