#pragma once

// Pixel and image-plane coordinate systems of a pinhole sensor.
//
// Units: pixel coordinates in px, image-plane coordinates in mm, focal length
// and pixel pitch in mm and mm/px. World coordinates (cm) live elsewhere.
// Image axes are parallel to the pixel axes with the same orientation.

#include <cmath>
#include <string>

#include "vlp/error.hpp"

namespace vlp {

struct PixelPoint {
  double u = 0.0;
  double v = 0.0;

  friend bool operator==(const PixelPoint&, const PixelPoint&) = default;
};

struct ImagePoint {
  double i = 0.0;  // mm
  double j = 0.0;  // mm

  friend bool operator==(const ImagePoint&, const ImagePoint&) = default;
};

struct Resolution {
  int width_px = 0;
  int height_px = 0;

  friend bool operator==(const Resolution&, const Resolution&) = default;
};

class CameraIntrinsics {
 public:
  static constexpr double kDefaultPitchMm = 0.006;

  CameraIntrinsics() = default;

  // The corrected principal point starts at the image center.
  CameraIntrinsics(double focal_length_mm, double pitch_i_mm, double pitch_j_mm,
                   Resolution resolution)
      : focal_length_(focal_length_mm),
        pitch_i_(pitch_i_mm),
        pitch_j_(pitch_j_mm),
        resolution_(resolution),
        corrected_(nominal_principal_point()) {
    validate();
  }

  // Reference rig camera: f = 3 mm, 800x600, 0.006 mm/px.
  static CameraIntrinsics reference_rig() {
    return CameraIntrinsics(3.0, kDefaultPitchMm, kDefaultPitchMm, {800, 600});
  }

  double focal_length() const noexcept { return focal_length_; }
  double pitch_i() const noexcept { return pitch_i_; }
  double pitch_j() const noexcept { return pitch_j_; }
  Resolution resolution() const noexcept { return resolution_; }

  PixelPoint nominal_principal_point() const noexcept {
    return {resolution_.width_px / 2.0, resolution_.height_px / 2.0};
  }
  PixelPoint corrected_principal_point() const noexcept { return corrected_; }

  // Returns a copy with the principal point replaced; the receiver is unchanged.
  CameraIntrinsics with_principal_point(PixelPoint pp) const {
    CameraIntrinsics out = *this;
    out.corrected_ = pp;
    out.validate();
    return out;
  }

  CameraIntrinsics with_nominal_principal_point() const {
    return with_principal_point(nominal_principal_point());
  }

  bool contains(PixelPoint p) const noexcept {
    return p.u >= 0.0 && p.u <= resolution_.width_px && p.v >= 0.0 &&
           p.v <= resolution_.height_px;
  }

  void validate() const {
    if (!(focal_length_ > 0.0) || !std::isfinite(focal_length_))
      throw Error(ErrorCode::InvalidInput, "focal length must be positive");
    if (!(pitch_i_ > 0.0) || !(pitch_j_ > 0.0) || !std::isfinite(pitch_i_) ||
        !std::isfinite(pitch_j_))
      throw Error(ErrorCode::InvalidInput, "pixel pitch must be positive");
    if (resolution_.width_px <= 0 || resolution_.height_px <= 0)
      throw Error(ErrorCode::InvalidInput, "resolution must be positive");
    if (!contains(corrected_))
      throw Error(ErrorCode::InvalidInput,
                  "principal point (" + std::to_string(corrected_.u) + ", " +
                      std::to_string(corrected_.v) + ") lies outside the sensor");
  }

  friend bool operator==(const CameraIntrinsics&, const CameraIntrinsics&) = default;

 private:
  double focal_length_ = 3.0;
  double pitch_i_ = kDefaultPitchMm;
  double pitch_j_ = kDefaultPitchMm;
  Resolution resolution_{800, 600};
  PixelPoint corrected_{400.0, 300.0};
};

/// Pixel to image plane about the corrected principal point:
/// i = (u - u1) * pitch_i, j = (v - v1) * pitch_j.
inline ImagePoint pixel_to_image(PixelPoint p, const CameraIntrinsics& k) noexcept {
  const PixelPoint pp = k.corrected_principal_point();
  return {(p.u - pp.u) * k.pitch_i(), (p.v - pp.v) * k.pitch_j()};
}

/// Exact inverse of pixel_to_image.
inline PixelPoint image_to_pixel(ImagePoint p, const CameraIntrinsics& k) noexcept {
  const PixelPoint pp = k.corrected_principal_point();
  return {pp.u + p.i / k.pitch_i(), pp.v + p.j / k.pitch_j()};
}

}  // namespace vlp
