#include <gtest/gtest.h>

#include <random>

#include "vlp/camera_model.hpp"

namespace vlp {
namespace {

CameraIntrinsics camera_with_pp(double u, double v) {
  return CameraIntrinsics::reference_rig().with_principal_point({u, v});
}

TEST(CameraIntrinsics, NominalPrincipalPointIsImageCenter) {
  const auto k = CameraIntrinsics::reference_rig();
  EXPECT_EQ(k.nominal_principal_point(), (PixelPoint{400.0, 300.0}));
  EXPECT_EQ(k.corrected_principal_point(), k.nominal_principal_point());
  const CameraIntrinsics odd(3.0, 0.006, 0.006, {801, 601});
  EXPECT_EQ(odd.nominal_principal_point(), (PixelPoint{400.5, 300.5}));
}

TEST(CameraIntrinsics, RejectsInvalidParameters) {
  EXPECT_THROW(CameraIntrinsics(0.0, 0.006, 0.006, {800, 600}), Error);
  EXPECT_THROW(CameraIntrinsics(3.0, -0.006, 0.006, {800, 600}), Error);
  EXPECT_THROW(CameraIntrinsics(3.0, 0.006, 0.0, {800, 600}), Error);
  EXPECT_THROW(CameraIntrinsics(3.0, 0.006, 0.006, {0, 600}), Error);
  EXPECT_THROW(CameraIntrinsics::reference_rig().with_principal_point({801.0, 300.0}), Error);
  EXPECT_THROW(CameraIntrinsics::reference_rig().with_principal_point({400.0, -1.0}), Error);
  EXPECT_NO_THROW(CameraIntrinsics::reference_rig().with_principal_point({800.0, 0.0}));
}

TEST(CameraIntrinsics, WithPrincipalPointLeavesOriginalUntouched) {
  const auto k = CameraIntrinsics::reference_rig();
  const auto moved = k.with_principal_point({406.3, 295.9});
  EXPECT_EQ(k.corrected_principal_point(), (PixelPoint{400.0, 300.0}));
  EXPECT_EQ(moved.corrected_principal_point(), (PixelPoint{406.3, 295.9}));
  EXPECT_EQ(moved.nominal_principal_point(), k.nominal_principal_point());
}

TEST(PixelToImage, IdentityAtPrincipalPoint) {
  const ImagePoint p = pixel_to_image({400, 300}, CameraIntrinsics::reference_rig());
  EXPECT_EQ(p.i, 0.0);
  EXPECT_EQ(p.j, 0.0);
}

TEST(PixelToImage, NominalTransform) {
  // (450 - 400) * 0.006
  const ImagePoint p = pixel_to_image({450, 300}, CameraIntrinsics::reference_rig());
  EXPECT_NEAR(p.i, 0.300, 1e-15);
  EXPECT_EQ(p.j, 0.0);
}

TEST(PixelToImage, CorrectedTransform) {
  // (450 - 406.3) * 0.006
  const ImagePoint p = pixel_to_image({450, 300}, camera_with_pp(406.3, 300));
  EXPECT_NEAR(p.i, 0.2622, 1e-12);
}

TEST(PixelToImage, UnequalPitches) {
  const CameraIntrinsics k(3.0, 0.004, 0.008, {800, 600});
  const ImagePoint p = pixel_to_image({410, 310}, k);
  EXPECT_NEAR(p.i, 0.04, 1e-15);
  EXPECT_NEAR(p.j, 0.08, 1e-15);
}

TEST(PixelToImage, NominalPrincipalPointReproducesUncorrectedFormula) {
  const auto k = camera_with_pp(406.3, 295.9).with_nominal_principal_point();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 800), v(0, 600);
  for (int n = 0; n < 200; ++n) {
    const PixelPoint p{u(rng), v(rng)};
    const ImagePoint got = pixel_to_image(p, k);
    EXPECT_EQ(got.i, (p.u - 400.0) * 0.006);
    EXPECT_EQ(got.j, (p.v - 300.0) * 0.006);
  }
}

TEST(ImageToPixel, OriginMapsToPrincipalPoint) {
  const auto k = camera_with_pp(406.3, 295.9);
  EXPECT_EQ(image_to_pixel({0, 0}, k), (PixelPoint{406.3, 295.9}));
}

TEST(ImageToPixel, InverseOfNominalExample) {
  const PixelPoint p = image_to_pixel({0.300, 0.0}, CameraIntrinsics::reference_rig());
  EXPECT_NEAR(p.u, 450.0, 1e-12);
  EXPECT_EQ(p.v, 300.0);
}

// Relative to the sensor half-extent, the natural scale of both coordinates.
TEST(ImageToPixel, RoundTripProperty) {
  const CameraIntrinsics k = CameraIntrinsics(3.0, 0.0045, 0.0061, {800, 600}).with_principal_point({406.3, 295.9});
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> mm(-2.5, 2.5), px(-100, 900);
  for (int n = 0; n < 1000; ++n) {
    const ImagePoint ip{mm(rng), mm(rng)};
    const ImagePoint back = pixel_to_image(image_to_pixel(ip, k), k);
    EXPECT_NEAR(back.i, ip.i, 1e-12 * std::max(std::abs(ip.i), 2.5));
    EXPECT_NEAR(back.j, ip.j, 1e-12 * std::max(std::abs(ip.j), 2.5));

    const PixelPoint pp{px(rng), px(rng)};
    const PixelPoint pback = image_to_pixel(pixel_to_image(pp, k), k);
    EXPECT_NEAR(pback.u, pp.u, 1e-12 * std::max(std::abs(pp.u), 800.0));
    EXPECT_NEAR(pback.v, pp.v, 1e-12 * std::max(std::abs(pp.v), 800.0));
  }
}

TEST(PixelToImage, AffineProperty) {
  const auto k = camera_with_pp(406.3, 295.9);
  std::mt19937_64 rng(3);
  // Integer-valued pixels and dyadic offsets keep every difference exact.
  std::uniform_int_distribution<int> px(0, 800), step(-64, 64);
  for (int n = 0; n < 200; ++n) {
    const PixelPoint p{double(px(rng)), double(px(rng))};
    const PixelPoint delta{step(rng) / 4.0, step(rng) / 4.0};
    const ImagePoint a = pixel_to_image(p, k);
    const ImagePoint b = pixel_to_image({p.u + delta.u, p.v + delta.v}, k);
    EXPECT_NEAR(b.i - a.i, delta.u * k.pitch_i(), 1e-15);
    EXPECT_NEAR(b.j - a.j, delta.v * k.pitch_j(), 1e-15);
  }
}

}  // namespace
}  // namespace vlp
